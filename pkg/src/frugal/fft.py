"""Fast-and-frugal trees: binary decision lists where every node is an exit.

A depth-d tree asks d single-attribute questions; each question immediately
classifies the rows it matches, and whatever survives all d questions lands
in a final leaf predicting the opposite of the last exit.  Training builds
all 2^d exit-policy variants greedily and keeps the one with the best
training score.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .errors import DatasetError, TrainingError, UnsupportedScoreError
from .metrics import (
    Confusion,
    DIS2HEAVEN,
    ScoreFunction,
    dis2heaven,
    effort_order_from_predictions,
    popt,
)


@dataclass(frozen=True)
class Range:
    """Unary predicate on one attribute, e.g. ``rfc > 32``."""

    attribute: str
    op: str
    cut: float

    def __post_init__(self):
        if self.op not in ("<=", ">"):
            raise ValueError(f"range op must be <= or >, got {self.op!r}")
        if not np.isfinite(self.cut):
            raise ValueError("range cut must be finite")

    @property
    def display(self) -> str:
        return f"{self.attribute} {self.op} {_fmt(self.cut)}"

    def matches(self, value) -> bool:
        """NaN (missing) never matches."""
        if value is None or np.isnan(value):
            return False
        return value <= self.cut if self.op == "<=" else value > self.cut

    def matches_array(self, values: np.ndarray) -> np.ndarray:
        if self.op == "<=":
            return values <= self.cut
        return values > self.cut


@dataclass(frozen=True)
class ExitPolicy:
    """Per-level exit directions: True sends matching rows to the target
    class, False to its negation."""

    bits: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("exit policy needs at least one level")
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    @property
    def string(self) -> str:
        """Display form: one digit per level plus the implied final digit,
        which is always the opposite of the last exit."""
        digits = "".join("1" if b else "0" for b in self.bits)
        return digits + ("0" if self.bits[-1] else "1")


def all_policies(depth: int) -> list[ExitPolicy]:
    """Every exit policy of the given depth, in ascending binary order
    (level 0 is the leftmost digit)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return [ExitPolicy(bits)
            for bits in itertools.product((False, True), repeat=depth)]


@dataclass(frozen=True)
class Node:
    range: Range
    exit_class: bool
    support: int


@dataclass(frozen=True)
class FFTree:
    """A trained tree: up to ``depth`` exit nodes plus the final leaf.

    ``nodes`` may be shorter than the policy when training ran out of rows
    (or of scoreable ranges); the unused policy digits stay in the label.
    """

    policy: ExitPolicy
    nodes: tuple[Node, ...]
    leaf_class: bool
    leaf_support: int
    train_score: float | None = None
    score_kind: str | None = None

    @property
    def depth(self) -> int:
        return len(self.policy.bits)

    @property
    def truncated(self) -> bool:
        return len(self.nodes) < self.depth

    @property
    def policy_string(self) -> str:
        return self.policy.string

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(n.range.attribute for n in self.nodes))


def discretize(data: Dataset, attribute: str, subset=None) -> list[Range]:
    """Median split of an attribute over the current rows.

    Recomputed at every tree level since the surviving rows shrink.  Returns
    the pair {attr <= median, attr > median}, or nothing when every value is
    missing.  Even-length medians take the mean of the two middle values.
    """
    col = data.column(attribute)
    if subset is not None:
        col = col[subset]
    col = col[~np.isnan(col)]
    if len(col) == 0:
        return []
    cut = float(np.median(col))
    return [Range(attribute, "<=", cut), Range(attribute, ">", cut)]


def score_range(rng: Range, data: Dataset, exit_class: bool,
                fn: ScoreFunction, subset=None) -> float:
    """Score the one-question classifier "rows matching ``rng`` are
    ``exit_class``, everything else is the opposite" on the current rows.

    Expects a binarized dataset and, for Popt, its effort column.
    """
    if not data.binary:
        raise TrainingError("score_range needs binarized labels")
    labels = data.labels if subset is None else data.labels[subset]
    col = data.column(rng.attribute)
    if subset is not None:
        col = col[subset]
    preds = np.where(rng.matches_array(col), exit_class, not exit_class)
    return _score_predictions(preds, labels, data, subset, fn)


def _score_predictions(preds, labels, data, subset, fn: ScoreFunction) -> float:
    if fn.kind == "dis2heaven":
        return dis2heaven(Confusion.from_predictions(preds, labels))
    if fn.kind == "popt":
        if data.effort is None:
            raise UnsupportedScoreError(
                f"{data.name}: popt needs an effort column")
        efforts = data.effort if subset is None else data.effort[subset]
        order = effort_order_from_predictions(preds, efforts)
        return popt(labels[order].astype(float), efforts[order]).value
    raise UnsupportedScoreError(f"unknown score function {fn.kind!r}")


def _best_split(data: Dataset, subset: np.ndarray, exit_class: bool,
                fn: ScoreFunction):
    """Best (range, match mask) at one level, or None if nothing scoreable.

    Ties break on (score, fewer rows consumed, attribute name, <= before >).
    """
    best_key = None
    best = None
    for attribute in data.attributes:
        for rng in discretize(data, attribute, subset):
            col = data.column(rng.attribute)[subset]
            match = rng.matches_array(col)
            n_match = int(match.sum())
            if n_match == 0:
                continue
            score = score_range(rng, data, exit_class, fn, subset)
            key = (fn.sort_key(score), n_match, rng.attribute,
                   0 if rng.op == "<=" else 1)
            if best_key is None or key < best_key:
                best_key = key
                best = (rng, match)
    return best


def build_tree(train: Dataset, policy: ExitPolicy,
               fn: ScoreFunction = DIS2HEAVEN) -> FFTree:
    """Greedy level-by-level construction for one exit policy.

    At each level the best-scoring range exits with the policy's class for
    that level; the rows it does not match move down.  Rows exhausted (or no
    range scoreable) before the last level truncate the tree early.
    """
    _check_trainable(train, fn)
    idx = np.arange(len(train))
    nodes: list[Node] = []
    for bit in policy.bits:
        if len(idx) == 0:
            break
        found = _best_split(train, idx, bit, fn)
        if found is None:
            break
        rng, match = found
        nodes.append(Node(range=rng, exit_class=bit, support=int(match.sum())))
        idx = idx[~match]
    leaf_class = (not nodes[-1].exit_class) if nodes else (not policy.bits[0])
    tree = FFTree(policy=policy, nodes=tuple(nodes), leaf_class=leaf_class,
                  leaf_support=int(len(idx)), score_kind=fn.kind)
    return replace(tree, train_score=tree_score(tree, train, fn))


def tree_score(tree: FFTree, data: Dataset, fn: ScoreFunction) -> float:
    """Whole-tree score on a dataset (training or test)."""
    if fn.kind == "popt":
        if data.effort is None:
            raise UnsupportedScoreError(
                f"{data.name}: popt needs an effort column")
        order = rank_for_popt(tree, data)
        return popt(data.labels[order].astype(float), data.effort[order]).value
    preds = predict_dataset(tree, data)
    return dis2heaven(Confusion.from_predictions(preds, data.labels))


def grow(train: Dataset, depth: int = 4,
         fn: ScoreFunction = DIS2HEAVEN) -> tuple[FFTree, list[FFTree]]:
    """Train all 2^depth exit-policy trees and select the best on train.

    Ties between equally scored trees go to the smaller policy string.
    Returns (best tree, all candidates in policy order).
    """
    _check_trainable(train, fn)
    trees = [build_tree(train, policy, fn) for policy in all_policies(depth)]
    best = min(trees, key=lambda t: (fn.sort_key(t.train_score),
                                     t.policy_string))
    return best, trees


def _check_trainable(train: Dataset, fn: ScoreFunction):
    if not train.binary:
        raise TrainingError(f"{train.name}: labels must be binarized first")
    if len(train) < 2:
        raise TrainingError(f"{train.name}: need at least 2 training rows, "
                            f"got {len(train)}")
    if len(train.attributes) < 1:
        raise TrainingError(f"{train.name}: need at least one attribute")
    if fn.kind == "popt" and train.effort is None:
        raise UnsupportedScoreError(
            f"{train.name}: popt training needs an effort column")


def route(tree: FFTree, row) -> tuple[int, bool, int]:
    """(exit index, class, training support) of the node a row exits at.

    ``row`` maps attribute names to values; missing attributes and NaN fall
    through.  The final leaf has exit index len(nodes).
    """
    get = row.get if hasattr(row, "get") else lambda k, d=None: row[k]
    for i, node in enumerate(tree.nodes):
        value = get(node.range.attribute, None)
        if value is not None and node.range.matches(value):
            return i, node.exit_class, node.support
    return len(tree.nodes), tree.leaf_class, tree.leaf_support


def predict(tree: FFTree, row) -> bool:
    """Class of the first matching node, else the final leaf class."""
    return route(tree, row)[1]


def route_dataset(tree: FFTree, data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized routing: (exit index, predicted class) per row."""
    n = len(data)
    exit_idx = np.full(n, len(tree.nodes), dtype=int)
    classes = np.full(n, tree.leaf_class, dtype=bool)
    undecided = np.ones(n, dtype=bool)
    for i, node in enumerate(tree.nodes):
        hit = undecided & node.range.matches_array(data.column(node.range.attribute))
        exit_idx[hit] = i
        classes[hit] = node.exit_class
        undecided &= ~hit
    return exit_idx, classes


def predict_dataset(tree: FFTree, data: Dataset) -> np.ndarray:
    return route_dataset(tree, data)[1]


def rank_for_popt(tree: FFTree, data: Dataset) -> np.ndarray:
    """Most-suspicious-first row order implied by the tree's exits.

    Rows leaving through true exits come first (earlier exits first), then
    rows leaving through false exits (later exits first — the longer a row
    survived, the closer it came to a true exit).  Ties break on ascending
    effort, then row index.
    """
    if data.effort is None:
        raise UnsupportedScoreError(f"{data.name}: ranking needs effort")
    exit_idx, classes = route_dataset(tree, data)
    bucket = np.where(classes, 0, 1)
    within = np.where(classes, exit_idx, -exit_idx)
    idx = np.arange(len(data))
    return np.lexsort((idx, data.effort, within, bucket))


# --- multi-class wrapper -------------------------------------------------

@dataclass(frozen=True)
class MultiClassFFT:
    """One-vs-rest tree per class; class order is the tie-break order."""

    classes: tuple
    trees: tuple[FFTree, ...]


def grow_multi(train: Dataset, depth: int = 4,
               fn: ScoreFunction = DIS2HEAVEN, classes=None) -> MultiClassFFT:
    """Train one tree per class value over the same rows."""
    if train.binary:
        raise TrainingError("grow_multi expects raw (multi-valued) labels")
    if classes is None:
        classes = [float(c) for c in np.unique(train.labels)]
    trees = []
    for cls in classes:
        view = replace(train, labels=(train.labels == cls))
        trees.append(grow(view, depth, fn)[0])
    return MultiClassFFT(classes=tuple(classes), trees=tuple(trees))


def predict_multi(model: MultiClassFFT, row):
    """Class whose positively firing tree exited with the most training
    support; if no tree fires positive, the largest triggering support
    overall.  Ties keep the earliest class in ``model.classes``."""
    if not model.trees:
        raise TrainingError("empty multi-class model")
    routed = [route(tree, row) for tree in model.trees]
    positive = [(cls, support) for cls, (_, fired, support)
                in zip(model.classes, routed) if fired]
    pool = positive or [(cls, support) for cls, (_, _, support)
                        in zip(model.classes, routed)]
    best_cls, best_support = pool[0]
    for cls, support in pool[1:]:
        if support > best_support:
            best_cls, best_support = cls, support
    return best_cls


# --- text and JSON forms --------------------------------------------------

def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _cls(flag: bool) -> str:
    return "true" if flag else "false"


def render(tree: FFTree) -> str:
    """Decision-list text: one ``if/else if <range> then <class>`` line per
    node and a final ``else <class>`` line."""
    lines = []
    for i, node in enumerate(tree.nodes):
        head = "if" if i == 0 else "else if"
        lines.append(f"{head} {node.range.display} then {_cls(node.exit_class)}")
    lines.append(f"else {_cls(tree.leaf_class)}")
    return "\n".join(lines)


_NODE_RE = re.compile(
    r"^(if|else if)\s+(\S+)\s*(<=|>)\s*([-+eE0-9.]+)\s+then\s+(true|false)$")
_LEAF_RE = re.compile(r"^else\s+(true|false)$")


def parse(text: str) -> FFTree:
    """Read a rendered tree back (supports are unknown, stored as 0).

    Raises DatasetError naming the offending line on malformed input.
    """
    nodes = []
    leaf_class = None
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    for no, line in enumerate(lines, start=1):
        if leaf_class is not None:
            raise DatasetError(f"model text line {no}: content after final else")
        m = _NODE_RE.match(line)
        if m:
            head, attr, op, cut, cls = m.groups()
            if (head == "if") != (no == 1):
                raise DatasetError(
                    f"model text line {no}: expected "
                    f"{'if' if no == 1 else 'else if'}")
            try:
                cut_value = float(cut)
            except ValueError:
                raise DatasetError(f"model text line {no}: bad number {cut!r}")
            nodes.append(Node(range=Range(attr, op, cut_value),
                              exit_class=cls == "true", support=0))
            continue
        m = _LEAF_RE.match(line)
        if m:
            leaf_class = m.group(1) == "true"
            continue
        raise DatasetError(f"model text line {no}: cannot parse {line!r}")
    if not nodes:
        raise DatasetError("model text has no decision lines")
    if leaf_class is None:
        raise DatasetError("model text has no final else line")
    if leaf_class == nodes[-1].exit_class:
        raise DatasetError("final else must oppose the last exit")
    return FFTree(policy=ExitPolicy(tuple(n.exit_class for n in nodes)),
                  nodes=tuple(nodes), leaf_class=leaf_class, leaf_support=0)


def tree_to_dict(tree: FFTree) -> dict:
    return {
        "depth": tree.depth,
        "policy": tree.policy_string,
        "truncated": tree.truncated,
        "score": tree.score_kind,
        "train_score": tree.train_score,
        "nodes": [{"attribute": n.range.attribute, "op": n.range.op,
                   "cut": n.range.cut, "class": n.exit_class,
                   "support": n.support} for n in tree.nodes],
        "final_leaf": {"class": tree.leaf_class, "support": tree.leaf_support},
    }


def tree_from_dict(payload: dict) -> FFTree:
    try:
        depth = int(payload["depth"])
        digits = payload["policy"]
        nodes = tuple(
            Node(range=Range(d["attribute"], d["op"], float(d["cut"])),
                 exit_class=bool(d["class"]), support=int(d["support"]))
            for d in payload["nodes"])
        leaf = payload["final_leaf"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"bad model payload: {exc}") from exc
    if len(digits) != depth + 1:
        raise DatasetError("policy string does not match depth")
    policy = ExitPolicy(tuple(ch == "1" for ch in digits[:depth]))
    return FFTree(policy=policy, nodes=nodes,
                  leaf_class=bool(leaf["class"]),
                  leaf_support=int(leaf["support"]),
                  train_score=payload.get("train_score"),
                  score_kind=payload.get("score"))
