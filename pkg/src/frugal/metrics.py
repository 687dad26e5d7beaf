"""Score functions and rank statistics.

Covers the two pluggable objectives (distance-to-heaven, effort-aware Popt),
the confusion-matrix metrics they build on, and the nonparametric statistics
used elsewhere in the package (Vargha-Delaney A12, Mann-Whitney U).
All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import UnsupportedScoreError

# |A12 - 0.5| at or beyond this counts as more than a small effect.
SMALL_EFFECT = 0.06


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_predictions(cls, predicted, actual) -> "Confusion":
        predicted = np.asarray(predicted, dtype=bool)
        actual = np.asarray(actual, dtype=bool)
        if predicted.shape != actual.shape:
            raise ValueError("predicted/actual length mismatch")
        return cls(tp=int(np.sum(predicted & actual)),
                   fp=int(np.sum(predicted & ~actual)),
                   tn=int(np.sum(~predicted & ~actual)),
                   fn=int(np.sum(~predicted & actual)))


def recall(c: Confusion, undefined: float = 1.0) -> float:
    """True-positive rate; ``undefined`` is returned when there are no
    actual positives (default 1.0: nothing to find, nothing missed)."""
    if c.tp + c.fn == 0:
        return undefined
    return c.tp / (c.tp + c.fn)


def far(c: Confusion, undefined: float = 0.0) -> float:
    """False-alarm rate; ``undefined`` is returned when there are no
    actual negatives."""
    if c.fp + c.tn == 0:
        return undefined
    return c.fp / (c.fp + c.tn)


def dis2heaven(c: Confusion) -> float:
    """Normalized Euclidean distance from (recall, FAR) to the ideal (1, 0).

    Zero for a perfect classifier, one at the worst corner; lower is better.
    """
    r = recall(c)
    f = far(c)
    return math.sqrt(((1.0 - r) ** 2 + f ** 2) / 2.0)


@dataclass(frozen=True)
class ScoreFunction:
    """Objective identity plus orientation, so one comparator serves range
    ranking, tree selection and test scoring."""

    kind: str
    higher_is_better: bool

    def sort_key(self, value: float) -> float:
        """Smaller key = better, whatever the orientation."""
        return -value if self.higher_is_better else value

    def better(self, a: float, b: float) -> bool:
        return self.sort_key(a) < self.sort_key(b)


DIS2HEAVEN = ScoreFunction(kind="dis2heaven", higher_is_better=False)
POPT = ScoreFunction(kind="popt", higher_is_better=True)

SCORE_FUNCTIONS = {
    "d2h": DIS2HEAVEN,
    "dis2heaven": DIS2HEAVEN,
    "popt": POPT,
}


def score_function(kind: str) -> ScoreFunction:
    try:
        return SCORE_FUNCTIONS[kind]
    except KeyError:
        raise UnsupportedScoreError(f"unknown score function {kind!r}")


class EffortCurvePoint(NamedTuple):
    effort_fraction: float
    defects_fraction: float


class PoptResult(NamedTuple):
    value: float
    degenerate: bool = False


def effort_curve(defects, efforts) -> list[EffortCurvePoint]:
    """Cumulative lift curve for rows visited in the given order.

    x = fraction of total effort spent, y = fraction of total defects found.
    Starts at (0, 0) and ends at (1, 1).
    """
    defects = np.asarray(defects, dtype=float)
    efforts = np.asarray(efforts, dtype=float)
    total_d = defects.sum()
    total_e = efforts.sum()
    if total_d <= 0 or total_e <= 0:
        raise UnsupportedScoreError("effort curve needs defects and effort")
    xs = np.concatenate([[0.0], np.cumsum(efforts) / total_e])
    ys = np.concatenate([[0.0], np.cumsum(defects) / total_d])
    return [EffortCurvePoint(float(x), float(y)) for x, y in zip(xs, ys)]


def _curve_area(defects, efforts) -> float:
    # trapezoid rule over the cumulative lift chart; strictly sequential
    # accumulation so results are reproducible to the last bit
    cum_e = np.cumsum(efforts)
    cum_d = np.cumsum(defects)
    xs = np.concatenate([[0.0], cum_e / cum_e[-1]])
    ys = np.concatenate([[0.0], cum_d / cum_d[-1]])
    terms = (xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1])
    return float(np.cumsum(terms)[-1] / 2.0)


def _density_order(defects, efforts, descending: bool) -> np.ndarray:
    density = defects / efforts
    idx = np.arange(len(defects))
    if descending:
        return np.lexsort((idx, efforts, -density))
    return np.lexsort((idx, efforts, density))


def popt(defects, efforts) -> PoptResult:
    """Effort-aware Popt of a ranking.

    ``defects`` and ``efforts`` are row-aligned arrays already sorted into
    the model's most-suspicious-first order.  The score normalizes the area
    under that ranking's lift curve between the optimal curve (rows by true
    defect density, descending) and the worst curve (ascending), then clamps
    to [0, 1].  Rankings of defect-free (or constant-density) data have no
    optimal/worst gap; those return 0.5 flagged as degenerate.
    """
    defects = np.asarray(defects, dtype=float)
    efforts = np.asarray(efforts, dtype=float)
    if len(defects) != len(efforts):
        raise ValueError("defects/efforts length mismatch")
    if len(defects) == 0:
        return PoptResult(0.5, degenerate=True)
    if not np.all(efforts > 0):
        raise UnsupportedScoreError("popt needs effort > 0 for every row")
    if defects.sum() <= 0:
        return PoptResult(0.5, degenerate=True)
    best = _density_order(defects, efforts, descending=True)
    worst = _density_order(defects, efforts, descending=False)
    s_opt = _curve_area(defects[best], efforts[best])
    s_worst = _curve_area(defects[worst], efforts[worst])
    if s_opt - s_worst <= 1e-12:
        return PoptResult(0.5, degenerate=True)
    s_m = _curve_area(defects, efforts)
    value = 1.0 - (s_opt - s_m) / (s_opt - s_worst)
    return PoptResult(min(1.0, max(0.0, value)))


def recall_at_20(defects, efforts, budget: float = 0.2) -> float:
    """Fraction of all defects inside the ranking's first ``budget`` of
    cumulative effort.  Zero when the data holds no defects."""
    defects = np.asarray(defects, dtype=float)
    efforts = np.asarray(efforts, dtype=float)
    total_d = defects.sum()
    if total_d <= 0 or len(defects) == 0:
        return 0.0
    frontier = budget * efforts.sum() + 1e-12
    within = np.cumsum(efforts) <= frontier
    return float(defects[within].sum() / total_d)


def effort_order_from_predictions(predicted, efforts) -> np.ndarray:
    """Row order for effort curves given binary predictions: predicted
    positives first, smaller modules first inside each bucket."""
    predicted = np.asarray(predicted, dtype=bool)
    efforts = np.asarray(efforts, dtype=float)
    idx = np.arange(len(predicted))
    return np.lexsort((idx, efforts, ~predicted))


def effort_order_from_scores(scores, efforts) -> np.ndarray:
    """Row order for effort curves given real-valued suspicion scores:
    higher score first, smaller modules first among ties."""
    scores = np.asarray(scores, dtype=float)
    efforts = np.asarray(efforts, dtype=float)
    idx = np.arange(len(scores))
    return np.lexsort((idx, efforts, -scores))


def _fractional_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; ties get the mean of the ranks they span."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    sorted_vals = values[order]
    i = 0
    pos = 1
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = pos + (j - i) / 2.0
        pos += j - i + 1
        i = j + 1
    return ranks


def a12(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Vargha-Delaney effect size: probability that a random draw from
    ``xs`` exceeds one from ``ys``, ties counting one half."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("a12 needs two nonempty samples")
    ranks = _fractional_ranks(np.concatenate([xs, ys]))
    r1 = ranks[:len(xs)].sum()
    n1, n2 = len(xs), len(ys)
    u1 = r1 - n1 * (n1 + 1) / 2.0
    return u1 / (n1 * n2)


def differs(xs, ys, threshold: float = SMALL_EFFECT) -> bool:
    """True when two samples differ by more than a small effect under A12."""
    return abs(a12(xs, ys) - 0.5) >= threshold


class MannWhitneyResult(NamedTuple):
    u: float
    p_value: float
    different: bool


def mann_whitney(xs, ys, alpha: float = 0.05) -> MannWhitneyResult:
    """Two-sided Mann-Whitney rank-sum test, normal approximation with tie
    correction.  ``u`` is the U statistic of the first sample."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n1, n2 = len(xs), len(ys)
    if n1 < 3 or n2 < 3:
        raise ValueError("mann_whitney needs at least 3 values per sample")
    pooled = np.concatenate([xs, ys])
    ranks = _fractional_ranks(pooled)
    u1 = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts ** 3 - counts))
    correction = 1.0 - tie_term / (n ** 3 - n)
    if correction <= 0:
        return MannWhitneyResult(u=float(u1), p_value=1.0, different=False)
    sd = math.sqrt(correction * n1 * n2 * (n + 1) / 12.0)
    z = (u1 - n1 * n2 / 2.0) / sd
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    return MannWhitneyResult(u=float(u1), p_value=p, different=p < alpha)
