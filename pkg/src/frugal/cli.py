"""Command-line front end.

Subcommands:
  fit         train a tree on one or more CSVs and print or save it
  eval        train on older CSVs, score on the newest (or score a saved tree)
  rig         run a full experiment from a JSON config and write report files
  changefreq  attribute change frequencies across version sequences

Exit codes: 0 ok, 2 input/parse problem, 3 training precondition,
4 unsupported score function, 5 bad configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from pathlib import Path

from . import operational, rig
from .dataset import DEFAULT_EXCLUDE, Dataset, LabelRule, binarize, load_csv, merge
from .errors import (ConfigError, DatasetError, TrainingError,
                     UnsupportedScoreError)
from .fft import (grow, predict_dataset, rank_for_popt, render,
                  tree_from_dict, tree_to_dict)
from .metrics import (Confusion, dis2heaven, far, popt, recall, recall_at_20,
                      score_function)

_RULE_RE = re.compile(r"^\s*([<>])\s*(\d+(?:\.\d+)?)\s*$")


def parse_rule(text: str) -> LabelRule:
    m = _RULE_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse rule {text!r}; expected forms "
                          "like '>0', '<30', or '>365'")
    op, value = m.group(1), float(m.group(2))
    if op == ">" and value == 0:
        return LabelRule.bug_counts()
    if value <= 0:
        raise ConfigError(f"rule {text!r} needs a positive threshold")
    return LabelRule.days("less-than" if op == "<" else "greater-than", value)


def _load_versions(paths, label, effort, exclude, rule) -> list[Dataset]:
    out = []
    for path in paths:
        ds = load_csv(path, label_column=label, effort_column=effort,
                      exclude=exclude, name=Path(path).stem)
        out.append(binarize(ds, rule))
    return out


def _split_exclude(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _write_or_print(text: str, out: str | None):
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


def _cmd_fit(args) -> int:
    rule = parse_rule(args.positive_if)
    versions = _load_versions(args.csv, args.label, args.effort,
                              _split_exclude(args.exclude), rule)
    train = versions[0] if len(versions) == 1 else merge(versions)
    fn = score_function(args.score)
    best, _ = grow(train, depth=args.depth, fn=fn)
    model_json = json.dumps(tree_to_dict(best), indent=2, sort_keys=True)
    if args.out is not None:
        Path(args.out).write_text(model_json + "\n")
    if args.format == "json":
        print(model_json)
        return 0
    print(f"# trained on {train.name} ({len(train)} rows), "
          f"policy {best.policy_string}, "
          f"train {fn.kind} {best.train_score:.4f}")
    print(render(best))
    return 0


def _cmd_eval(args) -> int:
    rule = parse_rule(args.positive_if)
    exclude = _split_exclude(args.exclude)
    fn = score_function(args.score)
    versions = _load_versions(args.csv, args.label, args.effort, exclude, rule)

    if args.model is not None:
        if len(versions) != 1:
            raise ConfigError("--model evaluates exactly one test CSV")
        with open(args.model) as fh:
            tree = tree_from_dict(json.load(fh))
        train, test = None, versions[0]
        missing = [a for a in tree.attributes if a not in test.attributes]
        if missing:
            raise DatasetError(f"{test.name}: model needs attributes "
                               f"{missing} that the test data lacks")
    else:
        if len(versions) < 2:
            raise ConfigError("eval needs at least two CSVs "
                              "(older train versions, then the test version)")
        train_versions, test = versions[:-1], versions[-1]
        if args.top_changed is not None:
            if len(train_versions) < 2:
                raise ConfigError("--top-changed needs at least two "
                                  "training CSVs")
            attrs = operational.top_changed(train_versions[-2],
                                            train_versions[-1],
                                            fraction=args.top_changed)
            train_versions = [operational.project(v, attrs)
                              for v in train_versions]
            test = operational.project(test, attrs)
        train = (train_versions[0] if len(train_versions) == 1
                 else merge(train_versions))
        tree = grow(train, depth=args.depth, fn=fn)[0]

    predicted = predict_dataset(tree, test)
    c = Confusion.from_predictions(predicted, test.labels)
    report = {
        "selection_score": fn.kind,
        "policy": tree.policy_string,
        "nodes": len(tree.nodes),
        "test": {"name": test.name, "rows": len(test)},
        "confusion": {"tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn},
        "recall": recall(c),
        "far": far(c),
        "dis2heaven": dis2heaven(c),
    }
    if train is not None:
        report["train"] = {"name": train.name, "rows": len(train)}
    if test.effort is not None:
        order = rank_for_popt(tree, test)
        defects = test.labels[order].astype(float)
        efforts = test.effort[order]
        p = popt(defects, efforts)
        report["popt"] = p.value
        report["popt_degenerate"] = p.degenerate
        report["recall_at_20"] = recall_at_20(defects, efforts)
    if fn.kind == "popt" and test.effort is None:
        raise UnsupportedScoreError(
            f"{test.name}: popt scoring needs an effort column")
    if args.format == "json":
        _write_or_print(json.dumps(report, indent=2, sort_keys=True), args.out)
        return 0
    lines = [f"policy: {tree.policy_string}  nodes: {len(tree.nodes)}"]
    if train is not None:
        lines.append(f"train: {train.name} ({len(train)} rows)")
    lines.append(f"test: {test.name} ({len(test)} rows)")
    lines.append(f"confusion: tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn}")
    lines.append(f"recall: {report['recall']:.4f}")
    lines.append(f"far: {report['far']:.4f}")
    lines.append(f"dis2heaven: {report['dis2heaven']:.4f}")
    if "popt" in report:
        flag = "  (degenerate)" if report["popt_degenerate"] else ""
        lines.append(f"popt: {report['popt']:.4f}{flag}")
        lines.append(f"recall_at_20: {report['recall_at_20']:.4f}")
    lines.append(render(tree))
    _write_or_print("\n".join(lines), args.out)
    return 0


_CONFIG_KEYS = {"projects", "learners", "scores", "attribute_sets", "depth",
                "mode", "bins", "repeats", "seed", "top_fraction", "label",
                "effort", "positive_if", "exclude"}


def load_rig_config(path) -> tuple[rig.RigConfig, dict]:
    """Read a rig config file; relative CSV paths resolve against it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    if "projects" not in raw or not raw["projects"]:
        raise ConfigError(f"{path}: config needs a non-empty 'projects' map")

    kwargs = {}
    for key in ("learners", "scores", "attribute_sets"):
        if key in raw:
            kwargs[key] = tuple(raw[key])
    for key in ("depth", "bins", "repeats", "seed"):
        if key in raw:
            kwargs[key] = int(raw[key])
    if "mode" in raw:
        kwargs["mode"] = raw["mode"]
    if "top_fraction" in raw:
        kwargs["top_fraction"] = float(raw["top_fraction"])
    config = rig.RigConfig(**kwargs)

    rule = parse_rule(raw.get("positive_if", ">0"))
    exclude = tuple(raw.get("exclude", DEFAULT_EXCLUDE))
    label = raw.get("label", "bug")
    effort = raw.get("effort")
    projects = {}
    for pname, paths in raw["projects"].items():
        if isinstance(paths, str):
            paths = [paths]
        resolved = [path.parent / p if not Path(p).is_absolute() else Path(p)
                    for p in paths]
        projects[pname] = _load_versions(resolved, label, effort, exclude,
                                         rule)
    return config, projects


def _cmd_rig(args) -> int:
    config, projects = load_rig_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    result = rig.run(projects, config)
    paths = rig.write_reports(result, args.out_dir)
    print(f"{len(result.results)} results over {len(projects)} projects")
    for key in sorted(paths):
        print(f"  {key}: {paths[key]}")
    return 0


def _cmd_changefreq(args) -> int:
    exclude = _split_exclude(args.exclude)
    sequences = []
    if args.csv:
        sequences.append(args.csv)
    for seq in args.sequence:
        sequences.append([p.strip() for p in seq.split(",") if p.strip()])
    if not sequences:
        raise ConfigError("changefreq needs CSVs (positional or --sequence)")
    loaded = []
    for paths in sequences:
        loaded.append([load_csv(p, label_column=args.label,
                                effort_column=None, exclude=exclude,
                                name=Path(p).stem)
                       for p in paths])
    stats = operational.change_frequency(loaded, threshold=args.threshold)
    if args.format == "json":
        payload = [{"attribute": c.attribute, "changed": c.changed,
                    "total": c.total, "percent": c.percent}
                   for c in stats.changes]
        _write_or_print(json.dumps(payload, indent=2, sort_keys=True),
                        args.out)
        return 0
    if args.format == "csv":
        lines = ["attribute,changed,total,percent"]
        lines += [f"{c.attribute},{c.changed},{c.total},{c.percent:.1f}"
                  for c in stats.changes]
        _write_or_print("\n".join(lines), args.out)
        return 0
    width = max(len("attribute"),
                max((len(c.attribute) for c in stats.changes), default=0))
    lines = [f"{'attribute':<{width}}  changed  total  percent"]
    for c in stats.changes:
        lines.append(f"{c.attribute:<{width}}  {c.changed:>7}  "
                     f"{c.total:>5}  {c.percent:>6.1f}")
    _write_or_print("\n".join(lines), args.out)
    return 0


def _add_data_flags(sub, label_default="bug"):
    sub.add_argument("--label", default=label_default,
                     help="label column name (default: %(default)s)")
    sub.add_argument("--effort", default=None,
                     help="effort column name (needed for popt)")
    sub.add_argument("--positive-if", default=">0", dest="positive_if",
                     help="binarization rule: '>0' bug counts, '<30'/'>365' "
                          "day thresholds (default: %(default)s)")
    sub.add_argument("--exclude", default=",".join(DEFAULT_EXCLUDE),
                     help="comma-separated identifier columns "
                          "(default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frugal",
        description="Fast-and-frugal tree classifiers with effort-aware "
                    "evaluation")
    subs = parser.add_subparsers(dest="command", required=True)

    fit = subs.add_parser("fit", help="train a tree and print or save it")
    fit.add_argument("csv", nargs="+", help="training CSVs (merged)")
    _add_data_flags(fit)
    fit.add_argument("--depth", type=int, default=4)
    fit.add_argument("--score", default="d2h",
                     help="score to optimize: d2h or popt")
    fit.add_argument("--format", choices=("text", "json"), default="text")
    fit.add_argument("--out", default=None, help="write here instead of stdout")
    fit.set_defaults(func=_cmd_fit)

    ev = subs.add_parser("eval",
                         help="train on older CSVs, score on the newest")
    ev.add_argument("csv", nargs="+",
                    help="version-ordered CSVs; the last one is the test set")
    _add_data_flags(ev)
    ev.add_argument("--model", default=None,
                    help="saved tree JSON; skips training")
    ev.add_argument("--depth", type=int, default=4)
    ev.add_argument("--score", default="d2h")
    ev.add_argument("--top-changed", type=float, default=None,
                    dest="top_changed", metavar="FRACTION",
                    help="keep only this fraction of most-changed attributes")
    ev.add_argument("--format", choices=("text", "json"), default="text")
    ev.add_argument("--out", default=None)
    ev.set_defaults(func=_cmd_eval)

    rg = subs.add_parser("rig", help="run experiments from a JSON config")
    rg.add_argument("--config", required=True)
    rg.add_argument("--out-dir", default="reports", dest="out_dir")
    rg.add_argument("--seed", type=int, default=None,
                    help="override the config seed")
    rg.set_defaults(func=_cmd_rig)

    cf = subs.add_parser("changefreq",
                         help="how often attribute distributions shift "
                              "between adjacent versions")
    cf.add_argument("csv", nargs="*",
                    help="one version-ordered sequence of CSVs")
    cf.add_argument("--sequence", action="append", default=[],
                    metavar="A.csv,B.csv",
                    help="extra comma-separated sequence (repeatable)")
    cf.add_argument("--label", default="bug",
                    help="label column name (default: %(default)s)")
    cf.add_argument("--exclude", default=",".join(DEFAULT_EXCLUDE),
                    help="comma-separated identifier columns "
                         "(default: %(default)s)")
    cf.add_argument("--threshold", type=float, default=0.06,
                    help="effect-size cutoff on |a12 - 0.5| "
                         "(default: %(default)s)")
    cf.add_argument("--format", choices=("text", "json", "csv"),
                    default="text")
    cf.add_argument("--out", default=None)
    cf.set_defaults(func=_cmd_changefreq)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DatasetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TrainingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except UnsupportedScoreError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 5
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
