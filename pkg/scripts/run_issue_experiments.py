#!/usr/bin/env python3
"""Issue-lifetime experiments: repeated cross-validation over a grid of
days-to-close thresholds.

Each threshold turns the raw days-to-close label into a binary question
("closes within a week?", "lingers past half a year?"); every learner is
then scored with dis2heaven over 5x10 cross-validation.  Issue tables
carry no effort column, so the effort-aware score does not apply here.

Thresholds whose minority class is thinner than one row per bin are
skipped — a 10-bin split cannot keep both classes in every training fold.

With --csv the table comes from disk (raw days in --label); otherwise a
seeded synthetic table stands in.  --multiclass adds a one-vs-rest demo
that buckets the same issues into four lifetime bands.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from frugal import rig, synth
from frugal.cli import parse_rule
from frugal.dataset import binarize, load_csv
from frugal.fft import grow_multi, predict_multi, render
from frugal.metrics import score_function

THRESHOLDS = (">365", "<180", "<90", "<30", "<14", "<7", "<1")
LIFETIME_BANDS = (7.0, 30.0, 90.0)     # multi-class edges, in days


def _slug(rule_text: str) -> str:
    return rule_text.replace(">", "gt").replace("<", "lt").replace(".", "p")


def run_threshold(raw, rule_text, args):
    """One 5x10 CV run; returns (median per learner, verdict per learner)
    or None when a class is too thin to stratify."""
    data = binarize(raw, parse_rule(rule_text))
    positives = int(data.labels.sum())
    minority = min(positives, len(data) - positives)
    if minority < args.bins:
        print(f"{rule_text:>5}: skipped ({positives} positive rows of "
              f"{len(data)}; need >= {args.bins} per class)")
        return None
    learners = tuple(part.strip() for part in args.learners.split(",")
                     if part.strip())
    config = rig.RigConfig(learners=learners, scores=("d2h",),
                           depth=args.depth, mode="cv", bins=args.bins,
                           repeats=args.repeats, seed=args.seed)
    result = rig.run({"issues": [data]}, config)
    rig.write_reports(result, f"{args.out_dir}/{_slug(rule_text)}")

    medians = {}
    for learner in learners:
        values = [r.value for r in result.results if r.learner == learner]
        medians[learner] = float(np.median(values))
    verdicts = {row.learner: row.verdict
                for row in rig.compare(result.results)}
    cells = "  ".join(f"{ln} {medians[ln]:.3f} ({verdicts[ln]})"
                      for ln in learners)
    print(f"{rule_text:>5}: {positives:>3} positive  dis2heaven medians: "
          f"{cells}")
    return medians


def multiclass_demo(raw, args):
    """Bucket lifetimes into bands and train one tree per band."""
    classes = np.digitize(raw.labels, LIFETIME_BANDS).astype(float)
    banded = replace(raw, labels=classes)
    order = np.random.default_rng(args.seed).permutation(len(banded))
    cut = (2 * len(banded)) // 3
    train = banded.subset(order[:cut])
    test = banded.subset(order[cut:])

    model = grow_multi(train, depth=args.depth, fn=score_function("d2h"))
    hits = sum(1 for i in range(len(test))
               if predict_multi(model, test.row(i)) == test.labels[i])
    print(f"\nlifetime bands (edges {LIFETIME_BANDS}): "
          f"{hits}/{len(test)} test rows in the right band")
    names = ["<= 7d", "8-30d", "31-90d", "> 90d"]
    for cls, tree in zip(model.classes, model.trees):
        share = int((train.labels == cls).sum())
        print(f"\nband {names[int(cls)]} ({share} training rows), "
              f"policy {tree.policy_string}:")
        for line in render(tree).splitlines():
            print(f"  {line}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv", default=None,
                    help="issue table with a days-to-close column")
    ap.add_argument("--label", default="days",
                    help="days-to-close column in --csv")
    ap.add_argument("--out-dir", default="reports/issues")
    ap.add_argument("--learners", default="fft,nb,sl")
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--bins", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--rows", type=int, default=400,
                    help="synthetic table size when no --csv is given")
    ap.add_argument("--multiclass", action="store_true",
                    help="also train the one-vs-rest lifetime-band demo")
    args = ap.parse_args(argv)

    if args.csv:
        raw = load_csv(args.csv, label_column=args.label)
        print(f"loaded {raw.name}: {len(raw)} issues")
    else:
        raw = synth.make_issue_dataset(seed=args.seed, rows=args.rows)
        print(f"synthetic issue table: {len(raw)} rows, seed {args.seed}")

    for rule_text in THRESHOLDS:
        run_threshold(raw, rule_text, args)
    print(f"reports under {args.out_dir}/")

    if args.multiclass:
        multiclass_demo(raw, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
