"""Test the sdepth bounds on families that break monotonicity of the exponents.

Violations are written as standalone ideal files; re-run one with
`borelsd sdepth -i <witness>.json`.

    python scripts/question_search.py --trials 100 --seed 0 --witness-dir results/witnesses
"""
import argparse
import sys
from pathlib import Path

from borelsd.family import question_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--max-m", type=int, default=2)
    ap.add_argument("--max-exp", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=float, default=30.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--witness-dir", default="results/witnesses")
    ap.add_argument("--out", default="results/question")
    ap.add_argument("--strict", action="store_true",
                    help="only families still non-monotone after dropping redundant components")
    args = ap.parse_args()

    report = question_search(args.max_n, args.max_m, args.max_exp, args.trials, args.seed,
                             args.budget, args.witness_dir, workers=args.workers, strict=args.strict)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".json").write_text(report.to_json())
    out.with_suffix(".txt").write_text(report.to_text())
    print(f"tally: {report.tally()}")
    print(f"still non-monotone after dropping redundant components: {report.effectively_non_monotone()}")
    for path in report.witnesses:
        print(f"witness: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
