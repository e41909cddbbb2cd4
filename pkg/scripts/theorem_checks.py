"""Run every numerical property check and write the reports as JSON.

    python scripts/theorem_checks.py --out reports/
"""

import argparse
import json
from pathlib import Path

from adagae import analysis
from adagae.cli import verify_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trials = {1: 100, 2: 5, 3: 50, 4: 50}
    for theorem, n in trials.items():
        rep = verify_report(theorem, n, args.seed)
        (out / f"theorem{theorem}.json").write_text(json.dumps(rep, indent=2, default=float) + "\n")
        print(f"theorem {theorem}: instances={rep['instances']} violations={rep['violations']}")

    sweep = analysis.degeneration_sweep(epsilons=(1e-2, 1e-3, 1e-4, 1e-5), seeds=range(5))
    for eps, row in sweep.items():
        print(f"eps={eps:g}: bound={analysis.degeneration_bound(5, eps):.4f} "
              f"median max spread={row['median_max_spread']:.4f} violations={row['violations']}")


if __name__ == "__main__":
    main()
