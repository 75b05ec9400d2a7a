#!/usr/bin/env python3
"""Reproduce the long decay experiment and fit its exponents.

Runs the 512^2, t = 20 configuration (Gaussian density bump, eps = 1e-3
perturbation), writes the artifacts, and prints the fitted decay exponents
and the working-norm growth ratio. Takes a few minutes.

Usage: python3 scripts/run_decay_experiment.py [out_dir] [--n 256]
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from swlp.harness import RunConfig, fit_series, run  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="out/decay")
    parser.add_argument("--n", type=int, default=512)
    args = parser.parse_args()

    warnings.filterwarnings("ignore", message="log-density truncation")
    config = RunConfig(n=args.n)
    result = run(config, out_dir=args.out)

    summary = json.loads((Path(args.out) / "summary.json").read_text())
    fits = fit_series(Path(args.out) / "series.csv")
    (Path(args.out) / "fit.json").write_text(json.dumps(fits, indent=2))

    print(f"working-norm growth ratio: {summary['ft_ratio']:.3f} (bound: 10)")
    for f in fits["fits"]:
        print(
            f"{f['column']}: exponent {f['exponent']:.4f} "
            f"(expected {f['expected']} +/- {f['tolerance']})"
        )
    print(f"max mass drift: {max(r['mass_drift'] for r in result.rows):.3e}")
    return 0 if fits["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
