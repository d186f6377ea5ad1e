#!/usr/bin/env python3
"""Amplitude-noise budget of the phase-known cloner.

Prints the clone amplitude noise in dB above shot noise for the ideal
machine and for the lossy feedforward model, together with the fidelities,
the classical baseline and the optimal bound, and optionally cross-checks
the lossy figure with a Monte Carlo run.

Example:
    python scripts/figure4_noise.py --trajectories 50000
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cvclone.montecarlo import reproduce_figure4  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.95)
    ap.add_argument("--visibility", type=float, default=0.99)
    ap.add_argument("--lambda-x", type=float, default=1.0, dest="lambda_x")
    ap.add_argument("--trajectories", type=int, default=0)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    report = reproduce_figure4(
        eta_ff=args.eta,
        visibility=args.visibility,
        lambda_x=args.lambda_x,
        n_traj=args.trajectories,
        seed=args.seed,
    )
    print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
