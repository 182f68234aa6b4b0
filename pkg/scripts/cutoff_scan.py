"""Discrete estimate of W_|1>(0) versus the equation cutoff N, with error bars."""
import argparse
import math
from pathlib import Path

import numpy as np

from fresnel_wigner import FockDensityMatrix, NoiseModel, cutoff_scan, emit_outputs, simulate_signal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=10, help="number of interaction times")
    ap.add_argument("--tau-max", type=float, default=5.0)
    ap.add_argument("--shots", type=int, default=400)
    ap.add_argument("--decay", type=float, default=None, help="geometric equation weight r^n")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/cutoff_scan")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    taus = np.linspace(args.tau_max / args.m, args.tau_max, args.m)
    rho = FockDensityMatrix.fock(1, 8)
    noise = NoiseModel("binomial", args.shots, args.seed) if args.shots else NoiseModel()
    signal = simulate_signal(rho, 0, taus, noise)
    scan = cutoff_scan(signal, taus, range(args.m, 61), decay=args.decay)
    emit_outputs(scan, out / "scan.csv")
    for p in scan[:: max(1, len(scan) // 10)]:
        print(f"N={p.cutoff:3d}  W={p.estimate.real:+8.3f} +- {p.estimate.error:7.3f}  cond={p.kernel.condition_estimate:.2e}")


if __name__ == "__main__":
    main()
