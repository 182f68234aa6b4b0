"""Partial Fresnel integrals W(alpha; tau_m) for |0> and |1> at a few real alpha."""
import argparse
import math
from pathlib import Path

import numpy as np

from fresnel_wigner import FockDensityMatrix, FresnelSettings, convergence_trace, emit_outputs, simulate_signal
from fresnel_wigner.fock import analytic_wigner_fock


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau-max", type=float, default=8 * math.pi)
    ap.add_argument("--alphas", default="0,0.5,1.0")
    ap.add_argument("--out", default="out/convergence")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = FresnelSettings(tau_m=args.tau_max)
    taus = np.linspace(0, args.tau_max, 4001)
    for n in (0, 1):
        rho = FockDensityMatrix.fock(n, 8)
        for a in (float(x) for x in args.alphas.split(",")):
            trace = convergence_trace(simulate_signal(rho, -a, taus), settings, 400)
            emit_outputs(trace, out / f"fock{n}_alpha{a:g}.csv")
            late = trace.values[trace.limits >= 2 * math.pi].real
            print(f"|{n}> alpha={a:g}: exact {analytic_wigner_fock(n, a):+.3f}, "
                  f"late mean {late.mean():+.3f}, late range [{late.min():+.3f}, {late.max():+.3f}]")


if __name__ == "__main__":
    main()
