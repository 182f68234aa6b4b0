"""Wigner map of a Fock state from simulated Rabi data, next to the exact values."""
import argparse
import math
from pathlib import Path

import numpy as np

from fresnel_wigner import FockDensityMatrix, FresnelSettings, GridSpec, MethodSettings, emit_outputs, grid_reconstruct
from fresnel_wigner.fock import wigner_from_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1, help="Fock level")
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--tau-m", type=float, default=6 * math.pi)
    ap.add_argument("--out", default="out/wigner_map")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rho = FockDensityMatrix.fock(args.n, args.n + 10)
    grid = GridSpec(-2, 2, -2, 2, args.points, args.points)
    settings = MethodSettings(fresnel=FresnelSettings(tau_m=args.tau_m, tail_start=args.tau_m / 3))
    wmap = grid_reconstruct(rho, grid, settings)
    emit_outputs(wmap, out / "reconstructed.csv")

    exact = np.array([wigner_from_state(rho, a).real for a in wmap.points.ravel()])
    err = np.abs(wmap.values.ravel().real - exact)
    np.savetxt(out / "exact.csv", np.column_stack([wmap.points.ravel().real, wmap.points.ravel().imag, exact]),
               delimiter=",", header="alpha_re,alpha_im,w", comments="", fmt="%.9g")
    print(f"{grid.n_re * grid.n_im} points, max |error| {err.max():.3f}, rms {np.sqrt(np.mean(err**2)):.3f}")


if __name__ == "__main__":
    main()
