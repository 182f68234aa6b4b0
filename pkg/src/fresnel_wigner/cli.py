"""Command-line front end.

Settings resolve as: command-line flag, then ``--config`` file, then the
built-in default. Exit status: 0 success, 2 invalid input, 1 anything else.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io as fio
from .discrete import cutoff_scan, discrete_wigner, optimize_times, solve_kernel
from .dynamics import NoiseModel, simulate_autocorrelation, simulate_signal
from .errors import InvalidInputError, ValidationError
from .fock import FockDensityMatrix, displaced_number_statistics
from .fresnel import FresnelSettings, convergence_trace, fresnel_identity, truncated_reconstruct
from .grid import GridSpec, MethodSettings, grid_reconstruct
from .spectra import (
    SpectrumModel,
    general_reconstruct,
    kernel_time_domain,
    spectrum_from_config,
    stationary_omega_max,
)

DEFAULTS = {
    "dim": 40,
    "state": "fock:1",
    "method": "fresnel",
    "tau_m": 4 * math.pi,
    "max_phase_step": math.pi / 8,
    "interpolation": "linear",
    "tail_fraction": 0.25,
    "tail_start": None,
    "samples": 2001,
    "cutoff_n": 60,
    "weights_decay": None,
    "m_times": 20,
    "budget": 2000,
    "seed": 0,
    "noise": "none",
    "noise_param": 0.0,
    "re_min": -2.0,
    "re_max": 2.0,
    "im_min": 0.0,
    "im_max": 0.0,
    "n_re": 41,
    "n_im": 1,
    "t_max": 6 * math.pi,
    "omega_max": None,
    "window": 4.0,
}


class _Settings:
    """Flag > config > default lookup."""

    def __init__(self, args):
        self.args = args
        self.cfg = fio.parse_config(args.config) if getattr(args, "config", None) else {}

    def __getitem__(self, key):
        flag = getattr(self.args, key.replace(".", "_"), None)
        if flag is not None:
            return flag
        if key in self.cfg:
            return self.cfg[key]
        return DEFAULTS.get(key)

    def spectrum(self):
        cfg = dict(self.cfg)
        for key in ("spectrum.kind", "spectrum.T_cl", "spectrum.T_r", "spectrum.Omega"):
            flag = getattr(self.args, key.replace(".", "_"), None)
            if flag is not None:
                cfg[key] = flag
        cfg.setdefault("spectrum.kind", "sqrt")
        return spectrum_from_config(cfg)


def parse_state(text: str, dim: int) -> FockDensityMatrix:
    """``fock:N``, ``coherent:BETA`` (Python complex literal) or ``thermal:NBAR``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "fock":
            return FockDensityMatrix.fock(int(arg or 0), dim)
        if kind == "coherent":
            return FockDensityMatrix.coherent(complex(arg.replace(" ", "")), dim)
        if kind == "thermal":
            return FockDensityMatrix.thermal(float(arg), dim)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise InvalidInputError(f"bad state argument in {text!r}") from exc
    raise InvalidInputError(f"unknown state {text!r}; use fock:N, coherent:BETA or thermal:NBAR")


def _noise(s: _Settings) -> NoiseModel:
    return NoiseModel(s["noise"], float(s["noise_param"] or 0.0), int(s["seed"]))


def _fresnel_settings(s: _Settings) -> FresnelSettings:
    return FresnelSettings(
        tau_m=float(s["tau_m"]),
        max_phase_step=float(s["max_phase_step"]),
        interpolation=s["interpolation"],
        tail_fraction=float(s["tail_fraction"]),
        tail_start=None if s["tail_start"] is None else float(s["tail_start"]),
    )


def _out(path):
    return sys.stdout if path in (None, "-") else fio.ensure_parent(path)


def _print_json(obj):
    print(json.dumps(obj, indent=1))


def _est_json(point, est, **extra):
    out = {
        "alpha_re": float(fio.fmt(point.real)),
        "alpha_im": float(fio.fmt(point.imag)),
        "w_re": float(fio.fmt(est.real)),
        "w_im": float(fio.fmt(est.imag)),
        "dw": float(fio.fmt(est.error)),
    }
    if est.endpoint is not None:
        out["endpoint_re"] = float(fio.fmt(est.endpoint.real))
        out["endpoint_im"] = float(fio.fmt(est.endpoint.imag))
    out.update(extra)
    return out


def _parse_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_cutoffs(text: str) -> list[int]:
    """``20:60`` (inclusive range), ``20:60:5`` or ``20,30,40``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(lo, hi + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except (ValueError, IndexError):
        raise InvalidInputError(f"bad cutoff list {text!r}") from None


# commands ------------------------------------------------------------------


def cmd_simulate(args):
    s = _Settings(args)
    rho = parse_state(s["state"], int(s["dim"]))
    taus = np.linspace(0.0, float(s["tau_m"]), int(s["samples"]))
    alpha = complex(args.alpha_re, args.alpha_im)
    sig = simulate_signal(rho, alpha, taus, _noise(s))
    meta = {"units": "dimensionless interaction time"}
    if s["noise"] == "binomial":
        meta["shots"] = int(s["noise_param"])
    fio.write_signal_csv(sig, _out(args.output), meta)


def cmd_reconstruct_fresnel(args):
    s = _Settings(args)
    settings = _fresnel_settings(s)
    results = []
    for sig in fio.parse_signal_csv(args.signal):
        results.append(_est_json(sig.point, truncated_reconstruct(sig, settings)))
        if args.trace_out:
            fio.emit_outputs(convergence_trace(sig, settings, args.resolution), fio.ensure_parent(args.trace_out), args.format)
    _print_json(results)


def cmd_reconstruct_discrete(args):
    s = _Settings(args)
    results = []
    for sig in fio.parse_signal_csv(args.signal):
        kernel = solve_kernel(sig.taus, int(s["cutoff_n"]), decay=s["weights_decay"])
        results.append(
            _est_json(
                sig.point,
                discrete_wigner(sig, kernel),
                condition=float(fio.fmt(kernel.condition_estimate)),
                residual=float(fio.fmt(kernel.residual_norm)),
            )
        )
    _print_json(results)


def cmd_reconstruct_general(args):
    s = _Settings(args)
    spectrum = s.spectrum()
    window = float(s["window"])
    if args.trace:
        traces = fio.parse_trace_csv(args.trace)
        omega_max = s["omega_max"]
        if omega_max is None:
            raise InvalidInputError("measured traces need --omega-max")
        top = None
    else:
        rho = parse_state(s["state"], int(s["dim"]))
        times = np.linspace(0.0, float(s["t_max"]), int(s["samples"]))
        point = complex(args.alpha_re, args.alpha_im)
        traces = [simulate_autocorrelation(rho, -point, spectrum, times)]
        top = min(displaced_number_statistics(rho, -point).top_level(), spectrum.levels - 1)
        omega_max = s["omega_max"] or stationary_omega_max(spectrum, float(s["t_max"]), top, window)
    results = []
    for tr in traces:
        kernel = kernel_time_domain(spectrum, tr.times, float(omega_max), window, top)
        results.append(_est_json(-tr.alpha, general_reconstruct(tr, kernel)))
    _print_json(results)


def _kernel_taus(args):
    if args.taus:
        return np.array(_parse_list(args.taus))
    if args.signal:
        sigs = fio.parse_signal_csv(args.signal)
        return sigs.signals[0].taus
    raise InvalidInputError("give --taus or --signal")


def cmd_kernel_solve(args):
    s = _Settings(args)
    kernel = solve_kernel(_kernel_taus(args), int(s["cutoff_n"]), decay=s["weights_decay"])
    fio.emit_outputs(kernel, _out(args.output), args.format)


def cmd_kernel_optimize(args):
    s = _Settings(args)
    cutoff = int(s["cutoff_n"])
    taus = optimize_times(
        int(s["m_times"]), (args.tau_min, args.tau_max), cutoff, int(s["budget"]), int(s["seed"]), s["weights_decay"]
    )
    fio.emit_outputs(solve_kernel(taus, cutoff, decay=s["weights_decay"]), _out(args.output), args.format)


def cmd_scan_cutoff(args):
    s = _Settings(args)
    sig = fio.parse_signal_csv(args.signal).signals[0]
    scan = cutoff_scan(sig, sig.taus, _parse_cutoffs(args.cutoffs), decay=s["weights_decay"])
    fio.emit_outputs(scan, _out(args.output), args.format)


def cmd_grid(args):
    s = _Settings(args)
    grid = GridSpec(
        float(s["re_min"]), float(s["re_max"]), float(s["im_min"]), float(s["im_max"]), int(s["n_re"]), int(s["n_im"])
    )
    method = s["method"]
    settings = MethodSettings(
        method=method,
        fresnel=_fresnel_settings(s),
        samples=int(s["samples"]),
        noise=_noise(s),
        cutoff=int(s["cutoff_n"]),
        decay=s["weights_decay"],
        m_times=int(s["m_times"]),
        budget=int(s["budget"]),
        seed=int(s["seed"]),
        spectrum=s.spectrum() if method == "general" else None,
        t_max=float(s["t_max"]),
        omega_max=s["omega_max"],
        window=float(s["window"]),
    )
    if args.signal:
        source = fio.parse_signal_csv(args.signal).signals
    elif args.trace:
        source = fio.parse_trace_csv(args.trace)
    else:
        source = parse_state(s["state"], int(s["dim"]))
    result = grid_reconstruct(source, grid, settings)
    fio.emit_outputs(result, _out(args.output), args.format)


def cmd_check_identity(args):
    rows, ok = [], True
    for n in range(args.n_max + 1):
        chk = fresnel_identity(n, args.tau_max)
        dev = abs(chk.tail_average - chk.target)
        ok &= dev <= args.tol
        rows.append(
            {
                "n": n,
                "target": chk.target,
                "tail_re": float(fio.fmt(chk.tail_average.real)),
                "tail_im": float(fio.fmt(chk.tail_average.imag)),
                "deviation": float(fio.fmt(dev)),
            }
        )
    _print_json({"passed": bool(ok), "tolerance": args.tol, "rows": rows})
    return 0 if ok else 1


# parser --------------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _state_opts(p):
    p.add_argument("--state", help="fock:N | coherent:BETA | thermal:NBAR")
    p.add_argument("--dim", type=int, help="Fock truncation of the prepared state")


def _fresnel_opts(p):
    p.add_argument("--tau-m", dest="tau_m", type=float)
    p.add_argument("--max-phase-step", dest="max_phase_step", type=float)
    p.add_argument("--interpolation", choices=("linear", "cubic"))
    p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
    p.add_argument("--tail-start", dest="tail_start", type=float)


def _spectrum_opts(p):
    p.add_argument("--spectrum", dest="spectrum_kind", choices=("harmonic", "box", "sqrt", "custom"))
    p.add_argument("--T-cl", dest="spectrum_T_cl", type=float)
    p.add_argument("--T-r", dest="spectrum_T_r", type=float)
    p.add_argument("--Omega", dest="spectrum_Omega", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--window", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fresnel-wigner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a Rabi signal CSV")
    _common(p)
    _state_opts(p)
    p.add_argument("--alpha-re", type=float, default=0.0, help="applied displacement (real part)")
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--tau-m", dest="tau_m", type=float, help="last sample time")
    p.add_argument("--samples", type=int)
    p.add_argument("--noise", choices=("none", "gaussian", "binomial"))
    p.add_argument("--noise-param", dest="noise_param", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    rec = sub.add_parser("reconstruct", help="Wigner value(s) from data").add_subparsers(dest="method", required=True)
    p = rec.add_parser("fresnel")
    _common(p)
    _fresnel_opts(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--trace-out", help="also write the convergence trace here")
    p.add_argument("--resolution", type=int, default=200)
    p.set_defaults(func=cmd_reconstruct_fresnel)

    p = rec.add_parser("discrete")
    _common(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--cutoff", dest="cutoff_n", type=int)
    p.add_argument("--weights-decay", dest="weights_decay", type=float)
    p.set_defaults(func=cmd_reconstruct_discrete)

    p = rec.add_parser("general")
    _common(p)
    _state_opts(p)
    _spectrum_opts(p)
    p.add_argument("--trace", help="autocorrelation CSV (t,c_re,c_im); otherwise simulate from --state")
    p.add_argument("--alpha-re", type=float, default=0.0, help="phase-space point (real part)")
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_reconstruct_general)

    ker = sub.add_parser("kernel", help="discrete kernel tools").add_subparsers(dest="action", required=True)
    p = ker.add_parser("solve")
    _common(p)
    p.add_argument("--taus", help="comma-separated interaction times")
    p.add_argument("--signal", help="take the times from this signal file")
    p.add_argument("--cutoff", dest="cutoff_n", type=int)
    p.add_argument("--weights-decay", dest="weights_decay", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_kernel_solve)

    p = ker.add_parser("optimize-times")
    _common(p)
    p.add_argument("--m", dest="m_times", type=int)
    p.add_argument("--tau-min", type=float, default=0.0)
    p.add_argument("--tau-max", type=float, default=6 * math.pi)
    p.add_argument("--cutoff", dest="cutoff_n", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--weights-decay", dest="weights_decay", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_kernel_optimize)

    scan = sub.add_parser("scan", help="parameter scans").add_subparsers(dest="what", required=True)
    p = scan.add_parser("cutoff")
    _common(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--cutoffs", required=True, help="20:60, 20:60:5 or 20,30,40")
    p.add_argument("--weights-decay", dest="weights_decay", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scan_cutoff)

    p = sub.add_parser("grid", help="Wigner map over a phase-space grid")
    _common(p)
    _state_opts(p)
    _fresnel_opts(p)
    _spectrum_opts(p)
    p.add_argument("--method", choices=("fresnel", "discrete", "general"))
    p.add_argument("--signal", help="measured signals, one block per displacement")
    p.add_argument("--trace", help="measured autocorrelation traces (general method)")
    for key in ("re_min", "re_max", "im_min", "im_max"):
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float)
    p.add_argument("--n-re", dest="n_re", type=int)
    p.add_argument("--n-im", dest="n_im", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--noise", choices=("none", "gaussian", "binomial"))
    p.add_argument("--noise-param", dest="noise_param", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--cutoff", dest="cutoff_n", type=int)
    p.add_argument("--weights-decay", dest="weights_decay", type=float)
    p.add_argument("--m", dest="m_times", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_grid)

    chk = sub.add_parser("check", help="self-tests").add_subparsers(dest="what", required=True)
    p = chk.add_parser("identity", help="Fresnel parity identity for n = 0..n_max")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--tau-max", type=float, default=50 * math.pi)
    p.add_argument("--tol", type=float, default=0.05)
    p.set_defaults(func=cmd_check_identity)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - top-level reporter
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
