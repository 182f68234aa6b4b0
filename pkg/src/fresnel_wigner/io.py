"""File formats: signal/trace CSV ingestion, result CSV/JSON emission, config files.

Result files use 9 significant digits. Signal and trace files are written with
the shortest round-trip representation so that write-then-read is lossless.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .discrete import DiscreteKernel, ScanPoint
from .dynamics import AutocorrelationTrace, RabiSignal
from .errors import InvalidInputError, ParseError, ValidationError
from .fresnel import ConvergenceTrace

SIGNAL_COLUMNS = ("tau", "p_g", "sigma")
TRACE_COLUMNS = ("t", "c_re", "c_im")
META_ORDER = ("alpha_re", "alpha_im", "units", "shots")

CONFIG_KEYS = {
    "dim": int,
    "state": str,
    "method": str,
    "tau_m": float,
    "max_phase_step": float,
    "interpolation": str,
    "tail_fraction": float,
    "tail_start": float,
    "samples": int,
    "cutoff_n": int,
    "weights_decay": float,
    "m_times": int,
    "budget": int,
    "seed": int,
    "noise": str,
    "noise_param": float,
    "re_min": float,
    "re_max": float,
    "im_min": float,
    "im_max": float,
    "n_re": int,
    "n_im": int,
    "t_max": float,
    "omega_max": float,
    "window": float,
    "spectrum.kind": str,
    "spectrum.T_cl": float,
    "spectrum.T_r": float,
    "spectrum.Omega": float,
    "spectrum.table": str,
    "spectrum.levels": int,
}


def fmt(x: float) -> str:
    """Locale-independent decimal with 9 significant digits."""
    return format(float(x) + 0.0, ".9g")  # + 0.0 turns -0.0 into 0.0


def _exact(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class SignalFile:
    """Rabi signals read from one CSV, one block per applied displacement."""

    signals: tuple
    meta: tuple = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.signals)

    def __len__(self):
        return len(self.signals)


def _open_text(src):
    if hasattr(src, "read"):
        return _io.StringIO(src.read())
    with open(src, encoding="utf-8") as fh:
        return _io.StringIO(fh.read())


def _parse_blocks(src, columns, required):
    """Yield ``(meta, rows)`` per block, rows as ``(lineno, {col: float})``."""
    blocks = []
    meta, header, rows = {}, None, []

    def flush():
        if header is None and not rows and not meta:
            return
        if header is None:
            raise ParseError("block has no header line", last_line)
        blocks.append((meta, rows))

    last_line = 0
    for lineno, raw in enumerate(_open_text(src), start=1):
        last_line = lineno
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            key, value = (s.strip() for s in body.split("=", 1))
            if key == "alpha_re" and (rows or header is not None):
                flush()
                meta, header, rows = {}, None, []
            meta[key] = value
            continue
        if header is None:
            names = [c.strip() for c in line.split(",")]
            missing = [c for c in required if c not in names]
            if missing:
                raise ParseError(f"header lacks column(s) {', '.join(missing)}", lineno)
            unknown = [c for c in names if c not in columns]
            if unknown:
                raise ParseError(f"unknown column(s) {', '.join(unknown)}", lineno)
            header = names
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(cells)}", lineno)
        try:
            values = {name: float(cell) for name, cell in zip(header, cells)}
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno) from None
        if not all(math.isfinite(v) for v in values.values()):
            raise ParseError("non-finite value", lineno)
        rows.append((lineno, values))
    flush()
    if not blocks:
        raise ParseError("no data found", last_line or None)
    return blocks


def _alpha_from_meta(meta, line):
    try:
        return complex(float(meta.get("alpha_re", 0.0)), float(meta.get("alpha_im", 0.0)))
    except ValueError:
        raise ParseError("alpha metadata is not numeric", line) from None


def parse_signal_csv(src) -> SignalFile:
    """Read a signal CSV from a path or text stream.

    Layout per block: optional ``# alpha_re=``, ``# alpha_im=``, ``# units=``,
    ``# shots=`` comment lines, then the header ``tau,p_g,sigma`` and rows
    sorted by ``tau``. A new ``# alpha_re=`` line after data starts a new block.
    """
    signals, metas = [], []
    for meta, rows in _parse_blocks(src, SIGNAL_COLUMNS, ("tau", "p_g")):
        if not rows:
            raise ParseError("block has a header but no rows")
        prev = None
        for lineno, r in rows:
            if not 0.0 <= r["p_g"] <= 1.0:
                raise ParseError(f"p_g={r['p_g']!r} outside [0, 1]", lineno)
            if r["tau"] < 0:
                raise ParseError("negative tau", lineno)
            if r.get("sigma", 0.0) < 0:
                raise ParseError("negative sigma", lineno)
            if prev is not None and r["tau"] <= prev:
                raise ParseError("tau values must be strictly increasing", lineno)
            prev = r["tau"]
        alpha = _alpha_from_meta(meta, rows[0][0])
        signals.append(
            RabiSignal(
                alpha,
                [r["tau"] for _, r in rows],
                [r["p_g"] for _, r in rows],
                [r.get("sigma", 0.0) for _, r in rows],
            )
        )
        metas.append(meta)
    return SignalFile(tuple(signals), tuple(metas))


def _meta_lines(alpha: complex, extra: dict | None):
    meta = {"alpha_re": _exact(alpha.real), "alpha_im": _exact(alpha.imag)}
    for k, v in (extra or {}).items():
        if k not in ("alpha_re", "alpha_im"):
            meta[k] = str(v)
    keys = [k for k in META_ORDER if k in meta] + sorted(k for k in meta if k not in META_ORDER)
    return [f"# {k}={meta[k]}" for k in keys]


def _write_text(dest, text: str):
    if hasattr(dest, "write"):
        dest.write(text)
        return
    try:
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {dest}: {exc.strerror}") from exc


def write_signal_csv(signals, dest, meta=None) -> None:
    if isinstance(signals, SignalFile):
        meta = signals.meta if meta is None else meta
        signals = signals.signals
    elif isinstance(signals, RabiSignal):
        signals = [signals]
        meta = [meta] if isinstance(meta, dict) else meta
    meta = list(meta or [None] * len(signals))
    lines = []
    for sig, extra in zip(signals, meta):
        lines += _meta_lines(sig.alpha, extra)
        lines.append(",".join(SIGNAL_COLUMNS))
        lines += [f"{_exact(t)},{_exact(p)},{_exact(s)}" for t, p, s in sig.samples()]
    _write_text(dest, "\n".join(lines) + "\n")


def parse_trace_csv(src) -> list[AutocorrelationTrace]:
    out = []
    for meta, rows in _parse_blocks(src, TRACE_COLUMNS, TRACE_COLUMNS):
        if not rows:
            raise ParseError("block has a header but no rows")
        for (_, a), (lineno, b) in zip(rows, rows[1:]):
            if b["t"] <= a["t"]:
                raise ParseError("t values must be strictly increasing", lineno)
        alpha = _alpha_from_meta(meta, rows[0][0])
        out.append(
            AutocorrelationTrace(
                alpha, [r["t"] for _, r in rows], [complex(r["c_re"], r["c_im"]) for _, r in rows]
            )
        )
    return out


def write_trace_csv(traces, dest) -> None:
    if isinstance(traces, AutocorrelationTrace):
        traces = [traces]
    lines = []
    for tr in traces:
        lines += _meta_lines(tr.alpha, None)
        lines.append(",".join(TRACE_COLUMNS))
        lines += [f"{_exact(t)},{_exact(c.real)},{_exact(c.imag)}" for t, c in zip(tr.times, tr.values)]
    _write_text(dest, "\n".join(lines) + "\n")


def write_kernel_csv(kernel: DiscreteKernel, dest) -> None:
    lines = [
        f"# cutoff={kernel.cutoff}",
        f"# residual={fmt(kernel.residual_norm)}",
        f"# condition={fmt(kernel.condition_estimate)}",
        "tau,f,abs_f",
    ]
    lines += [f"{_exact(t)},{_exact(f)},{_exact(abs(f))}" for t, f in zip(kernel.taus, kernel.coeffs)]
    _write_text(dest, "\n".join(lines) + "\n")


def read_kernel_csv(src) -> dict:
    """Kernel report as ``{"cutoff", "residual", "condition", "taus", "coeffs"}``."""
    meta, body = {}, []
    for lineno, raw in enumerate(_open_text(src), start=1):
        line = raw.strip()
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            meta[k.strip()] = v.strip()
        elif line:
            body.append((lineno, line))
    if not body or body[0][1] != "tau,f,abs_f":
        raise ParseError("kernel file must have header tau,f,abs_f", body[0][0] if body else None)
    taus, coeffs = [], []
    for lineno, line in body[1:]:
        try:
            t, f, _ = (float(c) for c in line.split(","))
        except ValueError:
            raise ParseError(f"malformed row {line!r}", lineno) from None
        taus.append(t)
        coeffs.append(f)
    try:
        return {
            "cutoff": int(meta["cutoff"]),
            "residual": float(meta["residual"]),
            "condition": float(meta["condition"]),
            "taus": np.array(taus),
            "coeffs": np.array(coeffs),
        }
    except (KeyError, ValueError) as exc:
        raise ParseError(f"kernel metadata incomplete: {exc}") from None


# result emission -----------------------------------------------------------


def _table(result):
    """Header and rows for any emittable result."""
    from .grid import WignerMap

    if isinstance(result, WignerMap):
        header = ("alpha_re", "alpha_im", "w_re", "w_im", "dw")
        rows = [
            (a.real, a.imag, v.real, v.imag, e)
            for a, v, e in zip(result.points.ravel(), result.values.ravel(), result.errors.ravel())
        ]
        return header, rows
    if isinstance(result, ConvergenceTrace):
        return ("tau_m", "re_w", "im_w"), [(t, v.real, v.imag) for t, v in zip(result.limits, result.values)]
    if isinstance(result, (list, tuple)) and all(isinstance(p, ScanPoint) for p in result):
        return ("n_cutoff", "w", "dw", "condition"), [
            (p.cutoff, p.estimate.real, p.estimate.error, p.kernel.condition_estimate) for p in result
        ]
    raise InvalidInputError(f"cannot emit object of type {type(result).__name__}")


def emit_outputs(result, dest, format: str = "csv") -> None:
    """Write a Wigner map, convergence trace, cutoff scan or kernel report."""
    if isinstance(result, DiscreteKernel):
        if format == "csv":
            return write_kernel_csv(result, dest)
        payload = {
            "cutoff": result.cutoff,
            "residual": float(fmt(result.residual_norm)),
            "condition": float(fmt(result.condition_estimate)),
            "tau": [float(fmt(t)) for t in result.taus],
            "f": [float(fmt(f)) for f in result.coeffs],
        }
        return _write_text(dest, json.dumps(payload, indent=1) + "\n")
    header, rows = _table(result)
    if format == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row])
        return _write_text(dest, buf.getvalue())
    if format == "json":
        records = [
            {h: (int(v) if isinstance(v, (int, np.integer)) else _json_float(v)) for h, v in zip(header, row)}
            for row in rows
        ]
        return _write_text(dest, json.dumps(records, indent=1) + "\n")
    raise InvalidInputError(f"unknown output format {format!r}")


def _json_float(v):
    v = float(fmt(v))
    return v if math.isfinite(v) else None


def read_result_csv(src) -> tuple[list[str], np.ndarray]:
    """Header and float table of an emitted CSV."""
    text = _open_text(src).getvalue().splitlines()
    if not text:
        raise ParseError("empty file")
    header = text[0].split(",")
    data = np.array([[float(c) for c in line.split(",")] for line in text[1:] if line], dtype=float)
    return header, data.reshape(-1, len(header))


# configuration -------------------------------------------------------------


def parse_config(src) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment.

    Values are converted to the type registered in ``CONFIG_KEYS``; unknown
    keys are rejected so typos do not pass silently.
    """
    out = {}
    for lineno, raw in enumerate(_open_text(src), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key = value", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParseError(f"unknown config key {key!r}", lineno)
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ParseError(f"bad value for {key}: {value!r}", lineno) from None
    return out


def worker_count() -> int:
    """Worker cap from ``FRESNEL_WIGNER_THREADS`` (0 or unset: CPU count)."""
    raw = os.environ.get("FRESNEL_WIGNER_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        raise ValidationError(f"FRESNEL_WIGNER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValidationError("FRESNEL_WIGNER_THREADS must be nonnegative")
    return n or min(32, os.cpu_count() or 1)


def ensure_parent(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p
