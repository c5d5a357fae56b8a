"""Command-line entry point: ``fractrace <command> [options]``.

Commands
--------
constants    table of sharp constants and identity residuals
verify       one Rayleigh quotient on a test field, written as a JSON report
optimize     projected gradient ascent from a random start, with a conformal fit
riesz-check  Fourier and real-space Riesz energies of a smooth mean-zero field
hls-check    Euler-Lagrange proportionality of the HLS optimizer

Options come from three layers: built-in defaults, an optional
``--config`` file of ``key=value`` lines (``#`` starts a comment), and flags.
Later layers win. The merged configuration and the package version are
embedded in every output.

Exit codes: 0 check passed, 1 check failed, 2 usage error, 3 numerical failure.

JSON reports share the keys ``command``, ``version``, ``config``, ``passed``
and ``exit_code``. ``verify`` adds the Rayleigh report fields ``kind, n, m,
alpha, L, N, quotient, sharp_constant, ratio, tail_budget, notes,
wall_time_ms``. Apart from ``wall_time_ms`` the output is a deterministic
function of the configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constants import FracIndex, composed_constant, constants_record, sobolev_constant
from .extremizers import ExtremizerSpec, QuadratureError, hls_euler_lagrange_constant, hls_euler_lagrange_ratio
from .families import DEFAULT_GAMMA, FIELD_FAMILIES, mean_zero_gaussian_pair, test_field
from .field import BoxGrid
from .operators import DegenerateInputError, riesz_equivalence_check
from .optimize import AscentConfig, FitError, NumericalError, ascend, fit_extremizer, random_start
from .specfun import DomainError
from .verify import hls_quotient, sobolev_quotient, trace_norm_quotient, trace_sobolev_quotient

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

COMMANDS = ("constants", "verify", "optimize", "riesz-check", "hls-check")
VERIFY_KINDS = ("sobolev", "trace-norm", "trace-sobolev", "hls")

# (kind, n) -> (L, N); fallbacks by dimension
VERIFY_GRIDS = {
    ("sobolev", 1): (400.0, 8192),
    ("hls", 1): (400.0, 4096),
    ("trace_norm", 2): (50.0, 1024),
    ("trace_sobolev", 2): (200.0, 1024),
}
FALLBACK_GRIDS = {1: (400.0, 4096), 2: (50.0, 256), 3: (20.0, 64)}
OPTIMIZE_GRIDS = {1: (200.0, 2048), 2: (64.0, 128), 3: (16.0, 32)}
ATTAINMENT_TOL = {"sobolev": 0.03, "hls": 0.03, "trace_norm": 0.05, "trace_sobolev": 0.07}


class UsageError(ValueError):
    pass


# --- value parsers shared by flags and config files -----------------------------------------


def parse_int_range(text: str) -> list[int]:
    """``"3"``, ``"3,5,9"`` or ``"3..8"`` (inclusive)."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(part))
    return out


def parse_float_grid(text: str) -> list[float]:
    """``"0.75"``, ``"0.6,0.9"`` or ``"lo..hi:count"`` (inclusive linspace)."""
    out: list[float] = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            span, _, count = part.partition(":")
            lo, hi = (float(v) for v in span.split(".."))
            out.extend(float(v) for v in np.linspace(lo, hi, int(count) if count else 2))
        else:
            out.append(float(part))
    return out




def _opt(conv):
    return lambda v: None if v is None or str(v).strip().lower() in ("", "none") else conv(v)


CONVERTERS = {
    "n": str,
    "m": str,
    "alpha": str,
    "kind": str,
    "family": str,
    "seed": int,
    "L": float,
    "N": int,
    "gamma": _opt(float),
    "attainment_tol": _opt(float),
    "tol": _opt(float),
    "max_iters": int,
    "step": float,
    "step_decay": float,
    "grad_tol": float,
    "points": int,
    "format": str,
    "output": _opt(str),
    "trace_csv": _opt(str),
}


def read_config_file(path) -> dict:
    """Flat ``key=value`` file; keys use flag names with ``-`` or ``_``."""
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


# --- output -------------------------------------------------------------------------------


def write_atomic(path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def to_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def _csv_text(rows: list[dict], header_comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {header_comment}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _table_text(rows: list[dict], header_comment: str) -> str:
    lines = [f"# {header_comment}"]
    if rows:
        cols = list(rows[0])

        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return f"{v:.12g}"
            return str(v)

        cells = [[fmt(r[c]) for c in cols] for r in rows]
        widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
        lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


def emit(payload: dict, cfg: dict, rows: list[dict] | None = None) -> None:
    """Render ``payload`` in the configured format to ``cfg['output']`` or stdout."""
    fmt = cfg["format"]
    if fmt == "json" or rows is None:
        text = to_json(payload)
    else:
        comment = f"fractrace {__version__} command={payload['command']} config={json.dumps(cfg, sort_keys=True)}"
        text = _csv_text(rows, comment) if fmt == "csv" else _table_text(rows, comment)
    if cfg.get("output"):
        write_atomic(cfg["output"], text)
    else:
        sys.stdout.write(text)


# --- commands -------------------------------------------------------------------------------


def _single_int(cfg, key) -> int:
    vals = parse_int_range(cfg[key])
    if len(vals) != 1:
        raise UsageError(f"--{key} takes a single value for this command")
    return vals[0]


def _single_float(cfg, key) -> float:
    vals = parse_float_grid(cfg[key])
    if len(vals) != 1:
        raise UsageError(f"--{key} takes a single value for this command")
    return vals[0]


def _index(n, m, alpha) -> FracIndex:
    try:
        return FracIndex(n, m, alpha)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _base(cfg: dict, command: str) -> dict:
    return {"command": command, "version": __version__, "config": dict(cfg)}


def cmd_constants(cfg: dict) -> int:
    ns = parse_int_range(cfg["n"])
    ms = parse_int_range(cfg["m"])
    alphas = parse_float_grid(cfg["alpha"])
    idxs = [_index(n, m, a) for n in ns for m in ms for a in alphas]
    rows = []
    for idx in idxs:
        rec = constants_record(idx)
        row = rec.as_dict()
        row["max_residual"] = rec.max_residual
        rows.append(row)
    # every row gets the same columns
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    rows = [{k: r.get(k) for k in keys} for r in rows]
    passed = all(r["max_residual"] < 1e-12 for r in rows)
    code = EXIT_PASS if passed else EXIT_FAIL
    payload = _base(cfg, "constants") | {"rows": rows, "passed": passed, "exit_code": code}
    emit(payload, cfg, rows)
    return code


def _verify_setup(cfg: dict):
    kind = cfg["kind"].replace("-", "_")
    if kind.replace("_", "-") not in VERIFY_KINDS:
        raise UsageError(f"--kind must be one of {VERIFY_KINDS}")
    if cfg["family"] not in FIELD_FAMILIES:
        raise UsageError(f"--family must be one of {FIELD_FAMILIES}")
    trace_kind = kind in ("trace_norm", "trace_sobolev")
    n = int(cfg["n"]) if cfg.get("n") is not None else (2 if trace_kind else 1)
    m = int(cfg["m"]) if cfg.get("m") is not None else (1 if trace_kind else 0)
    alpha = float(cfg["alpha"]) if cfg.get("alpha") is not None else (0.75 if trace_kind else 0.25)
    if trace_kind and m < 1:
        raise UsageError(f"--kind {cfg['kind']} needs m >= 1")
    if not trace_kind and m != 0:
        raise UsageError(f"--kind {cfg['kind']} needs m = 0")
    idx = _index(n, m, alpha)
    if kind == "hls" and not alpha > 0:
        raise UsageError("--kind hls needs alpha > 0")
    L, N = VERIFY_GRIDS.get((kind, n), FALLBACK_GRIDS.get(n, (20.0, 32)))
    L = float(cfg["L"]) if cfg.get("L") is not None else L
    N = int(cfg["N"]) if cfg.get("N") is not None else N
    if N % 2 or N < 4 or not L > 0:
        raise UsageError("need an even N >= 4 and L > 0")
    return kind, idx, BoxGrid.cube(n, N, L)


def cmd_verify(cfg: dict) -> int:
    kind, idx, grid = _verify_setup(cfg)
    cfg.update(n=idx.n, m=idx.m, alpha=idx.alpha, L=grid.lengths[0], N=grid.sizes[0])
    family = cfg["family"]
    tol = cfg["attainment_tol"] if cfg.get("attainment_tol") is not None else ATTAINMENT_TOL[kind]
    cfg["attainment_tol"] = tol
    if family == "extremizer" and cfg.get("gamma") is None:
        cfg["gamma"] = DEFAULT_GAMMA[kind]
    f = test_field(kind, family, idx, grid, seed=cfg["seed"], gamma=cfg.get("gamma"))
    n, a = idx.n, idx.alpha
    decay = None
    if family == "extremizer":
        decay = {"sobolev": n - 2 * a, "hls": n + 2 * a, "trace_sobolev": n - 2 * a}.get(kind)
    if kind == "sobolev":
        rep = sobolev_quotient(f, idx, decay)
    elif kind == "hls":
        rep = hls_quotient(f, idx, decay)
    elif kind == "trace_norm":
        rep = trace_norm_quotient(f, idx)
    else:
        rep = trace_sobolev_quotient(f, idx, decay)
    if not math.isfinite(rep.ratio):
        raise NumericalError(f"non-finite ratio {rep.ratio}")
    upper_ok = rep.within_bound()
    lower_ok = rep.ratio >= 1 - tol if family == "extremizer" else True
    passed = bool(upper_ok and lower_ok)
    code = EXIT_PASS if passed else EXIT_FAIL
    payload = _base(cfg, "verify") | rep.to_json_dict() | {
        "family": family,
        "upper_bound_ok": bool(upper_ok),
        "attainment_ok": bool(lower_ok),
        "passed": passed,
        "exit_code": code,
    }
    emit(payload, cfg)
    return code


def cmd_optimize(cfg: dict) -> int:
    n = _single_int(cfg, "n")
    m = _single_int(cfg, "m")
    idx = _index(n, m, _single_float(cfg, "alpha"))
    kind = "sobolev" if m == 0 else "trace_sobolev"
    if kind == "trace_sobolev" and n == 1:
        raise UsageError("trace ascent needs n >= 2")
    L, N = OPTIMIZE_GRIDS.get(n, (16.0, 32))
    L = float(cfg["L"]) if cfg.get("L") is not None else L
    N = int(cfg["N"]) if cfg.get("N") is not None else N
    cfg.update(n=n, m=m, alpha=idx.alpha, L=L, N=N)
    try:
        acfg = AscentConfig(
            max_iters=cfg["max_iters"],
            step=cfg["step"],
            step_decay=cfg["step_decay"],
            grad_tol=cfg["grad_tol"],
            seed=cfg["seed"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    grid = BoxGrid.cube(n, N, L)
    t0 = time.perf_counter()
    trace = ascend(random_start(grid, acfg.seed), idx, kind, acfg)
    wall = 1e3 * (time.perf_counter() - t0)
    sharp = sobolev_constant(n, idx.alpha) if kind == "sobolev" else composed_constant(idx)
    ratio = trace.final_quotient / sharp
    fit = None
    if kind == "sobolev":
        try:
            spec, res = fit_extremizer(trace.field, idx)
            fit = {"A": spec.A, "gamma": spec.gamma, "a": list(spec.a), "residual": res}
        except FitError as exc:
            fit = {"error": str(exc)}
    if cfg.get("trace_csv"):
        buf = io.StringIO()
        buf.write(f"# fractrace {__version__} command=optimize config={json.dumps(cfg, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "quotient", "grad_norm", "step"])
        for i, row in enumerate(zip(trace.quotients, trace.grad_norms, trace.steps)):
            w.writerow([i, *(repr(float(v)) for v in row)])
        write_atomic(cfg["trace_csv"], buf.getvalue())
    passed = bool(ratio >= 0.99)
    code = EXIT_PASS if passed else EXIT_FAIL
    payload = _base(cfg, "optimize") | {
        "kind": kind,
        "n": n,
        "m": m,
        "alpha": idx.alpha,
        "L": L,
        "N": N,
        "initial_quotient": trace.quotients[0],
        "final_quotient": trace.final_quotient,
        "sharp_constant": sharp,
        "ratio": ratio,
        "iterations_used": trace.iterations_used,
        "converged": trace.converged,
        "stop_reason": trace.reason,
        "fit": fit,
        "passed": passed,
        "exit_code": code,
        "wall_time_ms": wall,
    }
    emit(payload, cfg)
    return code


def cmd_riesz_check(cfg: dict) -> int:
    n = _single_int(cfg, "n")
    if n not in (1, 2, 3):
        raise UsageError("riesz-check supports n = 1, 2, 3")
    alpha = float(cfg["alpha"]) if cfg.get("alpha") is not None else (0.25 if n == 1 else 0.5)
    if not 0 < alpha < n / 2:
        raise UsageError(f"need 0 < alpha < n/2, got {alpha}")
    L = float(cfg["L"]) if cfg.get("L") is not None else 40.0
    N = int(cfg["N"]) if cfg.get("N") is not None else {1: 2048, 2: 256, 3: 64}[n]
    tol = cfg["tol"] if cfg.get("tol") is not None else (1e-2 if n == 1 else 2e-2)
    cfg.update(n=n, alpha=alpha, L=L, N=N, tol=tol)
    res_half = riesz_equivalence_check(mean_zero_gaussian_pair(BoxGrid.cube(n, N // 2, L)), alpha)
    res = riesz_equivalence_check(mean_zero_gaussian_pair(BoxGrid.cube(n, N, L)), alpha)
    passed = bool(res <= tol and res < res_half)
    code = EXIT_PASS if passed else EXIT_FAIL
    payload = _base(cfg, "riesz-check") | {
        "n": n,
        "alpha": alpha,
        "L": L,
        "N": N,
        "residual": res,
        "residual_half_N": res_half,
        "passed": passed,
        "exit_code": code,
    }
    emit(payload, cfg)
    return code


def cmd_hls_check(cfg: dict) -> int:
    n = _single_int(cfg, "n")
    alpha = float(cfg["alpha"]) if cfg.get("alpha") is not None else 0.25
    idx = _index(n, 0, alpha)
    if not alpha > 0:
        raise UsageError("hls-check needs alpha > 0")
    gamma = cfg["gamma"] if cfg.get("gamma") is not None else 1.0
    tol = cfg["tol"] if cfg.get("tol") is not None else 0.05
    cfg.update(n=n, alpha=alpha, gamma=gamma, tol=tol)
    spec = ExtremizerSpec("hls", idx, gamma=gamma)
    radii = np.linspace(0.0, 3.0 * abs(gamma), cfg["points"])
    pts = np.zeros((len(radii), n))
    pts[:, 0] = radii
    ratios = hls_euler_lagrange_ratio(spec, pts)
    predicted = hls_euler_lagrange_constant(spec)
    dev = float(np.max(np.abs(ratios / predicted - 1)))
    spread = float((ratios.max() - ratios.min()) / ratios.mean())
    passed = bool(dev <= tol)
    code = EXIT_PASS if passed else EXIT_FAIL
    payload = _base(cfg, "hls-check") | {
        "n": n,
        "alpha": alpha,
        "gamma": gamma,
        "radii": radii.tolist(),
        "ratios": ratios.tolist(),
        "predicted": predicted,
        "max_relative_deviation": dev,
        "spread": spread,
        "passed": passed,
        "exit_code": code,
    }
    emit(payload, cfg)
    return code


HANDLERS = {
    "constants": cmd_constants,
    "verify": cmd_verify,
    "optimize": cmd_optimize,
    "riesz-check": cmd_riesz_check,
    "hls-check": cmd_hls_check,
}

DEFAULTS = {
    "constants": {"n": "3..8", "m": "1", "alpha": "1", "format": "text"},
    "verify": {
        "kind": "sobolev",
        "family": "extremizer",
        "n": None,
        "m": None,
        "alpha": None,
        "seed": 0,
        "L": None,
        "N": None,
        "gamma": None,
        "attainment_tol": None,
        "format": "json",
    },
    "optimize": {
        "n": "1",
        "m": "0",
        "alpha": "0.25",
        "seed": 42,
        "L": None,
        "N": None,
        "max_iters": 2000,
        "step": 1.0,
        "step_decay": 0.5,
        "grad_tol": 1e-9,
        "trace_csv": None,
        "format": "json",
    },
    "riesz-check": {"n": "1", "alpha": None, "L": None, "N": None, "tol": None, "format": "json"},
    "hls-check": {"n": "1", "alpha": None, "gamma": None, "points": 7, "tol": None, "format": "json"},
}


# --- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractrace",
        description="Sharp constants and numerical checks for fractional Sobolev, HLS and trace inequalities.",
    )
    parser.add_argument("--version", action="version", version=f"fractrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json",)):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--output", help="output file (written atomically); default stdout")
        p.add_argument("--format", choices=formats)

    p = sub.add_parser("constants", help="table of sharp constants and identity residuals", argument_default=argparse.SUPPRESS)
    p.add_argument("--n", help="dimensions, e.g. 3..8 or 3,5")
    p.add_argument("--m", help="codimensions, e.g. 1,2")
    p.add_argument("--alpha", help="orders, e.g. 1 or 0.6..1.4:5")
    common(p, ("text", "json", "csv"))

    p = sub.add_parser("verify", help="Rayleigh quotient of one test field", argument_default=argparse.SUPPRESS)
    p.add_argument("--kind", choices=VERIFY_KINDS)
    p.add_argument("--family", choices=FIELD_FAMILIES)
    p.add_argument("--n")
    p.add_argument("--m")
    p.add_argument("--alpha")
    p.add_argument("--seed")
    p.add_argument("--L", help="box side")
    p.add_argument("--N", help="samples per axis (even)")
    p.add_argument("--gamma", help="optimizer scale for --family extremizer")
    p.add_argument("--attainment-tol", dest="attainment_tol", help="pass needs ratio >= 1 - tol for extremizers")
    common(p)

    p = sub.add_parser("optimize", help="gradient ascent from a random start", argument_default=argparse.SUPPRESS)
    p.add_argument("--n")
    p.add_argument("--m")
    p.add_argument("--alpha")
    p.add_argument("--seed")
    p.add_argument("--L")
    p.add_argument("--N")
    p.add_argument("--max-iters", dest="max_iters")
    p.add_argument("--step")
    p.add_argument("--step-decay", dest="step_decay")
    p.add_argument("--grad-tol", dest="grad_tol")
    p.add_argument("--trace-csv", dest="trace_csv", help="write iter,quotient,grad_norm,step rows here")
    common(p)

    p = sub.add_parser("riesz-check", help="Fourier vs real-space Riesz energy", argument_default=argparse.SUPPRESS)
    p.add_argument("--n")
    p.add_argument("--alpha")
    p.add_argument("--L")
    p.add_argument("--N")
    p.add_argument("--tol")
    common(p)

    p = sub.add_parser("hls-check", help="HLS Euler-Lagrange proportionality", argument_default=argparse.SUPPRESS)
    p.add_argument("--n")
    p.add_argument("--alpha")
    p.add_argument("--gamma")
    p.add_argument("--points")
    p.add_argument("--tol")
    common(p)
    return parser


def resolve_config(command: str, flags: dict, config_path: str | None = None) -> dict:
    """Merge defaults, config file and flags (in rising precedence) and convert types."""
    merged = dict(DEFAULTS[command])
    merged["output"] = None
    if config_path:
        file_cfg = read_config_file(config_path)
        unknown = set(file_cfg) - set(merged)
        if unknown:
            raise UsageError(f"keys not used by {command}: {sorted(unknown)}")
        merged.update(file_cfg)
    merged.update({k: v for k, v in flags.items() if k not in ("command", "config")})
    out = {}
    for k, v in merged.items():
        try:
            out[k] = CONVERTERS[k](v) if v is not None else None
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {k}: {v!r}") from exc
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = vars(ns)
    command = flags["command"]
    try:
        cfg = resolve_config(command, flags, flags.get("config"))
        return HANDLERS[command](cfg)
    except (NumericalError, QuadratureError, DegenerateInputError, ArithmeticError) as exc:
        diag = {
            "command": command,
            "version": __version__,
            "error": type(exc).__name__,
            "message": str(exc),
            "exit_code": EXIT_NUMERICAL,
        }
        if isinstance(exc, QuadratureError):
            diag["diagnostics"] = exc.diagnostics
        sys.stderr.write(to_json(diag))
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        # UsageError, DomainError and malformed numbers all land here
        print(f"fractrace {command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())
