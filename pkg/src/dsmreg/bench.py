"""Benchmark harness: sweeps over problem size and noise seed, running each
method from a shared starting parameter, and CSV writers for tables and
solution profiles.
"""

import csv
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import dsm, ode, problems, regularization, vr

METHODS = ("dsm", "dsm-q1", "dsm-dopri", "vr-i", "vr-n")
FAMILIES = ("hilbert", "heat", "deriv2")
COND_TABLE_N = (20, 40, 60, 80, 100, 120)
_RANGE = re.compile(r"(\d+)-(\d+)(?::(\d+))?")

CSV_HEADER = (
    "family", "case", "n", "seed", "method", "a0", "a_final", "n_linsol",
    "rel_error", "residual", "status", "wall_time_ms", "a0_solves",
)  # fmt: skip


@dataclass
class ExperimentConfig:
    family: str = "hilbert"
    case: str = None
    n_list: list = field(default_factory=lambda: list(range(10, 101, 10)))
    delta_rel: float = 0.01
    seeds: list = field(default_factory=lambda: [0])
    methods: list = field(default_factory=lambda: ["dsm", "vr-i", "vr-n"])
    q: float = 2.0
    itermax: int = 30
    output_dir: str = "."
    include_a0_cost: bool = False
    timing: bool = False
    workers: int = 1
    audit: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; expected a subset of {METHODS}")
        if not self.delta_rel > 0:
            raise ValueError("delta_rel must be positive")
        self.n_list = [int(n) for n in self.n_list]
        self.seeds = [int(s) for s in self.seeds]
        self.methods = sorted(set(self.methods), key=METHODS.index)


@dataclass
class ReportRow:
    family: str
    case: str
    n: int
    seed: int
    method: str
    a0: float
    a_final: float
    n_linsol: int
    rel_error: float
    residual: float
    status: str
    wall_time_ms: float
    a0_solves: int

    def sort_key(self):
        return (self.family, self.n, self.seed, METHODS.index(self.method))


def default_case(family):
    return {"hilbert": "sqrt", "heat": "piecewise", "deriv2": "3"}[family]


def build_instance(family, case, n, delta_rel, seed):
    A, y, label = problems.build_system(family, n, case)
    return problems.make_instance(A, y, problems.NoiseSpec(delta_rel, seed), label)


def run_method(method, ctx, delta, a0, q=2.0, itermax=30):
    """Run one method on its own context; returns ``(u, residual, a_final, status)``."""
    if method in ("dsm", "dsm-q1"):
        r = dsm.dsm_solve(ctx, delta, a0, q=q if method == "dsm" else 1.0, itermax=itermax)
        return r.u, r.residual, r.a_final, str(r.status)
    if method == "dsm-dopri":
        r = ode.dopri45_dsm(ctx, delta, a0)
        return r.u, r.residual, r.a_final, str(r.status)
    if method == "vr-i":
        r = vr.vr_i(ctx, a0)
        return r.u, r.residual, r.a_used, str(r.status)
    if method == "vr-n":
        r = vr.vr_n(ctx, delta, a0)
        return r.u, r.residual, r.a_used, str(r.status)
    raise ValueError(f"unknown method {method!r}")


def run_cell(cfg, n, seed, keep_solutions=False):
    """All methods for one ``(n, seed)``; returns ``(rows, instance, solutions)``."""
    case = cfg.case or default_case(cfg.family)
    inst = build_instance(cfg.family, case, n, cfg.delta_rel, seed)
    base = regularization.new_context(inst.A, inst.f_delta)
    rows, sols = [], {}
    solves_before = regularization.total_solves()

    def row(method, a0, a_final, n_linsol, rel_error, residual, status, ms, a0_solves):
        return ReportRow(cfg.family, str(case), n, seed, method, a0, a_final, n_linsol, rel_error,
                         residual, status, ms if cfg.timing else 0.0, a0_solves)  # fmt: skip

    try:
        found = regularization.find_a0(base, inst.delta, inst.delta_rel)
    except (regularization.FindA0Error, regularization.ParameterError, ValueError) as exc:
        nan = float("nan")
        rows = [row(m, nan, nan, base.n_linsol, nan, nan, "failed", 0.0, base.n_linsol) for m in cfg.methods]
        return rows, inst, {"_error": str(exc)}
    a0_solves = base.n_linsol
    method_solves = []
    for method in cfg.methods:
        ctx = base.fresh()
        t0 = time.perf_counter()
        try:
            u, res, a_final, status = run_method(method, ctx, inst.delta, found.a0, cfg.q, cfg.itermax)
        except regularization.ParameterError as exc:
            u, res, a_final, status = None, float("nan"), exc.a, "failed"
        ms = 1e3 * (time.perf_counter() - t0)
        count = ctx.n_linsol + (a0_solves if cfg.include_a0_cost else 0)
        err = inst.rel_error(u) if u is not None else float("nan")
        rows.append(row(method, found.a0, a_final, count, err, res, status, ms, a0_solves))
        if keep_solutions and u is not None:
            sols[method] = u
        method_solves.append(ctx.n_linsol)
    if cfg.audit:
        performed = regularization.total_solves() - solves_before
        attributed = a0_solves + sum(method_solves)
        if performed != attributed:
            raise RuntimeError(f"solve attribution mismatch at n={n}, seed={seed}: {performed} != {attributed}")
    return rows, inst, sols


def _cell_rows(args):
    cfg, n, seed = args
    return run_cell(cfg, n, seed)[0]


def run_experiment(cfg):
    """Rows for every ``(n, seed, method)`` of the sweep, sorted by
    ``(family, n, seed, method)``.  Method failures become ``failed`` rows."""
    cells = [(cfg, n, seed) for n in cfg.n_list for seed in cfg.seeds]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_cell_rows, cells))
    else:
        chunks = [_cell_rows(c) for c in cells]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=ReportRow.sort_key)
    return rows


# ---------------------------------------------------------------------------
# Output


def fmt_real(x):
    return format(float(x), ".17g")


def _render(value):
    if isinstance(value, float):
        return fmt_real(value)
    return str(value)


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_render(v) for v in r])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_csv(rows, path):
    """Write report rows as UTF-8 CSV with LF endings and 17-digit reals."""
    if not rows:
        raise ValueError("no rows to write")
    return _write_rows(path, CSV_HEADER, (astuple(r) for r in rows))


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into :class:`ReportRow`."""
    types = {f.name: f.type for f in fields(ReportRow)}
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append(ReportRow(**{k: types[k](v) for k, v in rec.items()}))
    return out


def grid_points(family, n):
    """Abscissae for solution profiles: node ``(i - 1/2)/n`` for the integral
    equation families, ``(i - 1)/n`` for Hilbert systems."""
    if family == "hilbert":
        return np.arange(n) / n
    return (np.arange(n) + 0.5) / n


def emit_solution_profiles(instance, results, path, t=None):
    """Write ``index, t, y_exact, u_<method>...`` with one row per component.

    ``results`` maps method name to solution vector.
    """
    n = instance.y.shape[0]
    t = np.arange(n) / n if t is None else np.asarray(t, dtype=np.float64)
    cols = [np.asarray(u, dtype=np.float64) for u in results.values()]
    if any(c.shape != (n,) for c in cols) or t.shape != (n,):
        raise ValueError("all profile vectors must have the instance length")
    header = ["index", "t", "y_exact"] + [f"u_{m.replace('-', '_')}" for m in results]
    rows = ([i + 1, float(t[i]), float(instance.y[i])] + [float(c[i]) for c in cols] for i in range(n))
    return _write_rows(path, header, rows)


def cond_table(n_values=COND_TABLE_N):
    """``[(n, cond(H_n))]`` for the Hilbert condition number table."""
    return [(n, problems.cond_hilbert(n)) for n in n_values]


def summarize(rows):
    """Median ``n_linsol`` and ``rel_error`` per ``(n, method)``."""
    groups = {}
    for r in rows:
        groups.setdefault((r.n, r.method), []).append(r)
    out = []
    for (n, method), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], METHODS.index(kv[0][1]))):
        out.append(
            {
                "n": n,
                "method": method,
                "n_linsol": float(np.median([r.n_linsol for r in rs])),
                "rel_error": float(np.median([r.rel_error for r in rs])),
                "failed": sum(r.status == "failed" for r in rs),
            }
        )
    return out


# ---------------------------------------------------------------------------
# Config files


def parse_int_list(text):
    """``"10,20,30"`` or ``"10-100:10"`` (inclusive range with optional step)."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        m = _RANGE.fullmatch(part)
        if m:
            lo, hi, step = int(m[1]), int(m[2]), int(m[3] or 1)
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    return out


def _as_bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


CONFIG_KEYS = {
    "family": str,
    "case": str,
    "n": parse_int_list,
    "n_list": parse_int_list,
    "delta_rel": float,
    "seeds": parse_int_list,
    "methods": lambda s: [m for m in s.replace(" ", "").split(",") if m],
    "q": float,
    "itermax": int,
    "out": str,
    "output_dir": str,
    "include_a0_cost": _as_bool,
    "timing": _as_bool,
    "workers": int,
    "audit": _as_bool,
}
_RENAME = {"n": "n_list", "out": "output_dir"}


def parse_config_text(text):
    """Flat ``key = value`` lines; ``#`` starts a comment.  Keys may use
    dashes or underscores."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            key, _, val = line.partition(":")
        key = key.strip().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        values[_RENAME.get(key, key)] = CONFIG_KEYS[key](val.strip())
    return values


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def run_and_write(cfg, name=None):
    """Run a sweep and write ``<name>.csv`` plus ``<name>_summary.csv`` into
    ``cfg.output_dir``.  Returns the rows."""
    rows = run_experiment(cfg)
    name = name or f"{cfg.family}_{cfg.case or default_case(cfg.family)}_d{cfg.delta_rel:g}"
    out = Path(cfg.output_dir)
    emit_csv(rows, out / f"{name}.csv")
    summary = summarize(rows)
    _write_rows(
        out / f"{name}_summary.csv",
        ["n", "method", "median_n_linsol", "median_rel_error", "failed"],
        ([s["n"], s["method"], s["n_linsol"], s["rel_error"], s["failed"]] for s in summary),
    )
    return rows

