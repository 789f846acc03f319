"""Test functions, error metrics and the experiment runner behind the CLI."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import approx as _approx
from .basis import build_basis, gram_residual, trace_residual, CLAMP_REL
from .cubature import rule_for_budget
from .exceptions import EmptyGrid
from .geometry import get_domain, halton_points, uniform_grid
from .kernels import Kernel, check_dimension, kernel_block

# -- test functions ---------------------------------------------------------

_NATIVE_KERNEL = Kernel("gauss", 4.0)
_NATIVE_CENTERS = np.array([[0.5, 0.5], [0.0, 0.0], [0.7, 0.7]])
_NATIVE_COEFFS = np.array([-2.0, 1.0, 3.0])


def franke(p):
    """Franke's bivariate test function."""
    p = np.asarray(p, dtype=float)
    x, y = 9.0 * p[..., 0], 9.0 * p[..., 1]
    return (
        0.75 * np.exp(-((x - 2) ** 2 + (y - 2) ** 2) / 4)
        + 0.75 * np.exp(-((x + 1) ** 2) / 49 - (y + 1) / 10)
        + 0.5 * np.exp(-((x - 7) ** 2 + (y - 3) ** 2) / 4)
        - 0.2 * np.exp(-((x - 4) ** 2) - (y - 7) ** 2)
    )


def oscillatory(p):
    p = np.asarray(p, dtype=float)
    return np.cos(20.0 * (p[..., 0] + p[..., 1]))


def singular_exp(p):
    """``exp(|x - y|) - 1``: continuous, with a kink along the diagonal."""
    p = np.asarray(p, dtype=float)
    return np.expm1(np.abs(p[..., 0] - p[..., 1]))


def native_gauss(p):
    """A combination of three Gaussian (epsilon = 4) translates."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    vals = kernel_block(_NATIVE_KERNEL, p[None, :] if single else p, _NATIVE_CENTERS)
    vals = vals @ _NATIVE_COEFFS
    return vals[0] if single else vals


TEST_FUNCTIONS = {
    "franke": franke,
    "oscillatory": oscillatory,
    "singular": singular_exp,
    "native": native_gauss,
}
_ALIASES = {"singularexp": "singular", "nativegauss": "native"}


def get_test_function(name: str):
    key = _ALIASES.get(name.lower(), name.lower())
    try:
        return TEST_FUNCTIONS[key]
    except KeyError:
        raise ValueError(
            f"unknown test function {name!r}; expected one of {tuple(TEST_FUNCTIONS)}"
        ) from None


def test_function(name: str, p):
    return get_test_function(name)(p)


test_function.__test__ = False  # not a pytest test


# -- metrics ----------------------------------------------------------------


def rmse(approx, f, grid) -> float:
    """Root-mean-square of ``approx - f`` over the grid points."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("rmse needs at least one grid point")
    d = np.asarray(approx(grid), dtype=float) - np.asarray(f(grid), dtype=float)
    return float(np.sqrt(np.mean(d**2)))


def max_abs_error(approx, f, grid) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("max error needs at least one grid point")
    return float(np.max(np.abs(approx(grid) - f(grid))))


# -- experiments ------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One sweep over shape parameters, budgets and truncation orders.

    ``m`` (explicit orders) and ``truncate_tol`` (singular-value threshold)
    are alternative truncation policies; with neither, the full interpolant
    is used. ``method="std"`` uses the translate basis on ``points`` = grid or
    halton instead of a cubature rule.
    """

    kernel: str = "gauss"
    eps: list = field(default_factory=lambda: [4.0])
    domain: str = "disk"
    method: str = "wsvd"
    rule: str | None = None
    points: str | None = None
    n: list = field(default_factory=lambda: [400])
    m: list | None = None
    truncate_tol: float | None = None
    clamp: float = CLAMP_REL
    testfn: str = "oscillatory"
    grid: int = 64
    out: str | None = None
    timing: bool = False

    def validate(self):
        get_domain(self.domain)
        get_test_function(self.testfn)
        for e in self.eps:
            check_dimension(Kernel(self.kernel, e), 2)
        if self.method not in ("wsvd", "std"):
            raise ValueError(f"method must be 'wsvd' or 'std', got {self.method!r}")
        if self.method == "std" and self.points not in (None, "grid", "halton"):
            raise ValueError("the standard basis uses points = grid or halton")
        if self.method == "wsvd" and self.points not in (None, "cubature"):
            raise ValueError("the weighted SVD basis needs cubature points")
        if self.m is not None and self.truncate_tol is not None:
            raise ValueError("give either m or truncate_tol, not both")
        if not self.n or min(self.n) < 1 or self.grid < 1:
            raise ValueError("budgets and grid resolution must be at least 1")
        if self.m is not None and min(self.m) < 0:
            raise ValueError("truncation orders must be non-negative")
        return self


@dataclass
class ResultRow:
    """One CSV line. ``sigma_min``/``sigma_max`` are the smallest and largest
    singular values ``sigma_j`` among the ``M`` retained basis functions."""

    N: int
    M: int | None
    eps: float
    kernel: str
    domain: str
    testfn: str
    rmse: float | None = None
    max_abs_err: float | None = None
    trace_residual: float | None = None
    gram_residual: float | None = None
    sigma_min: float | None = None
    sigma_max: float | None = None
    runtime_ms: float | None = None
    error: str = ""


CSV_FIELDS = [f.name for f in fields(ResultRow)]


def _wsvd_rows(cfg, eps, n, f, grid):
    domain = get_domain(cfg.domain)
    t0 = time.perf_counter()
    rule = rule_for_budget(domain, n, cfg.rule)
    basis = build_basis(Kernel(cfg.kernel, eps), rule, clamp_rel=cfg.clamp)
    full = _approx.project(basis, f(rule.nodes))
    tr, gr = trace_residual(basis), gram_residual(basis)
    # evaluate the basis once and reuse it for every truncation order
    U = basis(grid) * full.coeffs
    fg = f(grid)
    setup_ms = (time.perf_counter() - t0) * 1e3

    if cfg.m is not None:
        orders = [min(int(m), basis.n_active) for m in cfg.m]
    elif cfg.truncate_tol is not None:
        orders = [_approx.truncate(full, sigma_tol=cfg.truncate_tol).m_active]
    else:
        orders = [basis.n_active]

    sigma = np.sqrt(basis.sigma2)
    rows = []
    for M in orders:
        t1 = time.perf_counter()
        err = U[:, :M].sum(axis=1) - fg
        row = ResultRow(
            N=len(rule),
            M=M,
            eps=eps,
            kernel=cfg.kernel,
            domain=cfg.domain,
            testfn=cfg.testfn,
            rmse=float(np.sqrt(np.mean(err**2))),
            max_abs_err=float(np.max(np.abs(err))),
            trace_residual=tr,
            gram_residual=gr,
            sigma_min=float(sigma[M - 1]) if M > 0 else None,
            sigma_max=float(sigma[0]) if M > 0 else None,
        )
        if cfg.timing:
            row.runtime_ms = setup_ms + (time.perf_counter() - t1) * 1e3
        rows.append(row)
    return rows


def _std_rows(cfg, eps, n, f, grid):
    domain = get_domain(cfg.domain)
    t0 = time.perf_counter()
    if cfg.points == "halton":
        X = halton_points(n, domain)
    else:
        X = uniform_grid(max(1, round(np.sqrt(n))), domain)
    interp = _approx.standard_interpolant(Kernel(cfg.kernel, eps), X, f(X))
    err = interp(grid) - f(grid)
    row = ResultRow(
        N=len(X),
        M=len(X),
        eps=eps,
        kernel=cfg.kernel,
        domain=cfg.domain,
        testfn=cfg.testfn,
        rmse=float(np.sqrt(np.mean(err**2))),
        max_abs_err=float(np.max(np.abs(err))),
    )
    if cfg.timing:
        row.runtime_ms = (time.perf_counter() - t0) * 1e3
    return [row]


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every ``(eps, n)`` combination of the sweep, in config order.

    Failures are recorded in the ``error`` field of a row and do not stop
    the sweep.
    """
    cfg.validate()
    f = get_test_function(cfg.testfn)
    grid = uniform_grid(cfg.grid, get_domain(cfg.domain))
    if len(grid) == 0:
        raise EmptyGrid("evaluation grid has no points inside the domain")
    runner = _wsvd_rows if cfg.method == "wsvd" else _std_rows
    rows = []
    for eps in cfg.eps:
        for n in cfg.n:
            try:
                rows.extend(runner(cfg, float(eps), int(n), f, grid))
            except Exception as exc:  # surfaced per row; the sweep continues
                rows.append(
                    ResultRow(
                        N=int(n),
                        M=None,
                        eps=float(eps),
                        kernel=cfg.kernel,
                        domain=cfg.domain,
                        testfn=cfg.testfn,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return rows


# -- CSV --------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path_or_buf, header, rows):
    """Write rows of plain values with shortest round-trip float formatting."""
    own = isinstance(path_or_buf, str)
    buf = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    finally:
        if own:
            buf.close()


def rows_to_csv(rows: list[ResultRow], path_or_buf=None):
    """Write result rows; with no destination, return the CSV text."""
    values = [[asdict(r)[k] for k in CSV_FIELDS] for r in rows]
    if path_or_buf is None:
        buf = io.StringIO()
        write_csv(buf, CSV_FIELDS, values)
        return buf.getvalue()
    write_csv(path_or_buf, CSV_FIELDS, values)


def spectrum_rows(basis):
    """``(j, sigma_j^2)`` pairs, 1-based, for every eigenvalue of ``A_W``."""
    return [(j + 1, float(s)) for j, s in enumerate(basis.sigma2)]
