"""Command line entry point: ``wsvd run | spectrum | loo``.

Every flag can also be given in a ``--config`` file of ``key = value`` lines
(``#`` starts a comment); flags on the command line override the file. List
valued keys accept comma-separated items and ``start:step:stop`` ranges.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench
from .approx import loo_optimize
from .basis import CLAMP_REL, build_basis
from .cubature import rule_for_budget
from .geometry import get_domain, halton_points, uniform_grid
from .kernels import Kernel, check_dimension


def parse_range(text: str, cast=float) -> list:
    """Parse ``"1,2,5"`` or ``"1:0.25:10"`` (inclusive) or a mix of both."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) == 1:
            out.append(cast(parts[0]))
        elif len(parts) == 3:
            start, step, stop = (float(p) for p in parts)
            if step <= 0:
                raise ValueError(f"range step must be positive in {item!r}")
            k = int(np.floor((stop - start) / step + 1e-9))
            out.extend(cast(round(start + i * step, 12)) for i in range(k + 1))
        else:
            raise ValueError(f"cannot parse range {item!r}")
    return out


def read_config(path: str) -> dict:
    """Read a flat ``key = value`` file; dashes in keys become underscores."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


_COMMON = {
    "kernel": str,
    "eps": lambda s: parse_range(s, float),
    "domain": str,
    "rule": str,
    "points": str,
    "n": lambda s: parse_range(s, lambda v: int(round(float(v)))),
    "clamp": float,
    "testfn": str,
    "grid": int,
    "out": str,
}
_RUN = {
    "method": str,
    "m": lambda s: parse_range(s, lambda v: int(round(float(v)))),
    "truncate_tol": float,
    "timing": lambda s: str(s).lower() in ("1", "true", "yes", "on"),
}
_LOO = {"eps_grid": lambda s: parse_range(s, float)}


def _add_flags(p, keys):
    for key in keys:
        flag = "--" + key.replace("_", "-")
        if key == "timing":
            p.add_argument(flag, action="store_const", const="true", default=None)
        else:
            p.add_argument(flag, dest=key, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wsvd", description="Weighted SVD basis experiments (CSV output)."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys, text in (
        ("run", {**_COMMON, **_RUN}, "approximation error sweep"),
        ("spectrum", _COMMON, "eigenvalues sigma_j^2 of the scaled kernel matrix"),
        ("loo", {**_COMMON, **_LOO}, "leave-one-out shape parameter scores"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", default=None, help="key = value file")
        _add_flags(p, keys)
    return parser


def _settings(args, keys) -> dict:
    raw = read_config(args.config) if args.config else {}
    unknown = set(raw) - set(keys)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    return {k: keys[k](v) for k, v in raw.items()}


def _emit(path, header, rows):
    if path:
        bench.write_csv(path, header, rows)
    else:
        bench.write_csv(sys.stdout, header, rows)


def cmd_run(args) -> int:
    s = _settings(args, {**_COMMON, **_RUN})
    cfg = bench.ExperimentConfig(**s)
    rows = bench.run_experiment(cfg)
    if cfg.out:
        bench.rows_to_csv(rows, cfg.out)
    else:
        sys.stdout.write(bench.rows_to_csv(rows))
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"error at N={r.N} eps={r.eps}: {r.error}", file=sys.stderr)
    return 1 if failed else 0


def cmd_spectrum(args) -> int:
    s = _settings(args, _COMMON)
    eps = s.get("eps", [4.0])
    if len(eps) != 1:
        raise ValueError("spectrum takes a single shape parameter")
    kernel = Kernel(s.get("kernel", "gauss"), eps[0])
    check_dimension(kernel, 2)
    domain = get_domain(s.get("domain", "disk"))
    n = s.get("n", [400])
    if len(n) != 1:
        raise ValueError("spectrum takes a single budget n")
    rule = rule_for_budget(domain, n[0], s.get("rule"))
    basis = build_basis(kernel, rule, clamp_rel=s.get("clamp", CLAMP_REL))
    _emit(s.get("out"), ["j", "sigma2"], bench.spectrum_rows(basis))
    return 0


def cmd_loo(args) -> int:
    s = _settings(args, {**_COMMON, **_LOO})
    family = s.get("kernel", "gauss")
    grid = s.get("eps_grid") or s.get("eps") or parse_range("1:0.25:10")
    domain = get_domain(s.get("domain", "square"))
    n = s.get("n", [196])
    if len(n) != 1:
        raise ValueError("loo takes a single budget n")
    points = s.get("points") or "grid"
    if points == "halton":
        X = halton_points(n[0], domain)
    elif points == "grid":
        X = uniform_grid(max(1, round(np.sqrt(n[0]))), domain)
    else:
        raise ValueError("loo uses points = grid or halton")
    f = bench.get_test_function(s.get("testfn", "native"))
    result = loo_optimize(family, grid, X, f(X))
    _emit(s.get("out"), ["eps", "score"], result.scores)
    print(f"eps* = {result.eps_star!r} (N = {len(X)})", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "spectrum": cmd_spectrum, "loo": cmd_loo}[args.command]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"wsvd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
