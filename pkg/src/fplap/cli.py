"""Configuration-driven experiment runner with machine-readable output.

One experiment per invocation: a JSON config file selects the domain,
exponents and solver knobs, a subcommand picks the experiment, and the
result lands in a single JSON or CSV file.  Reruns with the same config
and seed produce byte-identical files.

Exit codes: 0 success, 1 bad configuration or failed precondition,
2 solver hit its budget before converging, 3 a checked property was
violated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

# thread pools must be pinned before numpy first loads in this process;
# with single-threaded BLAS the dense oracle is schedule-independent,
# so output files cannot depend on the host's core count
for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
):
    os.environ[_var] = "1"

import numpy as np  # noqa: E402

from .domain import Ball, Box, Interval, Params, ShapeSpec, build_lattice  # noqa: E402
from .eigensolver import (  # noqa: E402
    SolverOptions,
    is_sign_changing,
    matrix_oracle_p2,
    nodal_lemma_check,
    solve_lambda1,
    solve_lambda2_path,
)
from .energy import assemble_kernel  # noqa: E402
from .errors import ConfigError, FplapError, NotConverged, WrongExponent  # noqa: E402
from .inequalities import faber_krahn_check, hks_sweep  # noqa: E402

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_VIOLATION = 3

_CSV_HEADER = "distance,lambda2_union,lambda1_ball,scaled_bound,gap"

_TOP_KEYS = {
    "lambda1": {"params", "shape", "h", "trunc_factor", "solver", "seed", "out"},
    "lambda2": {
        "params",
        "shape",
        "h",
        "trunc_factor",
        "solver",
        "seed",
        "out",
        "nodal_check",
    },
    "hks-sweep": {
        "params",
        "radius",
        "distances",
        "h",
        "trunc_factor",
        "solver",
        "seed",
        "out",
    },
    "faber-krahn": {
        "params",
        "shape",
        "h",
        "trunc_factor",
        "solver",
        "seed",
        "out",
        "tol",
    },
    "propcheck": {"samples", "seed", "out"},
    "oracle-compare": {"params", "shape", "h", "trunc_factor", "solver", "seed", "out"},
}

_SHAPE_FIELDS = {
    "interval": {"type", "lo", "hi"},
    "ball": {"type", "center", "radius"},
    "box": {"type", "lo", "hi"},
}

_SOLVER_FIELDS = {
    "max_iter",
    "grad_tol",
    "step0",
    "armijo_c",
    "path_nodes",
    "path_iters",
}


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _as_float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key {key!r} must be a number, got {value!r}")
    return float(value)


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"key {key!r} must be an integer, got {value!r}")
    return int(value)


def _need(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing key {key!r} in {where}")
    return mapping[key]


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            cfg = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _parse_params(cfg: dict) -> Params:
    sec = _need(cfg, "params", "config")
    if not isinstance(sec, dict):
        raise ConfigError("key 'params' must be an object")
    _check_keys(sec, {"s", "p", "dim"}, "params")
    s = _as_float(_need(sec, "s", "params"), "params.s")
    p = _as_float(_need(sec, "p", "params"), "params.p")
    dim = _as_int(_need(sec, "dim", "params"), "params.dim")
    try:
        return Params(s=s, p=p, dim=dim)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _parse_shape(cfg: dict) -> ShapeSpec:
    entries = _need(cfg, "shape", "config")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("key 'shape' must be a non-empty list of primitives")
    prims = []
    for i, entry in enumerate(entries):
        where = f"shape[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be an object")
        kind = entry.get("type")
        if kind not in _SHAPE_FIELDS:
            raise ConfigError(f"unknown shape type {kind!r} in {where}")
        _check_keys(entry, _SHAPE_FIELDS[kind], where)
        try:
            if kind == "interval":
                prims.append(
                    Interval(
                        _as_float(_need(entry, "lo", where), f"{where}.lo"),
                        _as_float(_need(entry, "hi", where), f"{where}.hi"),
                    )
                )
            elif kind == "ball":
                center = _need(entry, "center", where)
                if not isinstance(center, list):
                    raise ConfigError(f"{where}.center must be a list")
                prims.append(
                    Ball(
                        tuple(_as_float(c, f"{where}.center") for c in center),
                        _as_float(_need(entry, "radius", where), f"{where}.radius"),
                    )
                )
            else:
                lo = _need(entry, "lo", where)
                hi = _need(entry, "hi", where)
                if not isinstance(lo, list) or not isinstance(hi, list):
                    raise ConfigError(f"{where}.lo and {where}.hi must be lists")
                prims.append(
                    Box(
                        tuple(_as_float(c, f"{where}.lo") for c in lo),
                        tuple(_as_float(c, f"{where}.hi") for c in hi),
                    )
                )
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}")
    return ShapeSpec(tuple(prims))


def _parse_h(cfg: dict) -> float:
    h = _as_float(_need(cfg, "h", "config"), "h")
    if not h > 0:
        raise ConfigError(f"key 'h' must be positive, got {h}")
    return h


def _parse_trunc(cfg: dict) -> float:
    return _as_float(cfg.get("trunc_factor", 4.0), "trunc_factor")


def _parse_solver(cfg: dict, seed: int) -> SolverOptions:
    sec = cfg.get("solver", {})
    if not isinstance(sec, dict):
        raise ConfigError("key 'solver' must be an object")
    _check_keys(sec, _SOLVER_FIELDS, "solver")
    kwargs = {}
    for key in ("max_iter", "path_nodes", "path_iters"):
        if key in sec:
            kwargs[key] = _as_int(sec[key], f"solver.{key}")
    for key in ("grad_tol", "step0", "armijo_c"):
        if key in sec:
            kwargs[key] = _as_float(sec[key], f"solver.{key}")
    try:
        return SolverOptions(seed=seed, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _write_text(path: str, text: str) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def cmd_lambda1(cfg: dict, out: str, seed: int, threads: int) -> int:
    params = _parse_params(cfg)
    shape = _parse_shape(cfg)
    h = _parse_h(cfg)
    trunc = _parse_trunc(cfg)
    opts = _parse_solver(cfg, seed)
    dom = build_lattice(shape, h, params)
    K = assemble_kernel(dom, params, trunc)
    code = EXIT_OK
    try:
        result = solve_lambda1(K, opts)
    except NotConverged as exc:
        print(f"warning: {exc}", file=sys.stderr)
        result = exc.result
        code = EXIT_NOT_CONVERGED
    payload = {
        "lambda1": result.lam,
        "residual": result.residual,
        "iterations": result.iterations,
        "min_u": float(np.min(result.u)),
        "measure": dom.measure(),
        "converged": result.converged,
        "seed": seed,
        "threads": threads,
    }
    _write_json(out, payload)
    return code


def cmd_lambda2(cfg: dict, out: str, seed: int, threads: int) -> int:
    params = _parse_params(cfg)
    shape = _parse_shape(cfg)
    h = _parse_h(cfg)
    trunc = _parse_trunc(cfg)
    opts = _parse_solver(cfg, seed)
    want_nodal = bool(cfg.get("nodal_check", False))
    dom = build_lattice(shape, h, params)
    K = assemble_kernel(dom, params, trunc)
    payload = {
        "lambda1": None,
        "lambda2": None,
        "gap": None,
        "residual": None,
        "sign_change": False,
        "nodal_check": None,
        "converged": False,
        "seed": seed,
        "threads": threads,
    }
    try:
        r1 = solve_lambda1(K, opts)
    except NotConverged as exc:
        print(f"warning: {exc}", file=sys.stderr)
        payload["lambda1"] = exc.result.lam
        payload["residual"] = exc.result.residual
        _write_json(out, payload)
        return EXIT_NOT_CONVERGED
    payload["lambda1"] = r1.lam
    code = EXIT_OK
    try:
        r2 = solve_lambda2_path(K, r1.u, opts)
    except NotConverged as exc:
        print(f"warning: {exc}", file=sys.stderr)
        r2 = exc.result
        code = EXIT_NOT_CONVERGED
    payload["lambda2"] = r2.lam
    payload["gap"] = r2.lam - r1.lam
    payload["residual"] = r2.residual
    payload["sign_change"] = is_sign_changing(r2.u)
    payload["converged"] = r1.converged and r2.converged
    if want_nodal and is_sign_changing(r2.u):
        rep = nodal_lemma_check(K, r2, opts)
        payload["nodal_check"] = {
            "lambda1_plus": rep.lambda1_plus,
            "lambda1_minus": rep.lambda1_minus,
            "margin": rep.margin,
            "holds": rep.holds,
        }
    _write_json(out, payload)
    return code


def cmd_hks_sweep(cfg: dict, out: str, seed: int, threads: int) -> int:
    params = _parse_params(cfg)
    radius = _as_float(_need(cfg, "radius", "config"), "radius")
    distances = _need(cfg, "distances", "config")
    if not isinstance(distances, list) or not distances:
        raise ConfigError("key 'distances' must be a non-empty list")
    distances = [_as_float(d, "distances") for d in distances]
    h = _parse_h(cfg)
    trunc = _parse_trunc(cfg)
    opts = _parse_solver(cfg, seed)
    rows = hks_sweep(radius, distances, params, opts, h, trunc)
    lines = [_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                repr(v)
                for v in (
                    row.distance,
                    row.lambda2_union,
                    row.lambda1_ball,
                    row.scaled_bound,
                    row.gap,
                )
            )
        )
    _write_text(out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_faber_krahn(cfg: dict, out: str, seed: int, threads: int) -> int:
    params = _parse_params(cfg)
    shape = _parse_shape(cfg)
    h = _parse_h(cfg)
    trunc = _parse_trunc(cfg)
    tol = _as_float(cfg.get("tol", 0.02), "tol")
    if not 0.0 <= tol < 1.0:
        raise ConfigError(f"key 'tol' must lie in [0, 1), got {tol}")
    opts = _parse_solver(cfg, seed)
    dom = build_lattice(shape, h, params)
    report = faber_krahn_check(dom, params, opts, trunc, tol)
    payload = {
        "lambda1": report.lambda1,
        "ball_bound": report.ball_bound,
        "margin": report.margin,
        "holds": report.holds,
        "seed": seed,
        "threads": threads,
    }
    _write_json(out, payload)
    return EXIT_OK


def cmd_propcheck(cfg: dict, out: str, seed: int, threads: int) -> int:
    from .pointwise import run_battery

    samples = _as_int(cfg.get("samples", 1_000_000), "samples")
    if samples < 1:
        raise ConfigError(f"key 'samples' must be positive, got {samples}")
    summaries = run_battery(samples=samples, seed=seed)
    payload = {
        "checks": [
            {
                "check": s.check,
                "samples": s.samples,
                "violations": s.violations,
                "worst_slack": s.worst_slack,
            }
            for s in summaries
        ],
        "seed": seed,
        "threads": threads,
    }
    _write_json(out, payload)
    if any(s.violations for s in summaries):
        print("error: pointwise inequality violated; see report", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_oracle_compare(cfg: dict, out: str, seed: int, threads: int) -> int:
    params = _parse_params(cfg)
    if params.p != 2.0:
        raise WrongExponent(f"oracle comparison requires p=2, got p={params.p}")
    shape = _parse_shape(cfg)
    h = _parse_h(cfg)
    trunc = _parse_trunc(cfg)
    opts = _parse_solver(cfg, seed)
    dom = build_lattice(shape, h, params)
    K = assemble_kernel(dom, params, trunc)
    spectrum = matrix_oracle_p2(K)
    r1 = solve_lambda1(K, opts)
    r2 = solve_lambda2_path(K, r1.u, opts)
    rows = []
    for k, lam in ((1, r1.lam), (2, r2.lam)):
        ref = float(spectrum[k - 1])
        rows.append(
            {
                "k": k,
                "lambda_variational": lam,
                "lambda_matrix": ref,
                "rel_err": abs(lam - ref) / abs(ref),
            }
        )
    payload = {"rows": rows, "seed": seed, "threads": threads}
    _write_json(out, payload)
    return EXIT_OK


_COMMANDS = {
    "lambda1": cmd_lambda1,
    "lambda2": cmd_lambda2,
    "hks-sweep": cmd_hks_sweep,
    "faber-krahn": cmd_faber_krahn,
    "propcheck": cmd_propcheck,
    "oracle-compare": cmd_oracle_compare,
}


class _Parser(argparse.ArgumentParser):
    # usage errors must map to the config exit code, not argparse's 2
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="fplap",
        description="Eigenvalues and spectral inequalities of the "
        "fractional p-Laplacian on lattice domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "lambda1": "first eigenvalue of a lattice domain",
        "lambda2": "second eigenvalue via the mountain-pass path",
        "hks-sweep": "two-ball separation sweep (CSV)",
        "faber-krahn": "first eigenvalue against the equal-measure interval",
        "propcheck": "randomized batteries for the pointwise inequalities",
        "oracle-compare": "variational levels against the dense matrix (p=2)",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, help="path to the JSON config")
        sp.add_argument("--out", help="output file (overrides config key 'out')")
        sp.add_argument(
            "--threads",
            type=int,
            default=1,
            help="worker count; results never depend on it",
        )
        sp.add_argument(
            "--seed", type=int, default=None, help="overrides config key 'seed'"
        )
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.threads < 1:
            raise ConfigError(f"--threads must be at least 1, got {args.threads}")
        cfg = _load_config(args.config)
        _check_keys(cfg, _TOP_KEYS[args.command], "config")
        seed = (
            args.seed
            if args.seed is not None
            else _as_int(cfg.get("seed", 0), "seed")
        )
        out = args.out or cfg.get("out")
        if not out:
            raise ConfigError("no output path: pass --out or config key 'out'")
        return _COMMANDS[args.command](cfg, str(out), seed, args.threads)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FplapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
