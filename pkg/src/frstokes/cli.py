"""Batch command-line front end.

Subcommands: ``solve`` (run one configured problem and emit CSV/JSON
artifacts), ``kernel`` (tabulate the relaxation kernels), ``verify`` (run
the property suites and report each guarantee with its worst-case margin),
and ``convergence`` (oracle-vs-quadrature error table over step sizes).

The CLI performs no arithmetic of its own beyond formatting: every number
printed is produced by a library call.  Numeric config fields accept
decimal strings so configs can round-trip exactly.  Output files are
written atomically and repeated runs with the same config are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .kernel import (
    KernelParams,
    QuadratureConfig,
    eval_A,
    eval_B,
    eval_dA_dt,
    eval_dB_dt,
    MIN_DERIVATIVE_TIME,
)
from .oracle import L1Grid, richardson_extrapolate, solve_scalar
from .quadrature import QuadratureNonconvergence
from .solvers import (
    ConstantSource,
    GridTooCoarseError,
    ProblemSpec,
    SampledSource,
    SolverError,
    ZeroSource,
    coercivity_report,
    export_trace_csv,
    export_trace_grid_csv,
    export_trace_json,
    manufactured_quadratic_source,
    solve_backward,
    solve_forward,
    solve_nonlocal,
    uniform_grid,
)
from .spectral import (
    CoefficientField,
    dirichlet_laplacian_1d,
    explicit_spectrum,
    load_field_csv,
    tail_indicator,
)
from .verification import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INGEST = 3
EXIT_SOLVER = 4


class ConfigError(ValueError):
    pass


class IngestError(ValueError):
    pass


def _num(value, what):
    """Accept JSON numbers or decimal strings for numeric config fields."""
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"{what}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: cannot parse {value!r} as a number") from None


def _emit_error(code, kind, message):
    print(json.dumps({"error": kind, "message": message}, sort_keys=True))
    return code


# ---------------------------------------------------------------------------
# solve


def _build_operator(cfg):
    kind = cfg.get("kind")
    if kind == "dirichlet_laplacian_1d":
        return dirichlet_laplacian_1d(_num(cfg.get("length"), "operator.length"),
                                      int(cfg.get("n_modes", 0)))
    if kind == "explicit_spectrum":
        ev = cfg.get("eigenvalues")
        if not isinstance(ev, list) or not ev:
            raise ConfigError("operator.eigenvalues must be a non-empty list")
        return explicit_spectrum([_num(v, "operator.eigenvalues") for v in ev])
    raise ConfigError(f"operator.kind must be 'dirichlet_laplacian_1d' or "
                      f"'explicit_spectrum', got {kind!r}")


def _build_data(cfg, op, base_dir):
    if "coefficients" in cfg:
        coeffs = [_num(v, "data.coefficients") for v in cfg["coefficients"]]
        if len(coeffs) != op.n_modes:
            raise ConfigError(
                f"data.coefficients has {len(coeffs)} entries for "
                f"{op.n_modes} modes"
            )
        return CoefficientField(np.array(coeffs), op)
    if "csv" in cfg:
        path = os.path.join(base_dir, cfg["csv"])
        try:
            return load_field_csv(path, op)
        except (OSError, ValueError) as exc:
            raise IngestError(f"data.csv: {exc}") from exc
    raise ConfigError("data needs either 'coefficients' or 'csv'")


def _build_source(cfg, op, rho, gamma, base_dir):
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return ZeroSource()
    if kind == "constant":
        if "coefficients" in cfg:
            values = [_num(v, "source.coefficients") for v in cfg["coefficients"]]
            if len(values) != op.n_modes:
                raise ConfigError("source.coefficients length mismatch")
            return ConstantSource(np.array(values))
        return ConstantSource(_num(cfg.get("value", 1.0), "source.value"))
    if kind == "manufactured_t2":
        return manufactured_quadratic_source(op, rho, gamma)
    if kind == "sampled_csv":
        path = os.path.join(base_dir, cfg.get("path", ""))
        try:
            raw = np.genfromtxt(path, delimiter=",", names=True)
        except (OSError, ValueError) as exc:
            raise IngestError(f"source.path: {exc}") from exc
        names = raw.dtype.names
        if names is None or names[0] != "t":
            raise IngestError("sampled source CSV needs header t,f1,f2,...")
        times = np.atleast_1d(raw["t"])
        cols = [np.atleast_1d(raw[n]) for n in names[1:]]
        if len(cols) != op.n_modes:
            raise IngestError(
                f"sampled source has {len(cols)} mode columns for "
                f"{op.n_modes} modes"
            )
        return SampledSource(times, np.column_stack(cols))
    raise ConfigError(f"unknown source kind {kind!r}")


def _build_quadrature(cfg):
    if not cfg:
        return None
    return QuadratureConfig(
        rel_tol=_num(cfg.get("rel_tol", 1e-8), "quadrature.rel_tol"),
        abs_tol=_num(cfg.get("abs_tol", 1e-12), "quadrature.abs_tol"),
        max_refinements=int(cfg.get("max_refinements", 30)),
        split_point=_num(cfg.get("split_point", 1.0), "quadrature.split_point"),
    )


def _build_grid(cfg, horizon):
    if cfg is None:
        return uniform_grid(horizon)
    if "nodes" in cfg:
        return np.array([_num(v, "time_grid.nodes") for v in cfg["nodes"]])
    if "n_nodes" in cfg:
        return uniform_grid(horizon, int(cfg["n_nodes"]))
    raise ConfigError("time_grid needs 'nodes' or 'n_nodes'")


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _check_referenced_files(cfg, base_dir):
    refs = []
    data = cfg.get("data", {})
    if "csv" in data:
        refs.append(os.path.join(base_dir, data["csv"]))
    source = cfg.get("source", {})
    if source.get("kind") == "sampled_csv":
        refs.append(os.path.join(base_dir, source.get("path", "")))
    missing = [p for p in refs if not os.path.isfile(p)]
    if missing:
        raise IngestError(f"referenced files missing: {missing}")


def cmd_solve(args):
    cfg = _load_config(args.config)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    problem = cfg.get("problem")
    if not isinstance(problem, dict):
        raise ConfigError("config needs a 'problem' table")
    kind = problem.get("kind")
    if kind not in ("forward", "nonlocal", "backward"):
        raise ConfigError(f"problem.kind must be forward|nonlocal|backward, "
                          f"got {kind!r}")
    _check_referenced_files(cfg, base_dir)
    try:
        op = _build_operator(cfg.get("operator", {}))
        rho = _num(problem.get("rho"), "problem.rho")
        gamma = _num(problem.get("gamma"), "problem.gamma")
        horizon = _num(problem.get("horizon"), "problem.horizon")
        data = _build_data(cfg.get("data", {}), op, base_dir)
        source = _build_source(cfg.get("source", {"kind": "zero"}), op, rho,
                               gamma, base_dir)
        grid = _build_grid(problem.get("time_grid"), horizon)
        q = _build_quadrature(cfg.get("quadrature", {}))
        spec = ProblemSpec(kind, op, rho, gamma, horizon, data, source, grid)
    except (ConfigError, IngestError):
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    solver = {"forward": solve_forward, "nonlocal": solve_nonlocal,
              "backward": solve_backward}[kind]
    trace = solver(spec, q)

    out_dir = args.out_dir or base_dir
    os.makedirs(out_dir, exist_ok=True)
    output = cfg.get("output", {})
    written = {}
    trace_csv = output.get("trace_csv", "trace.csv")
    export_trace_csv(trace, os.path.join(out_dir, trace_csv))
    written["trace_csv"] = trace_csv
    trace_json = output.get("trace_json")
    if trace_json:
        export_trace_json(trace, os.path.join(out_dir, trace_json))
        written["trace_json"] = trace_json
    grid_cfg = output.get("grid_csv")
    if grid_cfg:
        xs = np.linspace(0.0, op.length, int(grid_cfg.get("n_points", 101)))
        export_trace_grid_csv(trace, xs, os.path.join(out_dir, grid_cfg["path"]))
        written["grid_csv"] = grid_cfg["path"]

    diagnostics = dict(trace.diagnostics)
    diagnostics["data_tail_indicator"] = tail_indicator(data)
    try:
        rep = coercivity_report(trace, spec)
        diagnostics["coercivity"] = {
            key: [float(v) for v in values] for key, values in rep.items()
        }
    except GridTooCoarseError:
        diagnostics["coercivity"] = None
    diag_name = output.get("diagnostics_json", "diagnostics.json")
    diag_path = os.path.join(out_dir, diag_name)
    from .solvers import _atomic_write

    _atomic_write(diag_path, json.dumps(diagnostics, indent=2, sort_keys=True,
                                        allow_nan=True) + "\n")
    written["diagnostics_json"] = diag_name
    print(json.dumps({"status": "ok", "out_dir": out_dir, "files": written},
                     sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# kernel table


def cmd_kernel(args):
    if args.t_steps < 1:
        raise ConfigError("--t-steps must be >= 1")
    if args.t_end < args.t_start:
        raise ConfigError("--t-end must be >= --t-start")
    try:
        p = KernelParams(args.rho, args.gamma, args.lam)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.t_steps == 1:
        ts = np.array([args.t_start])
    else:
        ts = np.linspace(args.t_start, args.t_end, args.t_steps)
    print("t,A,B,dA_dt,dB_dt")
    for t in ts:
        a = eval_A(p, float(t))
        b = eval_B(p, float(t))
        da = eval_dA_dt(p, float(t)) if t > 0.0 else -p.lam * b
        db = eval_dB_dt(p, float(t)) if t >= MIN_DERIVATIVE_TIME else math.nan
        print(f"{t:.17g},{a:.17g},{b:.17g},{da:.17g},{db:.17g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    names = [args.suite] if args.suite else None
    try:
        report = run_suites(names, tolerance_override=args.tolerance_override)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    print(json.dumps(report, indent=2, sort_keys=True))
    if not report["passed"]:
        print(f"FAILED: {', '.join(report['failed'])}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# convergence


def cmd_convergence(args):
    cfg = _load_config(args.config)
    dts = cfg.get("dts")
    if not isinstance(dts, list) or not dts:
        raise ConfigError("config needs a non-empty 'dts' list")
    dts = [_num(v, "dts") for v in dts]
    if any(dt <= 0.0 for dt in dts):
        raise ConfigError("dts must be positive")
    rho = _num(cfg.get("rho", 0.5), "rho")
    gamma = _num(cfg.get("gamma", 1.0), "gamma")
    lam = _num(cfg.get("lambda", 1.0), "lambda")
    horizon = _num(cfg.get("horizon", 1.0), "horizon")
    if horizon <= 0.0:
        raise ConfigError("horizon must be positive")
    target_kind = cfg.get("target", "kernel")
    try:
        p = KernelParams(rho, gamma, lam)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if target_kind == "kernel":
        reference = eval_A(p, horizon)
        values = []
        for dt in dts:
            grid = L1Grid(dt, round(horizon / dt), rho)
            values.append(float(solve_scalar(lam, gamma, rho, 1.0, None, grid)[-1]))
    elif target_kind == "manufactured":
        reference = horizon ** 2
        coef = 2.0 * gamma / math.gamma(3.0 - rho)

        def forcing(ts):
            return 2.0 * ts + lam * ts ** 2 + lam * coef * ts ** (2.0 - rho)

        values = []
        for dt in dts:
            grid = L1Grid(dt, round(horizon / dt), rho)
            values.append(float(solve_scalar(lam, gamma, rho, 0.0, forcing,
                                             grid)[-1]))
    else:
        raise ConfigError("target must be 'kernel' or 'manufactured'")

    errors = [abs(v - reference) for v in values]
    orders = []
    for i in range(1, len(errors)):
        if errors[i] > 0.0 and errors[i - 1] > 0.0 and dts[i] != dts[i - 1]:
            orders.append(math.log(errors[i - 1] / errors[i])
                          / math.log(dts[i - 1] / dts[i]))
        else:
            orders.append(math.nan)
    extrapolated = None
    if len(values) >= 2 and all(
        math.isclose(dts[i] / dts[i + 1], 2.0, rel_tol=1e-9)
        for i in range(len(dts) - 1)
    ):
        result = richardson_extrapolate(values)
        extrapolated = {
            "value": result.value,
            "observed_order": result.observed_order,
            "order_reliable": result.order_reliable,
        }
    report = {
        "target": target_kind,
        "reference": reference,
        "dts": dts,
        "values": values,
        "errors": errors,
        "observed_orders": orders,
        "richardson": extrapolated,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="frstokes",
        description="Solvers and verification suites for the fractional "
                    "Rayleigh-Stokes equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one configured problem")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out-dir", default=None)
    p_solve.set_defaults(fn=cmd_solve)

    p_kernel = sub.add_parser("kernel", help="tabulate the relaxation kernels")
    p_kernel.add_argument("--rho", type=float, required=True)
    p_kernel.add_argument("--gamma", type=float, required=True)
    p_kernel.add_argument("--lambda", dest="lam", type=float, required=True)
    p_kernel.add_argument("--t-start", type=float, required=True)
    p_kernel.add_argument("--t-end", type=float, required=True)
    p_kernel.add_argument("--t-steps", type=int, required=True)
    p_kernel.set_defaults(fn=cmd_kernel)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument("--suite", choices=sorted(SUITES), default=None)
    p_verify.add_argument("--tolerance-override", type=float, default=None,
                          help="replace every suite tolerance (fault injection)")
    p_verify.set_defaults(fn=cmd_verify)

    p_conv = sub.add_parser("convergence",
                            help="oracle-vs-quadrature error table")
    p_conv.add_argument("--config", required=True)
    p_conv.set_defaults(fn=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        return _emit_error(EXIT_CONFIG, "config", str(exc))
    except IngestError as exc:
        return _emit_error(EXIT_INGEST, "ingest", str(exc))
    except (SolverError, QuadratureNonconvergence) as exc:
        return _emit_error(EXIT_SOLVER, "solver", str(exc))


if __name__ == "__main__":
    sys.exit(main())
