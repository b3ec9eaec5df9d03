"""Measured envelope constants for bounds the theory states only exist.

Three families of estimates assert a finite constant without giving its
value: the kernel envelope lam * B <= C * min(1/t, t^(rho-1)), the kernel
derivative bound |dB/dt| <= C * lam^eps / t^(1 - eps(1-rho)), and the
forced-response bound ||A u(t)|| <= C * max_t ||f(t)||_eps.  Each constant
is measured once per (rho, gamma) cell on a fine reference grid, stored in
a JSON manifest versioned in-repo, and asserted non-increasing under grid
refinement afterwards (coarser check grids are exact subsets of the
reference grid, so measured suprema can only shrink).

The manifest location can be overridden with the FRS_CONSTANTS_MANIFEST
environment variable.
"""

from __future__ import annotations

import json
import os
from importlib import resources

import numpy as np

from .kernel import KernelParams, QuadratureConfig, eval_B_grid, eval_dB_dt_grid

__all__ = [
    "DEFAULT_EPSILON",
    "REFERENCE_TIME_NODES",
    "manifest_path",
    "load_manifest",
    "constants_key",
    "get_constants",
    "measure_constants",
    "reference_time_grid",
]

DEFAULT_EPSILON = 0.5
REFERENCE_TIME_NODES = 241          # check grids use 241 -> 121 -> 61 ...
_REFERENCE_T_FLOOR = 1e-4
_LAMBDA_FACTORS = (1.0, 10.0, 100.0)

ENV_VAR = "FRS_CONSTANTS_MANIFEST"


def manifest_path() -> str | None:
    """Path of the active manifest: env override, else the packaged file."""
    override = os.environ.get(ENV_VAR)
    if override:
        return override
    ref = resources.files("frstokes").joinpath("data/constants.json")
    return str(ref) if ref.is_file() else None


def load_manifest(path: str | None = None) -> dict:
    target = path if path is not None else manifest_path()
    if target is None or not os.path.exists(target):
        raise FileNotFoundError(
            "no constants manifest found; generate one with "
            "scripts/build_constants_manifest.py or set FRS_CONSTANTS_MANIFEST"
        )
    with open(target) as fh:
        return json.load(fh)


def constants_key(rho: float, gamma: float, lambda_1: float = 1.0,
                  T: float = 1.0, epsilon: float = DEFAULT_EPSILON) -> str:
    return (f"rho={rho:g}|gamma={gamma:g}|lambda1={lambda_1:g}"
            f"|T={T:g}|eps={epsilon:g}")


def get_constants(rho: float, gamma: float, lambda_1: float = 1.0,
                  T: float = 1.0, epsilon: float = DEFAULT_EPSILON,
                  path: str | None = None) -> dict:
    manifest = load_manifest(path)
    key = constants_key(rho, gamma, lambda_1, T, epsilon)
    try:
        return manifest["cells"][key]
    except KeyError:
        raise KeyError(f"constants manifest has no cell {key!r}") from None


def reference_time_grid(T: float, n_nodes: int = REFERENCE_TIME_NODES) -> np.ndarray:
    """Logarithmic grid on [1e-4 T, T]; decimating by 2 yields exact subsets."""
    return np.geomspace(_REFERENCE_T_FLOOR * T, T, n_nodes)


def measure_constants(rho: float, gamma: float, lambda_1: float = 1.0,
                      T: float = 1.0, epsilon: float = DEFAULT_EPSILON,
                      q: QuadratureConfig | None = None,
                      n_nodes: int = REFERENCE_TIME_NODES) -> dict:
    """Suprema of the normalized bound quantities on the reference grid."""
    ts = reference_time_grid(T, n_nodes)
    envelope = 0.0
    derivative = 0.0
    for factor in _LAMBDA_FACTORS:
        lam = lambda_1 * factor
        p = KernelParams(rho, gamma, lam)
        b_vals, _ = eval_B_grid(p, ts, q)
        env = lam * b_vals / np.minimum(1.0 / ts, ts ** (rho - 1.0))
        envelope = max(envelope, float(np.max(env)))
        db_vals, _ = eval_dB_dt_grid(p, ts, q)
        weight = ts ** (1.0 - epsilon * (1.0 - rho)) * lam ** (-epsilon)
        derivative = max(derivative, float(np.max(weight * np.abs(db_vals))))
    forcing = _measure_forcing_response(rho, gamma, epsilon, T, q)
    return {
        "c_envelope_B": envelope,
        "c_derivative_B": derivative,
        "c_forcing_response": forcing,
        "n_nodes": int(n_nodes),
        "lambda_factors": list(_LAMBDA_FACTORS),
    }


def _measure_forcing_response(rho, gamma, epsilon, T, q):
    """sup_t ||A u(t)|| / max_t ||f(t)||_eps on the reference forced problem."""
    from .solvers import ConstantSource, ProblemSpec, solve_forward, uniform_grid
    from .spectral import CoefficientField, explicit_spectrum, norm_tau

    op = explicit_spectrum(np.arange(1.0, 9.0))
    f_coeffs = op.eigenvalues ** -2.0
    spec = ProblemSpec(
        "forward", op, rho, gamma, T,
        CoefficientField(np.zeros(op.n_modes), op),
        ConstantSource(f_coeffs), uniform_grid(T, 257),
    )
    trace = solve_forward(spec, q)
    f_norm = norm_tau(CoefficientField(f_coeffs, op), epsilon)
    au = trace.coefficients * op.eigenvalues[None, :]
    sup_au = float(np.max(np.sqrt(np.sum(au ** 2, axis=1))))
    return sup_au / f_norm
