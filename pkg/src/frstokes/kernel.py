"""Relaxation kernels of the fractional Rayleigh-Stokes scalar problem.

The scalar mode problem

    y'(t) + lam * (1 + gamma * D_t^rho) y(t) = f(t)

has two fundamental solutions: ``A(lam, t)`` (unit initial value, zero
source) and ``B(lam, t)`` (the impulse response convolved against the
source).  Both are represented as Laplace integrals of explicit spectral
densities on the positive half line; this module evaluates the densities,
the kernels, their time derivatives, the uniform-in-mode lower bounds, and
the closed-form Laplace transforms used for self-verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import (
    QuadratureConfig,
    adaptive_finite,
    exp_weighted_semiinfinite,
    integrate_semiinfinite,
)

__all__ = [
    "KernelParams",
    "BoundConstants",
    "QuadratureConfig",
    "density_A",
    "density_B",
    "eval_A",
    "eval_B",
    "eval_A_grid",
    "eval_B_grid",
    "eval_dA_dt",
    "eval_dB_dt",
    "eval_dB_dt_grid",
    "lower_bound_A",
    "lower_bound_B",
    "bound_constants",
    "laplace_A_closed_form",
    "laplace_B_closed_form",
    "laplace_transform_numeric",
]


@dataclass(frozen=True)
class KernelParams:
    """One scalar mode: fractional order rho, relaxation gamma, eigenvalue lam."""

    rho: float
    gamma: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ValueError(f"rho must lie strictly inside (0, 1), got {self.rho}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")


@dataclass(frozen=True)
class BoundConstants:
    """Lower-bound constants for the kernels over a fixed horizon."""

    c_lower_A: float
    c_lower_B: float
    horizon: float


def _check_positive_r(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("density argument r must be strictly positive")
    return arr


def density_A(r, p: KernelParams):
    """Spectral density of A: A(lam, t) = int_0^inf exp(-r t) density_A(r) dr.

    Nonnegative for all r > 0; behaves like r**(rho-1) at the origin and
    like r**(rho-3) at infinity.
    """
    arr = _check_positive_r(r)
    s = math.sin(math.pi * p.rho)
    c = math.cos(math.pi * p.rho)
    rp = arr ** p.rho
    re_part = p.lam - arr + p.lam * p.gamma * rp * c
    im_part = p.lam * p.gamma * rp * s
    num = (p.gamma / math.pi) * p.lam ** 2 * arr ** (p.rho - 1.0) * s
    out = num / (re_part ** 2 + im_part ** 2)
    return out if isinstance(r, np.ndarray) else float(out)


def density_B(r, p: KernelParams):
    """Spectral density of B; equals (r / lam) * density_A(r) identically."""
    arr = _check_positive_r(r)
    s = math.sin(math.pi * p.rho)
    c = math.cos(math.pi * p.rho)
    rp = arr ** p.rho
    re_part = p.lam - arr + p.lam * p.gamma * rp * c
    im_part = p.lam * p.gamma * rp * s
    num = (p.gamma / math.pi) * p.lam * rp * s
    out = num / (re_part ** 2 + im_part ** 2)
    return out if isinstance(r, np.ndarray) else float(out)


def _check_times(ts, minimum=0.0, what="t"):
    arr = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(arr < minimum):
        raise ValueError(f"{what} must be >= {minimum}")
    return arr


def eval_A_grid(p: KernelParams, ts, q: QuadratureConfig | None = None):
    """A(lam, t) for every t in ts; returns (values, error_bounds)."""
    arr = _check_times(ts)
    return exp_weighted_semiinfinite(
        lambda r: density_A(r, p), arr,
        singular_exponent=p.rho - 1.0, q=q,
    )


def eval_B_grid(p: KernelParams, ts, q: QuadratureConfig | None = None):
    """B(lam, t) for every t in ts; returns (values, error_bounds)."""
    arr = _check_times(ts)
    return exp_weighted_semiinfinite(
        lambda r: density_B(r, p), arr,
        singular_exponent=0.0, q=q,
    )


def eval_A(p: KernelParams, t: float, q: QuadratureConfig | None = None,
           with_error: bool = False):
    """Relaxation kernel A(lam, t): equals 1 at t = 0, strictly decreasing."""
    values, errors = eval_A_grid(p, [t], q)
    return (float(values[0]), float(errors[0])) if with_error else float(values[0])


def eval_B(p: KernelParams, t: float, q: QuadratureConfig | None = None,
           with_error: bool = False):
    """Impulse-response kernel B(lam, t): equals 1 at t = 0, in (0, 1) after."""
    values, errors = eval_B_grid(p, [t], q)
    return (float(values[0]), float(errors[0])) if with_error else float(values[0])


def eval_dA_dt(p: KernelParams, t: float, q: QuadratureConfig | None = None):
    """d/dt A(lam, t) = -lam * B(lam, t), valid for t > 0."""
    if not t > 0.0:
        raise ValueError("derivative of A requires t > 0")
    return -p.lam * eval_B(p, t, q)


MIN_DERIVATIVE_TIME = 1e-6


def eval_dB_dt_grid(p: KernelParams, ts, q: QuadratureConfig | None = None,
                    min_time: float = MIN_DERIVATIVE_TIME):
    """d/dt B(lam, t) on a grid of t >= min_time; returns (values, errors).

    Refuses very small times: the integrand -r exp(-r t) density_B(r) loses
    integrability as t -> 0, so any fixed truncation becomes unreliable.
    """
    arr = _check_times(ts, minimum=min_time, what="derivative time")
    values, errors = exp_weighted_semiinfinite(
        lambda r: r * density_B(r, p), arr,
        singular_exponent=0.0, q=q,
    )
    return -values, errors


def eval_dB_dt(p: KernelParams, t: float, q: QuadratureConfig | None = None,
               min_time: float = MIN_DERIVATIVE_TIME):
    """d/dt B(lam, t), strictly negative for t >= min_time."""
    values, _ = eval_dB_dt_grid(p, [t], q, min_time=min_time)
    return float(values[0])


def _lower_bound_density(rho, gamma, lambda_1, T, power):
    def dens(r):
        denom = r ** 2 / lambda_1 ** 2 + gamma ** 2 * r ** (2.0 * rho) + 1.0
        return r ** power * np.exp(-r * T) / denom

    return dens


def lower_bound_A(rho: float, gamma: float, lambda_1: float, T: float,
                  q: QuadratureConfig | None = None) -> float:
    """Uniform lower bound on A(lam_k, t) over lam_k >= lambda_1, t in [0, T]."""
    _validate_bound_args(rho, gamma, lambda_1, T)
    value, _ = integrate_semiinfinite(
        _lower_bound_density(rho, gamma, lambda_1, T, rho - 1.0),
        singular_exponent=rho - 1.0, decay_scale=T, q=q,
    )
    return gamma * math.sin(math.pi * rho) / (3.0 * math.pi) * value


def lower_bound_B(rho: float, gamma: float, lambda_1: float, T: float,
                  q: QuadratureConfig | None = None) -> float:
    """Uniform lower bound on lam_k * B(lam_k, t) over lam_k >= lambda_1, [0, T].

    The prefactor gamma*sin(pi rho)/(3 pi) follows from bounding the
    density denominator by 3 lam^2 (r^2/lambda_1^2 + gamma^2 r^(2 rho) + 1),
    the same step that yields the A bound.  A sharper-looking sin(pi rho)/4
    prefactor circulates for this estimate but is numerically violated
    (e.g. rho=0.3, gamma=2, lam=100, t=T=1 gives lam*B ~ 0.07224 against a
    claimed bound of 0.07284), so the provable constant is used.
    """
    _validate_bound_args(rho, gamma, lambda_1, T)
    value, _ = integrate_semiinfinite(
        _lower_bound_density(rho, gamma, lambda_1, T, rho),
        singular_exponent=0.0, decay_scale=T, q=q,
    )
    return gamma * math.sin(math.pi * rho) / (3.0 * math.pi) * value


def _validate_bound_args(rho, gamma, lambda_1, T):
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie strictly inside (0, 1)")
    if gamma <= 0.0 or lambda_1 <= 0.0 or T <= 0.0:
        raise ValueError("gamma, lambda_1 and T must be positive")


def bound_constants(rho: float, gamma: float, lambda_1: float, T: float,
                    q: QuadratureConfig | None = None) -> BoundConstants:
    """Both lower-bound constants for a spectrum starting at lambda_1."""
    return BoundConstants(
        c_lower_A=lower_bound_A(rho, gamma, lambda_1, T, q),
        c_lower_B=lower_bound_B(rho, gamma, lambda_1, T, q),
        horizon=T,
    )


def laplace_A_closed_form(p: KernelParams, z: float) -> float:
    """Laplace transform of A: (1 + lam*gamma*z^(rho-1)) / (z + lam + lam*gamma*z^rho)."""
    if not z > 0.0:
        raise ValueError("transform variable z must be positive")
    zr = z ** p.rho
    return (1.0 + p.lam * p.gamma * zr / z) / (z + p.lam + p.lam * p.gamma * zr)


def laplace_B_closed_form(p: KernelParams, z: float) -> float:
    """Laplace transform of B: 1 / (z + lam + lam*gamma*z^rho)."""
    if not z > 0.0:
        raise ValueError("transform variable z must be positive")
    return 1.0 / (z + p.lam + p.lam * p.gamma * z ** p.rho)


def laplace_transform_numeric(p: KernelParams, z: float,
                              q: QuadratureConfig | None = None,
                              kernel: str = "A",
                              folds: float = 50.0) -> tuple[float, float]:
    """Numerically transform an evaluated kernel: int_0^{folds/z} e^{-zt} K(t) dt.

    Cross-check target for the closed forms; the truncated tail beyond
    folds/z is exponentially negligible.  Returns (value, error_estimate).
    """
    if not z > 0.0:
        raise ValueError("transform variable z must be positive")
    if kernel not in ("A", "B"):
        raise ValueError("kernel must be 'A' or 'B'")
    if q is None:
        q = QuadratureConfig()
    grid_eval = eval_A_grid if kernel == "A" else eval_B_grid
    t_max = folds / z

    def fvec(ts):
        order = np.argsort(ts)
        sorted_ts = ts[order]
        vals, _ = grid_eval(p, sorted_ts, q)
        out = np.empty_like(vals)
        out[order] = vals
        return np.exp(-z * ts) * out

    # Geometric breakpoints resolve both the weak t -> 0 singularity in the
    # kernel's higher derivatives and the exponential damping scale 1/z.
    inner = t_max * 1e-6
    n_geo = int(math.ceil(math.log(t_max / inner) / math.log(2.0)))
    breaks = np.concatenate((
        [0.0], inner * 2.0 ** np.arange(n_geo), [t_max],
    ))
    breaks = np.unique(breaks[breaks <= t_max])
    return adaptive_finite(
        fvec, breaks,
        tol_abs=max(10.0 * q.abs_tol, 1e-11),
        tol_rel=max(10.0 * q.rel_tol, 1e-7),
    )
