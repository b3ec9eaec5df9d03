"""Independent finite-difference solver for the scalar mode problem.

Discretizes y' + lam * (1 + gamma * D_t^rho) y = f with implicit Euler for
the classical derivative and the L1 rule for the Caputo derivative.  The L1
weights are elementary, exactly checkable through a telescoping identity,
and the dense history is kept deliberately (O(n^2) total work): this module
is the ground truth the quadrature kernels are validated against, so its
own trustworthiness outranks its order of accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._accel import l1_scalar_solve

__all__ = [
    "L1Grid",
    "l1_weights",
    "caputo_l1",
    "caputo_l1_trace",
    "solve_scalar",
    "richardson_extrapolate",
    "RichardsonResult",
]


def l1_weights(rho: float, n: int) -> np.ndarray:
    """L1 coefficients b_j = (j+1)^(1-rho) - j^(1-rho), j = 0..n-1.

    Positive, strictly decreasing, b_0 = 1, and telescoping:
    sum_{j<n} b_j = n^(1-rho).
    """
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie strictly inside (0, 1)")
    if n < 1:
        raise ValueError("need at least one weight")
    j = np.arange(n, dtype=np.float64)
    return (j + 1.0) ** (1.0 - rho) - j ** (1.0 - rho)


@dataclass(frozen=True)
class L1Grid:
    """Uniform time grid with precomputed L1 weights for a fixed order."""

    step: float
    count: int
    rho: float
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        object.__setattr__(self, "weights", l1_weights(self.rho, self.count))

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(self.count + 1)


def caputo_l1(history: Sequence[float] | np.ndarray, rho: float,
              grid: L1Grid) -> float:
    """L1 approximation of the Caputo derivative at the last history node.

    history holds y_0 .. y_n on the grid; the rule is exact for affine y.
    """
    values = np.asarray(history, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("history must hold at least two values")
    n = values.size - 1
    if n > grid.count:
        raise ValueError("history longer than the grid")
    diffs = values[1:] - values[:-1]
    # sum_j b_j (y_{n-j} - y_{n-j-1}) pairs weight j with the diff ending at n-j
    acc = float(np.dot(grid.weights[:n], diffs[::-1]))
    return grid.step ** (-rho) / math.gamma(2.0 - rho) * acc


def caputo_l1_trace(times: np.ndarray, values: np.ndarray,
                    rho: float) -> np.ndarray:
    """Caputo derivative of a sampled trace at every node, nonuniform L1.

    Uses the exact fractional integral of the piecewise-linear interpolant,
    which reduces to the classical L1 weights on uniform grids.  ``values``
    may be (n,) or (n, m) for m simultaneous modes; node 0 gets zero.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0.0):
        raise ValueError("times must be strictly increasing, length >= 2")
    if v.shape[0] != t.size:
        raise ValueError("values and times disagree in length")
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie strictly inside (0, 1)")
    h = np.diff(t)
    slopes = (v[1:] - v[:-1]) / (h[:, None] if v.ndim == 2 else h)
    # w[i, j] = ((t_i - t_j)^(1-rho) - (t_i - t_{j+1})^(1-rho)) for j < i
    dt_lo = t[:, None] - t[None, :-1]
    dt_hi = t[:, None] - t[None, 1:]
    mask = dt_hi >= 0.0  # cell j contributes at node i only when j + 1 <= i
    w = np.where(mask, np.abs(dt_lo) ** (1.0 - rho)
                 - np.abs(dt_hi) ** (1.0 - rho), 0.0)
    out = w @ slopes
    return out / math.gamma(2.0 - rho)


def solve_scalar(lam: float, gamma: float, rho: float, y0: float,
                 f: Callable[[np.ndarray], np.ndarray] | Sequence[float] | None,
                 grid: L1Grid) -> np.ndarray:
    """March the implicit one-step update over the grid; returns y_0 .. y_n.

    Each step solves
        (1/dt + lam + lam*gamma*c) y_i = f(t_i) + y_{i-1}/dt
                                         + lam*gamma*c*(y_{i-1} - H_i)
    with c = dt^(-rho)/Gamma(2-rho) and H_i the weighted older differences,
    which is implicit Euler with the L1 Caputo history evaluated at t_i.
    """
    if lam <= 0.0 or gamma <= 0.0:
        raise ValueError("lam and gamma must be positive")
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie strictly inside (0, 1)")
    n = grid.count
    if f is None:
        fvals = np.zeros(n + 1)
    elif callable(f):
        fvals = np.asarray(f(grid.times), dtype=float)
        if fvals.shape != (n + 1,):
            raise ValueError("source callable must be vectorized over the grid")
    else:
        fvals = np.asarray(f, dtype=float)
        if fvals.shape != (n + 1,):
            raise ValueError("sampled source must cover all grid nodes")
    return l1_scalar_solve(float(lam), float(gamma), float(rho), float(y0),
                           fvals, float(grid.step))


class RichardsonResult(NamedTuple):
    value: float
    observed_order: float | None
    order_reliable: bool


def richardson_extrapolate(values: Sequence[float],
                           assumed_order: float = 1.0) -> RichardsonResult:
    """Extrapolate a quantity computed at successively halved steps.

    ``values[k]`` is the result at step dt / 2^k.  With three or more
    entries the convergence order is observed from the last difference
    ratio; with two it falls back to ``assumed_order``.  The order estimate
    is flagged unreliable when consecutive differences disagree in sign
    (non-monotone approach) or vanish.
    """
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ValueError("need results at two or more steps")
    d_last = vals[-1] - vals[-2]
    if d_last == 0.0:
        return RichardsonResult(vals[-1], None, False)
    observed = None
    reliable = False
    if len(vals) >= 3:
        d_prev = vals[-2] - vals[-3]
        if d_prev != 0.0 and (d_prev > 0.0) == (d_last > 0.0):
            ratio = d_prev / d_last
            if ratio > 1.0:
                observed = math.log2(ratio)
                reliable = True
    order = observed if reliable else assumed_order
    factor = 2.0 ** order
    improved = (factor * vals[-1] - vals[-2]) / (factor - 1.0)
    return RichardsonResult(improved, observed, reliable)
