import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frstokes._accel import BACKEND, l1_scalar_solve, l1_scalar_solve_numpy
from frstokes.kernel import KernelParams, eval_A
from frstokes.oracle import (
    L1Grid,
    caputo_l1,
    caputo_l1_trace,
    l1_weights,
    richardson_extrapolate,
    solve_scalar,
)


class TestWeights:
    @given(st.floats(0.05, 0.95), st.integers(1, 400))
    @settings(max_examples=50, deadline=None)
    def test_positive_decreasing_telescoping(self, rho, n):
        b = l1_weights(rho, n)
        assert b[0] == 1.0
        assert np.all(b > 0.0)
        assert np.all(np.diff(b) < 0.0)
        # telescoping sum collapses exactly
        assert np.sum(b) == pytest.approx(n ** (1.0 - rho), rel=1e-12)

    def test_grid_carries_weights(self):
        grid = L1Grid(0.1, 10, 0.5)
        assert grid.weights.shape == (10,)
        assert grid.times[-1] == pytest.approx(1.0)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            L1Grid(0.0, 10, 0.5)
        with pytest.raises(ValueError):
            L1Grid(0.1, 0, 0.5)
        with pytest.raises(ValueError):
            l1_weights(1.0, 5)


class TestCaputo:
    def test_constant_history_gives_zero(self):
        grid = L1Grid(0.01, 100, 0.5)
        assert caputo_l1(np.ones(101), 0.5, grid) == 0.0

    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.9])
    def test_exact_on_affine(self, rho):
        # the rule integrates piecewise-linear histories exactly:
        # for y = t the value is t^(1-rho)/Gamma(2-rho) at any step
        for n in (4, 57):
            grid = L1Grid(1.0 / n, n, rho)
            t = grid.times
            approx = caputo_l1(t, rho, grid)
            exact = t[-1] ** (1.0 - rho) / math.gamma(2.0 - rho)
            assert approx == pytest.approx(exact, rel=1e-12)

    def test_quadratic_value(self):
        # Caputo derivative of t^2 at t=1, rho=1/2: 2 / Gamma(2.5)
        rho, n = 0.5, 4000
        grid = L1Grid(1.0 / n, n, rho)
        approx = caputo_l1(grid.times ** 2, rho, grid)
        assert approx == pytest.approx(1.5045055561273501, abs=5e-6)

    def test_empty_history_rejected(self):
        grid = L1Grid(0.1, 10, 0.5)
        with pytest.raises(ValueError):
            caputo_l1([1.0], 0.5, grid)

    def test_trace_variant_matches_uniform_rule(self):
        rho, n = 0.7, 50
        grid = L1Grid(1.0 / n, n, rho)
        y = np.sin(grid.times)
        from_trace = caputo_l1_trace(grid.times, y, rho)
        assert from_trace[-1] == pytest.approx(caputo_l1(y, rho, grid), rel=1e-12)
        assert from_trace[0] == 0.0

    def test_trace_variant_multicolumn(self):
        t = np.array([0.0, 0.1, 0.35, 0.6, 1.0])  # nonuniform
        cols = np.column_stack([t, t ** 2])
        out = caputo_l1_trace(t, cols, 0.5)
        single0 = caputo_l1_trace(t, t, 0.5)
        assert out[:, 0] == pytest.approx(single0, rel=1e-13)
        # exact for the affine column even on a nonuniform grid
        exact = t ** 0.5 / math.gamma(1.5)
        assert out[:, 0] == pytest.approx(exact, rel=1e-12)


class TestSolveScalar:
    def test_zero_data_zero_source(self):
        grid = L1Grid(1e-2, 100, 0.5)
        y = solve_scalar(1.0, 1.0, 0.5, 0.0, None, grid)
        assert np.all(y == 0.0)

    def test_positive_nonincreasing_relaxation(self):
        for rho, gamma, lam in ((0.3, 0.5, 1.0), (0.9, 2.0, 10.0)):
            grid = L1Grid(1e-3, 1000, rho)
            y = solve_scalar(lam, gamma, rho, 1.0, None, grid)
            assert np.all(y > 0.0)
            assert np.all(np.diff(y) <= 0.0)

    def test_manufactured_quadratic_source(self):
        # f chosen so that y(t) = t^2 solves the mode problem with y(0) = 0
        rho, gamma, lam = 0.5, 1.0, 2.0
        coef = 2.0 * gamma / math.gamma(3.0 - rho)

        def forcing(t):
            return 2.0 * t + lam * t ** 2 + lam * coef * t ** (2.0 - rho)

        grid = L1Grid(1e-3, 1000, rho)
        y = solve_scalar(lam, gamma, rho, 0.0, forcing, grid)
        assert y[-1] == pytest.approx(1.0, abs=2e-3)
        finer = L1Grid(1e-4, 10000, rho)
        y2 = solve_scalar(lam, gamma, rho, 0.0, forcing, finer)
        assert abs(y2[-1] - 1.0) < 0.3 * abs(y[-1] - 1.0)

    def test_cross_validates_quadrature_kernel(self):
        p = KernelParams(0.5, 1.0, 1.0)
        grid = L1Grid(1e-4, 10000, p.rho)
        y = solve_scalar(p.lam, p.gamma, p.rho, 1.0, None, grid)
        assert y[-1] == pytest.approx(eval_A(p, 1.0), abs=2e-5)

    def test_classical_limit(self):
        grid = L1Grid(1e-3, 1000, 0.999)
        y = solve_scalar(2.0, 1.0, 0.999, 1.0, None, grid)
        assert y[-1] == pytest.approx(math.exp(-2.0 / 3.0), abs=1e-2)

    def test_history_term_matches_caputo_rule(self):
        # the marching scheme must discretize the memory exactly as the
        # standalone rule does: residual of the update equation is zero
        rho, gamma, lam = 0.4, 1.5, 3.0
        grid = L1Grid(0.05, 20, rho)
        y = solve_scalar(lam, gamma, rho, 1.0, None, grid)
        for n in (1, 7, 20):
            ydot = (y[n] - y[n - 1]) / grid.step
            frac = caputo_l1(y[: n + 1], rho, grid)
            assert ydot + lam * (y[n] + gamma * frac) == pytest.approx(0.0, abs=1e-10)

    def test_backend_paths_agree(self):
        fvals = np.sin(np.linspace(0.0, 1.0, 201))
        a = l1_scalar_solve(2.0, 0.7, 0.6, 1.0, fvals, 1.0 / 200)
        b = l1_scalar_solve_numpy(2.0, 0.7, 0.6, 1.0, fvals, 1.0 / 200)
        assert a == pytest.approx(b, rel=1e-14)
        assert BACKEND in ("numba", "numpy")

    def test_invalid_arguments(self):
        grid = L1Grid(0.1, 10, 0.5)
        with pytest.raises(ValueError):
            solve_scalar(-1.0, 1.0, 0.5, 1.0, None, grid)
        with pytest.raises(ValueError):
            solve_scalar(1.0, 1.0, 0.5, 1.0, np.zeros(5), grid)


class TestRichardson:
    def test_identical_inputs_pass_through(self):
        result = richardson_extrapolate([0.7, 0.7])
        assert result.value == 0.7
        assert not result.order_reliable

    def test_first_order_sequence(self):
        # v(h) = 1 + h: halving gives order 1 exactly
        values = [1.0 + h for h in (0.2, 0.1, 0.05)]
        result = richardson_extrapolate(values)
        assert result.observed_order == pytest.approx(1.0, abs=1e-12)
        assert result.order_reliable
        assert result.value == pytest.approx(1.0, abs=1e-12)

    def test_sign_flip_is_flagged(self):
        result = richardson_extrapolate([1.1, 0.9, 1.01])
        assert not result.order_reliable

    def test_oracle_sequence_improves_on_kernel_target(self):
        p = KernelParams(0.5, 1.0, 1.0)
        values = []
        for dt in (4e-4, 2e-4, 1e-4):
            grid = L1Grid(dt, round(1.0 / dt), p.rho)
            values.append(float(solve_scalar(p.lam, p.gamma, p.rho, 1.0, None,
                                             grid)[-1]))
        result = richardson_extrapolate(values)
        target = eval_A(p, 1.0)
        assert result.observed_order is not None and result.observed_order > 0.9
        assert abs(result.value - target) < 0.2 * abs(values[-1] - target)

    def test_needs_two_values(self):
        with pytest.raises(ValueError):
            richardson_extrapolate([1.0])
