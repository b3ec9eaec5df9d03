import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frstokes.spectral import (
    AliasingWarning,
    apply_A,
    basis_field,
    dirichlet_laplacian_1d,
    explicit_spectrum,
    field_from_coefficients,
    load_field_csv,
    norm_tau,
    project,
    synthesize,
    tail_indicator,
)


@pytest.fixture
def op_pi():
    return dirichlet_laplacian_1d(math.pi, 5)


class TestOperators:
    def test_unit_interval_eigenvalues(self):
        op = dirichlet_laplacian_1d(math.pi, 3)
        assert op.eigenvalues == pytest.approx([1.0, 4.0, 9.0])
        assert dirichlet_laplacian_1d(1.0, 1).eigenvalues[0] == pytest.approx(
            math.pi ** 2
        )

    def test_orthonormality_on_fine_grid(self, op_pi):
        x = np.linspace(0.0, math.pi, 2048)
        v1 = op_pi.eigenfunction(1, x)
        v2 = op_pi.eigenfunction(2, x)
        assert np.trapezoid(v1 * v2, x) == pytest.approx(0.0, abs=1e-10)
        assert np.trapezoid(v1 * v1, x) == pytest.approx(1.0, abs=1e-6)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            dirichlet_laplacian_1d(0.0, 3)
        with pytest.raises(ValueError):
            dirichlet_laplacian_1d(1.0, 0)
        with pytest.raises(ValueError):
            explicit_spectrum([2.0, 1.0])
        with pytest.raises(ValueError):
            explicit_spectrum([0.0, 1.0])

    def test_explicit_spectrum_has_no_eigenfunctions(self):
        op = explicit_spectrum([1.0, 2.0])
        assert not op.has_eigenfunctions
        with pytest.raises(ValueError):
            op.eigenfunction(1, np.array([0.5]))


class TestProjection:
    def test_pure_eigenfunction_projects_to_unit_vector(self, op_pi):
        x = np.linspace(0.0, math.pi, 4096)
        field = project(x, op_pi.eigenfunction(2, x), op_pi)
        expected = np.zeros(5)
        expected[1] = 1.0
        assert field.coefficients == pytest.approx(expected, abs=1e-8)

    def test_zero_samples(self, op_pi):
        x = np.linspace(0.0, math.pi, 512)
        field = project(x, np.zeros_like(x), op_pi)
        assert np.all(field.coefficients == 0.0)

    def test_parabola_coefficients_match_quadrature_oracle(self):
        # h(x) = x (pi - x): even modes vanish by symmetry, odd modes decay
        # like k^-3; compare with a brute-force sine-series quadrature
        op = dirichlet_laplacian_1d(math.pi, 6)
        x = np.linspace(0.0, math.pi, 8192)
        h = x * (math.pi - x)
        field = project(x, h, op)
        for k in (2, 4, 6):
            assert abs(field.coefficients[k - 1]) < 1e-10
        for k in (1, 3, 5):
            oracle = np.trapezoid(h * np.sqrt(2 / math.pi) * np.sin(k * x), x)
            assert field.coefficients[k - 1] == pytest.approx(oracle, rel=1e-12)
            assert field.coefficients[k - 1] == pytest.approx(
                4.0 * math.sqrt(2.0 / math.pi) / k ** 3, rel=1e-5
            )

    def test_aliasing_warning(self):
        op = dirichlet_laplacian_1d(math.pi, 16)
        x = np.linspace(0.0, math.pi, 33)  # 4 points per shortest wavelength
        with pytest.warns(AliasingWarning):
            project(x, np.sin(x), op)

    def test_round_trip(self, op_pi):
        rng = np.random.default_rng(7)
        field = field_from_coefficients(op_pi, rng.normal(size=5))
        x = np.linspace(0.0, math.pi, 4096)
        back = project(x, synthesize(field, x), op_pi)
        assert back.coefficients == pytest.approx(field.coefficients, abs=1e-8)

    def test_synthesize_basis_and_zero(self, op_pi):
        x = np.linspace(0.0, math.pi, 100)
        e1 = basis_field(op_pi, 1)
        assert synthesize(e1, x) == pytest.approx(op_pi.eigenfunction(1, x))
        zero = field_from_coefficients(op_pi, np.zeros(5))
        assert np.all(synthesize(zero, x) == 0.0)

    def test_parseval_for_band_limited_samples(self, op_pi):
        rng = np.random.default_rng(11)
        field = field_from_coefficients(op_pi, rng.normal(size=5))
        x = np.linspace(0.0, math.pi, 8192)
        u = synthesize(field, x)
        grid_norm = math.sqrt(np.trapezoid(u * u, x))
        assert grid_norm == pytest.approx(norm_tau(field, 0.0), rel=1e-7)


class TestHilbertScale:
    def test_single_mode_norm(self):
        op = explicit_spectrum([4.0, 9.0])
        e1 = basis_field(op, 1)
        assert norm_tau(e1, 1.0) == pytest.approx(4.0)
        assert norm_tau(field_from_coefficients(op, [3.0, 4.0]), 0.0) == pytest.approx(5.0)

    def test_embedding_inequality(self):
        op = explicit_spectrum([2.0, 5.0, 11.0])
        rng = np.random.default_rng(3)
        for _ in range(20):
            h = field_from_coefficients(op, rng.normal(size=3))
            assert norm_tau(h, 0.0) <= norm_tau(h, 1.0) / op.eigenvalues[0] + 1e-12

    def test_apply_identity_and_single_mode(self):
        op = explicit_spectrum([1.0, 4.0])
        h = field_from_coefficients(op, [2.0, -3.0])
        assert apply_A(h, 0.0).coefficients == pytest.approx(h.coefficients)
        e2 = basis_field(op, 2)
        assert apply_A(e2, 0.5).coefficients == pytest.approx([0.0, 2.0])

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_semigroup_property(self, a, b):
        op = explicit_spectrum([1.0, 3.0, 7.5])
        rng = np.random.default_rng(5)
        h = field_from_coefficients(op, rng.normal(size=3))
        once = apply_A(apply_A(h, a), b)
        direct = apply_A(h, a + b)
        assert once.coefficients == pytest.approx(direct.coefficients, rel=1e-12)

    def test_norm_shift_identity(self):
        op = explicit_spectrum([1.5, 2.0, 4.0])
        h = field_from_coefficients(op, [1.0, -2.0, 0.5])
        assert norm_tau(apply_A(h, 0.3), 0.7) == pytest.approx(
            norm_tau(h, 1.0), rel=1e-12
        )

    def test_tail_indicator(self):
        op = explicit_spectrum([1.0, 10.0])
        h = field_from_coefficients(op, [5.0, 0.25])
        assert tail_indicator(h) == pytest.approx((10.0 * 0.25) ** 2)

    def test_length_mismatch_rejected(self):
        op = explicit_spectrum([1.0, 2.0])
        with pytest.raises(ValueError):
            field_from_coefficients(op, [1.0])


class TestCsvIngestion:
    def test_coefficient_rows(self, tmp_path):
        op = explicit_spectrum([1.0, 2.0, 3.0])
        path = tmp_path / "coeffs.csv"
        path.write_text("k,coefficient\n1,0.5\n3,-2.0\n")
        field = load_field_csv(path, op)
        assert field.coefficients == pytest.approx([0.5, 0.0, -2.0])

    def test_grid_samples(self, tmp_path):
        op = dirichlet_laplacian_1d(math.pi, 3)
        x = np.linspace(0.0, math.pi, 2048)
        samples = op.eigenfunction(1, x)
        lines = ["x,value"] + [f"{xi:.17g},{vi:.17g}" for xi, vi in zip(x, samples)]
        path = tmp_path / "samples.csv"
        path.write_text("\n".join(lines) + "\n")
        field = load_field_csv(path, op)
        assert field.coefficients == pytest.approx([1.0, 0.0, 0.0], abs=1e-6)

    def test_bad_header(self, tmp_path):
        op = explicit_spectrum([1.0])
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            load_field_csv(path, op)

    def test_mode_out_of_range(self, tmp_path):
        op = explicit_spectrum([1.0])
        path = tmp_path / "oob.csv"
        path.write_text("k,coefficient\n2,1.0\n")
        with pytest.raises(ValueError):
            load_field_csv(path, op)
