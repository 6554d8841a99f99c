"""Tests for invariant forms on 6-dimensional links."""

import numpy as np
import pytest

from g2glue.errors import ConfigParse, JacobiViolation, MetricNotPositive, NoSolution
from g2glue.geometry.exterior import random_form
from g2glue.geometry.link_algebra import (
    InvariantForm,
    betti_numbers,
    betti_one_vanishes,
    exterior_d,
    hodge_decompose,
    invariant_spectrum,
    jacobi_defect,
    link_laplacian,
    link_star,
    load_link,
    make_algebra,
    nk_residuals,
    planted_complex,
    solve_nk,
)


class TestLoadLink:
    """Tests for presets and link files."""

    def test_s3xs3_preset(self, s3xs3):
        """Test that the S³×S³ preset satisfies Jacobi and d∘d = 0."""
        assert jacobi_defect(s3xs3.constants) < 1e-12
        cx = s3xs3.complex
        for k in range(5):
            assert np.allclose(cx.d(k + 1) @ cx.d(k), 0.0, atol=1e-12)

    def test_abelian_preset_has_zero_differential(self):
        """Test that the flat preset has d = 0 in every degree."""
        alg = load_link("abelian6")
        assert all(np.count_nonzero(alg.complex.d(k)) == 0 for k in range(7))
        assert betti_numbers(alg) == [1, 6, 15, 20, 15, 6, 1]

    def test_star_squares_to_sign(self, s3xs3, rng):
        """Test ** = (−1)^k on the 6-dimensional link."""
        for k in range(7):
            w = random_form(rng, k, dim=6)
            twice = link_star(s3xs3, link_star(s3xs3, w))
            assert np.allclose(twice.coeffs, (-1) ** k * w.coeffs, atol=1e-10)

    def test_missing_file(self, tmp_path):
        """Test that an unreadable path raises ConfigParse."""
        with pytest.raises(ConfigParse):
            load_link(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path):
        """Test that malformed JSON raises ConfigParse."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigParse):
            load_link(path)

    def test_wrong_dimension(self, tmp_path):
        """Test that a non-6-dimensional link file fails validation."""
        path = tmp_path / "five.json"
        path.write_text('{"name": "five", "dimension": 5, "metric": []}')
        with pytest.raises(ConfigParse):
            load_link(path)


class TestMakeAlgebra:
    """Tests for structure-constant and metric validation."""

    def test_jacobi_violation(self, rng):
        """Test that generic antisymmetric constants fail Jacobi."""
        c = rng.standard_normal((6, 6, 6))
        c = c - c.transpose(0, 2, 1)
        with pytest.raises(JacobiViolation):
            make_algebra(c, np.eye(6))

    def test_asymmetric_constants(self):
        """Test that constants not antisymmetric in the lower indices are refused."""
        c = np.zeros((6, 6, 6))
        c[0, 1, 2] = 1.0
        with pytest.raises(JacobiViolation):
            make_algebra(c, np.eye(6))

    def test_indefinite_metric(self):
        """Test that an indefinite metric raises MetricNotPositive."""
        metric = np.eye(6)
        metric[0, 0] = -1.0
        with pytest.raises(MetricNotPositive):
            make_algebra(np.zeros((6, 6, 6)), metric)


class TestSpectrum:
    """Tests for the invariant Laplace spectrum and Hodge decomposition."""

    def test_planted_eigenvalue(self):
        """Test that a planted complex reports exactly the planted eigenvalue."""
        blocks = invariant_spectrum(planted_complex(7.0, 1), 1)
        assert [(round(b.eigenvalue, 10), b.multiplicity) for b in blocks] == [(0.0, 5), (7.0, 1)]
        functions = invariant_spectrum(planted_complex(7.0, 1), 0)
        assert functions[0].eigenvalue == pytest.approx(7.0)

    def test_planted_degree_range(self):
        """Test that planting outside degrees 1..6 raises."""
        with pytest.raises(ValueError):
            planted_complex(7.0, 0)

    def test_eigenbasis_solves_eigen_equation(self, nk):
        """Test that each block's basis solves Δβ = λβ."""
        link = nk.link
        for block in invariant_spectrum(link, 2):
            for beta in block.basis:
                assert link_laplacian(link, beta).allclose(beta * block.eigenvalue, atol=1e-9)

    def test_lie_algebra_cohomology(self, nk):
        """Test the invariant Betti numbers 1, 0, 0, 2, 0, 0, 1 of su(2) ⊕ su(2)."""
        assert betti_numbers(nk.link) == [1, 0, 0, 2, 0, 0, 1]
        assert betti_one_vanishes(nk)

    def test_hodge_decomposition(self, s3xs3, rng):
        """Test that exact, coexact and harmonic parts add up and the harmonic part is closed."""
        w = InvariantForm(3, random_form(rng, 3, dim=6).coeffs)
        exact, coexact, harmonic = hodge_decompose(s3xs3, w)
        assert (exact + coexact + harmonic).allclose(w, atol=1e-10)
        assert exterior_d(s3xs3, harmonic).norm() < 1e-9
        assert exterior_d(s3xs3, exact).norm() < 1e-9


class TestNearlyKahler:
    """Tests for the nearly Kähler solve."""

    def test_s3xs3_solution(self, nk):
        """Test that every structure equation holds to 1e-10."""
        residuals = nk_residuals(nk.link, nk.omega, nk.re_omega3, nk.im_omega3)
        assert max(residuals.values()) < 1e-10

    def test_d_omega_squared(self, nk):
        """Test d(ω²) = −6 ReΩ∧ω on the solved structure."""
        lhs = exterior_d(nk.link, nk.omega.wedge(nk.omega))
        rhs = nk.re_omega3.wedge(nk.omega) * -6.0
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-10
        residuals = nk_residuals(nk.link, nk.omega, nk.re_omega3, nk.im_omega3)
        assert residuals["d_omega2_plus_6_re_omega"] < 1e-10

    def test_solution_is_deterministic(self, s3xs3, nk):
        """Test that the same seed reproduces the same ω."""
        again = solve_nk(s3xs3, seed=42)
        assert again.omega.allclose(nk.omega, atol=1e-12)

    def test_abelian_has_no_solution(self):
        """Test that the flat torus admits no nearly Kähler structure."""
        with pytest.raises(NoSolution):
            solve_nk(load_link("abelian6"), starts=5)
