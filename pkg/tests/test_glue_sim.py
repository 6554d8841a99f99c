"""Tests for the gluing torsion model, exponent fits and the (γ, κ) feasibility region."""

import numpy as np
import pytest

from g2glue.errors import InadmissibleScale, NonPositiveValue
from g2glue.geometry import glue_sim
from g2glue.geometry.glue_sim import (
    Envelope,
    build_envelopes,
    chi_norm_scan,
    cutoff_u,
    equivalence_threshold,
    feasibility_region,
    fit_exponent,
    fit_scan_exponents,
    gamma_bounds,
    geometric_grid,
    is_feasible,
    joyce_gate,
    kappa_at_gamma,
    l2_dominance_violations,
    locate_threshold,
    numeric_gamma_bounds,
    predicted_exponents,
    region_norms,
    total_norms,
)
from g2glue.schemas.params import GlueParams


class TestCutoff:
    """Tests for the neck cut-off u_s."""

    def test_values(self):
        """Test u = 0 at s^γ, 1/2 at 1.5s^γ and 1 at 2s^γ."""
        s, gamma = 1e-3, 0.8
        neck = s**gamma
        assert cutoff_u(neck, s, gamma)[0] == pytest.approx(0.0)
        assert cutoff_u(1.5 * neck, s, gamma)[0] == pytest.approx(0.5)
        assert cutoff_u(2.0 * neck, s, gamma)[0] == pytest.approx(1.0)

    def test_derivative_scales(self):
        """Test du/dr = s^{−γ}u′ with u′(1/2) = 15/8."""
        s, gamma = 1e-3, 0.8
        _, du = cutoff_u(1.5 * s**gamma, s, gamma)
        assert du == pytest.approx(1.875 * s**-gamma)

    def test_array_input(self):
        """Test vectorized evaluation."""
        u, du = cutoff_u(np.array([0.1, 1.0, 10.0]), 0.5, 0.5)
        assert u.shape == du.shape == (3,)

    def test_nonpositive_radius(self):
        """Test that r ≤ 0 is refused."""
        with pytest.raises(ValueError):
            cutoff_u(0.0, 0.1, 0.5)


class TestEnvelopes:
    """Tests for the envelope bounds."""

    def test_power_and_derivatives(self):
        """Test c·r^a and its derivative bound c·r^{a−1}."""
        env = Envelope.power("x", 2.0, coefficient=3.0, end=10.0)
        assert env(2.0) == pytest.approx(12.0)
        assert env(2.0, 1) == pytest.approx(6.0)
        assert env(20.0) == 0.0

    def test_interpolation_data(self, glue_params):
        """Test the exponents μ+1, δ−2 and the s^{−ν′} coefficient on [sR′, ∞)."""
        s = 1e-3
        envs = build_envelopes(glue_params, s)
        assert envs["alpha"](0.1) == pytest.approx(0.1**2.0)
        assert envs["A"](0.1) == pytest.approx(0.1 ** (-1.8))
        assert envs["zeta_s"](1.0) == pytest.approx(s**4)
        assert envs["zeta_s"](s) == 0.0
        assert envs["eta"](0.1) == pytest.approx(1e4)

    def test_inadmissible_scale(self, glue_params):
        """Test that s with sR′ ≥ s^γ raises InadmissibleScale."""
        with pytest.raises(InadmissibleScale) as info:
            build_envelopes(glue_params, 0.5)
        assert info.value.s == 0.5
        with pytest.raises(InadmissibleScale):
            chi_norm_scan(glue_params, [1e-3, 0.5])


class TestRegionNorms:
    """Tests for the region-wise norms of χ_s."""

    def test_report_layout(self, glue_params):
        """Test four regions followed by their total."""
        reports = region_norms(glue_params, 1e-3)
        assert [r.region for r in reports] == [*glue_sim.REGIONS, "total"]

    def test_outer_region_vanishes(self, glue_params):
        """Test that χ_s = 0 on the outer region."""
        outer = region_norms(glue_params, 1e-3)[3]
        assert outer.c0_norm == outer.l2_norm == outer.l14_dstar_norm == 0.0

    def test_compact_region(self, glue_params):
        """Test the s⁴ bound on the compact core."""
        s = 1e-3
        inner = region_norms(glue_params, s)[0]
        assert inner.c0_norm == pytest.approx(s**4)

    def test_totals_are_consistent(self, glue_params):
        """Test sup, root-sum-square and 14-norm combination."""
        reports = region_norms(glue_params, 1e-3)
        again = total_norms(1e-3, reports[:4])
        for norm in ("c0", "l2", "l14"):
            assert again.norm(norm) == pytest.approx(reports[4].norm(norm), rel=1e-12)
        assert reports[4].c0_norm == max(r.c0_norm for r in reports[:4])

    def test_scan_is_sorted(self, glue_params):
        """Test that scan output is ordered by s and then by region."""
        reports = chi_norm_scan(glue_params, [1e-3, 1e-4, 1e-5], workers=2)
        scales = [r.s for r in reports]
        assert scales == sorted(scales)
        assert len(reports) == 15


class TestExponentFits:
    """Tests for the log-log fits."""

    def test_exact_power_law(self):
        """Test that s^{2.5} is fitted with slope 2.5 and zero width."""
        points = [(s, 3.0 * s**2.5) for s in geometric_grid(0.1, 2, 4)]
        fit = fit_exponent(points, "l2")
        assert fit.slope == pytest.approx(2.5)
        assert fit.intercept == pytest.approx(np.log(3.0))
        assert fit.width < 1e-10
        assert fit.points == 9

    def test_nonpositive_value(self):
        """Test that a zero value raises NonPositiveValue."""
        points = [(s, s) for s in geometric_grid(0.1, 2, 4)]
        points[3] = (points[3][0], 0.0)
        with pytest.raises(NonPositiveValue):
            fit_exponent(points)

    def test_too_few_points(self):
        """Test that fewer than eight points are refused."""
        with pytest.raises(ValueError):
            fit_exponent([(0.1, 1.0)] * 7)

    @pytest.mark.parametrize(
        "params,expected",
        [
            ((1.0, -4.0, 0.2, 0.8), (0.76, 3.56, 0.36)),
            ((0.5, -4.0, 0.1, 0.9), (0.39, 3.54, -0.06)),
            ((2.0, -4.0, 0.3, 0.7), (1.11, 3.56, 0.76)),
        ],
    )
    def test_predicted_exponents(self, params, expected):
        """Test the closed-form exponents of the reference parameter sets."""
        mu, nu, delta, gamma = params
        p = GlueParams(mu=mu, nu_prime=nu, delta=delta, gamma=gamma)
        predicted = predicted_exponents(p)
        assert (predicted["c0"], predicted["l2"], predicted["l14"]) == pytest.approx(expected)

    @pytest.mark.parametrize("norm", ["c0", "l2", "l14"])
    def test_fitted_slopes_match(self, glue_params, norm):
        """Test that fitted slopes agree with the predictions within 0.05."""
        fit = fit_scan_exponents(glue_params, norm)
        assert fit.slope == pytest.approx(predicted_exponents(glue_params)[norm], abs=0.05)

    @pytest.mark.parametrize("delta,expected,absorbed", [(0.1, 3.48, True), (0.5, 3.6, False)])
    def test_absorption_branches(self, delta, expected, absorbed):
        """Test the L² exponent on both sides of δ = (1−γ)/γ."""
        p = GlueParams(mu=2.0, delta=delta, gamma=0.8)
        assert p.delta_absorbed is absorbed
        assert predicted_exponents(p)["l2"] == pytest.approx(expected)
        assert fit_scan_exponents(p, "l2").slope == pytest.approx(expected, abs=0.05)


class TestFeasibility:
    """Tests for the (γ, κ) region."""

    def test_reference_region(self):
        """Test κ_max = 0.2 and κ_sup = 1/12 for (μ, ν′, δ) = (1, −4, 0.2)."""
        region = feasibility_region(1.0, -4.0, 0.2, samples=11)
        assert not region.empty
        assert region.kappa_max == pytest.approx(0.2)
        assert region.kappa_sup == pytest.approx(1.0 / 12.0)
        assert len(region.table) == 11
        assert all(0 < g < 1 for row in region.table for g in row[1:])

    def test_critical_nu_prime_is_empty(self):
        """Test that ν′ = −7/2 leaves no feasible pair."""
        region = feasibility_region(1.0, -3.5, 0.2)
        assert region.empty
        assert region.table == []

    def test_small_kappa_limit(self):
        """Test the κ → 0 limits 7/(7+2μ), 1 and 1/(1+2δ)."""
        g_mu, g_nu, g_delta = gamma_bounds(1.0, -4.0, 0.2, 1e-12)
        assert g_mu == pytest.approx(3.5 / 4.5)
        assert g_nu == pytest.approx(1.0)
        assert g_delta == pytest.approx(1.0 / 1.4)

    @pytest.mark.parametrize("kappa", [0.01, 0.05, 0.08])
    def test_closed_form_matches_root_finding(self, kappa):
        """Test the closed-form γ-bounds against brentq roots."""
        closed = gamma_bounds(1.0, -4.0, 0.2, kappa)
        numeric = numeric_gamma_bounds(1.0, -4.0, 0.2, kappa)
        assert closed == pytest.approx(numeric, abs=1e-9)

    def test_nonempty_exactly_below_supremum(self):
        """Test that some γ is feasible just below κ_sup and none just above."""
        sup = feasibility_region(1.0, -4.0, 0.2).kappa_sup
        gammas = np.linspace(0.5, 0.999, 2000)
        assert any(is_feasible(1.0, -4.0, 0.2, g, 0.99 * sup) for g in gammas)
        assert not any(is_feasible(1.0, -4.0, 0.2, g, 1.01 * sup) for g in gammas)

    def test_l2_dominates(self):
        """Test that the L² inequalities imply the C⁰ and L¹⁴ ones on a grid."""
        gammas = np.linspace(0.01, 0.99, 50)
        kappas = np.linspace(0.001, 0.2, 50)
        assert l2_dominance_violations(1.0, -4.0, 0.2, gammas, kappas) == 0

    def test_kappa_at_gamma(self):
        """Test the largest κ at γ = 0.8 for the reference rates."""
        assert kappa_at_gamma(1.0, -4.0, 0.2, 0.8) == pytest.approx(0.06)


class TestJoyceGate:
    """Tests for the hypotheses of the perturbation theorem."""

    def test_outer_region_dominates(self, glue_params):
        """Test that the outer region sets both the injectivity radius and the curvature."""
        verdict = joyce_gate(glue_params.model_copy(update={"kappa": 0.03}), 1e-4)
        assert verdict.injectivity_dominant == "outer"
        assert verdict.curvature_dominant == "outer"
        assert verdict.injectivity_ok and verdict.curvature_ok

    def test_threshold_and_verdicts(self, glue_params):
        """Test that every torsion bound holds below the located s₀."""
        s0 = locate_threshold(glue_params, 0.03)
        params = glue_params.model_copy(update={"kappa": 0.03})
        for s in s0 * np.geomspace(1e-3, 1.0, 7):
            assert joyce_gate(params, float(s)).passed

    def test_equivalence_threshold(self, glue_params):
        """Test that x = s^{1−γ}/2 solves x³ + x⁴ = e at the threshold."""
        s = equivalence_threshold(glue_params, 0.5)
        x = s ** (1.0 - glue_params.gamma) / 2.0
        assert x**3 + x**4 == pytest.approx(0.5)
        with pytest.raises(ValueError):
            equivalence_threshold(glue_params, 0.0)
