"""Tests for critical rates of homogeneous forms on the cone."""

from math import sqrt

import numpy as np
import pytest

from g2glue.errors import EndpointCritical
from g2glue.geometry.cone_calculus import ConeForm, ConeTerm, cone_dirac, cone_laplacian
from g2glue.geometry.link_algebra import harmonic_representatives, planted_complex
from g2glue.geometry.rate_analysis import (
    RatePencil,
    assemble_closed_coclosed_pencil,
    assemble_dirac_pencil,
    assemble_laplacian_pencil,
    check_type27,
    critical_rates,
    eigenvalue_identity_check,
    excluded_interval,
    excluded_range_report,
    log_chain_check,
    order_minus_k_classification,
    probe_log_chain,
)


def _scalar_pencil(*coefficients: float) -> RatePencil:
    """1×1 pencil Σ cᵢλ^i on an otherwise unused complex."""
    coeffs = tuple(np.array([[c]]) for c in coefficients)
    return RatePencil("scalar", coeffs, (), (), 0, planted_complex())


class TestExcludedInterval:
    """Tests for the claimed kernel-free intervals."""

    @pytest.mark.parametrize(
        "k,expected", [(0, (-5.0, 0.0)), (1, (-4.0, -1.0)), (2, (-3.0, -2.0)), (6, (-4.0, -1.0))]
    )
    def test_laplacian(self, k, expected):
        """Test the Δ intervals by min(k, 7 − k)."""
        assert excluded_interval("laplacian", k) == expected

    def test_laplacian_middle_degrees(self):
        """Test that no interval is claimed for Δ on 3-forms."""
        with pytest.raises(ValueError):
            excluded_interval("laplacian", 3)

    @pytest.mark.parametrize("k,expected", [(0, (-7.0, 0.0)), (3, (-4.0, -3.0)), (5, (-5.0, -2.0))])
    def test_closed_coclosed(self, k, expected):
        """Test the closed and coclosed interval between −k and k − 7."""
        assert excluded_interval("closed_coclosed", k) == expected

    def test_unknown_operator(self):
        """Test that an unknown operator name raises."""
        with pytest.raises(ValueError):
            excluded_interval("dirac", 2)


class TestPencils:
    """Tests for pencil assembly against the cone operators."""

    def test_dirac_pencil_matches_cone_operator(self, cone, rng):
        """Test M(λ)x = (d + d*)(unstack x) for a random even form."""
        lam = -2.3
        pencil = assemble_dirac_pencil(cone.link, "even")
        x = rng.standard_normal(pencil.shape[1])
        form = pencil.unstack(x, lam)
        image = pencil.stack_output(cone_dirac(cone.link, form), lam - 1)
        assert np.allclose(pencil(lam) @ x, image, atol=1e-9)

    @pytest.mark.parametrize("parity", ["even", "odd"])
    def test_dirac_pencils_match_on_random_samples(self, cone, rng, parity):
        """Test M(λ)x = (d + d*)(unstack x) on 100 random (λ, x) pairs."""
        pencil = assemble_dirac_pencil(cone.link, parity)
        for _ in range(100):
            lam = rng.uniform(-8.0, 2.0)
            x = rng.standard_normal(pencil.shape[1])
            image = pencil.stack_output(cone_dirac(cone.link, pencil.unstack(x, lam)), lam - 1)
            assert np.allclose(pencil(lam) @ x, image, atol=1e-9)

    @pytest.mark.parametrize("k", range(8))
    def test_closed_coclosed_pencil_matches(self, cone, rng, k):
        """Test the degree-k closed and coclosed pencil against d + d* on the cone."""
        pencil = assemble_closed_coclosed_pencil(cone.link, k)
        for _ in range(25):
            lam = rng.uniform(-8.0, 2.0)
            x = rng.standard_normal(pencil.shape[1])
            image = pencil.stack_output(cone_dirac(cone.link, pencil.unstack(x, lam)), lam - 1)
            assert np.allclose(pencil(lam) @ x, image, atol=1e-9)

    @pytest.mark.parametrize("k", range(8))
    def test_laplacian_pencil_matches(self, cone, rng, k):
        """Test the degree-k Laplacian pencil against the closed-form Δ_C."""
        pencil = assemble_laplacian_pencil(cone.link, k)
        for _ in range(25):
            lam = rng.uniform(-8.0, 2.0)
            x = rng.standard_normal(pencil.shape[1])
            form = pencil.unstack(x, lam)
            image = pencil.stack_output(cone_laplacian(cone.link, form), lam - 2)
            assert np.allclose(pencil(lam) @ x, image, atol=1e-8)

    def test_parity_validated(self, cone):
        """Test that an unknown parity raises."""
        with pytest.raises(ValueError):
            assemble_dirac_pencil(cone.link, "both")

    def test_taylor_coefficients(self):
        """Test M^{(i)}(λ)/i! for a quadratic pencil."""
        pencil = _scalar_pencil(4.0, 4.0, 1.0)
        assert pencil.taylor(-2.0, 0)[0, 0] == pytest.approx(0.0)
        assert pencil.taylor(-2.0, 1)[0, 0] == pytest.approx(0.0)
        assert pencil.taylor(-2.0, 2)[0, 0] == pytest.approx(1.0)


class TestCriticalRates:
    """Tests for the σ_min scan."""

    def test_single_even_rate(self, cone):
        """Test that the even pencil on [−3.5, −2.5] has one rate, −3, of dimension b³ = 2."""
        found = critical_rates(assemble_dirac_pencil(cone.link, "even"), (-3.5, -2.5))
        assert len(found) == 1
        (rate,) = found
        assert rate.rate == pytest.approx(-3.0, abs=1e-8)
        assert rate.kernel_dim == 2
        assert rate.chain_length == 0

    def test_kernel_forms_are_harmonic(self, cone):
        """Test that the returned kernel forms solve (d + d*)u = 0."""
        found = critical_rates(assemble_dirac_pencil(cone.link, "even"), (-3.5, -2.5))
        for form in found.rates[0].kernel:
            assert cone_dirac(cone.link, form).max_abs() < 1e-7

    def test_planted_rates(self):
        """Test eigenvalue 7 on 1-forms gives rates −1 and (−7 ± √53)/2."""
        pencil = assemble_closed_coclosed_pencil(planted_complex(7.0, 1), 1)
        found = critical_rates(pencil, (-7.75, 0.75))
        expected = sorted([(-7.0 - sqrt(53.0)) / 2.0, -1.0, (-7.0 + sqrt(53.0)) / 2.0])
        assert found.values() == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("step", [0.1, 0.05, 0.02])
    def test_refinement_keeps_rates(self, cone, step):
        """Test that halving the scan step never loses a critical rate."""
        pencils = [
            (assemble_dirac_pencil(cone.link, "even"), (-3.5, -2.5)),
            (assemble_closed_coclosed_pencil(planted_complex(7.0, 1), 1), (-7.75, 0.75)),
        ]
        for pencil, interval in pencils:
            coarse = critical_rates(pencil, interval, step=step).values()
            fine = critical_rates(pencil, interval, step=step / 2).values()
            for rate in coarse:
                assert min(abs(rate - other) for other in fine) < 1e-8

    def test_endpoint_critical(self, cone):
        """Test that a critical endpoint raises EndpointCritical."""
        with pytest.raises(EndpointCritical) as info:
            critical_rates(assemble_dirac_pencil(cone.link, "even"), (-3.0, -2.5))
        assert info.value.endpoint == -3.0

    def test_empty_interval(self, cone):
        """Test that a reversed interval raises."""
        with pytest.raises(ValueError):
            critical_rates(assemble_dirac_pencil(cone.link, "even"), (-2.5, -3.5))

    def test_scan_table_covers_interval(self):
        """Test that the scan grid spans [a, b] at the requested step."""
        pencil = assemble_closed_coclosed_pencil(planted_complex(7.0, 1), 1)
        found = critical_rates(pencil, (-0.75, -0.25), step=0.125)
        lams = [row[0] for row in found.scan]
        assert lams[0] == -0.75 and lams[-1] == -0.25
        assert len(lams) == 5
        assert len(found) == 0


class TestKernelStructure:
    """Tests for the order −3 and −4 kernels and the eigenvalue identity."""

    def test_functions_are_critical_at_boundary(self, cone):
        """Test that Δ on functions has kernel at 0 and −5 and none at −2.5."""
        pencil = assemble_laplacian_pencil(cone.link, 0)
        assert pencil.kernel_dim(0.0) > 0
        assert pencil.kernel_dim(-5.0) > 0
        assert pencil.kernel_dim(-2.5) == 0

    def test_pure_four_forms_at_minus_four(self, cone):
        """Test that no closed and coclosed 4-form has order −4."""
        assert assemble_closed_coclosed_pencil(cone.link, 4).kernel_dim(-4.0) == 0

    def test_order_minus_three_is_harmonic(self, cone):
        """Test that order −3 closed and coclosed 3-forms have α = 0 and harmonic β."""
        classification = order_minus_k_classification(cone.link, 3)
        assert classification.kernel_dim == 2
        assert classification.passed()

    def test_harmonic_three_forms_are_type_27(self, cone):
        """Test that r⁻³·(harmonic 3-form) lies in Λ³₂₇."""
        forms = harmonic_representatives(cone.link, 3)
        assert forms
        for h in forms:
            assert check_type27(cone, ConeForm.of(ConeTerm(3, -3, beta=h.coeffs)))

    def test_phi_is_not_type_27(self, cone):
        """Test that φ_C itself is rejected by the type check."""
        assert not check_type27(cone, cone.phi_c)

    def test_eigenvalue_identity(self, cone):
        """Test Δγ = (λ+k)(λ−k+7)γ on kernels of the degree-2 system."""
        for identity in eigenvalue_identity_check(cone.link, 2):
            assert identity.residual < 1e-9 * max(1.0, abs(identity.factor))

    @pytest.mark.parametrize("k", [0, 7])
    def test_eigenvalue_identity_end_degrees(self, cone, k):
        """Test that functions and top forms are closed and coclosed only at rate 0."""
        identities = eigenvalue_identity_check(cone.link, k)
        assert [e.rate for e in identities] == pytest.approx([0.0], abs=1e-8)
        assert identities[0].residual < 1e-9

    def test_excluded_range_certified(self, cone):
        """Test that Δ on 1-forms has no kernel in (−4, −1)."""
        report = excluded_range_report(cone.link, "laplacian", 1, step=0.05)
        assert report.interval == (-4.0, -1.0)
        assert report.min_sigma > 1e-8
        assert report.coverage == "invariant slice"

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_laplacian_ranges_star_dual(self, cone, k):
        """Test that degrees k and 7 − k certify the same Δ-excluded range."""
        low = excluded_range_report(cone.link, "laplacian", k, step=0.05)
        high = excluded_range_report(cone.link, "laplacian", 7 - k, step=0.05)
        assert low.interval == high.interval
        assert low.points == high.points
        assert min(low.min_sigma, high.min_sigma) > 1e-8

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_closed_coclosed_rates_star_dual(self, cone, k):
        """Test that * matches closed and coclosed rates of degrees k and 7 − k."""
        window = (-7.7, 0.7)
        low = critical_rates(assemble_closed_coclosed_pencil(cone.link, k), window)
        high = critical_rates(assemble_closed_coclosed_pencil(cone.link, 7 - k), window)
        assert low.values() == pytest.approx(high.values(), abs=1e-8)
        assert [r.kernel_dim for r in low] == [r.kernel_dim for r in high]
        report = excluded_range_report(cone.link, "closed_coclosed", k, step=0.05)
        dual = excluded_range_report(cone.link, "closed_coclosed", 7 - k, step=0.05)
        assert report.interval == dual.interval


class TestLogChains:
    """Tests for log-polynomial solutions at a critical rate."""

    def test_double_root_has_chain(self):
        """Test that (λ + 2)² carries one log power at −2."""
        assert log_chain_check(_scalar_pencil(4.0, 4.0, 1.0), -2.0) == 1

    def test_simple_root_has_none(self):
        """Test that (λ + 2)(λ + 3) carries no log at −2."""
        assert log_chain_check(_scalar_pencil(6.0, 5.0, 1.0), -2.0) == 0

    def test_regular_point(self):
        """Test that a non-critical λ reports chain 0."""
        assert log_chain_check(_scalar_pencil(4.0, 4.0, 1.0), 0.0) == 0

    def test_odd_probe(self, cone):
        """Test that the odd probe at −2 reports consistent numbers."""
        pencil = assemble_dirac_pencil(cone.link, "odd")
        probe = probe_log_chain(pencil, -2.0)
        assert probe.rate == -2.0
        assert probe.kernel_dim == pencil.kernel_dim(-2.0)
        assert probe.sigma_min == pytest.approx(pencil.sigma_min(-2.0))
        assert probe.chain_length >= 0
