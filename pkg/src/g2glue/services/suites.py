"""Verification suites, one per driver subcommand.

Each suite returns a SuiteReport of named checks plus the numeric tables that back
them. Suites never raise on a failed check; `require_passed` turns failures into
CheckFailure for callers that want an exception.
"""

import logging
from functools import lru_cache
from itertools import combinations
from math import sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import CheckFailure, EndpointCritical, G2GlueError, NoSolution, UnexpectedKernel
from ..geometry import glue_sim
from ..geometry.cone_calculus import (
    CONE_DIM,
    ConeForm,
    ConeG2,
    ConeTerm,
    build_cone_g2,
    cone_d,
    cone_star,
    dilate,
    radial_primitive,
    theta_crosscheck,
)
from ..geometry.exterior import Form, random_form
from ..geometry.g2_pointwise import (
    G2Structure,
    central_difference,
    j_map,
    linearized_theta,
    metric_from_3form,
    project2,
    project3,
    project4,
    random_direction,
    remainder_F,
    remainder_G,
    richardson_difference,
    standard_g2,
    theta,
    theta_inverse,
)
from ..geometry.link_algebra import (
    LINK_DIM,
    LinkAlgebra,
    SU3Structure,
    betti_numbers,
    harmonic_representatives,
    invariant_spectrum,
    jacobi_defect,
    load_link,
    nk_residuals,
    planted_complex,
    solve_nk,
)
from ..geometry.rate_analysis import (
    assemble_closed_coclosed_pencil,
    assemble_dirac_pencil,
    assemble_laplacian_pencil,
    check_type27,
    critical_rates,
    eigenvalue_identity_check,
    excluded_range_report,
    log_chain_check,
    order_minus_k_classification,
    probe_log_chain,
)
from ..schemas.config import COMMANDS, RunConfig
from ..schemas.params import GlueParams
from ..schemas.reports import CheckResult, SuiteReport, Table

logger = logging.getLogger(__name__)

RANDOM_FORMS = 200
TYPE27_SAMPLES = 50
REMAINDER_DIRECTIONS = 100
REMAINDER_SCALES = (1e-4, 1e-3, 1e-2)
REMAINDER_SPREAD = 0.1
FD_STEP = 1e-5
FD_TOL = 1e-8
RICHARDSON_STEP = 1e-3
THETA_SCALES = (0.5, 2.0, 10.0)
EQUIVARIANCE_SAMPLES = 20
ROUNDTRIP_SAMPLES = 100
ROUNDTRIP_RADIUS = 0.05

# (μ, ν′, δ, γ)
REFERENCE_GLUE = ((1.0, -4.0, 0.2, 0.8), (0.5, -4.0, 0.1, 0.9), (2.0, -4.0, 0.3, 0.7))
# (μ, γ) and the two δ on either side of (1−γ)/γ
ABSORPTION_GLUE = (2.0, 0.8, 0.1, 0.5)

LAPLACIAN_DEGREES = (0, 1, 2, 5, 6, 7)
PLANTED_WINDOW = (-7.75, 0.75)


def _check(name: str, passed: bool, value=None, tolerance=None, detail=None) -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(passed),
        value=None if value is None else float(value),
        tolerance=tolerance,
        detail=detail,
    )


def _below(name: str, value: float, tolerance: float, detail: Optional[str] = None) -> CheckResult:
    return _check(name, value < tolerance, value, tolerance, detail)


@lru_cache(maxsize=8)
def _solved_link(link: str, seed: int, tol: float) -> tuple[LinkAlgebra, SU3Structure]:
    alg = load_link(link)
    return alg, solve_nk(alg, tol=tol, seed=seed)


@lru_cache(maxsize=8)
def _cone(link: str, seed: int, tol: float) -> ConeG2:
    alg, nk = _solved_link(link, seed, tol)
    return build_cone_g2(alg, nk, tol)


def _failed(suite: str, config: RunConfig, name: str, exc: Exception) -> SuiteReport:
    logger.warning("%s: %s", suite, exc)
    return SuiteReport(
        suite=suite, seed=config.seed, checks=[_check(name, False, detail=str(exc))]
    )


# Pointwise G2 algebra


def _projection_residuals(g2: G2Structure, forms, project) -> tuple[float, float]:
    completeness = orthogonality = 0.0
    for w in forms:
        parts = project(g2, w)
        total = sum(p.coeffs for p in parts)
        completeness = max(completeness, float(np.max(np.abs(total - w.coeffs))))
        for a, b in combinations(parts, 2):
            orthogonality = max(orthogonality, abs(g2.metric.inner(a, b)))
    return completeness, orthogonality


def _remainder_spread(values: Sequence[float]) -> float:
    return max(values) / min(values) - 1.0


def verify_pointwise(config: RunConfig) -> SuiteReport:
    """Metric of φ₀, type decompositions, J, the quadratic remainders and DΘ."""
    tol = config.tolerances
    rng = np.random.default_rng(config.seed)
    g2 = standard_g2()
    newton = {
        "tol": tol.newton,
        "max_iter": tol.newton_max_iter,
        "radius": tol.theta_inverse_radius,
    }
    checks = []

    metric = metric_from_3form(g2.phi, tol.positivity)
    checks.append(
        _below("metric(phi0) = identity", np.max(np.abs(metric.matrix - np.eye(7))), tol.projection)
    )
    dims3, dims2 = g2.projectors3.dimensions(), g2.projectors2.dimensions()
    checks.append(
        _check(
            "projection dimensions (1, 7, 27)",
            dims3 == {1: 1, 7: 7, 27: 27} and dims2 == {7: 7, 14: 14},
            detail=f"degree 3: {dims3}, degree 2: {dims2}",
        )
    )

    for degree, project in ((3, project3), (4, project4), (2, project2)):
        forms = [random_form(rng, degree) for _ in range(RANDOM_FORMS)]
        completeness, orthogonality = _projection_residuals(g2, forms, project)
        checks.append(
            _below(f"projections sum to identity on {degree}-forms", completeness, tol.projection)
        )
        checks.append(
            _below(f"projections orthogonal on {degree}-forms", orthogonality, tol.projection)
        )

    checks.append(
        _below("J(psi0) = 3/4 phi0", (j_map(g2, g2.psi) - g2.phi * 0.75).norm(), tol.projection)
    )
    worst = 0.0
    for _ in range(TYPE27_SAMPLES):
        xi = project3(g2, random_form(rng, 3))[2]
        worst = max(worst, (j_map(g2, g2.star(xi)) + xi).norm())
    checks.append(_below("J(*xi) = -xi on type 27", worst, 1e-10))

    zero3, zero4 = Form.zeros(3), Form.zeros(4)
    f0 = remainder_F(g2, zero3).norm()
    g0 = remainder_G(g2, zero4, **newton).norm()
    checks.append(_check("F(0) = 0 and G(0) = 0", f0 == 0.0 and g0 == 0.0, max(f0, g0), 0.0))

    f_spread = g_spread = 0.0
    for _ in range(REMAINDER_DIRECTIONS):
        xi = random_direction(rng, 1.0, 3)
        eta = random_direction(rng, 1.0, 4)
        f_ratios = [remainder_F(g2, xi * t).norm() / t**2 for t in REMAINDER_SCALES]
        g_ratios = [remainder_G(g2, eta * t, **newton).norm() / t**2 for t in REMAINDER_SCALES]
        f_spread = max(f_spread, _remainder_spread(f_ratios))
        g_spread = max(g_spread, _remainder_spread(g_ratios))
    checks.append(_below("|F(t xi)|/t^2 stable", f_spread, REMAINDER_SPREAD))
    checks.append(_below("|G(t eta)|/t^2 stable", g_spread, REMAINDER_SPREAD))

    fd_error = richardson_error = 0.0
    for _ in range(10):
        xi = random_direction(rng, 1.0, 3)
        exact = linearized_theta(g2, xi)
        fd_error = max(fd_error, (central_difference(g2.phi, xi, FD_STEP) - exact).norm())
        extrapolated = richardson_difference(g2.phi, xi, RICHARDSON_STEP)
        richardson_error = max(richardson_error, (extrapolated - exact).norm())
    checks.append(_below("finite-difference DTheta = *(4/3 pi1 + pi7 - pi27)", fd_error, FD_TOL))
    checks.append(_below("Richardson DTheta (h and h/2)", richardson_error, FD_TOL))

    scaling = 0.0
    for s in THETA_SCALES:
        phi = g2.phi + random_direction(rng, 0.1)
        expected = theta(phi) * s**4
        scaling = max(scaling, (theta(phi * s**3) - expected).norm() / expected.norm())
    checks.append(_below("Theta(s^3 phi) = s^4 Theta(phi)", scaling, 1e-12))

    equivariance = 0.0
    for _ in range(EQUIVARIANCE_SAMPLES):
        frame = np.eye(7) + 0.1 * rng.standard_normal((7, 7))
        pulled = metric_from_3form(g2.phi.pullback(frame), tol.positivity).matrix
        expected = frame.T @ metric.matrix @ frame
        equivariance = max(equivariance, np.max(np.abs(pulled - expected)) / np.max(expected))
    checks.append(_below("g(A*phi) = A^T g(phi) A", equivariance, 1e-10))

    roundtrip = 0.0
    for _ in range(ROUNDTRIP_SAMPLES):
        phi = g2.phi + random_direction(rng, ROUNDTRIP_RADIUS)
        recovered = theta_inverse(g2, theta(phi), **newton)
        roundtrip = max(roundtrip, (recovered - phi).norm())
    checks.append(_below("Theta^-1(Theta(phi)) = phi near phi0", roundtrip, 1e-10))

    eta = random_direction(rng, 0.1, 4)
    phi = theta_inverse(g2, g2.psi + eta, **newton)
    residual = (theta(phi) - (g2.psi + eta)).norm()
    checks.append(_below("Theta(Theta^-1(psi + eta)) = psi + eta", residual, 10 * tol.newton))

    return SuiteReport(suite="verify-pointwise", seed=config.seed, checks=checks)


# Link algebra and nearly Kähler structure


def verify_link(config: RunConfig) -> SuiteReport:
    """Jacobi identity, d∘d = 0, the nearly Kähler solve and the invariant spectrum."""
    tol = config.tolerances
    try:
        alg = load_link(config.link)
    except G2GlueError as exc:
        return _failed("verify-link", config, "link algebra loads", exc)
    cx = alg.complex
    checks = [
        _below("Jacobi identity", jacobi_defect(alg.constants), tol.structure),
        _below(
            "d o d = 0",
            max(
                float(np.max(np.abs(cx.d(k + 1) @ cx.d(k)), initial=0.0))
                for k in range(LINK_DIM - 1)
            ),
            tol.structure,
        ),
    ]
    try:
        _, nk = _solved_link(config.link, config.seed, tol.structure)
    except NoSolution as exc:
        checks.append(_check("nearly Kähler solve", False, detail=str(exc)))
        return SuiteReport(suite="verify-link", seed=config.seed, checks=checks)

    residuals = nk_residuals(nk.link, nk.omega, nk.re_omega3, nk.im_omega3)
    worst = max(residuals, key=residuals.get)
    checks.append(_below("nearly Kähler residual", residuals[worst], tol.structure, detail=worst))
    identity = residuals["d_omega2_plus_6_re_omega"]
    checks.append(_below("d(omega^2) = -6 ReOmega ^ omega", identity, tol.structure))
    betti = betti_numbers(nk.link)
    checks.append(_check("no invariant harmonic 1-forms", betti[1] == 0, betti[1], 0.0))

    spectrum = Table(name="link_spectrum", header=["degree", "eigenvalue", "multiplicity"])
    for k in range(LINK_DIM + 1):
        for block in invariant_spectrum(nk.link, k):
            spectrum.rows.append([k, block.eigenvalue, block.multiplicity])
    tables = [
        spectrum,
        Table(
            name="link_betti",
            header=["degree", "betti"],
            rows=[[k, b] for k, b in enumerate(betti)],
        ),
    ]
    return SuiteReport(suite="verify-link", seed=config.seed, checks=checks, tables=tables)


# Cone G2 structure


def verify_cone(config: RunConfig) -> SuiteReport:
    """Closedness of φ_C and ψ_C, *φ_C = ψ_C, exact primitives and the Θ cross-check."""
    tol = config.tolerances
    try:
        cone = _cone(config.link, config.seed, tol.structure)
    except G2GlueError as exc:
        return _failed("verify-cone", config, "cone G2 structure", exc)
    link, nk = cone.link, cone.nk
    checks = [
        _below("d(phi_C) = 0", cone_d(link, cone.phi_c).max_abs(), tol.structure),
        _below("d(psi_C) = 0", cone_d(link, cone.psi_c).max_abs(), tol.structure),
        _below(
            "*phi_C = psi_C",
            (cone_star(link, cone.phi_c) - cone.psi_c).max_abs(),
            tol.structure,
        ),
    ]

    phi_primitive = ConeForm.of(ConeTerm(2, 1, beta=-nk.omega.coeffs / 3.0))
    psi_primitive = ConeForm.of(ConeTerm(3, 1, beta=-nk.im_omega3.coeffs / 4.0))
    checks.append(
        _below(
            "phi_C = d(-r^3 omega/3)",
            (cone_d(link, phi_primitive) - cone.phi_c).max_abs(),
            tol.structure,
        )
    )
    checks.append(
        _below(
            "psi_C = d(-r^4 Im Omega/4)",
            (cone_d(link, psi_primitive) - cone.psi_c).max_abs(),
            tol.structure,
        )
    )
    integrated = radial_primitive(link, cone.phi_c, "zero", tol.structure)
    checks.append(
        _below("radial primitive of phi_C", (integrated - phi_primitive).max_abs(), tol.structure)
    )
    checks.append(
        _below(
            "dilation scales phi_C by t^3",
            (dilate(2.0, cone.phi_c) - cone.phi_c * 8.0).max_abs(),
            tol.structure,
        )
    )
    for r in (1.0, 2.0):
        checks.append(
            _below(f"Theta(phi_C) = psi_C at r = {r:g}", theta_crosscheck(cone, r), tol.structure)
        )
    return SuiteReport(suite="verify-cone", seed=config.seed, checks=checks)


# Critical rates


def _threshold_table(s_max: float) -> Table:
    """Largest s with the uniform (1/2)-equivalence of the glued and torsion-free metrics."""
    return Table(name="equivalence_threshold", header=["e", "s_max"], rows=[[0.5, s_max]])


def _scan_table(name: str, found) -> Table:
    return Table(
        name=name,
        header=["lambda", "sigma_min", "critical"],
        rows=[[lam, sigma, flag] for lam, sigma, flag in found.scan],
    )


def _planted_check(config: RunConfig) -> CheckResult:
    """Synthetic spectrum: eigenvalue 7 on 1-forms has rates −1 and (−7 ± √53)/2."""
    tol = config.tolerances
    pencil = assemble_closed_coclosed_pencil(planted_complex(7.0, 1), 1)
    found = critical_rates(pencil, PLANTED_WINDOW, tol.scan_step, tol.sigma_zero, tol.rate_refine)
    expected = sorted([(-7.0 - sqrt(53.0)) / 2.0, -1.0, (-7.0 + sqrt(53.0)) / 2.0])
    values = found.values()
    error = (
        max(abs(a - b) for a, b in zip(values, expected))
        if len(values) == len(expected)
        else np.inf
    )
    return _below(
        "planted eigenvalue 7 on 1-forms", error, 10 * tol.rate_refine, detail=f"rates {values}"
    )


def scan_rates(config: RunConfig) -> SuiteReport:
    """Pencil scan of the configured interval, excluded ranges and the order −3/−4 kernels."""
    tol = config.tolerances
    opts = config.rates
    try:
        cone = _cone(config.link, config.seed, tol.structure)
    except G2GlueError as exc:
        return _failed("rates", config, "cone G2 structure", exc)
    link = cone.link
    checks, tables = [], []

    pencil = assemble_dirac_pencil(link, opts.parity)
    try:
        found = critical_rates(
            pencil,
            (opts.lower, opts.upper),
            tol.scan_step,
            tol.sigma_zero,
            tol.rate_refine,
            config.workers,
            tol.max_log_power,
        )
    except EndpointCritical as exc:
        checks.append(
            _check(
                f"{opts.parity} scan endpoints regular", False, exc.endpoint, detail=str(exc)
            )
        )
    else:
        tables.append(_scan_table(f"rates_{opts.parity}_scan", found))
        tables.append(
            Table(
                name=f"rates_{opts.parity}",
                header=["rate", "sigma_min", "kernel_dim", "chain_length"],
                rows=[[r.rate, r.sigma, r.kernel_dim, r.chain_length] for r in found],
            )
        )
        if opts.parity == "even" and opts.lower < -3.0 < opts.upper:
            values = found.values()
            error = abs(values[0] + 3.0) if len(values) == 1 else np.inf
            checks.append(
                _below("single critical rate -3", error, tol.rate_refine, detail=str(values))
            )

    betti = betti_numbers(link)
    even = assemble_dirac_pencil(link, "even")
    dim = even.kernel_dim(-3.0, tol.sigma_zero)
    chain = log_chain_check(even, -3.0, tol.max_log_power, tol.sigma_zero)
    checks.append(
        _check(
            "even kernel at -3 = dr ^ harmonic 3-forms",
            dim == betti[3] and chain == 0,
            dim,
            detail=f"b3 = {betti[3]}, log chain {chain}",
        )
    )
    four = assemble_closed_coclosed_pencil(link, 4)
    dim4 = four.kernel_dim(-4.0, tol.sigma_zero)
    chain4 = log_chain_check(four, -4.0, tol.max_log_power, tol.sigma_zero)
    checks.append(
        _check(
            "pure 4-form kernel at -4 empty",
            dim4 == 0 and chain4 == 0,
            dim4,
            detail=f"log chain {chain4}",
        )
    )
    classification = order_minus_k_classification(link, 3, tol.sigma_zero)
    checks.append(
        _check(
            "order -3 closed and coclosed 3-forms are harmonic",
            classification.passed() and classification.kernel_dim == betti[3],
            classification.harmonic_residual,
            detail=f"kernel dim {classification.kernel_dim}",
        )
    )
    type27 = [
        check_type27(cone, ConeForm.of(ConeTerm(3, -3, beta=h.coeffs)), 1e-10)
        for h in harmonic_representatives(link, 3)
    ]
    checks.append(
        _check(
            "order -3 harmonic 3-forms are type 27", all(type27), detail=f"{len(type27)} forms"
        )
    )

    if opts.excluded:
        rows = []
        ranges = [("laplacian", k) for k in LAPLACIAN_DEGREES]
        ranges += [("closed_coclosed", k) for k in range(8)]
        for operator, k in ranges:
            try:
                report = excluded_range_report(
                    link, operator, k, tol.scan_step, tol.sigma_zero, config.workers
                )
            except UnexpectedKernel as exc:
                checks.append(
                    _check(
                        f"{operator} excluded range, degree {k}",
                        False,
                        exc.rate,
                        detail=str(exc),
                    )
                )
                continue
            rows.append([operator, k, *report.interval, report.points, report.min_sigma])
            checks.append(
                _check(
                    f"{operator} excluded range, degree {k}",
                    True,
                    report.min_sigma,
                    tol.sigma_zero,
                    detail=f"{report.interval} on the {report.coverage}",
                )
            )
        tables.append(
            Table(
                name="excluded_ranges",
                header=["operator", "degree", "lower", "upper", "points", "min_sigma"],
                rows=rows,
            )
        )
        functions = assemble_laplacian_pencil(link, 0)
        boundary = [functions.kernel_dim(lam, tol.sigma_zero) for lam in (0.0, -5.0)]
        checks.append(
            _check(
                "Laplacian on functions critical at 0 and -5",
                min(boundary) > 0,
                detail=f"kernel dims {boundary}",
            )
        )

    identities = []
    for k in range(CONE_DIM + 1):
        try:
            identities.extend(
                eigenvalue_identity_check(
                    link, k, step=tol.scan_step, sigma_zero=tol.sigma_zero
                )
            )
        except EndpointCritical as exc:
            checks.append(
                _check(
                    f"eigenvalue identity, degree {k}", False, exc.endpoint, detail=str(exc)
                )
            )
    worst = max((e.residual / max(1.0, abs(e.factor)) for e in identities), default=0.0)
    checks.append(
        _below(
            "Delta gamma = (lambda+k)(lambda-k+7) gamma",
            worst,
            1e-9,
            detail=f"{len(identities)} rates",
        )
    )
    tables.append(
        Table(
            name="eigenvalue_identity",
            header=["degree", "rate", "factor", "kernel_dim", "residual"],
            rows=[[e.degree, e.rate, e.factor, e.kernel_dim, e.residual] for e in identities],
        )
    )

    checks.append(_planted_check(config))

    probe = probe_log_chain(
        assemble_dirac_pencil(link, "odd"), -2.0, tol.sigma_zero, tol.max_log_power
    )
    tables.append(
        Table(
            name="log_chain_probe",
            header=["pencil", "rate", "sigma_min", "kernel_dim", "chain_length"],
            rows=[[probe.label, probe.rate, probe.sigma_min, probe.kernel_dim, probe.chain_length]],
        )
    )
    return SuiteReport(suite="rates", seed=config.seed, checks=checks, tables=tables)


# Gluing estimates


def _fit_checks(
    p: GlueParams, config: RunConfig, label: str
) -> tuple[list[CheckResult], list[list]]:
    tol = config.tolerances
    predicted = glue_sim.predicted_exponents(p)
    checks, rows = [], []
    for norm in ("c0", "l2", "l14"):
        fit = glue_sim.fit_scan_exponents(
            p, norm, quadrature_rel=tol.quadrature_rel, workers=config.workers
        )
        gap = abs(fit.slope - predicted[norm])
        checks.append(
            _below(
                f"{label} {norm} slope",
                gap,
                tol.slope,
                detail=f"fitted {fit.slope:.4f}, predicted {predicted[norm]:.4f}",
            )
        )
        rows.append(
            [label, norm, fit.slope, predicted[norm], fit.width, fit.s_min, fit.s_max, fit.shifts]
        )
    return checks, rows


def _label(p: GlueParams) -> str:
    return f"mu={p.mu:g} nu'={p.nu_prime:g} delta={p.delta:g} gamma={p.gamma:g}"


def glue_scan(config: RunConfig) -> SuiteReport:
    """Region norms of χ_s over the default grid and exponent fits against the predictions."""
    tol = config.tolerances
    p = config.glue
    grid = glue_sim.geometric_grid(glue_sim.default_top_scale(p))
    reports = glue_sim.chi_norm_scan(p, grid, tol.quadrature_rel, config.workers)
    checks = []

    outer = max(max(r.c0_norm, r.l2_norm, r.l14_dstar_norm) for r in reports if r.region == "outer")
    checks.append(_check("outer region norms vanish", outer == 0.0, outer, 0.0))

    additivity = 0.0
    for i in range(0, len(reports), len(glue_sim.REGIONS) + 1):
        regions, total = reports[i : i + len(glue_sim.REGIONS)], reports[i + len(glue_sim.REGIONS)]
        again = glue_sim.total_norms(total.s, regions)
        for norm in ("c0", "l2", "l14"):
            gap = abs(again.norm(norm) - total.norm(norm)) / total.norm(norm)
            additivity = max(additivity, gap)
    checks.append(_below("region additivity", additivity, 1e-10))

    predicted = glue_sim.predicted_exponents(p)
    totals = [r for r in reports if r.region == "total"]
    for norm in ("c0", "l2", "l14"):
        if abs(predicted[norm]) < tol.slope:
            continue
        steps = np.diff([r.norm(norm) for r in totals])
        monotone = bool(np.all(steps >= 0)) if predicted[norm] > 0 else bool(np.all(steps <= 0))
        direction = "nondecreasing" if predicted[norm] > 0 else "nonincreasing"
        checks.append(_check(f"{norm} norm {direction} in s", monotone))

    rows = []
    seen = set()
    cases = [p] + [
        GlueParams(mu=mu, nu_prime=nu, delta=delta, gamma=gamma)
        for mu, nu, delta, gamma in REFERENCE_GLUE
    ]
    for case in cases:
        key = (case.mu, case.nu_prime, case.delta, case.gamma)
        if key in seen:
            continue
        seen.add(key)
        case_checks, case_rows = _fit_checks(case, config, _label(case))
        checks.extend(case_checks)
        rows.extend(case_rows)

    mu, gamma, absorbed, exposed = ABSORPTION_GLUE
    for delta in (absorbed, exposed):
        case = GlueParams(mu=mu, delta=delta, gamma=gamma)
        fit = glue_sim.fit_scan_exponents(
            case, "l2", quadrature_rel=tol.quadrature_rel, workers=config.workers
        )
        expected = glue_sim.predicted_exponents(case)["l2"]
        branch = "absorbed" if case.delta_absorbed else "inner eta-term dominant"
        checks.append(
            _below(
                f"L2 slope with delta={delta:g} ({branch})",
                abs(fit.slope - expected),
                tol.slope,
                detail=f"fitted {fit.slope:.4f}, predicted {expected:.4f}",
            )
        )

    threshold = _threshold_table(glue_sim.equivalence_threshold(p))

    tables = [
        Table(
            name="glue_scan",
            header=["s", "region", "c0", "l2", "l14"],
            rows=[[r.s, r.region, r.c0_norm, r.l2_norm, r.l14_dstar_norm] for r in reports],
        ),
        Table(
            name="glue_fits",
            header=["params", "norm", "slope", "predicted", "width", "s_min", "s_max", "shifts"],
            rows=rows,
        ),
        threshold,
    ]
    return SuiteReport(suite="glue-scan", seed=config.seed, checks=checks, tables=tables)


def feasibility(config: RunConfig) -> SuiteReport:
    """Boundary curves of the (γ, κ) region and the closed-form and dominance checks."""
    opts = config.feasibility
    mu, nu, delta = opts.mu, opts.nu_prime, opts.delta
    region = glue_sim.feasibility_region(mu, nu, delta, opts.samples)
    checks = [
        _check("region nonempty", not region.empty, region.kappa_sup),
        _check(
            "gamma bounds lie in (0, 1) below kappa_max",
            all(0 < g < 1 for row in region.table for g in row[1:]),
            region.kappa_max,
        ),
    ]

    closed_form = 0.0
    for row in region.table:
        numeric = glue_sim.numeric_gamma_bounds(mu, nu, delta, row[0])
        closed_form = max(closed_form, max(abs(a - b) for a, b in zip(numeric, row[1:])))
    checks.append(_below("boundary curves match closed forms", closed_form, 1e-9))

    if not region.empty:
        sup = region.kappa_sup
        inside = glue_sim.gamma_interval(mu, nu, delta, sup * (1 - 1e-6))
        outside = glue_sim.gamma_interval(mu, nu, delta, sup * (1 + 1e-6))
        checks.append(
            _check("nonempty exactly below kappa_sup", inside is not None and outside is None, sup)
        )
        limit = glue_sim.gamma_interval(mu, nu, delta, 1e-12)
        expected = max(7.0 / (7.0 + 2.0 * mu), 1.0 / (1.0 + 2.0 * delta))
        checks.append(
            _below(
                "kappa -> 0 interval starts at max(7/(7+2mu), 1/(1+2delta))",
                abs(limit[0] - expected) if limit else np.inf,
                1e-9,
            )
        )
    critical = glue_sim.feasibility_region(mu, glue_sim.CRITICAL_NU, delta, opts.samples)
    checks.append(_check("critical rate -7/2 leaves the region empty", critical.empty))

    axis = np.linspace(0.0, 1.0, opts.grid + 2)[1:-1]
    violations = glue_sim.l2_dominance_violations(mu, nu, delta, axis, axis)
    checks.append(_check("L2 inequality implies C0 and L14", violations == 0, violations, 0.0))

    table = Table(
        name="feasibility",
        header=["kappa", "gamma_lb_mu", "gamma_lb_nu", "gamma_lb_delta"],
        rows=region.table,
    )
    return SuiteReport(suite="feasibility", seed=config.seed, checks=checks, tables=[table])


def joyce_gate(config: RunConfig) -> SuiteReport:
    """Locate s₀ for the torsion bounds and check all hypotheses on scales below it."""
    tol = config.tolerances
    gate = config.gate
    p = config.glue
    kappa = gate.kappa
    if kappa is None:
        kappa = 0.5 * glue_sim.kappa_at_gamma(p.mu, p.nu_prime, p.delta, p.gamma)
    feasible = glue_sim.is_feasible(p.mu, p.nu_prime, p.delta, p.gamma, kappa)
    checks = [_check("(gamma, kappa) feasible", feasible, kappa, detail=f"gamma = {p.gamma:g}")]
    if not feasible:
        return SuiteReport(suite="joyce-gate", seed=config.seed, checks=checks)

    try:
        s0 = glue_sim.locate_threshold(p, kappa, gate.D1, quadrature_rel=tol.quadrature_rel)
    except G2GlueError as exc:
        checks.append(_check("torsion threshold located", False, detail=str(exc)))
        return SuiteReport(suite="joyce-gate", seed=config.seed, checks=checks)
    checks.append(_check("torsion threshold located", s0 > 0, s0))

    params = p.model_copy(update={"kappa": kappa})
    rows, verdicts = [], []
    for s in s0 * np.geomspace(1e-3, 1.0, 7):
        verdict = glue_sim.joyce_gate(
            params, float(s), gate.D1, gate.D2, gate.D3, constants=gate.constants,
            quadrature_rel=tol.quadrature_rel,
        )
        verdicts.append(verdict)
        rows.append(
            [
                verdict.s, verdict.c0_ok, verdict.l2_ok, verdict.l14_ok,
                verdict.injectivity_radius, verdict.injectivity_dominant, verdict.injectivity_ok,
                verdict.curvature, verdict.curvature_dominant, verdict.curvature_ok,
            ]
        )
    checks.append(_check("hypotheses hold below s0", all(v.passed for v in verdicts)))
    checks.append(
        _check(
            "injectivity radius dominated by outer region",
            all(v.injectivity_dominant == "outer" for v in verdicts),
        )
    )
    checks.append(
        _check(
            "curvature dominated by outer region",
            all(v.curvature_dominant == "outer" for v in verdicts),
        )
    )
    threshold = _threshold_table(glue_sim.equivalence_threshold(p))
    table = Table(
        name="joyce_gate",
        header=[
            "s", "c0_ok", "l2_ok", "l14_ok", "injectivity", "injectivity_region", "injectivity_ok",
            "curvature", "curvature_region", "curvature_ok",
        ],
        rows=rows,
    )
    return SuiteReport(
        suite="joyce-gate", seed=config.seed, checks=checks, tables=[table, threshold]
    )


SUITES: dict[str, Callable[[RunConfig], SuiteReport]] = {
    "verify-pointwise": verify_pointwise,
    "verify-link": verify_link,
    "verify-cone": verify_cone,
    "rates": scan_rates,
    "glue-scan": glue_scan,
    "feasibility": feasibility,
    "joyce-gate": joyce_gate,
}


def run_suites(names: Sequence[str], config: RunConfig) -> list[SuiteReport]:
    """Run suites in the order given; unknown names raise ValueError."""
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {list(COMMANDS)}")
    reports = []
    for name in names:
        report = SUITES[name](config)
        logger.info("%s: %s", name, "PASS" if report.passed else "FAIL")
        reports.append(report)
    return reports


def require_passed(reports: Sequence[SuiteReport]) -> None:
    """Raises CheckFailure naming the first failing check."""
    for report in reports:
        for check in report.failures():
            raise CheckFailure(f"[{report.suite}] {check.line()}", check.name)
