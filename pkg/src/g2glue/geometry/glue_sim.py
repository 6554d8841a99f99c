"""Scaling model of the torsion χ_s of the glued G2 structure.

Every interpolation term enters only through a power-law magnitude envelope with unit
constant, so the norms computed here are falsifiable in their exponents only. The
radial variable is the cone radius r near one singular point; the link has unit volume.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import inf, log, sqrt
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from ..errors import InadmissibleScale, NoConvergence, NonPositiveValue
from ..schemas.params import GlueParams, RegionConstants
from ..schemas.reports import FeasibilityRegion, FitResult, JoyceVerdict, NormName, NormReport

logger = logging.getLogger(__name__)

REGIONS = ("inner_K", "inner_annulus", "overlap", "outer")
QUADRATURE_REL = 1e-8
SAMPLES = 401
CRITICAL_NU = -3.5


def _smoothstep(t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quintic u(t) rising from 0 at t = 1 to 1 at t = 2, with u′ and u″."""
    tau = np.clip(np.asarray(t, dtype=float) - 1.0, 0.0, 1.0)
    u = tau**3 * (10.0 - 15.0 * tau + 6.0 * tau**2)
    u1 = 30.0 * tau**2 * (1.0 - tau) ** 2
    u2 = 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau)
    return u, u1, u2


def cutoff_u(r, s: float, gamma: float) -> tuple:
    """u_s(r) = u(s^{−γ} r) and its r-derivative s^{−γ} u′(s^{−γ} r)."""
    if np.any(np.asarray(r) <= 0):
        raise ValueError("radius must be positive")
    sigma = s**-gamma
    u, u1, _ = _smoothstep(np.asarray(r, dtype=float) * sigma)
    if np.ndim(r) == 0:
        return float(u), float(sigma * u1)
    return u, sigma * u1


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    coefficient: float
    exponent: float


@dataclass(frozen=True)
class Envelope:
    """Piecewise c·r^a bound; its j-th derivative is bounded by c·r^{a−j}."""

    label: str
    segments: tuple[Segment, ...]

    @classmethod
    def power(
        cls,
        label: str,
        exponent: float,
        coefficient: float = 1.0,
        start: float = 0.0,
        end: float = inf,
    ) -> Envelope:
        return cls(label, (Segment(start, end, coefficient, exponent),))

    def __call__(self, r, derivative: int = 0):
        radius = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros_like(radius)
        for seg in self.segments:
            mask = (radius >= seg.start) & (radius <= seg.end)
            out[mask] = seg.coefficient * radius[mask] ** (seg.exponent - derivative)
        return float(out[0]) if np.ndim(r) == 0 else out


def check_admissible(p: GlueParams, s: float) -> None:
    if not p.admissible(s):
        raise InadmissibleScale(
            f"s = {s:.6g} violates sR′ < s^γ < 2s^γ < ε "
            f"(R′ = {p.R_prime}, γ = {p.gamma}, ε = {p.epsilon})",
            s,
        )


def build_envelopes(p: GlueParams, s: float) -> dict[str, Envelope]:
    """Unit-constant envelopes of the interpolation data at scale s.

    Raises:
        InadmissibleScale: s violates sR′ < s^γ < 2s^γ < ε.
    """
    check_admissible(p, s)
    ac_coefficient = s ** (-p.nu_prime)
    inner, outer = p.epsilon, s * p.R_prime
    return {
        "alpha": Envelope.power("alpha", p.mu + 1, end=inner),
        "A": Envelope.power("A", -2 + p.delta, end=inner),
        "beta": Envelope.power("beta", p.mu + 1, end=inner),
        "B": Envelope.power("B", -3 + p.delta, end=inner),
        "E": Envelope.power("E", -2 + p.delta, end=inner),
        "zeta_s": Envelope.power("zeta_s", p.nu_prime + 1, ac_coefficient, start=outer),
        "theta_s": Envelope.power("theta_s", p.nu_prime + 1, ac_coefficient, start=outer),
        "xi": Envelope.power("xi", -3, end=inner),
        "eta": Envelope.power("eta", -4, end=inner),
    }


def _blend(
    pieces: list[tuple[Envelope, float]], outer: Envelope, r, u, du, d2u
) -> tuple[np.ndarray, np.ndarray]:
    """|d(u·Σcᵢfᵢ + (1−u)·g)| and its derivative, term by term."""
    f = [sum(c * env(r, j) for env, c in pieces) for j in range(3)]
    g = [outer(r, j) for j in range(3)]
    value = du * f[0] + u * f[1] + du * g[0] + (1.0 - u) * g[1]
    grad = d2u * f[0] + 2.0 * du * f[1] + u * f[2] + d2u * g[0] + 2.0 * du * g[1] + (1.0 - u) * g[2]
    return value, grad


def overlap_profile(p: GlueParams, s: float, envs: dict[str, Envelope], r) -> tuple:
    """|χ_s| and |∇χ_s| on s^γ ≤ r ≤ 2s^γ."""
    sigma = s**-p.gamma
    u, u1, u2 = _smoothstep(np.asarray(r, dtype=float) * sigma)
    du, d2u = sigma * np.abs(u1), sigma**2 * np.abs(u2)
    drho, grad_drho = _blend(
        [(envs["alpha"], 1.0), (envs["A"], s**3)], envs["zeta_s"], r, u, du, d2u
    )
    dtau, grad_dtau = _blend(
        [(envs["beta"], 1.0), (envs["B"], s**4), (envs["E"], s**3)], envs["theta_s"], r, u, du, d2u
    )
    eta, grad_eta = s**4 * envs["eta"](r), s**4 * envs["eta"](r, 1)
    xi, grad_xi = s**3 * envs["xi"](r), s**3 * envs["xi"](r, 1)
    q, grad_q = eta + xi + dtau, grad_eta + grad_xi + grad_dtau
    chi = drho + eta + dtau + q**2
    grad = grad_drho + grad_eta + grad_dtau + 2.0 * q * grad_q
    return chi, grad


def inner_profile(s: float, envs: dict[str, Envelope], r) -> tuple:
    """|χ_s| and |∇χ_s| on 2s^γ < r < ε, where only the obstruction corrections act."""
    eta, grad_eta = s**4 * envs["eta"](r), s**4 * envs["eta"](r, 1)
    xi, grad_xi = s**3 * envs["xi"](r), s**3 * envs["xi"](r, 1)
    chi = eta + (eta + xi) ** 2
    grad = grad_eta + 2.0 * (eta + xi) * (grad_eta + grad_xi)
    return chi, grad


def _quad(func, a: float, b: float, rel: float) -> float:
    value, _ = integrate.quad(func, a, b, epsabs=0.0, epsrel=rel, limit=200)
    return value


def _overlap_norms(p: GlueParams, s: float, envs, rel: float) -> NormReport:
    base = s**p.gamma
    t = np.linspace(1.0, 2.0, SAMPLES)
    chi, grad = overlap_profile(p, s, envs, base * t)
    c0, g0 = float(np.max(chi)), float(np.max(grad))

    def chi2(x):
        return (overlap_profile(p, s, envs, base * x)[0] / c0) ** 2 * x**6

    def grad14(x):
        return (overlap_profile(p, s, envs, base * x)[1] / g0) ** 14 * x**6

    # r = s^γ t; the volume factor s^{7γ} is split between the two roots
    l2 = c0 * base**3.5 * sqrt(_quad(chi2, 1.0, 2.0, rel))
    l14 = g0 * base**0.5 * _quad(grad14, 1.0, 2.0, rel) ** (1.0 / 14.0)
    return NormReport(s=s, region="overlap", c0_norm=c0, l2_norm=l2, l14_dstar_norm=l14)


def _annulus_norms(p: GlueParams, s: float, envs, rel: float) -> NormReport:
    start = 2.0 * s**p.gamma
    x0, x1 = log(start), log(p.epsilon)
    c0, g0 = (float(v) for v in inner_profile(s, envs, start))

    def chi2(x):
        r = np.exp(x)
        return (inner_profile(s, envs, r)[0] / c0) ** 2 * (r / start) ** 7

    def grad14(x):
        r = np.exp(x)
        return (inner_profile(s, envs, r)[1] / g0) ** 14 * (r / start) ** 7

    l2 = c0 * start**3.5 * sqrt(_quad(chi2, x0, x1, rel))
    l14 = g0 * start**0.5 * _quad(grad14, x0, x1, rel) ** (1.0 / 14.0)
    return NormReport(s=s, region="inner_annulus", c0_norm=c0, l2_norm=l2, l14_dstar_norm=l14)


def total_norms(s: float, regions: Sequence[NormReport]) -> NormReport:
    """sup for C⁰, root-sum-square for L², 14-norm combination for L¹⁴."""
    return NormReport(
        s=s,
        region="total",
        c0_norm=max(r.c0_norm for r in regions),
        l2_norm=sqrt(sum(r.l2_norm**2 for r in regions)),
        l14_dstar_norm=sum(r.l14_dstar_norm**14 for r in regions) ** (1.0 / 14.0),
    )


def region_norms(
    p: GlueParams, s: float, quadrature_rel: float = QUADRATURE_REL
) -> list[NormReport]:
    """Region-wise norms of χ_s at one scale followed by their total."""
    envs = build_envelopes(p, s)
    compact = s**4
    regions = [
        NormReport(s=s, region="inner_K", c0_norm=compact, l2_norm=compact, l14_dstar_norm=compact),
        _annulus_norms(p, s, envs, quadrature_rel),
        _overlap_norms(p, s, envs, quadrature_rel),
        NormReport(s=s, region="outer", c0_norm=0.0, l2_norm=0.0, l14_dstar_norm=0.0),
    ]
    return regions + [total_norms(s, regions)]


def chi_norm_scan(
    p: GlueParams,
    s_list: Sequence[float],
    quadrature_rel: float = QUADRATURE_REL,
    workers: int = 1,
) -> list[NormReport]:
    """Norm reports for every s, ordered by s and then by region.

    Raises:
        InadmissibleScale: some s violates sR′ < s^γ < 2s^γ < ε.
    """
    for s in s_list:
        check_admissible(p, s)
    scales = sorted(float(s) for s in s_list)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_scale = list(pool.map(lambda s: region_norms(p, s, quadrature_rel), scales))
    else:
        per_scale = [region_norms(p, s, quadrature_rel) for s in scales]
    logger.debug("chi_norm_scan: %d scales in [%.3g, %.3g]", len(scales), scales[0], scales[-1])
    return [report for reports in per_scale for report in reports]


def geometric_grid(s_max: float, decades: int = 3, per_decade: int = 12) -> list[float]:
    return list(np.geomspace(s_max * 10.0**-decades, s_max, decades * per_decade + 1))


def default_top_scale(p: GlueParams) -> float:
    """Upper end of the scan window: 1e−1, clipped to half the admissible supremum."""
    return min(0.1, 0.5 * p.max_admissible_scale())


def fit_exponent(
    points: Sequence[tuple[float, float]], norm: Optional[NormName] = None
) -> FitResult:
    """Least-squares slope of log(value) against log(s).

    Raises:
        NonPositiveValue: some s or value is not positive.
    """
    if len(points) < 8:
        raise ValueError(f"fit_exponent needs at least 8 points, got {len(points)}")
    s = np.array([pt[0] for pt in points], dtype=float)
    values = np.array([pt[1] for pt in points], dtype=float)
    if np.any(s <= 0) or np.any(values <= 0):
        raise NonPositiveValue("log-log fit needs positive scales and values")
    x, y = np.log(s), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    width = float(np.max(np.abs(y - (slope * x + intercept))))
    return FitResult(
        norm=norm,
        slope=float(slope),
        intercept=float(intercept),
        width=width,
        s_min=float(s.min()),
        s_max=float(s.max()),
        points=len(points),
    )


def predicted_exponents(p: GlueParams) -> dict[str, float]:
    """Closed-form exponents of the three norms, the inner η-term included."""
    base = min(
        p.gamma * p.mu,
        -p.nu_prime * (1.0 - p.gamma),
        3.0 * (1.0 - p.gamma) + p.delta * p.gamma,
        4.0 * (1.0 - p.gamma),
    )
    return {"c0": base, "l2": base + 3.5 * p.gamma, "l14": base - 0.5 * p.gamma}


def fit_scan_exponents(
    p: GlueParams,
    norm: NormName,
    s_max: Optional[float] = None,
    decades: int = 3,
    per_decade: int = 12,
    stability: float = 0.002,
    max_shifts: int = 20,
    quadrature_rel: float = QUADRATURE_REL,
    workers: int = 1,
) -> FitResult:
    """Fit the total-norm slope, moving the window a decade toward 0 until it settles."""
    top = s_max if s_max is not None else default_top_scale(p)
    previous: Optional[FitResult] = None
    for shift in range(max_shifts + 1):
        grid = geometric_grid(top * 10.0**-shift, decades, per_decade)
        reports = chi_norm_scan(p, grid, quadrature_rel, workers)
        points = [(r.s, r.norm(norm)) for r in reports if r.region == "total"]
        fit = fit_exponent(points, norm).model_copy(update={"shifts": shift})
        logger.debug("%s window [%.3g, %.3g]: slope %.6f", norm, fit.s_min, fit.s_max, fit.slope)
        if previous is not None and abs(fit.slope - previous.slope) < stability:
            return fit
        previous = fit
    logger.warning("%s slope still drifting after %d shifts", norm, max_shifts)
    return previous


# Feasibility of (γ, κ)


def gamma_bounds(
    mu: float, nu_prime: float, delta: float, kappa: float
) -> tuple[float, float, float]:
    """The three γ-boundaries obtained by rearranging the L² inequalities.

    The μ and δ boundaries are lower bounds on γ. Since 7/2 + ν′ < 0 the ν′ boundary
    1 + κ/(7/2 + ν′) bounds γ from above.
    """
    g_mu = (3.5 + kappa) / (3.5 + mu)
    g_nu = 1.0 + kappa / (3.5 + nu_prime) if nu_prime != CRITICAL_NU else float("nan")
    g_delta = (1.0 + 2.0 * kappa) / (1.0 + 2.0 * delta)
    return g_mu, g_nu, g_delta


def norm_exponent_terms(
    mu: float, nu_prime: float, delta: float, gamma: float
) -> tuple[float, float, float]:
    return mu * gamma, -nu_prime * (1.0 - gamma), 3.0 * (1.0 - gamma) + delta * gamma


def estimate_inequalities(
    mu: float, nu_prime: float, delta: float, gamma: float, kappa: float
) -> dict[str, bool]:
    """Whether the C⁰, L² and L¹⁴ requirements hold term by term at (γ, κ)."""
    terms = norm_exponent_terms(mu, nu_prime, delta, gamma)
    return {
        "c0": all(e >= kappa for e in terms),
        "l2": all(e + 3.5 * gamma >= 3.5 + kappa for e in terms),
        "l14": all(e - 0.5 * gamma >= -0.5 + kappa for e in terms),
    }


def numeric_gamma_bounds(
    mu: float, nu_prime: float, delta: float, kappa: float
) -> tuple[float, ...]:
    """Roots in γ of the three L² slacks, found independently of the closed forms."""
    bounds = []
    for i in range(3):

        def slack(gamma, i=i):
            return norm_exponent_terms(mu, nu_prime, delta, gamma)[i] + 3.5 * gamma - 3.5 - kappa

        lo, hi = -10.0, 10.0
        if np.sign(slack(lo)) == np.sign(slack(hi)):
            bounds.append(float("nan"))
        else:
            bounds.append(optimize.brentq(slack, lo, hi, xtol=1e-14))
    return tuple(bounds)


def kappa_limit(mu: float, nu_prime: float, delta: float) -> float:
    """min(δ, μ, −(7/2 + ν′)): below it every γ-boundary lies in (0, 1)."""
    return min(delta, mu, -(3.5 + nu_prime))


def gamma_interval(
    mu: float, nu_prime: float, delta: float, kappa: float
) -> Optional[tuple[float, float]]:
    """Closed interval of feasible γ at this κ, or None."""
    if kappa <= 0 or nu_prime >= CRITICAL_NU:
        return None
    g_mu, g_nu, g_delta = gamma_bounds(mu, nu_prime, delta, kappa)
    lo, hi = max(g_mu, g_delta), min(g_nu, 1.0)
    if lo > hi or hi <= 0:
        return None
    return lo, hi


def is_feasible(mu: float, nu_prime: float, delta: float, gamma: float, kappa: float) -> bool:
    interval = gamma_interval(mu, nu_prime, delta, kappa)
    return interval is not None and 0 < gamma < 1 and interval[0] <= gamma <= interval[1]


def kappa_at_gamma(mu: float, nu_prime: float, delta: float, gamma: float) -> float:
    """Largest κ whose L² inequalities hold at this γ; not positive when γ is infeasible."""
    return min(norm_exponent_terms(mu, nu_prime, delta, gamma)) + 3.5 * gamma - 3.5


def kappa_supremum(mu: float, nu_prime: float, delta: float) -> float:
    """Largest κ where the lower γ-boundaries still meet the upper ν′-boundary."""
    c = 3.5 + nu_prime
    if c >= 0:
        return 0.0
    from_mu = mu * c / (c - 3.5 - mu)
    from_delta = 2.0 * delta * c / (2.0 * c - 1.0 - 2.0 * delta)
    return min(from_mu, from_delta)


def feasibility_region(
    mu_min: float, nu_prime: float, delta: float, samples: int = 101
) -> FeasibilityRegion:
    """Boundary curves of the (γ, κ) region sampled on κ ∈ (0, κ_max)."""
    if mu_min <= 0 or delta <= 0:
        raise ValueError("mu_min and delta must be positive")
    limit = kappa_limit(mu_min, nu_prime, delta)
    empty = nu_prime >= CRITICAL_NU or limit <= 0
    table: list[list[float]] = []
    if not empty:
        for kappa in np.linspace(0.0, limit, samples + 2)[1:-1]:
            table.append([float(kappa), *gamma_bounds(mu_min, nu_prime, delta, float(kappa))])
    sup = 0.0 if empty else kappa_supremum(mu_min, nu_prime, delta)
    logger.info(
        "feasibility: κ_max = %.6g, κ_sup = %.6g, empty = %s", max(limit, 0.0), sup, empty
    )
    return FeasibilityRegion(
        mu_min=mu_min,
        nu_prime=nu_prime,
        delta=delta,
        kappa_max=max(limit, 0.0),
        kappa_sup=sup,
        empty=empty,
        table=table,
    )


def l2_dominance_violations(
    mu: float, nu_prime: float, delta: float, gammas: Sequence[float], kappas: Sequence[float]
) -> int:
    """Grid points where the L² inequalities hold with γ < 1 but C⁰ or L¹⁴ fail."""
    count = 0
    for gamma in gammas:
        if not 0 < gamma < 1:
            continue
        for kappa in kappas:
            holds = estimate_inequalities(mu, nu_prime, delta, gamma, kappa)
            if holds["l2"] and not (holds["c0"] and holds["l14"]):
                count += 1
    return count


# Hypotheses of the perturbation theorem


def joyce_gate(
    p: GlueParams,
    s: float,
    D1: float = 1.0,
    D2: float = 1.0,
    D3: float = 1.0,
    norms: Optional[NormReport] = None,
    constants: Optional[RegionConstants] = None,
    rel_tol: float = 1e-9,
    quadrature_rel: float = QUADRATURE_REL,
) -> JoyceVerdict:
    """Check the torsion bounds at κ = p.kappa and the injectivity and curvature models."""
    constants = constants or RegionConstants()
    if norms is None:
        norms = region_norms(p, s, quadrature_rel)[-1]
    k = p.kappa
    slack = 1.0 + rel_tol

    injectivity = {
        "inner_K": constants.injectivity_inner,
        "overlap": constants.injectivity_overlap * s**p.gamma,
        "outer": constants.injectivity_outer * s,
    }
    curvature = {
        "inner_K": constants.curvature_inner,
        "overlap": constants.curvature_overlap * s ** (-2.0 * p.gamma),
        "outer": constants.curvature_outer * s**-2.0,
    }
    inj_region = min(injectivity, key=injectivity.get)
    curv_region = max(curvature, key=curvature.get)
    return JoyceVerdict(
        s=s,
        kappa=k,
        c0_ok=norms.c0_norm <= D1 * s**k * slack,
        l2_ok=norms.l2_norm <= D1 * s ** (3.5 + k) * slack,
        l14_ok=norms.l14_dstar_norm <= D1 * s ** (-0.5 + k) * slack,
        injectivity_radius=injectivity[inj_region],
        injectivity_ok=injectivity[inj_region] * slack >= D2 * s,
        injectivity_dominant=inj_region,
        curvature=curvature[curv_region],
        curvature_ok=curvature[curv_region] <= D3 * s**-2.0 * slack,
        curvature_dominant=curv_region,
    )


def _torsion_bounds_hold(p: GlueParams, s: float, D1: float, quadrature_rel: float) -> bool:
    verdict = joyce_gate(p, s, D1=D1, quadrature_rel=quadrature_rel)
    return verdict.c0_ok and verdict.l2_ok and verdict.l14_ok


def locate_threshold(
    p: GlueParams,
    kappa: float,
    D1: float = 1.0,
    s_max: Optional[float] = None,
    log_tol: float = 1e-3,
    max_decades: int = 40,
    quadrature_rel: float = QUADRATURE_REL,
) -> float:
    """Largest s (to log_tol in log10) below which the three torsion bounds hold.

    Raises:
        NoConvergence: no scale within max_decades below s_max passes.
    """
    params = p.model_copy(update={"kappa": kappa})
    hi = s_max if s_max is not None else default_top_scale(params)
    if _torsion_bounds_hold(params, hi, D1, quadrature_rel):
        return hi
    lo = hi
    for _ in range(max_decades):
        lo /= 10.0
        if _torsion_bounds_hold(params, lo, D1, quadrature_rel):
            break
    else:
        raise NoConvergence(f"torsion bounds fail at every s down to {lo:.3g}")
    while log(hi / lo, 10) > log_tol:
        mid = sqrt(lo * hi)
        if _torsion_bounds_hold(params, mid, D1, quadrature_rel):
            lo = mid
        else:
            hi = mid
    logger.info("torsion bounds hold below s0 = %.6g (kappa = %g)", lo, kappa)
    return lo


def equivalence_threshold(p: GlueParams, e: float = 0.5) -> float:
    """Largest s with s³|ξ| + s⁴|η| < e on the inner region, where r ≥ 2s^γ.

    With x = s^{1−γ}/2 the envelope is x³ + x⁴, increasing in s.
    """
    if not 0 < e:
        raise ValueError("e must be positive")
    x = optimize.brentq(lambda x: x**3 + x**4 - e, 0.0, 1.0 + e, xtol=1e-15)
    return float((2.0 * x) ** (1.0 / (1.0 - p.gamma)))
