"""Pointwise G2 linear algebra on a single copy of R^7.

Coframe e^0..e^6. The standard structure is

    φ₀ = e^135 − e^146 − e^236 − e^245 − e^0 ∧ (e^12 + e^34 + e^56),

which is φ_C = r³ReΩ − r²dr∧ω at r = 1 with e^0 = dr. The metric of a positive
3-form is read off from (u⌟φ)∧(v⌟φ)∧φ = −6 g(u, v) vol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from ..errors import DegenerateSpectrum, NoConvergence, NotPositive
from .exterior import (
    Form,
    dimension,
    gram_matrix,
    interior_matrix,
    star_matrix,
    wedge_coeffs,
    wedge_matrix,
)

logger = logging.getLogger(__name__)

DIM = 7

PHI0_TERMS = {
    (1, 3, 5): 1.0,
    (1, 4, 6): -1.0,
    (2, 3, 6): -1.0,
    (2, 4, 5): -1.0,
    (0, 1, 2): -1.0,
    (0, 3, 4): -1.0,
    (0, 5, 6): -1.0,
}

POSITIVITY_TOL = 1e-10
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
THETA_INVERSE_RADIUS = 1.0


@dataclass(frozen=True, eq=False)
class Metric7:
    """Metric on R^7 with the volume coefficient √det g and an orientation sign."""

    matrix: np.ndarray
    volume: float
    orientation: int = 1
    _stars: dict = field(default_factory=dict, repr=False, compare=False)

    def star(self, k: int) -> np.ndarray:
        if k not in self._stars:
            self._stars[k] = star_matrix(self.matrix, k, self.orientation)
        return self._stars[k]

    def gram(self, k: int) -> np.ndarray:
        key = ("gram", k)
        if key not in self._stars:
            self._stars[key] = gram_matrix(self.matrix, k)
        return self._stars[key]

    def inner(self, a: Form, b: Form) -> float:
        return float(a.coeffs @ self.gram(a.degree) @ b.coeffs)

    def norm(self, a: Form) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    @classmethod
    def identity(cls) -> Metric7:
        return cls(np.eye(DIM), 1.0, 1)


@dataclass(frozen=True)
class TypeProjectors:
    """Spectral projectors of one type decomposition, keyed by representation dimension."""

    matrices: dict[int, np.ndarray]
    eigenvalues: dict[int, float]

    def dimensions(self) -> dict[int, int]:
        return {d: int(round(np.trace(p))) for d, p in self.matrices.items()}


def _spectral_projectors(
    operator: np.ndarray, gram: np.ndarray, sizes: tuple[int, ...]
) -> TypeProjectors:
    """Split a gram-self-adjoint operator into eigenspaces of the given dimensions."""
    chol = linalg.cholesky(gram, lower=True)
    sym = chol.T @ operator @ linalg.solve_triangular(chol.T, np.eye(len(gram)), lower=False)
    sym = 0.5 * (sym + sym.T)
    values, vectors = linalg.eigh(sym)

    scale = max(1.0, float(np.max(np.abs(values))))
    breaks = np.flatnonzero(np.diff(values) > 1e-6 * scale) + 1
    groups = np.split(np.arange(len(values)), breaks)
    if sorted(len(g) for g in groups) != sorted(sizes):
        clusters = [len(g) for g in groups]
        raise DegenerateSpectrum(
            f"type decomposition degenerate: eigenvalue clusters of sizes "
            f"{clusters}, expected {sorted(sizes)}",
            clusters,
        )

    inv_chol_t = linalg.solve_triangular(chol.T, np.eye(len(gram)), lower=False)
    matrices, eigenvalues = {}, {}
    for group in groups:
        basis = vectors[:, group]
        matrices[len(group)] = inv_chol_t @ basis @ basis.T @ chol.T
        eigenvalues[len(group)] = float(np.mean(values[group]))
    return TypeProjectors(matrices, eigenvalues)


def _bilinear_density(phi: np.ndarray) -> np.ndarray:
    """Top-form coefficients of (e_i⌟φ)∧(e_j⌟φ)∧φ."""
    contractions = [interior_matrix(DIM, 3, i) @ phi for i in range(DIM)]
    wedge_phi = wedge_matrix(DIM, phi, 3, 4)[0]
    out = np.zeros((DIM, DIM))
    for i in range(DIM):
        for j in range(i, DIM):
            four = wedge_coeffs(DIM, contractions[i], 2, contractions[j], 2)
            out[i, j] = out[j, i] = wedge_phi @ four
    return out


def metric_from_3form(phi: Form, tol: float = POSITIVITY_TOL) -> Metric7:
    """Metric, volume and orientation induced by a positive 3-form.

    Raises:
        NotPositive: if the derived bilinear form is not definite.
    """
    if phi.degree != 3 or phi.dim != DIM:
        raise ValueError("metric_from_3form expects a 3-form on R^7")
    density = -_bilinear_density(phi.coeffs) / 6.0
    det = float(np.linalg.det(density))
    if not np.isfinite(det) or abs(det) <= tol ** 9:
        raise NotPositive(f"3-form is degenerate (det = {det:.3e})")
    orientation = 1 if det > 0 else -1
    scale = abs(det) ** (1.0 / 9.0)
    matrix = orientation * density / scale
    matrix = 0.5 * (matrix + matrix.T)
    eigs = np.linalg.eigvalsh(matrix)
    if eigs[0] <= tol:
        raise NotPositive(f"3-form is not positive (smallest metric eigenvalue {eigs[0]:.3e})")
    return Metric7(matrix, scale, orientation)


def hodge_star(metric: Metric7, w: Form) -> Form:
    return Form(DIM - w.degree, metric.star(w.degree) @ w.coeffs, DIM)


@dataclass(frozen=True, eq=False)
class G2Structure:
    """A positive 3-form together with its metric and dual 4-form."""

    phi: Form
    metric: Metric7
    psi: Form

    @classmethod
    def from_phi(cls, phi: Form, tol: float = POSITIVITY_TOL) -> G2Structure:
        metric = metric_from_3form(phi, tol)
        return cls(phi, metric, hodge_star(metric, phi))

    def star(self, w: Form) -> Form:
        return hodge_star(self.metric, w)

    @cached_property
    def projectors3(self) -> TypeProjectors:
        """Λ³ = Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇ as spectral projectors of

        Q(ξ) = *(φ∧*(φ∧ξ)) + *(ψ∧ξ) φ,

        which acts by 7 on Λ³₁, by ±4 on Λ³₇ and by 0 on Λ³₂₇.
        """
        phi, psi, m = self.phi.coeffs, self.psi.coeffs, self.metric
        inner = m.star(6) @ wedge_matrix(DIM, phi, 3, 3)
        twisted = m.star(4) @ wedge_matrix(DIM, phi, 3, 1) @ inner
        trace_part = np.outer(phi, (m.star(7) @ wedge_matrix(DIM, psi, 4, 3))[0])
        return _spectral_projectors(twisted + trace_part, m.gram(3), (1, 7, 27))

    @cached_property
    def projectors2(self) -> TypeProjectors:
        """Λ² = Λ²₇ ⊕ Λ²₁₄ from w ↦ *(φ∧w), acting by 2 and −1."""
        op = self.metric.star(5) @ wedge_matrix(DIM, self.phi.coeffs, 3, 2)
        return _spectral_projectors(op, self.metric.gram(2), (7, 14))


def standard_g2() -> G2Structure:
    return G2Structure.from_phi(Form.from_terms(3, PHI0_TERMS))


def theta(phi: Form) -> Form:
    """Θ(φ) = *_φ φ."""
    return G2Structure.from_phi(phi).psi


def project3(g2: G2Structure, xi: Form) -> tuple[Form, Form, Form]:
    mats = g2.projectors3.matrices
    return tuple(Form(3, mats[d] @ xi.coeffs) for d in (1, 7, 27))


def project4(g2: G2Structure, eta: Form) -> tuple[Form, Form, Form]:
    """Degree-4 projections, Λ⁴_l = *Λ³_l."""
    dual = g2.star(eta)
    return tuple(g2.star(part) for part in project3(g2, dual))


def project2(g2: G2Structure, w: Form) -> tuple[Form, Form]:
    mats = g2.projectors2.matrices
    return tuple(Form(2, mats[d] @ w.coeffs) for d in (7, 14))


def project5(g2: G2Structure, w: Form) -> tuple[Form, Form]:
    dual = g2.star(w)
    return tuple(g2.star(part) for part in project2(g2, dual))


def type_components(g2: G2Structure, xi: Form) -> tuple[float, Form]:
    """Return (f, v) with π₁ξ = fφ and v = *(ξ∧φ), which vanishes iff π₇ξ = 0."""
    f = float((g2.star(xi.wedge(g2.psi))).coeffs[0]) / 7.0
    v = g2.star(xi.wedge(g2.phi))
    return f, v


def linearized_theta(g2: G2Structure, xi: Form) -> Form:
    """DΘ_φ(ξ) = *((4/3)π₁ξ + π₇ξ − π₂₇ξ)."""
    p1, p7, p27 = project3(g2, xi)
    return g2.star(p1 * (4.0 / 3.0) + p7 - p27)


def central_difference(phi: Form, xi: Form, h: float) -> Form:
    """(Θ(φ+hξ) − Θ(φ−hξ)) / 2h."""
    return (theta(phi + xi * h) - theta(phi - xi * h)) / (2 * h)


def richardson_difference(phi: Form, xi: Form, h: float) -> Form:
    """Central differences at h and h/2 combined to cancel the h² error term."""
    return (central_difference(phi, xi, h / 2) * 4.0 - central_difference(phi, xi, h)) / 3.0


def j_map(g2: G2Structure, eta: Form) -> Form:
    """J(η) = *((3/4)π₁η + π₇η − π₂₇η), the inverse of DΘ_φ."""
    p1, p7, p27 = project3(g2, g2.star(eta))
    return p1 * 0.75 + p7 - p27


def theta_inverse(
    ref: G2Structure,
    psi4: Form,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    radius: float = THETA_INVERSE_RADIUS,
) -> Form:
    """Solve Θ(φ) = psi4 by damped Newton iteration seeded at ref.phi.

    Raises:
        NoConvergence: psi4 is outside the configured radius or Newton stalls.
    """
    distance = (psi4 - ref.psi).norm()
    if distance > radius:
        raise NoConvergence(
            f"target 4-form is {distance:.3e} from the reference, radius is {radius}", distance
        )

    scale = max(1.0, psi4.norm())
    phi, current = ref.phi, ref
    residual = current.psi - psi4
    res_norm = residual.norm()

    for iteration in range(max_iter):
        if res_norm <= tol * scale:
            logger.debug("theta_inverse converged in %d iterations (%.3e)", iteration, res_norm)
            return phi
        step = -j_map(current, residual)
        t = 1.0
        while True:
            candidate = phi + step * t
            try:
                trial = G2Structure.from_phi(candidate)
                trial_norm = (trial.psi - psi4).norm()
            except NotPositive:
                trial_norm = np.inf
            if trial_norm <= res_norm:
                break
            t *= 0.5
            if t < 1e-8:
                raise NoConvergence(
                    f"Newton step failed to reduce residual {res_norm:.3e}", res_norm
                )
        phi, current = candidate, trial
        residual = current.psi - psi4
        res_norm = trial_norm
        logger.debug(
            "theta_inverse iteration %d: residual %.3e (step %.3g)", iteration, res_norm, t
        )

    if res_norm <= tol * scale:
        return phi
    raise NoConvergence(f"no convergence after {max_iter} iterations", res_norm)


def remainder_F(g2: G2Structure, xi: Form) -> Form:
    """F(ξ) = Θ(φ+ξ) − ψ − DΘ_φ(ξ)."""
    return theta(g2.phi + xi) - g2.psi - linearized_theta(g2, xi)


def remainder_G(g2: G2Structure, eta: Form, **newton) -> Form:
    """G(η) = Θ⁻¹(ψ+η) − φ − J(η)."""
    return theta_inverse(g2, g2.psi + eta, **newton) - g2.phi - j_map(g2, eta)


def random_direction(
    rng: np.random.Generator, radius: float, degree: int = 3
) -> Form:
    """A random form of the given degree with coefficient norm `radius`."""
    coeffs = rng.standard_normal(dimension(DIM, degree))
    return Form(degree, radius * coeffs / np.linalg.norm(coeffs))
