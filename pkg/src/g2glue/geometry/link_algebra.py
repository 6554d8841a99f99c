"""Constant-coefficient exterior calculus on a 6-dimensional homogeneous link.

Invariant forms on a Lie group with left-invariant coframe e^1..e^6 form a finite
subcomplex preserved by d, *, d* and Δ. Everything here acts on that subcomplex.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError
from scipy import linalg, optimize

from ..errors import ConfigParse, JacobiViolation, MetricNotPositive, NoSolution
from ..schemas.link import LinkFile, parse_rational
from .exterior import (
    Form,
    basis_index,
    dimension,
    gram_matrix,
    lie_differentials,
    star_matrix,
    wedge_coeffs,
)

logger = logging.getLogger(__name__)

LINK_DIM = 6
STRUCTURE_TOL = 1e-10
PRESETS = ("s3xs3", "abelian6")


@dataclass(frozen=True, eq=False)
class InvariantForm(Form):
    """A constant-coefficient k-form on the link."""

    dim: int = LINK_DIM


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """A finite cochain complex of invariant forms with pointwise inner products.

    `differentials[k]` maps Λ^k to Λ^{k+1}; `grams[k]` is the inner product on Λ^k.
    Built from a LinkAlgebra, or injected directly to test the rate algebra in isolation.
    """

    differentials: tuple[np.ndarray, ...]
    grams: tuple[np.ndarray, ...]
    stars: tuple[np.ndarray, ...] | None = None
    volume: float = 1.0
    name: str = "complex"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def dim(self, k: int) -> int:
        return dimension(LINK_DIM, k)

    def d(self, k: int) -> np.ndarray:
        if 0 <= k <= LINK_DIM:
            return self.differentials[k]
        return np.zeros((self.dim(k + 1), self.dim(k)))

    def codiff(self, k: int) -> np.ndarray:
        """Adjoint of d_{k-1}: Λ^k → Λ^{k-1}."""
        if not 1 <= k <= LINK_DIM:
            return np.zeros((self.dim(k - 1), self.dim(k)))
        key = ("codiff", k)
        if key not in self._cache:
            self._cache[key] = linalg.solve(self.grams[k - 1], self.d(k - 1).T @ self.grams[k])
        return self._cache[key]

    def laplacian(self, k: int) -> np.ndarray:
        if not 0 <= k <= LINK_DIM:
            return np.zeros((self.dim(k), self.dim(k)))
        key = ("laplacian", k)
        if key not in self._cache:
            self._cache[key] = self.d(k - 1) @ self.codiff(k) + self.codiff(k + 1) @ self.d(k)
        return self._cache[key]

    def gram(self, k: int) -> np.ndarray:
        if 0 <= k <= LINK_DIM:
            return self.grams[k]
        return np.zeros((0, 0))

    def star(self, k: int) -> np.ndarray:
        if self.stars is None:
            raise ValueError(f"complex {self.name!r} carries no Hodge star")
        if 0 <= k <= LINK_DIM:
            return self.stars[k]
        return np.zeros((self.dim(LINK_DIM - k), self.dim(k)))

    def norm(self, k: int, coeffs: np.ndarray) -> float:
        if coeffs.size == 0:
            return 0.0
        return float(np.sqrt(max(coeffs @ self.gram(k) @ coeffs, 0.0)))


@dataclass(frozen=True, eq=False)
class LinkAlgebra:
    """Structure constants c^i_jk, a constant metric and an orientation on a 6-dim coframe."""

    constants: np.ndarray
    metric: np.ndarray
    orientation: int = 1
    name: str = "link"

    @property
    def volume(self) -> float:
        """Coefficient √det g of vol_Σ = orientation·√det g·e^{1..6}."""
        return float(np.sqrt(np.linalg.det(self.metric)))

    @cached_property
    def complex(self) -> CochainComplex:
        return CochainComplex(
            differentials=tuple(lie_differentials(self.constants)),
            grams=tuple(gram_matrix(self.metric, k) for k in range(LINK_DIM + 1)),
            stars=tuple(star_matrix(self.metric, k, self.orientation) for k in range(LINK_DIM + 1)),
            volume=self.volume,
            name=self.name,
        )

    def with_metric(self, metric: np.ndarray) -> LinkAlgebra:
        return make_algebra(self.constants, metric, self.orientation, self.name)

    def volume_form(self) -> InvariantForm:
        return InvariantForm(LINK_DIM, np.array([self.orientation * self.volume]))


def as_complex(link: LinkAlgebra | CochainComplex) -> CochainComplex:
    return link.complex if isinstance(link, LinkAlgebra) else link


def jacobi_defect(constants: np.ndarray) -> float:
    """Largest entry of Σ_m (c^i_jm c^m_kl + c^i_km c^m_lj + c^i_lm c^m_jk)."""
    c = constants
    total = (
        np.einsum("ijm,mkl->ijkl", c, c)
        + np.einsum("ikm,mlj->ijkl", c, c)
        + np.einsum("ilm,mjk->ijkl", c, c)
    )
    return float(np.max(np.abs(total)))


def make_algebra(
    constants: np.ndarray,
    metric: np.ndarray,
    orientation: int = 1,
    name: str = "link",
    tol: float = 1e-12,
) -> LinkAlgebra:
    """Validate structure constants and metric.

    Raises:
        JacobiViolation: constants not antisymmetric, Jacobi fails, or d∘d ≠ 0.
        MetricNotPositive: metric not symmetric positive-definite.
    """
    constants = np.asarray(constants, dtype=float)
    metric = np.asarray(metric, dtype=float)
    if constants.shape != (LINK_DIM,) * 3:
        raise JacobiViolation(
            f"structure constants must have shape (6, 6, 6), got {constants.shape}"
        )
    if metric.shape != (LINK_DIM, LINK_DIM):
        raise MetricNotPositive(f"metric must be 6x6, got {metric.shape}")
    if np.max(np.abs(constants + constants.transpose(0, 2, 1))) > tol:
        raise JacobiViolation("structure constants are not antisymmetric in the lower indices")
    defect = jacobi_defect(constants)
    if defect > tol:
        raise JacobiViolation(f"Jacobi identity fails by {defect:.3e}")
    if np.max(np.abs(metric - metric.T)) > tol:
        raise MetricNotPositive("metric is not symmetric")
    if np.linalg.eigvalsh(metric)[0] <= tol:
        raise MetricNotPositive("metric is not positive-definite")

    alg = LinkAlgebra(constants, metric, orientation, name)
    cx = alg.complex
    for k in range(LINK_DIM - 1):
        square = cx.d(k + 1) @ cx.d(k)
        if square.size and np.max(np.abs(square)) > tol:
            raise JacobiViolation(f"d∘d ≠ 0 on {k}-forms")
    return alg


def algebra_from_file(link_file: LinkFile) -> LinkAlgebra:
    constants = np.zeros((LINK_DIM,) * 3)
    for i, j, k, value in link_file.structure_constants:
        c = float(parse_rational(value))
        constants[i, j, k] = c
        constants[i, k, j] = -c
    metric = np.array([[float(parse_rational(x)) for x in row] for row in link_file.metric])
    return make_algebra(constants, metric, link_file.orientation, link_file.name)


def load_link(source: Union[str, Path]) -> LinkAlgebra:
    """Load a shipped preset by name or a link file by path.

    Raises:
        ConfigParse: the file is missing, not JSON, or fails validation.
    """
    if isinstance(source, str) and source in PRESETS:
        text = resources.files("g2glue.presets").joinpath(f"{source}.json").read_text()
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigParse(f"cannot read link file {path}: {exc}") from exc
    try:
        link_file = LinkFile.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigParse(f"invalid link file {source}: {exc}") from exc
    return algebra_from_file(link_file)


def exterior_d(alg: LinkAlgebra, w: Form) -> InvariantForm:
    return InvariantForm(w.degree + 1, alg.complex.d(w.degree) @ w.coeffs)


def link_star(alg: LinkAlgebra, w: Form) -> InvariantForm:
    return InvariantForm(LINK_DIM - w.degree, alg.complex.star(w.degree) @ w.coeffs)


def link_codiff(alg: LinkAlgebra, w: Form) -> InvariantForm:
    if w.degree == 0:
        raise ValueError("the codifferential of a function is not defined")
    return InvariantForm(w.degree - 1, alg.complex.codiff(w.degree) @ w.coeffs)


def link_laplacian(alg: LinkAlgebra, w: Form) -> InvariantForm:
    return InvariantForm(w.degree, alg.complex.laplacian(w.degree) @ w.coeffs)


@dataclass(frozen=True)
class SpectralBlock:
    """One eigenvalue of Δ_Σ on invariant k-forms with an L²-orthonormal eigenbasis."""

    eigenvalue: float
    multiplicity: int
    basis: tuple[InvariantForm, ...]


def _l2_eigensystem(cx: CochainComplex, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and L²-orthonormal eigenvectors (columns) of Δ on Λ^k."""
    gram = cx.gram(k)
    chol = linalg.cholesky(gram, lower=True)
    inv_chol_t = linalg.solve_triangular(chol.T, np.eye(len(gram)), lower=False)
    sym = chol.T @ cx.laplacian(k) @ inv_chol_t
    values, vectors = linalg.eigh(0.5 * (sym + sym.T))
    return values, inv_chol_t @ vectors / np.sqrt(cx.volume)


def invariant_spectrum(
    alg: LinkAlgebra | CochainComplex, k: int, tol: float = 1e-8
) -> list[SpectralBlock]:
    """Eigendecomposition of Δ_Σ on invariant k-forms, eigenvalues ascending."""
    cx = as_complex(alg)
    values, vectors = _l2_eigensystem(cx, k)
    residual = np.max(np.abs(cx.laplacian(k) @ vectors - vectors * values), initial=0.0)
    if residual > STRUCTURE_TOL * max(1.0, float(np.max(np.abs(values), initial=0.0))):
        logger.warning("Laplacian eigendecomposition residual %.3e on %d-forms", residual, k)

    blocks: list[SpectralBlock] = []
    start = 0
    for end in range(1, len(values) + 1):
        if end == len(values) or values[end] - values[start] > tol * max(1.0, abs(values[start])):
            group = slice(start, end)
            blocks.append(
                SpectralBlock(
                    eigenvalue=float(np.mean(values[group])),
                    multiplicity=end - start,
                    basis=tuple(InvariantForm(k, v) for v in vectors[:, group].T),
                )
            )
            start = end
    return blocks


def harmonic_representatives(
    alg: LinkAlgebra | CochainComplex, k: int, tol: float = 1e-9
) -> list[InvariantForm]:
    """L²-orthonormal basis of ker Δ_Σ on invariant k-forms."""
    cx = as_complex(alg)
    values, vectors = _l2_eigensystem(cx, k)
    return [InvariantForm(k, v) for v, lam in zip(vectors.T, values) if abs(lam) < tol]


def betti_numbers(alg: LinkAlgebra | CochainComplex) -> list[int]:
    return [len(harmonic_representatives(alg, k)) for k in range(LINK_DIM + 1)]


def _range_projector(image: np.ndarray, gram: np.ndarray) -> np.ndarray:
    if image.size == 0:
        return np.zeros_like(gram)
    return image @ np.linalg.pinv(image.T @ gram @ image, rcond=1e-12) @ image.T @ gram


def hodge_decompose(
    alg: LinkAlgebra | CochainComplex, w: Form
) -> tuple[InvariantForm, InvariantForm, InvariantForm]:
    """Split w into (exact, coexact, harmonic) pieces."""
    cx = as_complex(alg)
    k, gram = w.degree, cx.gram(w.degree)
    exact = _range_projector(cx.d(k - 1), gram) @ w.coeffs
    coexact = _range_projector(cx.codiff(k + 1), gram) @ w.coeffs
    harmonic = w.coeffs - exact - coexact
    return InvariantForm(k, exact), InvariantForm(k, coexact), InvariantForm(k, harmonic)


def planted_complex(eigenvalue: float = 7.0, degree: int = 1) -> CochainComplex:
    """Flat 6-dim complex with one eigenvalue planted on `degree`-forms.

    d_{degree-1} sends the first basis (degree-1)-form to √eigenvalue times the first
    basis degree-form, so Δ acts by `eigenvalue` on both and by 0 on everything else.
    """
    if not 1 <= degree <= LINK_DIM:
        raise ValueError("planted degree must lie in 1..6")
    diffs = [
        np.zeros((dimension(LINK_DIM, k + 1), dimension(LINK_DIM, k)))
        for k in range(LINK_DIM + 1)
    ]
    diffs[degree - 1][0, 0] = np.sqrt(eigenvalue)
    eye = np.eye(LINK_DIM)
    return CochainComplex(
        differentials=tuple(diffs),
        grams=tuple(np.eye(dimension(LINK_DIM, k)) for k in range(LINK_DIM + 1)),
        stars=tuple(star_matrix(eye, k) for k in range(LINK_DIM + 1)),
        volume=1.0,
        name=f"planted-{eigenvalue:g}-on-{degree}",
    )


# Nearly Kähler structures

@dataclass(frozen=True, eq=False)
class SU3Structure:
    """(ω, ReΩ, ImΩ) on a link, together with the link whose metric they are compatible with."""

    omega: InvariantForm
    re_omega3: InvariantForm
    im_omega3: InvariantForm
    link: LinkAlgebra


def nk_residuals(alg: LinkAlgebra, omega: Form, re: Form, im: Form) -> dict[str, float]:
    """Largest coefficient of each structure equation's residual."""
    cx = alg.complex
    vol = alg.orientation * alg.volume
    omega2 = wedge_coeffs(LINK_DIM, omega.coeffs, 2, omega.coeffs, 2)
    omega3 = wedge_coeffs(LINK_DIM, omega2, 4, omega.coeffs, 2)
    re_im = wedge_coeffs(LINK_DIM, re.coeffs, 3, im.coeffs, 3)
    re_omega = wedge_coeffs(LINK_DIM, re.coeffs, 3, omega.coeffs, 2)
    pieces = {
        "d_omega_plus_3_re": cx.d(2) @ omega.coeffs + 3.0 * re.coeffs,
        "d_im_minus_2_omega2": cx.d(3) @ im.coeffs - 2.0 * omega2,
        "omega3_over_6_minus_vol": omega3 / 6.0 - vol,
        "re_im_over_4_minus_vol": re_im / 4.0 - vol,
        "star_re_minus_im": cx.star(3) @ re.coeffs - im.coeffs,
        "star_omega_minus_half_omega2": cx.star(2) @ omega.coeffs - 0.5 * omega2,
        "omega_wedge_re": wedge_coeffs(LINK_DIM, omega.coeffs, 2, re.coeffs, 3),
        "d_omega2_plus_6_re_omega": cx.d(4) @ omega2 + 6.0 * re_omega,
    }
    return {name: float(np.max(np.abs(v), initial=0.0)) for name, v in pieces.items()}


def _ansatz_basis() -> tuple[np.ndarray, np.ndarray]:
    """Columns spanning the 2-form and 3-form ansatz on the a/b coframe."""
    two = [Form.from_terms(2, {pair: 1.0}, LINK_DIM).coeffs for pair in ((0, 3), (1, 4), (2, 5))]
    three_terms = [
        {(0, 1, 2): 1.0},
        {(3, 4, 5): 1.0},
        {(0, 1, 5): 1.0, (1, 2, 3): 1.0, (2, 0, 4): 1.0},
        {(0, 4, 5): 1.0, (1, 5, 3): 1.0, (2, 3, 4): 1.0},
    ]
    three = [Form.from_terms(3, t, LINK_DIM).coeffs for t in three_terms]
    return np.column_stack(two), np.column_stack(three)


def solve_nk(
    alg: LinkAlgebra,
    tol: float = STRUCTURE_TOL,
    seed: int = 42,
    starts: int = 200,
) -> SU3Structure:
    """Solve dω = −3ReΩ, dImΩ = 2ω² and the SU(3) normalization within an invariant ansatz.

    The unknowns are the ω coefficients on a^i∧b^i, ReΩ and ImΩ coefficients on
    a^123, b^123 and the two cyclic mixed 3-forms, and the log of an overall metric scale.

    Raises:
        NoSolution: no start reaches residual below `tol`.
    """
    two, three = _ansatz_basis()
    cx = alg.complex
    d2, d3 = cx.d(2), cx.d(3)
    star2, star3 = cx.star(2), cx.star(3)
    base_vol = alg.orientation * alg.volume

    def unpack(x):
        return two @ x[0:3], three @ x[3:7], three @ x[7:11], x[11]

    def residual(x):
        omega, re, im, log_scale = unpack(x)
        # g ↦ e^κ g scales *_Σ on k-forms by e^{κ(3-k)} and vol by e^{3κ}
        vol = base_vol * np.exp(3.0 * log_scale)
        omega2 = wedge_coeffs(LINK_DIM, omega, 2, omega, 2)
        return np.concatenate(
            [
                d2 @ omega + 3.0 * re,
                d3 @ im - 2.0 * omega2,
                wedge_coeffs(LINK_DIM, omega2, 4, omega, 2) / 6.0 - vol,
                wedge_coeffs(LINK_DIM, re, 3, im, 3) / 4.0 - vol,
                star3 @ re - im,
                np.exp(log_scale) * (star2 @ omega) - 0.5 * omega2,
                wedge_coeffs(LINK_DIM, omega, 2, re, 3),
            ]
        )

    rng = np.random.default_rng(seed)
    best = np.inf
    for attempt in range(starts):
        x0 = np.concatenate([rng.normal(scale=0.1, size=11), [rng.uniform(-4.0, 1.0)]])
        fit = optimize.least_squares(
            residual, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000
        )
        err = float(np.max(np.abs(fit.fun)))
        best = min(best, err)
        logger.debug("solve_nk start %d: residual %.3e (%s)", attempt, err, fit.message)
        if err < tol:
            omega, re, im, log_scale = unpack(fit.x)
            scaled = alg.with_metric(np.exp(log_scale) * alg.metric)
            structure = SU3Structure(
                InvariantForm(2, omega), InvariantForm(3, re), InvariantForm(3, im), scaled
            )
            check = nk_residuals(scaled, structure.omega, structure.re_omega3, structure.im_omega3)
            if max(check.values()) < tol:
                logger.info(
                    "solve_nk: solution after %d starts, metric scale %.12g",
                    attempt + 1,
                    np.exp(log_scale),
                )
                return structure
    raise NoSolution(
        f"nearly Kähler ansatz has no solution on {alg.name!r} (best residual {best:.3e})"
    )


def betti_one_vanishes(structure: SU3Structure) -> bool:
    return not harmonic_representatives(structure.link, 1)


def basis_form(k: int, indices: tuple[int, ...]) -> InvariantForm:
    coeffs = np.zeros(dimension(LINK_DIM, k))
    coeffs[basis_index(LINK_DIM, k)[indices]] = 1.0
    return InvariantForm(k, coeffs)
