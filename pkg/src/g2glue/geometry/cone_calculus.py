"""Exterior calculus on the cone C = (0, ∞) × Σ for log-polynomial homogeneous forms.

A ConeTerm of degree k, order λ and log power m stands for

    r^λ (log r)^m (r^{k-1} dr∧α + r^k β)

with α, β invariant forms on the link. Internally every operation works on raw
slots c·r^e (log r)^m ∧ (link form), one for dr-parts and one for plain parts, and
converts back: a dr-slot of degree j and exponent e has order e − (j − 1), a plain
slot has order e − j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, log
from typing import Iterator, Literal, Union

import numpy as np
from scipy import linalg

from ..errors import LogObstruction, NKViolation, NotClosed, RateOutOfRange
from .exterior import Form, basis, basis_index, dimension
from .g2_pointwise import G2Structure
from .link_algebra import (
    LINK_DIM,
    CochainComplex,
    LinkAlgebra,
    SU3Structure,
    as_complex,
    nk_residuals,
)

logger = logging.getLogger(__name__)

Order = Union[Fraction, float]
ORDER_TOL = 1e-12
MAX_LOG_POWER = 4
CONE_DIM = LINK_DIM + 1


def as_order(value) -> Order:
    """Rationals stay exact; floats stay floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return float(value)


def same_order(a: Order, b: Order) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= ORDER_TOL


def _vector(values, size: int, what: str) -> np.ndarray:
    if values is None:
        return np.zeros(size)
    arr = np.asarray(values.coeffs if isinstance(values, Form) else values, dtype=float).reshape(-1)
    if arr.size != size:
        raise ValueError(f"{what} needs {size} coefficients, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class ConeTerm:
    """r^λ (log r)^m (r^{k-1} dr∧α + r^k β)."""

    degree: int
    order: Order
    log_power: int = 0
    alpha: np.ndarray = None
    beta: np.ndarray = None

    def __post_init__(self):
        if not 0 <= self.degree <= CONE_DIM:
            raise ValueError(f"cone degree {self.degree} outside 0..7")
        if self.log_power < 0:
            raise ValueError("log power must be non-negative")
        object.__setattr__(self, "order", as_order(self.order))
        object.__setattr__(
            self, "alpha", _vector(self.alpha, dimension(LINK_DIM, self.degree - 1), "alpha")
        )
        beta = _vector(self.beta, dimension(LINK_DIM, self.degree), "beta")
        object.__setattr__(self, "beta", beta)

    @property
    def alpha_exponent(self) -> Order:
        return self.order + self.degree - 1

    @property
    def beta_exponent(self) -> Order:
        return self.order + self.degree

    def max_abs(self) -> float:
        return float(
            max(np.max(np.abs(self.alpha), initial=0.0), np.max(np.abs(self.beta), initial=0.0))
        )

    def matches(self, other: ConeTerm) -> bool:
        return (
            self.degree == other.degree
            and self.log_power == other.log_power
            and same_order(self.order, other.order)
        )


@dataclass(frozen=True, eq=False)
class ConeForm:
    """A finite sum of ConeTerms kept sorted by (k, λ, m) with exact zeros pruned."""

    terms: tuple[ConeTerm, ...] = ()
    max_log_power: int = field(default=MAX_LOG_POWER, repr=False)

    def __post_init__(self):
        merged: list[ConeTerm] = []
        for term in self.terms:
            if term.log_power > self.max_log_power:
                raise LogObstruction(
                    f"log power {term.log_power} exceeds the cap {self.max_log_power}"
                )
            for pos, existing in enumerate(merged):
                if existing.matches(term):
                    merged[pos] = ConeTerm(
                        existing.degree,
                        existing.order,
                        existing.log_power,
                        existing.alpha + term.alpha,
                        existing.beta + term.beta,
                    )
                    break
            else:
                merged.append(term)
        kept = [t for t in merged if t.max_abs() > 0.0]
        kept.sort(key=lambda t: (t.degree, float(t.order), t.log_power))
        object.__setattr__(self, "terms", tuple(kept))

    @classmethod
    def of(cls, *terms: ConeTerm) -> ConeForm:
        return cls(tuple(terms))

    def __iter__(self) -> Iterator[ConeTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: ConeForm) -> ConeForm:
        return ConeForm(self.terms + other.terms, self.max_log_power)

    def __neg__(self) -> ConeForm:
        return self * -1.0

    def __sub__(self, other: ConeForm) -> ConeForm:
        return self + (-other)

    def __mul__(self, scalar: float) -> ConeForm:
        return ConeForm(
            tuple(
                ConeTerm(t.degree, t.order, t.log_power, scalar * t.alpha, scalar * t.beta)
                for t in self.terms
            ),
            self.max_log_power,
        )

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max((t.max_abs() for t in self.terms), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def allclose(self, other: ConeForm, tol: float = 1e-10) -> bool:
        return (self - other).is_zero(tol)

    def orders(self) -> list[Order]:
        return [t.order for t in self.terms]

    def degrees(self) -> set[int]:
        return {t.degree for t in self.terms}

    def of_degree(self, k: int) -> ConeForm:
        return ConeForm(tuple(t for t in self.terms if t.degree == k), self.max_log_power)


Slot = Literal["dr", "plain"]


class _SlotSum:
    """Collects raw slot contributions and converts them back into ConeTerms."""

    def __init__(self):
        self._terms: list[ConeTerm] = []

    def add(self, degree: int, slot: Slot, exponent: Order, log_power: int, vec: np.ndarray):
        if degree < 0 or degree > CONE_DIM or log_power < 0 or vec.size == 0:
            return
        if slot == "dr":
            self._terms.append(ConeTerm(degree, exponent - (degree - 1), log_power, alpha=vec))
        else:
            self._terms.append(ConeTerm(degree, exponent - degree, log_power, beta=vec))

    def form(self, max_log_power: int = MAX_LOG_POWER) -> ConeForm:
        return ConeForm(tuple(self._terms), max_log_power)


def _radial_derivative(exponent: Order, log_power: int) -> list[tuple[float, Order, int]]:
    """∂_r (r^e L^m) = e r^{e-1} L^m + m r^{e-1} L^{m-1}."""
    parts = []
    if float(exponent) != 0.0:
        parts.append((float(exponent), exponent - 1, log_power))
    if log_power > 0:
        parts.append((float(log_power), exponent - 1, log_power - 1))
    return parts


def _second_derivative(exponent: Order, log_power: int) -> list[tuple[float, Order, int]]:
    parts = []
    for c1, e1, m1 in _radial_derivative(exponent, log_power):
        for c2, e2, m2 in _radial_derivative(e1, m1):
            parts.append((c1 * c2, e2, m2))
    return parts


def cone_d(link: LinkAlgebra | CochainComplex, w: ConeForm) -> ConeForm:
    """d_C(dr∧α + β) = dr∧(∂_r β − d_Σ α) + d_Σ β, termwise on raw slots."""
    cx = as_complex(link)
    out = _SlotSum()
    for t in w:
        k, m = t.degree, t.log_power
        if k == CONE_DIM:
            continue
        eb = t.beta_exponent
        if np.any(t.alpha):
            out.add(k + 1, "dr", eb - 1, m, -(cx.d(k - 1) @ t.alpha))
        for c, e, mm in _radial_derivative(eb, m):
            out.add(k + 1, "dr", e, mm, c * t.beta)
        out.add(k + 1, "plain", eb, m, cx.d(k) @ t.beta)
    return out.form(w.max_log_power)


def cone_star(link: LinkAlgebra | CochainComplex, w: ConeForm) -> ConeForm:
    """*(dr∧α + β) = dr∧((−1)^k r^{6−2k} *_Σβ) + r^{8−2k} *_Σα."""
    cx = as_complex(link)
    out = _SlotSum()
    for t in w:
        k, m = t.degree, t.log_power
        dual_beta = (-1) ** k * (cx.star(k) @ t.beta)
        out.add(CONE_DIM - k, "dr", t.beta_exponent + 6 - 2 * k, m, dual_beta)
        out.add(CONE_DIM - k, "plain", t.alpha_exponent + 8 - 2 * k, m, cx.star(k - 1) @ t.alpha)
    return out.form(w.max_log_power)


def cone_codiff(link: LinkAlgebra | CochainComplex, w: ConeForm) -> ConeForm:
    """d*_C(dr∧α + β) = dr∧(−r⁻² d*_Σα) + (−(8−2k) r⁻¹ α − ∂_r α + r⁻² d*_Σβ)."""
    cx = as_complex(link)
    out = _SlotSum()
    for t in w:
        k, m = t.degree, t.log_power
        if k == 0:
            continue
        ea, eb = t.alpha_exponent, t.beta_exponent
        out.add(k - 1, "dr", ea - 2, m, -(cx.codiff(k - 1) @ t.alpha))
        out.add(k - 1, "plain", ea - 1, m, -(8 - 2 * k) * t.alpha)
        for c, e, mm in _radial_derivative(ea, m):
            out.add(k - 1, "plain", e, mm, -c * t.alpha)
        out.add(k - 1, "plain", eb - 2, m, cx.codiff(k) @ t.beta)
    return out.form(w.max_log_power)


def cone_laplacian(link: LinkAlgebra | CochainComplex, w: ConeForm) -> ConeForm:
    """Δ_C by the closed formula, independent of the d d* + d* d route.

    dr-part:    r⁻²Δα + (8−2k) r⁻²α − (8−2k) r⁻¹ ∂_rα − ∂_r²α − 2 r⁻³ d*β
    plain part: r⁻²Δβ − (6−2k) r⁻¹ ∂_rβ − ∂_r²β − 2 r⁻¹ dα
    """
    cx = as_complex(link)
    out = _SlotSum()
    for t in w:
        k, m = t.degree, t.log_power
        ea, eb = t.alpha_exponent, t.beta_exponent
        a, b = t.alpha, t.beta
        if a.size:
            out.add(k, "dr", ea - 2, m, cx.laplacian(k - 1) @ a + (8 - 2 * k) * a)
            for c, e, mm in _radial_derivative(ea, m):
                out.add(k, "dr", e - 1, mm, -(8 - 2 * k) * c * a)
            for c, e, mm in _second_derivative(ea, m):
                out.add(k, "dr", e, mm, -c * a)
            out.add(k, "plain", ea - 1, m, -2.0 * (cx.d(k - 1) @ a))
        if b.size:
            out.add(k, "dr", eb - 3, m, -2.0 * (cx.codiff(k) @ b))
            out.add(k, "plain", eb - 2, m, cx.laplacian(k) @ b)
            for c, e, mm in _radial_derivative(eb, m):
                out.add(k, "plain", e - 1, mm, -(6 - 2 * k) * c * b)
            for c, e, mm in _second_derivative(eb, m):
                out.add(k, "plain", e, mm, -c * b)
    return out.form(w.max_log_power)


def cone_dirac(link: LinkAlgebra | CochainComplex, w: ConeForm) -> ConeForm:
    return cone_d(link, w) + cone_codiff(link, w)


def dilate(t: float, w: ConeForm) -> ConeForm:
    """Pullback under (r, σ) ↦ (tr, σ); (log tr)^m is expanded binomially."""
    if t <= 0:
        raise ValueError("dilation factor must be positive")
    log_t = log(t)
    terms = []
    for term in w:
        factor = float(t) ** float(term.beta_exponent)
        m = term.log_power
        for j in range(m + 1):
            c = factor * comb(m, j) * log_t ** (m - j)
            terms.append(ConeTerm(term.degree, term.order, j, c * term.alpha, c * term.beta))
    return ConeForm(tuple(terms), w.max_log_power)


def radial_primitive(
    link: LinkAlgebra | CochainComplex,
    w: ConeForm,
    end: Literal["zero", "infinity"] = "zero",
    tol: float = 1e-10,
) -> ConeForm:
    """Ω = ∫_{end}^r α dt for closed w = dr∧α + β, so that d_C Ω = w.

    Raises:
        NotClosed: d_C w ≠ 0.
        RateOutOfRange: some term has λ + k on the wrong side of 0 for `end`.
        LogObstruction: some term has λ + k = 0, whose integral is a log.
    """
    if end not in ("zero", "infinity"):
        raise ValueError("end must be 'zero' or 'infinity'")
    defect = cone_d(link, w).max_abs()
    if defect > tol * max(1.0, w.max_abs()):
        raise NotClosed(f"form is not closed (|dw| = {defect:.3e})")

    out = _SlotSum()
    for t in w:
        power = t.beta_exponent
        if same_order(power, 0):
            raise LogObstruction(f"order {t.order} in degree {t.degree} integrates to a log")
        if (end == "zero" and power < 0) or (end == "infinity" and power > 0):
            raise RateOutOfRange(
                f"order {t.order} in degree {t.degree} cannot be integrated from {end}",
                float(t.order),
            )
        if not t.alpha.size:
            continue
        m = t.log_power
        s = float(power)
        for j in range(m + 1):
            c = (-1) ** j * factorial(m) / factorial(m - j) / s ** (j + 1)
            out.add(t.degree - 1, "plain", power, m - j, c * t.alpha)
    return out.form(w.max_log_power)


def _slot_values(w: ConeForm, r: float) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per degree, the summed raw α and β coefficient vectors at radius r."""
    values: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    L = log(r)
    for t in w:
        a, b = values.get(
            t.degree,
            (np.zeros(dimension(LINK_DIM, t.degree - 1)), np.zeros(dimension(LINK_DIM, t.degree))),
        )
        logs = L ** t.log_power
        a = a + r ** float(t.alpha_exponent) * logs * t.alpha
        b = b + r ** float(t.beta_exponent) * logs * t.beta
        values[t.degree] = (a, b)
    return values


def cone_norm(link: LinkAlgebra | CochainComplex, w: ConeForm, r: float) -> float:
    """Pointwise |w|_{g_C} at radius r; link k-forms have cone norm r^{-k}|·|_Σ."""
    cx = as_complex(link)
    total = 0.0
    for k, (a, b) in _slot_values(w, r).items():
        total += (cx.norm(k - 1, a) * r ** (-(k - 1))) ** 2 if a.size else 0.0
        total += (cx.norm(k, b) * r ** (-k)) ** 2 if b.size else 0.0
    return float(np.sqrt(total))


def evaluate_at(w: ConeForm, r: float) -> dict[int, Form]:
    """Forms on R^7 in the coframe (dr, e^1, ..., e^6) at radius r, keyed by degree."""
    out: dict[int, Form] = {}
    for k, (a, b) in _slot_values(w, r).items():
        coeffs = np.zeros(dimension(CONE_DIM, k))
        lookup = basis_index(CONE_DIM, k)
        for pos, idx in enumerate(basis(LINK_DIM, k - 1)):
            coeffs[lookup[(0,) + tuple(i + 1 for i in idx)]] += a[pos]
        for pos, idx in enumerate(basis(LINK_DIM, k)):
            coeffs[lookup[tuple(i + 1 for i in idx)]] += b[pos]
        out[k] = Form(k, coeffs, CONE_DIM)
    return out


def orthonormal_frame(metric: np.ndarray) -> np.ndarray:
    """Frame of R^7 orthonormal for dr² + g_Σ, from the eigen-factorization of g_Σ."""
    values, vectors = linalg.eigh(metric)
    frame = np.eye(CONE_DIM)
    frame[1:, 1:] = vectors / np.sqrt(values)
    return frame


@dataclass(frozen=True, eq=False)
class ConeG2:
    """φ_C = r³ReΩ − r²dr∧ω and ψ_C = −r³dr∧ImΩ − r⁴ω²/2 over a nearly Kähler link."""

    link: LinkAlgebra
    nk: SU3Structure
    phi_c: ConeForm
    psi_c: ConeForm

    def pointwise_structure(self, r: float = 1.0) -> tuple[G2Structure, Form]:
        """The G2 structure of φ_C at radius r in an orthonormal coframe, plus ψ_C there."""
        frame = orthonormal_frame(r**2 * self.link.metric)
        phi = evaluate_at(self.phi_c, r)[3].pullback(frame)
        psi = evaluate_at(self.psi_c, r)[4].pullback(frame)
        return G2Structure.from_phi(phi), psi


def build_cone_g2(alg: LinkAlgebra, nk: SU3Structure, tol: float = 1e-10) -> ConeG2:
    """Assemble the cone G2 structure and certify dφ_C = 0, dψ_C = 0, *φ_C = ψ_C.

    The metric of the cone is the one carried by `nk.link`; `alg` must present the
    same structure constants.

    Raises:
        NKViolation: nk fails the nearly Kähler equations or a certification identity.
    """
    if not np.allclose(alg.constants, nk.link.constants):
        raise NKViolation("SU(3) structure was solved on a different algebra")
    link = nk.link
    residuals = nk_residuals(link, nk.omega, nk.re_omega3, nk.im_omega3)
    worst = max(residuals, key=residuals.get)
    if residuals[worst] > tol:
        raise NKViolation(f"nearly Kähler residual {worst} = {residuals[worst]:.3e}")

    omega2 = nk.omega.wedge(nk.omega).coeffs
    phi_c = ConeForm.of(ConeTerm(3, 0, 0, alpha=-nk.omega.coeffs, beta=nk.re_omega3.coeffs))
    psi_c = ConeForm.of(ConeTerm(4, 0, 0, alpha=-nk.im_omega3.coeffs, beta=-0.5 * omega2))
    cone = ConeG2(link, nk, phi_c, psi_c)

    checks = {
        "d(phi_C)": cone_d(link, phi_c).max_abs(),
        "d(psi_C)": cone_d(link, psi_c).max_abs(),
        "*phi_C - psi_C": (cone_star(link, phi_c) - psi_c).max_abs(),
    }
    for name, value in checks.items():
        if value > 10 * tol:
            raise NKViolation(f"{name} = {value:.3e}")
    logger.debug("cone G2 certified: %s", checks)
    return cone


def theta_crosscheck(cone: ConeG2, r: float = 1.0) -> float:
    """max |Θ(φ_C) − ψ_C| at radius r in an orthonormal coframe."""
    structure, psi = cone.pointwise_structure(r)
    return float(np.max(np.abs(structure.psi.coeffs - psi.coeffs)))
