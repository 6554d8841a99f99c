"""Critical rates of d + d*, closed-and-coclosed systems and Δ on the cone.

A homogeneous form of order λ is stacked into its (α, β) coordinates degree by degree.
The cone operators then act by a polynomial matrix pencil M(λ) = Σ λ^i C_i whose output
is the stack of the image at order λ − order_shift. Critical rates are the λ where
M(λ) loses rank; everything here runs on the invariant subcomplex of a link.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, comb
from typing import Iterator, Literal

import numpy as np
from scipy import linalg, optimize

from ..errors import EndpointCritical, UnexpectedKernel
from .cone_calculus import (
    CONE_DIM,
    ConeForm,
    ConeG2,
    ConeTerm,
    Slot,
    evaluate_at,
    orthonormal_frame,
    same_order,
)
from .exterior import dimension
from .g2_pointwise import project3, type_components
from .link_algebra import LINK_DIM, CochainComplex, LinkAlgebra, as_complex

logger = logging.getLogger(__name__)

SCAN_STEP = 0.01
SIGMA_ZERO = 1e-8
RATE_REFINE = 1e-9
MAX_LOG_POWER = 4

EVEN_DEGREES = (0, 2, 4, 6)
ODD_DEGREES = (1, 3, 5, 7)

Parity = Literal["even", "odd"]
Operator = Literal["laplacian", "closed_coclosed"]


@dataclass(frozen=True)
class Block:
    """Position of one (cone degree, slot) coefficient block inside a stack."""

    degree: int
    slot: Slot
    start: int
    size: int

    @property
    def link_degree(self) -> int:
        return self.degree - 1 if self.slot == "dr" else self.degree

    @property
    def span(self) -> slice:
        return slice(self.start, self.start + self.size)


def _layout(degrees: tuple[int, ...]) -> tuple[Block, ...]:
    blocks, start = [], 0
    for j in sorted(degrees):
        for slot, link_degree in (("dr", j - 1), ("plain", j)):
            size = dimension(LINK_DIM, link_degree)
            blocks.append(Block(j, slot, start, size))
            start += size
    return tuple(blocks)


def _find(blocks: tuple[Block, ...], degree: int, slot: Slot) -> Block | None:
    return next((b for b in blocks if b.degree == degree and b.slot == slot), None)


def _fill(matrix: np.ndarray, row: Block, col: Block, value) -> None:
    if row.size == 0 or col.size == 0:
        return
    matrix[row.span, col.span] += value


@dataclass(frozen=True, eq=False)
class RatePencil:
    """M(λ) = Σ λ^i coefficients[i], from input stacks at order λ to outputs at λ − order_shift."""

    label: str
    coefficients: tuple[np.ndarray, ...]
    inputs: tuple[Block, ...]
    outputs: tuple[Block, ...]
    order_shift: int
    complex: CochainComplex

    def __call__(self, lam: float) -> np.ndarray:
        out = np.zeros_like(self.coefficients[-1])
        for coeff in reversed(self.coefficients):
            out = out * lam + coeff
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients[0].shape

    def taylor(self, lam: float, i: int) -> np.ndarray:
        """M^{(i)}(λ)/i!."""
        out = np.zeros_like(self.coefficients[0])
        for n, coeff in enumerate(self.coefficients):
            if n >= i:
                out = out + comb(n, i) * lam ** (n - i) * coeff
        return out

    def singular_values(self, lam: float) -> np.ndarray:
        return linalg.svdvals(self(lam))

    def sigma_min(self, lam: float) -> float:
        rows, cols = self.shape
        if rows < cols:
            return 0.0
        return float(self.singular_values(lam)[-1])

    def kernel(self, lam: float, tol: float = SIGMA_ZERO) -> np.ndarray:
        """Orthonormal kernel basis (columns) of M(λ), singular values below tol."""
        return _null_space(self(lam), tol)

    def kernel_dim(self, lam: float, tol: float = SIGMA_ZERO) -> int:
        return self.kernel(lam, tol).shape[1]

    def stack(self, w: ConeForm, order: float) -> np.ndarray:
        return _stack(self.inputs, self.shape[1], w, order)

    def stack_output(self, w: ConeForm, order: float) -> np.ndarray:
        return _stack(self.outputs, self.shape[0], w, order)

    def unstack(self, x: np.ndarray, order: float) -> ConeForm:
        terms = []
        for degree in sorted({b.degree for b in self.inputs}):
            dr, plain = _find(self.inputs, degree, "dr"), _find(self.inputs, degree, "plain")
            terms.append(ConeTerm(degree, order, 0, alpha=x[dr.span], beta=x[plain.span]))
        return ConeForm(tuple(terms))


def _null_space(matrix: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = linalg.svd(matrix)
    rank = int(np.sum(s >= tol))
    return vh[rank:].conj().T


def _stack(blocks: tuple[Block, ...], size: int, w: ConeForm, order: float) -> np.ndarray:
    x = np.zeros(size)
    for term in w:
        dr, plain = _find(blocks, term.degree, "dr"), _find(blocks, term.degree, "plain")
        if dr is None or term.log_power != 0 or not same_order(term.order, order):
            raise ValueError(
                f"term of degree {term.degree}, order {term.order}, log power {term.log_power} "
                f"does not fit a stack of order {order}"
            )
        x[dr.span] += term.alpha
        x[plain.span] += term.beta
    return x


def _fill_dirac(cx: CochainComplex, c0, c1, inputs, outputs) -> None:
    """Rows of d and d* for every input degree j, where the output layout has room.

    d:  dr-row (λ+j)β − dα,  plain-row dβ               (degree j+1)
    d*: dr-row −d*α,         plain-row −(λ−j+7)α + d*β   (degree j−1)
    """
    for j in sorted({b.degree for b in inputs}):
        a, b = _find(inputs, j, "dr"), _find(inputs, j, "plain")
        up_dr, up_plain = _find(outputs, j + 1, "dr"), _find(outputs, j + 1, "plain")
        if up_dr is not None:
            _fill(c1, up_dr, b, np.eye(b.size))
            _fill(c0, up_dr, b, j * np.eye(b.size))
            _fill(c0, up_dr, a, -cx.d(j - 1))
            _fill(c0, up_plain, b, cx.d(j))
        down_dr, down_plain = _find(outputs, j - 1, "dr"), _find(outputs, j - 1, "plain")
        if down_dr is not None:
            _fill(c0, down_dr, a, -cx.codiff(j - 1))
            _fill(c1, down_plain, a, -np.eye(a.size))
            _fill(c0, down_plain, a, -(7 - j) * np.eye(a.size))
            _fill(c0, down_plain, b, cx.codiff(j))


def assemble_dirac_pencil(
    link: LinkAlgebra | CochainComplex, parity: Parity = "even"
) -> RatePencil:
    """Pencil of d + d* from even (or odd) degree forms of order λ to the other parity."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    cx = as_complex(link)
    source, target = EVEN_DEGREES, ODD_DEGREES
    if parity == "odd":
        source, target = target, source
    inputs, outputs = _layout(source), _layout(target)
    shape = (sum(b.size for b in outputs), sum(b.size for b in inputs))
    c0, c1 = np.zeros(shape), np.zeros(shape)
    _fill_dirac(cx, c0, c1, inputs, outputs)
    return RatePencil(f"dirac-{parity}", (c0, c1), inputs, outputs, 1, cx)


def assemble_closed_coclosed_pencil(link: LinkAlgebra | CochainComplex, k: int) -> RatePencil:
    """Rectangular pencil whose kernel is the closed and coclosed degree-k forms of order λ."""
    if not 0 <= k <= CONE_DIM:
        raise ValueError(f"degree {k} outside 0..7")
    cx = as_complex(link)
    inputs = _layout((k,))
    outputs = _layout(tuple(j for j in (k - 1, k + 1) if 0 <= j <= CONE_DIM))
    shape = (sum(b.size for b in outputs), sum(b.size for b in inputs))
    c0, c1 = np.zeros(shape), np.zeros(shape)
    _fill_dirac(cx, c0, c1, inputs, outputs)
    return RatePencil(f"closed-coclosed-{k}", (c0, c1), inputs, outputs, 1, cx)


def assemble_laplacian_pencil(link: LinkAlgebra | CochainComplex, k: int) -> RatePencil:
    """Quadratic pencil of Δ_C on degree-k forms:

    dr-row:    Δα − (k−2)(7−k)α − 2d*β − (λ² + 5λ)α
    plain-row: Δβ − k(5−k)β − 2dα − (λ² + 5λ)β
    """
    if not 0 <= k <= CONE_DIM:
        raise ValueError(f"degree {k} outside 0..7")
    cx = as_complex(link)
    blocks = _layout((k,))
    a, b = _find(blocks, k, "dr"), _find(blocks, k, "plain")
    n = a.size + b.size
    c0 = np.zeros((n, n))
    _fill(c0, a, a, cx.laplacian(k - 1) - (k - 2) * (7 - k) * np.eye(a.size))
    _fill(c0, a, b, -2.0 * cx.codiff(k))
    _fill(c0, b, a, -2.0 * cx.d(k - 1))
    _fill(c0, b, b, cx.laplacian(k) - k * (5 - k) * np.eye(b.size))
    return RatePencil(f"laplacian-{k}", (c0, -5.0 * np.eye(n), -np.eye(n)), blocks, blocks, 2, cx)


@dataclass(frozen=True, eq=False)
class CriticalRate:
    rate: float
    sigma: float
    kernel_dim: int
    kernel: tuple[ConeForm, ...]
    chain_length: int


@dataclass(frozen=True, eq=False)
class CriticalRateSet:
    """Critical rates of one pencil on [a, b] with the σ_min scan that found them."""

    label: str
    interval: tuple[float, float]
    rates: tuple[CriticalRate, ...]
    scan: tuple[tuple[float, float, int], ...]

    def __iter__(self) -> Iterator[CriticalRate]:
        return iter(self.rates)

    def __len__(self) -> int:
        return len(self.rates)

    def values(self) -> list[float]:
        return [r.rate for r in self.rates]


def _scan(pencil: RatePencil, grid: np.ndarray, workers: int) -> list[float]:
    if workers <= 1:
        return [pencil.sigma_min(lam) for lam in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(pencil.sigma_min, grid))


def critical_rates(
    pencil: RatePencil,
    interval: tuple[float, float],
    step: float = SCAN_STEP,
    sigma_zero: float = SIGMA_ZERO,
    refine: float = RATE_REFINE,
    workers: int = 1,
    max_log_power: int = MAX_LOG_POWER,
) -> CriticalRateSet:
    """All λ in [a, b] with σ_min(M(λ)) = 0.

    σ_min is sampled on a grid of the given step; every local minimum is refined by a
    bounded scalar minimization and accepted when it drops below sigma_zero.

    Raises:
        EndpointCritical: a or b is itself critical.
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError(f"empty interval [{a}, {b}]")
    n = max(2, ceil((b - a) / step))
    grid = np.linspace(a, b, n + 1)
    sigmas = _scan(pencil, grid, workers)
    for endpoint, value in ((a, sigmas[0]), (b, sigmas[-1])):
        if value < sigma_zero:
            raise EndpointCritical(
                f"{pencil.label}: interval endpoint {endpoint} is critical (σ_min = {value:.3e})",
                endpoint,
            )

    roots: list[tuple[float, float]] = []
    for i in range(n + 1):
        left = sigmas[i - 1] if i > 0 else np.inf
        right = sigmas[i + 1] if i < n else np.inf
        if sigmas[i] > left or sigmas[i] > right:
            continue
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n)]
        fit = optimize.minimize_scalar(
            pencil.sigma_min, bounds=(lo, hi), method="bounded", options={"xatol": refine * 1e-3}
        )
        if fit.fun < sigma_zero and not any(abs(fit.x - r) < 1e3 * refine for r, _ in roots):
            roots.append((float(fit.x), float(fit.fun)))
    roots.sort()

    rates = []
    for lam, sigma in roots:
        kernel = pencil.kernel(lam, sigma_zero)
        forms = tuple(pencil.unstack(v, lam) for v in kernel.T)
        chain = log_chain_check(pencil, lam, max_log_power, sigma_zero)
        rates.append(CriticalRate(lam, sigma, kernel.shape[1], forms, chain))
        logger.debug(
            "%s: critical rate %.12g (dim %d, chain %d)", pencil.label, lam, kernel.shape[1], chain
        )

    scan = tuple(
        (float(lam), float(s), int(s < sigma_zero)) for lam, s in zip(grid, sigmas)
    )
    logger.info("%s on [%g, %g]: %d critical rates", pencil.label, a, b, len(rates))
    return CriticalRateSet(pencil.label, (a, b), tuple(rates), scan)


def _toeplitz(pencil: RatePencil, lam: float, ell: int) -> np.ndarray:
    """Block upper-triangular Toeplitz matrix of the log-chain equations up to power ℓ.

    u = Σ_j (log r)^j/j! y_j solves the homogeneous system iff Σ_i M^{(i)}(λ)/i! y_{p+i} = 0
    for every p.
    """
    rows, cols = pencil.shape
    out = np.zeros(((ell + 1) * rows, (ell + 1) * cols))
    for i in range(ell + 1):
        block = pencil.taylor(lam, i)
        for p in range(ell + 1 - i):
            out[p * rows : (p + 1) * rows, (p + i) * cols : (p + i + 1) * cols] = block
    return out


def log_chain_check(
    pencil: RatePencil, lam: float, max_log_power: int = MAX_LOG_POWER, tol: float = SIGMA_ZERO
) -> int:
    """Largest log power carried by a homogeneous solution at λ; 0 when none carries logs."""
    previous = _null_space(pencil(lam), tol).shape[1]
    if previous == 0:
        return 0
    length = 0
    for ell in range(1, max_log_power + 1):
        current = _null_space(_toeplitz(pencil, lam, ell), tol).shape[1]
        if current <= previous:
            break
        length, previous = ell, current
    return length


@dataclass(frozen=True)
class ExcludedRange:
    operator: Operator
    degree: int
    interval: tuple[float, float]
    points: int
    min_sigma: float
    coverage: str = "invariant slice"


def excluded_interval(operator: Operator, k: int) -> tuple[float, float]:
    """Open interval of orders with no homogeneous kernel.

    Δ: (−5, 0), (−4, −1), (−3, −2) for min(k, 7−k) = 0, 1, 2; none for k = 3, 4.
    Closed and coclosed: between −k and k − 7.
    """
    if not 0 <= k <= CONE_DIM:
        raise ValueError(f"degree {k} outside 0..7")
    if operator == "laplacian":
        low = min(k, CONE_DIM - k)
        if low > 2:
            raise ValueError(f"no excluded range is claimed for Δ on {k}-forms")
        return (-5.0 + low, -float(low))
    if operator == "closed_coclosed":
        ends = (-float(k), float(k - CONE_DIM))
        return (min(ends), max(ends))
    raise ValueError(f"unknown operator {operator!r}")


def excluded_range_report(
    link: LinkAlgebra | CochainComplex,
    operator: Operator,
    k: int,
    step: float = SCAN_STEP,
    sigma_zero: float = SIGMA_ZERO,
    workers: int = 1,
) -> ExcludedRange:
    """Scan the open excluded interval for degree k and certify an empty kernel.

    Raises:
        UnexpectedKernel: a critical rate was found inside the interval.
    """
    a, b = excluded_interval(operator, k)
    if operator == "laplacian":
        pencil = assemble_laplacian_pencil(link, k)
    else:
        pencil = assemble_closed_coclosed_pencil(link, k)
    inner = (a + step / 2, b - step / 2)
    found = critical_rates(pencil, inner, step, sigma_zero, workers=workers)
    if len(found):
        worst = found.rates[0]
        raise UnexpectedKernel(
            f"{pencil.label}: kernel at λ = {worst.rate:.12g} inside ({a}, {b})",
            worst.rate,
            worst.sigma,
        )
    min_sigma = min(s for _, s, _ in found.scan)
    return ExcludedRange(operator, k, (a, b), len(found.scan), float(min_sigma))


@dataclass(frozen=True)
class EigenvalueIdentity:
    """Δ_Σγ = (λ+k)(λ−k+7)γ on the kernel components at one critical rate."""

    degree: int
    rate: float
    factor: float
    kernel_dim: int
    residual: float


def _split(pencil: RatePencil, x: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    return x[_find(pencil.inputs, k, "dr").span], x[_find(pencil.inputs, k, "plain").span]


def eigenvalue_identity_check(
    link: LinkAlgebra | CochainComplex,
    k: int,
    window: tuple[float, float] = (-7.75, 0.75),
    step: float = SCAN_STEP,
    sigma_zero: float = SIGMA_ZERO,
) -> list[EigenvalueIdentity]:
    cx = as_complex(link)
    pencil = assemble_closed_coclosed_pencil(cx, k)
    out = []
    for rate in critical_rates(pencil, window, step, sigma_zero):
        factor = (rate.rate + k) * (rate.rate - k + 7)
        kernel = pencil.kernel(rate.rate, sigma_zero)
        residual = 0.0
        for x in kernel.T:
            alpha, beta = _split(pencil, x, k)
            for degree, part in ((k - 1, alpha), (k, beta)):
                if part.size:
                    defect = cx.laplacian(degree) @ part - factor * part
                    residual = max(residual, float(np.max(np.abs(defect))))
        out.append(EigenvalueIdentity(k, rate.rate, factor, kernel.shape[1], residual))
    return out


def check_type27(cone: ConeG2, xi: ConeForm, tol: float = 1e-10) -> bool:
    """True iff ξ at r = 1 lies in Λ³₂₇ for φ_C, checked in an orthonormal coframe."""
    structure, _ = cone.pointwise_structure(1.0)
    frame = orthonormal_frame(cone.link.metric)
    values = evaluate_at(xi, 1.0)
    if set(values) - {3}:
        raise ValueError("check_type27 expects a 3-form")
    form = values[3].pullback(frame)
    p1, p7, _ = project3(structure, form)
    f, v = type_components(structure, form)
    logger.debug(
        "type check: |π₁| = %.3e, |π₇| = %.3e, f = %.3e, |v| = %.3e",
        p1.norm(),
        p7.norm(),
        f,
        v.norm(),
    )
    return p1.norm() < tol and p7.norm() < tol


@dataclass(frozen=True)
class MinusKClassification:
    """Kernel of the degree-k closed and coclosed system at λ = −k."""

    degree: int
    kernel_dim: int
    alpha_max: float
    harmonic_residual: float

    def passed(self, tol: float = 1e-9) -> bool:
        return self.alpha_max < tol and self.harmonic_residual < tol


def order_minus_k_classification(
    link: LinkAlgebra | CochainComplex, k: int, sigma_zero: float = SIGMA_ZERO
) -> MinusKClassification:
    cx = as_complex(link)
    pencil = assemble_closed_coclosed_pencil(cx, k)
    kernel = pencil.kernel(-float(k), sigma_zero)
    alpha_max, residual = 0.0, 0.0
    for x in kernel.T:
        alpha, beta = _split(pencil, x, k)
        alpha_max = max(alpha_max, float(np.max(np.abs(alpha), initial=0.0)))
        residual = max(residual, float(np.max(np.abs(cx.laplacian(k) @ beta), initial=0.0)))
    return MinusKClassification(k, kernel.shape[1], alpha_max, residual)


@dataclass(frozen=True)
class LogChainProbe:
    label: str
    rate: float
    sigma_min: float
    kernel_dim: int
    chain_length: int


def probe_log_chain(
    pencil: RatePencil,
    lam: float,
    sigma_zero: float = SIGMA_ZERO,
    max_log_power: int = MAX_LOG_POWER,
) -> LogChainProbe:
    """σ_min, kernel dimension and log-chain length of a pencil at one λ, without assertions."""
    return LogChainProbe(
        pencil.label,
        float(lam),
        pencil.sigma_min(lam),
        pencil.kernel_dim(lam, sigma_zero),
        log_chain_check(pencil, lam, max_log_power, sigma_zero),
    )
