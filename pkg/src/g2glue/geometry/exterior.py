"""Dense exterior algebra on R^n in the lexicographic basis of e^{i1}∧...∧e^{ik}.

A k-form is a coefficient vector of length C(n, k); basis index tuples are sorted
ascending. Every linear operation here is a matrix acting on such vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

import numpy as np


@lru_cache(maxsize=None)
def basis(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Sorted index tuples spanning Λ^k(R^n)."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: pos for pos, idx in enumerate(basis(n, k))}


def dimension(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting seq; 0 if an index repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    target = basis_index(n, p + q)
    rows_i, rows_j, dest, signs = [], [], [], []
    for i, left in enumerate(basis(n, p)):
        for j, right in enumerate(basis(n, q)):
            joined = left + right
            sign = permutation_sign(joined)
            if sign == 0:
                continue
            rows_i.append(i)
            rows_j.append(j)
            dest.append(target[tuple(sorted(joined))])
            signs.append(sign)
    return (
        np.asarray(rows_i, dtype=int),
        np.asarray(rows_j, dtype=int),
        np.asarray(dest, dtype=int),
        np.asarray(signs, dtype=float),
    )


def wedge_coeffs(n: int, a: np.ndarray, p: int, b: np.ndarray, q: int) -> np.ndarray:
    """Coefficients of a∧b for a ∈ Λ^p, b ∈ Λ^q."""
    size = dimension(n, p + q)
    if size == 0:
        return np.zeros(0)
    rows_i, rows_j, dest, signs = _wedge_table(n, p, q)
    return np.bincount(dest, weights=signs * a[rows_i] * b[rows_j], minlength=size)


def wedge_matrix(n: int, a: np.ndarray, p: int, q: int) -> np.ndarray:
    """Matrix of b ↦ a∧b from Λ^q to Λ^{p+q}."""
    out = np.zeros((dimension(n, p + q), dimension(n, q)))
    if out.size == 0:
        return out
    rows_i, rows_j, dest, signs = _wedge_table(n, p, q)
    np.add.at(out, (dest, rows_j), signs * a[rows_i])
    return out


@lru_cache(maxsize=None)
def interior_matrix(n: int, k: int, i: int) -> np.ndarray:
    """Matrix of w ↦ e_i ⌟ w from Λ^k to Λ^{k-1}."""
    out = np.zeros((dimension(n, k - 1), dimension(n, k)))
    target = basis_index(n, k - 1)
    for col, idx in enumerate(basis(n, k)):
        if i in idx:
            pos = idx.index(i)
            rest = idx[:pos] + idx[pos + 1 :]
            out[target[rest], col] = (-1) ** pos
    out.setflags(write=False)
    return out


def compound_matrix(a: np.ndarray, k: int) -> np.ndarray:
    """k-th compound: entry [I, J] = det(a[I, J]) over sorted index tuples."""
    n = a.shape[0]
    idx = np.asarray(basis(n, k), dtype=int)
    if k == 0:
        return np.ones((1, 1))
    if idx.size == 0:
        return np.zeros((0, 0))
    blocks = a[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(blocks)


def gram_matrix(metric: np.ndarray, k: int) -> np.ndarray:
    """Pointwise inner product on Λ^k induced by a metric on vectors."""
    return compound_matrix(np.linalg.inv(metric), k)


def star_matrix(metric: np.ndarray, k: int, orientation: int = 1) -> np.ndarray:
    """Hodge star Λ^k → Λ^{n-k} with a∧*b = ⟨a, b⟩ vol."""
    n = metric.shape[0]
    gram = gram_matrix(metric, k)
    root_det = float(np.sqrt(np.linalg.det(metric)))
    target = basis_index(n, n - k)
    out = np.zeros((dimension(n, n - k), dimension(n, k)))
    for row, idx in enumerate(basis(n, k)):
        rest = tuple(i for i in range(n) if i not in idx)
        out[target[rest], :] = permutation_sign(idx + rest) * orientation * root_det * gram[row, :]
    return out


def pullback_matrix(frame: np.ndarray, k: int) -> np.ndarray:
    """Coefficient transform of k-forms under the coframe change given by `frame`.

    Columns of `frame` are the new frame vectors written in the old frame.
    """
    return compound_matrix(frame, k).T


@dataclass(frozen=True, eq=False)
class Form:
    """A constant-coefficient k-form on R^dim."""

    degree: int
    coeffs: np.ndarray
    dim: int = 7

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if not 0 <= self.degree <= self.dim:
            raise ValueError(f"degree {self.degree} outside 0..{self.dim}")
        if coeffs.size != dimension(self.dim, self.degree):
            raise ValueError(
                f"a {self.degree}-form on R^{self.dim} needs "
                f"{dimension(self.dim, self.degree)} coefficients, got {coeffs.size}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, degree: int, dim: int | None = None) -> Form:
        dim = cls._default_dim() if dim is None else dim
        return cls(degree, np.zeros(dimension(dim, degree)), dim)

    @classmethod
    def from_terms(
        cls, degree: int, terms: Mapping[tuple[int, ...], float], dim: int | None = None
    ) -> Form:
        """Build from {index tuple: coefficient}; unsorted tuples pick up the permutation sign."""
        dim = cls._default_dim() if dim is None else dim
        coeffs = np.zeros(dimension(dim, degree))
        lookup = basis_index(dim, degree)
        for idx, value in terms.items():
            sign = permutation_sign(idx)
            if sign == 0:
                continue
            coeffs[lookup[tuple(sorted(idx))]] += sign * value
        return cls(degree, coeffs, dim)

    @classmethod
    def _default_dim(cls) -> int:
        return cls.__dataclass_fields__["dim"].default

    def _like(self, coeffs: np.ndarray) -> Form:
        return replace(self, coeffs=coeffs)

    def _check(self, other: Form) -> None:
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError(
                f"cannot combine a {self.degree}-form on R^{self.dim} "
                f"with a {other.degree}-form on R^{other.dim}"
            )

    def __add__(self, other: Form) -> Form:
        self._check(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: Form) -> Form:
        self._check(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> Form:
        return self._like(-self.coeffs)

    def __mul__(self, scalar: float) -> Form:
        return self._like(scalar * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> Form:
        return self._like(self.coeffs / scalar)

    def wedge(self, other: Form) -> Form:
        if self.dim != other.dim:
            raise ValueError("forms live on different spaces")
        coeffs = wedge_coeffs(self.dim, self.coeffs, self.degree, other.coeffs, other.degree)
        return replace(self, degree=self.degree + other.degree, coeffs=coeffs)

    def pullback(self, frame: np.ndarray) -> Form:
        return self._like(pullback_matrix(frame, self.degree) @ self.coeffs)

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: Form, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)


def wedge(*forms: Form) -> Form:
    result = forms[0]
    for form in forms[1:]:
        result = result.wedge(form)
    return result


def lie_differentials(constants: np.ndarray) -> list[np.ndarray]:
    """Chevalley–Eilenberg differentials d_k: Λ^k → Λ^{k+1} of a Lie coframe.

    `constants[i, j, k]` is c^i_{jk}; on 1-forms de^i = -Σ_{j<k} c^i_{jk} e^j∧e^k, extended
    as an antiderivation.
    """
    n = constants.shape[0]
    one_forms = []
    for i in range(n):
        terms = {(j, k): -constants[i, j, k] for j, k in basis(n, 2)}
        one_forms.append(Form.from_terms(2, terms, dim=n).coeffs)

    mats: list[np.ndarray] = [np.zeros((n, 1))]
    for k in range(1, n + 1):
        out = np.zeros((dimension(n, k + 1), dimension(n, k)))
        lookup_rest = basis_index(n, k - 1)
        for col, idx in enumerate(basis(n, k)):
            head, rest = idx[0], idx[1:]
            rest_vec = np.zeros(dimension(n, k - 1))
            rest_vec[lookup_rest[rest]] = 1.0
            head_vec = np.zeros(n)
            head_vec[head] = 1.0
            # d(e^h ∧ ρ) = de^h ∧ ρ − e^h ∧ dρ
            first = wedge_coeffs(n, one_forms[head], 2, rest_vec, k - 1)
            second = wedge_coeffs(n, head_vec, 1, mats[k - 1] @ rest_vec, k)
            if out.shape[0]:
                out[:, col] = first - second
        mats.append(out)
    return mats


def random_form(rng: np.random.Generator, degree: int, dim: int = 7, scale: float = 1.0) -> Form:
    return Form(degree, scale * rng.standard_normal(dimension(dim, degree)), dim)
