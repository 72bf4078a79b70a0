"""Small dense real linear algebra.

Eigenvalue realness tests, determinants, Pfaffians by two independent
routes (perfect-matching expansion and skew normal form) and the
block-diagonal normal form of a real skew-symmetric matrix.

Matrices are plain numpy arrays.  The combinatorial Pfaffian and the
determinant also accept object arrays of :class:`fractions.Fraction`, in
which case they are computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

REALNESS_TOL = 1e-9
SKEW_TOL = 1e-12
MAX_COMBINATORIAL_DIM = 8


class DimensionError(ValueError):
    """Raised when a matrix has the wrong shape for an operation."""


class SizeLimitError(ValueError):
    """Raised when an exponential-cost algorithm is asked for too large an input."""


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate ``a`` as a finite 2-d matrix.

    Object arrays (exact fractions) are passed through unchanged; everything
    else is converted to float64.
    """
    arr = np.asarray(a)
    if arr.dtype != object:
        arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not _is_exact(arr) and not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def as_skew(b, *, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate ``b`` as an even-dimensional skew-symmetric matrix.

    Exact input must satisfy ``B^T = -B`` exactly; float input within ``tol``
    (absolute, entrywise).  The error message names the first offending pair.
    """
    arr = as_matrix(b, square=True)
    dim = arr.shape[0]
    if dim % 2:
        raise DimensionError(f"skew matrix must have even dimension, got {dim}")
    for i in range(dim):
        for j in range(i, dim):
            s = arr[i, j] + arr[j, i]
            bad = s != 0 if _is_exact(arr) else abs(s) > tol
            if bad:
                raise ValueError(
                    f"matrix is not skew-symmetric: entries ({i + 1},{j + 1}) and "
                    f"({j + 1},{i + 1}) are {arr[i, j]} and {arr[j, i]}"
                )
    return arr


def skew_from_upper(dim: int, upper) -> np.ndarray:
    """Build a full skew matrix from its strict upper triangle.

    ``upper`` lists ``b_ij`` for ``i < j`` in row-major order, e.g.
    ``(b12, b13, b14, b23, b24, b34)`` for ``dim == 4``.
    """
    upper = list(upper)
    if dim % 2 or dim <= 0:
        raise DimensionError(f"skew matrix must have positive even dimension, got {dim}")
    if len(upper) != dim * (dim - 1) // 2:
        raise DimensionError(f"need {dim * (dim - 1) // 2} upper entries, got {len(upper)}")
    exact = any(isinstance(v, Fraction) for v in upper)
    zero = Fraction(0) if exact else 0.0
    out = np.full((dim, dim), zero, dtype=object if exact else float)
    it = iter(upper)
    for i in range(dim):
        for j in range(i + 1, dim):
            v = next(it)
            out[i, j] = v
            out[j, i] = -v
    return out


def eigenvalues(a) -> np.ndarray:
    arr = as_matrix(a, square=True)
    return np.linalg.eigvals(arr.astype(float))


def exact_spectrum(a) -> list[tuple[complex, int]]:
    """Eigenvalues with algebraic multiplicities of a rational matrix.

    The characteristic polynomial is formed and factored over Q exactly; each
    irreducible factor has simple roots, which are then found numerically to
    full precision.  Unlike a dense eigensolver this stays accurate for
    defective matrices, whose eigenvalues LAPACK only resolves to about
    sqrt(machine epsilon).
    """
    import sympy

    arr = as_matrix(a, square=True)
    entries = [[sympy.Rational(str(Fraction(v))) for v in row] for row in arr.tolist()]
    lam = sympy.Symbol("lam")
    charpoly = sympy.Matrix(entries).charpoly(lam)
    _, factors = sympy.factor_list(charpoly.as_expr(), lam)
    out: list[tuple[complex, int]] = []
    for factor, mult in factors:
        for root in sympy.Poly(factor, lam).nroots(n=30):
            out.append((complex(root), int(mult)))
    out.sort(key=lambda item: (item[0].real, item[0].imag))
    return out


def has_real_eigenvalue(a, tol: float = REALNESS_TOL) -> bool:
    """True iff some eigenvalue satisfies ``|Im l| <= tol * (1 + |l|)``."""
    lam = eigenvalues(a)
    return bool(np.any(np.abs(lam.imag) <= tol * (1.0 + np.abs(lam))))


def no_real_eigs_2x2_criterion(a) -> bool:
    """Closed-form test that a 2x2 matrix has no real eigenvalues.

    Negative discriminant of the characteristic polynomial, rearranged as
    ``(a11 - a22)**2 < -4 * a12 * a21``.
    """
    arr = as_matrix(a)
    if arr.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got shape {arr.shape}")
    (a11, a12), (a21, a22) = arr.tolist()
    return bool((a11 - a22) ** 2 < -4 * a12 * a21)


@lru_cache(maxsize=None)
def perfect_matchings(dim: int) -> tuple[tuple[tuple[tuple[int, int], ...], int], ...]:
    """All perfect matchings of ``range(dim)`` with their signs.

    Each matching is a tuple of pairs ``(i, j)`` with ``i < j``, listed so
    that the first elements increase.  The sign is that of the permutation
    ``(i1 j1 i2 j2 ...)``, i.e. ``(-1)**crossings``.
    """
    if dim % 2:
        raise DimensionError("perfect matchings need an even number of points")

    def rec(points: tuple[int, ...]):
        if not points:
            yield (), 1
            return
        first, rest = points[0], points[1:]
        for k, partner in enumerate(rest):
            # pairing first with the k-th remaining point jumps over k others
            sign = -1 if k % 2 else 1
            remaining = rest[:k] + rest[k + 1:]
            for tail, tail_sign in rec(remaining):
                yield ((first, partner),) + tail, sign * tail_sign

    return tuple(rec(tuple(range(dim))))


def pfaffian_combinatorial(b):
    """Pfaffian as a signed sum over perfect matchings.

    Each of the ``(2n-1)!!`` matchings stands for ``2**n * n!`` equal terms of
    the permutation sum, so no normalising factor is needed.  Exact for
    Fraction input.  Limited to ``dim <= 8``.
    """
    arr = as_skew(b)
    dim = arr.shape[0]
    if dim > MAX_COMBINATORIAL_DIM:
        raise SizeLimitError(
            f"combinatorial Pfaffian is limited to dim <= {MAX_COMBINATORIAL_DIM} "
            f"(got {dim}); use pfaffian_normal_form instead"
        )
    entries = arr.tolist()
    total = Fraction(0) if _is_exact(arr) else 0.0
    for matching, sign in perfect_matchings(dim):
        term = sign
        for i, j in matching:
            term = term * entries[i][j]
            if term == 0:
                break
        total += term
    return total


@dataclass(frozen=True)
class SkewNormalForm:
    """Orthogonal ``rotation`` with ``rotation @ B @ rotation.T`` block diagonal.

    The 2x2 blocks are ``[[0, b_i], [-b_i, 0]]`` with ``b_i >= 0``.
    """

    rotation: np.ndarray
    block_values: np.ndarray
    rotation_det_sign: int

    def block_matrix(self) -> np.ndarray:
        n = len(self.block_values)
        out = np.zeros((2 * n, 2 * n))
        for k, v in enumerate(self.block_values):
            out[2 * k, 2 * k + 1] = v
            out[2 * k + 1, 2 * k] = -v
        return out


def skew_normal_form(b) -> SkewNormalForm:
    """Block-diagonalise a real skew matrix by an orthogonal change of basis.

    Uses the real Schur decomposition, which for a normal matrix is block
    diagonal: 2x2 blocks for the pairs ``+-i b`` and 1x1 zero blocks for the
    kernel.  Kernel vectors are paired up in order; blocks with negative
    upper entry get their two basis vectors swapped.
    """
    arr = as_skew(b).astype(float)
    dim = arr.shape[0]
    t, z = scipy.linalg.schur(arr, output="real")
    scale = max(1.0, float(np.max(np.abs(arr))))

    pairs: list[tuple[int, int]] = []
    singles: list[int] = []
    i = 0
    while i < dim:
        if i + 1 < dim and abs(t[i + 1, i]) > 1e-13 * scale:
            pairs.append((i, i + 1))
            i += 2
        else:
            singles.append(i)
            i += 1
    pairs.extend(zip(singles[0::2], singles[1::2]))

    cols: list[int] = []
    values: list[float] = []
    for p, q in pairs:
        v = 0.5 * (t[p, q] - t[q, p])
        if v < 0:
            p, q, v = q, p, -v
        cols.extend((p, q))
        values.append(v)

    rotation = z[:, cols].T
    det = np.linalg.det(rotation)
    return SkewNormalForm(
        rotation=rotation,
        block_values=np.array(values),
        rotation_det_sign=1 if det > 0 else -1,
    )


def pfaffian_normal_form(b) -> float:
    """Pfaffian as ``det(C) * prod(b_i)`` from the skew normal form ``C B C^T``."""
    nf = skew_normal_form(b)
    return float(nf.rotation_det_sign * np.prod(nf.block_values))


def pfaffian(b):
    """Pfaffian, combinatorial for ``dim <= 8`` (exact on Fractions), else normal form."""
    arr = as_skew(b)
    if arr.shape[0] <= MAX_COMBINATORIAL_DIM:
        return pfaffian_combinatorial(arr)
    return pfaffian_normal_form(arr)


def determinant(a):
    """Determinant by LU elimination with partial pivoting.

    Works on plain Python scalars so Fraction input stays exact; pivots are
    chosen by largest absolute value.
    """
    arr = as_matrix(a, square=True)
    exact = _is_exact(arr)
    rows = [list(r) for r in arr.tolist()]
    n = len(rows)
    det = Fraction(1) if exact else 1.0
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(rows[r][k]))
        if rows[p][k] == 0:
            return Fraction(0) if exact else 0.0
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            det = -det
        pivot = rows[k][k]
        det = det * pivot
        for r in range(k + 1, n):
            factor = rows[r][k] / pivot
            if factor == 0:
                continue
            row_r, row_k = rows[r], rows[k]
            for c in range(k + 1, n):
                row_r[c] = row_r[c] - factor * row_k[c]
    return det


def block_diag(*blocks) -> np.ndarray:
    """Block-diagonal float matrix from square blocks."""
    return scipy.linalg.block_diag(*[np.asarray(blk, dtype=float) for blk in blocks])


def random_skew(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(scale=scale, size=(dim, dim))
    return m - m.T


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2))
