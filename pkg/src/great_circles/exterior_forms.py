"""Alternating multilinear forms on R^m at a single point.

A form of degree k is stored sparsely as a mapping from strictly increasing
k-tuples of 0-based indices to coefficients; missing tuples are zero.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .matrix_core import DimensionError, as_skew


def _sort_sign(indices: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    if len(set(indices)) != len(indices):
        return 0, ()
    idx = list(indices)
    sign = 1
    # insertion sort, counting swaps
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class AlternatingForm:
    """Degree-``degree`` exterior form on R^``ambient_dim``."""

    __slots__ = ("ambient_dim", "degree", "coeffs")

    def __init__(self, ambient_dim: int, degree: int, coeffs=None):
        if ambient_dim < 1:
            raise DimensionError("ambient dimension must be positive")
        if not 0 <= degree <= ambient_dim:
            raise DimensionError(f"degree {degree} out of range for R^{ambient_dim}")
        self.ambient_dim = ambient_dim
        self.degree = degree
        self.coeffs: dict[tuple[int, ...], float] = {}
        for key, value in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree or any(not 0 <= i < ambient_dim for i in key):
                raise DimensionError(f"index tuple {key} invalid for degree {degree} on R^{ambient_dim}")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"index tuple {key} must be strictly increasing")
            if value != 0:
                self.coeffs[key] = value

    @classmethod
    def basis(cls, ambient_dim: int, *indices: int) -> AlternatingForm:
        """``dx_i1 ^ dx_i2 ^ ...`` for 0-based indices in any order."""
        sign, key = _sort_sign(tuple(indices))
        if sign == 0:
            return cls(ambient_dim, len(indices))
        return cls(ambient_dim, len(indices), {key: sign})

    @classmethod
    def zero(cls, ambient_dim: int, degree: int) -> AlternatingForm:
        return cls(ambient_dim, degree)

    def __getitem__(self, key) -> float:
        return self.coeffs.get(tuple(key), 0)

    def __add__(self, other: AlternatingForm) -> AlternatingForm:
        self._check_same_space(other)
        if self.degree != other.degree:
            raise DimensionError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for key, value in other.coeffs.items():
            out[key] = out.get(key, 0) + value
        return AlternatingForm(self.ambient_dim, self.degree, out)

    def __mul__(self, scalar) -> AlternatingForm:
        return AlternatingForm(self.ambient_dim, self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other: AlternatingForm) -> AlternatingForm:
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlternatingForm):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        return f"AlternatingForm(ambient_dim={self.ambient_dim}, degree={self.degree}, coeffs={self.coeffs})"

    def _check_same_space(self, other: AlternatingForm) -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError(
                f"forms live on R^{self.ambient_dim} and R^{other.ambient_dim}"
            )

    def max_abs_diff(self, other: AlternatingForm) -> float:
        self._check_same_space(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(float(self[k]) - float(other[k])) for k in keys), default=0.0)


def wedge(f: AlternatingForm, g: AlternatingForm) -> AlternatingForm:
    """Exterior product with shuffle signs.

    If the degrees add past the ambient dimension the result is the zero form
    of top degree (the product vanishes identically there).
    """
    f._check_same_space(g)
    m = f.ambient_dim
    degree = f.degree + g.degree
    if degree > m:
        return AlternatingForm(m, m)
    out: dict[tuple[int, ...], float] = {}
    for kf, vf in f.coeffs.items():
        for kg, vg in g.coeffs.items():
            sign, key = _sort_sign(kf + kg)
            if sign == 0:
                continue
            out[key] = out.get(key, 0) + sign * vf * vg
    return AlternatingForm(m, degree, out)


def power(f: AlternatingForm, n: int) -> AlternatingForm:
    """n-fold wedge of a 2-form with itself."""
    if f.degree != 2:
        raise DimensionError(f"power is defined here for 2-forms, got degree {f.degree}")
    if n < 1:
        raise ValueError("power needs n >= 1")
    if 2 * n > f.ambient_dim:
        return AlternatingForm(f.ambient_dim, f.ambient_dim)
    out = f
    for _ in range(n - 1):
        out = wedge(out, f)
    return out


def bivector_from_skew(b) -> AlternatingForm:
    """``sum_{i<j} b_ij e_i ^ e_j`` for a skew matrix ``b``."""
    arr = as_skew(b)
    dim = arr.shape[0]
    coeffs = {(i, j): arr[i, j] for i, j in combinations(range(dim), 2)}
    return AlternatingForm(dim, 2, coeffs)


def skew_from_bivector(f: AlternatingForm) -> np.ndarray:
    if f.degree != 2:
        raise DimensionError("need a 2-form")
    m = f.ambient_dim
    out = np.zeros((m, m))
    for (i, j), v in f.coeffs.items():
        out[i, j] = v
        out[j, i] = -v
    return out


def top_coefficient(f: AlternatingForm):
    """Coefficient of ``e_1 ^ ... ^ e_m`` in a top-degree form."""
    if f.degree != f.ambient_dim:
        raise DimensionError(
            f"top coefficient needs degree == ambient dimension ({f.degree} != {f.ambient_dim})"
        )
    return f[tuple(range(f.ambient_dim))]


def pfaffian_via_bivector(b):
    """Pfaffian as the top coefficient of ``omega**n / n!``."""
    omega = bivector_from_skew(b)
    n = omega.ambient_dim // 2
    top = top_coefficient(power(omega, n))
    return top / math.factorial(n)
