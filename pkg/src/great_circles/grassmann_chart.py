"""The Hom(P, P^perp) chart on oriented 2-planes in R^{2n+2}.

Planes near a fixed oriented plane ``P`` are graphs of linear maps
``P -> P^perp``; with orthonormal bases ``U1, U2`` of ``P`` and
``V1..V2n`` of ``P^perp`` such a map is a ``2n x 2`` matrix whose first
column is the image of ``U1`` and second the image of ``U2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .matrix_core import DimensionError, has_real_eigenvalue

ORTHO_TOL = 1e-12
RANK_TOL = 1e-9


class ChartDomainError(ValueError):
    """The plane is not a graph over ``P`` with orientation-preserving projection."""


@dataclass(frozen=True)
class OrientedPlane:
    """Oriented 2-plane through the origin, given by an ordered orthonormal basis."""

    basis: np.ndarray  # shape (2, ambient_dim)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != 2:
            raise DimensionError(f"plane basis must have shape (2, m), got {b.shape}")
        gram = b @ b.T
        if np.max(np.abs(gram - np.eye(2))) > ORTHO_TOL:
            raise ValueError("plane basis is not orthonormal")
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_vectors(cls, u, v) -> OrientedPlane:
        """Gram-Schmidt on ``(u, v)``, keeping the order (and thus orientation)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        e1 = u / np.linalg.norm(u)
        w = v - (e1 @ v) * e1
        # second pass keeps orthogonality at the 1e-16 level
        w = w - (e1 @ w) * e1
        norm = np.linalg.norm(w)
        if norm == 0:
            raise ValueError("vectors are linearly dependent")
        return cls(np.vstack([e1, w / norm]))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]


def standard_plane(n: int) -> OrientedPlane:
    """``P = span(e_0, e_1)`` in R^{2n+2}."""
    return OrientedPlane(np.eye(2 * n + 2)[:2])


def standard_frame(n: int) -> np.ndarray:
    """Rows ``e_2 .. e_{2n+1}``: an oriented orthonormal basis of ``P^perp``."""
    return np.eye(2 * n + 2)[2:]


def _check_frame(plane: OrientedPlane, frame) -> np.ndarray:
    frame = np.asarray(frame, dtype=float)
    m = plane.ambient_dim
    if frame.shape != (m - 2, m):
        raise DimensionError(f"frame must have shape {(m - 2, m)}, got {frame.shape}")
    full = np.vstack([plane.basis, frame])
    if np.max(np.abs(full @ full.T - np.eye(m))) > 1e-10:
        raise ValueError("frame is not an orthonormal basis of the orthogonal complement")
    if np.linalg.det(full) < 0:
        raise ValueError("frame orientation disagrees with the ambient orientation")
    return frame


def graph_plane(plane: OrientedPlane, hom, frame) -> OrientedPlane:
    """The plane spanned by ``U1 + L(U1), U2 + L(U2)``."""
    frame = _check_frame(plane, frame)
    hom = np.asarray(hom, dtype=float)
    if hom.shape != (frame.shape[0], 2):
        raise DimensionError(f"Hom element must have shape {(frame.shape[0], 2)}, got {hom.shape}")
    u1, u2 = plane.basis
    image = hom.T @ frame  # row k is L(U_k) in ambient coordinates
    return OrientedPlane.from_vectors(u1 + image[0], u2 + image[1])


def plane_to_hom(plane: OrientedPlane, other: OrientedPlane, frame) -> np.ndarray:
    """The unique ``L`` whose graph is ``other``.

    If ``other`` has basis rows ``p_a = sum_b M[a,b] U_b + sum_i N[i,a] V_i``
    then ``L M^T = N``.
    """
    frame = _check_frame(plane, frame)
    if other.ambient_dim != plane.ambient_dim:
        raise DimensionError("planes live in different ambient spaces")
    m = other.basis @ plane.basis.T
    n_mat = frame @ other.basis.T
    det = np.linalg.det(m)
    if det <= 1e-12:
        raise ChartDomainError(
            "plane is outside the chart domain: its projection to P is singular or orientation-reversing"
        )
    return np.linalg.solve(m, n_mat.T).T


def in_bad_set(plane: OrientedPlane, other: OrientedPlane, tol: float = RANK_TOL) -> bool:
    """True iff the two planes share at least a line."""
    if other.ambient_dim != plane.ambient_dim:
        raise DimensionError("planes live in different ambient spaces")
    sv = np.linalg.svd(np.vstack([plane.basis, other.basis]), compute_uv=False)
    return bool(sv[-1] <= tol * sv[0])


def rank(a, tol: float = RANK_TOL) -> int:
    sv = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


class Transversality(NamedTuple):
    transverse: bool
    matrix: Optional[np.ndarray]


def as_tangent_subspace(basis) -> np.ndarray:
    """Validate a list of ``2n`` Hom elements spanning a ``2n``-dim subspace."""
    t = np.asarray(basis, dtype=float)
    if t.ndim != 3 or t.shape[2] != 2 or t.shape[0] != t.shape[1] or t.shape[0] % 2:
        raise DimensionError(f"tangent basis must have shape (2n, 2n, 2), got {t.shape}")
    flat = t.reshape(t.shape[0], -1)
    if rank(flat) < t.shape[0]:
        raise ValueError("tangent basis elements are linearly dependent")
    return t


def transverse_to_bad_cone(basis) -> Transversality:
    """Decide whether a ``2n``-dim subspace of Hom(P, P^perp) misses the bad cone.

    The subspace must meet both column spaces only in 0, which makes it the
    graph of an isomorphism ``M`` from first to second column space; it is
    then transverse iff ``M`` has no real eigenvalues.
    """
    t = as_tangent_subspace(basis)
    first = t[:, :, 0].T  # column j = first column of basis element j
    second = t[:, :, 1].T
    dim = first.shape[0]
    if rank(first) < dim or rank(second) < dim:
        return Transversality(False, None)
    m = np.linalg.solve(first.T, second.T).T  # M @ first = second
    return Transversality(not has_real_eigenvalue(m), m)


def tangent_basis_from_twisting(a) -> np.ndarray:
    """Basis ``dT/dx_j`` of the tangent space at ``P``: columns ``(e_j, A[:, j])``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"twisting matrix must be square, got shape {a.shape}")
    dim = a.shape[0]
    basis = np.zeros((dim, dim, 2))
    for j in range(dim):
        basis[j, j, 0] = 1.0
        basis[j, :, 1] = a[:, j]
    return basis
