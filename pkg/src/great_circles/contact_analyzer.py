"""Contact condition at the base point of a germ.

In the coordinates ``(x, t) -> S(x, t) = P(x) cos t + Q(x) sin t`` the
one-form dual to the unit fibre direction is

    alpha = sum_j a_j(x, t) dx_j + dt,
    a_j = -<P, Q_j> sin^2 t + <Q, P_j> cos^2 t,

and at the origin ``d alpha = sum_{j<k} b_jk dx_j ^ dx_k`` with
``b_jk = df_k/dx_j - df_j/dx_k``.  The distribution orthogonal to the
fibres is contact there iff ``(d alpha)^n = n! Pf(B) dx_1 ^ ... ^ dx_2n``
is nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exterior_forms import AlternatingForm, bivector_from_skew, power, top_coefficient
from .fibration_germ import (
    FD_STEP,
    GermSpec,
    base_point,
    is_local_fibration,
    p_partials,
    q_partials,
    q_point,
    twisting_matrix,
    twisting_matrix_exact,
    validate_germ,
)
from .matrix_core import exact_spectrum, pfaffian


@dataclass(frozen=True)
class ContactReport:
    n: int
    twisting: np.ndarray
    spectrum: list  # (eigenvalue, multiplicity) pairs
    skew_part: np.ndarray
    pfaffian_value: float
    contact_defect: float
    is_local_fibration: bool
    is_contact_at_origin: bool
    contact_tol: float

    @property
    def headline(self) -> bool:
        """Local fibration whose orthogonal distribution is not contact."""
        return self.is_local_fibration and not self.is_contact_at_origin

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, mult in self.spectrum for _ in range(mult)])

    def real_eigenvalues(self, tol: float = 1e-9) -> list[float]:
        return [lam.real for lam, _ in self.spectrum if abs(lam.imag) <= tol * (1 + abs(lam))]


def skew_part(twisting) -> np.ndarray:
    """``B = A - A^T`` with ``A = (df_k/dx_j)``, the transpose of the twisting matrix."""
    a = np.asarray(twisting, dtype=float).T
    return a - a.T


def contact_tol(b, n: int) -> float:
    norm_inf = float(np.max(np.sum(np.abs(b), axis=1))) if b.size else 0.0
    return 1e-9 * max(1.0, norm_inf**n)


def alpha_coefficients(g: GermSpec, x, t: float) -> np.ndarray:
    """``(a_1, ..., a_2n, 1)``: coefficients of alpha on ``dx_1..dx_2n, dt``."""
    p = base_point(g, x)
    q = q_point(g, x)
    pj = p_partials(g, x)
    qj = q_partials(g, x)
    s2, c2 = np.sin(t) ** 2, np.cos(t) ** 2
    a = -(qj @ p) * s2 + (pj @ q) * c2
    return np.append(a, 1.0)


def d_alpha_at_origin(g: GermSpec) -> AlternatingForm:
    return bivector_from_skew(skew_part(twisting_matrix(g)))


def contact_defect(g: GermSpec) -> float:
    """Top coefficient of ``(d alpha)^n`` at the origin."""
    return float(top_coefficient(power(d_alpha_at_origin(g), g.n)))


def analyze(g: GermSpec) -> ContactReport:
    validate_germ(g)
    a = twisting_matrix(g)
    b = skew_part(a)
    exact = np.array(twisting_matrix_exact(g), dtype=object).T
    pf = float(pfaffian(exact - exact.T))
    tol = contact_tol(b, g.n)
    return ContactReport(
        n=g.n,
        twisting=a,
        spectrum=exact_spectrum(np.array(twisting_matrix_exact(g), dtype=object)),
        skew_part=b,
        pfaffian_value=pf,
        contact_defect=math.factorial(g.n) * pf,
        is_local_fibration=is_local_fibration(g),
        is_contact_at_origin=abs(pf) > tol,
        contact_tol=tol,
    )


def d_alpha_fd(g: GermSpec, step: float = FD_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference ``d alpha`` at ``(0, 0)``.

    Returns the skew matrix of x-x components ``da_k/dx_j - da_j/dx_k`` and
    the vector of x-t components ``da_j/dt``.
    """
    dim = g.dim
    zero = np.zeros(dim)
    grad = np.zeros((dim, dim))  # grad[j, k] = da_k/dx_j
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = step
        grad[j] = (alpha_coefficients(g, e, 0.0)[:dim] - alpha_coefficients(g, -e, 0.0)[:dim]) / (2 * step)
    dt = (alpha_coefficients(g, zero, step)[:dim] - alpha_coefficients(g, zero, -step)[:dim]) / (2 * step)
    return grad - grad.T, dt


def validate_d_alpha_fd(g: GermSpec, step: float = FD_STEP) -> float:
    """Max deviation of the finite-difference ``d alpha`` from the closed form."""
    xx, xt = d_alpha_fd(g, step)
    closed = skew_part(twisting_matrix(g))
    return float(max(np.max(np.abs(xx - closed)), np.max(np.abs(xt), initial=0.0)))


def alpha_prime_check(g: GermSpec, tol: float = 1e-10) -> bool:
    """``alpha' = sum f_k dx_k + dt`` agrees with alpha to first order at the origin.

    Its differential is built straight from the twist-function gradients at 0,
    bypassing the twisting-matrix path, and compared with ``d alpha``.
    """
    zero = np.zeros(g.dim)
    jac = g.twist_jacobian(zero)  # jac[k, j] = df_k/dx_j
    d_alpha_prime = AlternatingForm(
        g.dim,
        2,
        {(j, k): jac[k, j] - jac[j, k] for j in range(g.dim) for k in range(j + 1, g.dim)},
    )
    same_d = d_alpha_prime.max_abs_diff(d_alpha_at_origin(g)) <= tol
    is_dt = float(np.max(np.abs(g.twist_values(zero)), initial=0.0)) <= tol
    return bool(same_d and is_dt)
