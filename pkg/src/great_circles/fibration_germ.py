"""Germs of great-circle families around a base circle in S^{2n+1}.

Coordinates on R^{2n+2}: ``U1 = e_0``, ``U2 = e_1``, ``V_j = e_{j+1}``.
A point ``x`` of the small ball in R^{2n} labels the circle through

    P(x) = sqrt(1 - |x|^2) U1 + sum_j x_j V_j
    Q(x) = h(x) U2 + sum_i f_i(x) V_i(x)

where ``V_i(x)`` is ``V_i`` parallel-transported along the great circle
from ``U1`` to ``P(x)``, and ``h = sqrt(1 - sum f_i^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from .matrix_core import has_real_eigenvalue

DEFAULT_RADIUS = Fraction(1, 10)
FD_STEP = 1e-4
MAX_DEGREE = 3
VALIDATION_SAMPLES = 1000


class DomainError(ValueError):
    """A point lies outside the coordinate ball."""


class GermValidityError(ValueError):
    """Twist data violate ``f(0) = 0`` or ``sum f_i^2 < 1`` on the ball."""


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in ``nvars`` variables with exact rational coefficients.

    ``terms`` maps exponent tuples to coefficients, e.g. ``{(1, 0): 1/2}`` is
    ``x_1 / 2``.
    """

    nvars: int
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != self.nvars or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent {expo} for {self.nvars} variables")
            if sum(expo) > MAX_DEGREE:
                raise ValueError(f"term {expo} exceeds the supported degree {MAX_DEGREE}")
            coeff = Fraction(coeff)
            if coeff != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + coeff
        object.__setattr__(self, "terms", {k: v for k, v in sorted(clean.items()) if v != 0})

    @classmethod
    def linear(cls, coeffs: Sequence) -> Polynomial:
        nvars = len(coeffs)
        terms = {}
        for j, c in enumerate(coeffs):
            expo = [0] * nvars
            expo[j] = 1
            terms[tuple(expo)] = c
        return cls(nvars, terms)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        total = 0.0
        for expo, coeff in self.terms.items():
            total += float(coeff) * float(np.prod(x ** np.array(expo)))
        return total

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        grad = np.zeros(self.nvars)
        for expo, coeff in self.terms.items():
            for j, e in enumerate(expo):
                if e == 0:
                    continue
                lowered = list(expo)
                lowered[j] -= 1
                grad[j] += float(coeff) * e * float(np.prod(x ** np.array(lowered)))
        return grad

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def linear_coefficients(self) -> list[Fraction]:
        out = []
        for j in range(self.nvars):
            expo = [0] * self.nvars
            expo[j] = 1
            out.append(self.terms.get(tuple(expo), Fraction(0)))
        return out


@dataclass(frozen=True)
class GermSpec:
    """Twist data ``f_1..f_2n`` on the ball of radius ``domain_radius``.

    Construct through :func:`make_germ` (or the named families) to get the
    validity checks.
    """

    n: int
    twist: tuple[Polynomial, ...]
    domain_radius: Fraction = DEFAULT_RADIUS

    @property
    def dim(self) -> int:
        return 2 * self.n

    def twist_values(self, x) -> np.ndarray:
        return np.array([f(x) for f in self.twist])

    def twist_jacobian(self, x) -> np.ndarray:
        """Row ``i`` is the gradient of ``f_i`` at ``x``."""
        return np.array([f.gradient(x) for f in self.twist])


def _ball_samples(dim: int, radius: float, count: int) -> np.ndarray:
    """Deterministic quasi-random points filling the ball, plus their radial
    projections onto the boundary sphere."""
    sampler = qmc.Halton(d=dim, scramble=False)
    pts: list[np.ndarray] = []
    while sum(len(p) for p in pts) < count:
        cube = 2.0 * sampler.random(4 * count) - 1.0
        pts.append(cube[np.sum(cube**2, axis=1) <= 1.0])
    inner = np.concatenate(pts)[:count]
    norms = np.linalg.norm(inner, axis=1, keepdims=True)
    boundary = inner[norms[:, 0] > 0] / norms[norms[:, 0] > 0]
    return radius * np.concatenate([inner, boundary])


def validate_germ(g: GermSpec) -> GermSpec:
    if g.n < 1:
        raise GermValidityError("n must be a positive integer")
    if len(g.twist) != g.dim:
        raise GermValidityError(f"need {g.dim} twist functions, got {len(g.twist)}")
    for i, f in enumerate(g.twist, start=1):
        if f.nvars != g.dim:
            raise GermValidityError(f"f_{i} has {f.nvars} variables, expected {g.dim}")
        if f.constant_term() != 0:
            raise GermValidityError(f"f_{i}(0) = {f.constant_term()} but must vanish")
    radius = float(g.domain_radius)
    if not 0 < radius < 1:
        raise GermValidityError(f"domain radius must lie in (0, 1), got {g.domain_radius}")
    for x in _ball_samples(g.dim, radius, VALIDATION_SAMPLES):
        s = float(np.sum(g.twist_values(x) ** 2))
        if s >= 1.0:
            raise GermValidityError(
                f"sum of f_i^2 = {s:.6g} >= 1 at x = {np.array2string(x, precision=4)}; h is undefined"
            )
    return g


def make_germ(n: int, twist: Sequence[Polynomial], domain_radius=DEFAULT_RADIUS) -> GermSpec:
    return validate_germ(GermSpec(n, tuple(twist), Fraction(domain_radius)))


def linear_germ(a, domain_radius=DEFAULT_RADIUS) -> GermSpec:
    """Germ with ``f_i(x) = sum_j a[i][j] x_j`` (so ``a`` is the twisting matrix)."""
    rows = [list(r) for r in a]
    dim = len(rows)
    if dim % 2 or any(len(r) != dim for r in rows):
        raise ValueError("twisting matrix must be square of even size")
    coerce = lambda v: v if isinstance(v, (Fraction, int)) else Fraction(float(v))  # noqa: E731
    polys = [Polynomial.linear([coerce(v) for v in r]) for r in rows]
    return make_germ(dim // 2, polys, domain_radius)


def hopf_twisting(n: int) -> list[list[Fraction]]:
    a = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        a[2 * k][2 * k + 1] = Fraction(-1)
        a[2 * k + 1][2 * k] = Fraction(1)
    return a


def hopf_germ(n: int, domain_radius=DEFAULT_RADIUS) -> GermSpec:
    """Germ of the Hopf fibration: ``f_{2k-1} = -x_{2k}``, ``f_{2k} = x_{2k-1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return linear_germ(hopf_twisting(n), domain_radius)


def counterexample_matrix(n: int) -> list[list[Fraction]]:
    """``n`` diagonal blocks ``[[0, 1/2], [-1/2, 0]]`` plus ``I_2`` in the upper-right corner.

    This is the matrix whose transpose is the twisting matrix of the
    counterexample germ.
    """
    if n < 2:
        raise ValueError(
            "no counterexample exists for n = 1: every 2x2 matrix without real "
            "eigenvalues has A - A^T nonsingular"
        )
    half = Fraction(1, 2)
    a = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        a[2 * k][2 * k + 1] = half
        a[2 * k + 1][2 * k] = -half
    a[0][2 * n - 2] += 1
    a[1][2 * n - 1] += 1
    return a


def counterexample_germ(n: int, domain_radius=DEFAULT_RADIUS) -> GermSpec:
    a = counterexample_matrix(n)
    twisting = [[a[j][i] for j in range(2 * n)] for i in range(2 * n)]
    return linear_germ(twisting, domain_radius)


# --- geometry -------------------------------------------------------------


def _check_point(g: GermSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (g.dim,):
        raise ValueError(f"point must have {g.dim} coordinates, got shape {x.shape}")
    if float(x @ x) >= 1.0:
        raise DomainError(f"|x| = {np.linalg.norm(x):.6g} must be < 1")
    return x


def _embed(x: np.ndarray) -> np.ndarray:
    """``sum_j x_j V_j`` in ambient coordinates."""
    out = np.zeros(x.shape[0] + 2)
    out[2:] = x
    return out


def base_point(g: GermSpec, x) -> np.ndarray:
    x = _check_point(g, x)
    p = _embed(x)
    p[0] = np.sqrt(1.0 - x @ x)
    return p


def frame_at(g: GermSpec, x) -> np.ndarray:
    """Rows ``U1(x) = P(x), U2, V_1(x), ..., V_2n(x)``.

    Geodesic transport in closed form:
    ``V_i(x) = V_i - x_i U1 - x_i X / (1 + sqrt(1 - |x|^2))`` with
    ``X = sum_k x_k V_k``.
    """
    x = _check_point(g, x)
    m = g.dim + 2
    c = np.sqrt(1.0 - x @ x)
    big_x = _embed(x)
    frame = np.zeros((m, m))
    frame[0] = base_point(g, x)
    frame[1, 1] = 1.0
    for i in range(g.dim):
        v = np.zeros(m)
        v[i + 2] = 1.0
        v[0] -= x[i]
        v -= x[i] / (1.0 + c) * big_x
        frame[i + 2] = v
    return frame


def _q_parts(g: GermSpec, x: np.ndarray):
    f = g.twist_values(x)
    s = float(f @ f)
    if s >= 1.0:
        raise GermValidityError(f"sum of f_i^2 = {s:.6g} >= 1 at x; h is undefined")
    return f, np.sqrt(1.0 - s)


def q_point(g: GermSpec, x) -> np.ndarray:
    """``Q(x) = h U2 + F - phi U1 - phi X / (1 + c)`` with ``F = sum f_i V_i``, ``phi = f . x``."""
    x = _check_point(g, x)
    f, h = _q_parts(g, x)
    c = np.sqrt(1.0 - x @ x)
    phi = float(f @ x)
    q = _embed(f) - phi / (1.0 + c) * _embed(x)
    q[0] -= phi
    q[1] = h
    return q


def p_partials(g: GermSpec, x) -> np.ndarray:
    """Row ``j`` is ``dP/dx_j``."""
    x = _check_point(g, x)
    c = np.sqrt(1.0 - x @ x)
    out = np.zeros((g.dim, g.dim + 2))
    out[:, 0] = -x / c
    out[:, 2:] = np.eye(g.dim)
    return out


def q_partials(g: GermSpec, x) -> np.ndarray:
    """Row ``j`` is ``dQ/dx_j``, by the chain rule on the closed form of ``Q``."""
    x = _check_point(g, x)
    f, h = _q_parts(g, x)
    jac = g.twist_jacobian(x)  # jac[i, j] = df_i/dx_j
    c = np.sqrt(1.0 - x @ x)
    phi = float(f @ x)
    dphi = jac.T @ x + f  # d(f . x)/dx_j
    dh = -(jac.T @ f) / h
    dc = -x / c
    big_x = _embed(x)
    out = np.zeros((g.dim, g.dim + 2))
    for j in range(g.dim):
        row = _embed(jac[:, j])
        row[0] -= dphi[j]
        row[1] = dh[j]
        row -= dphi[j] / (1.0 + c) * big_x
        row[j + 2] -= phi / (1.0 + c)
        row += phi * dc[j] / (1.0 + c) ** 2 * big_x
        out[j] = row
    return out


def circle_point(g: GermSpec, x, t: float) -> np.ndarray:
    return base_point(g, x) * np.cos(t) + q_point(g, x) * np.sin(t)


def circle_plane(g: GermSpec, x) -> np.ndarray:
    """Rows ``P(x), Q(x)``: orthonormal basis of the circle's plane."""
    return np.vstack([base_point(g, x), q_point(g, x)])


# --- twisting matrix --------------------------------------------------------


def twisting_matrix_exact(g: GermSpec) -> list[list[Fraction]]:
    return [f.linear_coefficients() for f in g.twist]


def twisting_matrix(g: GermSpec) -> np.ndarray:
    """Entry ``(i, j)`` is ``df_i/dx_j`` at 0, read from the coefficients."""
    return np.array([[float(v) for v in row] for row in twisting_matrix_exact(g)])


def twisting_matrix_fd(g: GermSpec, step: float = FD_STEP) -> np.ndarray:
    """Central-difference twisting matrix, as a cross-check."""
    out = np.zeros((g.dim, g.dim))
    for j in range(g.dim):
        e = np.zeros(g.dim)
        e[j] = step
        out[:, j] = (g.twist_values(e) - g.twist_values(-e)) / (2 * step)
    return out


def is_local_fibration(g: GermSpec) -> bool:
    return not has_real_eigenvalue(twisting_matrix(g))


# --- distances between circles ----------------------------------------------

GRID_SIZE = 64
DESCENT_STEPS = 20


def _min_distance_between(a: np.ndarray, b: np.ndarray, grid: int, steps: int) -> tuple[float, float, float]:
    """Minimise ``|a(t) - b(s)|`` for unit circles ``a(t) = cos t a0 + sin t a1`` etc.

    Grid search, then damped Newton steps maximising ``<a(t), b(s)>``.
    Distances are always evaluated as the norm of the difference, never
    through ``2 - 2 <a, b>``, so tiny distances keep full relative accuracy.
    """
    theta = 2 * np.pi * np.arange(grid) / grid
    ring_a = np.outer(np.cos(theta), a[0]) + np.outer(np.sin(theta), a[1])
    ring_b = np.outer(np.cos(theta), b[0]) + np.outer(np.sin(theta), b[1])
    d = np.linalg.norm(ring_a[:, None, :] - ring_b[None, :, :], axis=2)
    i, k = np.unravel_index(np.argmin(d), d.shape)
    t, s = float(theta[i]), float(theta[k])

    def point(c, ang):
        return np.cos(ang) * c[0] + np.sin(ang) * c[1]

    def tangent(c, ang):
        return -np.sin(ang) * c[0] + np.cos(ang) * c[1]

    def dist(t, s):
        return float(np.linalg.norm(point(a, t) - point(b, s)))

    best = dist(t, s)
    for _ in range(steps):
        pa, pb, ta, tb = point(a, t), point(b, s), tangent(a, t), tangent(b, s)
        g = float(pa @ pb)
        grad = np.array([ta @ pb, pa @ tb])
        hess = np.array([[-g, ta @ tb], [ta @ tb, -g]])
        if np.all(np.linalg.eigvalsh(hess) < 0):
            step = -np.linalg.solve(hess, grad)
        else:
            step = grad
        lam = 1.0
        while lam > 1e-6:
            cand_t, cand_s = t + lam * step[0], s + lam * step[1]
            val = dist(cand_t, cand_s)
            if val <= best:
                break
            lam *= 0.5
        else:
            break
        if val == best and lam == 1.0 and not np.any(step):
            break
        best, t, s = val, cand_t, cand_s
    return best, float(t % (2 * np.pi)), float(s % (2 * np.pi))


def circle_min_distance(g: GermSpec, x1, x2, grid: int = GRID_SIZE, steps: int = DESCENT_STEPS) -> float:
    """Smallest ambient distance between the circles through ``P(x1)`` and ``P(x2)``.

    Coarse ``grid x grid`` search over both angles, then at most ``steps``
    damped Newton steps.
    """
    a = circle_plane(g, x1)
    b = circle_plane(g, x2)
    return _min_distance_between(a, b, grid, steps)[0]


def sample_ball(rng: np.random.Generator, dim: int, radius: float, count: int) -> np.ndarray:
    """``count`` points uniform in the ``dim``-ball of the given radius."""
    direction = rng.normal(size=(count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / dim)
    return direction * r[:, None]


def tube_sample(g: GermSpec, radius: float, samples: int, seed: int = 0):
    """Minimum circle distance over ``samples`` random pairs in the ball.

    Returns ``(min_distance, x1, x2)`` for the minimising pair.  Pairs are
    drawn from ``numpy.random.default_rng(seed)`` and scanned in draw order,
    so the result is reproducible.
    """
    if radius > float(g.domain_radius):
        raise DomainError(f"sampling radius {radius} exceeds the germ's domain radius {g.domain_radius}")
    rng = np.random.default_rng(seed)
    first = sample_ball(rng, g.dim, radius, samples)
    second = sample_ball(rng, g.dim, radius, samples)
    best = (np.inf, None, None)
    for x1, x2 in zip(first, second):
        d = circle_min_distance(g, x1, x2)
        if d < best[0]:
            best = (d, x1, x2)
    return best


def axis_ratios(g: GermSpec, axis: int, radii) -> list[tuple[float, float, float]]:
    """``(r, d, d / r)`` with ``d`` the distance from the base circle to the
    circle through ``P(r e_axis)`` (``axis`` is 1-based)."""
    out = []
    for r in radii:
        if r > float(g.domain_radius):
            raise DomainError(f"radius {r} exceeds the germ's domain radius {g.domain_radius}")
        x = np.zeros(g.dim)
        x[axis - 1] = r
        d = circle_min_distance(g, np.zeros(g.dim), x)
        out.append((float(r), d, d / r))
    return out
