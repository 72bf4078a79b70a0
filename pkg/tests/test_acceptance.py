"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one PASS/FAIL line (printed in the terminal summary and
on stdout) before asserting, so a failing criterion still reports its
measured numbers.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from great_circles.checks import run_checks
from great_circles.contact_analyzer import (
    alpha_coefficients,
    alpha_prime_check,
    analyze,
    contact_defect,
    validate_d_alpha_fd,
)
from great_circles.exterior_forms import bivector_from_skew, power, top_coefficient
from great_circles.fibration_germ import (
    axis_ratios,
    base_point,
    counterexample_germ,
    counterexample_matrix,
    hopf_germ,
    is_local_fibration,
    linear_germ,
    q_point,
    sample_ball,
    tube_sample,
    twisting_matrix,
    twisting_matrix_exact,
)
from great_circles.grassmann_chart import (
    ChartDomainError,
    graph_plane,
    in_bad_set,
    plane_to_hom,
    standard_frame,
    standard_plane,
    tangent_basis_from_twisting,
    transverse_to_bad_cone,
)
from great_circles.matrix_core import (
    determinant,
    exact_spectrum,
    has_real_eigenvalue,
    no_real_eigs_2x2_criterion,
    pfaffian,
    pfaffian_combinatorial,
    pfaffian_normal_form,
    random_skew,
    skew_from_upper,
)

F = Fraction
SEED = 20240611

COUNTER_SKEW = [[0, 1, 1, 0], [-1, 0, 0, 1], [-1, 0, 0, 1], [0, -1, -1, 0]]


def verdict(number, passed, detail):
    passed = bool(passed)
    ACCEPTANCE_RESULTS.append((number, passed, detail))
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, detail


def exact(a):
    a = [[F(v) for v in row] for row in a]
    out = np.empty((len(a), len(a)), dtype=object)
    out[:, :] = a
    return out


def exact_skew(a):
    return exact(a) - exact(a).T


def spectrum_error(spectrum, target, mult):
    """Max distance of each exact eigenvalue to its target, or inf on a multiplicity mismatch."""
    if sorted(m for _, m in spectrum) != [mult, mult]:
        return math.inf
    return max(min(abs(lam - z) for z in target) for lam, _ in spectrum)


def test_criterion_1_pfaffian_golden_values():
    start = time.perf_counter()
    ok = True
    for b in (F(0), F(1), F(-7, 3), F(22, 7), F(10**12 + 1, 3)):
        ok &= pfaffian_combinatorial(skew_from_upper(2, [b])) == b
    rng = np.random.default_rng(SEED)
    for _ in range(200):
        nums = rng.integers(-49, 50, size=6)
        dens = rng.integers(1, 50, size=6)
        b12, b13, b14, b23, b24, b34 = (F(int(p), int(q)) for p, q in zip(nums, dens))
        b = skew_from_upper(4, [b12, b13, b14, b23, b24, b34])
        ok &= pfaffian_combinatorial(b) == b12 * b34 - b13 * b24 + b14 * b23
    elapsed = time.perf_counter() - start
    verdict(1, ok and elapsed < 1.0, f"exact 2x2 and n=2 formula on rationals, {elapsed:.3f} s")


def test_criterion_2_pfaffian_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst_sq = worst_cong = worst_biv = worst_nf = 0.0
    for dim in (2, 4, 6, 8):
        n = dim // 2
        for _ in range(1000):
            b = random_skew(dim, rng)
            pf = pfaffian(b)
            det = determinant(b)
            worst_sq = max(worst_sq, abs(pf * pf - det) / max(1.0, abs(det)))
            worst_nf = max(worst_nf, abs(pfaffian_normal_form(b) - pf) / max(1.0, abs(pf)))
            biv = top_coefficient(power(bivector_from_skew(b), n)) / math.factorial(n)
            worst_biv = max(worst_biv, abs(biv - pf) / max(1.0, abs(pf)))
        for _ in range(250):
            b = random_skew(dim, rng)
            c = rng.normal(size=(dim, dim))
            lhs = pfaffian(c @ b @ c.T)
            rhs = determinant(c) * pfaffian(b)
            worst_cong = max(worst_cong, abs(lhs - rhs) / max(1.0, abs(rhs)))
    elapsed = time.perf_counter() - start
    ok = worst_sq <= 1e-8 and worst_nf <= 1e-8 and worst_cong <= 1e-7 and worst_biv <= 1e-9 and elapsed < 30
    verdict(
        2,
        ok,
        f"Pf^2=Det {worst_sq:.1e}, normal form {worst_nf:.1e}, congruence {worst_cong:.1e}, "
        f"bivector {worst_biv:.1e}, {elapsed:.1f} s",
    )


def test_criterion_3_n1_theorem():
    rng = np.random.default_rng(SEED)
    samples = rng.normal(size=(10_000, 2, 2))
    tested = disagreements = borderline = 0
    all_nonsingular = True
    for a in samples:
        (a11, a12), (a21, a22) = a
        disc = (a11 - a22) ** 2 + 4 * a12 * a21
        if abs(disc) <= 1e-9 * (1 + np.sum(a * a)):
            borderline += 1
        elif no_real_eigs_2x2_criterion(a) != (not has_real_eigenvalue(a)):
            disagreements += 1
        if has_real_eigenvalue(a):
            continue
        tested += 1
        b = a - a.T
        det = determinant(b)
        all_nonsingular &= det > 0 and math.isclose(det, (a12 - a21) ** 2, rel_tol=1e-12)
    verdict(
        3,
        all_nonsingular and disagreements == 0 and tested > 0,
        f"{tested} matrices without real eigenvalues, all with det(A-A^T)>0; "
        f"criterion disagreements {disagreements} ({borderline} borderline skipped)",
    )


def test_criterion_4_counterexample_n2():
    a = exact(counterexample_matrix(2))
    spec_err = spectrum_error(exact_spectrum(a), (0.5j, -0.5j), 2)
    b = a - a.T
    matches = b.tolist() == COUNTER_SKEW
    det, pf = determinant(b), pfaffian(b)
    report = analyze(counterexample_germ(2))
    ok = (
        spec_err <= 1e-10
        and matches
        and det == 0
        and pf == 0
        and isinstance(pf, Fraction)
        and report.is_local_fibration
        and not report.is_contact_at_origin
        and report.skew_part.tolist() == COUNTER_SKEW
    )
    verdict(
        4,
        ok,
        f"eigenvalue error {spec_err:.1e}, displayed A-A^T {'matched' if matches else 'MISMATCH'}, "
        f"Det={det} Pf={pf}, fibration={report.is_local_fibration} contact={report.is_contact_at_origin}",
    )


def test_criterion_5_general_counterexamples():
    parts = []
    ok = True
    for n in (2, 3, 4, 5):
        a = exact(counterexample_matrix(n))
        err = spectrum_error(exact_spectrum(a), (0.5j, -0.5j), n)
        b = a - a.T
        rows_ok = list(b[0]) == [-v for v in b[-1]] and list(b[1]) == list(b[2 * n - 2])
        g = counterexample_germ(n)
        defect = contact_defect(g)
        fib = is_local_fibration(g)
        ok &= err <= 1e-9 and rows_ok and defect == 0 and fib
        parts.append(f"n={n}: err {err:.0e} rows {rows_ok} defect {defect:g} fib {fib}")
    verdict(5, ok, "; ".join(parts))


def complex_structure(m):
    j = np.zeros((m, m))
    for k in range(0, m, 2):
        j[k + 1, k] = 1.0
        j[k, k + 1] = -1.0
    return j


def test_criterion_6_hopf():
    rng = np.random.default_rng(SEED)
    ok = True
    parts = []
    for n in (1, 2, 3):
        g = hopf_germ(n)
        block = exact([[0, -1], [1, 0]])
        expected = np.zeros((2 * n, 2 * n), dtype=object)
        expected[:, :] = F(0)
        for k in range(n):
            expected[2 * k: 2 * k + 2, 2 * k: 2 * k + 2] = block
        twist_ok = twisting_matrix_exact(g) == expected.tolist()
        j = complex_structure(2 * n + 2)
        q_err = max(
            float(np.max(np.abs(q_point(g, x) - j @ base_point(g, x))))
            for x in sample_ball(rng, 2 * n, 0.1, 100)
        )
        defect = contact_defect(g)
        rel = abs(defect - math.factorial(n) * 2**n) / (math.factorial(n) * 2**n)
        report = analyze(g)
        ok &= twist_ok and q_err <= 1e-10 and rel <= 1e-9 and report.is_local_fibration and report.is_contact_at_origin
        parts.append(f"n={n}: J-blocks {twist_ok}, |Q-JP| {q_err:.0e}, defect {defect:g}")
    verdict(6, ok, "; ".join(parts))


def test_criterion_7_alpha_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    germs = [hopf_germ(n) for n in (1, 2, 3)] + [counterexample_germ(n) for n in (2, 3, 4, 5)]
    germs.append(linear_germ([[1, 0], [0, 0]]))
    for k in range(50):
        n = 1 + k % 3
        germs.append(linear_germ(np.round(rng.normal(size=(2 * n, 2 * n)), 6)))
    worst_alpha = worst_fd = 0.0
    prime_ok = bridge_ok = True
    fibrations = 0
    for g in germs:
        a0 = alpha_coefficients(g, np.zeros(g.dim), 0.0)
        worst_alpha = max(worst_alpha, float(np.max(np.abs(a0[:-1]))), abs(a0[-1] - 1.0))
        worst_fd = max(worst_fd, validate_d_alpha_fd(g, step=1e-4))
        prime_ok &= alpha_prime_check(g)
        fib = is_local_fibration(g)
        fibrations += fib
        chart = transverse_to_bad_cone(tangent_basis_from_twisting(twisting_matrix(g))).transverse
        bridge_ok &= fib == chart
    elapsed = time.perf_counter() - start
    ok = worst_alpha <= 1e-12 and worst_fd <= 1e-6 and prime_ok and bridge_ok and elapsed < 60
    verdict(
        7,
        ok,
        f"{len(germs)} germs ({fibrations} fibrations): alpha-dt {worst_alpha:.0e}, FD d(alpha) {worst_fd:.1e}, "
        f"alpha' {prime_ok}, bridge {bridge_ok}, {elapsed:.1f} s",
    )


def test_criterion_8_tube_disjointness():
    minima = {}
    for name, g in (("hopf n=1", hopf_germ(1)), ("counterexample n=2", counterexample_germ(2))):
        minima[name] = tube_sample(g, 0.05, 200, seed=0)[0]
    disjoint = all(d > 1e-4 for d in minima.values())
    rows = axis_ratios(linear_germ([[1, 0], [0, 0]]), 1, (0.1, 0.05, 0.025))
    ratios = [ratio for _, _, ratio in rows]
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    verdict(
        8,
        disjoint and decreasing,
        "min distances "
        + ", ".join(f"{k} {v:.3e}" for k, v in minima.items())
        + "; f1=x1 ratios along e1 "
        + ", ".join(f"{r:.1e}" for r in ratios)
        + (" strictly decreasing" if decreasing else " NOT strictly decreasing (circles meet exactly: distance 0 up to roundoff)"),
    )


def test_criterion_9_chart():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    count = 0
    while count < 500:
        n = int(rng.integers(1, 4))
        hom = rng.normal(scale=0.7, size=(2 * n, 2))
        plane, frame = standard_plane(n), standard_frame(n)
        other = graph_plane(plane, hom, frame)
        try:
            back = plane_to_hom(plane, other, frame)
        except ChartDomainError:
            continue
        worst = max(worst, float(np.max(np.abs(back - hom))))
        count += 1
    bad_ok = good_ok = 0
    for k in range(100):
        n = 1 + k % 3
        plane, frame = standard_plane(n), standard_frame(n)
        u, v = rng.normal(size=2 * n), rng.normal(size=2)
        low = np.outer(u, v) if k % 10 else np.zeros((2 * n, 2))
        bad_ok += in_bad_set(plane, graph_plane(plane, low, frame))
        full = rng.normal(size=(2 * n, 2))
        while np.linalg.svd(full, compute_uv=False)[-1] < 1e-3:
            full = rng.normal(size=(2 * n, 2))
        good_ok += not in_bad_set(plane, graph_plane(plane, full, frame))
    ok = worst <= 1e-10 and bad_ok == 100 and good_ok == 100
    verdict(9, ok, f"round trip {worst:.1e} on 500; rank<=1 in bad set {bad_ok}/100; rank 2 outside {good_ok}/100")


def test_validate_suite_on_named_germs():
    # the CLI's invariant suite agrees with the criteria above
    for g in (hopf_germ(1), hopf_germ(2), counterexample_germ(2), counterexample_germ(3)):
        assert all(c.passed for c in run_checks(g))
