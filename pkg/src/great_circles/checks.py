"""Invariant suite run on a single germ."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .contact_analyzer import (
    alpha_coefficients,
    alpha_prime_check,
    contact_defect,
    skew_part,
    validate_d_alpha_fd,
)
from .fibration_germ import GermSpec, is_local_fibration, twisting_matrix, twisting_matrix_fd
from .grassmann_chart import tangent_basis_from_twisting, transverse_to_bad_cone
from .matrix_core import pfaffian

ALPHA_AT_ORIGIN_TOL = 1e-12
FD_TOL = 1e-6
PF_REL_TOL = 1e-9


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def run_checks(g: GermSpec) -> list[Check]:
    out = []

    a0 = alpha_coefficients(g, np.zeros(g.dim), 0.0)
    dev = float(max(np.max(np.abs(a0[:-1])), abs(a0[-1] - 1.0)))
    out.append(Check("alpha_is_dt_at_origin", dev <= ALPHA_AT_ORIGIN_TOL, f"max deviation {dev:.3g}"))

    fd = validate_d_alpha_fd(g)
    out.append(Check("d_alpha_finite_difference", fd <= FD_TOL, f"max deviation {fd:.3g}"))

    out.append(Check("alpha_prime", alpha_prime_check(g), "d(alpha') = d(alpha) and alpha' = dt at origin"))

    via_forms = contact_defect(g)
    via_pf = math.factorial(g.n) * float(pfaffian(skew_part(twisting_matrix(g))))
    rel = abs(via_forms - via_pf) / max(1.0, abs(via_pf))
    out.append(Check("pfaffian_consistency", rel <= PF_REL_TOL, f"forms {via_forms:.12g} vs n!*Pf {via_pf:.12g}"))

    twist_dev = float(np.max(np.abs(twisting_matrix_fd(g) - twisting_matrix(g))))
    out.append(Check("twisting_fd", twist_dev <= FD_TOL, f"max deviation {twist_dev:.3g}"))

    fib = is_local_fibration(g)
    chart = transverse_to_bad_cone(tangent_basis_from_twisting(twisting_matrix(g))).transverse
    out.append(Check("fibration_bridge", fib == chart, f"eigenvalue test {fib}, chart test {chart}"))
    return out
