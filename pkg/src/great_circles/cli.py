"""Command-line front end.

Exit codes:
    0  success (all requested checks passed)
    1  a check failed (``validate``)
    2  usage error
    3  bad input: unparsable file, non-skew matrix, invalid germ
    4  domain error: radius outside the germ's ball, unsupported ``n``
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import formats
from .checks import run_checks
from .contact_analyzer import analyze
from .fibration_germ import (
    DomainError,
    GermValidityError,
    axis_ratios,
    counterexample_germ,
    hopf_germ,
    tube_sample,
)
from .matrix_core import (
    MAX_COMBINATORIAL_DIM,
    DimensionError,
    as_skew,
    determinant,
    eigenvalues,
    exact_spectrum,
    has_real_eigenvalue,
    no_real_eigs_2x2_criterion,
    pfaffian_combinatorial,
    pfaffian_normal_form,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DOMAIN = 4


class Output:
    """Collects ``key: value`` records; text mode prints them in order,
    json mode prints one JSON object per record group."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def text(self, s: str) -> None:
        if self.fmt == "text":
            self.stream.write(s if s.endswith("\n") else s + "\n")

    def record(self, data: dict, text: str | None = None) -> None:
        if self.fmt == "json":
            self.stream.write(json.dumps(data, sort_keys=True, default=_json_default) + "\n")
        else:
            if text is None:
                text = "".join(f"{k}: {_text_value(v)}\n" for k, v in data.items())
            self.stream.write(text)


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _text_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (Fraction, float, int)):
        return formats.format_number(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_text_value(x) for x in v)
    return str(v)


def cmd_pfaffian(args, out: Output) -> int:
    b = formats.read_matrix(args.input)
    if b.shape[0] != b.shape[1]:
        raise DimensionError(f"matrix must be square, got {b.shape[0]}x{b.shape[1]}")
    as_skew(b)
    dim = b.shape[0]
    det = determinant(b)
    data: dict = {"dim": dim}
    if dim <= MAX_COMBINATORIAL_DIM:
        pf = pfaffian_combinatorial(b)
        data["pfaffian_combinatorial"] = pf
    else:
        pf = None
    pf_nf = pfaffian_normal_form(b)
    data["pfaffian_normal_form"] = pf_nf
    data["determinant"] = det
    ref = pf if pf is not None else pf_nf
    data["pf_squared_minus_det"] = ref * ref - det
    out.record(data)
    return EXIT_OK


def cmd_eigs(args, out: Output) -> int:
    a = formats.read_matrix(args.input)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got {a.shape[0]}x{a.shape[1]}")
    lam = sorted(eigenvalues(a), key=lambda z: (round(z.real, 12), z.imag))
    spectrum = exact_spectrum(a)
    data: dict = {
        "dim": a.shape[0],
        "has_real_eigenvalue": has_real_eigenvalue(a),
        "eigenvalues_numeric": [formats.format_complex(z) for z in lam],
        "eigenvalues_exact": formats.format_spectrum(spectrum),
    }
    if a.shape == (2, 2):
        data["no_real_eigs_2x2_criterion"] = no_real_eigs_2x2_criterion(a)
    if out.fmt == "json":
        data["eigenvalues_numeric"] = [{"re": z.real, "im": z.imag} for z in lam]
        data["eigenvalues_exact"] = [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in spectrum]
    out.record(data)
    return EXIT_OK


def _emit_report(report, out: Output) -> None:
    if out.fmt == "json":
        out.stream.write(formats.report_json(report) + "\n")
    else:
        out.stream.write(formats.format_report(report))


def _named_germ(args, out: Output, build, label: str) -> int:
    kwargs = {} if args.radius is None else {"domain_radius": Fraction(str(args.radius))}
    germ = build(args.n, **kwargs)
    if args.out:
        formats.write_germ(germ, args.out, comment=f"{label} germ, n = {args.n}")
        out.record({"germ_file": args.out})
    _emit_report(analyze(germ), out)
    return EXIT_OK


def cmd_hopf(args, out: Output) -> int:
    if args.n < 1:
        raise DomainError("hopf needs n >= 1")
    return _named_germ(args, out, hopf_germ, "Hopf")


def cmd_counterexample(args, out: Output) -> int:
    if args.n < 2:
        raise DomainError(
            "no counterexample for n = 1: a 2x2 matrix without real eigenvalues always has "
            "A - A^T nonsingular, so every great-circle fibration of S^3 gives a contact structure"
        )
    return _named_germ(args, out, counterexample_germ, "counterexample")


def cmd_analyze(args, out: Output) -> int:
    _emit_report(analyze(formats.read_germ(args.input)), out)
    return EXIT_OK


def cmd_tube_sample(args, out: Output) -> int:
    germ = formats.read_germ(args.input)
    radius = args.radius if args.radius is not None else 0.05
    if args.axis is not None:
        if not 1 <= args.axis <= germ.dim:
            raise DomainError(f"axis must be in 1..{germ.dim}")
        rows = axis_ratios(germ, args.axis, [radius, radius / 2, radius / 4])
        for r, d, ratio in rows:
            out.record({"radius": r, "distance": d, "ratio": ratio},
                       f"radius: {r:.6g}  distance: {d:.6e}  ratio: {ratio:.6e}\n")
        ratios = [ratio for _, _, ratio in rows]
        decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
        out.record({"ratio_strictly_decreasing": decreasing})
        return EXIT_OK
    d, x1, x2 = tube_sample(germ, radius, args.samples, args.seed)
    out.record(
        {
            "radius": radius,
            "samples": args.samples,
            "seed": args.seed,
            "min_distance": d,
            "argmin_x1": [float(v) for v in x1],
            "argmin_x2": [float(v) for v in x2],
        },
        f"radius: {radius:.6g}\nsamples: {args.samples}\nseed: {args.seed}\n"
        f"min_distance: {d:.12e}\n"
        f"argmin_x1: {' '.join(f'{v:.12g}' for v in x1)}\n"
        f"argmin_x2: {' '.join(f'{v:.12g}' for v in x2)}\n",
    )
    return EXIT_OK


def cmd_validate(args, out: Output) -> int:
    germ = formats.read_germ(args.input)
    checks = run_checks(germ)
    report = analyze(germ)
    for c in checks:
        out.record({"check": c.name, "passed": c.passed, "detail": c.detail},
                   f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}\n")
    out.record(
        {
            "is_local_fibration": report.is_local_fibration,
            "is_contact_at_origin": report.is_contact_at_origin,
            "all_passed": all(c.passed for c in checks),
        }
    )
    if report.headline:
        out.text("note: contact=false at the base point although the germ is a local fibration")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="great-circles",
        description="Germs of great-circle fibrations and the contact condition at the base fibre.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="text (default) or one JSON object per line")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pfaffian", parents=[common], help="Pfaffian and determinant of a skew matrix file")
    p.add_argument("input")
    p.set_defaults(func=cmd_pfaffian)

    p = sub.add_parser("eigs", parents=[common], help="eigenvalues and the real-eigenvalue test")
    p.add_argument("input")
    p.set_defaults(func=cmd_eigs)

    for name, func, help_ in (
        ("hopf", cmd_hopf, "Hopf germ on S^(2n+1)"),
        ("counterexample", cmd_counterexample, "fibration germ that is not contact (n >= 2)"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--radius", type=float, help="domain radius (default 1/10)")
        p.add_argument("--out", help="write the germ file here")
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", parents=[common], help="fibration and contact verdicts for a germ file")
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tube-sample", parents=[common], help="minimum distance between sampled circles")
    p.add_argument("input")
    p.add_argument("--radius", type=float, help="sampling radius (default 0.05)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--axis", type=int,
                   help="instead of sampling, sweep radius, radius/2, radius/4 along e_AXIS from the base circle")
    p.set_defaults(func=cmd_tube_sample)

    p = sub.add_parser("validate", parents=[common], help="run the invariant suite on a germ file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        parser.error("--samples must be positive")
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    out = Output(args.format)
    try:
        return args.func(args, out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (formats.FormatError, GermValidityError, DimensionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
