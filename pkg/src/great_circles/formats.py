"""Text formats: matrices, germ files and contact reports.

Matrix format: one row per line, entries separated by whitespace, each a
decimal literal or an exact fraction ``p/q``.  Blank lines and lines
starting with ``#`` are ignored.

Germ format::

    # comment
    n = 2
    domain_radius = 1/10
    # term <function index> <coefficient> <exponent of x_1> ... <exponent of x_2n>
    term 1 -1/2 0 1 0 0

Coefficients are kept as exact fractions, so writing and re-reading a germ
reproduces it bit for bit.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .contact_analyzer import ContactReport
from .fibration_germ import GermSpec, Polynomial, make_germ


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def parse_number(token: str, line: int | None = None) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a decimal or p/q fraction: {token!r}", line) from None


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped


def parse_matrix(text: str, source: str | None = None) -> np.ndarray:
    """Parse the shared matrix format into an object array of Fractions."""
    rows = []
    width = None
    for lineno, line in _content_lines(text):
        try:
            row = [parse_number(tok, lineno) for tok in line.split()]
        except FormatError as exc:
            raise FormatError(str(exc).split(": ", 1)[-1], lineno, source) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"row has {len(row)} entries, expected {width}", lineno, source)
        rows.append(row)
    if not rows:
        raise FormatError("no matrix rows found", None, source)
    out = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    return parse_matrix(path.read_text(), source=str(path))


def format_number(v) -> str:
    """Fractions as ``p/q`` (or ``p``); floats by shortest round-trip repr."""
    if isinstance(v, Fraction):
        return str(v)
    v = float(v)
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format_matrix(a) -> str:
    a = np.asarray(a, dtype=object)
    return "\n".join(" ".join(format_number(v) for v in row) for row in a) + "\n"


def parse_germ(text: str, source: str | None = None) -> GermSpec:
    n = None
    radius = None
    terms: list[tuple[int, int, Fraction, tuple[int, ...]]] = []
    for lineno, line in _content_lines(text):
        if line.startswith("term"):
            parts = line.split()
            if len(parts) < 3:
                raise FormatError("term line needs: term <i> <coefficient> <exponents...>", lineno, source)
            try:
                index = int(parts[1])
                expo = tuple(int(e) for e in parts[3:])
            except ValueError:
                raise FormatError("function index and exponents must be integers", lineno, source) from None
            try:
                coeff = parse_number(parts[2], lineno)
            except FormatError as exc:
                raise FormatError(str(exc).split(": ", 1)[-1], lineno, source) from None
            terms.append((lineno, index, coeff, expo))
            continue
        if "=" not in line:
            raise FormatError(f"expected 'key = value' or a term line, got {line!r}", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "n":
            try:
                n = int(value)
            except ValueError:
                raise FormatError(f"n must be an integer, got {value!r}", lineno, source) from None
            if n < 1:
                raise FormatError("n must be positive", lineno, source)
        elif key == "domain_radius":
            radius = parse_number(value, lineno)
        else:
            raise FormatError(f"unknown key {key!r}", lineno, source)
    if n is None:
        raise FormatError("missing 'n = ...'", None, source)
    dim = 2 * n
    per_function: list[dict[tuple[int, ...], Fraction]] = [{} for _ in range(dim)]
    for lineno, index, coeff, expo in terms:
        if not 1 <= index <= dim:
            raise FormatError(f"function index {index} out of range 1..{dim}", lineno, source)
        if len(expo) != dim:
            raise FormatError(f"term needs {dim} exponents, got {len(expo)}", lineno, source)
        if any(e < 0 for e in expo):
            raise FormatError("exponents must be non-negative", lineno, source)
        bucket = per_function[index - 1]
        bucket[expo] = bucket.get(expo, Fraction(0)) + coeff
    try:
        polys = [Polynomial(dim, t) for t in per_function]
    except ValueError as exc:
        raise FormatError(str(exc), None, source) from None
    kwargs = {} if radius is None else {"domain_radius": radius}
    return make_germ(n, polys, **kwargs)


def read_germ(path) -> GermSpec:
    path = Path(path)
    return parse_germ(path.read_text(), source=str(path))


def format_germ(g: GermSpec, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"n = {g.n}")
    lines.append(f"domain_radius = {g.domain_radius}")
    lines.append("# term <i> <coefficient> <exponent of x_1> ... <exponent of x_2n>")
    for i, f in enumerate(g.twist, start=1):
        for expo, coeff in f.terms.items():
            lines.append(" ".join(["term", str(i), str(coeff), *map(str, expo)]))
    return "\n".join(lines) + "\n"


def write_germ(g: GermSpec, path, comment: str | None = None) -> None:
    Path(path).write_text(format_germ(g, comment))


def _clean(x: float, scale: float = 1.0) -> float:
    return 0.0 if abs(x) <= 1e-13 * max(1.0, scale) else x


def format_complex(z: complex) -> str:
    scale = abs(z)
    re, im = _clean(z.real, scale), _clean(z.imag, scale)
    if im == 0:
        return f"{re:.12g}"
    if re == 0:
        return f"{im:.12g}i"
    return f"{re:.12g}{im:+.12g}i"


def format_spectrum(spectrum) -> str:
    return ", ".join(f"{format_complex(z)} (x{m})" for z, m in spectrum)


def report_dict(report: ContactReport) -> dict:
    return {
        "n": report.n,
        "is_local_fibration": report.is_local_fibration,
        "is_contact_at_origin": report.is_contact_at_origin,
        "fibration_but_not_contact": report.headline,
        "pfaffian": report.pfaffian_value,
        "contact_defect": report.contact_defect,
        "contact_tol": report.contact_tol,
        "eigenvalues": [
            {"re": _clean(z.real, abs(z)), "im": _clean(z.imag, abs(z)), "multiplicity": m}
            for z, m in report.spectrum
        ],
        "real_eigenvalues": report.real_eigenvalues(),
        "twisting": report.twisting.tolist(),
        "skew_part": report.skew_part.tolist(),
    }


def format_report(report: ContactReport) -> str:
    def yn(flag: bool) -> str:
        return "true" if flag else "false"

    lines = [
        f"n: {report.n}",
        f"is_local_fibration: {yn(report.is_local_fibration)}",
        f"is_contact_at_origin: {yn(report.is_contact_at_origin)}",
    ]
    if report.headline:
        lines.append(
            "NOTE: local fibration whose orthogonal distribution is NOT a contact structure at the base point"
        )
    lines += [
        f"pfaffian: {format_number(report.pfaffian_value)}",
        f"contact_defect: {format_number(report.contact_defect)}",
        f"contact_tol: {report.contact_tol:.3g}",
        f"eigenvalues: {format_spectrum(report.spectrum)}",
    ]
    real = report.real_eigenvalues()
    if real:
        lines.append("real_eigenvalues: " + ", ".join(f"{v:.12g}" for v in real))
    lines.append("twisting:")
    lines.append(format_matrix(report.twisting).rstrip("\n"))
    lines.append("skew_part:")
    lines.append(format_matrix(report.skew_part).rstrip("\n"))
    return "\n".join(lines) + "\n"


def report_json(report: ContactReport) -> str:
    return json.dumps(report_dict(report), sort_keys=True)
