"""Line-oriented input documents: a field, its involution, optional D4 data.

::

    reviham-format 1
    document: field
    dimension: 4
    kind: elliptic
    frequencies: 3 5
    involution-row: 1 0 0 0          # optional, one row per line
    involution-term: 0 1/2 2 0 0 0   # optional nonlinear correction
    d4-ratio: 3 5                    # optional, with d4-g2-row lines
    d4-g2-row: 0 1 0 0
    term: 1 -1/3 0 1 2 0             # component, coefficient, exponents

The linear part is built from ``kind`` and ``frequencies``; ``term`` lines
are added on top of it (a degree-0 or degree-1 term is accepted and then
reported by ``check``).  ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certificate import FORMAT_HEADER, D4Data
from .errors import CertificateFormatError
from .field import Involution, VectorField, linear_map
from .polyalg import ELLIPTIC, SADDLE, Polynomial, format_rational, rational

__all__ = ["FieldDocument", "parse_field_document", "read_field_document", "format_field_document"]


@dataclass
class FieldDocument:
    field: VectorField
    involution: Involution
    kind: str
    frequencies: tuple
    d4: D4Data | None = None

    @property
    def dimension(self) -> int:
        return self.field.dimension


def _rat(token: str, lineno: int):
    try:
        return rational(token)
    except (ValueError, TypeError, ZeroDivisionError):
        raise CertificateFormatError(f"not a rational number: {token!r}", lineno) from None


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise CertificateFormatError(f"{what} must be an integer, got {token!r}", lineno) from None


def _term(tokens: list[str], dim: int, lineno: int):
    if len(tokens) != dim + 2:
        raise CertificateFormatError(f"term needs component, coefficient and {dim} exponents", lineno)
    comp = _int(tokens[0], lineno, "component")
    if not 0 <= comp < dim:
        raise CertificateFormatError(f"component {comp} out of range 0..{dim - 1}", lineno)
    coeff = _rat(tokens[1], lineno)
    exps = tuple(_int(t, lineno, "exponent") for t in tokens[2:])
    if any(e < 0 for e in exps):
        raise CertificateFormatError("exponents must be non-negative", lineno)
    return comp, exps, coeff


def _matrix(rows: list[tuple[int, list[str]]], dim: int, name: str):
    if len(rows) != dim:
        line = rows[-1][0] if rows else None
        raise CertificateFormatError(f"{name} needs {dim} rows, got {len(rows)}", line)
    out = []
    for lineno, tokens in rows:
        if len(tokens) != dim:
            raise CertificateFormatError(f"{name} row needs {dim} entries", lineno)
        out.append([_rat(t, lineno) for t in tokens])
    return out


def _add_terms(comps: list[Polynomial], terms, dim: int) -> list[Polynomial]:
    extra = [dict() for _ in range(dim)]
    for comp, exps, coeff in terms:
        extra[comp][exps] = extra[comp].get(exps, 0) + coeff
    return [p + Polynomial(dim, t) for p, t in zip(comps, extra)]


def parse_field_document(text: str) -> FieldDocument:
    lines = text.splitlines()
    body = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            body.append((lineno, line))
    if not body or body[0][1] != FORMAT_HEADER:
        raise CertificateFormatError(f"first line must be {FORMAT_HEADER!r}", body[0][0] if body else 1)
    headers: dict[str, tuple[int, str]] = {}
    repeated = {"term": [], "involution-row": [], "involution-term": [], "d4-g2-row": []}
    for lineno, line in body[1:]:
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise CertificateFormatError(f"expected 'key: value', got {line!r}", lineno)
        if key in repeated:
            repeated[key].append((lineno, value.split()))
        elif key in ("document", "dimension", "kind", "frequencies", "d4-ratio"):
            if key in headers:
                raise CertificateFormatError(f"duplicate key {key!r}", lineno)
            headers[key] = (lineno, value.strip())
        else:
            raise CertificateFormatError(f"unknown key {key!r}", lineno)
    for key in ("dimension", "kind", "frequencies"):
        if key not in headers:
            raise CertificateFormatError(f"missing key {key!r}")
    if "document" in headers and headers["document"][1] != "field":
        raise CertificateFormatError("document must be 'field'", headers["document"][0])

    lineno, value = headers["dimension"]
    dim = _int(value, lineno, "dimension")
    if dim < 2 or dim % 2:
        raise CertificateFormatError("dimension must be even and positive", lineno)
    lineno, kind = headers["kind"]
    if kind not in (ELLIPTIC, SADDLE):
        raise CertificateFormatError(f"kind must be {ELLIPTIC} or {SADDLE}", lineno)
    lineno, value = headers["frequencies"]
    freqs = tuple(_rat(t, lineno) for t in value.split())
    if len(freqs) != dim // 2:
        raise CertificateFormatError(f"need {dim // 2} frequencies", lineno)
    if any(f <= 0 for f in freqs):
        raise CertificateFormatError("frequencies must be positive", lineno)

    terms = [_term(tokens, dim, ln) for ln, tokens in repeated["term"]]
    base = VectorField.normalized_linear(kind, freqs)
    field = VectorField(_add_terms(list(base), terms, dim))

    if repeated["involution-row"]:
        L = _matrix(repeated["involution-row"], dim, "involution")
        comps = linear_map(L)
    elif repeated["involution-term"]:
        comps = list(Involution.canonical(dim // 2, kind).components)
    else:
        comps = None
    if comps is None:
        phi = Involution.canonical(dim // 2, kind)
    else:
        corr = [_term(tokens, dim, ln) for ln, tokens in repeated["involution-term"]]
        phi = Involution(_add_terms(comps, corr, dim))

    d4 = None
    if "d4-ratio" in headers or repeated["d4-g2-row"]:
        if "d4-ratio" not in headers:
            raise CertificateFormatError("d4-g2-row given without d4-ratio", repeated["d4-g2-row"][0][0])
        lineno, value = headers["d4-ratio"]
        parts = value.split()
        if len(parts) != 2:
            raise CertificateFormatError("d4-ratio needs two integers", lineno)
        r1, r2 = (_int(t, lineno, "ratio") for t in parts)
        g2 = Involution.from_matrix(_matrix(repeated["d4-g2-row"], dim, "d4 g2"))
        d4 = D4Data(g2, r1, r2)
    return FieldDocument(field, phi, kind, freqs, d4)


def read_field_document(path) -> FieldDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_field_document(fh.read())


def _term_lines(key: str, comps, base) -> list[str]:
    out = []
    for i, (p, b) in enumerate(zip(comps, base)):
        for exps, c in (p - b).items():
            out.append(f"{key}: {i} {format_rational(c)} " + " ".join(map(str, exps)))
    return out


def format_field_document(doc: FieldDocument) -> str:
    dim = doc.dimension
    lines = [
        FORMAT_HEADER,
        "document: field",
        f"dimension: {dim}",
        f"kind: {doc.kind}",
        "frequencies: " + " ".join(format_rational(f) for f in doc.frequencies),
    ]
    if doc.involution != Involution.canonical(dim // 2, doc.kind):
        L = doc.involution.linearization
        lines += ["involution-row: " + " ".join(format_rational(v) for v in row) for row in L]
        lines += _term_lines("involution-term", doc.involution.components, linear_map(L))
    if doc.d4 is not None:
        lines.append(f"d4-ratio: {doc.d4.r1} {doc.d4.r2}")
        lines += ["d4-g2-row: " + " ".join(format_rational(v) for v in row) for row in doc.d4.g2.linearization]
    base = VectorField.normalized_linear(doc.kind, doc.frequencies)
    lines += _term_lines("term", doc.field.components, list(base))
    return "\n".join(lines) + "\n"
