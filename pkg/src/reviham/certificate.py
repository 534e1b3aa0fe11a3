"""Certificate record and its versioned text format.

A certificate is plain text, headed by ``reviham-format 1``; header lines are
``key: value`` and polynomial data sits in ``begin ... end`` blocks with one
canonical term per line.  Serialization is deterministic and
``parse_certificate(format_certificate(c)) == c`` holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from gmpy2 import mpq

from .errors import CertificateFormatError
from .field import Involution, Transformation, TransformationStep, VectorField
from .polyalg import ELLIPTIC, SADDLE, Polynomial, format_polynomial, format_rational, parse_polynomial, rational

__all__ = [
    "FORMAT_HEADER",
    "D4Data",
    "Certificate",
    "format_certificate",
    "parse_certificate",
    "read_certificate",
    "write_certificate",
]

FORMAT_HEADER = "reviham-format 1"

MODES = ("orbital", "decoupled6", "conjugacy6", "d4_resonant")


@dataclass(frozen=True, eq=False)
class D4Data:
    """Second reversing involution and the resonance ratio for the D4 path."""

    g2: Involution
    r1: int
    r2: int

    def __eq__(self, other):
        return (
            isinstance(other, D4Data)
            and self.g2 == other.g2
            and (self.r1, self.r2) == (other.r1, other.r2)
        )

    __hash__ = None


@dataclass(eq=False)
class Certificate:
    """Everything needed to re-check a hamiltonization (or, with
    ``document == "normal-form"``, just a Poincaré–Dulac reduction).

    ``residuals`` maps an odd order ``2k+3`` to the stored residual jet of
    step ``k``; every stored residual is the zero polynomial.
    """

    document: str
    order: int
    kind: str
    frequencies: tuple
    normal_form: VectorField
    normal_form_transformation: Transformation
    mode: str | None = None
    genericity: mpq | None = None
    input_field: VectorField | None = None
    involution: Involution | None = None
    hamiltonian_field: VectorField | None = None
    hamiltonian: Polynomial | None = None
    transformation: Transformation | None = None
    rho: Polynomial | None = None
    residuals: dict[int, tuple[Polynomial, ...]] = field(default_factory=dict)
    d4: D4Data | None = None

    @property
    def dimension(self) -> int:
        return self.normal_form.dimension

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return all(
            getattr(self, name) == getattr(other, name)
            for name in (
                "document", "order", "kind", "mode", "genericity", "normal_form",
                "normal_form_transformation", "input_field", "involution",
                "hamiltonian_field", "hamiltonian", "transformation", "rho", "d4",
            )
        ) and tuple(self.frequencies) == tuple(other.frequencies) and {
            k: tuple(v) for k, v in self.residuals.items()
        } == {k: tuple(v) for k, v in other.residuals.items()}

    __hash__ = None


# writing ----------------------------------------------------------------


def _poly_block(p: Polynomial) -> list[str]:
    text = format_polynomial(p)
    return text.splitlines() if text else []


def _components_block(comps, label: str = "component") -> list[str]:
    out = []
    for i, p in enumerate(comps):
        out.append(f"{label} {i}")
        out += _poly_block(p)
    return out


def _transformation_block(name: str, T: Transformation) -> list[str]:
    out = [f"begin transformation {name}", f"working-order: {T.working_order}"]
    for idx, step in enumerate(T.steps, 1):
        out.append(f"step {idx}")
        out += _components_block(step.psi, "psi")
        if step.theta is not None:
            out.append("theta")
            out += _poly_block(step.theta)
    out.append("end")
    return out


def format_certificate(c: Certificate) -> str:
    lines = [FORMAT_HEADER, f"document: {c.document}"]
    if c.mode is not None:
        lines.append(f"mode: {c.mode}")
    lines += [
        f"order: {c.order}",
        f"dimension: {c.dimension}",
        f"kind: {c.kind}",
        "frequencies: " + " ".join(format_rational(f) for f in c.frequencies),
    ]
    if c.genericity is not None:
        lines.append(f"genericity: {format_rational(c.genericity)}")
    if c.d4 is not None:
        lines.append(f"d4-ratio: {c.d4.r1} {c.d4.r2}")
    if c.involution is not None:
        lines += ["begin involution phi"] + _components_block(c.involution.components) + ["end"]
    if c.d4 is not None:
        lines += ["begin involution g2"] + _components_block(c.d4.g2.components) + ["end"]
    if c.input_field is not None:
        lines += ["begin field input"] + _components_block(c.input_field.components) + ["end"]
    lines += ["begin field normal-form"] + _components_block(c.normal_form.components) + ["end"]
    lines += _transformation_block("normal-form-map", c.normal_form_transformation)
    if c.transformation is not None:
        lines += _transformation_block("hamiltonization", c.transformation)
    if c.rho is not None:
        lines += ["begin polynomial rho"] + _poly_block(c.rho) + ["end"]
    if c.hamiltonian_field is not None:
        lines += ["begin field hamiltonian-field"] + _components_block(c.hamiltonian_field.components) + ["end"]
    if c.hamiltonian is not None:
        lines += ["begin polynomial hamiltonian"] + _poly_block(c.hamiltonian) + ["end"]
    for order in sorted(c.residuals):
        lines += [f"begin residual {order}"] + _components_block(c.residuals[order]) + ["end"]
    return "\n".join(lines) + "\n"


def write_certificate(c: Certificate, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_certificate(c))


# reading ----------------------------------------------------------------


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def __iter__(self) -> Iterator[tuple[int, str]]:
        return self

    def __next__(self):
        if self.pos >= len(self.lines):
            raise StopIteration
        self.pos += 1
        return self.pos, self.lines[self.pos - 1]

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None


def _to_int(text: str, lineno, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise CertificateFormatError(f"{what} must be an integer, got {text.strip()!r}", lineno) from None


HEADER_KEYS = ("document", "mode", "order", "dimension", "kind", "frequencies", "genericity", "d4-ratio")
BLOCKS = {
    "field": ("input", "normal-form", "hamiltonian-field"),
    "involution": ("phi", "g2"),
    "polynomial": ("rho", "hamiltonian"),
    "transformation": ("normal-form-map", "hamiltonization"),
}


def _is_term(line: str) -> bool:
    return line[:1] in "+-"


def _read_terms(src: _Lines) -> list[str]:
    terms = []
    while (line := src.peek()) is not None and _is_term(line):
        next(src)
        terms.append(line)
    return terms


def _read_components(src: _Lines, dim: int, label: str = "component") -> list[Polynomial]:
    comps = []
    while (line := src.peek()) is not None and line.startswith(label + " "):
        lineno, line = next(src)
        parts = line.split()
        if len(parts) != 2:
            raise CertificateFormatError(f"malformed {label} line {line!r}", lineno)
        idx = _to_int(parts[1], lineno, label)
        if idx != len(comps):
            raise CertificateFormatError(f"expected {label} {len(comps)}, got {idx}", lineno)
        try:
            comps.append(parse_polynomial(_read_terms(src), dim))
        except ValueError as exc:
            raise CertificateFormatError(str(exc), lineno) from exc
    return comps


def _expect_end(src: _Lines):
    try:
        lineno, line = next(src)
    except StopIteration:
        raise CertificateFormatError("unexpected end of file, missing 'end'") from None
    if line.strip() != "end":
        raise CertificateFormatError(f"expected 'end', got {line!r}", lineno)


def _read_transformation(src: _Lines, dim: int) -> Transformation:
    try:
        lineno, line = next(src)
    except StopIteration:
        raise CertificateFormatError("unexpected end of file in transformation") from None
    if not line.startswith("working-order: "):
        raise CertificateFormatError("expected working-order", lineno)
    working = _to_int(line.split(":", 1)[1], lineno, "working-order")
    steps = []
    while (line := src.peek()) is not None and line.startswith("step "):
        lineno, line = next(src)
        if _to_int(line.split()[1] if len(line.split()) == 2 else "?", lineno, "step") != len(steps) + 1:
            raise CertificateFormatError("steps out of order", lineno)
        psi = _read_components(src, dim, "psi")
        if len(psi) != dim:
            raise CertificateFormatError(f"step has {len(psi)} psi components, expected {dim}", lineno)
        theta = None
        if src.peek() == "theta":
            next(src)
            try:
                theta = parse_polynomial(_read_terms(src), dim)
            except ValueError as exc:
                raise CertificateFormatError(str(exc), lineno) from exc
        steps.append(TransformationStep(tuple(psi), theta))
    _expect_end(src)
    return Transformation(dim, tuple(steps), working)


def parse_certificate(text: str) -> Certificate:
    src = _Lines(text)
    try:
        lineno, first = next(src)
    except StopIteration:
        raise CertificateFormatError("empty document") from None
    if first.strip() != FORMAT_HEADER:
        raise CertificateFormatError(f"missing header {FORMAT_HEADER!r}", lineno)
    header: dict[str, str] = {}
    blocks: dict[str, object] = {}
    residuals: dict[int, tuple[Polynomial, ...]] = {}
    dim = None
    for lineno, line in src:
        if not line.strip():
            continue
        if line.startswith("begin "):
            parts = line.split()
            if len(parts) != 3:
                raise CertificateFormatError(f"malformed block header {line!r}", lineno)
            _, what, name = parts
            if dim is None:
                raise CertificateFormatError("block before dimension header", lineno)
            if what != "residual" and name not in BLOCKS.get(what, (name,)):
                raise CertificateFormatError(f"unknown {what} block {name!r}", lineno)
            if what == "residual":
                _to_int(name, lineno, "residual order")
            if what in ("field", "involution", "residual"):
                comps = _read_components(src, dim)
                if len(comps) != dim:
                    raise CertificateFormatError(f"{what} {name} has {len(comps)} components", lineno)
                _expect_end(src)
                if what == "field":
                    blocks["field " + name] = VectorField(comps)
                elif what == "involution":
                    blocks["involution " + name] = Involution(comps)
                else:
                    residuals[int(name)] = tuple(comps)
            elif what == "polynomial":
                try:
                    blocks["polynomial " + name] = parse_polynomial(_read_terms(src), dim)
                except ValueError as exc:
                    raise CertificateFormatError(str(exc), lineno) from exc
                _expect_end(src)
            elif what == "transformation":
                blocks["transformation " + name] = _read_transformation(src, dim)
            else:
                raise CertificateFormatError(f"unknown block type {what!r}", lineno)
            continue
        if ":" not in line:
            raise CertificateFormatError(f"unexpected line {line!r}", lineno)
        key, value = (s.strip() for s in line.split(":", 1))
        if key not in HEADER_KEYS:
            raise CertificateFormatError(f"unknown header {key!r}", lineno)
        if key in header:
            raise CertificateFormatError(f"repeated header {key!r}", lineno)
        header[key] = value
        if key == "dimension":
            dim = _to_int(value, lineno, "dimension")
            if dim < 2 or dim % 2:
                raise CertificateFormatError("dimension must be even and positive", lineno)
        elif key == "order":
            _to_int(value, lineno, "order")
        elif key == "kind" and value not in (ELLIPTIC, SADDLE):
            raise CertificateFormatError(f"unknown kind {value!r}", lineno)
        elif key == "document" and value not in ("normal-form", "hamiltonization"):
            raise CertificateFormatError(f"unknown document type {value!r}", lineno)
        elif key == "mode" and value not in MODES:
            raise CertificateFormatError(f"unknown mode {value!r}", lineno)
    try:
        d4 = None
        if "d4-ratio" in header:
            r1, r2 = (int(v) for v in header["d4-ratio"].split())
            d4 = D4Data(blocks["involution g2"], r1, r2)
        return Certificate(
            document=header["document"],
            order=int(header["order"]),
            kind=header["kind"],
            frequencies=tuple(rational(v) for v in header["frequencies"].split()),
            normal_form=blocks["field normal-form"],
            normal_form_transformation=blocks["transformation normal-form-map"],
            mode=header.get("mode"),
            genericity=rational(header["genericity"]) if "genericity" in header else None,
            input_field=blocks.get("field input"),
            involution=blocks.get("involution phi"),
            hamiltonian_field=blocks.get("field hamiltonian-field"),
            hamiltonian=blocks.get("polynomial hamiltonian"),
            transformation=blocks.get("transformation hamiltonization"),
            rho=blocks.get("polynomial rho"),
            residuals=residuals,
            d4=d4,
        )
    except KeyError as exc:
        raise CertificateFormatError(f"missing required entry {exc.args[0]!r}") from None
    except ValueError as exc:
        raise CertificateFormatError(str(exc)) from None


def read_certificate(path) -> Certificate:
    with open(path, encoding="utf-8") as fh:
        return parse_certificate(fh.read())
