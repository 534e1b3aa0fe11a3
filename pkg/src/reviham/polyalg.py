"""Exact sparse multivariate polynomials over Q and Q(i).

Monomials are stored packed into a single Python integer: eight bits per
variable, with the total degree in the bits above the exponents.  Adding two
packed keys multiplies the monomials and adds their degrees at once, which
keeps the inner loops of multiplication and substitution cheap.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

from .errors import DomainError, NotInvariant

__all__ = [
    "QQ",
    "QQ_I",
    "GaussianRational",
    "Polynomial",
    "InvariantPolynomial",
    "rational",
    "monomials_of_degree",
    "unit",
    "to_invariant",
    "complexify",
    "realify",
    "format_rational",
    "format_polynomial",
    "parse_polynomial",
    "variable_names",
    "invariant_images",
    "ELLIPTIC",
    "SADDLE",
]

QQ = "QQ"
QQ_I = "QQ_I"

_BITS = 8
_MASK = (1 << _BITS) - 1
_MAX_EXPONENT = _MASK


def rational(value) -> mpq:
    """Convert ``value`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq`` and strings such as ``"-3/4"``.
    Floats are rejected: nothing in the formal pipeline may be inexact.
    """
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float coefficient {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ValueError(f"malformed rational {value!r}")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return mpq(int(num), int(den))
        return mpq(int(text))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def format_rational(q) -> str:
    """Signed ``p/q`` text for a rational, e.g. ``+3/1`` or ``-1/2``."""
    q = mpq(q)
    sign = "-" if q < 0 else "+"
    return f"{sign}{abs(q.numerator)}/{q.denominator}"


class GaussianRational:
    """Element ``a + b i`` of Q(i)."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = real if isinstance(real, type(mpq())) else rational(real)
        self.imag = imag if isinstance(imag, type(mpq())) else rational(imag)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        return GaussianRational(other, 0)

    def __add__(self, other):
        other = self._coerce(other)
        return GaussianRational(self.real + other.real, self.imag + other.imag)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return GaussianRational(self.real - other.real, self.imag - other.imag)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            other = rational(other)
            return GaussianRational(self.real * other, self.imag * other)
        return GaussianRational(
            self.real * other.real - self.imag * other.imag,
            self.real * other.imag + self.imag * other.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        norm = other.real * other.real + other.imag * other.imag
        if not norm:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussianRational(other.real / norm, -other.imag / norm)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.real, -self.imag)

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.real == other.real and self.imag == other.imag
        try:
            return self.imag == 0 and self.real == rational(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.real, self.imag))

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self):
        return f"{self.real}{'+' if self.imag >= 0 else '-'}{abs(self.imag)}i"


I = GaussianRational(0, 1)


def monomials_of_degree(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length ``nvars`` with the given total degree,
    in the package's monomial order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for v in combo:
            exps[v] += 1
        out.append(tuple(exps))
    return out


def unit(n: int, r: int) -> tuple[int, ...]:
    """Multi-index with a single 1 in position ``r``."""
    e = [0] * n
    e[r] = 1
    return tuple(e)


def _pack(exps: Sequence[int], dim: int) -> int:
    key = 0
    deg = 0
    for e in exps:
        if e < 0 or e > _MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        key = (key << _BITS) | e
        deg += e
    return key | (deg << (_BITS * dim))


def _unpack(key: int, dim: int) -> tuple[int, ...]:
    out = [0] * dim
    for i in range(dim - 1, -1, -1):
        out[i] = key & _MASK
        key >>= _BITS
    return tuple(out)


class Polynomial:
    """Sparse polynomial in ``dimension`` variables with exact coefficients.

    The zero polynomial has no terms; zero coefficients are never stored.
    Coefficients live in Q (``domain="QQ"``, ``gmpy2.mpq``) or Q(i)
    (``domain="QQ_I"``, :class:`GaussianRational`).
    """

    __slots__ = ("dimension", "domain", "_terms", "_shift")

    def __init__(self, dimension: int, terms: Mapping | Iterable | None = None, domain: str = QQ):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        if domain not in (QQ, QQ_I):
            raise ValueError(f"unknown coefficient domain {domain!r}")
        self.dimension = dimension
        self.domain = domain
        self._shift = _BITS * dimension
        self._terms: dict[int, object] = {}
        if terms is None:
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        convert = self._convert
        for exps, coeff in items:
            if len(exps) != dimension:
                raise ValueError(
                    f"monomial {tuple(exps)} has length {len(exps)}, expected {dimension}"
                )
            c = convert(coeff)
            if not c:
                continue
            key = _pack(exps, dimension)
            total = self._terms.get(key)
            total = c if total is None else total + c
            if total:
                self._terms[key] = total
            else:
                self._terms.pop(key, None)

    def _convert(self, coeff):
        if self.domain == QQ:
            if isinstance(coeff, GaussianRational):
                if coeff.imag:
                    raise DomainError("complex coefficient in a QQ polynomial")
                return coeff.real
            return rational(coeff)
        if isinstance(coeff, GaussianRational):
            return coeff
        return GaussianRational(coeff, 0)

    @classmethod
    def _raw(cls, dimension: int, terms: dict, domain: str = QQ) -> "Polynomial":
        p = cls.__new__(cls)
        p.dimension = dimension
        p.domain = domain
        p._shift = _BITS * dimension
        p._terms = terms
        return p

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dimension: int, domain: str = QQ) -> "Polynomial":
        return cls._raw(dimension, {}, domain)

    @classmethod
    def constant(cls, dimension: int, value, domain: str = QQ) -> "Polynomial":
        return cls(dimension, {(0,) * dimension: value}, domain)

    @classmethod
    def variable(cls, dimension: int, index: int, domain: str = QQ) -> "Polynomial":
        if not 0 <= index < dimension:
            raise IndexError(f"variable index {index} out of range")
        return cls(dimension, {unit(dimension, index): 1}, domain)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff=1, domain: str = QQ) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): coeff}, domain)

    # inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], object]:
        """Exponent tuple -> coefficient (a fresh dict)."""
        dim = self.dimension
        return {_unpack(k, dim): c for k, c in self._terms.items()}

    def items(self) -> Iterator[tuple[tuple[int, ...], object]]:
        dim = self.dimension
        for k in self.sorted_keys():
            yield _unpack(k, dim), self._terms[k]

    def sorted_keys(self) -> list[int]:
        shift = self._shift
        return sorted(self._terms, key=lambda k: (k >> shift, -k))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(self._terms) >> self._shift

    @property
    def min_degree(self) -> int:
        if not self._terms:
            return -1
        return min(self._terms) >> self._shift

    def coefficient(self, exponents: Sequence[int]):
        c = self._terms.get(_pack(exponents, self.dimension))
        if c is None:
            return GaussianRational() if self.domain == QQ_I else mpq(0)
        return c

    def constant_term(self):
        return self.coefficient((0,) * self.dimension)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = {k >> self._shift for k in self._terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    # arithmetic -------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.dimension != self.dimension:
            raise ValueError(f"dimension mismatch: {self.dimension} vs {other.dimension}")
        if other.domain != self.domain:
            raise DomainError(f"mixed coefficient domains {self.domain} and {other.domain}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(self.dimension, other, self.domain)
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Polynomial._raw(self.dimension, out, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.dimension, {k: -c for k, c in self._terms.items()}, self.domain)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return self + (-self._convert(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "Polynomial":
        if isinstance(factor, GaussianRational) and self.domain == QQ:
            raise DomainError("scaling a QQ polynomial by a Gaussian rational")
        c = self._convert(factor)
        if not c:
            return Polynomial.zero(self.dimension, self.domain)
        return Polynomial._raw(self.dimension, {k: v * c for k, v in self._terms.items()}, self.domain)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def mul(self, other: "Polynomial", max_degree: int | None = None) -> "Polynomial":
        """Product, dropping every term of total degree above ``max_degree``."""
        self._check(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial.zero(self.dimension, self.domain)
        if len(a) > len(b):
            a, b = b, a
        shift = self._shift
        out: dict[int, object] = {}
        get = out.get
        if max_degree is None:
            for ka, ca in a.items():
                for kb, cb in b.items():
                    k = ka + kb
                    v = get(k)
                    out[k] = ca * cb if v is None else v + ca * cb
        else:
            limit = (max_degree + 1) << shift
            blist = sorted(b.items())
            for ka, ca in a.items():
                if ka >= limit:
                    continue
                for kb, cb in blist:
                    k = ka + kb
                    if k >= limit:
                        break
                    v = get(k)
                    out[k] = ca * cb if v is None else v + ca * cb
        return Polynomial._raw(self.dimension, {k: v for k, v in out.items() if v}, self.domain)

    def __pow__(self, exponent: int):
        return self.power(exponent)

    def power(self, exponent: int, max_degree: int | None = None) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.dimension, 1, self.domain)
        base = self
        while exponent:
            if exponent & 1:
                result = result.mul(base, max_degree)
            exponent >>= 1
            if exponent:
                base = base.mul(base, max_degree)
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (
                self.dimension == other.dimension
                and self.domain == other.domain
                and self._terms == other._terms
            )
        if not self._terms:
            return other == 0
        return NotImplemented

    __hash__ = None

    # truncation -------------------------------------------------------

    def jet(self, k: int) -> "Polynomial":
        """All terms of total degree <= k."""
        if k < 0:
            raise ValueError("jet order must be non-negative")
        limit = (k + 1) << self._shift
        return Polynomial._raw(
            self.dimension, {key: c for key, c in self._terms.items() if key < limit}, self.domain
        )

    def homogeneous(self, m: int) -> "Polynomial":
        """Degree-``m`` homogeneous part."""
        shift = self._shift
        return Polynomial._raw(
            self.dimension, {k: c for k, c in self._terms.items() if k >> shift == m}, self.domain
        )

    def truncate_below(self, m: int) -> "Polynomial":
        """Drop every term of total degree below ``m``."""
        lo = m << self._shift
        return Polynomial._raw(
            self.dimension, {k: c for k, c in self._terms.items() if k >= lo}, self.domain
        )

    # calculus and composition -----------------------------------------

    def differentiate(self, var_index: int) -> "Polynomial":
        dim = self.dimension
        if not 0 <= var_index < dim:
            raise IndexError(f"variable index {var_index} out of range for dimension {dim}")
        bit = _BITS * (dim - 1 - var_index)
        step = (1 << bit) + (1 << self._shift)
        out = {}
        for k, c in self._terms.items():
            e = (k >> bit) & _MASK
            if e:
                out[k - step] = c * e
        return Polynomial._raw(dim, out, self.domain)

    def gradient(self) -> list["Polynomial"]:
        return [self.differentiate(i) for i in range(self.dimension)]

    def substitute(self, images: Sequence["Polynomial"], max_degree: int | None = None) -> "Polynomial":
        """Composition ``p(images[0], ..., images[d-1])``.

        With ``max_degree`` set, every intermediate product is truncated;
        products never lower degree, so the returned jet is exact.
        """
        if len(images) != self.dimension:
            raise ValueError(f"expected {self.dimension} images, got {len(images)}")
        if not images:
            return self
        target = images[0]
        for img in images:
            if img.dimension != target.dimension:
                raise ValueError("images have different dimensions")
        domain = QQ_I if (self.domain == QQ_I or any(i.domain == QQ_I for i in images)) else QQ
        images = [img.to_domain(domain) for img in images]
        if not self._terms:
            return Polynomial.zero(target.dimension, domain)
        if target.dimension == self.dimension and max_degree is not None:
            shifts = _near_identity_shift(images)
            if shifts is not None:
                return self.to_domain(domain).translate(shifts, max_degree)
        # Horner over the variables: p = sum_e x0^e p_e(x1, ...)
        return _horner(self.to_domain(domain), images, 0, max_degree, target.dimension, domain)

    def divide_by_variable(self, var_index: int) -> "Polynomial":
        """Exact quotient ``p / x_var``; raises ``ValueError`` if some term
        does not contain the variable."""
        dim = self.dimension
        if not 0 <= var_index < dim:
            raise IndexError(f"variable index {var_index} out of range")
        bit = _BITS * (dim - 1 - var_index)
        step = (1 << bit) + (1 << self._shift)
        out = {}
        for k, c in self._terms.items():
            if not (k >> bit) & _MASK:
                raise ValueError(f"polynomial is not divisible by variable {var_index}")
            out[k - step] = c
        return Polynomial._raw(dim, out, self.domain)

    def translate(self, shifts: Sequence["Polynomial"], max_degree: int) -> "Polynomial":
        """Jet of ``p(x + χ(x))`` where every ``χ_i`` starts at degree >= 2.

        Uses the finite Taylor sum ``Σ_β ∂^β p · χ^β / β!``; a branch is cut as
        soon as its lowest possible degree exceeds ``max_degree`` (each extra
        derivative costs one degree and each extra factor of χ adds at least
        two).
        """
        dim = self.dimension
        if len(shifts) != dim:
            raise ValueError(f"expected {dim} shifts, got {len(shifts)}")
        active = [v for v in range(dim) if shifts[v]]
        if any(shifts[v].min_degree < 2 for v in active):
            raise ValueError("translate needs shifts without constant or linear terms")
        result = self.jet(max_degree)
        one = Polynomial.constant(dim, 1, self.domain)

        def walk(deriv, prod, start, last, mult, factor):
            for v in active[start:]:
                d = deriv.differentiate(v)
                if not d:
                    continue
                p2 = prod.mul(shifts[v], max_degree)
                if not p2:
                    continue
                low = p2.min_degree
                if d.min_degree + low > max_degree:
                    continue
                m2 = mult + 1 if v == last else 1
                f2 = factor / m2
                d = d.jet(max_degree - low)
                nonlocal result
                result = result + d.mul(p2, max_degree).scale(f2)
                walk(d, p2, active.index(v), v, m2, f2)

        walk(self, one, 0, None, 0, mpq(1))
        return result

    def evaluate(self, point: Sequence):
        """Exact evaluation at a point with rational (or Gaussian) entries."""
        total = 0
        for exps, c in self.items():
            term = c
            for x, e in zip(point, exps):
                if e:
                    term = term * x**e
            total = total + term
        return total

    # domains ----------------------------------------------------------

    def to_domain(self, domain: str) -> "Polynomial":
        if domain == self.domain:
            return self
        if domain == QQ_I:
            return Polynomial._raw(
                self.dimension, {k: GaussianRational(c, 0) for k, c in self._terms.items()}, QQ_I
            )
        return self.real_part_checked()

    def to_gaussian(self) -> "Polynomial":
        return self.to_domain(QQ_I)

    def real_part(self) -> "Polynomial":
        if self.domain == QQ:
            return self
        return Polynomial._raw(
            self.dimension, {k: c.real for k, c in self._terms.items() if c.real}, QQ
        )

    def imag_part(self) -> "Polynomial":
        if self.domain == QQ:
            return Polynomial.zero(self.dimension)
        return Polynomial._raw(
            self.dimension, {k: c.imag for k, c in self._terms.items() if c.imag}, QQ
        )

    def real_part_checked(self) -> "Polynomial":
        if self.domain == QQ:
            return self
        if any(c.imag for c in self._terms.values()):
            raise DomainError("polynomial has non-real coefficients")
        return self.real_part()

    # text -------------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        if not self._terms:
            return f"Polynomial({self.dimension}, 0)"
        names = variable_names(self.dimension)
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                f"{names[i]}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _horner(p: Polynomial, images, var: int, max_degree, tdim: int, domain) -> Polynomial:
    """Evaluate ``p`` at ``images`` by nested Horner over its variables."""
    dim = p.dimension
    if not p._terms:
        return Polynomial.zero(tdim, domain)
    if var == dim:
        (c,) = p._terms.values()
        return Polynomial.constant(tdim, c, domain)
    bit = _BITS * (dim - 1 - var)
    shift = p._shift
    groups: dict[int, dict[int, object]] = {}
    for k, c in p._terms.items():
        e = (k >> bit) & _MASK
        rest = k - (e << bit) - (e << shift)
        groups.setdefault(e, {})[rest] = c
    result = None
    top = max(groups)
    img = images[var]
    for e in range(top, -1, -1):
        if result is not None:
            result = result.mul(img, max_degree)
        g = groups.get(e)
        if g is not None:
            sub = _horner(Polynomial._raw(dim, g, domain), images, var + 1, max_degree, tdim, domain)
            result = sub if result is None else result + sub
    if max_degree is not None:
        result = result.jet(max_degree)
    return result


def _near_identity_shift(images):
    """``images[i] - x_i`` when every image is ``x_i`` plus terms of degree
    >= 2; ``None`` otherwise."""
    dim = len(images)
    shifts = []
    for i, img in enumerate(images):
        xi = _pack(unit(dim, i), dim)
        shift = img._shift
        limit = 2 << shift
        low = {k: c for k, c in img._terms.items() if k < limit}
        if low != {xi: low.get(xi)} or low.get(xi) != 1:
            return None
        shifts.append(Polynomial._raw(dim, {k: c for k, c in img._terms.items() if k >= limit}, img.domain))
    return shifts


def variable_names(dimension: int) -> list[str]:
    """``x1 y1 x2 y2 ...`` for even dimension, ``u1 u2 ...`` otherwise."""
    if dimension % 2 == 0:
        names = []
        for j in range(dimension // 2):
            names += [f"x{j + 1}", f"y{j + 1}"]
        return names
    return [f"u{j + 1}" for j in range(dimension)]


def format_polynomial(p: Polynomial) -> str:
    """Canonical text: one ``±p/q x1^a1 y1^b1 ...`` term per line, in
    monomial order.  The zero polynomial is the empty string."""
    if p.domain != QQ:
        raise DomainError("only real polynomials have a canonical text form")
    names = variable_names(p.dimension)
    lines = []
    for exps, c in p.items():
        mono = " ".join(f"{n}^{e}" for n, e in zip(names, exps))
        lines.append(f"{format_rational(c)} {mono}")
    return "\n".join(lines)


_TERM_RE = re.compile(r"^([+-]\d+/\d+)((?:\s+[A-Za-z]\d+\^\d+)+)$")


def parse_polynomial(text: str | Iterable[str], dimension: int) -> Polynomial:
    """Inverse of :func:`format_polynomial`."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    names = variable_names(dimension)
    terms = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        m = _TERM_RE.match(line)
        if m is None:
            raise ValueError(f"line {lineno}: malformed term {raw!r}")
        coeff = rational(m.group(1))
        factors = m.group(2).split()
        if [f.split("^")[0] for f in factors] != names:
            raise ValueError(f"line {lineno}: expected variables {' '.join(names)}")
        exps = tuple(int(f.split("^")[1]) for f in factors)
        if exps in terms:
            raise ValueError(f"line {lineno}: repeated monomial")
        if not coeff:
            raise ValueError(f"line {lineno}: zero coefficient stored")
        terms[exps] = coeff
    return Polynomial(dimension, terms)


# invariant coordinates ---------------------------------------------------

ELLIPTIC = "elliptic"
SADDLE = "saddle"


@dataclass(frozen=True, eq=False)
class InvariantPolynomial:
    """Polynomial in the plane invariants ``Δ_j = x_j²+y_j²`` (elliptic) or
    ``Γ_j = x_j y_j`` (saddle), stored as a polynomial in ``n`` variables."""

    n: int
    kind: str
    poly: Polynomial

    def __post_init__(self):
        if self.kind not in (ELLIPTIC, SADDLE):
            raise ValueError(f"unknown invariant kind {self.kind!r}")
        if self.poly.dimension != self.n:
            raise ValueError("invariant polynomial dimension mismatch")

    @classmethod
    def from_terms(cls, n: int, kind: str, terms: Mapping) -> "InvariantPolynomial":
        return cls(n, kind, Polynomial(n, terms))

    @property
    def terms(self) -> dict[tuple[int, ...], mpq]:
        return self.poly.terms

    def __eq__(self, other):
        return (
            isinstance(other, InvariantPolynomial)
            and self.kind == other.kind
            and self.poly == other.poly
        )

    __hash__ = None

    def expand(self) -> Polynomial:
        """The polynomial in ``x_1, y_1, ..., x_n, y_n``."""
        return self.poly.substitute(invariant_images(self.n, self.kind))


def invariant_images(n: int, kind: str) -> list[Polynomial]:
    """``[Δ_1, ..., Δ_n]`` or ``[Γ_1, ..., Γ_n]`` in 2n variables."""
    dim = 2 * n
    out = []
    for j in range(n):
        if kind == ELLIPTIC:
            ex = [0] * dim
            ey = [0] * dim
            ex[2 * j] = 2
            ey[2 * j + 1] = 2
            out.append(Polynomial(dim, {tuple(ex): 1, tuple(ey): 1}))
        elif kind == SADDLE:
            e = [0] * dim
            e[2 * j] = 1
            e[2 * j + 1] = 1
            out.append(Polynomial(dim, {tuple(e): 1}))
        else:
            raise ValueError(f"unknown invariant kind {kind!r}")
    return out


def to_invariant(p: Polynomial, kind: str) -> InvariantPolynomial:
    """Rewrite ``p`` as a polynomial in Δ_j (or Γ_j).

    Raises :class:`NotInvariant` when no such polynomial reproduces ``p``.
    """
    if p.domain != QQ:
        raise DomainError("to_invariant expects a real polynomial")
    if p.dimension % 2:
        raise ValueError("ambient dimension must be even")
    n = p.dimension // 2
    terms = {}
    for exps, c in p.items():
        xs, ys = exps[0::2], exps[1::2]
        if kind == ELLIPTIC:
            # Δ^I contains x^(2I) with coefficient one and no other pure-x monomial
            if any(ys):
                continue
            if any(e % 2 for e in xs):
                raise NotInvariant(f"odd power in monomial {exps} of an elliptic invariant")
            terms[tuple(e // 2 for e in xs)] = c
        elif kind == SADDLE:
            if xs != ys:
                raise NotInvariant(f"monomial {exps} is not a product of x_j*y_j")
            terms[tuple(xs)] = c
        else:
            raise ValueError(f"unknown invariant kind {kind!r}")
    inv = InvariantPolynomial(n, kind, Polynomial(n, terms))
    if inv.expand() != p:
        raise NotInvariant(f"polynomial is not a polynomial in the {kind} invariants")
    return inv


# complexification ------------------------------------------------------


def _complex_images(dim: int) -> list[Polynomial]:
    # x_j = (z_j + w_j)/2,  y_j = -i (z_j - w_j)/2
    half = mpq(1, 2)
    out = []
    for j in range(dim // 2):
        ez, ew = unit(dim, 2 * j), unit(dim, 2 * j + 1)
        out.append(Polynomial(dim, {ez: half, ew: half}, QQ_I))
        out.append(
            Polynomial(dim, {ez: GaussianRational(0, -half), ew: GaussianRational(0, half)}, QQ_I)
        )
    return out


def _real_images(dim: int) -> list[Polynomial]:
    # z_j = x_j + i y_j,  w_j = x_j - i y_j
    out = []
    for j in range(dim // 2):
        ex, ey = unit(dim, 2 * j), unit(dim, 2 * j + 1)
        out.append(Polynomial(dim, {ex: 1, ey: GaussianRational(0, 1)}, QQ_I))
        out.append(Polynomial(dim, {ex: 1, ey: GaussianRational(0, -1)}, QQ_I))
    return out


@functools.lru_cache(maxsize=None)
def _plane_table(a: int, b: int, to_complex: bool) -> tuple:
    """Expansion of ``x^a y^b`` in ``(z, w)`` (or of ``z^a w^b`` in
    ``(x, y)``) as ``((c, d), coeff)`` pairs."""
    dim = 2
    if to_complex:
        u, v = _complex_images(dim)
    else:
        u, v = _real_images(dim)
    q = u.power(a) * v.power(b)
    return tuple(q.items())


def _plane_substitute(p: Polynomial, to_complex: bool) -> Polynomial:
    # the substitution acts plane by plane, so expand each plane from a cached table
    dim = p.dimension
    shift = _BITS * dim
    out: dict[int, GaussianRational] = {}
    for exps, coeff in p.items():
        partial = {0: coeff if isinstance(coeff, GaussianRational) else GaussianRational(coeff)}
        for j in range(dim // 2):
            a, b = exps[2 * j], exps[2 * j + 1]
            if not (a or b):
                continue
            bx = _BITS * (dim - 1 - 2 * j)
            by = _BITS * (dim - 2 - 2 * j)
            nxt: dict[int, GaussianRational] = {}
            for (c, d), t in _plane_table(a, b, to_complex):
                off = (c << bx) + (d << by) + ((c + d) << shift)
                for k, v in partial.items():
                    key = k + off
                    val = nxt.get(key)
                    nxt[key] = v * t if val is None else val + v * t
            partial = nxt
        for k, v in partial.items():
            val = out.get(k)
            out[k] = v if val is None else val + v
    return Polynomial._raw(dim, {k: v for k, v in out.items() if v}, QQ_I)


def complexify(p: Polynomial) -> Polynomial:
    """Rewrite a polynomial in ``(x_j, y_j)`` in the coordinates
    ``z_j = x_j + i y_j``, ``w_j = x_j - i y_j`` (variables ordered z1 w1 ...)."""
    if p.dimension % 2:
        raise ValueError("complexification needs an even dimension")
    return _plane_substitute(p, True)


def realify(q: Polynomial, check: bool = True) -> Polynomial:
    """Inverse of :func:`complexify`; returns a ``QQ`` polynomial when the
    result is real (raises :class:`DomainError` otherwise, if ``check``)."""
    if q.dimension % 2:
        raise ValueError("realification needs an even dimension")
    out = _plane_substitute(q, False)
    return out.real_part_checked() if check else out
