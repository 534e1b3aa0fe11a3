import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import from_sympy, symbols, to_sympy
from reviham.errors import DomainError, NotInvariant
from reviham.polyalg import (
    ELLIPTIC,
    QQ_I,
    SADDLE,
    GaussianRational,
    InvariantPolynomial,
    Polynomial,
    complexify,
    format_polynomial,
    monomials_of_degree,
    parse_polynomial,
    rational,
    realify,
    to_invariant,
)

rationals = st.builds(lambda p, q: mpq(p, q), st.integers(-20, 20), st.integers(1, 12))


@st.composite
def polynomials(draw, dim=3, max_degree=4, max_terms=6):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        exps = tuple(draw(st.lists(st.integers(0, max_degree), min_size=dim, max_size=dim)))
        if sum(exps) <= max_degree:
            terms[exps] = draw(rationals)
    return Polynomial(dim, terms)


def test_rational_parsing():
    assert rational("-3/4") == mpq(-3, 4)
    assert rational("+7") == 7
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ValueError):
        rational("1.5")
    with pytest.raises(ZeroDivisionError):
        rational("1/0")


def test_zero_coefficients_are_dropped():
    p = Polynomial(2, {(1, 0): 1, (0, 1): 0})
    assert len(p) == 1
    assert (p - p).is_zero()


def test_monomial_count():
    assert len(monomials_of_degree(4, 3)) == 20
    monos = monomials_of_degree(3, 4)
    assert len(set(monos)) == len(monos) == 15
    assert all(sum(m) == 4 for m in monos)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        Polynomial(2, {(1, 0, 0): 1})


@settings(max_examples=60, deadline=None)
@given(polynomials(), polynomials())
def test_ring_operations_match_sympy(p, q):
    s = symbols(3)
    assert from_sympy(to_sympy(p, s) * to_sympy(q, s), 3, s) == p * q
    assert from_sympy(to_sympy(p, s) + to_sympy(q, s), 3, s) == p + q
    assert from_sympy(to_sympy(p, s) - to_sympy(q, s), 3, s) == p - q


@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials(), st.integers(0, 6))
def test_truncated_product_is_jet(p, q, k):
    assert p.mul(q, k) == (p * q).jet(k)


@settings(max_examples=40, deadline=None)
@given(polynomials(max_degree=3), polynomials(max_degree=2), polynomials(max_degree=2), polynomials(max_degree=2))
def test_substitute_matches_sympy(p, a, b, c):
    s = symbols(3)
    expr = to_sympy(p, s).subs({s[0]: to_sympy(a, s), s[1]: to_sympy(b, s), s[2]: to_sympy(c, s)}, simultaneous=True)
    assert p.substitute([a, b, c]) == from_sympy(expr, 3, s)


@settings(max_examples=30, deadline=None)
@given(polynomials(max_degree=4), polynomials(max_degree=3), polynomials(max_degree=3), polynomials(max_degree=3))
def test_near_identity_translate(p, a, b, c):
    # shifts with no constant or linear part take the Taylor path
    shifts = [q.truncate_below(2) for q in (a, b, c)]
    images = [Polynomial.variable(3, i) + s for i, s in enumerate(shifts)]
    assert p.translate(shifts, 5) == p.substitute(images).jet(5)


@settings(max_examples=40, deadline=None)
@given(polynomials())
def test_derivative_matches_sympy(p):
    s = symbols(3)
    for i in range(3):
        assert p.differentiate(i) == from_sympy(sp.diff(to_sympy(p, s), s[i]), 3, s)


@settings(max_examples=40, deadline=None)
@given(polynomials(dim=4))
def test_text_round_trip(p):
    assert parse_polynomial(format_polynomial(p), 4) == p


def test_parse_rejects_bad_terms():
    with pytest.raises(ValueError):
        parse_polynomial("+1/2 x1^1 y1^0 x2^0", 4)
    with pytest.raises(ValueError):
        parse_polynomial("0.5 x1^1 y1^0", 2)


def test_gaussian_arithmetic():
    i = GaussianRational(0, 1)
    assert i * i == GaussianRational(-1, 0)
    z = GaussianRational(mpq(1, 2), 3)
    assert z / z == GaussianRational(1, 0)
    assert (z * z.conjugate()).imag == 0


@settings(max_examples=40, deadline=None)
@given(polynomials(dim=4, max_degree=4))
def test_complexify_round_trip(p):
    q = complexify(p)
    assert q.domain == QQ_I
    assert realify(q) == p


def test_complexify_matches_sympy():
    x, y, z, w = sp.symbols("x y z w")
    p = Polynomial(2, {(2, 1): 3, (0, 3): mpq(-1, 2), (1, 0): 1})
    expr = 3 * x**2 * y - sp.Rational(1, 2) * y**3 + x
    want = sp.expand(expr.subs({x: (z + w) / 2, y: (z - w) / (2 * sp.I)}, simultaneous=True))
    got = complexify(p)
    poly = sp.Poly(want, z, w)
    assert len(got) == len(poly.terms())
    for m, c in poly.terms():
        g = got.coefficient(m)
        assert sp.Rational(int(g.real.numerator), int(g.real.denominator)) == sp.re(c)
        assert sp.Rational(int(g.imag.numerator), int(g.imag.denominator)) == sp.im(c)


def test_realify_rejects_non_real():
    q = Polynomial(2, {(1, 0): GaussianRational(1, 1)}, QQ_I)
    with pytest.raises(DomainError):
        realify(q)


@pytest.mark.parametrize("kind", [ELLIPTIC, SADDLE])
def test_invariant_round_trip(kind):
    inv = InvariantPolynomial.from_terms(2, kind, {(1, 0): 3, (1, 2): mpq(-2, 5), (0, 1): 1})
    assert to_invariant(inv.expand(), kind) == inv


def test_invariant_expansion_by_sympy():
    x1, y1, x2, y2 = symbols(4)
    inv = InvariantPolynomial.from_terms(2, ELLIPTIC, {(1, 1): 2})
    want = sp.expand(2 * (x1**2 + y1**2) * (x2**2 + y2**2))
    assert to_sympy(inv.expand()) == want


def test_not_invariant():
    with pytest.raises(NotInvariant):
        to_invariant(Polynomial(2, {(2, 0): 1}), ELLIPTIC)
    with pytest.raises(NotInvariant):
        to_invariant(Polynomial(2, {(2, 0): 1}), SADDLE)


def test_divide_by_variable():
    p = Polynomial(2, {(2, 1): 3, (1, 0): 1})
    assert p.divide_by_variable(0) == Polynomial(2, {(1, 1): 3, (0, 0): 1})
    with pytest.raises(ValueError):
        p.divide_by_variable(1)
