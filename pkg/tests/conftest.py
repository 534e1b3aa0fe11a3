import random
from pathlib import Path

import pytest
import sympy as sp
from gmpy2 import mpq

from reviham.field import Involution, VectorField
from reviham.generators import conjugate_by_equivariant, random_invariant_normal_form
from reviham.polyalg import ELLIPTIC, SADDLE, Polynomial

DATA = Path(__file__).parent / "data"

FREQS = {
    ELLIPTIC: [mpq(1), mpq(13, 11), mpq(17, 7)],
    SADDLE: [mpq(1), mpq(13, 11), mpq(17, 7)],
}


def symbols(dim):
    return sp.symbols(f"v0:{dim}")


def to_sympy(p: Polynomial, syms=None):
    syms = syms or symbols(p.dimension)
    expr = sp.Integer(0)
    for exps, c in p.items():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for s, e in zip(syms, exps):
            term *= s**e
        expr += term
    return sp.expand(expr)


def from_sympy(expr, dim, syms=None) -> Polynomial:
    syms = syms or symbols(dim)
    poly = sp.Poly(sp.expand(expr), *syms)
    return Polynomial(dim, {m: mpq(int(c.p), int(c.q)) for m, c in poly.terms()})


def sympy_jet(expr, syms, order):
    poly = sp.Poly(sp.expand(expr), *syms)
    return sum(
        (c * sp.prod([s**e for s, e in zip(syms, m)]) for m, c in poly.terms() if sum(m) <= order),
        sp.Integer(0),
    )


def orbital_instance(n, kind, seed, order=5, conjugate=True, density=0.2, freqs=None):
    """Reversible field with a symmetric nonzero cubic block: an invariant
    normal form, optionally hidden by an equivariant change of coordinates."""
    rng = random.Random(seed)
    freqs = freqs or FREQS[kind][:n]
    nf = random_invariant_normal_form(n, kind, freqs, order, rng, size=5)
    if not conjugate:
        return nf
    phi = Involution.canonical(n, kind)
    return conjugate_by_equivariant(nf, [phi], order, rng, density=density, size=3)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def data_dir():
    return DATA


def poly(dim, terms):
    return Polynomial(dim, {tuple(k): mpq(v) for k, v in terms.items()})


__all__ = ["to_sympy", "from_sympy", "symbols", "orbital_instance", "poly", "VectorField"]


def coefficient_lines(text):
    return [i for i, line in enumerate(text.splitlines()) if line[:1] in "+-"]


def tamper(text, index):
    """Add one to the coefficient on line ``index`` (two if that gives zero)."""
    from reviham.polyalg import format_rational, rational

    lines = text.splitlines()
    coeff, rest = lines[index].split(" ", 1)
    q = rational(coeff) + 1
    if not q:
        q += 1
    lines[index] = f"{format_rational(q)} {rest}"
    return "\n".join(lines) + "\n"
