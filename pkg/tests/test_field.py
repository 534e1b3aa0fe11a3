import random

import pytest
import sympy as sp
from gmpy2 import mpq

from conftest import from_sympy, symbols, sympy_jet, to_sympy
from reviham.errors import NonSimpleSingularity, SpectrumError
from reviham.field import (
    Involution,
    SymplecticStructure,
    Transformation,
    TransformationStep,
    VectorField,
    compose_maps,
    divergence,
    find_hamiltonian,
    hamiltonian_vector_field,
    identity_map,
    invert_map,
    is_hamiltonian,
    is_reversible,
    montgomery_bochner,
    pushforward,
    pushforward_map,
    reversibility_defect,
    time_reparametrize,
)
from reviham.generators import random_reversible_field
from reviham.polyalg import ELLIPTIC, SADDLE, Polynomial, monomials_of_degree


def _random_poly(rng, dim, lo, hi, density=0.4):
    t = {}
    for d in range(lo, hi + 1):
        for m in monomials_of_degree(dim, d):
            if rng.random() < density:
                t[m] = mpq(rng.randint(-4, 4), rng.randint(1, 3))
    return Polynomial(dim, t)


def _near_identity(rng, dim, hi=3):
    return [x + _random_poly(rng, dim, 2, hi) for x in identity_map(dim)]


def test_normalized_linear_parts():
    X = VectorField.normalized_linear(ELLIPTIC, [1, mpq(3, 2)])
    assert X.spectrum_kind == ELLIPTIC
    assert X.frequencies == [1, mpq(3, 2)]
    assert X[0] == -Polynomial.variable(4, 1)
    S = VectorField.normalized_linear(SADDLE, [2])
    assert S.spectrum_kind == SADDLE and S.frequencies == [2]
    assert S[1] == Polynomial.variable(2, 1).scale(-2)


def test_simple_singularity_and_normalization():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    with pytest.raises(NonSimpleSingularity):
        VectorField([x + Polynomial.constant(2, 1), -y]).check_simple_singularity()
    with pytest.raises(NonSimpleSingularity):
        VectorField([x * x, y]).check_simple_singularity()
    with pytest.raises(SpectrumError):
        VectorField([x + y, -y]).check_normalized()


def test_canonical_involutions_are_valid():
    for kind in (ELLIPTIC, SADDLE):
        phi = Involution.canonical(3, kind)
        assert phi.is_valid() and phi.fixed_dimension() == 3


def test_involution_defects():
    assert Involution.from_matrix([[1, 0], [0, 1]]).defects()  # Fix is everything
    assert Involution.from_matrix([[1, 1], [0, -1]]).is_valid()
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    bad = Involution([x + y * y, -y])
    assert any("phi∘phi" in d for d in bad.defects(4))
    good = Involution([x, -y - (x * x).scale(2)])
    assert good.is_valid(6)


def test_montgomery_bochner_linearizes():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    phi = Involution([x, -y - (x * x).scale(2)])
    chi = montgomery_bochner(phi)
    lhs = compose_maps(chi, phi.components)
    L = phi.linearization
    rhs = [sum((c.scale(L[i][j]) for j, c in enumerate(chi) if L[i][j]), Polynomial.zero(2)) for i in range(2)]
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(4))
def test_invert_map_against_sympy(seed):
    rng = random.Random(seed)
    phi = _near_identity(rng, 2)
    inv = invert_map(phi, 5)
    s = symbols(2)
    sub = {s[i]: to_sympy(p, s) for i, p in enumerate(inv)}
    for i, p in enumerate(phi):
        composed = to_sympy(p, s).subs(sub, simultaneous=True)
        assert sympy_jet(composed, s, 5) == s[i]


@pytest.mark.parametrize("seed", range(4))
def test_pushforward_conjugacy_identity(seed):
    # (Ψ_*X)(Ψ(x)) = DΨ(x) X(x), checked with sympy up to the working order
    rng = random.Random(10 + seed)
    N = 4
    X = [_random_poly(rng, 2, 1, 3) for _ in range(2)]
    Psi = _near_identity(rng, 2)
    Y = pushforward_map(Psi, X, N)
    s = symbols(2)
    Ps = [to_sympy(p, s) for p in Psi]
    Xs = [to_sympy(p, s) for p in X]
    for i in range(2):
        lhs = to_sympy(Y[i], s).subs({s[0]: Ps[0], s[1]: Ps[1]}, simultaneous=True)
        rhs = sum(sp.diff(Ps[i], s[j]) * Xs[j] for j in range(2))
        assert sympy_jet(lhs - rhs, s, N) == 0


def test_transformation_rho_and_pushforward_agree():
    rng = random.Random(3)
    N = 5
    X = VectorField.normalized_linear(ELLIPTIC, [1]) + VectorField([_random_poly(rng, 2, 2, 3) for _ in range(2)])
    theta = _random_poly(rng, 2, 2, 2)
    s1 = TransformationStep(tuple(_random_poly(rng, 2, 2, 3) for _ in range(2)), theta)
    s2 = TransformationStep(tuple(_random_poly(rng, 2, 3, 3) for _ in range(2)), None)
    T = Transformation(2, (s1, s2), N)
    stepwise = pushforward(T, X, N)
    direct = pushforward_map(T.coordinate_map(), time_reparametrize(X, T.rho(N), N).components, N)
    assert [p.jet(N) for p in direct] == list(stepwise)


def test_pushforward_refuses_short_working_order():
    T = Transformation(2, (TransformationStep((Polynomial.monomial((2, 0)), Polynomial.zero(2))),), 3)
    with pytest.raises(ValueError):
        pushforward(T, VectorField.normalized_linear(ELLIPTIC, [1]), 5)


@pytest.mark.parametrize("kind", [ELLIPTIC, SADDLE])
def test_reversibility_against_sympy(kind):
    rng = random.Random(7)
    X = random_reversible_field(1, kind, [mpq(2)], 4, rng, density=0.6)
    phi = Involution.canonical(1, kind)
    assert is_reversible(X, phi, 4)
    s = symbols(2)
    L = sp.Matrix(phi.linearization)
    Xs = sp.Matrix([to_sympy(p, s) for p in X])
    lhs = Xs.subs({s[0]: (L * sp.Matrix(s))[0], s[1]: (L * sp.Matrix(s))[1]}, simultaneous=True)
    assert sp.expand(lhs + L * Xs) == sp.zeros(2, 1)
    # breaking it is detected at the right degree
    Y = X + VectorField([Polynomial.monomial((2, 0), 1), Polynomial.zero(2)])
    defect = reversibility_defect(Y, phi, 4)
    assert any(defect) and min(p.min_degree for p in defect if p) == 2


@pytest.mark.parametrize("seed", range(5))
def test_hamiltonian_round_trip(seed):
    rng = random.Random(seed)
    H = _random_poly(rng, 4, 2, 5)
    X = hamiltonian_vector_field(H)
    assert divergence(X).is_zero()
    found, bad = find_hamiltonian(X, 4)
    assert bad is None and found == H
    assert is_hamiltonian(X, 4) == H


def test_hamiltonian_vector_field_against_sympy():
    H = Polynomial(2, {(3, 1): 2, (0, 2): mpq(1, 3)})
    x, y = symbols(2)
    h = to_sympy(H)
    X = hamiltonian_vector_field(H)
    assert X[0] == from_sympy(-sp.diff(h, y), 2)
    assert X[1] == from_sympy(sp.diff(h, x), 2)


def test_non_hamiltonian_reports_degree():
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    X = VectorField([-y, x + (x * x * y)])
    H, bad = find_hamiltonian(X, 3)
    assert H is None and bad == 3


def test_symplectic_structure():
    S = SymplecticStructure(2)
    assert S.is_symplectic([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert not S.is_symplectic([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    J = S.J
    assert J[0][1] == -1 and J[1][0] == 1
