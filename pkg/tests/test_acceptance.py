"""Acceptance criteria 1-11.  Each test prints one ``criterion N: PASS|FAIL``
line (visible without ``-s``) and then asserts."""

import random
import time
from contextlib import contextmanager

import pytest
import sympy as sp
from gmpy2 import mpq

from conftest import DATA, coefficient_lines, tamper
from reviham.certificate import D4Data, format_certificate, parse_certificate
from reviham.document import read_field_document
from reviham.drift import energy_drift_scaling
from reviham.errors import NotGeneric, SingularSystem
from reviham.field import Involution, is_hamiltonian, pushforward
from reviham.generators import (
    conjugate_by_equivariant,
    random_d4_instance,
    random_invariant_normal_form,
    random_reversible_field,
)
from reviham.hamiltonize import (
    InvariantField,
    check_genericity,
    closed_form_2d,
    conjugacy_minors,
    extract_invariant_form,
    hamiltonize,
)
from reviham.normalform import homological_operator, poincare_dulac, resonant_part
from reviham.polyalg import ELLIPTIC, SADDLE, Polynomial, monomials_of_degree, to_invariant, unit
from reviham.verify import verify_certificate

FREQS = [mpq(1), mpq(13, 11), mpq(17, 7)]


@contextmanager
def criterion(number, capsys, label):
    start = time.perf_counter()
    info = {}
    status = "FAIL"
    try:
        yield info
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        detail = info.get("detail", "")
        with capsys.disabled():
            print(f"\ncriterion {number}: {status} {label} ({elapsed:.1f} s){' ' + detail if detail else ''}")


# shared instances -----------------------------------------------------------


def _pd_instances():
    out = []
    for i in range(20):
        n = 1 if i < 10 else 2
        kind = ELLIPTIC if i % 2 == 0 else SADDLE
        X = random_reversible_field(n, kind, FREQS[:n], 7, random.Random(i), density=0.5 if n == 1 else 0.15, size=5)
        out.append((kind, X))
    return out


@pytest.fixture(scope="module")
def pd_runs():
    start = time.perf_counter()
    runs = [(kind, X, poincare_dulac(X, 7, Involution.canonical(X.n, kind))) for kind, X in _pd_instances()]
    return runs, time.perf_counter() - start


def _orbital6_instances():
    # 10 elliptic and 5 saddle 6D normal forms; random symmetric cubic blocks with nonzero entries
    return [(ELLIPTIC if i < 10 else SADDLE, random_invariant_normal_form(3, ELLIPTIC if i < 10 else SADDLE, FREQS, 9,
                                                                         random.Random(i))) for i in range(15)]


@pytest.fixture(scope="module")
def orbital6():
    return _orbital6_instances()


@pytest.fixture(scope="module")
def certificates():
    """Every certificate produced by the acceptance run, for criterion 11."""
    return []


# criteria -------------------------------------------------------------------


def test_criterion_01_poincare_dulac_exactness(pd_runs, capsys):
    runs, elapsed = pd_runs
    with criterion(1, capsys, "Poincaré–Dulac exactness on 20 2D/4D reversible fields, N=7") as info:
        for kind, X, res in runs:
            diff = [(a - b).jet(7) for a, b in zip(pushforward(res.transformation, X, 7), res.normal_form)]
            assert not any(diff)
            for m in range(2, 8):
                hm = res.normal_form.homogeneous(m).components
                assert resonant_part(hm, kind, X.frequencies) == list(hm)
        assert elapsed < 30
        info["detail"] = f"[pd total {elapsed:.1f} s]"


def test_criterion_02_shape(pd_runs, capsys):
    runs, _ = pd_runs
    with criterion(2, capsys, "even parts vanish, odd parts are invariant-shaped (both kinds)"):
        checked = 0
        for kind, X, res in runs:
            nf = res.normal_form
            for m in range(2, 8, 2):
                assert nf.homogeneous(m).is_zero()
            inv = extract_invariant_form(nf)  # raises ShapeViolation otherwise
            assert inv.to_field(7) == nf
            for j in range(nf.n):
                # the ∂/∂y_j (elliptic) or ∂/∂x_j (saddle) component divided by x_j is a Δ/Γ polynomial
                comp = nf[2 * j + 1] if kind == ELLIPTIC else nf[2 * j]
                to_invariant(comp.divide_by_variable(2 * j), kind)
            checked += 1
        assert checked == 20


def test_criterion_03_orbital6(orbital6, certificates, capsys):
    with criterion(3, capsys, "orbital Hamiltonization of 10 elliptic + 5 saddle 6D instances, N=9") as info:
        start = time.perf_counter()
        for kind, X in orbital6:
            inv = extract_invariant_form(X)
            assert check_genericity(inv)
            c = hamiltonize(X, 9)
            assert sorted(c.residuals) == [5, 7, 9]
            assert all(not any(r) for r in c.residuals.values())
            assert is_hamiltonian(c.hamiltonian_field, 9) is not None
            certificates.append(c)
        elapsed = time.perf_counter() - start
        assert elapsed < 120
        info["detail"] = f"[hamiltonize total {elapsed:.1f} s]"


def _decoupled(Y, n):
    for m in range(4, Y.degree + 1):
        for j in range(n):
            for comp in (Y[2 * j], Y[2 * j + 1]).__iter__():
                for exps, _ in comp.homogeneous(m).items():
                    if any(e for i, e in enumerate(exps) if i // 2 != j):
                        return False
    return True


def test_criterion_04_decoupled(orbital6, certificates, capsys):
    with criterion(4, capsys, "decoupled6: Y minus its 3-jet is decoupled"):
        for kind, X in orbital6:
            c = hamiltonize(X, 9, mode="decoupled6")
            assert all(not any(r) for r in c.residuals.values())
            assert _decoupled(c.hamiltonian_field, 3)
            certificates.append(c)


def test_criterion_05_conjugacy(orbital6, certificates, capsys):
    with criterion(5, capsys, "conjugacy6: rho = 1 on criterion 3 instances") as info:
        singular = []
        for i, (kind, X) in enumerate(orbital6):
            try:
                c = hamiltonize(X, 9, mode="conjugacy6")
            except SingularSystem as exc:
                singular.append((i, exc.degree, exc.witness))
                continue
            assert c.rho == Polynomial.constant(6, 1)
            assert all(not any(r) for r in c.residuals.values())
            certificates.append(c)
        info["detail"] = f"[singular: {len(singular)}]"
        assert not singular, singular


def test_conjugacy_degenerate_block_is_witnessed():
    # F != 0 but an off-diagonal minor of the cubic block vanishes
    cubic = [[5, mpq(-1, 4), -1], [mpq(-1, 4), mpq(1, 4), 1], [-1, 1, mpq(4, 3)]]
    X = random_invariant_normal_form(3, ELLIPTIC, FREQS, 5, random.Random(1), cubic=cubic)
    assert check_genericity(extract_invariant_form(X))
    witnesses = []
    for _ in range(2):
        with pytest.raises(SingularSystem) as exc:
            hamiltonize(X, 5, mode="conjugacy6")
        witnesses.append(exc.value.witness)
    assert witnesses[0] == witnesses[1]
    assert 0 in witnesses[0]["off_diagonal_minors"]
    assert conjugacy_minors(cubic)[1] == 0


def test_criterion_06_d4(certificates, capsys):
    with criterion(6, capsys, "D4 resonant Hamiltonization, ratio 3:5, N=7"):
        X, g1, g2 = random_d4_instance(7, random.Random(6))
        pd = poincare_dulac(X, 7, g1, strict=False)
        c = hamiltonize(pd.normal_form, 7, mode="d4_resonant", phi=g1, d4=D4Data(g2, 3, 5), source=pd)
        assert list(c.frequencies) == [3, 5]
        assert all(not any(r) for r in c.residuals.values())
        assert is_hamiltonian(c.hamiltonian_field, 7) is not None
        certificates.append(c)


def test_criterion_07_closed_form(certificates, capsys):
    with criterion(7, capsys, "planar closed form equals the pipeline H (gradients, exact)"):
        for i in range(8):
            kind = ELLIPTIC if i % 2 == 0 else SADDLE
            rng = random.Random(70 + i)
            nterms = i // 2 + 1
            # the Δ-linear coefficient is the genericity factor, so it is always present
            degrees = [1] + rng.sample(range(2, 6), nterms - 1)
            f = Polynomial(1, {(d,): mpq(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((-1, 1)) for d in degrees})
            inv = InvariantField(1, kind, (mpq(rng.randint(1, 5), rng.randint(1, 5)),), (f,))
            nf = inv.to_field(9)
            X = conjugate_by_equivariant(nf, [Involution.canonical(1, kind)], 9, rng, density=0.5)
            pd = poincare_dulac(X, 9, Involution.canonical(1, kind))
            c = hamiltonize(pd.normal_form, 9, source=pd)
            H_closed = closed_form_2d(pd.normal_form)
            assert [g.jet(9) for g in H_closed.gradient()] == [g.jet(9) for g in c.hamiltonian.gradient()]
            certificates.append(c)


def test_criterion_08_genericity_gate(orbital6, capsys):
    with criterion(8, capsys, "zeroing any a_{j,e_r} gives F = 0 and NotGeneric"):
        kind, X = orbital6[0]
        inv = extract_invariant_form(X)
        assert check_genericity(inv)
        for j in range(3):
            for r in range(3):
                fs = list(inv.f)
                fs[j] = fs[j] - Polynomial.monomial(unit(3, r), fs[j].coefficient(unit(3, r)))
                broken = InvariantField(3, kind, inv.frequencies, tuple(fs))
                assert check_genericity(broken) == 0
                with pytest.raises(NotGeneric):
                    hamiltonize(broken.to_field(9), 9)


def _dense(A, m):
    x = sp.symbols("x y")
    basis = [(mono, s) for mono in monomials_of_degree(2, m) for s in range(2)]
    sym = sp.zeros(len(basis), len(basis))
    ours = sp.zeros(len(basis), len(basis))
    As = sp.Matrix([[sp.Rational(int(mpq(v).numerator), int(mpq(v).denominator)) for v in row] for row in A])
    for col, (mono, s) in enumerate(basis):
        h = sp.zeros(2, 1)
        h[s] = x[0] ** mono[0] * x[1] ** mono[1]
        img = (h.jacobian(x) * As * sp.Matrix(x) - As * h).applyfunc(sp.expand)
        hp = [Polynomial.zero(2), Polynomial.zero(2)]
        hp[s] = Polynomial.monomial(mono)
        got = homological_operator(A, hp)
        for row, (mono2, s2) in enumerate(basis):
            sym[row, col] = sp.Poly(img[s2], *x).coeff_monomial(x[0] ** mono2[0] * x[1] ** mono2[1])
            c = got[s2].coefficient(mono2)
            ours[row, col] = sp.Rational(int(c.numerator), int(c.denominator))
    return ours, sym


def test_criterion_09_homological_oracle(capsys):
    with criterion(9, capsys, "homological operator equals the dense brute-force matrix, n=1, degrees 2-3"):
        for A in ([[0, -1], [1, 0]], [[0, mpq(-7, 3)], [mpq(7, 3), 0]], [[1, 0], [0, -1]], [[mpq(5, 2), 0], [0, mpq(-5, 2)]]):
            for m in (2, 3):
                ours, sym = _dense(A, m)
                assert ours == sym


def test_criterion_10_numerical_witness(certificates, capsys):
    with criterion(10, capsys, "drift slope >= 4.5 at N=5; exact pair drift < 1e-10 at r=0.1") as info:
        start = time.perf_counter()
        doc = read_field_document(DATA / "elliptic6_n5.txt")
        pd = poincare_dulac(doc.field, 5, doc.involution)
        c = hamiltonize(pd.normal_form, 5, source=pd)
        rep = energy_drift_scaling(c, radii=(0.2, 0.1, 0.05), T=1.0, dt=1e-3)
        exact = energy_drift_scaling(c, radii=(0.1,), T=1.0, dt=1e-3, field="hamiltonian")
        elapsed = time.perf_counter() - start
        info["detail"] = f"[slope {rep.slope:.2f}, exact drift {exact.drifts[0]:.1e}]"
        assert rep.status == "FITTED" and rep.slope >= 4.5
        assert exact.drifts[0] < 1e-10
        assert elapsed < 60
        certificates.append(c)


def test_criterion_11_certificate_integrity(certificates, capsys):
    with criterion(11, capsys, "round trip and verify on all certificates; every tamper detected") as info:
        assert len(certificates) >= 45
        for c in certificates:
            back = parse_certificate(format_certificate(c))
            assert back == c
            res = verify_certificate(back)
            assert res.ok, res.message
        tampered = 0
        rng = random.Random(11)
        for c in certificates:
            text = format_certificate(c)
            idx = coefficient_lines(text)
            small = c.dimension <= 4
            if not small:
                if c is not certificates[0]:
                    continue
                idx = rng.sample(idx, 40)
            for i in idx:
                res = verify_certificate(parse_certificate(tamper(text, i)))
                assert not res.ok, f"tamper on line {i + 1} of a {c.dimension}D certificate not detected"
                tampered += 1
        info["detail"] = f"[{len(certificates)} certificates, {tampered} tampers]"
