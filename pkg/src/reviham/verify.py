"""Independent re-verification of certificates.

Everything here is recomputed from the stored data with the polynomial and
vector-field primitives only; the hamiltonization solver is never called.
Checks run in a fixed order and stop at the first failure, which is
reported with the offending degree and component where that makes sense.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .certificate import Certificate
from .errors import NotInvariant
from .field import (
    Involution,
    VectorField,
    compose_maps,
    find_hamiltonian,
    hamiltonian_vector_field,
    identity_map,
    montgomery_bochner,
    pushforward,
    pushforward_map,
    reversibility_defect,
)
from .polyalg import ELLIPTIC, SADDLE, GaussianRational, Polynomial, complexify, to_invariant, unit

__all__ = ["VerificationFailure", "VerificationResult", "verify_certificate"]

MODES = ("orbital", "decoupled6", "conjugacy6", "d4_resonant")
MODE_DIMENSION = {"decoupled6": 6, "conjugacy6": 6, "d4_resonant": 4}


class VerificationFailure(Exception):
    def __init__(self, check: str, message: str, degree: int | None = None, component: int | None = None):
        super().__init__(message)
        self.check = check
        self.message = message
        self.degree = degree
        self.component = component

    def __str__(self):
        where = []
        if self.degree is not None:
            where.append(f"degree {self.degree}")
        if self.component is not None:
            where.append(f"component {self.component}")
        suffix = f" ({', '.join(where)})" if where else ""
        return f"{self.check}: {self.message}{suffix}"


@dataclass
class VerificationResult:
    ok: bool
    passed: list[str] = field(default_factory=list)
    failure: VerificationFailure | None = None

    def __bool__(self):
        return self.ok

    @property
    def message(self) -> str:
        return "all checks passed" if self.ok else str(self.failure)


def _first_nonzero(diffs: Sequence[Polynomial]) -> tuple[int, int] | None:
    """(lowest degree, component) of the first nonzero entry."""
    best = None
    for i, p in enumerate(diffs):
        if p:
            cand = (p.min_degree, i)
            if best is None or cand < best:
                best = cand
    return best


def _require_zero(check: str, what: str, diffs: Sequence[Polynomial]) -> None:
    hit = _first_nonzero(diffs)
    if hit is not None:
        raise VerificationFailure(check, f"{what} does not vanish", degree=hit[0], component=hit[1])


def _matrix_of(phi: Involution):
    return [list(r) for r in phi.linearization]


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), mpq(0)) for j in range(len(b[0]))] for i in range(len(a))]


# spectra (kept local so that verification shares no code with the solver) --


def _eigen_coordinates(comps: Sequence[Polynomial], kind: str) -> list[Polynomial]:
    if kind == SADDLE:
        return [p.to_gaussian() for p in comps]
    out = []
    i = GaussianRational(0, 1)
    for j in range(len(comps) // 2):
        cx, cy = complexify(comps[2 * j]), complexify(comps[2 * j + 1])
        out += [cx + cy.scale(i), cx - cy.scale(i)]
    return out


def _eigenvalues(kind: str, freqs) -> list[GaussianRational]:
    out = []
    for f in freqs:
        if kind == ELLIPTIC:
            out += [GaussianRational(0, f), GaussianRational(0, -f)]
        else:
            out += [GaussianRational(f), GaussianRational(-f)]
    return out


def _defects(comps: Sequence[Polynomial], kind: str, freqs):
    lam = _eigenvalues(kind, freqs)
    for s, p in enumerate(_eigen_coordinates(comps, kind)):
        for mono, _ in p.items():
            d = GaussianRational(0)
            for e, l in zip(mono, lam):
                if e:
                    d = d + l * e
            yield sum(mono), s, d - lam[s]


# individual checks --------------------------------------------------------


def _check_header(c: Certificate) -> None:
    X = c.normal_form
    dim = X.dimension
    if c.document not in ("normal-form", "hamiltonization"):
        raise VerificationFailure("header", f"unknown document type {c.document!r}")
    if c.order < 1:
        raise VerificationFailure("header", "order must be positive")
    if c.kind != X.spectrum_kind:
        raise VerificationFailure("header", f"kind {c.kind} does not match the linear part of the normal form")
    if list(c.frequencies) != list(X.frequencies):
        raise VerificationFailure("header", "frequencies do not match the linear part of the normal form")
    if any(f <= 0 for f in c.frequencies):
        raise VerificationFailure("header", "frequencies must be positive")
    fields = [("input", c.input_field), ("normal form", X), ("hamiltonian field", c.hamiltonian_field)]
    for name, F in fields:
        if F is None:
            continue
        if F.dimension != dim:
            raise VerificationFailure("header", f"{name} has dimension {F.dimension}, expected {dim}")
        if F.degree > c.order:
            raise VerificationFailure("header", f"{name} carries terms above the order", degree=F.degree)
    for name, T in (("normal-form map", c.normal_form_transformation), ("hamiltonization", c.transformation)):
        if T is not None and T.working_order != c.order:
            raise VerificationFailure("header", f"{name} working order {T.working_order} differs from order {c.order}")


def _check_simple(c: Certificate) -> None:
    for name, F in (("input", c.input_field), ("normal form", c.normal_form)):
        if F is None:
            continue
        for i, p in enumerate(F):
            if p.constant_term():
                raise VerificationFailure("simple singularity", f"{name} does not vanish at 0", degree=0, component=i)
    if c.input_field is not None and c.input_field.linear_part != c.normal_form.linear_part:
        raise VerificationFailure("simple singularity", "input and normal form have different linear parts", degree=1)


def _check_involution(c: Certificate) -> None:
    phi = c.involution
    if phi is None:
        return
    problems = phi.defects(c.order)
    if problems:
        raise VerificationFailure("involution", "; ".join(problems))
    if c.input_field is not None:
        _require_zero("reversibility", "input field under phi", reversibility_defect(c.input_field, phi, c.order))
    lin = Involution.from_matrix(phi.linearization)
    _require_zero("reversibility", "normal form under Dphi(0)", reversibility_defect(c.normal_form, lin, c.order))


def _check_pd_steps(c: Certificate) -> None:
    T = c.normal_form_transformation
    N = c.order
    steps = list(T.steps)
    dim = c.normal_form.dimension
    if steps and c.involution is not None and not c.involution.is_linear:
        chi = [p.scale(mpq(1, 2)).jet(N) for p in montgomery_bochner(c.involution, N)]
        expected = tuple(q - x for q, x in zip(chi, identity_map(dim)))
        if steps[0].psi != expected or steps[0].theta is not None:
            raise VerificationFailure("normal-form map", "first step is not the halved Montgomery-Bochner map")
        steps = steps[1:]
    last = 1
    for idx, step in enumerate(steps, 1):
        if step.theta is not None:
            raise VerificationFailure("normal-form map", f"step {idx} carries a time factor")
        degs = {p.degree for p in step.psi if p}
        if len(degs) != 1 or not all(p.is_homogeneous() for p in step.psi if p):
            raise VerificationFailure("normal-form map", f"step {idx} is not homogeneous")
        m = degs.pop()
        if not last < m <= N:
            raise VerificationFailure("normal-form map", f"step {idx} has degree {m} out of sequence", degree=m)
        last = m
        for deg, s, d in _defects(step.psi, c.kind, c.frequencies):
            if not d:
                raise VerificationFailure(
                    "normal-form map", f"step {idx} has a component along the kernel of the homological operator",
                    degree=deg, component=s,
                )


def _check_resonant(c: Certificate) -> None:
    comps = [p.truncate_below(2) for p in c.normal_form]
    for deg, s, d in _defects(comps, c.kind, c.frequencies):
        if d:
            raise VerificationFailure("normal form", "contains a nonresonant monomial", degree=deg, component=s)


def _check_pd_residual(c: Certificate) -> None:
    if c.input_field is None:
        return
    pushed = pushforward(c.normal_form_transformation, c.input_field, c.order)
    diffs = [(a - b).jet(c.order) for a, b in zip(pushed, c.normal_form)]
    _require_zero("normal-form residual", "jet(Psi_pd* X - X~)", diffs)


def _cubic_block(X: VectorField, kind: str) -> list[list[mpq]]:
    n = X.n
    dim = X.dimension
    out = [[mpq(0)] * n for _ in range(n)]
    for j in range(n):
        for r in range(n):
            e = [0] * dim
            e[2 * j] += 1
            if kind == ELLIPTIC:
                e[2 * r] += 2
                out[j][r] = X[2 * j + 1].coefficient(tuple(e))
            else:
                e[2 * r] += 1
                e[2 * r + 1] += 1
                out[j][r] = X[2 * j].coefficient(tuple(e))
    return out


def _check_genericity(c: Certificate) -> None:
    a = _cubic_block(c.normal_form, c.kind)
    n = len(a)
    for j in range(n):
        for r in range(j):
            if a[j][r] != a[r][j]:
                raise VerificationFailure(
                    "j3 hamiltonian", f"cubic coefficients a[{j + 1},{r + 1}] != a[{r + 1},{j + 1}]", degree=3
                )
    F = mpq(1)
    for row in a:
        for v in row:
            F *= v
    if not F:
        raise VerificationFailure("genericity", "F vanishes", degree=3)
    if c.genericity != F:
        raise VerificationFailure("genericity", f"recorded F = {c.genericity} but recomputed F = {F}", degree=3)


def _sigma_of(psi: Sequence[Polynomial], kind: str, step: int) -> None:
    dim = len(psi)
    for j in range(dim // 2):
        px, py = psi[2 * j], psi[2 * j + 1]
        try:
            s = px.divide_by_variable(2 * j)
            ok = s * Polynomial.variable(dim, 2 * j + 1) == py
            if ok:
                to_invariant(s, kind)
        except (ValueError, NotInvariant):
            ok = False
        if not ok:
            raise VerificationFailure(
                "hamiltonization map", f"step {step} is not of the form (x_j sigma_j, y_j sigma_j)",
                degree=max(px.degree, py.degree), component=2 * j,
            )


def _check_ham_steps(c: Certificate) -> None:
    T = c.transformation
    N = c.order
    expected = (N - 3) // 2
    if len(T.steps) != expected:
        raise VerificationFailure("hamiltonization map", f"{len(T.steps)} steps recorded, expected {expected}")
    lin = _matrix_of(c.involution) if c.involution is not None else None
    dim = T.dimension
    for k, step in enumerate(T.steps, 1):
        for p in step.psi:
            if p and not p.is_homogeneous(2 * k + 1):
                raise VerificationFailure("hamiltonization map", f"psi of step {k} is not homogeneous of degree {2 * k + 1}", degree=p.degree)
        _sigma_of(step.psi, c.kind, k)
        theta = step.theta
        if c.mode == "conjugacy6":
            if theta is not None and theta:
                raise VerificationFailure("conjugacy", f"step {k} carries a time factor", degree=2 * k + 2)
        elif theta is None:
            raise VerificationFailure("hamiltonization map", f"step {k} lacks its time factor")
        if theta is not None and theta:
            if not theta.is_homogeneous(2 * k + 2):
                raise VerificationFailure("hamiltonization map", f"theta of step {k} is not homogeneous of degree {2 * k + 2}", degree=theta.degree)
            try:
                to_invariant(theta, c.kind)
            except NotInvariant:
                raise VerificationFailure("hamiltonization map", f"theta of step {k} is not invariant", degree=2 * k + 2) from None
        if lin is not None:
            # equivariance: L ψ(x) = ψ(L x), θ(L x) = θ(x)
            lx = [Polynomial(dim, {unit(dim, b): lin[a][b] for b in range(dim)}) for a in range(dim)]
            lhs = [sum((step.psi[b].scale(lin[a][b]) for b in range(dim) if lin[a][b]), Polynomial.zero(dim)) for a in range(dim)]
            rhs = [p.substitute(lx) for p in step.psi]
            _require_zero("equivariance", f"psi of step {k}", [u - v for u, v in zip(lhs, rhs)])
            if theta is not None:
                _require_zero("equivariance", f"theta of step {k}", [theta.substitute(lx) - theta])


def _check_sequential(c: Certificate) -> None:
    N = c.order
    Y = c.hamiltonian_field
    current = list(c.normal_form.jet(N))
    orders = set()
    for k, step in enumerate(c.transformation.steps, 1):
        if step.theta is not None and step.theta:
            rho = Polynomial.constant(len(current), 1) + step.theta
            current = [rho.mul(p, N) for p in current]
        current = pushforward_map(step.map, current, N)
        order = 2 * k + 3
        orders.add(order)
        diffs = [(a - b).jet(order) for a, b in zip(current, Y)]
        _require_zero("residual", f"step {k}: jet(Psi_*(rho X~) - Y, {order})", diffs)
    if set(c.residuals) != orders:
        raise VerificationFailure("residual", f"stored residual orders {sorted(c.residuals)} differ from {sorted(orders)}")
    for order, res in c.residuals.items():
        if len(res) != Y.dimension:
            raise VerificationFailure("residual", f"stored residual {order} has wrong arity", degree=order)
        _require_zero("residual", f"stored residual at order {order}", res)


def _check_total(c: Certificate) -> None:
    N = c.order
    T = c.transformation
    dim = T.dimension
    rho = T.rho(N)
    if c.rho is None or c.rho != rho:
        hit = _first_nonzero([(c.rho or Polynomial.zero(dim)) - rho])
        raise VerificationFailure("time factor", "recorded rho differs from the product of the steps", degree=hit[0] if hit else None)
    if rho.constant_term() != 1:
        raise VerificationFailure("time factor", "rho(0) != 1", degree=0)
    Psi = identity_map(dim)
    for step in T.steps:
        Psi = compose_maps(step.map, Psi, N)
    scaled = [rho.mul(p, N) for p in c.normal_form]
    pushed = pushforward_map(Psi, scaled, N)
    diffs = [(a - b).jet(N) for a, b in zip(pushed, c.hamiltonian_field)]
    _require_zero("total residual", "jet(Psi_*(rho X~) - Y, N)", diffs)


def _check_hamiltonian(c: Certificate) -> None:
    N = c.order
    H = c.hamiltonian
    Y = c.hamiltonian_field
    if H.constant_term():
        raise VerificationFailure("hamiltonian", "H(0) != 0", degree=0)
    if H.degree > N + 1:
        raise VerificationFailure("hamiltonian", "H carries terms above order N+1", degree=H.degree)
    diffs = [(a - b).jet(N) for a, b in zip(Y, hamiltonian_vector_field(H))]
    _require_zero("hamiltonian", "jet(Y - J grad H, N)", diffs)
    H2, bad = find_hamiltonian(Y, N)
    if H2 is None:
        raise VerificationFailure("hamiltonian", "Y is not Hamiltonian", degree=bad)
    _require_zero("hamiltonian", "jet(Y, 3) - jet(X~, 3)", [(a - b).jet(3) for a, b in zip(Y, c.normal_form)])
    if c.involution is not None:
        lin = Involution.from_matrix(c.involution.linearization)
        _require_zero("reversibility", "Y under Dphi(0)", reversibility_defect(Y, lin, N))


def _check_mode(c: Certificate) -> None:
    mode = c.mode
    dim = c.normal_form.dimension
    if mode not in MODES:
        raise VerificationFailure("mode", f"unknown mode {mode!r}")
    need = MODE_DIMENSION.get(mode)
    if need is not None and dim != need:
        raise VerificationFailure("mode", f"mode {mode} needs dimension {need}, got {dim}")
    if mode == "conjugacy6" and c.rho != Polynomial.constant(dim, 1):
        raise VerificationFailure("conjugacy", "rho is not identically 1")
    if mode == "decoupled6":
        Y = c.hamiltonian_field
        for i, p in enumerate(Y):
            j = i // 2
            for mono, _ in p.truncate_below(4).items():
                if any(e for v, e in enumerate(mono) if v // 2 != j):
                    raise VerificationFailure("decoupling", "component depends on another plane", degree=sum(mono), component=i)
    if mode == "d4_resonant":
        d4 = c.d4
        if d4 is None:
            raise VerificationFailure("d4", "missing second involution")
        r1, r2 = d4.r1, d4.r2
        if r1 <= 0 or r2 <= 0 or r1 % 2 == 0 or r2 % 2 == 0 or r1 * r2 <= 1:
            raise VerificationFailure("d4", f"ratio {r1}:{r2} is not odd with r1*r2 > 1")
        a1, a2 = c.frequencies
        if a1 * r2 != a2 * r1:
            raise VerificationFailure("d4", f"frequencies are not in ratio {r1}:{r2}")
        problems = d4.g2.defects(c.order)
        if problems:
            raise VerificationFailure("d4", "second involution invalid: " + "; ".join(problems))
        for name, F in (("normal form", c.normal_form), ("Y", c.hamiltonian_field)):
            _require_zero("d4", f"{name} under g2", reversibility_defect(F, d4.g2, c.order))
        if c.involution is None:
            raise VerificationFailure("d4", "missing first involution")
        prod = _matmul(_matrix_of(c.involution), _matrix_of(d4.g2))
        sq = _matmul(prod, prod)
        ident = [[mpq(int(i == j)) for j in range(dim)] for i in range(dim)]
        if sq == ident or _matmul(sq, sq) != ident:
            raise VerificationFailure("d4", "the involutions do not generate a dihedral group of order 8")
    elif c.d4 is not None:
        raise VerificationFailure("d4", "D4 data attached to a non-d4 certificate")


def verify_certificate(c: Certificate) -> VerificationResult:
    """Re-check every claim in ``c`` exactly; see the module docstring."""
    checks = [
        ("header", _check_header),
        ("simple singularity", _check_simple),
        ("involution", _check_involution),
        ("normal-form map", _check_pd_steps),
        ("normal form", _check_resonant),
        ("normal-form residual", _check_pd_residual),
    ]
    if c.document == "hamiltonization":
        missing = [
            name for name in ("mode", "genericity", "hamiltonian_field", "hamiltonian", "transformation", "rho")
            if getattr(c, name) is None
        ]
        if missing:
            return VerificationResult(False, [], VerificationFailure("header", "missing " + ", ".join(missing)))
        checks += [
            ("mode", _check_mode),
            ("genericity", _check_genericity),
            ("hamiltonization map", _check_ham_steps),
            ("residual", _check_sequential),
            ("total residual", _check_total),
            ("hamiltonian", _check_hamiltonian),
        ]
    result = VerificationResult(True)
    for name, fn in checks:
        try:
            fn(c)
        except VerificationFailure as exc:
            result.ok = False
            result.failure = exc
            return result
        result.passed.append(name)
    return result
