"""Order-by-order hamiltonization of reversible normal forms.

A reversible elliptic normal form is ``X̃ = Σ_j F_j(Δ) R_j`` with
``R_j = -y_j ∂x_j + x_j ∂y_j`` and ``F_j = α_j + f_j(Δ)``; for a saddle,
``R_j = x_j ∂x_j - y_j ∂y_j`` and ``F_j = β_j + f_j(Γ)``.  ``J∇H`` of an
invariant ``H`` has this shape with ``F_j = 2 ∂H/∂Δ_j`` (elliptic) or
``F_j = -∂H/∂Γ_j`` (saddle).

The ansatz ``ψ_j = (x_j σ_j, y_j σ_j)`` commutes with every ``R_j``, so
``(Id+ψ)_*(F R_j) = (F∘Φ^{-1}) R_j`` with ``Φ_j(Δ) = Δ_j (1+σ_j)²``.  All
solving therefore happens on the ``n`` functions ``F_j`` of the invariants;
the ambient-space pushforward is only used to record residual jets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .certificate import Certificate, D4Data
from .errors import (
    InconsistentSystem,
    NotGeneric,
    NotInvariant,
    PreconditionError,
    ShapeViolation,
    SingularSystem,
)
from .field import (
    Involution,
    Transformation,
    TransformationStep,
    VectorField,
    invert_map,
    is_hamiltonian,
    is_reversible,
    pushforward_map,
)
from .linsolve import solve_sparse
from .normalform import NormalFormResult, resonance_scan, spectrum
from .polyalg import (
    ELLIPTIC,
    InvariantPolynomial,
    Polynomial,
    invariant_images,
    monomials_of_degree,
    to_invariant,
    unit,
)

__all__ = [
    "HamiltonizeMode",
    "InvariantField",
    "HamiltonizationStep",
    "HamiltonizationResult",
    "extract_invariant_form",
    "check_genericity",
    "check_j3_hamiltonian",
    "solve_step",
    "conjugacy_minors",
    "apply_step",
    "invariant_hamiltonian",
    "hamiltonize",
    "hamiltonize_full",
    "closed_form_2d",
    "check_d4_preconditions",
]


class HamiltonizeMode(str, enum.Enum):
    ORBITAL = "orbital"
    DECOUPLED6 = "decoupled6"
    CONJUGACY6 = "conjugacy6"
    D4_RESONANT = "d4_resonant"

    @classmethod
    def parse(cls, value) -> "HamiltonizeMode":
        if isinstance(value, cls):
            return value
        if value == "d4":
            return cls.D4_RESONANT
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown mode {value!r}; expected one of {names} (or d4)") from None

    def check_dimension(self, dim: int) -> None:
        need = {self.DECOUPLED6: 6, self.CONJUGACY6: 6, self.D4_RESONANT: 4}.get(self)
        if need is not None and dim != need:
            raise PreconditionError(
                f"mode {self.value} requires dimension {need}, got {dim}", "dimension"
            )


# invariant form -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InvariantField:
    """``X̃`` as ``n`` functions of the invariants.

    ``f[j]`` is ``F_j - F_j(0)``, a polynomial in ``n`` variables without
    constant term; ``coeffs[(j, I)]`` is its coefficient ``a_{j,I}``.
    """

    n: int
    kind: str
    frequencies: tuple
    f: tuple[Polynomial, ...]

    @property
    def coeffs(self) -> dict[tuple[int, tuple[int, ...]], mpq]:
        return {(j, I): c for j, p in enumerate(self.f) for I, c in p.items()}

    def cubic_block(self) -> list[list[mpq]]:
        """``a[j][r] = a_{j,e_r}``."""
        return [[self.f[j].coefficient(unit(self.n, r)) for r in range(self.n)] for j in range(self.n)]

    @property
    def F(self) -> list[Polynomial]:
        return [Polynomial.constant(self.n, a) + p for a, p in zip(self.frequencies, self.f)]

    def to_field(self, order: int | None = None) -> VectorField:
        return _field_from_F(self.F, self.kind, order)

    def __eq__(self, other):
        return (
            isinstance(other, InvariantField)
            and (self.n, self.kind, tuple(self.frequencies)) == (other.n, other.kind, tuple(other.frequencies))
            and self.f == other.f
        )

    __hash__ = None


def _field_from_F(F: Sequence[Polynomial], kind: str, order: int | None = None) -> VectorField:
    n = len(F)
    dim = 2 * n
    images = invariant_images(n, kind)
    comps = []
    for j, Fj in enumerate(F):
        if order is not None:
            Fj = Fj.jet((order - 1) // 2)
        e = Fj.substitute(images)
        x = Polynomial.variable(dim, 2 * j)
        y = Polynomial.variable(dim, 2 * j + 1)
        if kind == ELLIPTIC:
            comps += [-(y * e), x * e]
        else:
            comps += [x * e, -(y * e)]
    return VectorField(comps)


def extract_invariant_form(X: VectorField) -> InvariantField:
    """Read off ``F_j`` from a reversible normal form.

    Raises :class:`ShapeViolation` if some component pair is not of the
    form ``F_j R_j`` with ``F_j`` a polynomial in the invariants.
    """
    kind = X.check_normalized()
    freqs = X.frequencies
    n = X.n
    fs = []
    for j in range(n):
        cx, cy = X[2 * j], X[2 * j + 1]
        try:
            if kind == ELLIPTIC:
                Fj = cy.divide_by_variable(2 * j)
                ok = -(Fj * Polynomial.variable(X.dimension, 2 * j + 1)) == cx
            else:
                Fj = cx.divide_by_variable(2 * j)
                ok = -(Fj * Polynomial.variable(X.dimension, 2 * j + 1)) == cy
        except ValueError:
            ok = False
        if not ok:
            raise ShapeViolation(f"component pair {j} is not a multiple of the plane generator R_{j + 1}")
        try:
            inv = to_invariant(Fj - Polynomial.constant(X.dimension, freqs[j]), kind)
        except NotInvariant as exc:
            raise ShapeViolation(f"component pair {j}: {exc}") from None
        fs.append(inv.poly)
    return InvariantField(n, kind, tuple(freqs), tuple(fs))


def check_genericity(field: InvariantField) -> mpq:
    """``F = ∏_{j,r} a_{j,e_r}``."""
    out = mpq(1)
    for row in field.cubic_block():
        for a in row:
            out *= a
    return out


def check_j3_hamiltonian(field: InvariantField) -> bool:
    """Cross-symmetry ``a_{j,e_r} = a_{r,e_j}`` of the cubic block."""
    a = field.cubic_block()
    return all(a[j][r] == a[r][j] for j in range(field.n) for r in range(j))


# one induction step -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HamiltonizationStep:
    """Solution of the degree-``2k+3`` system.

    ``h[K]`` (``|K| = k+2``) are coefficients of ``H_{2k+4}``, ``theta[I]``
    (``|I| = k+1``) those of ``θ_{2k+2}`` (empty in conjugacy mode) and
    ``mu[(j, L)]`` (``|L| = k``) those of ``σ_j``; all in the invariants.
    """

    k: int
    h: dict
    theta: dict
    mu: dict

    def sigma(self, n: int) -> list[Polynomial]:
        out = [dict() for _ in range(n)]
        for (j, L), c in self.mu.items():
            out[j][L] = c
        return [Polynomial(n, t) for t in out]

    def theta_poly(self, n: int) -> Polynomial:
        return Polynomial(n, self.theta)

    def __eq__(self, other):
        return isinstance(other, HamiltonizationStep) and (self.k, self.h, self.theta, self.mu) == (
            other.k, other.h, other.theta, other.mu
        )

    __hash__ = None


def _gradient_factor(kind: str) -> mpq:
    # F_j = c ∂H/∂u_j
    return mpq(2) if kind == ELLIPTIC else mpq(-1)


def solve_step(F: Sequence[Polynomial], kind: str, cubic: Sequence[Sequence], k: int,
               mode: HamiltonizeMode | str = HamiltonizeMode.ORBITAL) -> HamiltonizationStep:
    """Solve the linear system that makes the degree-``k+1`` part of ``F``
    a gradient.

    For every ``j`` and ``|I| = k+1``::

        c (i_j+1) h_{I+e_j} - λ_j θ_I + 2 Σ_r a_{j,e_r} μ_{r,I-e_r} = a_{j,I}

    with ``c = 2`` and ``λ = α`` (elliptic) or ``c = -1`` and ``λ = β``
    (saddle).  Columns are ordered ``h``, ``θ``, ``μ`` (graded lex within
    each group) and the leftmost-pivot solution with free unknowns zero is
    returned.  Raises :class:`SingularSystem` when the system has no
    solution.
    """
    mode = HamiltonizeMode.parse(mode)
    n = len(F)
    c = _gradient_factor(kind)
    lam = [p.constant_term() for p in F]
    rows_I = monomials_of_degree(n, k + 1)
    if mode is HamiltonizeMode.DECOUPLED6:
        h_cols = [tuple((k + 2) * e for e in unit(n, r)) for r in range(n)]
        h_cols.sort(key=lambda K: tuple(-e for e in K))
    else:
        h_cols = monomials_of_degree(n, k + 2)
    th_cols = [] if mode is HamiltonizeMode.CONJUGACY6 else list(rows_I)
    mu_cols = [(r, L) for r in range(n) for L in monomials_of_degree(n, k)]
    index = {}
    for K in h_cols:
        index[("h", K)] = len(index)
    for I in th_cols:
        index[("t", I)] = len(index)
    for rl in mu_cols:
        index[("m", rl)] = len(index)
    rows, rhs, labels = [], [], []
    for j in range(n):
        for I in rows_I:
            row = {}
            K = tuple(e + (i == j) for i, e in enumerate(I))
            col = index.get(("h", K))
            if col is not None:
                row[col] = c * K[j]
            col = index.get(("t", I))
            if col is not None and lam[j]:
                row[col] = -lam[j]
            for r in range(n):
                if I[r] == 0 or not cubic[j][r]:
                    continue
                L = tuple(e - (i == r) for i, e in enumerate(I))
                row[index[("m", (r, L))]] = 2 * cubic[j][r]
            rows.append(row)
            rhs.append(F[j].coefficient(I))
            labels.append((j, I))
    try:
        sol = solve_sparse(rows, rhs, len(index))
    except InconsistentSystem as exc:
        j, I = labels[exc.row]
        witness = {"component": j, "multi_index": I, "unknowns": len(index), "equations": len(rows)}
        if mode is HamiltonizeMode.CONJUGACY6 and n == 3:
            witness["off_diagonal_minors"] = conjugacy_minors(cubic)
        raise SingularSystem(
            f"degree {2 * k + 3}: linear system for mode {mode.value} is inconsistent "
            f"(equation for component pair {j}, multi-index {I})",
            degree=2 * k + 3,
            witness=witness,
        ) from None
    h = {K: sol[index[("h", K)]] for K in h_cols if sol[index[("h", K)]]}
    theta = {I: sol[index[("t", I)]] for I in th_cols if sol[index[("t", I)]]}
    mu = {rl: sol[index[("m", rl)]] for rl in mu_cols if sol[index[("m", rl)]]}
    return HamiltonizationStep(k, h, theta, mu)


def conjugacy_minors(cubic: Sequence[Sequence]) -> tuple[mpq, mpq, mpq]:
    """Off-diagonal 2x2 minors of a symmetric 3x3 cubic block.

    Without time reparametrization the first (degree-5) system has full row
    rank exactly when none of these vanishes; ``F != 0`` alone does not
    ensure it.
    """
    a = cubic
    return (
        a[0][0] * a[1][2] - a[0][1] * a[0][2],
        a[0][1] * a[1][2] - a[0][2] * a[1][1],
        a[0][1] * a[2][2] - a[0][2] * a[1][2],
    )


def apply_step(F: Sequence[Polynomial], kind: str, step: HamiltonizationStep, max_degree: int) -> list[Polynomial]:
    """``jet(((1+θ)·F) ∘ Φ^{-1}, max_degree)`` with ``Φ_j = u_j (1+σ_j)²``."""
    n = len(F)
    one = Polynomial.constant(n, 1)
    rho = one + step.theta_poly(n)
    scaled = [rho.mul(p, max_degree) for p in F]
    sigma = step.sigma(n)
    if not any(sigma):
        return scaled
    Phi = [
        Polynomial.variable(n, j).mul((one + s).power(2, max_degree), max_degree)
        for j, s in enumerate(sigma)
    ]
    inv = invert_map(Phi, max_degree)
    return [p.substitute(inv, max_degree) for p in scaled]


def invariant_hamiltonian(F: Sequence[Polynomial], kind: str) -> Polynomial:
    """``H(u)`` with ``F_j = c ∂H/∂u_j`` and ``H(0) = 0``; raises
    :class:`SingularSystem` if the ``F_j`` do not form a gradient."""
    n = len(F)
    c = _gradient_factor(kind)
    coeffs: dict[tuple[int, ...], mpq] = {}
    for j, p in enumerate(F):
        for I, a in p.items():
            K = tuple(e + (i == j) for i, e in enumerate(I))
            val = a / (c * K[j])
            if coeffs.setdefault(K, val) != val:
                raise SingularSystem(f"F is not a gradient at multi-index {K}", degree=2 * sum(K) - 1)
    H = Polynomial(n, coeffs)
    for j, p in enumerate(F):
        if H.differentiate(j).scale(c) != p:
            raise SingularSystem(f"F_{j + 1} is not a gradient component", degree=2 * p.degree + 1)
    return H


# the pipeline ---------------------------------------------------------------


def _expand_map_psi(sigma: Sequence[Polynomial], kind: str) -> tuple[Polynomial, ...]:
    n = len(sigma)
    dim = 2 * n
    images = invariant_images(n, kind)
    out = []
    for j, s in enumerate(sigma):
        e = s.substitute(images)
        out += [Polynomial.variable(dim, 2 * j) * e, Polynomial.variable(dim, 2 * j + 1) * e]
    return tuple(out)


def check_d4_preconditions(X: VectorField, g1: Involution, g2: Involution, r1: int, r2: int,
                           order: int | None = None) -> bool:
    """Both reversibilities plus an exact odd ``r1:r2`` frequency ratio with
    ``r1·r2 > 1``."""
    if X.dimension != 4:
        return False
    order = X.degree if order is None else order
    freqs = X.frequencies
    if freqs is None:
        return False
    if r1 <= 0 or r2 <= 0 or r1 % 2 == 0 or r2 % 2 == 0 or r1 * r2 <= 1:
        return False
    if freqs[0] * r2 != freqs[1] * r1:
        return False
    return is_reversible(X, g1, order) and is_reversible(X, g2, order)


def _check_nonresonant(kind: str, freqs, N: int) -> None:
    spec = spectrum(kind, freqs)
    for m in range(2, N + 1):
        bad = resonance_scan(spec, m).accidental
        if bad:
            e = bad[0]
            raise PreconditionError(
                f"spectrum is resonant at degree {m}: monomial {e.monomial} in component {e.component}",
                "nonresonance",
            )


@dataclass
class HamiltonizationResult:
    """Certificate plus the per-step solutions and invariant data."""

    certificate: Certificate
    steps: list[HamiltonizationStep]
    invariant_form: InvariantField
    final_F: list[Polynomial]
    invariant_H: Polynomial
    residuals: dict[int, tuple[Polynomial, ...]] = field(default_factory=dict)


def hamiltonize_full(
    X: VectorField,
    N: int,
    mode: HamiltonizeMode | str = HamiltonizeMode.ORBITAL,
    phi: Involution | None = None,
    d4: D4Data | tuple | None = None,
    source: NormalFormResult | None = None,
) -> HamiltonizationResult:
    """Run the induction and keep the intermediate data; see :func:`hamiltonize`."""
    mode = HamiltonizeMode.parse(mode)
    if N < 3:
        raise ValueError("order must be at least 3")
    X.check_simple_singularity()
    kind = X.check_normalized()
    mode.check_dimension(X.dimension)
    n, dim = X.n, X.dimension
    X = X.jet(N)
    if phi is None:
        phi = source.involution if source is not None and source.involution is not None else Involution.canonical(n, kind)
    lin_phi = Involution.from_matrix(phi.linearization)
    if not lin_phi.is_valid():
        raise PreconditionError("invalid involution: " + "; ".join(lin_phi.defects()), "involution")
    if not is_reversible(X, lin_phi, N):
        raise PreconditionError("normal form is not reversible under the involution", "reversibility")
    if mode is HamiltonizeMode.D4_RESONANT:
        if d4 is None:
            raise PreconditionError("d4 mode needs the second involution and the ratio r1:r2", "d4")
        if not isinstance(d4, D4Data):
            d4 = D4Data(*d4)
        if not check_d4_preconditions(X, lin_phi, d4.g2, d4.r1, d4.r2, N):
            raise PreconditionError(
                "D4 hypotheses fail: need reversibility under both involutions and odd r1:r2 with r1*r2 > 1",
                "d4",
            )
    else:
        if d4 is not None:
            raise ValueError("D4 data given for a non-d4 mode")
        _check_nonresonant(kind, X.frequencies, N)
    inv = extract_invariant_form(X)
    # F = 0 is reported first: zeroing one a_{j,e_r} also breaks the symmetry
    witness = check_genericity(inv)
    if not witness:
        raise NotGeneric("genericity product F of the cubic coefficients a_{j,e_r} vanishes")
    if not check_j3_hamiltonian(inv):
        raise PreconditionError("cubic block is not symmetric, so j^3 X is not Hamiltonian", "j3-hamiltonian")

    K = (N - 1) // 2  # F-degree that reaches ambient order N
    cubic = inv.cubic_block()
    F = [p.jet(K) for p in inv.F]
    current = list(X.components)
    steps: list[HamiltonizationStep] = []
    tsteps: list[TransformationStep] = []
    pushed: dict[int, list[Polynomial]] = {}
    for k in range(1, (N - 3) // 2 + 1):
        step = solve_step(F, kind, cubic, k, mode)
        steps.append(step)
        F = apply_step(F, kind, step, K)
        psi = _expand_map_psi(step.sigma(n), kind)
        theta = None
        if mode is not HamiltonizeMode.CONJUGACY6:
            theta = step.theta_poly(n).substitute(invariant_images(n, kind))
        ts = TransformationStep(psi, theta)
        tsteps.append(ts)
        if theta is not None and theta:
            rho = Polynomial.constant(dim, 1) + theta
            current = [rho.mul(p, N) for p in current]
        current = pushforward_map(ts.map, current, N)
        pushed[2 * k + 3] = current

    Hinv = invariant_hamiltonian(F, kind)
    Y = _field_from_F(F, kind, N)
    H = Hinv.substitute(invariant_images(n, kind)).jet(N + 1)
    residuals = {
        order: tuple((a - b).jet(order) for a, b in zip(Z, Y)) for order, Z in pushed.items()
    }
    final = tuple((a - b).jet(N) for a, b in zip(current, Y))
    if any(final) or any(any(r) for r in residuals.values()):
        raise SingularSystem("internal error: ambient residual does not vanish", degree=N)
    if is_hamiltonian(Y, N) is None:
        raise SingularSystem("internal error: output field is not Hamiltonian", degree=N)

    T = Transformation(dim, tuple(tsteps), N)
    if source is not None:
        input_field = source.source.jet(N)
        nf_T = source.transformation
    else:
        input_field = X
        nf_T = Transformation.identity(dim, N)
    cert = Certificate(
        document="hamiltonization",
        order=N,
        kind=kind,
        frequencies=tuple(X.frequencies),
        normal_form=X,
        normal_form_transformation=nf_T,
        mode=mode.value,
        genericity=witness,
        input_field=input_field,
        involution=phi,
        hamiltonian_field=Y,
        hamiltonian=H,
        transformation=T,
        rho=T.rho(N),
        residuals=residuals,
        d4=d4,
    )
    return HamiltonizationResult(cert, steps, inv, F, Hinv, residuals)


def hamiltonize(
    X: VectorField,
    N: int,
    mode: HamiltonizeMode | str = HamiltonizeMode.ORBITAL,
    phi: Involution | None = None,
    d4: D4Data | tuple | None = None,
    source: NormalFormResult | None = None,
) -> Certificate:
    """Find ``Ψ``, ``ρ`` and a Hamiltonian ``Y = J∇H`` with
    ``jet(Ψ_*(ρ·X̃) - Y, N) = 0``.

    ``X`` is a reversible normal form.  Checked hypotheses, each reported
    as a :class:`PreconditionError` naming it: simple normalized
    singularity, reversibility under ``phi`` (default: the canonical
    involution), order-``N`` nonresonance (or, for ``d4_resonant``, the two
    reversibilities and the odd ratio), the invariant shape, ``F != 0``
    (:class:`NotGeneric`) and a symmetric cubic block.

    ``source`` attaches the Poincaré–Dulac run that produced ``X`` so the
    certificate covers the whole chain from the original field.
    """
    return hamiltonize_full(X, N, mode, phi, d4, source).certificate


def closed_form_2d(X: VectorField, order: int | None = None) -> Polynomial:
    """Planar Hamiltonian by direct integration in the invariant ``u``.

    Elliptic: ``H = α u / 2 + (1/2) ∫_0^u f``, ``u = x² + y²``.
    Saddle: ``H = -β γ - ∫_0^γ f``, ``γ = x y``.
    """
    if X.dimension != 2:
        raise ShapeViolation("closed form applies to planar fields only")
    if order is not None:
        X = X.jet(order)
    inv = extract_invariant_form(X)
    lam = inv.frequencies[0]
    terms = {}
    for (i,), a in inv.f[0].items():
        terms[(i + 1,)] = a / (i + 1)
    integral = Polynomial(1, terms)
    u = Polynomial.variable(1, 0)
    if inv.kind == ELLIPTIC:
        Hu = u.scale(lam / 2) + integral.scale(mpq(1, 2))
    else:
        Hu = -u.scale(lam) - integral
    return InvariantPolynomial(1, inv.kind, Hu).expand()

