"""Polynomial vector fields, involutions and near-identity transformations.

Everything here is exact and jet-based: maps and fields are lists of
:class:`~reviham.polyalg.Polynomial` in the ambient variables
``x_1, y_1, ..., x_n, y_n`` and every operation takes the truncation order
explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .errors import NonSimpleSingularity, SpectrumError
from .polyalg import ELLIPTIC, QQ, SADDLE, Polynomial, unit

__all__ = [
    "VectorField",
    "Involution",
    "SymplecticStructure",
    "Transformation",
    "TransformationStep",
    "identity_map",
    "linear_map",
    "compose_maps",
    "invert_map",
    "jacobian_apply",
    "pushforward_map",
    "pushforward",
    "time_reparametrize",
    "is_reversible",
    "reversibility_defect",
    "is_hamiltonian",
    "find_hamiltonian",
    "hamiltonian_vector_field",
    "montgomery_bochner",
    "divergence",
    "determinant",
]


# linear algebra helpers ---------------------------------------------------


def determinant(matrix: Sequence[Sequence]) -> mpq:
    """Exact determinant by fraction-valued Gaussian elimination."""
    m = [[mpq(v) for v in row] for row in matrix]
    n = len(m)
    det = mpq(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c]), None)
        if pivot is None:
            return mpq(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), mpq(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


def _identity_matrix(dim):
    return [[mpq(int(i == j)) for j in range(dim)] for i in range(dim)]


def _matrix_rank(matrix) -> int:
    m = [[mpq(v) for v in row] for row in matrix]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def linear_part_of(components: Sequence[Polynomial]) -> list[list[mpq]]:
    dim = components[0].dimension
    return [[p.coefficient(unit(dim, j)) for j in range(dim)] for p in components]


# maps ---------------------------------------------------------------------


def identity_map(dim: int) -> list[Polynomial]:
    return [Polynomial.variable(dim, i) for i in range(dim)]


def linear_map(matrix: Sequence[Sequence]) -> list[Polynomial]:
    dim = len(matrix)
    return [
        Polynomial(dim, {unit(dim, j): matrix[i][j] for j in range(dim)}) for i in range(dim)
    ]


def compose_maps(outer: Sequence[Polynomial], inner: Sequence[Polynomial], order: int | None = None) -> list[Polynomial]:
    """``outer ∘ inner``, truncated at ``order``."""
    return [p.substitute(inner, order) for p in outer]


def invert_map(phi: Sequence[Polynomial], order: int) -> list[Polynomial]:
    """Jet of the inverse of a near-identity map ``Id + (terms of degree >= 2)``.

    Fixed-point iteration ``χ ← -N(Id + χ)`` where ``phi = Id + N``; each pass
    fixes at least one more degree.
    """
    dim = len(phi)
    ident = identity_map(dim)
    if any(p.constant_term() for p in phi) or linear_part_of(phi) != _identity_matrix(dim):
        raise ValueError("invert_map expects a map tangent to the identity")
    nonlinear = [(p - x).truncate_below(2) for p, x in zip(phi, ident)]
    low = min((p.min_degree for p in nonlinear if p), default=None)
    if low is None:
        return ident
    chi = [Polynomial.zero(dim) for _ in range(dim)]
    passes = max(1, (order - 1) // (low - 1) + 1)
    for _ in range(passes):
        images = [x + c for x, c in zip(ident, chi)]
        new = [-(p.substitute(images, order)) for p in nonlinear]
        if new == chi:
            break
        chi = new
    return [x + c for x, c in zip(ident, chi)]


def jacobian_apply(phi: Sequence[Polynomial], X: Sequence[Polynomial], order: int | None = None) -> list[Polynomial]:
    """``Dφ(x) · X(x)`` componentwise."""
    dim = len(phi)
    out = []
    for p in phi:
        acc = Polynomial.zero(X[0].dimension, X[0].domain)
        for j in range(dim):
            d = p.differentiate(j)
            if d and X[j]:
                acc = acc + d.mul(X[j], order)
        out.append(acc)
    return out


def pushforward_map(phi: Sequence[Polynomial], X: Sequence[Polynomial], order: int) -> list[Polynomial]:
    """Jet of ``φ_* X = (Dφ · X) ∘ φ^{-1}`` for a near-identity ``φ``."""
    inv = invert_map(phi, order)
    return [p.substitute(inv, order) for p in jacobian_apply(phi, X, order)]


# fields -------------------------------------------------------------------


class VectorField:
    """Polynomial vector field on R^{2n} in the variables x_1, y_1, ..., x_n, y_n.

    ``spectrum_kind`` and ``frequencies`` are read off the linear part when
    it is in normalized block form (``[[0, -α], [α, 0]]`` per plane for an
    elliptic point, ``diag(β, -β)`` for a saddle) and are ``None`` otherwise.
    """

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Polynomial]):
        components = tuple(components)
        if not components:
            raise ValueError("a vector field needs at least one component")
        dim = len(components)
        if dim % 2:
            raise ValueError(f"ambient dimension must be even, got {dim}")
        for p in components:
            if p.dimension != dim:
                raise ValueError("component dimension does not match the number of components")
            if p.domain != QQ:
                raise ValueError("vector field components must be real")
        self.components = components

    @classmethod
    def zero(cls, dim: int) -> "VectorField":
        return cls([Polynomial.zero(dim) for _ in range(dim)])

    @classmethod
    def linear(cls, matrix: Sequence[Sequence]) -> "VectorField":
        return cls(linear_map(matrix))

    @classmethod
    def normalized_linear(cls, kind: str, frequencies: Sequence) -> "VectorField":
        """The linear field with the normalized block matrix for ``kind``."""
        n = len(frequencies)
        dim = 2 * n
        a = [[mpq(0)] * dim for _ in range(dim)]
        for j, f in enumerate(frequencies):
            f = mpq(f)
            if kind == ELLIPTIC:
                a[2 * j][2 * j + 1] = -f
                a[2 * j + 1][2 * j] = f
            elif kind == SADDLE:
                a[2 * j][2 * j] = f
                a[2 * j + 1][2 * j + 1] = -f
            else:
                raise ValueError(f"unknown spectrum kind {kind!r}")
        return cls.linear(a)

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def n(self) -> int:
        return len(self.components) // 2

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    @property
    def degree(self) -> int:
        return max(p.degree for p in self.components)

    @property
    def linear_part(self) -> list[list[mpq]]:
        return linear_part_of(self.components)

    def _blocks(self):
        a = self.linear_part
        dim = self.dimension
        for i in range(dim):
            for j in range(dim):
                if i // 2 != j // 2 and a[i][j]:
                    return None
        return [
            (a[2 * j][2 * j], a[2 * j][2 * j + 1], a[2 * j + 1][2 * j], a[2 * j + 1][2 * j + 1])
            for j in range(self.n)
        ]

    @property
    def spectrum_kind(self) -> str | None:
        blocks = self._blocks()
        if blocks is None:
            return None
        if all(p == 0 and s == 0 and q == -r and r > 0 for p, q, r, s in blocks):
            return ELLIPTIC
        if all(q == 0 and r == 0 and p == -s and p > 0 for p, q, r, s in blocks):
            return SADDLE
        return None

    @property
    def frequencies(self) -> list[mpq] | None:
        kind = self.spectrum_kind
        if kind is None:
            return None
        a = self.linear_part
        if kind == ELLIPTIC:
            return [a[2 * j + 1][2 * j] for j in range(self.n)]
        return [a[2 * j][2 * j] for j in range(self.n)]

    def check_simple_singularity(self) -> None:
        """Raise :class:`NonSimpleSingularity` unless X(0) = 0 and det DX(0) != 0."""
        for i, p in enumerate(self.components):
            if p.constant_term():
                raise NonSimpleSingularity(f"component {i} has constant term {p.constant_term()}")
        if not determinant(self.linear_part):
            raise NonSimpleSingularity("det DX(0) = 0")

    def check_normalized(self) -> str:
        """Raise :class:`SpectrumError` unless the linear part is in normalized
        block form; returns the spectrum kind."""
        kind = self.spectrum_kind
        if kind is None:
            raise SpectrumError(
                "linear part is not block-normalized: expected [[0,-a],[a,0]] or diag(b,-b) blocks"
            )
        return kind

    def jet(self, k: int) -> "VectorField":
        return VectorField([p.jet(k) for p in self.components])

    def homogeneous(self, m: int) -> "VectorField":
        return VectorField([p.homogeneous(m) for p in self.components])

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([p + q for p, q in zip(self.components, _components(other))])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([p - q for p, q in zip(self.components, _components(other))])

    def __neg__(self) -> "VectorField":
        return VectorField([-p for p in self.components])

    def scale(self, factor) -> "VectorField":
        return VectorField([p.scale(factor) for p in self.components])

    def __eq__(self, other):
        if isinstance(other, VectorField):
            return self.components == other.components
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"VectorField(dim={self.dimension}, degree={self.degree}, kind={self.spectrum_kind})"


def _components(x) -> Sequence[Polynomial]:
    return x.components if isinstance(x, VectorField) else x


def divergence(X) -> Polynomial:
    comps = _components(X)
    out = Polynomial.zero(len(comps))
    for i, p in enumerate(comps):
        out = out + p.differentiate(i)
    return out


# involutions --------------------------------------------------------------


class Involution:
    """Polynomial involution ``φ`` with ``φ(0) = 0``, stored truncated at
    ``order`` (``None`` means the stored polynomials are exact)."""

    __slots__ = ("components", "order")

    def __init__(self, components: Sequence[Polynomial], order: int | None = None):
        self.components = tuple(components)
        self.order = order
        dim = len(self.components)
        if dim % 2 or any(p.dimension != dim for p in self.components):
            raise ValueError("involution must be a map of an even-dimensional space")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], order: int | None = None) -> "Involution":
        return cls(linear_map([[mpq(v) for v in row] for row in matrix]), order)

    @classmethod
    def canonical(cls, n: int, kind: str = ELLIPTIC) -> "Involution":
        """``(x_j, y_j) -> (x_j, -y_j)`` for elliptic points and
        ``(x_j, y_j) -> (y_j, x_j)`` for saddles."""
        dim = 2 * n
        m = [[0] * dim for _ in range(dim)]
        for j in range(n):
            if kind == ELLIPTIC:
                m[2 * j][2 * j] = 1
                m[2 * j + 1][2 * j + 1] = -1
            elif kind == SADDLE:
                m[2 * j][2 * j + 1] = 1
                m[2 * j + 1][2 * j] = 1
            else:
                raise ValueError(f"unknown spectrum kind {kind!r}")
        return cls.from_matrix(m)

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def linearization(self) -> list[list[mpq]]:
        return linear_part_of(self.components)

    @property
    def is_linear(self) -> bool:
        return all(p.is_homogeneous(1) for p in self.components)

    def fixed_dimension(self) -> int:
        """``dim Fix(Dφ(0))``."""
        lin = self.linearization
        dim = self.dimension
        diff = [[lin[i][j] - int(i == j) for j in range(dim)] for i in range(dim)]
        return dim - _matrix_rank(diff)

    def defects(self, order: int | None = None) -> list[str]:
        """Human-readable list of violated involution axioms."""
        order = self.order if order is None else order
        problems = []
        if any(p.constant_term() for p in self.components):
            problems.append("phi(0) != 0")
        square = compose_maps(self.components, self.components, order)
        ident = identity_map(self.dimension)
        for i, (p, x) in enumerate(zip(square, ident)):
            diff = p - x
            if order is not None:
                diff = diff.jet(order)
            if diff:
                problems.append(f"phi∘phi != Id in component {i} (degree {diff.min_degree})")
                break
        if self.fixed_dimension() != self.dimension // 2:
            problems.append(
                f"dim Fix(Dphi(0)) = {self.fixed_dimension()}, expected {self.dimension // 2}"
            )
        return problems

    def is_valid(self, order: int | None = None) -> bool:
        return not self.defects(order)

    def __call__(self, images: Sequence[Polynomial], order: int | None = None) -> list[Polynomial]:
        return compose_maps(self.components, images, order)

    def __eq__(self, other):
        if isinstance(other, Involution):
            return self.components == other.components
        return NotImplemented

    __hash__ = None


def reversibility_defect(X, phi: Involution, order: int) -> list[Polynomial]:
    """``jet(Dφ(x)·X(x) + X(φ(x)), order)``; zero iff ``φ_* X = -X`` to that order.

    Evaluating ``φ_* X = -X`` at ``φ(x)`` and using ``φ^{-1} = φ`` gives this
    composition-light form.
    """
    comps = _components(X)
    lhs = jacobian_apply(phi.components, comps, order)
    rhs = [p.substitute(phi.components, order) for p in comps]
    return [(a + b).jet(order) for a, b in zip(lhs, rhs)]


def is_reversible(X, phi: Involution, order: int) -> bool:
    if len(_components(X)) != phi.dimension:
        raise ValueError("field and involution dimensions differ")
    return all(p.is_zero() for p in reversibility_defect(X, phi, order))


# symplectic structure -----------------------------------------------------


@dataclass(frozen=True)
class SymplecticStructure:
    """The fixed matrices ``J`` (2x2 blocks ``[[0,-1],[1,0]]``) and
    ``Ω = [[0, Id_n], [-Id_n, 0]]``."""

    n: int

    @property
    def J(self) -> list[list[mpq]]:
        dim = 2 * self.n
        m = [[mpq(0)] * dim for _ in range(dim)]
        for j in range(self.n):
            m[2 * j][2 * j + 1] = mpq(-1)
            m[2 * j + 1][2 * j] = mpq(1)
        return m

    @property
    def Omega(self) -> list[list[mpq]]:
        dim = 2 * self.n
        m = [[mpq(0)] * dim for _ in range(dim)]
        for j in range(self.n):
            m[j][self.n + j] = mpq(1)
            m[self.n + j][j] = mpq(-1)
        return m

    def is_symplectic(self, M: Sequence[Sequence]) -> bool:
        """``M^t Ω M == Ω``."""
        Mt = [list(r) for r in zip(*M)]
        return _matmul(_matmul(Mt, self.Omega), [list(r) for r in M]) == self.Omega


def hamiltonian_vector_field(H: Polynomial) -> VectorField:
    """``J ∇H``: ``ẋ_j = -∂H/∂y_j``, ``ẏ_j = ∂H/∂x_j``."""
    comps = []
    for j in range(H.dimension // 2):
        comps.append(-H.differentiate(2 * j + 1))
        comps.append(H.differentiate(2 * j))
    return VectorField(comps)


def find_hamiltonian(X, order: int) -> tuple[Polynomial | None, int | None]:
    """Solve ``J∇H = X`` degree by degree up to ``order``.

    In the monomial basis each equation involves exactly one coefficient of
    ``H``, so the system is diagonal: the first equation fixes a coefficient
    and every other equation touching it must agree.  Returns ``(H, None)``
    on success and ``(None, degree)`` for the first field degree at which the
    system is inconsistent.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    comps = _components(X)
    dim = len(comps)
    H = Polynomial.zero(dim)
    for d in range(order + 1):
        coeffs: dict[tuple[int, ...], mpq] = {}
        target = [p.homogeneous(d) for p in comps]
        for i, p in enumerate(target):
            j, second = divmod(i, 2)
            var = 2 * j if second else 2 * j + 1
            sign = 1 if second else -1
            for mono, c in p.items():
                nu = list(mono)
                nu[var] += 1
                nu = tuple(nu)
                if nu not in coeffs:
                    coeffs[nu] = sign * c / nu[var]
        Hd = Polynomial(dim, coeffs)
        if hamiltonian_vector_field(Hd).components != tuple(target):
            return None, d
        H = H + Hd
    return H, None


def is_hamiltonian(X, order: int) -> Polynomial | None:
    """``H`` with ``jet(X - J∇H, order) = 0`` and ``H(0) = 0``, or ``None``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    H, _ = find_hamiltonian(X, order)
    return H


# transformations ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransformationStep:
    """One factor ``Ψ_i = Id + ψ_i`` with time factor ``1 + θ_i``.

    ``theta`` is ``None`` for a pure change of coordinates.
    """

    psi: tuple[Polynomial, ...]
    theta: Polynomial | None = None

    def __eq__(self, other):
        return (
            isinstance(other, TransformationStep)
            and self.psi == other.psi
            and self.theta == other.theta
        )

    __hash__ = None

    @property
    def map(self) -> list[Polynomial]:
        return [x + p for x, p in zip(identity_map(len(self.psi)), self.psi)]


@dataclass(frozen=True, eq=False)
class Transformation:
    """Ordered composition of steps: the field is first multiplied by
    ``1 + θ_1`` and pushed forward by ``Id + ψ_1``, then by the next step,
    and so on."""

    dimension: int
    steps: tuple[TransformationStep, ...] = field(default_factory=tuple)
    working_order: int = 0

    def __eq__(self, other):
        return (
            isinstance(other, Transformation)
            and self.dimension == other.dimension
            and self.steps == other.steps
            and self.working_order == other.working_order
        )

    __hash__ = None

    @classmethod
    def identity(cls, dimension: int, working_order: int = 0) -> "Transformation":
        return cls(dimension, (), working_order)

    @property
    def psi(self) -> list[tuple[Polynomial, ...]]:
        return [s.psi for s in self.steps]

    @property
    def thetas(self) -> list[Polynomial | None]:
        return [s.theta for s in self.steps]

    def coordinate_map(self, order: int | None = None) -> list[Polynomial]:
        """``Ψ = Ψ_last ∘ ... ∘ Ψ_first``, truncated at ``order``."""
        order = self.working_order if order is None else order
        total = identity_map(self.dimension)
        for step in self.steps:
            total = compose_maps(step.map, total, order)
        return total

    def rho(self, order: int | None = None) -> Polynomial:
        """Accumulated time factor ``ρ`` with ``Ψ_*(ρ·X)`` equal to the
        step-by-step result: ``ρ = ∏_i (1 + θ_i) ∘ Ψ_{i-1} ∘ ... ∘ Ψ_1``."""
        order = self.working_order if order is None else order
        rho = Polynomial.constant(self.dimension, 1)
        prefix = identity_map(self.dimension)
        for step in self.steps:
            if step.theta is not None and step.theta:
                factor = Polynomial.constant(self.dimension, 1) + step.theta.substitute(prefix, order)
                rho = rho.mul(factor, order)
            prefix = compose_maps(step.map, prefix, order)
        return rho


def time_reparametrize(X, rho: Polynomial, order: int | None = None) -> VectorField:
    """``ρ · X`` componentwise; ``ρ`` must not vanish at the origin."""
    if not rho.constant_term():
        raise ValueError("time reparametrization vanishes at the origin")
    return VectorField([rho.mul(p, order) for p in _components(X)])


def pushforward(T: Transformation, X, order: int) -> VectorField:
    """Jet of ``Ψ_*(ρ·X)`` computed step by step."""
    if T.steps and T.working_order < order:
        raise ValueError(f"transformation known to order {T.working_order} < {order}")
    comps = list(_components(X))
    for step in T.steps:
        if step.theta is not None and step.theta:
            rho = Polynomial.constant(len(comps), 1) + step.theta
            comps = [rho.mul(p, order) for p in comps]
        comps = pushforward_map(step.map, comps, order)
    return VectorField([p.jet(order) for p in comps])


def montgomery_bochner(phi: Involution, order: int | None = None) -> list[Polynomial]:
    """``χ = Id + Dφ(0)·φ``, which satisfies ``χ ∘ φ = Dφ(0) ∘ χ``."""
    L = phi.linearization
    dim = phi.dimension
    out = []
    for i in range(dim):
        acc = Polynomial.variable(dim, i)
        for j in range(dim):
            if L[i][j]:
                acc = acc + phi.components[j].scale(L[i][j])
        out.append(acc if order is None else acc.jet(order))
    return out
