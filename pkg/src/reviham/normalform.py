"""Homological operator, resonance detection and Poincaré–Dulac reduction.

Elliptic fields are normalized in the complex coordinates
``z_j = x_j + i y_j``, ``w_j = x_j - i y_j`` where the linear part is
diagonal with eigenvalues ``±i α_j``; every homological solution is realified
before it is applied, so fields and transformations stay real throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

from gmpy2 import mpq

from .errors import PreconditionError, ResonanceError
from .field import (
    Involution,
    Transformation,
    TransformationStep,
    VectorField,
    is_reversible,
    jacobian_apply,
    linear_map,
    montgomery_bochner,
    pushforward,
    pushforward_map,
)
from .polyalg import (
    ELLIPTIC,
    QQ,
    QQ_I,
    SADDLE,
    GaussianRational,
    Polynomial,
    complexify,
    monomials_of_degree,
    realify,
)

__all__ = [
    "ResonanceEntry",
    "ResonanceReport",
    "NormalFormResult",
    "spectrum",
    "homological_operator",
    "resonance_scan",
    "is_structural",
    "complexify_field",
    "realify_field",
    "solve_homological",
    "reversible_projection",
    "poincare_dulac",
    "resonant_part",
]


def spectrum(kind: str, frequencies: Sequence) -> list[GaussianRational]:
    """Eigenvalues in variable order: ``(iα_1, -iα_1, ...)`` for the complexified
    elliptic coordinates, ``(β_1, -β_1, ...)`` for a saddle."""
    out = []
    for f in frequencies:
        f = mpq(f)
        if kind == ELLIPTIC:
            out += [GaussianRational(0, f), GaussianRational(0, -f)]
        elif kind == SADDLE:
            out += [GaussianRational(f, 0), GaussianRational(-f, 0)]
        else:
            raise ValueError(f"unknown spectrum kind {kind!r}")
    return out


def _defect(monomial, component, spec) -> GaussianRational:
    total = GaussianRational()
    for e, lam in zip(monomial, spec):
        if e:
            total = total + lam * e
    return total - spec[component]


def is_structural(monomial: Sequence[int], component: int) -> bool:
    """Whether ``x^m ∂/∂x_s`` is resonant for every choice of frequencies,
    i.e. the plane-wise exponent differences equal ``±e_j`` for the plane of
    ``s`` (``+`` for its first variable, ``-`` for its second)."""
    n = len(monomial) // 2
    diffs = [monomial[2 * j] - monomial[2 * j + 1] for j in range(n)]
    j, second = divmod(component, 2)
    want = [0] * n
    want[j] = -1 if second else 1
    return diffs == want


@dataclass(frozen=True)
class ResonanceEntry:
    monomial: tuple[int, ...]
    component: int
    defect: GaussianRational

    @property
    def resonant(self) -> bool:
        return not self.defect

    @property
    def structural(self) -> bool:
        return is_structural(self.monomial, self.component)


@dataclass
class ResonanceReport:
    """Eigenvalue defects ``(m, λ) - λ_s`` for every monomial vector field of
    one degree."""

    order: int
    entries: list[ResonanceEntry]
    scale_factor: mpq | None = None

    @property
    def resonant_subset(self) -> list[ResonanceEntry]:
        return [e for e in self.entries if e.resonant]

    @property
    def accidental(self) -> list[ResonanceEntry]:
        """Resonances not forced by the plane structure."""
        return [e for e in self.entries if e.resonant and not e.structural]

    def defect(self, monomial, component) -> GaussianRational:
        for e in self.entries:
            if e.monomial == tuple(monomial) and e.component == component:
                return e.defect
        raise KeyError((monomial, component))


def _scale_factor(spec) -> mpq | None:
    """Largest λ with every frequency an integer multiple of λ."""
    freqs = [abs(lam.imag) if lam.imag else abs(lam.real) for lam in spec[0::2]]
    if not freqs or any(not f for f in freqs):
        return None
    num = reduce(math.gcd, (int(f.numerator) for f in freqs))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (int(f.denominator) for f in freqs))
    return mpq(num, den)


def resonance_scan(spec: Sequence[GaussianRational], m: int) -> ResonanceReport:
    """Defects of all degree-``m`` monomials against every component."""
    dim = len(spec)
    spec = [lam if isinstance(lam, GaussianRational) else GaussianRational(lam) for lam in spec]
    entries = []
    for mono in monomials_of_degree(dim, m):
        for s in range(dim):
            entries.append(ResonanceEntry(mono, s, _defect(mono, s, spec)))
    return ResonanceReport(m, entries, _scale_factor(spec))


def homological_operator(A: Sequence[Sequence], h: Sequence[Polynomial]) -> list[Polynomial]:
    """``Dh(x)·Ax - A h(x)`` for a homogeneous vector polynomial ``h``.

    On a diagonal ``A`` the monomial ``x^m ∂/∂x_s`` is an eigenvector with
    eigenvalue ``(m, λ) - λ_s``.
    """
    degrees = {p.degree for p in h if p}
    if len(degrees) > 1 or not all(p.is_homogeneous() for p in h):
        raise ValueError("homological_operator expects a homogeneous vector polynomial")
    if degrees and min(degrees) < 2:
        raise ValueError("homological_operator acts on degree >= 2")
    dim = len(h)
    domain = QQ_I if any(isinstance(v, GaussianRational) for row in A for v in row) else h[0].domain
    h = [p.to_domain(domain) for p in h]
    ax = [p.to_domain(domain) for p in linear_map(A)] if domain == QQ else [
        Polynomial(dim, {tuple(int(i == j) for i in range(dim)): A[r][j] for j in range(dim)}, QQ_I)
        for r in range(dim)
    ]
    dh_ax = jacobian_apply(h, ax)
    out = []
    for r in range(dim):
        acc = dh_ax[r]
        for j in range(dim):
            if A[r][j]:
                acc = acc - h[j].scale(A[r][j])
        out.append(acc)
    return out


def complexify_field(f: Sequence[Polynomial]) -> list[Polynomial]:
    """Components ``(ż_j, ẇ_j)`` of a real field, in the variables ``z, w``."""
    out = []
    for j in range(len(f) // 2):
        fx, fy = f[2 * j].to_gaussian(), f[2 * j + 1].to_gaussian()
        out.append(complexify(fx + fy.scale(GaussianRational(0, 1))))
        out.append(complexify(fx - fy.scale(GaussianRational(0, 1))))
    return out


def realify_field(g: Sequence[Polynomial]) -> list[Polynomial]:
    """Inverse of :func:`complexify_field`."""
    half = GaussianRational(mpq(1, 2), 0)
    minus_half_i = GaussianRational(0, mpq(-1, 2))
    out = []
    for j in range(len(g) // 2):
        gz, gw = g[2 * j], g[2 * j + 1]
        out.append(realify((gz + gw).scale(half)))
        out.append(realify((gz - gw).scale(minus_half_i)))
    return out


def solve_homological(
    fm: Sequence[Polynomial], kind: str, frequencies: Sequence
) -> tuple[list[Polynomial], list[tuple[tuple[int, ...], int, GaussianRational]]]:
    """Minimal ``ψ`` with ``Dψ·Ax - Aψ = -(nonresonant part of f_m)``.

    Pushing a field forward by ``Id + ψ`` then removes every nonresonant
    degree-``m`` term.  ``ψ`` has no component along the kernel.  Also
    returns the non-structural resonant terms of ``f_m`` as
    ``(monomial, component, coefficient)``.
    """
    spec = spectrum(kind, frequencies)
    dim = len(fm)
    work = complexify_field(fm) if kind == ELLIPTIC else [p.to_gaussian() for p in fm]
    psi_c = []
    accidental = []
    for s, comp in enumerate(work):
        terms = {}
        for mono, c in comp.items():
            d = _defect(mono, s, spec)
            if d:
                terms[mono] = -c / d
            elif not is_structural(mono, s):
                accidental.append((mono, s, c))
        psi_c.append(Polynomial(dim, terms, QQ_I))
    if kind == ELLIPTIC:
        psi = realify_field(psi_c)
    else:
        psi = [p.real_part_checked() for p in psi_c]
    return psi, accidental


def resonant_part(fm: Sequence[Polynomial], kind: str, frequencies: Sequence) -> list[Polynomial]:
    """Projection of a homogeneous field onto the kernel of the homological
    operator (resonant monomials only)."""
    spec = spectrum(kind, frequencies)
    dim = len(fm)
    work = complexify_field(fm) if kind == ELLIPTIC else [p.to_gaussian() for p in fm]
    kept = []
    for s, comp in enumerate(work):
        kept.append(Polynomial(dim, {m: c for m, c in comp.items() if not _defect(m, s, spec)}, QQ_I))
    if kind == ELLIPTIC:
        return realify_field(kept)
    return [p.real_part_checked() for p in kept]


def reversible_projection(h: Sequence[Polynomial], phi: Involution, order: int | None = None) -> list[Polynomial]:
    """Equivariant part ``(h + Dφ(0)·h∘φ) / 2`` of a correction ``h``.

    Idempotent; kills anti-equivariant corrections.
    """
    L = phi.linearization
    if order is None and phi.is_linear:
        order = max((p.degree for p in h), default=0)
    composed = [p.substitute(phi.components, order) for p in h]
    half = mpq(1, 2)
    out = []
    for i, p in enumerate(h):
        acc = p
        for j, q in enumerate(composed):
            if L[i][j]:
                acc = acc + q.scale(L[i][j])
        out.append(acc.scale(half))
    return out


@dataclass
class NormalFormResult:
    """Output of :func:`poincare_dulac`.

    ``transformation`` pushes ``source`` forward onto ``normal_form`` up to
    ``order``; ``reports`` maps each degree to its resonance scan.
    """

    normal_form: VectorField
    transformation: Transformation
    order: int
    reports: dict[int, ResonanceReport] = field(default_factory=dict)
    source: VectorField | None = None
    involution: Involution | None = None
    kept_accidental: list = field(default_factory=list)

    def residual(self) -> list[Polynomial]:
        """``jet(Ψ_* X - X̃, N)``, recomputed."""
        if self.source is None:
            raise ValueError("no source field recorded")
        pushed = pushforward(self.transformation, self.source, self.order)
        return [(a - b).jet(self.order) for a, b in zip(pushed, self.normal_form)]


def poincare_dulac(
    X: VectorField,
    N: int,
    phi: Involution | None = None,
    strict: bool = True,
) -> NormalFormResult:
    """Reduce ``X`` to Poincaré–Dulac normal form up to degree ``N``.

    Degree by degree, the nonresonant part of the current degree-``m`` terms
    is removed by the minimal homological solution; the field is then pushed
    forward exactly.  With ``phi`` given, ``X`` must be ``φ``-reversible and
    every correction is projected onto its ``φ``-equivariant part, so each
    intermediate field stays reversible.  A nonlinear ``φ`` is first
    linearized by the (halved) Montgomery–Bochner map.

    With ``strict`` (the nonresonant hypothesis), a non-structural resonant
    term with nonzero coefficient raises :class:`ResonanceError` listing the
    offending defects; otherwise such terms are kept in the normal form.
    """
    if N < 1:
        raise ValueError("order must be at least 1")
    X.check_simple_singularity()
    kind = X.check_normalized()
    freqs = X.frequencies
    dim = X.dimension
    current = X.jet(N)
    steps: list[TransformationStep] = []
    lin_phi = None
    if phi is not None:
        defects = phi.defects(N)
        if defects:
            raise PreconditionError("invalid involution: " + "; ".join(defects), "involution")
        if not is_reversible(current, phi, N):
            raise PreconditionError("field is not reversible under the given involution", "reversibility")
        lin_phi = Involution.from_matrix(phi.linearization)
        if not phi.is_linear:
            chi = [p.scale(mpq(1, 2)).jet(N) for p in montgomery_bochner(phi, N)]
            shift = [(c - Polynomial.variable(dim, i)) for i, c in enumerate(chi)]
            steps.append(TransformationStep(tuple(shift)))
            current = VectorField(pushforward_map(chi, current.components, N))
    reports: dict[int, ResonanceReport] = {}
    kept = []
    spec = spectrum(kind, freqs)
    for m in range(2, N + 1):
        reports[m] = resonance_scan(spec, m)
        fm = current.homogeneous(m).components
        psi, accidental = solve_homological(fm, kind, freqs)
        if accidental:
            if strict:
                offending = [(m, mono, s, c) for mono, s, c in accidental]
                listing = ", ".join(f"degree {m} monomial {mono} component {s}" for mono, s, _ in accidental)
                raise ResonanceError(
                    f"non-structural resonant terms present (defect 0): {listing}", offending
                )
            kept += [(m, mono, s, c) for mono, s, c in accidental]
        if lin_phi is not None:
            psi = reversible_projection(psi, lin_phi)
        if not any(psi):
            continue
        step = TransformationStep(tuple(psi))
        steps.append(step)
        current = VectorField(pushforward_map(step.map, current.components, N))
    return NormalFormResult(
        normal_form=current,
        transformation=Transformation(dim, tuple(steps), N),
        order=N,
        reports=reports,
        source=X,
        involution=phi,
        kept_accidental=kept,
    )
