"""Seeded random instances for tests, benchmarks and the CLI examples."""

from __future__ import annotations

import random
from typing import Sequence

from gmpy2 import mpq

from .field import Involution, VectorField, identity_map, linear_map, pushforward_map
from .polyalg import ELLIPTIC, Polynomial, invariant_images, monomials_of_degree

__all__ = [
    "random_rational",
    "random_cubic_block",
    "random_invariant_normal_form",
    "random_reversible_field",
    "conjugate_by_equivariant",
    "d4_involutions",
    "random_d4_instance",
]


def random_rational(rng: random.Random, size: int = 9, nonzero: bool = False) -> mpq:
    while True:
        q = mpq(rng.randint(-size, size), rng.randint(1, size))
        if q or not nonzero:
            return q


def random_cubic_block(n: int, rng: random.Random, size: int = 9) -> list[list[mpq]]:
    """Symmetric ``n x n`` block with nonzero entries (so ``F != 0``)."""
    a = [[mpq(0)] * n for _ in range(n)]
    for j in range(n):
        for r in range(j, n):
            a[j][r] = a[r][j] = random_rational(rng, size, nonzero=True)
    return a


def _field_from_F(F, kind):
    n = len(F)
    dim = 2 * n
    images = invariant_images(n, kind)
    comps = []
    for j, Fj in enumerate(F):
        e = Fj.substitute(images)
        x, y = Polynomial.variable(dim, 2 * j), Polynomial.variable(dim, 2 * j + 1)
        comps += [-(y * e), x * e] if kind == ELLIPTIC else [x * e, -(y * e)]
    return VectorField(comps)


def random_invariant_normal_form(
    n: int,
    kind: str,
    frequencies: Sequence,
    order: int,
    rng: random.Random,
    cubic: Sequence[Sequence] | None = None,
    terms: int | None = None,
    size: int = 9,
) -> VectorField:
    """``Σ_j F_j(u) R_j`` truncated at ``order`` with random ``F_j``.

    The cubic block is ``cubic`` (default: a random symmetric one).
    ``terms`` caps the number of nonzero higher coefficients per ``F_j``.
    """
    if cubic is None:
        cubic = random_cubic_block(n, rng, size)
    K = (order - 1) // 2
    F = []
    for j in range(n):
        t = {}
        for r in range(n):
            e = [0] * n
            e[r] = 1
            t[tuple(e)] = mpq(cubic[j][r])
        higher = [I for d in range(2, K + 1) for I in monomials_of_degree(n, d)]
        if terms is not None and terms < len(higher):
            higher = rng.sample(higher, terms)
        for I in higher:
            t[I] = random_rational(rng, size)
        F.append(Polynomial.constant(n, mpq(frequencies[j])) + Polynomial(n, t))
    return _field_from_F(F, kind)


def _reversible_part(comps, phi: Involution):
    # (X - φ_*X)/2 for a linear involution φ; φ_*X(x) = L X(L x)
    L = phi.linearization
    dim = len(comps)
    composed = [p.substitute(phi.components) for p in comps]
    out = []
    for i in range(dim):
        acc = comps[i]
        for j in range(dim):
            if L[i][j]:
                acc = acc - composed[j].scale(L[i][j])
        out.append(acc.scale(mpq(1, 2)))
    return out


def random_reversible_field(
    n: int,
    kind: str,
    frequencies: Sequence,
    order: int,
    rng: random.Random,
    density: float = 0.3,
    phi: Involution | None = None,
    min_degree: int = 2,
    size: int = 9,
) -> VectorField:
    """Normalized linear part plus random ``φ``-reversible terms of degree
    ``min_degree..order`` (``φ`` defaults to the canonical involution)."""
    dim = 2 * n
    phi = Involution.canonical(n, kind) if phi is None else phi
    raw = []
    for _ in range(dim):
        t = {}
        for d in range(min_degree, order + 1):
            for m in monomials_of_degree(dim, d):
                if rng.random() < density:
                    t[m] = random_rational(rng, size, nonzero=True)
        raw.append(Polynomial(dim, t))
    lin = VectorField.normalized_linear(kind, frequencies)
    return VectorField([a + b for a, b in zip(lin, _reversible_part(raw, phi))])


def _group_closure(mats):
    dim = len(mats[0])
    ident = tuple(tuple(mpq(int(i == j)) for j in range(dim)) for i in range(dim))

    def mul(a, b):
        return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(dim)), mpq(0)) for j in range(dim)) for i in range(dim))

    group = {ident}
    frontier = [ident]
    gens = [tuple(tuple(mpq(v) for v in row) for row in m) for m in mats]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                p = mul(g, h)
                if p not in group:
                    group.add(p)
                    nxt.append(p)
        frontier = nxt
    return sorted(group)


def conjugate_by_equivariant(
    X: VectorField,
    involutions: Sequence[Involution],
    order: int,
    rng: random.Random,
    min_degree: int = 3,
    density: float = 0.3,
    size: int = 5,
) -> VectorField:
    """Push ``X`` forward by a random near-identity map, averaged over the
    group generated by the (linear) ``involutions`` so that it commutes with
    all of them; reversibility under each involution is preserved."""
    dim = X.dimension
    raw = []
    for _ in range(dim):
        t = {}
        for d in range(min_degree, order + 1):
            for m in monomials_of_degree(dim, d):
                if rng.random() < density:
                    t[m] = random_rational(rng, size, nonzero=True)
        raw.append(Polynomial(dim, t))
    group = _group_closure([phi.linearization for phi in involutions])
    avg = [Polynomial.zero(dim) for _ in range(dim)]
    for g in group:
        # g^{-1} ∘ h ∘ g; every element of these groups is orthogonal with rational entries
        ginv = [list(r) for r in zip(*g)]
        inner = [p.substitute(linear_map(g)) for p in raw]
        for i in range(dim):
            for j in range(dim):
                if ginv[i][j]:
                    avg[i] = avg[i] + inner[j].scale(ginv[i][j])
    scale = mpq(1, len(group))
    psi = [p.scale(scale) for p in avg]
    Psi = [x + p for x, p in zip(identity_map(dim), psi)]
    return VectorField([p.jet(order) for p in pushforward_map(Psi, X.components, order)])


def d4_involutions() -> tuple[Involution, Involution]:
    """``g1 = (x1,-y1,x2,-y2)`` and ``g2 = (y1,x1,x2,-y2)``; ``g1 g2`` has order 4."""
    g1 = Involution.canonical(2, ELLIPTIC)
    g2 = Involution.from_matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])
    return g1, g2


def random_d4_instance(order: int, rng: random.Random, r1: int = 3, r2: int = 5, scale=1):
    """A D4-reversible 4D field with frequencies ``scale·(r1, r2)``.

    Built from an invariant normal form (reversible under both involutions)
    conjugated by a random D4-equivariant map with terms of degree >= 3, so
    the cubic block of the normal form is kept.
    """
    g1, g2 = d4_involutions()
    freqs = [mpq(scale) * r1, mpq(scale) * r2]
    nf = random_invariant_normal_form(2, ELLIPTIC, freqs, order, rng)
    X = conjugate_by_equivariant(nf, [g1, g2], order, rng)
    return X, g1, g2

