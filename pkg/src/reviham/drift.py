"""Floating-point witness for the formal order of a certificate.

Exact rationals are rounded to doubles once, when a polynomial is compiled
for evaluation.  Nothing here feeds back into the exact pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .certificate import Certificate
from .field import VectorField, pushforward
from .polyalg import Polynomial

__all__ = [
    "IntegrationError",
    "NumericPolynomialMap",
    "integrate",
    "DriftReport",
    "energy_drift",
    "energy_drift_scaling",
    "dt_convergence",
    "PASS_AT_NOISE_FLOOR",
    "FITTED",
]

PASS_AT_NOISE_FLOOR = "PASS_AT_NOISE_FLOOR"
FITTED = "FITTED"

# drifts below this multiple of eps*|H(x0)| are indistinguishable from rounding
NOISE_FACTOR = 1e3


class IntegrationError(ArithmeticError):
    pass


class NumericPolynomialMap:
    """Float evaluator for a list of polynomials sharing one monomial table."""

    def __init__(self, polys: Sequence[Polynomial]):
        polys = list(polys)
        if not polys:
            raise ValueError("need at least one polynomial")
        self.dimension = polys[0].dimension
        monos = sorted({m for p in polys for m, _ in p.items()})
        index = {m: i for i, m in enumerate(monos)}
        self.exponents = np.array(monos, dtype=np.int64).reshape(len(monos), self.dimension)
        self.coeffs = np.zeros((len(polys), len(monos)))
        for row, p in enumerate(polys):
            for m, c in p.items():
                self.coeffs[row, index[m]] = float(c)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not len(self.exponents):
            return np.zeros(self.coeffs.shape[0])
        monos = np.prod(x[None, :] ** self.exponents, axis=1)
        return self.coeffs @ monos


def integrate(X, x0, T: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step RK4; returns ``(times, states)``.

    The last step is shortened so the trajectory ends exactly at ``T``.
    """
    if not (dt > 0 and T > 0):
        raise ValueError("T and dt must be positive")
    f = X if isinstance(X, NumericPolynomialMap) else NumericPolynomialMap(list(X))
    x = np.array(x0, dtype=float)
    if x.shape != (f.dimension,):
        raise ValueError(f"initial point must have {f.dimension} entries")
    steps = int(math.ceil(T / dt - 1e-9))
    times = np.empty(steps + 1)
    states = np.empty((steps + 1, f.dimension))
    times[0], states[0] = 0.0, x
    t = 0.0
    # overflow is caught below as a non-finite state
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, steps + 1):
            h = min(dt, T - t)
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = i * dt if i < steps else T
            if not np.all(np.isfinite(x)):
                raise IntegrationError(f"non-finite state at t = {t}")
            times[i], states[i] = t, x
    return times, states


def energy_drift(X, H: Polynomial, x0, T: float, dt: float) -> tuple[float, float]:
    """``(max_t |H(x(t)) - H(x0)|, |H(x0)|)`` along the RK4 trajectory."""
    h = NumericPolynomialMap([H])
    _, states = integrate(X, x0, T, dt)
    values = np.array([h(s)[0] for s in states])
    return float(np.max(np.abs(values - values[0]))), float(abs(values[0]))


@dataclass
class DriftReport:
    radii: list[float]
    drifts: list[float]
    slope: float | None
    status: str
    energies: list[float] | None = None

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        if any(d < 0 for d in self.drifts):
            raise ValueError("drifts must be non-negative")

    def to_text(self) -> str:
        lines = ["radius drift"]
        lines += [f"{r:.16e} {d:.16e}" for r, d in zip(self.radii, self.drifts)]
        slope = "nan" if self.slope is None else f"{self.slope:.16e}"
        lines.append(f"slope {slope} {self.status}")
        return "\n".join(lines) + "\n"


def _fit(radii, drifts, energies) -> tuple[float | None, str]:
    eps = np.finfo(float).eps
    usable = [
        (r, d) for r, d, e in zip(radii, drifts, energies) if d > NOISE_FACTOR * eps * max(e, eps)
    ]
    if len(usable) < 2:
        return None, PASS_AT_NOISE_FLOOR
    lr = np.log([r for r, _ in usable])
    ld = np.log([d for _, d in usable])
    slope = float(np.polyfit(lr, ld, 1)[0])
    return slope, FITTED


def _direction(dim: int) -> np.ndarray:
    return np.ones(dim) / math.sqrt(dim)


def energy_drift_scaling(
    c: Certificate,
    radii: Sequence[float] = (0.2, 0.1, 0.05),
    T: float = 1.0,
    dt: float = 1e-3,
    field: str = "transformed",
    extra_order: int = 2,
) -> DriftReport:
    """Drift of ``H`` along ``Z`` from points ``r·(1,...,1)/√(2n)``.

    ``Z`` is the recorded input field carried through the normal-form map
    and then through ``(Ψ, ρ)``, expanded to order ``N + extra_order``.  To
    order ``N`` it equals ``Y`` exactly, so ``H`` fails to be conserved only
    through the terms above ``N``.  (Every invariant field ``Σ G_j R_j``
    conserves ``H`` exactly, so without a recorded input field the drift sits
    at the noise floor.)  ``field="hamiltonian"`` integrates ``Y`` itself,
    the exact pair, where only rounding and integrator error remain.
    """
    radii = [float(r) for r in radii]
    if any(not 0 < r <= 0.5 for r in radii):
        raise ValueError("radii must lie in (0, 0.5]")
    if c.hamiltonian is None or c.transformation is None:
        raise ValueError("certificate has no hamiltonization")
    if field == "transformed":
        order = c.order + extra_order
        source = c.input_field if c.input_field is not None else c.normal_form
        Z = source
        for tr in (c.normal_form_transformation, c.transformation):
            Z = pushforward(replace(tr, working_order=max(order, tr.working_order)), Z, order)
    elif field == "hamiltonian":
        Z = c.hamiltonian_field
    else:
        raise ValueError(f"unknown field {field!r}")
    f = NumericPolynomialMap(list(Z))
    u = _direction(Z.dimension)
    drifts, energies = [], []
    for r in radii:
        d, e = energy_drift(f, c.hamiltonian, r * u, T, dt)
        drifts.append(d)
        energies.append(e)
    slope, status = _fit(radii, drifts, energies)
    return DriftReport(radii, drifts, slope, status, energies)


def dt_convergence(X: VectorField, H: Polynomial, x0, T: float, dts: Sequence[float]) -> float:
    """Log-log slope of the energy drift of ``H`` along ``X`` against ``dt``."""
    f = NumericPolynomialMap(list(X))
    drifts = [energy_drift(f, H, x0, T, dt)[0] for dt in dts]
    return float(np.polyfit(np.log(dts), np.log(drifts), 1)[0])
