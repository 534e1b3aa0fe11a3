"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers
from typing import Sequence

import numpy as np

from .field import Involution, VectorField
from .hamiltonize import HamiltonizeMode
from .polyalg import Polynomial

__all__ = ["check_vector_field", "check_order", "check_mode", "check_involution", "check_points"]


def check_vector_field(X, dimension: int | None = None) -> VectorField:
    """Coerce ``X`` (a :class:`VectorField` or a sequence of polynomials)."""
    if isinstance(X, VectorField):
        field = X
    elif isinstance(X, Sequence) and X and all(isinstance(p, Polynomial) for p in X):
        field = VectorField(list(X))
    else:
        raise TypeError(f"expected a VectorField or a list of Polynomials, got {type(X).__name__}")
    if dimension is not None and field.dimension != dimension:
        raise ValueError(f"field has dimension {field.dimension}, expected {dimension}")
    return field


def check_order(order, minimum: int = 1) -> int:
    if isinstance(order, bool) or not isinstance(order, numbers.Integral):
        raise TypeError(f"order must be an integer, got {order!r}")
    if order < minimum:
        raise ValueError(f"order must be at least {minimum}, got {order}")
    return int(order)


def check_mode(mode) -> HamiltonizeMode:
    return HamiltonizeMode.parse(mode)


def check_involution(phi, dimension: int) -> Involution | None:
    """``None``, an :class:`Involution`, or a square rational matrix."""
    if phi is None or isinstance(phi, Involution):
        pass
    else:
        phi = Involution.from_matrix(phi)
    if phi is not None and phi.dimension != dimension:
        raise ValueError(f"involution acts on dimension {phi.dimension}, field has {dimension}")
    return phi


def check_points(points, dimension: int) -> np.ndarray:
    """2-D float array of shape ``(n_points, dimension)``; a single point is promoted."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise ValueError(f"points must have shape (n, {dimension}), got {np.shape(points)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points contain NaN or infinity")
    return arr
