"""Estimator-style front end.

``fit`` runs the exact pipeline on one vector field and stores the result in
trailing-underscore attributes; ``transform`` pushes further fields (exactly)
or sample points (in floating point) through the fitted change of
coordinates.  Hyperparameters live in ``__init__`` only, so ``get_params``,
``set_params`` and ``clone`` behave as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_involution, check_mode, check_order, check_points, check_vector_field
from .certificate import D4Data
from .drift import NumericPolynomialMap
from .field import VectorField, compose_maps, pushforward
from .hamiltonize import HamiltonizeMode, hamiltonize_full
from .normalform import poincare_dulac
from .verify import verify_certificate

__all__ = ["PoincareDulacNormalizer", "Hamiltonizer"]


def _map_points(polys, points, dimension):
    pts = check_points(points, dimension)
    f = NumericPolynomialMap(polys)
    return np.array([f(p) for p in pts])


class PoincareDulacNormalizer(TransformerMixin, BaseEstimator):
    """Reversible Poincaré–Dulac normalization up to degree ``order``.

    Parameters
    ----------
    order : int, default=7
    involution : Involution or matrix, optional
        Reversing involution; ``None`` skips the equivariant projection.
    strict : bool, default=True
        Refuse non-structural resonances instead of keeping them.

    Attributes
    ----------
    normal_form_ : VectorField
    transformation_ : Transformation
    reports_ : dict of ResonanceReport, keyed by degree
    result_ : NormalFormResult
    n_features_in_ : int
    """

    def __init__(self, order=7, involution=None, strict=True):
        self.order = order
        self.involution = involution
        self.strict = strict

    def fit(self, X, y=None):
        field = check_vector_field(X)
        order = check_order(self.order)
        phi = check_involution(self.involution, field.dimension)
        result = poincare_dulac(field, order, phi=phi, strict=self.strict)
        self.result_ = result
        self.normal_form_ = result.normal_form
        self.transformation_ = result.transformation
        self.reports_ = result.reports
        self.n_features_in_ = field.dimension
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).normal_form_

    def transform(self, X):
        """Exact pushforward of a field, or the coordinate map on points."""
        check_is_fitted(self, "normal_form_")
        if isinstance(X, VectorField) or (isinstance(X, (list, tuple)) and X and not _is_numeric(X)):
            field = check_vector_field(X, self.n_features_in_)
            return pushforward(self.transformation_, field, self.result_.order)
        return self.transform_points(X)

    def transform_points(self, points) -> np.ndarray:
        check_is_fitted(self, "normal_form_")
        return _map_points(self.transformation_.coordinate_map(), points, self.n_features_in_)

    def residual(self):
        check_is_fitted(self, "normal_form_")
        return self.result_.residual()


class Hamiltonizer(TransformerMixin, BaseEstimator):
    """Reversible field to formally Hamiltonian field, up to degree ``order``.

    With ``normalize=True`` the input is first brought to normal form and the
    certificate covers both stages; otherwise the input must already be an
    invariant normal form.

    Parameters
    ----------
    order : int, default=7
    mode : {"orbital", "decoupled6", "conjugacy6", "d4_resonant"}, default="orbital"
    involution : Involution or matrix, optional
        Defaults to the canonical involution of the spectrum kind.
    d4 : D4Data or (g2, r1, r2), optional
        Required in ``d4_resonant`` mode.
    normalize : bool, default=True

    Attributes
    ----------
    certificate_ : Certificate
    hamiltonian_ : Polynomial
    hamiltonian_field_ : VectorField
    rho_ : Polynomial
    steps_ : list of HamiltonizationStep
    genericity_ : mpq
    normalizer_ : PoincareDulacNormalizer or None
    n_features_in_ : int
    """

    def __init__(self, order=7, mode="orbital", involution=None, d4=None, normalize=True):
        self.order = order
        self.mode = mode
        self.involution = involution
        self.d4 = d4
        self.normalize = normalize

    def fit(self, X, y=None):
        field = check_vector_field(X)
        order = check_order(self.order, minimum=3)
        mode = check_mode(self.mode)
        mode.check_dimension(field.dimension)
        phi = check_involution(self.involution, field.dimension)
        d4 = self.d4
        if d4 is not None and not isinstance(d4, D4Data):
            g2, r1, r2 = d4
            d4 = D4Data(check_involution(g2, field.dimension), r1, r2)
        source = None
        self.normalizer_ = None
        if self.normalize:
            # a d4 field is resonant by design; keep those terms for the D4 checks
            strict = mode is not HamiltonizeMode.D4_RESONANT
            self.normalizer_ = PoincareDulacNormalizer(order, phi, strict).fit(field)
            source = self.normalizer_.result_
            field = self.normalizer_.normal_form_
        result = hamiltonize_full(field, order, mode, phi, d4, source)
        cert = result.certificate
        self.result_ = result
        self.certificate_ = cert
        self.hamiltonian_ = cert.hamiltonian
        self.hamiltonian_field_ = cert.hamiltonian_field
        self.rho_ = cert.rho
        self.steps_ = result.steps
        self.genericity_ = cert.genericity
        self.n_features_in_ = field.dimension
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).hamiltonian_field_

    def coordinate_map(self):
        """Composite map: normal-form map first, then the hamiltonization."""
        check_is_fitted(self, "certificate_")
        c = self.certificate_
        inner = c.normal_form_transformation.coordinate_map(c.order)
        return compose_maps(c.transformation.coordinate_map(c.order), inner, c.order)

    def transform(self, X):
        """Exact image of a field (through both stages), or mapped points."""
        check_is_fitted(self, "certificate_")
        if isinstance(X, VectorField) or (isinstance(X, (list, tuple)) and X and not _is_numeric(X)):
            c = self.certificate_
            field = check_vector_field(X, self.n_features_in_)
            field = pushforward(c.normal_form_transformation, field, c.order)
            return pushforward(c.transformation, field, c.order)
        return self.transform_points(X)

    def transform_points(self, points) -> np.ndarray:
        return _map_points(self.coordinate_map(), points, self.n_features_in_)

    def verify(self):
        check_is_fitted(self, "certificate_")
        return verify_certificate(self.certificate_)


def _is_numeric(X) -> bool:
    try:
        np.asarray(X, dtype=float)
    except (TypeError, ValueError):
        return False
    return True
