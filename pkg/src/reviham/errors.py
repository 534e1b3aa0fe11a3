"""Exception hierarchy shared by the package."""


class RevihamError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RevihamError, TypeError):
    """Coefficient domains were mixed without an explicit promotion."""


class NotInvariant(RevihamError, ValueError):
    """A polynomial is not a polynomial in the invariants Δ_j (or Γ_j)."""


class ShapeViolation(RevihamError, ValueError):
    """A normal form is not of the rotational (or hyperbolic) invariant shape."""


class NonSimpleSingularity(RevihamError, ValueError):
    """The origin is not a simple singularity: constant terms or det A = 0."""


class SpectrumError(RevihamError, ValueError):
    """The linear part is not in the normalized block form."""


class ResonanceError(RevihamError, ValueError):
    """A non-structural resonant term is present where nonresonance is required.

    ``offending`` lists ``(degree, monomial, component, defect)`` tuples.
    """

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)


class PreconditionError(RevihamError, ValueError):
    """A hypothesis of the hamiltonization theorem does not hold.

    ``hypothesis`` names the violated hypothesis.
    """

    def __init__(self, message, hypothesis=""):
        super().__init__(message)
        self.hypothesis = hypothesis


class NotGeneric(PreconditionError):
    """The genericity product F of the cubic cross-coefficients vanishes."""

    def __init__(self, message):
        super().__init__(message, hypothesis="genericity")


class SingularSystem(RevihamError, ArithmeticError):
    """The per-order linear system has no solution for the requested mode."""

    def __init__(self, message, degree=None, witness=None):
        super().__init__(message)
        self.degree = degree
        self.witness = witness


class InconsistentSystem(RevihamError, ArithmeticError):
    """An exact linear system has no solution.  ``row`` is the first
    offending equation after elimination."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class CertificateFormatError(RevihamError, ValueError):
    """A certificate or field document could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
