"""Exact normal forms and formal hamiltonization of reversible vector fields."""

from .certificate import Certificate, D4Data, parse_certificate, read_certificate, write_certificate
from .errors import (
    CertificateFormatError,
    InconsistentSystem,
    NonSimpleSingularity,
    NotGeneric,
    PreconditionError,
    ResonanceError,
    RevihamError,
    ShapeViolation,
    SingularSystem,
)
from .estimators import Hamiltonizer, PoincareDulacNormalizer
from .field import Involution, Transformation, VectorField, is_hamiltonian, is_reversible
from .hamiltonize import HamiltonizeMode, check_genericity, closed_form_2d, extract_invariant_form, hamiltonize
from .normalform import homological_operator, poincare_dulac, resonance_scan, spectrum
from .polyalg import ELLIPTIC, SADDLE, Polynomial, rational
from .verify import verify_certificate

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "D4Data",
    "parse_certificate",
    "read_certificate",
    "write_certificate",
    "CertificateFormatError",
    "InconsistentSystem",
    "NonSimpleSingularity",
    "NotGeneric",
    "PreconditionError",
    "ResonanceError",
    "RevihamError",
    "ShapeViolation",
    "SingularSystem",
    "Hamiltonizer",
    "PoincareDulacNormalizer",
    "Involution",
    "Transformation",
    "VectorField",
    "is_hamiltonian",
    "is_reversible",
    "HamiltonizeMode",
    "check_genericity",
    "closed_form_2d",
    "extract_invariant_form",
    "hamiltonize",
    "homological_operator",
    "poincare_dulac",
    "resonance_scan",
    "spectrum",
    "ELLIPTIC",
    "SADDLE",
    "Polynomial",
    "rational",
    "verify_certificate",
]
