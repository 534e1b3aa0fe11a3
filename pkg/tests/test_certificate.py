
import pytest
from gmpy2 import mpq

from conftest import orbital_instance
from reviham.certificate import FORMAT_HEADER, format_certificate, parse_certificate, read_certificate, write_certificate
from reviham.errors import CertificateFormatError
from reviham.field import Involution
from reviham.hamiltonize import hamiltonize
from reviham.normalform import poincare_dulac
from reviham.polyalg import ELLIPTIC, SADDLE


@pytest.fixture(scope="module")
def cert():
    X = orbital_instance(2, ELLIPTIC, 0, order=5)
    pd = poincare_dulac(X, 5, Involution.canonical(2))
    return hamiltonize(pd.normal_form, 5, source=pd)


def test_round_trip_is_exact(cert):
    text = format_certificate(cert)
    back = parse_certificate(text)
    assert back == cert
    assert format_certificate(back) == text
    assert text.startswith(FORMAT_HEADER + "\n")


def test_file_round_trip(cert, tmp_path):
    path = tmp_path / "c.txt"
    write_certificate(cert, path)
    assert read_certificate(path) == cert


def test_saddle_round_trip():
    X = orbital_instance(1, SADDLE, 2, order=7, conjugate=False)
    c = hamiltonize(X, 7)
    assert parse_certificate(format_certificate(c)) == c


def test_coefficient_change_breaks_equality(cert):
    text = format_certificate(cert)
    lines = text.splitlines()
    i = next(k for k, line in enumerate(lines) if line.startswith(("+", "-")))
    sign = "-" if lines[i][0] == "+" else "+"
    lines[i] = sign + lines[i][1:]
    assert parse_certificate("\n".join(lines) + "\n") != cert


@pytest.mark.parametrize("mutate,needle", [
    (lambda t: t.replace(FORMAT_HEADER, "reviham-format 2"), "reviham-format"),
    (lambda t: t.replace("\norder: 5", "\norder: five"), "order"),
    (lambda t: t.replace("working-order: 5", "working-order: x", 1), "working-order"),
    (lambda t: t.replace("begin field normal-form", "begin field mystery"), "mystery"),
    (lambda t: t.replace("kind: elliptic", "kind: parabolic"), "kind"),
    (lambda t: t.rsplit("end", 1)[0], "end"),
])
def test_parse_errors_have_locations(cert, mutate, needle):
    with pytest.raises(CertificateFormatError) as exc:
        parse_certificate(mutate(format_certificate(cert)))
    assert needle in str(exc.value) or exc.value.line is not None


def test_genericity_header_is_exact(cert):
    assert isinstance(cert.genericity, type(mpq(1)))
    assert parse_certificate(format_certificate(cert)).genericity == cert.genericity
