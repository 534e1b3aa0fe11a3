"""``reviham`` command line: check, normal-form, hamiltonize, verify.

Exit codes: 0 success, 1 usage or I/O error, 2 a hypothesis fails,
3 the exact solver fails, 4 a certificate does not verify.
"""

from __future__ import annotations

import argparse
import sys

from .certificate import Certificate, format_certificate, read_certificate
from .document import read_field_document
from .drift import IntegrationError, energy_drift_scaling
from .errors import (
    CertificateFormatError,
    InconsistentSystem,
    NonSimpleSingularity,
    PreconditionError,
    ResonanceError,
    ShapeViolation,
    SingularSystem,
    SpectrumError,
)
from .estimators import Hamiltonizer
from .field import is_reversible
from .hamiltonize import (
    HamiltonizeMode,
    _check_nonresonant,
    check_d4_preconditions,
    check_genericity,
    check_j3_hamiltonian,
    extract_invariant_form,
)
from .normalform import poincare_dulac
from .verify import verify_certificate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

HYPOTHESIS_ERRORS = (PreconditionError, NonSimpleSingularity, SpectrumError, ResonanceError, ShapeViolation)
SOLVER_ERRORS = (SingularSystem, InconsistentSystem)


def _line(name: str, ok: bool, detail: str = "") -> str:
    status = "PASS" if ok else "FAIL"
    return f"{name}: {status}" + (f" ({detail})" if detail else "")


def cmd_check(args, out) -> int:
    doc = read_field_document(args.file)
    X, phi, N = doc.field, doc.involution, args.order
    results = []

    try:
        X.check_simple_singularity()
        X.check_normalized()
        results.append(("simple singularity", True, ""))
        simple = True
    except (NonSimpleSingularity, SpectrumError) as exc:
        results.append(("simple singularity", False, str(exc)))
        simple = False

    defects = phi.defects(N)
    results.append(("involution", not defects, "; ".join(defects)))
    reversible = not defects and is_reversible(X.jet(N), phi, N)
    results.append(("reversibility", reversible, "" if reversible else "X∘φ ≠ -Dφ·X"))

    if doc.d4 is not None:
        ok = simple and check_d4_preconditions(X.jet(N), phi, doc.d4.g2, doc.d4.r1, doc.d4.r2, N)
        results.append(("d4 reversibility and ratio", ok, ""))
    elif simple:
        try:
            _check_nonresonant(doc.kind, doc.frequencies, N)
            results.append((f"order-{N} nonresonance", True, ""))
        except PreconditionError as exc:
            results.append((f"order-{N} nonresonance", False, str(exc)))
    else:
        results.append((f"order-{N} nonresonance", False, "no normalized linear part"))

    inv = None
    if simple and reversible:
        try:
            nf = poincare_dulac(X, 3, phi=phi, strict=False).normal_form
            inv = extract_invariant_form(nf)
        except (ShapeViolation, ResonanceError, PreconditionError) as exc:
            results.append(("j³ Hamiltonian", False, str(exc)))
    if inv is not None:
        results.append(("j³ Hamiltonian", check_j3_hamiltonian(inv), ""))
        F = check_genericity(inv)
        results.append((f"genericity F = {F}", bool(F), ""))
    else:
        if not any(name == "j³ Hamiltonian" for name, _, _ in results):
            results.append(("j³ Hamiltonian", False, "needs a simple reversible singularity"))
        results.append(("genericity F", False, "needs the cubic normal form"))

    for name, ok, detail in results:
        print(_line(name, ok, detail), file=out)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_HYPOTHESIS


def _emit(cert: Certificate, path, out) -> int:
    result = verify_certificate(cert)
    if not result.ok:
        print(f"verification: FAIL {result.message}", file=sys.stderr)
        return EXIT_VERIFY
    text = format_certificate(cert)
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_normal_form(args, out) -> int:
    doc = read_field_document(args.file)
    strict = doc.d4 is None
    res = poincare_dulac(doc.field, args.order, phi=doc.involution, strict=strict)
    X = res.normal_form
    cert = Certificate(
        document="normal-form",
        order=args.order,
        kind=doc.kind,
        frequencies=tuple(X.frequencies),
        normal_form=X,
        normal_form_transformation=res.transformation,
        input_field=doc.field.jet(args.order),
        involution=doc.involution,
    )
    return _emit(cert, args.out, out)


def cmd_hamiltonize(args, out) -> int:
    doc = read_field_document(args.file)
    mode = HamiltonizeMode.parse(args.mode)
    d4 = doc.d4 if mode is HamiltonizeMode.D4_RESONANT else None
    est = Hamiltonizer(order=args.order, mode=mode.value, involution=doc.involution, d4=d4)
    est.fit(doc.field)
    return _emit(est.certificate_, args.out, out)


def cmd_verify(args, out) -> int:
    cert = read_certificate(args.file)
    result = verify_certificate(cert)
    if not result.ok:
        print(f"verification: FAIL {result.message}", file=out)
        return EXIT_VERIFY
    print("verification: PASS", file=out)
    if args.drift:
        if cert.document != "hamiltonization":
            print("drift: needs a hamiltonization certificate", file=sys.stderr)
            return EXIT_USAGE
        report = energy_drift_scaling(cert, radii=args.radii, T=args.time, dt=args.dt)
        out.write(report.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reviham", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def order_arg(sp):
        sp.add_argument("--order", type=int, default=7, help="truncation order N (default 7)")

    sp = sub.add_parser("check", help="report each hypothesis as PASS or FAIL")
    sp.add_argument("file")
    order_arg(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("normal-form", help="write a Poincaré–Dulac certificate")
    sp.add_argument("file")
    order_arg(sp)
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.set_defaults(func=cmd_normal_form)

    sp = sub.add_parser("hamiltonize", help="write a hamiltonization certificate")
    sp.add_argument("file")
    order_arg(sp)
    sp.add_argument("--mode", default="orbital", choices=["orbital", "decoupled6", "conjugacy6", "d4", "d4_resonant"])
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.set_defaults(func=cmd_hamiltonize)

    sp = sub.add_parser("verify", help="re-check a certificate exactly")
    sp.add_argument("file")
    sp.add_argument("--drift", action="store_true", help="also print the energy-drift table")
    sp.add_argument("--radii", type=float, nargs="+", default=[0.2, 0.1, 0.05])
    sp.add_argument("--time", type=float, default=1.0, help="integration time T")
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "order", 1) < 1:
        print("reviham: --order must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except (OSError, CertificateFormatError) as exc:
        print(f"reviham: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HYPOTHESIS_ERRORS as exc:
        name = getattr(exc, "hypothesis", "") or type(exc).__name__
        print(f"reviham: hypothesis failed [{name}]: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except SOLVER_ERRORS as exc:
        detail = f" at degree {exc.degree}" if getattr(exc, "degree", None) else ""
        print(f"reviham: solver failed{detail}: {exc}", file=sys.stderr)
        if getattr(exc, "witness", None):
            print(f"witness: {exc.witness}", file=sys.stderr)
        return EXIT_SOLVER
    except (IntegrationError, ValueError) as exc:
        print(f"reviham: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
