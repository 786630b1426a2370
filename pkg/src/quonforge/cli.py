"""Command-line entry point: ``quonforge <group> <action> [options]``.

Exit codes: 0 all asserted checks pass, 1 a verification failed, 2 usage,
representability or primality error.  A JSON envelope goes to stdout; with
``--out`` the payload alone is written to a file (deterministic bytes).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from fractions import Fraction
from importlib import resources

from . import fsusy, mubgen, quon, sicpovm, su2polar, weylheis
from .matrixcore import EXACT, FLOAT

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _number(text: str):
    """Exact Fraction for decimal/ratio literals, float otherwise."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise UsageError(f"not a number: {text!r}") from None


def _default_backend(explicit: str | None) -> str | None:
    choice = explicit or os.environ.get("QUONFORGE_BACKEND")
    if choice not in (None, EXACT, FLOAT):
        raise UsageError(f"unknown backend {choice!r}")
    return choice


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


# --- structure functions ---------------------------------------------------


def _parse_params(text: str | None) -> tuple[dict, list]:
    named, positional = {}, []
    if not text:
        return named, positional
    for item in text.split(","):
        item = item.strip()
        if "=" in item:
            key, val = item.split("=", 1)
            named[key.strip()] = _number(val.strip())
        elif item:
            positional.append(_number(item))
    return named, positional


def structure_functions(k: int, preset: str, params: str | None) -> weylheis.StructureFunctions:
    named, positional = _parse_params(params)
    sf = weylheis.StructureFunctions
    if preset == "const1":
        return sf.const1(k)
    if preset == "translational":
        return sf.translational(k, named.get("a", 1), named.get("b", 1))
    if preset == "cyclic":
        if len(positional) != k:
            raise UsageError(f"cyclic preset needs {k} comma-separated values in --params")
        return sf.cyclic(positional)
    if preset == "calogero":
        if k != 2:
            raise UsageError("the calogero preset is defined for k = 2")
        return sf.calogero_vasiliev(named.get("c", Fraction(0)))
    raise UsageError(f"unknown preset {preset!r}")


def _realization(args) -> weylheis.WhRealization:
    f = structure_functions(args.k, args.preset, args.params)
    return weylheis.build_wh_realization(f, args.trunc, backend=_default_backend(args.backend))


# --- handlers: each returns (passed, backend, payload, csv_text) ----------------


def cmd_quon_verify(args):
    reports = []
    for flavor in (quon.X_TYPE, quon.Y_TYPE):
        rep = quon.build_quon_rep(args.k, flavor)
        main = quon.verify_quon_relations(rep)
        cross = quon.verify_kfermion_cross(rep, quon.half_deformation(args.k))
        reports.append({"relations": main.to_dict(), "cross_relation": cross.to_dict()})
    passed = all(r["relations"]["passed"] for r in reports)
    return passed, EXACT, {"k": args.k, "representations": reports}, None


def cmd_wh_verify(args):
    w = _realization(args)
    report = weylheis.verify_wh(w)
    return report.passed, w.backend, report.to_dict(), None


def _susy(args):
    return fsusy.build_susy_system(_realization(args))


def cmd_susy_spectrum(args):
    system = _susy(args)
    spectrum = fsusy.spectrum_report(system, args.levels)
    return True, system.H.backend, spectrum.to_dict()["levels"], spectrum.to_csv()


def cmd_susy_verify(args):
    system = _susy(args)
    report = fsusy.verify_fsusy(system)
    payload = {"relations": report.to_dict()}
    passed = report.passed
    if system.k == 2:
        witten = fsusy.witten_check(system)
        payload["witten"] = witten.to_dict()
        passed = passed and witten.passed
    if system.k == 3 and args.preset == "const1":
        closed = fsusy.z3_closed_forms(system)
        payload["closed_forms"] = closed.to_dict()
        passed = passed and closed.passed
    return passed, system.H.backend, payload, None


def cmd_su2_verify(args):
    backend = _default_backend(args.backend)
    a, r = _number(args.a), _number(args.r)
    if backend == FLOAT:
        a, r = float(a), float(r)
    p = su2polar.PolarParams(args.k, a, r)
    ops = su2polar.build_polar_ops(p)
    report = su2polar.verify_su2(su2polar.build_su2_generators(ops))
    leak_h = su2polar.leakage(ops.h, ops.eps)
    leak_v = su2polar.leakage(ops.v, ops.eps)
    unit = su2polar.unitarity_residual(ops.v_eps.to_float())
    passed = report.passed and leak_h[1] and leak_v[1] and unit <= su2polar.UNITARY_TOL
    payload = {
        "k": p.k,
        "a": str(p.a),
        "r": str(p.r),
        "relations": report.to_dict(),
        "leakage": {"h": leak_h[0], "v": leak_v[0], "exact_zero": leak_h[1] and leak_v[1]},
        "v_unitarity_residual": unit,
        "eigenbasis": su2polar.eigenbasis_to_json(p),
    }
    return passed, p.backend, payload, None


def cmd_pauli_order(args):
    p = su2polar.PolarParams(args.d, _number(args.a), _number(args.r))
    z = su2polar.build_z(p)
    v = su2polar.build_polar_ops(p).v_eps
    report = su2polar.pauli_closure(z, v, cap=args.cap)
    payload = {**report.to_dict(), "d": args.d, "a": str(p.a), "r": str(p.r), "expected": args.d**3}
    return report.closed, v.backend, payload, None


def cmd_gauss(args):
    value, mod2 = mubgen.gauss_sum(args.u, args.v, args.d)
    payload = {"u": args.u, "v": args.v, "d": args.d, "value": value.to_json(), "abs_sq": str(mod2.as_fraction()) if mod2.is_rational() else mod2.to_json(), "float": [complex(value).real, complex(value).imag]}
    return True, EXACT, payload, None


def _mub_backend(args) -> str:
    return _default_backend(args.backend) or EXACT


def cmd_mub_gen(args):
    r = _number(args.r)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", mubgen.BackendDowngradeWarning)
        family = mubgen.build_mub_family(args.d, r, backend=_mub_backend(args))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    payload = family.to_json()
    if args.gauss and family.exact:
        payload["gauss_identity"] = {k: v for k, v in mubgen.gauss_identity_report(family).items() if k != "mismatches"}
    csv = mubgen.overlap_table_csv(family) if args.csv else None
    return family.certificate.passed, family.backend, payload, csv


def cmd_mub_verify(args):
    with open(args.input, encoding="utf-8") as fh:
        family = mubgen.MubFamily.from_json(json.load(fh))
    cert = mubgen.verify_unbiasedness(family)
    emb = mubgen.projector_embedding(family)
    payload = {
        "d": family.d,
        "certificate": cert.to_dict(),
        "embedding": {"worst_deviation": emb.worst_deviation, "pass": emb.passed},
    }
    return cert.passed and emb.passed, family.backend, payload, None


def _load_sic_input(path: str | None) -> dict:
    if path is None:
        ref = resources.files("quonforge") / "data" / "sic_fiducial_d2.json"
        return json.loads(ref.read_text(encoding="utf-8"))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_sic_verify(args):
    obj = _load_sic_input(args.input)
    if args.orbit:
        d, fid = sicpovm.load_fiducial(obj)
        candidate = sicpovm.covariant_orbit(d, fid)
    else:
        candidate = sicpovm.PovmCandidate.from_json(obj)
    cert = sicpovm.verify_sic(candidate)
    emb = sicpovm.r_embedding(candidate)
    payload = {
        "d": candidate.d,
        "certificate": cert.to_dict(),
        "embedding": {"worst_deviation": emb.worst_deviation, "diagonal_worst": emb.diagonal_worst},
    }
    return cert.passed, FLOAT, payload, None


# --- parser ----------------------------------------------------------------


def _add_wh_args(p: argparse.ArgumentParser, default_trunc: int) -> None:
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--preset", default="const1", choices=["const1", "translational", "cyclic", "calogero"])
    p.add_argument("--params", help="a=..,b=.. (translational), v0,v1,.. (cyclic), c=.. (calogero)")
    p.add_argument("--trunc", type=int, default=default_trunc, help="boson truncation L")
    p.add_argument("--backend", choices=[EXACT, FLOAT])


def _add_out(p: argparse.ArgumentParser, csv: bool = False) -> None:
    p.add_argument("--out", help="write the payload to this file")
    if csv:
        p.add_argument("--csv", action="store_true", help="print a CSV view instead of JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quonforge", description="quon algebra, SUSY, SU(2), MUB and SIC tools")
    groups = parser.add_subparsers(dest="group", required=True)

    mub = groups.add_parser("mub", help="mutually unbiased bases").add_subparsers(dest="action", required=True)
    p = mub.add_parser("gen", help="generate and certify d+1 bases")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", default="0")
    p.add_argument("--backend", choices=[EXACT, FLOAT])
    p.add_argument("--gauss", action="store_true", help="also check the Gauss-sum identity")
    _add_out(p, csv=True)
    p.set_defaults(func=cmd_mub_gen)
    p = mub.add_parser("verify", help="re-certify a family JSON")
    p.add_argument("--in", dest="input", required=True)
    _add_out(p)
    p.set_defaults(func=cmd_mub_verify)

    q = groups.add_parser("quon", help="quon representations").add_subparsers(dest="action", required=True)
    p = q.add_parser("verify")
    p.add_argument("--k", type=int, required=True)
    _add_out(p)
    p.set_defaults(func=cmd_quon_verify)

    wh = groups.add_parser("wh", help="generalized Weyl-Heisenberg algebras").add_subparsers(dest="action", required=True)
    p = wh.add_parser("verify")
    _add_wh_args(p, 15)
    _add_out(p)
    p.set_defaults(func=cmd_wh_verify)

    susy = groups.add_parser("susy", help="fractional supersymmetry").add_subparsers(dest="action", required=True)
    p = susy.add_parser("spectrum")
    _add_wh_args(p, 30)
    p.add_argument("--levels", type=int, required=True)
    _add_out(p, csv=True)
    p.set_defaults(func=cmd_susy_spectrum)
    p = susy.add_parser("verify")
    _add_wh_args(p, 30)
    _add_out(p)
    p.set_defaults(func=cmd_susy_verify)

    su2 = groups.add_parser("su2", help="polar decomposition of su(2)").add_subparsers(dest="action", required=True)
    p = su2.add_parser("verify")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", default="0")
    p.add_argument("--r", default="0")
    p.add_argument("--backend", choices=[EXACT, FLOAT])
    _add_out(p)
    p.set_defaults(func=cmd_su2_verify)

    pauli = groups.add_parser("pauli", help="Pauli group closure").add_subparsers(dest="action", required=True)
    p = pauli.add_parser("order")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", default="0")
    p.add_argument("--r", default="0")
    p.add_argument("--cap", type=int, default=100_000)
    _add_out(p)
    p.set_defaults(func=cmd_pauli_order)

    p = groups.add_parser("gauss", help="generalized quadratic Gauss sum")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _add_out(p)
    p.set_defaults(func=cmd_gauss)

    sic = groups.add_parser("sic", help="SIC-POVM verification").add_subparsers(dest="action", required=True)
    p = sic.add_parser("verify")
    p.add_argument("--in", dest="input", help="candidate or fiducial JSON (default: bundled d=2 fiducial)")
    p.add_argument("--orbit", action="store_true", help="treat the input as a fiducial and verify its orbit")
    _add_out(p)
    p.set_defaults(func=cmd_sic_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with code 2 on usage errors
    start = time.perf_counter()
    try:
        passed, backend, payload, csv = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except mubgen.NotPrimeError as exc:
        print(f"error: not-prime: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except weylheis.RepresentabilityError as exc:
        print(f"error: representability: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fsusy.TruncationError as exc:
        print(f"error: truncation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - start

    if getattr(args, "out", None):
        _write(args.out, _dumps(payload))
    if csv is not None and getattr(args, "csv", False):
        sys.stdout.write(csv)
    else:
        envelope = {"command": " ".join(argv), "backend": backend, "wall_time": elapsed, "pass": passed, "result": payload}
        sys.stdout.write(_dumps(envelope) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
