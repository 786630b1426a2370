"""Acceptance gate: one test per criterion, each reporting a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

from quonforge import cli
from quonforge.fsusy import build_susy_system, spectrum_report, verify_fsusy, witten_check, z3_closed_forms
from quonforge.mubgen import build_mub_family, gauss_identity_report, gauss_sum, projector_embedding
from quonforge.quon import X_TYPE, Y_TYPE, build_quon_rep, verify_quon_relations
from quonforge.sicpovm import PovmCandidate, covariant_orbit, load_fiducial, r_embedding, verify_sic
from quonforge.su2polar import PolarParams, build_polar_ops, build_su2_generators, build_z, pauli_closure, verify_su2
from quonforge.weylheis import StructureFunctions, build_wh_realization, verify_wh

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script
    ACCEPTANCE_LINES = []

pytestmark = pytest.mark.acceptance


def report(tag: str, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {tag} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_ac01_quon_relations():
    t = time.perf_counter()
    failures = []
    for k in range(2, 13):
        for flavor in (X_TYPE, Y_TYPE):
            rep = verify_quon_relations(build_quon_rep(k, flavor))
            if not (rep.passed and all(c.exact_zero for c in rep)):
                failures.append((k, flavor))
    dt = time.perf_counter() - t
    report("AC01", "quon relations exact, k=2..12, both representations", not failures and dt < 1.0, f"failures={failures} time={dt:.3f}s (<1s)")


def test_ac02_weyl_heisenberg():
    t = time.perf_counter()
    worst, failed = 0.0, []
    for k in (2, 3, 4):
        for name, f in (("const1", StructureFunctions.const1(k)), ("translational(1,1)", StructureFunctions.translational(k, 1, 1))):
            rep = verify_wh(build_wh_realization(f, 15), tol=1e-12)
            interior = [c.residual for c in rep if c.scope == "interior"]
            worst = max(worst, *interior)
            if not rep.passed:
                failed.append((k, name))
    dt = time.perf_counter() - t
    report("AC02", "W_k(f) relations, k=2..4, L=15", not failed and worst <= 1e-12 and dt < 10, f"worst interior residual={worst:.2e} failed={failed} time={dt:.2f}s (<10s)")


def test_ac03_fractional_susy_z3():
    t = time.perf_counter()
    system = build_susy_system(build_wh_realization(StructureFunctions.const1(3), 30))
    rel = verify_fsusy(system)
    closed = z3_closed_forms(system)
    spectrum = spectrum_report(system, 8)
    dt = time.perf_counter() - t
    nilpotent = rel["Q-^k = 0"].exact_zero and rel["Q+^k = 0"].exact_zero
    interior = max(c.residual for c in rel if c.scope == "interior")
    wanted = [
        "Q- = b- f+ (f-^2 - q f+)",
        "H = 2b+b- - 1 + 2(1-2q)f+f- + 2(1+2q)f+f-f+f-",
        "H = (2X+X- - 1)Pi_3 + (2X+X- + 1)Pi_2 + (2X+X- + 3)Pi_1",
    ]
    closed_worst = max(closed[name].residual for name in wanted)
    ok = (
        nilpotent
        and rel.passed
        and interior <= 1e-10
        and closed.passed
        and closed_worst <= 1e-12
        and spectrum.degeneracies == [1, 2, 3, 3, 3, 3, 3, 3]
        and spectrum.equally_spaced
        and dt < 30
    )
    report(
        "AC03",
        "fractional SUSY k=3, f=1, L=30",
        ok,
        f"Q^3=0 exact={nilpotent} interior={interior:.2e} closed forms={closed_worst:.2e} "
        f"degeneracies={spectrum.degeneracies} spacing={spectrum.spacing} time={dt:.2f}s (<30s)",
    )


def test_ac04_witten_reduction():
    system = build_susy_system(build_wh_realization(StructureFunctions.const1(2), 30))
    rep = witten_check(system)
    witten_rel = ["S = S^dag", "H = S^2", "{S,P} = 0", "P^2 = I", "P = P^dag"]
    halves = ["S(1+P)/2 = Q+", "S(1-P)/2 = Q-"]
    worst_rel = max(rep[n].residual for n in witten_rel)
    worst_h = max(rep[n].residual for n in halves)
    ok = rep.passed and worst_rel <= 1e-10 and worst_h <= 1e-12
    report("AC04", "Witten reduction k=2", ok, f"relations={worst_rel:.2e} (<=1e-10) S(1+-P)/2 vs Q+-={worst_h:.2e} (<=1e-12)")


def test_ac05_su2_polar():
    t = time.perf_counter()
    worst, failed = 0.0, []
    for k in range(2, 7):
        for a in (0, 1, -1, 0.37, 1.7):
            for r in (0, 1, 0.3):
                rep = verify_su2(build_su2_generators(build_polar_ops(PolarParams(k, a, r))), tol=1e-10)
                worst = max(worst, max(c.residual for c in rep))
                if not rep.passed:
                    failed.append((k, a, r))
    dt = time.perf_counter() - t
    report("AC05", "su(2) from polar decomposition, k=2..6, 5x3 (a,r) grid", not failed and dt < 5, f"worst residual={worst:.2e} failed={failed} time={dt:.2f}s (<5s)")


def test_ac06_pauli_group():
    orders, times = {}, {}
    for d in (2, 3, 5):
        t = time.perf_counter()
        p = PolarParams(d, 0, 0)
        orders[d] = pauli_closure(build_z(p), build_polar_ops(p).v_eps).order
        times[d] = time.perf_counter() - t
    ok = all(orders[d] == d**3 for d in orders) and times[5] < 60
    report("AC06", "Pauli group order d^3 at (a,r)=(0,0)", ok, f"orders={orders} time(d=5)={times[5]:.2f}s (<60s)")


def test_ac07_mubs():
    failed, times = [], {}
    for d in (2, 3, 5, 7, 11, 13):
        for r in (0, 1):
            t = time.perf_counter()
            fam = build_mub_family(d, r, backend="exact")
            emb = projector_embedding(fam)
            times[(d, r)] = time.perf_counter() - t
            if not (fam.certificate.exact and fam.certificate.passed and fam.certificate.worst_deviation == 0 and emb.passed):
                failed.append((d, r))
    gauss_ok = all(gauss_identity_report(build_mub_family(d))["passed"] for d in (3, 5))
    slow = max(times[(13, 0)], times[(13, 1)])
    ok = not failed and gauss_ok and slow < 60
    report("AC07", "exact MUB certificates d in {2,3,5,7,11,13}, r in {0,1}", ok, f"failed={failed} embedding exact, gauss identity={gauss_ok} time(d=13)={slow:.2f}s (<60s)")


def test_ac08_gauss_sums():
    trivial = all(gauss_sum(0, 0, d)[0] == d for d in range(1, 10))
    s1 = gauss_sum(1, -3, 3)[1]
    s2 = gauss_sum(1, 0, 2)[1]
    ok = trivial and s1 == 3 and s2 == 2
    report("AC08", "Gauss sums", ok, f"S(0,0,d)=d for d<=9: {trivial}; |S(1,-3,3)|^2={s1.as_fraction()}; |S(1,0,2)|^2={s2.as_fraction()}")


def test_ac09_sic_verifier():
    from importlib import resources

    d, fid = load_fiducial(json.loads((resources.files("quonforge") / "data" / "sic_fiducial_d2.json").read_text()))
    orbit = covariant_orbit(d, fid)
    cert = verify_sic(orbit)
    emb = r_embedding(orbit)
    off = emb.products[~np.eye(d * d, dtype=bool)]
    off_dev = float(np.max(np.abs(off - 1 / 3)))
    degenerate = verify_sic(PovmCandidate(d, np.tile(np.eye(d)[0], (d * d, 1))))
    ok = cert.passed and cert.gram_worst <= 1e-10 and off_dev <= 1e-10 and not degenerate.passed and degenerate.identity_residual > 0
    report(
        "AC09",
        "SIC verifier d=2",
        ok,
        f"orbit gram worst={cert.gram_worst:.2e} r-products off 1/3 by {off_dev:.2e}; "
        f"degenerate candidate rejected with identity residual={degenerate.identity_residual}",
    )


def test_ac10_determinism(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code = cli.main(["mub", "gen", "--d", "7", "--backend", "exact", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    ok = outs[0][0] == 0 and outs[1][0] == 0 and outs[0][1] == outs[1][1]
    report("AC10", "mub gen --d 7 --backend exact is byte-identical", ok, f"exit codes={[c for c, _ in outs]} bytes={len(outs[0][1])}")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac") and callable(fn):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as tmp:
                        fn(Path(tmp))
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
