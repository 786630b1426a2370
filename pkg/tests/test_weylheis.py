from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from quonforge.matrixcore import EXACT, FLOAT
from quonforge.quon import X_TYPE
from quonforge.weylheis import (
    RepresentabilityError,
    StructureFunctions,
    build_boson_pair,
    build_projectors,
    build_wh_realization,
    grade_shift_violations,
    verify_wh,
)


def test_boson_pair_amplitudes():
    pair = build_boson_pair(lambda n: 2 * n + 1, 6)  # G(n) = n^2
    assert pair.b_plus.backend == EXACT
    assert [float(a) for a in pair.amplitudes] == [1, 2, 3, 4, 5]
    pair = build_boson_pair(lambda n: 1, 5)
    assert pair.b_plus.backend == FLOAT
    assert np.allclose(np.diag(pair.b_plus.to_numpy(), -1), np.sqrt(np.arange(1, 5)))
    comm = pair.b_minus @ pair.b_plus - pair.b_plus @ pair.b_minus
    assert np.allclose(np.diag(comm.to_numpy())[:-1], 1)


def test_representability_error():
    with pytest.raises(RepresentabilityError) as info:
        build_boson_pair(lambda n: 1 - n, 6)  # G = 1, 1, 0, -2
    assert info.value.level == 4


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_projectors_resolve_identity(k):
    K, pis = build_projectors(k)
    total = pis[0]
    for p in pis[1:]:
        total = total + p
    assert np.array_equal(total.to_numpy(), np.eye(k))
    q = np.exp(2j * np.pi / k)
    assert np.allclose(K.to_numpy(), np.diag(q ** np.arange(k)))
    for s, p in enumerate(pis):
        assert np.allclose(p.to_numpy(), np.diag(np.arange(k) == s))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("preset", ["const1", "translational"])
def test_relations_hold(k, preset):
    f = StructureFunctions.const1(k) if preset == "const1" else StructureFunctions.translational(k, 1, 1)
    w = build_wh_realization(f, 15)
    report = verify_wh(w)
    assert report.passed, [(c.name, c.residual) for c in report.failures()]
    interior = [c for c in report if c.scope == "interior"]
    assert interior and all(c.residual <= 1e-12 for c in interior)


def test_exact_backend_when_amplitudes_rational():
    w = build_wh_realization(StructureFunctions.translational(3, 2, 1), 12)
    assert w.backend == EXACT
    report = verify_wh(w)
    assert report.passed
    assert all(c.exact_zero for c in report)


def test_grading_of_ladder_operators():
    w = build_wh_realization(StructureFunctions.const1(4), 10)
    assert grade_shift_violations(w.X_minus, 4, -1) == 0.0
    assert grade_shift_violations(w.X_plus, 4, 1) == 0.0


def test_commutator_against_reference():
    # [X-, X+] on the interior equals f_s(N) per grade
    f = StructureFunctions.translational(3, Fraction(1, 2), 1)
    w = build_wh_realization(f, 12)
    comm = (w.X_minus @ w.X_plus - w.X_plus @ w.X_minus).to_numpy()
    for i in w.interior:
        nb, nf = divmod(i, 3)
        assert math.isclose(comm[i, i].real, nb / 2 + 1, abs_tol=1e-12)


def test_x_type_fermions_break_adjointness_beyond_k3():
    # documented limitation: X+ = X-^dag needs |[n]_q| = 1, true for k <= 3 only
    ok = verify_wh(build_wh_realization(StructureFunctions.const1(3), 10, fermion_flavor=X_TYPE))
    assert ok.passed
    bad = verify_wh(build_wh_realization(StructureFunctions.const1(4), 10, fermion_flavor=X_TYPE))
    assert not bad["X+ = X-^dag"].passed


def test_cyclic_preset_reported_honestly():
    # distinct f_s per grade: the literal realization does not close
    w = build_wh_realization(StructureFunctions.calogero_vasiliev(0.3), 15)
    report = verify_wh(w)
    assert not report.passed
    names = {c.name for c in report.failures()}
    assert "X+ = X-^dag" in names
    assert report["K^k = I"].passed and report["sum_s Pi_s = I"].passed


def test_export_shape():
    w = build_wh_realization(StructureFunctions.const1(2), 5)
    out = w.export()
    assert out["k"] == 2 and out["L"] == 5
    assert out["matrices"]["X_minus"]["dim"] == 10
