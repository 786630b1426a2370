from __future__ import annotations

import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from quonforge.mubgen import (
    BackendDowngradeWarning,
    MubFamily,
    NotPrimeError,
    build_mub_family,
    embedding_index,
    gauss_identity_report,
    gauss_sum,
    overlap_table_csv,
    projector_embedding,
    verify_unbiasedness,
)
from quonforge.su2polar import PolarParams, build_polar_ops


def float_gauss(u, v, d):
    return sum(cmath.exp(1j * math.pi * (u * k * k + v * k) / d) for k in range(d))


def float_family(d, r):
    """All d(d+1) vectors computed directly in floating point."""
    j = (d - 1) / 2
    vecs = []
    for a in range(d):
        for alpha in range(d):
            x = np.array([(d - k - 1) * (k + 1) * a / 2 + j * (k - j) * r - (k + 1) * alpha for k in range(d)])
            vecs.append(np.exp(2j * np.pi * x / d) / math.sqrt(d))
    vecs.extend(np.eye(d))
    return np.array(vecs)


def float_worst_deviation(d, r):
    vecs = float_family(d, r)
    n = len(vecs)
    worst = 0.0
    for i in range(n):
        for k in range(i, n):
            a, b = divmod(i, d)[0], divmod(k, d)[0]
            ov = np.vdot(vecs[i], vecs[k])
            if a == b:
                dev = abs(ov - (1.0 if i == k else 0.0))
            else:
                dev = abs(abs(ov) ** 2 - 1 / d)
            worst = max(worst, dev)
    return worst


@pytest.mark.parametrize("d", range(1, 10))
def test_gauss_trivial(d):
    value, mod2 = gauss_sum(0, 0, d)
    assert value == d and mod2 == d * d


def test_gauss_examples():
    assert gauss_sum(1, -3, 3)[1] == 3
    assert gauss_sum(1, 0, 2)[1] == 2
    for u, v, d in [(1, -3, 3), (2, 5, 7), (3, 1, 4), (-1, 2, 5)]:
        value, mod2 = gauss_sum(u, v, d)
        assert abs(complex(value) - float_gauss(u, v, d)) < 1e-12
        assert abs(complex(mod2) - abs(float_gauss(u, v, d)) ** 2) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 5, 7, 11, 13])
@pytest.mark.parametrize("r", [0, 1])
def test_exact_certificate(d, r):
    fam = build_mub_family(d, r)
    assert len(fam.bases) == d + 1 and all(len(b) == d for b in fam.bases)
    cert = fam.certificate
    assert cert.exact and cert.passed and cert.worst_deviation == 0.0


@pytest.mark.parametrize("d", [2, 3, 5])
def test_certificate_invariant_over_r(d):
    for r in (0, 1, 2):
        assert build_mub_family(d, r).certificate.passed


@pytest.mark.parametrize("d", [2, 3, 5, 7])
@pytest.mark.parametrize("r", [0, 1, Fraction(1, 2)])
def test_vectors_match_float_reference(d, r):
    fam = build_mub_family(d, r)
    ref = float_family(d, float(r))
    got = np.array([v.to_numpy() for v in fam.flat()])
    assert np.allclose(got, ref, atol=1e-12)


def test_component_moduli():
    fam = build_mub_family(3)
    for basis in fam.bases[:3]:
        for vec in basis:
            assert vec.scale_sq == Fraction(1, 3)
            assert all(e >= 0 for e in vec.exponents)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_bases_are_eigenbases_of_v(d):
    for a in range(d):
        for r in (0, 1):
            v = build_polar_ops(PolarParams(d, a, r)).v_eps.to_numpy()
            basis = build_mub_family(d, r, certify=False).matrix(a)
            diag = basis.conj().T @ v @ basis
            assert np.abs(diag - np.diag(np.diag(diag))).max() <= 1e-10


def test_primality_gate():
    with pytest.raises(NotPrimeError):
        build_mub_family(6)
    with pytest.raises(NotPrimeError):
        build_mub_family(4)


def test_composite_bypass_reports_deviation():
    fam = build_mub_family(4, 0, check_prime=False)
    expected = float_worst_deviation(4, 0.0)
    assert not fam.certificate.passed
    assert math.isclose(fam.certificate.worst_deviation, expected, abs_tol=1e-12)


def test_irrational_r_downgrades():
    with pytest.warns(BackendDowngradeWarning):
        fam = build_mub_family(5, math.sqrt(2))
    assert fam.backend == "float"
    assert fam.certificate.passed and fam.certificate.worst_deviation <= 1e-12
    assert math.isclose(fam.certificate.worst_deviation, float_worst_deviation(5, math.sqrt(2)), abs_tol=1e-13)


def test_embedding_index():
    for d in (2, 3, 5):
        j = Fraction(d - 1, 2)
        assert embedding_index(j, j, j) == d * d
        assert embedding_index(j, -j, -j) == 1


@pytest.mark.parametrize("d", [2, 3, 5])
def test_projector_embedding(d):
    fam = build_mub_family(d)
    emb = projector_embedding(fam)
    assert emb.passed and emb.worst_deviation == 0.0
    for ((a, alpha), (b, beta)), value in emb.products.items():
        if (a, alpha) == (b, beta):
            assert value == 1
        elif a != b:
            assert value == Fraction(1, d)


@pytest.mark.parametrize("d", [3, 5])
def test_gauss_identity(d):
    report = gauss_identity_report(build_mub_family(d))
    assert report["passed"] and report["checked"] == d * d * (d * d + 1) // 2


def test_float_embedding():
    fam = build_mub_family(3, backend="float")
    emb = projector_embedding(fam)
    assert emb.passed and emb.worst_deviation <= 1e-12


def test_json_roundtrip_and_determinism():
    fam = build_mub_family(5, 1)
    text = json.dumps(fam.to_json(), sort_keys=True)
    assert text == json.dumps(build_mub_family(5, 1).to_json(), sort_keys=True)
    back = MubFamily.from_json(json.loads(text))
    assert all(u == v for u, v in zip(back.flat(), fam.flat()))
    assert verify_unbiasedness(back).passed
    ffam = build_mub_family(3, backend="float")
    fback = MubFamily.from_json(json.loads(json.dumps(ffam.to_json())))
    assert verify_unbiasedness(fback).passed


def test_overlap_csv():
    text = overlap_table_csv(build_mub_family(2))
    lines = text.strip().split("\n")
    assert lines[0] == "a,alpha,b,beta,overlap_sq"
    assert len(lines) == 1 + 36
    assert "0,0,1,0,1/2" in lines
