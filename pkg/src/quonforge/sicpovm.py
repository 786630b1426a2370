"""Verification of SIC-POVM candidates and their d^2-dimensional embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mubgen import embed_vector
from .su2polar import PolarParams, build_polar_ops, build_z

SIC_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass
class PovmCandidate:
    """d^2 unit vectors Phi_x (rows of ``vectors``) in the |kk> = |j, m> basis."""

    d: int
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=complex)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.d:
            raise ValueError(f"expected vectors of length {self.d}")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(norms - 1) > NORM_TOL):
            raise ValueError("candidate vectors must have unit norm")

    @property
    def projectors(self) -> np.ndarray:
        return np.einsum("xi,xj->xij", self.vectors, self.vectors.conj())

    def transformed(self, unitary: np.ndarray) -> "PovmCandidate":
        return PovmCandidate(self.d, self.vectors @ np.asarray(unitary).T)

    def to_json(self) -> dict:
        return {"d": self.d, "vectors": [[[float(c.real), float(c.imag)] for c in v] for v in self.vectors]}

    @classmethod
    def from_json(cls, obj: dict) -> "PovmCandidate":
        vecs = [[complex(re, im) for re, im in v] for v in obj["vectors"]]
        return cls(int(obj["d"]), np.array(vecs))


def load_fiducial(obj: dict) -> tuple[int, np.ndarray]:
    """Fiducial from {d, fiducial: [[re, im]...]} or the first entry of {d, vectors}."""
    raw = obj["fiducial"] if "fiducial" in obj else obj["vectors"][0]
    return int(obj["d"]), np.array([complex(re, im) for re, im in raw])


@dataclass
class SicCertificate:
    gram_worst: float
    identity_residual: float
    passed: bool
    trace_sum: float
    gram: np.ndarray

    def to_dict(self) -> dict:
        return {"gram_worst": self.gram_worst, "identity_residual": self.identity_residual, "pass": self.passed}


def _gram_target(d: int) -> np.ndarray:
    n = d * d
    return (d * np.eye(n) + 1) / (d + 1)


def verify_sic(c: PovmCandidate, tol: float = SIC_TOL) -> SicCertificate:
    """Tr(P_x P_y) = (d delta_xy + 1)/(d + 1) and (1/d) sum_x P_x = I."""
    d = c.d
    if len(c.vectors) != d * d:
        raise ValueError(f"a SIC candidate in dimension {d} needs {d * d} vectors, got {len(c.vectors)}")
    gram = np.abs(c.vectors.conj() @ c.vectors.T) ** 2
    gram_worst = float(np.max(np.abs(gram - _gram_target(d))))
    projs = c.projectors
    resid = float(np.max(np.abs(projs.sum(axis=0) / d - np.eye(d))))
    trace_sum = float(np.real(np.einsum("xii->", projs)))
    return SicCertificate(gram_worst, resid, gram_worst <= tol and resid <= tol, trace_sum, gram)


@dataclass
class PovmEmbedding:
    vectors: np.ndarray  # rows r(x) in C^{d^2}
    products: np.ndarray  # r(x) . r(y)
    worst_deviation: float
    diagonal_worst: float


def r_embedding(c: PovmCandidate, frame: np.ndarray | None = None) -> PovmEmbedding:
    """r_i(x) = f_{m m'} where P_x = sum f_{m m'} E_{m m'}; ``frame`` rotates the E basis."""
    vecs = c.vectors if frame is None else c.vectors @ np.asarray(frame).conj()
    emb = np.stack([embed_vector(v, c.d) for v in vecs])
    products = emb.conj() @ emb.T
    dev = np.abs(products - _gram_target(c.d))
    return PovmEmbedding(emb, products, float(dev.max()), float(np.max(np.abs(np.diag(products) - 1))))


def covariant_orbit(d: int, fiducial) -> PovmCandidate:
    """z^alpha v^beta |fiducial>, alpha, beta = 0..d-1, with z, v at (a, r) = (0, 0).

    Row index is alpha * d + beta.
    """
    fid = np.asarray(fiducial, dtype=complex)
    if fid.shape != (d,):
        raise ValueError(f"fiducial must have length {d}")
    if abs(np.linalg.norm(fid) - 1) > NORM_TOL:
        raise ValueError("fiducial must have unit norm")
    p = PolarParams(d, 0, 0)
    z = build_z(p).to_numpy()
    v = build_polar_ops(p).v_eps.to_numpy()
    out = []
    for alpha in range(d):
        za = np.linalg.matrix_power(z, alpha)
        for beta in range(d):
            out.append(za @ np.linalg.matrix_power(v, beta) @ fid)
    return PovmCandidate(d, np.array(out))
