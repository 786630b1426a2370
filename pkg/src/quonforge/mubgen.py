"""Complete sets of d + 1 mutually unbiased bases in prime dimension d."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .cyclo import Cyclo, RootVector

MUB_FLOAT_TOL = 1e-12


class NotPrimeError(ValueError):
    pass


class BackendDowngradeWarning(UserWarning):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def gauss_sum(u: int, v: int, d: int) -> tuple[Cyclo, Cyclo]:
    """S(u, v, d) = sum_{k<d} exp(i pi (u k^2 + v k)/d) and |S|^2, both exact.

    |S|^2 is real but rational only for some (u, v, d).
    """
    if d < 1:
        raise ValueError("d must be positive")
    n = 2 * d
    counts = np.zeros(n, dtype=np.int64)
    for k in range(d):
        counts[(u * k * k + v * k) % n] += 1
    s = Cyclo.from_counts(n, counts.tolist())
    return s, s.abs2()


def _as_exact_r(r):
    if isinstance(r, Rational):
        return Fraction(r)
    if isinstance(r, float) and r.is_integer():
        return Fraction(int(r))
    return None


def mub_phases(d: int, a: int, alpha: int, r) -> list:
    """Phase of each component |kk> of |a alpha>, in turns (units of 2 pi).

    Component kk carries q^{(d-kk-1)(kk+1)a/2 + j(kk-j)r - (kk+1)alpha}, q = exp(2 pi i/d).
    """
    if isinstance(r, Fraction):
        j = Fraction(d - 1, 2)
        return [
            (Fraction((d - kk - 1) * (kk + 1) * a, 2) + j * (kk - j) * r - (kk + 1) * alpha) / d
            for kk in range(d)
        ]
    j = (d - 1) / 2
    return [((d - kk - 1) * (kk + 1) * a / 2 + j * (kk - j) * r - (kk + 1) * alpha) / d for kk in range(d)]


@dataclass
class MubCertificate:
    exact: bool
    worst_deviation: float
    passed: bool
    pairs_checked: int
    worst_pair: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "worst_deviation": self.worst_deviation,
            "pass": self.passed,
            "pairs_checked": self.pairs_checked,
        }


@dataclass
class MubFamily:
    d: int
    r: Fraction | float
    backend: str
    bases: list[list]  # RootVector (exact) or complex ndarray (float)
    certificate: MubCertificate | None = field(default=None)

    @property
    def exact(self) -> bool:
        return self.backend == "exact"

    def labels(self) -> list[tuple[int, int]]:
        return [(a, alpha) for a in range(len(self.bases)) for alpha in range(len(self.bases[a]))]

    def flat(self) -> list:
        return [v for basis in self.bases for v in basis]

    def matrix(self, a: int) -> np.ndarray:
        """Basis a as columns of a complex matrix."""
        return np.stack([_as_numpy(v) for v in self.bases[a]], axis=1)

    def to_json(self) -> dict:
        bases = []
        for basis in self.bases:
            out = []
            for alpha, vec in enumerate(basis):
                if isinstance(vec, RootVector):
                    out.append({"alpha": alpha, **vec.to_json()})
                else:
                    out.append({"alpha": alpha, "components": [[float(c.real), float(c.imag)] for c in vec]})
            bases.append(out)
        payload = {
            "d": self.d,
            "r": str(self.r) if isinstance(self.r, Fraction) else self.r,
            "backend": self.backend,
            "bases": bases,
        }
        if self.certificate is not None:
            payload["certificate"] = self.certificate.to_dict()
        return payload

    @classmethod
    def from_json(cls, obj: dict) -> "MubFamily":
        backend = obj["backend"]
        r = Fraction(obj["r"]) if isinstance(obj["r"], str) else obj["r"]
        bases = []
        for basis in obj["bases"]:
            vecs = []
            for item in sorted(basis, key=lambda x: x["alpha"]):
                if backend == "exact":
                    num, den = item["norm_sq"]
                    comps = [Cyclo.from_json(c) for c in item["components"]]
                    vecs.append(RootVector.from_scalars(comps, Fraction(num, den)))
                else:
                    vecs.append(np.array([complex(re, im) for re, im in item["components"]]))
            bases.append(vecs)
        return cls(obj["d"], r, backend, bases)


def _as_numpy(v) -> np.ndarray:
    return v.to_numpy() if isinstance(v, RootVector) else np.asarray(v, dtype=complex)


def build_mub_family(d: int, r=0, backend: str = "exact", check_prime: bool = True, certify: bool = True) -> MubFamily:
    """Bases a = 0..d-1 from the v_ra eigenvector formula, a = d computational."""
    if check_prime and not is_prime(d):
        raise NotPrimeError(f"d = {d} is not prime")
    if d < 2:
        raise ValueError("d must be at least 2")
    if backend not in ("exact", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    r_exact = _as_exact_r(r)
    if backend == "exact" and r_exact is None:
        warnings.warn(f"r = {r!r} is not rational; using the float backend", BackendDowngradeWarning, stacklevel=2)
        backend = "float"
    r_val = r_exact if backend == "exact" else float(r)

    bases = []
    for a in range(d):
        basis = []
        for alpha in range(d):
            turns = mub_phases(d, a, alpha, r_val)
            if backend == "exact":
                basis.append(RootVector.from_phases(turns, Fraction(1, d)))
            else:
                basis.append(np.exp(2j * np.pi * np.array(turns)) / math.sqrt(d))
        bases.append(basis)
    if backend == "exact":
        bases.append([RootVector.basis_vector(d, kk) for kk in range(d)])
    else:
        bases.append(list(np.eye(d, dtype=complex)))
    family = MubFamily(d, r_val, backend, bases)
    if certify:
        family.certificate = verify_unbiasedness(family)
    return family


def _target(d: int, a: int, alpha: int, b: int, beta: int) -> Fraction:
    """Required |<a alpha|b beta>|^2."""
    if a == b:
        return Fraction(int(alpha == beta))
    return Fraction(1, d)


def verify_unbiasedness(family: MubFamily) -> MubCertificate:
    """Check every overlap: delta within a basis, |.|^2 = 1/d across bases."""
    d = family.d
    labels = family.labels()
    vecs = family.flat()
    worst, worst_pair, pairs = 0.0, None, 0
    if family.exact:
        all_exact = True
        for i, (a, alpha) in enumerate(labels):
            for jdx in range(i, len(labels)):
                b, beta = labels[jdx]
                pairs += 1
                u, v = vecs[i], vecs[jdx]
                if a == b:
                    value = u.inner(v)
                    target = Fraction(int(alpha == beta))
                    if value is None:
                        value = u.overlap_sq(v)
                else:
                    value = u.overlap_sq(v)
                    target = Fraction(1, d)
                diff = value - target
                if diff:
                    all_exact = False
                    dev = abs(complex(diff))
                    if dev >= worst:
                        worst, worst_pair = dev, ((a, alpha), (b, beta))
        return MubCertificate(True, worst, all_exact, pairs, worst_pair)

    mat = np.stack([_as_numpy(v) for v in vecs], axis=1)
    gram = mat.conj().T @ mat
    n = len(labels)
    target = np.zeros((n, n))
    for i, (a, alpha) in enumerate(labels):
        for jdx, (b, beta) in enumerate(labels):
            target[i, jdx] = 1.0 if (a == b and alpha == beta) else (0.0 if a == b else 1.0 / d)
    same = np.array([[labels[i][0] == labels[jdx][0] for jdx in range(n)] for i in range(n)])
    dev = np.where(same, np.abs(gram - target), np.abs(np.abs(gram) ** 2 - target))
    i, jdx = np.unravel_index(np.argmax(dev), dev.shape)
    worst = float(dev[i, jdx])
    return MubCertificate(False, worst, worst <= MUB_FLOAT_TOL, n * (n + 1) // 2, (labels[i], labels[jdx]))


# --- projector embedding ---------------------------------------------------


def embedding_index(j: Fraction, m: Fraction, mp: Fraction) -> int:
    """1-based position i = (j+m)(2j+1) + j + m' + 1 of g_{m m'} in s."""
    i = (j + m) * (2 * j + 1) + j + mp + 1
    if i.denominator != 1:
        raise ValueError("m, m' must differ from j by integers")
    return int(i)


def _embedding_order(d: int) -> list[int]:
    """0-based s-position of each row-major (kk, kk') entry of |u><u|."""
    j = Fraction(d - 1, 2)
    return [embedding_index(j, j - kk, j - kp) - 1 for kk in range(d) for kp in range(d)]


@dataclass
class ProjectorEmbedding:
    d: int
    labels: list[tuple[int, int]]
    vectors: list  # RootVector of length d^2 (exact) or ndarray
    products: dict = field(default_factory=dict)
    worst_deviation: float = 0.0
    passed: bool = False


def embed_vector(vec, d: int):
    """s with s_i = g_{m m'} = <j,m|u><u|j,m'> placed by the index map."""
    pos = _embedding_order(d)
    if isinstance(vec, RootVector):
        order, flat = vec.outer_exponents()
        exps = [None] * (d * d)
        for src, dst in enumerate(pos):
            e = int(flat[src])
            exps[dst] = None if e < 0 else e
        return RootVector(order, exps, vec.scale_sq**2)
    u = np.asarray(vec, dtype=complex)
    g = np.outer(u, u.conj()).ravel()
    out = np.zeros(d * d, dtype=complex)
    out[pos] = g
    return out


def embedding_product(s, t):
    """s . t = sum_i conj(s_i) t_i (equals Tr(Pi_s Pi_t))."""
    if isinstance(s, RootVector):
        value = s.inner(t)
        if value is None:
            raise ValueError("embedded vectors must have rational norms")
        return value
    return complex(np.vdot(s, t))


def projector_embedding(family: MubFamily) -> ProjectorEmbedding:
    """Embed every |a alpha> and check s(a alpha).s(b beta) = delta delta + (1 - delta_ab)/d."""
    d = family.d
    labels = family.labels()
    vecs = [embed_vector(v, d) for v in family.flat()]
    products, worst, ok = {}, 0.0, True
    for i, (a, alpha) in enumerate(labels):
        for jdx in range(i, len(labels)):
            b, beta = labels[jdx]
            value = embedding_product(vecs[i], vecs[jdx])
            target = _target(d, a, alpha, b, beta)
            if family.exact:
                diff = value - target
                dev = abs(complex(diff)) if diff else 0.0
                ok = ok and not diff
            else:
                dev = abs(value - float(target))
                ok = ok and dev <= MUB_FLOAT_TOL
            worst = max(worst, dev)
            products[((a, alpha), (b, beta))] = value
    return ProjectorEmbedding(d, labels, vecs, products, worst, ok)


def gauss_identity_report(family: MubFamily) -> dict:
    """Compare d^2 s(a alpha).s(b beta) with |S(a-b, 2(beta-alpha) + d(b-a), d)|^2 for a, b < d."""
    if not family.exact:
        raise ValueError("the Gauss-sum identity is checked on the exact backend")
    d = family.d
    emb = projector_embedding(family)
    mismatches, checked = [], 0
    for ((a, alpha), (b, beta)), value in emb.products.items():
        if a == d or b == d:
            continue
        checked += 1
        _, s2 = gauss_sum(a - b, 2 * (beta - alpha) + d * (b - a), d)
        if value * (d * d) != s2:
            mismatches.append(((a, alpha), (b, beta)))
    return {"checked": checked, "mismatches": mismatches, "passed": not mismatches}


def overlap_table_csv(family: MubFamily) -> str:
    """a,alpha,b,beta,|<a alpha|b beta>|^2 (exact fractions on the exact backend)."""
    labels = family.labels()
    vecs = family.flat()
    lines = ["a,alpha,b,beta,overlap_sq"]
    for i, (a, alpha) in enumerate(labels):
        for jdx, (b, beta) in enumerate(labels):
            if family.exact:
                val = vecs[i].overlap_sq(vecs[jdx])
                text = str(val.as_fraction()) if val.is_rational() else repr(abs(complex(val)))
            else:
                text = repr(float(abs(np.vdot(vecs[i], vecs[jdx])) ** 2))
            lines.append(f"{a},{alpha},{b},{beta},{text}")
    return "\n".join(lines) + "\n"
