"""Generalized Weyl-Heisenberg algebra W_k(f) on a truncated boson x k-fermion space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

import numpy as np

from .cyclo import Cyclo
from .matrixcore import (
    EXACT,
    FLOAT,
    Operator,
    commutator,
    exact_or_bitwise_zero,
    q_commutator,
    residual_norm,
)
from .quon import Y_TYPE, build_quon_rep, deformation, q_factorial
from .report import RelationCheck, RelationReport

WH_TOL = 1e-12

Number = int | float | Fraction


class RepresentabilityError(ValueError):
    """A cumulative structure-function sum went negative."""

    def __init__(self, level: int, value):
        super().__init__(f"G(n) = {value} < 0 at level {level}: boson pair not representable")
        self.level = level
        self.value = value


@dataclass(frozen=True)
class StructureFunctions:
    """The set f = {f_s}, s = 0..k-1, each evaluable at any integer argument."""

    k: int
    funcs: tuple[Callable[[int], Number], ...]
    preset: str = "custom"
    params: tuple = ()

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if len(self.funcs) != self.k:
            raise ValueError(f"need {self.k} structure functions, got {len(self.funcs)}")

    def __call__(self, s: int, n: int) -> Number:
        return self.funcs[s % self.k](n)

    @classmethod
    def const1(cls, k: int) -> "StructureFunctions":
        return cls(k, tuple((lambda n: 1) for _ in range(k)), "const1", ())

    @classmethod
    def translational(cls, k: int, a: Number, b: Number) -> "StructureFunctions":
        a, b = _num(a), _num(b)
        return cls(k, tuple((lambda n: a * n + b) for _ in range(k)), "translational", (a, b))

    @classmethod
    def cyclic(cls, values: Sequence[Number]) -> "StructureFunctions":
        vals = tuple(_num(v) for v in values)
        return cls(len(vals), tuple((lambda n, v=v: v) for v in vals), "cyclic", vals)

    @classmethod
    def calogero_vasiliev(cls, c: Number) -> "StructureFunctions":
        c = _num(c)
        sf = cls.cyclic([1 + c, 1 - c])
        return cls(2, sf.funcs, "calogero", (c,))

    @classmethod
    def custom(cls, funcs: Sequence[Callable[[int], Number]]) -> "StructureFunctions":
        return cls(len(funcs), tuple(funcs), "custom", ())

    def cumulative(self, s: int, n: int) -> Number:
        """G_s(n) = f_s(0) + ... + f_s(n-1)."""
        return sum((self(s, t) for t in range(n)), 0)


def _num(v) -> Number:
    if isinstance(v, float) and v.is_integer():
        return int(v)
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, Rational):
        return Fraction(v)
    return float(v)


def _exact_sqrt(x) -> Fraction | None:
    if isinstance(x, float):
        return None
    fr = Fraction(x)
    rn, rd = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
    if rn * rn == fr.numerator and rd * rd == fr.denominator:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class BosonPair:
    b_minus: Operator
    b_plus: Operator
    number: Operator
    amplitudes: tuple  # sqrt(G(n)) for n = 1..L-1


def build_boson_pair(f_s: Callable[[int], Number], L: int, backend: str | None = None) -> BosonPair:
    """b+|n> = sqrt(G(n+1))|n+1>, b- = b+^dag, on Fock levels 0..L-1.

    ``backend=None`` chooses exact when every needed sqrt(G(n)) is rational.
    """
    if L < 2:
        raise ValueError("truncation must keep at least two levels")
    g_vals = []
    acc = 0
    for n in range(1, L + 1):
        acc = acc + f_s(n - 1)
        if acc < 0:
            raise RepresentabilityError(n, acc)
        g_vals.append(acc)
    needed = g_vals[: L - 1]
    roots = [_exact_sqrt(g) for g in needed]
    if backend is None:
        backend = EXACT if all(r is not None for r in roots) else FLOAT
    if backend == EXACT:
        if any(r is None for r in roots):
            raise ValueError("exact backend requested but some sqrt(G(n)) is irrational")
        amps = tuple(roots)
    else:
        amps = tuple(math.sqrt(float(g)) for g in needed)
    bp = Operator.zeros(L, backend)
    for n, amp in enumerate(amps):
        bp.data[n + 1, n] = Cyclo.coerce(amp) if backend == EXACT else amp
    return BosonPair(bp.dag().with_label("b-"), bp.with_label("b+"), Operator.diag(list(range(L)), backend, "N"), amps)


def build_projectors(k: int, flavor: str = Y_TYPE) -> tuple[Operator, list[Operator]]:
    """K = [f-, f+] and Pi_s = (1/k) sum_t q^(-st) K^t on the k-fermion factor (exact)."""
    rep = build_quon_rep(k, flavor)
    q = deformation(k)
    K = commutator(rep.a_minus, rep.a_plus).with_label("K")
    powers = [K**t for t in range(k)]
    projectors = []
    for s in range(k):
        acc = Operator.zeros(k, EXACT)
        for t in range(k):
            acc = acc + powers[t] * q ** (-s * t)
        projectors.append((acc * Fraction(1, k)).with_label(f"Pi_{s}"))
    return K, projectors


@dataclass
class WhRealization:
    """Matrices of W_k(f) on boson levels 0..L-1 tensored with the k-fermion space.

    Basis index is ``n_boson * k + n_fermion``.  ``K``, ``N`` and the
    projectors are always exact; ``X_minus``/``X_plus`` live on ``backend``.
    """

    f: StructureFunctions
    L: int
    backend: str
    fermion_flavor: str
    X_minus: Operator
    X_plus: Operator
    N: Operator
    K: Operator
    projectors: list[Operator]
    f_minus: Operator
    f_plus: Operator
    b_minus: Operator
    b_plus: Operator
    boson_number: Operator
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.f.k

    @property
    def dim(self) -> int:
        return self.L * self.f.k

    @property
    def interior(self) -> list[int]:
        """Basis indices with boson level <= L-1-k."""
        k = self.k
        return [nb * k + nf for nb in range(self.L - k) for nf in range(k)]

    @property
    def boundary(self) -> list[int]:
        k = self.k
        return [nb * k + nf for nb in range(self.L - k, self.L) for nf in range(k)]

    def on(self, op: Operator) -> Operator:
        """Cast an operator to the realization backend."""
        return op.to_float() if self.backend == FLOAT else op

    def export(self) -> dict:
        return {
            "k": self.k,
            "L": self.L,
            "preset": self.f.preset,
            "params": [str(p) for p in self.f.params],
            "backend": self.backend,
            "fermion_flavor": self.fermion_flavor,
            "interior_size": len(self.interior),
            "matrices": {
                "X_minus": self.X_minus.to_json(),
                "X_plus": self.X_plus.to_json(),
                "N": self.N.to_json(),
                "K": self.K.to_json(),
            },
        }


def build_wh_realization(
    f: StructureFunctions, L: int, backend: str | None = None, fermion_flavor: str = Y_TYPE
) -> WhRealization:
    """X- = b- (f- + f+^(k-1)/[k-1]_q!), X+ = b+ (...)^(k-1), b+- = sum_s b(s)+- Pi_s."""
    k = f.k
    pairs = [build_boson_pair(lambda n, s=s: f(s, n), L, backend) for s in range(k)]
    if backend is None:
        backend = EXACT if all(p.b_plus.is_exact for p in pairs) else FLOAT
    if backend == FLOAT:
        pairs = [BosonPair(p.b_minus.to_float(), p.b_plus.to_float(), p.number, p.amplitudes) for p in pairs]

    rep = build_quon_rep(k, fermion_flavor)
    K_f, proj_f = build_projectors(k, fermion_flavor)
    id_b = Operator.identity(L, EXACT)
    id_f = Operator.identity(k, EXACT)

    bracket = rep.a_minus + (rep.a_plus ** (k - 1)) / q_factorial(k - 1, k)
    bracket_km1 = bracket ** (k - 1)

    def lift_f(op: Operator) -> Operator:
        full = id_b.kron(op)
        return full.to_float() if backend == FLOAT else full

    b_minus = Operator.zeros(L * k, backend)
    b_plus = Operator.zeros(L * k, backend)
    for s in range(k):
        pi_s = proj_f[s] if backend == EXACT else proj_f[s].to_float()
        b_minus = b_minus + pairs[s].b_minus.kron(pi_s)
        b_plus = b_plus + pairs[s].b_plus.kron(pi_s)

    X_minus = (b_minus @ lift_f(bracket)).with_label("X-")
    X_plus = (b_plus @ lift_f(bracket_km1)).with_label("X+")
    boson_number = Operator.diag(list(range(L)), EXACT, "N_b")
    N = boson_number.kron(id_f).with_label("N")
    K = id_b.kron(K_f).with_label("K")
    projectors = [id_b.kron(p).with_label(p.label) for p in proj_f]
    return WhRealization(
        f=f,
        L=L,
        backend=backend,
        fermion_flavor=fermion_flavor,
        X_minus=X_minus,
        X_plus=X_plus,
        N=N,
        K=K,
        projectors=projectors,
        f_minus=lift_f(rep.a_minus).with_label("f-"),
        f_plus=lift_f(rep.a_plus).with_label("f+"),
        b_minus=b_minus.with_label("b-"),
        b_plus=b_plus.with_label("b+"),
        boson_number=boson_number,
    )


def diag_function(values: Sequence[Number], backend: str) -> Operator:
    if backend == EXACT:
        return Operator.diag([Fraction(v) if not isinstance(v, float) else v for v in values], EXACT)
    return Operator.diag([float(v) for v in values], FLOAT)


def structure_operator(w: WhRealization) -> Operator:
    """sum_s f_s(N) Pi_s on the full space."""
    k, L = w.k, w.L
    vals = [w.f(nf, nb) for nb in range(L) for nf in range(k)]
    backend = w.backend if not any(isinstance(v, float) for v in vals) else FLOAT
    return diag_function(vals, backend)


def _check(name: str, op: Operator, w: WhRealization, tol: float, interior: bool, exact: bool = False) -> RelationCheck:
    if interior:
        inner = residual_norm(op.submatrix(w.interior))
        outer = residual_norm(op.data).norm
        zero = exact_or_bitwise_zero(op.submatrix(w.interior))
        return RelationCheck(name, inner.norm, 0.0 if exact else tol, exact_zero=zero, scope="interior", boundary_residual=outer)
    res = residual_norm(op)
    return RelationCheck(name, res.norm, 0.0 if exact else tol, exact_zero=exact_or_bitwise_zero(op), scope="full")


def verify_wh(w: WhRealization, tol: float = WH_TOL) -> RelationReport:
    k = w.k
    q = deformation(k)
    exact = w.backend == EXACT
    K, N = w.K, w.N
    Kb, Nb = w.on(K), w.on(N)
    Xm, Xp = w.X_minus, w.X_plus
    ident = Operator.identity(w.dim, EXACT)
    report = RelationReport(
        f"W_{k}(f) relations",
        meta={"k": k, "L": w.L, "preset": w.f.preset, "backend": w.backend, "interior_size": len(w.interior)},
    )
    # (WH1)
    report.add(_check("X+ = X-^dag", Xp - Xm.dag(), w, tol, interior=False, exact=exact))
    report.add(_check("N = N^dag", N - N.dag(), w, tol, interior=False, exact=True))
    report.add(_check("K K^dag = I", K @ K.dag() - ident, w, tol, interior=False, exact=True))
    report.add(_check("K^dag K = I", K.dag() @ K - ident, w, tol, interior=False, exact=True))
    report.add(_check("K^k = I", K**k - ident, w, tol, interior=False, exact=True))
    # (WH2)
    proj_sum = Operator.zeros(w.dim, EXACT)
    for s in range(k):
        proj_sum = proj_sum + w.projectors[s]
    report.add(_check("sum_s Pi_s = I", proj_sum - ident, w, tol, interior=False, exact=True))
    rhs = structure_operator(w)
    rhs = rhs if rhs.backend == Xm.backend else rhs.to_float()
    report.add(_check("[X-,X+] = sum_s f_s(N) Pi_s", commutator(Xm, Xp) - rhs, w, tol, interior=True, exact=exact))
    # (WH3)
    report.add(_check("[N,X+] = X+", commutator(Nb, Xp) - Xp, w, tol, interior=True, exact=exact))
    report.add(_check("[N,X-] = -X-", commutator(Nb, Xm) + Xm, w, tol, interior=True, exact=exact))
    report.add(_check("[K,X+]_q = 0", q_commutator(Kb, Xp, q), w, tol, interior=True, exact=exact))
    report.add(_check("[K,X-]_(1/q) = 0", q_commutator(Kb, Xm, q.inverse()), w, tol, interior=True, exact=exact))
    report.add(_check("[K,N] = 0", commutator(K, N), w, tol, interior=False, exact=True))
    return report


def grade_of(index: int, k: int) -> int:
    return index % k


def grade_shift_violations(op: Operator, k: int, shift: int) -> float:
    """Largest |entry| of op connecting fermion grades t -> s with s != t + shift (mod k)."""
    data = op.to_numpy()
    idx = np.arange(op.dim)
    rows = idx[:, None] % k
    cols = idx[None, :] % k
    bad = (rows - cols - shift) % k != 0
    return float(np.max(np.abs(data[bad]), initial=0.0))
