"""SU(2) from two commuting quon algebras: polar decomposition j+ = h v.

States |n1, n2) of F_x (x) F_y have index ``n1 * k + n2``.  On the
constant angular momentum subspace eps(j), n1 + n2 = k - 1, the basis is
ordered by kk = j - m = n2 = 0..d-1 (so m runs from j down to -j).
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .cyclo import RootVector, exp2pi
from .matrixcore import EXACT, FLOAT, Operator, commutator, exact_or_bitwise_zero, residual_norm
from .quon import X_TYPE, Y_TYPE, build_quon_rep, q_factorial
from .report import RelationCheck, RelationReport

SU2_TOL = 1e-10
UNITARY_TOL = 1e-12
FLOAT_GROUP_TOL = 1e-8


@dataclass(frozen=True)
class PolarParams:
    k: int
    a: Rational | float = 0
    r: Rational | float = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        for name in ("a", "r"):
            v = getattr(self, name)
            if isinstance(v, Rational):
                object.__setattr__(self, name, Fraction(v))
            else:
                object.__setattr__(self, name, float(v))

    @property
    def d(self) -> int:
        return self.k

    @property
    def j(self) -> Fraction:
        return Fraction(self.k - 1, 2)

    @property
    def phi_r(self) -> float:
        return math.pi * (self.k - 1) * float(self.r)

    @property
    def exact(self) -> bool:
        return isinstance(self.a, Fraction) and isinstance(self.r, Fraction)

    @property
    def backend(self) -> str:
        return EXACT if self.exact else FLOAT


def _turns(x, p: PolarParams):
    """Phase exp(2 pi i * x) as an exact scalar or a complex number."""
    if p.exact:
        return exp2pi(Fraction(x))
    return cmath.exp(2j * math.pi * float(x))


def q_power(x, p: PolarParams):
    """q^x with q = exp(2 pi i / k), principal branch for non-integer x."""
    if p.exact:
        return _turns(Fraction(x) / p.k, p)
    return _turns(float(x) / p.k, p)


def eps_indices(k: int) -> list[int]:
    """Full-space indices of |j, m>, ordered by kk = j - m = 0..k-1."""
    return [(k - 1 - kk) * k + kk for kk in range(k)]


@dataclass
class PolarOperators:
    params: PolarParams
    h: Operator
    s_x: Operator
    s_y: Operator
    v: Operator
    h_eps: Operator
    v_eps: Operator
    eps: list[int]

    def index_map(self) -> list[dict]:
        """(n1, n2) <-> (J, M) for the eps(j) basis."""
        k = self.params.k
        out = []
        for kk, idx in enumerate(self.eps):
            n1, n2 = divmod(idx, k)
            out.append({"kk": kk, "n1": n1, "n2": n2, "J": str(Fraction(n1 + n2, 2)), "M": str(Fraction(n1 - n2, 2))})
        return out


def build_polar_ops(p: PolarParams) -> PolarOperators:
    """h = sqrt(N_x (N_y + 1)) and v = s_x s_y on F_x (x) F_y."""
    k, backend = p.k, p.backend
    rx = build_quon_rep(k, X_TYPE)
    ry = build_quon_rep(k, Y_TYPE)
    idk = Operator.identity(k, EXACT)
    cast = (lambda op: op) if backend == EXACT else (lambda op: op.to_float())

    x_plus = cast(rx.a_plus.kron(idk))
    x_wrap = cast(((rx.a_minus ** (k - 1)) / q_factorial(k - 1, k)).kron(idk))
    y_minus = cast(idk.kron(ry.a_minus))
    y_wrap = cast(idk.kron((ry.a_plus ** (k - 1)) / q_factorial(k - 1, k)))

    n1 = np.repeat(np.arange(k), k)
    n2 = np.tile(np.arange(k), k)
    half = Fraction(1, 2) if p.exact else 0.5
    phase_sum = Operator.diag([q_power(p.a * int(a + b) * half, p) for a, b in zip(n1, n2)], backend)
    phase_diff = Operator.diag([q_power(-p.a * int(a - b) * half, p) for a, b in zip(n1, n2)], backend)
    wrap_phase = _turns((k - 1) * p.r * half * half, p)  # exp(i phi_r / 2)

    s_x = (phase_sum @ x_plus + x_wrap * wrap_phase).with_label("s_x")
    s_y = (y_minus @ phase_diff + y_wrap * wrap_phase).with_label("s_y")
    v = (s_x @ s_y).with_label("v_ra")
    h = Operator.diag([math.sqrt(int(a) * int(b + 1)) for a, b in zip(n1, n2)], FLOAT, "h")

    eps = eps_indices(k)
    h_eps = h.compress(eps).with_label("h|eps")
    v_eps = v.compress(eps).with_label("v|eps")
    return PolarOperators(p, h, s_x, s_y, v, h_eps, v_eps, eps)


def leakage(op: Operator, eps: list[int]) -> tuple[float, bool]:
    """Norm of (1 - P_eps) op P_eps and whether it is exactly zero."""
    outside = [i for i in range(op.dim) if i not in set(eps)]
    block = op.submatrix(outside, eps)
    return residual_norm(block).norm, exact_or_bitwise_zero(block)


def unitarity_residual(op: Operator) -> float:
    return residual_norm(op.dag() @ op - Operator.identity(op.dim, op.backend)).norm


@dataclass
class Su2Generators:
    j: Fraction
    j_plus: Operator
    j_minus: Operator
    j_z: Operator
    casimir: Operator


def build_su2_generators(ops: PolarOperators) -> Su2Generators:
    """j+ = h v, j- = v^dag h, jz = (h^2 - v^dag h^2 v)/2 on eps(j)."""
    h = ops.h_eps
    v = ops.v_eps.to_float()
    h2 = h @ h
    jp = (h @ v).with_label("j+")
    jm = (v.dag() @ h).with_label("j-")
    jz = ((h2 - v.dag() @ h2 @ v) * 0.5).with_label("jz")
    casimir = (jz @ jz + (jp @ jm + jm @ jp) * 0.5).with_label("j^2")
    return Su2Generators(ops.params.j, jp, jm, jz, casimir)


def verify_su2(gen: Su2Generators, tol: float = SU2_TOL) -> RelationReport:
    jp, jm, jz = gen.j_plus, gen.j_minus, gen.j_z
    d = jz.dim
    ident = Operator.identity(d, FLOAT)
    report = RelationReport(f"su(2) relations j={gen.j}", meta={"j": str(gen.j)})
    report.add(RelationCheck("[jz,j+] = j+", residual_norm(commutator(jz, jp) - jp).norm, tol))
    report.add(RelationCheck("[jz,j-] = -j-", residual_norm(commutator(jz, jm) + jm).norm, tol))
    report.add(RelationCheck("[j+,j-] = 2jz", residual_norm(commutator(jp, jm) - jz * 2).norm, tol))
    report.add(RelationCheck("j- = j+^dag", residual_norm(jm - jp.dag()).norm, tol))
    expected = np.array([float(gen.j) - kk for kk in range(d)])
    jz_data = jz.to_numpy()
    diag_dev = np.max(np.abs(np.diag(jz_data) - expected))
    off = np.max(np.abs(jz_data - np.diag(np.diag(jz_data))), initial=0.0)
    report.add(RelationCheck("spec(jz) = {j, j-1, ..., -j}", float(max(diag_dev, off)), tol))
    jj = float(gen.j * (gen.j + 1))
    report.add(RelationCheck("j^2 = j(j+1) I", residual_norm(gen.casimir - ident * jj).norm, tol))
    return report


# --- eigenbasis of v_ra on eps(j) -----------------------------------------


def _eigen_exponents(p: PolarParams, alpha: int, form: str) -> list:
    """Exponents x_kk of q in the coefficient of |kk> (kk = j - m)."""
    d, j = p.d, p.j
    if not isinstance(alpha, int) or not 0 <= alpha < d:
        raise ValueError(f"alpha must be in 0..{d - 1}, got {alpha}")
    a, r = p.a, p.r
    if not p.exact:
        j = float(j)
    out = []
    for kk in range(d):
        if form == "kk":
            x = (d - kk - 1) * (kk + 1) * a / 2 + j * (kk - j) * r - (kk + 1) * alpha
        elif form == "jm":
            m = j - kk
            x = (j + m) * (j - m + 1) * a / 2 - j * m * r + (j + m) * alpha
        else:
            raise ValueError(f"unknown form {form!r}")
        out.append(x)
    return out


def vra_eigenbasis(p: PolarParams, alpha: int, form: str = "kk") -> RootVector | np.ndarray:
    """|a alpha> on eps(j) in the kk order; ``form`` selects the (j, m) or kk indexing.

    Exact parameters give a RootVector (components q^x / sqrt(d)); otherwise a
    complex numpy vector.
    """
    xs = _eigen_exponents(p, alpha, form)
    if p.exact:
        return RootVector.from_phases([Fraction(x) / p.d for x in xs], Fraction(1, p.d))
    return np.exp(2j * np.pi * np.array(xs, dtype=float) / p.d) / math.sqrt(p.d)


def vra_eigenvalue(p: PolarParams, alpha: int):
    """Eigenvalue q^(a(d-1)/2 + j r - alpha) of v|eps on |a alpha>."""
    if p.exact:
        return q_power(p.a * (p.d - 1) / 2 + p.j * p.r - alpha, p)
    return q_power(float(p.a) * (p.d - 1) / 2 + float(p.j) * float(p.r) - alpha, p)


def eigenbasis_matrix(p: PolarParams, form: str = "kk") -> np.ndarray:
    """Columns are the d eigenvectors as complex vectors."""
    cols = []
    for alpha in range(p.d):
        vec = vra_eigenbasis(p, alpha, form)
        cols.append(vec.to_numpy() if isinstance(vec, RootVector) else vec)
    return np.stack(cols, axis=1)


def eigenbasis_to_json(p: PolarParams) -> list[dict]:
    out = []
    for alpha in range(p.d):
        vec = vra_eigenbasis(p, alpha)
        if isinstance(vec, RootVector):
            out.append({"alpha": alpha, **vec.to_json()})
        else:
            out.append({"alpha": alpha, "components": [[float(c.real), float(c.imag)] for c in vec]})
    return out


# --- z and the Pauli group -------------------------------------------------


def build_z(p: PolarParams, backend: str | None = None) -> Operator:
    """z|j, m> = q^(j-m)|j, m>, i.e. diag(q^kk)."""
    vals = [exp2pi(Fraction(kk, p.d)) for kk in range(p.d)]
    z = Operator.diag(vals, EXACT, "z")
    if (backend or p.backend) == FLOAT:
        z = z.to_float()
    return z


def group_commutator(z: Operator, v: Operator) -> Operator:
    return z @ v @ z.dag() @ v.dag()


@dataclass
class GroupReport:
    order: int
    closed: bool
    generators: list[str]
    cap: int
    elements: list[Operator] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"order": self.order, "generators": self.generators, "closed": self.closed, "cap": self.cap}


def _exact_key(op: Operator):
    return tuple(op.data.ravel().tolist())


def pauli_closure(z: Operator, v: Operator, cap: int = 100_000, keep_elements: bool = False) -> GroupReport:
    """Breadth-first closure of {z, v, z^-1, v^-1}.

    Exact operators are compared exactly; float operators entrywise within
    1e-8 with no global-phase normalization.
    """
    for name, op in (("z", z), ("v", v)):
        if unitarity_residual(op) > SU2_TOL:
            raise ValueError(f"{name} is not unitary")
    if z.backend != v.backend:
        z, v = z.to_float(), v.to_float()
    gens = [z, v, z.dag(), v.dag()]
    labels = ["z", "v", "z^-1", "v^-1"]
    ident = Operator.identity(z.dim, z.backend)
    exact = z.is_exact

    elements = [ident]
    if exact:
        seen = {_exact_key(ident)}

        def is_new(op):
            key = _exact_key(op)
            if key in seen:
                return False
            seen.add(key)
            return True

    else:
        stack = [ident.data]

        def is_new(op):
            for other in stack:
                if np.max(np.abs(other - op.data)) <= FLOAT_GROUP_TOL:
                    return False
            stack.append(op.data)
            return True

    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for gen in gens:
            h = g @ gen
            if is_new(h):
                elements.append(h)
                if len(elements) > cap:
                    return GroupReport(len(elements), False, labels, cap, elements if keep_elements else [])
                queue.append(h)
    return GroupReport(len(elements), True, labels, cap, elements if keep_elements else [])
