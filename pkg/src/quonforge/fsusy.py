"""Fractional supersymmetric systems (H, Q)_k built from a W_k(f) realization."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .matrixcore import (
    EXACT,
    FLOAT,
    DEGENERACY_TOL,
    Operator,
    anticommutator,
    commutator,
    exact_or_bitwise_zero,
    group_levels,
    hermitian_spectrum,
    residual_norm,
)
from .quon import deformation
from .report import RelationCheck, RelationReport
from .weylheis import WhRealization, diag_function

SUSY_TOL = 1e-10
CLOSED_FORM_TOL = 1e-12


class TruncationError(ValueError):
    pass


@dataclass
class SusySystem:
    realization: WhRealization
    Q_minus: Operator
    Q_plus: Operator
    H: Operator
    argument_range: tuple[int, int]
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.realization.k

    @property
    def dim(self) -> int:
        return self.realization.dim

    @property
    def interior(self) -> list[int]:
        return self.realization.interior

    def projector(self, s: int) -> Operator:
        """Pi_s on the system backend, with Pi_k = Pi_0."""
        return self.realization.on(self.realization.projectors[s % self.k])


def build_supercharges(w: WhRealization) -> tuple[Operator, Operator]:
    """Q- = X-(1 - Pi_1), Q+ = X+(1 - Pi_0)."""
    ident = w.on(Operator.identity(w.dim, EXACT))
    q_minus = w.X_minus @ (ident - w.on(w.projectors[1]))
    q_plus = w.X_plus @ (ident - w.on(w.projectors[0]))
    return q_minus.with_label("Q-"), q_plus.with_label("Q+")


def _shifted_terms(w: WhRealization) -> tuple[dict[int, list[tuple[int, int]]], tuple[int, int]]:
    """Per-grade list of (coefficient, t, shift) terms of the H correction sums.

    Returns {s mod k: [(coeff, t, shift)]} with f_t evaluated at N + shift, and
    the (min, max) shifted argument over the truncated space.
    """
    k, L = w.k, w.L
    terms: dict[int, list] = {s: [] for s in range(k)}
    # - sum_{s=3}^{k} sum_{t=2}^{s-1} (t-1) f_t(N-s+t) Pi_s
    for s in range(3, k + 1):
        for t in range(2, s):
            terms[s % k].append((-(t - 1), t, t - s))
    # - sum_{s=1}^{k-1} sum_{t=s}^{k-1} (t-k) f_t(N-s+t) Pi_s
    for s in range(1, k):
        for t in range(s, k):
            terms[s].append((-(t - k), t, t - s))
    shifts = [sh for lst in terms.values() for (_, _, sh) in lst]
    lo = min(shifts, default=0)
    hi = max(shifts, default=0)
    return terms, (lo, L - 1 + hi)


def build_hamiltonian(w: WhRealization) -> tuple[Operator, tuple[int, int]]:
    """H = (k-1) X+X- - (shifted structure-function sums) Pi_s."""
    k, L = w.k, w.L
    terms, arg_range = _shifted_terms(w)
    diag_vals = []
    for nb in range(L):
        for nf in range(k):
            total = 0
            for coeff, t, shift in terms[nf]:
                total = total + coeff * w.f(t, nb + shift)
            diag_vals.append(total)
    backend = w.backend
    if backend == EXACT and any(isinstance(v, float) for v in diag_vals):
        backend = FLOAT
    kinetic = (w.X_plus @ w.X_minus) * (k - 1)
    if backend == FLOAT:
        kinetic = kinetic.to_float()
    correction = diag_function(diag_vals, backend)
    return (kinetic + correction).with_label("H"), arg_range


def build_susy_system(w: WhRealization) -> SusySystem:
    q_minus, q_plus = build_supercharges(w)
    H, arg_range = build_hamiltonian(w)
    if H.backend != q_minus.backend:
        q_minus, q_plus = q_minus.to_float(), q_plus.to_float()
    return SusySystem(w, q_minus, q_plus, H, arg_range, meta={"shifted_argument_range": list(arg_range)})


def _interior_check(name, op: Operator, sys: SusySystem, tol: float) -> RelationCheck:
    inner = op.submatrix(sys.interior)
    return RelationCheck(
        name,
        residual_norm(inner).norm,
        tol,
        exact_zero=exact_or_bitwise_zero(inner),
        scope="interior",
        boundary_residual=residual_norm(op.data).norm,
    )


def verify_fsusy(sys: SusySystem, tol: float = SUSY_TOL) -> RelationReport:
    k = sys.k
    qm, qp, H = sys.Q_minus, sys.Q_plus, sys.H
    report = RelationReport(
        f"(H, Q)_{k} relations",
        meta={"k": k, "L": sys.realization.L, "preset": sys.realization.f.preset, "backend": H.backend, **sys.meta},
    )
    for name, op in (("Q-^k = 0", qm**k), ("Q+^k = 0", qp**k)):
        report.add(RelationCheck(name, residual_norm(op).norm, 0.0, exact_zero=exact_or_bitwise_zero(op)))
    for name, op in (("Q+ = Q-^dag", qp - qm.dag()), ("H = H^dag", H - H.dag())):
        report.add(RelationCheck(name, residual_norm(op).norm, tol, exact_zero=exact_or_bitwise_zero(op)))
    lhs = Operator.zeros(sys.dim, H.backend)
    for s in range(k):
        lhs = lhs + qm ** (k - 1 - s) @ qp @ qm**s
    report.add(_interior_check("sum_s Q-^(k-1-s) Q+ Q-^s = Q-^(k-2) H", lhs - qm ** (k - 2) @ H, sys, tol))
    report.add(_interior_check("[H,Q-] = 0", commutator(H, qm), sys, tol))
    report.add(_interior_check("[H,Q+] = 0", commutator(H, qp), sys, tol))
    return report


def grade_indices(sys: SusySystem, grade: int, interior: bool = False) -> list[int]:
    k = sys.k
    pool = sys.interior if interior else range(sys.dim)
    return [i for i in pool if i % k == grade % k]


@dataclass
class GradedComponent:
    grade: int
    label: str
    dim: int
    interior_eigenvalues: np.ndarray


@dataclass
class GradedDecomposition:
    components: list[GradedComponent]
    matches: dict[tuple[int, int], dict]
    grade_leak: float

    def to_dict(self) -> dict:
        return {
            "components": [
                {"grade": c.grade, "label": c.label, "dim": c.dim, "interior_eigenvalues": c.interior_eigenvalues.tolist()}
                for c in self.components
            ],
            "matches": {f"{a}-{b}": m for (a, b), m in self.matches.items()},
            "grade_leak": self.grade_leak,
        }


def _greedy_match(xs, ys, tol=DEGENERACY_TOL):
    ys_left = list(ys)
    matched, only_x = [], []
    for x in xs:
        hit = next((i for i, y in enumerate(ys_left) if abs(x - y) <= tol), None)
        if hit is None:
            only_x.append(float(x))
        else:
            matched.append(float(x))
            ys_left.pop(hit)
    return matched, only_x, [float(y) for y in ys_left]


def decompose_grading(sys: SusySystem) -> GradedDecomposition:
    """Compress H to each grade; compare interior spectra pairwise."""
    k = sys.k
    comps = []
    for s in range(k):
        grade = (k - s) % k
        idx = grade_indices(sys, grade, interior=True)
        vals = hermitian_spectrum(sys.H.compress(idx)).eigenvalues
        comps.append(GradedComponent(grade, f"H_{k - s}", len(grade_indices(sys, grade)), vals))
    matches = {}
    for i in range(k):
        for j in range(i + 1, k):
            a, b = comps[i], comps[j]
            both, only_a, only_b = _greedy_match(a.interior_eigenvalues, b.interior_eigenvalues)
            matches[(a.grade, b.grade)] = {"matched": both, f"only_{a.grade}": only_a, f"only_{b.grade}": only_b}
    # H must not connect different grades
    data = sys.H.to_numpy()
    gr = np.arange(sys.dim) % k
    off = gr[:, None] != gr[None, :]
    sub = np.ix_(sys.interior, sys.interior)
    leak = float(np.max(np.abs(np.where(off, data, 0)[sub]), initial=0.0))
    return GradedDecomposition(comps, matches, leak)


@dataclass
class SpectrumReport:
    levels: list[tuple[float, int]]
    equally_spaced: bool
    spacing: float | None
    reliable_below: float

    @property
    def degeneracies(self) -> list[int]:
        return [m for _, m in self.levels]

    def to_dict(self) -> dict:
        return {
            "levels": [{"energy": e, "degeneracy": m} for e, m in self.levels],
            "equally_spaced": self.equally_spaced,
            "spacing": self.spacing,
            "reliable_below": self.reliable_below,
        }

    def to_csv(self) -> str:
        return "energy,degeneracy\n" + "".join(f"{e!r},{m}\n" for e, m in self.levels)


def spectrum_report(sys: SusySystem, levels: int) -> SpectrumReport:
    """Lowest ``levels`` interior levels of H with degeneracies.

    A level is accepted only if it lies below every eigenvalue supported on
    the truncation boundary; otherwise boundary states could be missing.
    """
    L, k = sys.realization.L, sys.k
    if levels > L - k:
        raise TruncationError(f"levels={levels} exceeds L-k={L - k}")
    interior = sys.interior
    boundary = [i for i in range(sys.dim) if i not in set(interior)]
    vals = hermitian_spectrum(sys.H.compress(interior)).eigenvalues
    bvals = hermitian_spectrum(sys.H.compress(boundary)).eigenvalues
    ceiling = float(np.min(bvals)) if len(bvals) else float("inf")
    grouped = group_levels(vals)
    grouped = [lv for lv in grouped if lv[0] < ceiling - DEGENERACY_TOL]
    if len(grouped) < levels:
        raise TruncationError(f"only {len(grouped)} levels below the truncation boundary; increase L")
    chosen = grouped[:levels]
    gaps = np.diff([e for e, _ in chosen])
    spacing = float(gaps[0]) if len(gaps) else None
    equal = bool(len(gaps) == 0 or np.all(np.abs(gaps - gaps[0]) <= DEGENERACY_TOL))
    return SpectrumReport(chosen, equal, spacing, ceiling)


def witten_check(sys: SusySystem, tol: float = SUSY_TOL, closed_tol: float = CLOSED_FORM_TOL) -> RelationReport:
    """k = 2: S = Q- + Q+, P = Pi_1 - Pi_0; Witten's relations and Q+- = S(1 +- P)/2."""
    if sys.k != 2:
        raise ValueError("the Witten reduction applies to k = 2 only")
    qm, qp, H = sys.Q_minus, sys.Q_plus, sys.H
    backend = H.backend
    ident = Operator.identity(sys.dim, backend)
    S = (qm + qp).with_label("S")
    pi0_exact, pi1_exact = sys.realization.projectors[0], sys.realization.projectors[1]
    P_exact = pi1_exact - pi0_exact
    P = P_exact if backend == EXACT else P_exact.to_float()
    report = RelationReport("Witten k=2 relations", meta={"L": sys.realization.L, "preset": sys.realization.f.preset, "P": "Pi_1 - Pi_0"})
    report.add(RelationCheck("S = S^dag", residual_norm(S - S.dag()).norm, tol))
    report.add(_interior_check("H = S^2", H - S @ S, sys, tol))
    report.add(RelationCheck("{S,P} = 0", residual_norm(anticommutator(S, P)).norm, tol))
    id_exact = Operator.identity(sys.dim, EXACT)
    report.add(RelationCheck("P^2 = I", residual_norm(P_exact @ P_exact - id_exact).norm, 0.0, exact_zero=(P_exact @ P_exact - id_exact).is_zero()))
    report.add(RelationCheck("P = P^dag", residual_norm(P_exact - P_exact.dag()).norm, 0.0, exact_zero=(P_exact - P_exact.dag()).is_zero()))
    half = Fraction(1, 2) if backend == EXACT else 0.5
    report.add(RelationCheck("S(1+P)/2 = Q+", residual_norm((S @ (ident + P)) * half - qp).norm, closed_tol))
    report.add(RelationCheck("S(1-P)/2 = Q-", residual_norm((S @ (ident - P)) * half - qm).norm, closed_tol))
    return report


# --- Z3 oscillator closed forms -------------------------------------------


def z3_closed_forms(sys: SusySystem, tol: float = CLOSED_FORM_TOL) -> RelationReport:
    """Compare the k = 3, f = 1 construction with its fermion/boson closed forms."""
    w = sys.realization
    if sys.k != 3 or w.f.preset != "const1":
        raise ValueError("closed forms hold for k = 3 with f_s = 1")
    q = deformation(3)
    to = w.on
    fm, fp = w.f_minus, w.f_plus
    bm, bp = w.b_minus, w.b_plus
    ident = to(Operator.identity(w.dim, EXACT))
    pi = [sys.projector(s) for s in range(3)]
    XpXm = sys.realization.X_plus @ sys.realization.X_minus

    qm_closed = bm @ fp @ (fm @ fm - fp * q)
    qp_closed = bp @ (fm - (fp @ fp) * q) @ fm
    h_graded = (XpXm * 2 - ident) @ pi[0] + (XpXm * 2 + ident) @ pi[2] + (XpXm * 2 + ident * 3) @ pi[1]
    fpfm = fp @ fm
    h_modes = bp @ bm * 2 - ident + fpfm * (2 * (1 - 2 * q)) + (fpfm @ fpfm) * (2 * (1 + 2 * q))
    q_alt_minus = w.X_minus @ (pi[0] + pi[2])
    q_alt_plus = w.X_plus @ (pi[1] + pi[2])

    report = RelationReport("Z3 oscillator closed forms", meta={"L": w.L})
    for name, a, b in (
        ("Q- = b- f+ (f-^2 - q f+)", sys.Q_minus, qm_closed),
        ("Q+ = b+ (f- - q f+^2) f-", sys.Q_plus, qp_closed),
        ("Q- = X-(Pi_0 + Pi_2)", sys.Q_minus, q_alt_minus),
        ("Q+ = X+(Pi_1 + Pi_2)", sys.Q_plus, q_alt_plus),
        ("H = (2X+X- - 1)Pi_3 + (2X+X- + 1)Pi_2 + (2X+X- + 3)Pi_1", sys.H, h_graded),
        ("H = 2b+b- - 1 + 2(1-2q)f+f- + 2(1+2q)f+f-f+f-", sys.H, h_modes),
    ):
        a = a if a.backend == b.backend else a.to_float()
        b = b if a.backend == b.backend else b.to_float()
        report.add(RelationCheck(name, residual_norm(a - b).norm, tol))
    return report
