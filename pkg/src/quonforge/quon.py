"""q-numbers and the two k-dimensional quon representations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

from .cyclo import ONE, ZERO, Cyclo, root_of_unity
from .matrixcore import (
    EXACT,
    Operator,
    commutator,
    exact_or_bitwise_zero,
    q_commutator,
    residual_norm,
)
from .report import RelationCheck, RelationReport

X_TYPE = "x"
Y_TYPE = "y"


class QFactorialWarning(RuntimeWarning):
    pass


def deformation(k: int) -> Cyclo:
    """q = exp(2 pi i / k)."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    return root_of_unity(k, 1)


def half_deformation(k: int) -> Cyclo:
    """Principal square root of q, realised at order 2k."""
    return root_of_unity(2 * k, 1)


@lru_cache(maxsize=None)
def q_number(n: int, k: int) -> Cyclo:
    """[n]_q = 1 + q + ... + q^(n-1) at q = exp(2 pi i/k)."""
    if n < 0:
        raise ValueError("q-numbers are defined here for n >= 0")
    q = deformation(k)
    total = ZERO
    for t in range(n):
        total = total + q**t
    return total


@lru_cache(maxsize=None)
def q_factorial(n: int, k: int) -> Cyclo:
    """[n]_q! = [1]_q ... [n]_q; exactly zero once n >= k."""
    if n >= k:
        warnings.warn(f"[{n}]_q! vanishes for k = {k} (factor [k]_q = 0)", QFactorialWarning, stacklevel=2)
    result = ONE
    for m in range(1, n + 1):
        result = result * q_number(m, k)
    return result


@dataclass(frozen=True)
class QuonRep:
    k: int
    flavor: str
    a_minus: Operator
    a_plus: Operator
    n_op: Operator

    @property
    def q(self) -> Cyclo:
        return deformation(self.k)


@lru_cache(maxsize=None)
def build_quon_rep(k: int, flavor: str = X_TYPE) -> QuonRep:
    """x-type: a+|n> = |n+1>, a-|n> = [n]|n-1>; y-type: a+|n> = [n+1]|n+1>, a-|n> = |n-1>."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if flavor not in (X_TYPE, Y_TYPE):
        raise ValueError(f"unknown flavor {flavor!r}")
    ap = Operator.zeros(k, EXACT)
    am = Operator.zeros(k, EXACT)
    for n in range(k - 1):
        if flavor == X_TYPE:
            ap.data[n + 1, n] = ONE
            am.data[n, n + 1] = q_number(n + 1, k)
        else:
            ap.data[n + 1, n] = q_number(n + 1, k)
            am.data[n, n + 1] = ONE
    n_op = Operator.diag(list(range(k)), EXACT, "N")
    return QuonRep(k, flavor, am.with_label(f"a-({flavor})"), ap.with_label(f"a+({flavor})"), n_op)


def _exact_check(name: str, op: Operator, scope: str = "full") -> RelationCheck:
    res = residual_norm(op)
    return RelationCheck(name, res.norm, 0.0, exact_zero=exact_or_bitwise_zero(op), scope=scope)


def verify_quon_relations(rep: QuonRep) -> RelationReport:
    """Residuals of [a-, a+]_q = I, [N, a+-] = +-a+-, a+-^k = 0, N^dag = N."""
    k, q = rep.k, rep.q
    ident = Operator.identity(k, rep.a_minus.backend)
    report = RelationReport(f"quon relations k={k} ({rep.flavor}-type)", meta={"k": k, "flavor": rep.flavor})
    report.add(_exact_check("[a-,a+]_q = I", q_commutator(rep.a_minus, rep.a_plus, q) - ident))
    report.add(_exact_check("[N,a+] = a+", commutator(rep.n_op, rep.a_plus) - rep.a_plus))
    report.add(_exact_check("[N,a-] = -a-", commutator(rep.n_op, rep.a_minus) + rep.a_minus))
    report.add(_exact_check("a+^k = 0", rep.a_plus**k))
    report.add(_exact_check("a-^k = 0", rep.a_minus**k))
    report.add(_exact_check("N^dag = N", rep.n_op.dag() - rep.n_op))
    return report


def verify_kfermion_cross(rep: QuonRep, half_q: Cyclo) -> RelationReport:
    """Report (never assert) a- a+^dag - q^(-1/2) a+^dag a- and its mirror."""
    half_q = Cyclo.coerce(half_q)
    if half_q * half_q != rep.q:
        raise ValueError("half_q must square to q")
    am, ap = rep.a_minus, rep.a_plus
    apd, amd = ap.dag(), am.dag()
    report = RelationReport(f"k-fermion cross relation k={rep.k} ({rep.flavor}-type)", meta={"k": rep.k, "flavor": rep.flavor, "half_q": half_q.to_json()})
    for name, op in (
        ("a- a+^+ - q^(-1/2) a+^+ a-", am @ apd - (apd @ am) * half_q.inverse()),
        ("a+ a-^+ - q^(1/2) a-^+ a+", ap @ amd - (amd @ ap) * half_q),
    ):
        res = residual_norm(op)
        report.add(RelationCheck(name, res.norm, 0.0, exact_zero=res.exact_zero, asserted=False))
    return report
