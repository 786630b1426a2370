"""Exact arithmetic in cyclotomic fields.

A :class:`Cyclo` is an element of Q(zeta_n), zeta_n = exp(2*pi*i/n), stored in
canonical form: the remainder of its group-ring polynomial modulo the n-th
cyclotomic polynomial.  Equality and zero tests are therefore symbolic.

:class:`RootVector` is a vector whose entries are each zero or a single root
of unity, times a common real factor ``sqrt(scale_sq)``.  Unit vectors built
from phases (Fourier-type bases) live here so inner products reduce to integer
counting.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Cyclo",
    "RootVector",
    "InvalidOrderError",
    "root_of_unity",
    "exp2pi",
    "is_zero_exact",
    "to_float",
    "cyclotomic_polynomial",
]


class InvalidOrderError(ValueError):
    pass


# --- number theory helpers -------------------------------------------------


def _divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=None)
def _totient(n: int) -> int:
    result = n
    for p in _prime_factors(n):
        result -= result // p
    return result


def _mobius(n: int) -> int:
    result = 1
    for p in _prime_factors(n):
        if (n // p) % p == 0:
            return 0
        result = -result
    return result


def _poly_divide_exact(num: list[int], den: Sequence[int]) -> list[int]:
    """Quotient of integer polynomials (low to high) with monic ``den``."""
    num = list(num)
    dd = len(den) - 1
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j, dj in enumerate(den):
                num[i - dd + j] -= c * dj
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return quot


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise InvalidOrderError(f"order must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divide_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Sparse reduced form of x^t mod Phi_n for t = 0..n-1."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for i in range(deg):
                cur[i] -= lead * phi[i]
    return tuple(rows)


def _reduce(n: int, counts: Sequence[int]) -> list[int]:
    table = _power_table(n)
    out = [0] * _totient(n)
    for t, c in enumerate(counts):
        if c:
            for i, v in table[t]:
                out[i] += c * v
    return out


@lru_cache(maxsize=None)
def _subfield_basis(n: int, m: int) -> tuple[list[list[Fraction]], list[int]]:
    """Row-reduced image of the Q(zeta_m) power basis inside Q(zeta_n).

    Returns (reduced augmented rows, pivot columns) for solving
    x = sum_t c_t zeta_m^t with x given in order-n coordinates.
    """
    step = n // m
    fm, fn = _totient(m), _totient(n)
    # columns: the fm basis images; rows: fn coordinates
    cols = []
    for t in range(fm):
        counts = [0] * n
        counts[t * step] = 1
        cols.append(_reduce(n, counts))
    mat = [[Fraction(cols[c][r]) for c in range(fm)] for r in range(fn)]
    return mat, list(range(fm))


def _solve_subfield(n: int, m: int, rhs: Sequence[Fraction]) -> list[Fraction] | None:
    mat, _ = _subfield_basis(n, m)
    rows = [list(r) + [Fraction(v)] for r, v in zip(mat, rhs)]
    ncols = len(mat[0]) if mat else 0
    piv_row = 0
    pivots = []
    for col in range(ncols):
        sel = next((r for r in range(piv_row, len(rows)) if rows[r][col] != 0), None)
        if sel is None:
            continue
        rows[piv_row], rows[sel] = rows[sel], rows[piv_row]
        pv = rows[piv_row][col]
        rows[piv_row] = [v / pv for v in rows[piv_row]]
        for r in range(len(rows)):
            if r != piv_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[piv_row])]
        pivots.append(col)
        piv_row += 1
    if any(rows[r][-1] != 0 for r in range(piv_row, len(rows))):
        return None
    sol = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        sol[col] = rows[r][-1]
    return sol


# --- the scalar ------------------------------------------------------------


class Cyclo:
    """Element of Q(zeta_n) in canonical reduced form.

    Internally ``num`` holds integer numerators of the reduced coordinates
    (length phi(n)) over the common positive denominator ``den``.
    """

    __slots__ = ("_n", "_num", "_den", "_hash")

    def __init__(self, order: int, coeffs: Iterable = ()):
        if order < 1:
            raise InvalidOrderError(f"order must be positive, got {order}")
        fr = [Fraction(c) for c in coeffs]
        if len(fr) > order:
            raise ValueError(f"{len(fr)} coefficients for order {order}")
        fr += [Fraction(0)] * (order - len(fr))
        den = math.lcm(*(c.denominator for c in fr)) if fr else 1
        counts = [c.numerator * (den // c.denominator) for c in fr]
        self._set(order, _reduce(order, counts), den)

    def _set(self, n: int, num: list[int], den: int) -> None:
        g = math.gcd(den, *num)
        if g > 1:
            num = [v // g for v in num]
            den //= g
        if not any(num):
            den = 1
        self._n = n
        self._num = tuple(num)
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, n: int, num: list[int], den: int = 1) -> "Cyclo":
        obj = cls.__new__(cls)
        obj._set(n, num, den)
        return obj

    @classmethod
    def from_counts(cls, n: int, counts: Sequence[int], den: int = 1) -> "Cyclo":
        """Build sum_t counts[t] * zeta_n^t / den from integer group-ring counts."""
        return cls._raw(n, _reduce(n, [int(c) for c in counts]), den)

    @classmethod
    def rational(cls, value) -> "Cyclo":
        v = Fraction(value)
        return cls._raw(1, [v.numerator], v.denominator)

    @classmethod
    def coerce(cls, value) -> "Cyclo":
        if isinstance(value, Cyclo):
            return value
        if isinstance(value, (int, Rational)):
            return cls.rational(value)
        raise TypeError(f"cannot convert {type(value).__name__} to an exact cyclotomic")

    # -- introspection --

    @property
    def order(self) -> int:
        return self._n

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Canonical coefficients, length ``order``, value = sum c_t zeta^t."""
        out = [Fraction(v, self._den) for v in self._num]
        return tuple(out + [Fraction(0)] * (self._n - len(out)))

    def _nonzero(self):
        return [(i, v) for i, v in enumerate(self._num) if v]

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    # -- order changes --

    def lift(self, order: int) -> "Cyclo":
        if order == self._n:
            return self
        if order % self._n:
            raise InvalidOrderError(f"cannot lift order {self._n} to {order}")
        step = order // self._n
        counts = [0] * order
        for i, v in self._nonzero():
            counts[i * step] = v
        return Cyclo._raw(order, _reduce(order, counts), self._den)

    def lower(self, order: int) -> "Cyclo | None":
        """Express in Q(zeta_order) if possible, else None."""
        if order == self._n:
            return self
        if self._n % order:
            raise InvalidOrderError(f"{order} does not divide {self._n}")
        if not self:
            return Cyclo._raw(order, [0] * _totient(order))
        rhs = [Fraction(v, self._den) for v in self._num]
        sol = _solve_subfield(self._n, order, rhs)
        if sol is None:
            return None
        return Cyclo(order, sol)

    def minimal(self) -> "Cyclo":
        """Same value at the smallest order whose field contains it."""
        x = self
        progress = True
        while progress and x._n > 1:
            progress = False
            for p in _prime_factors(x._n):
                y = x.lower(x._n // p)
                if y is not None:
                    x, progress = y, True
                    break
        return x

    @staticmethod
    def _common(x: "Cyclo", y: "Cyclo") -> tuple["Cyclo", "Cyclo"]:
        if x._n == y._n:
            return x, y
        n = math.lcm(x._n, y._n)
        return x.lift(n), y.lift(n)

    # -- arithmetic --

    def __add__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        x, y = Cyclo._common(self, other)
        den = x._den * y._den // math.gcd(x._den, y._den)
        fx, fy = den // x._den, den // y._den
        return Cyclo._raw(x._n, [a * fx + b * fy for a, b in zip(x._num, y._num)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo._raw(self._n, [-v for v in self._num], self._den)

    def __sub__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        if not self or not other:
            return ZERO
        if other._n == 1:
            f = other._num[0]
            return Cyclo._raw(self._n, [v * f for v in self._num], self._den * other._den)
        if self._n == 1:
            return other * self
        x, y = Cyclo._common(self, other)
        n = x._n
        counts = [0] * n
        ynz = y._nonzero()
        for i, a in x._nonzero():
            for j, b in ynz:
                counts[(i + j) % n] += a * b
        return Cyclo._raw(n, _reduce(n, counts), x._den * y._den)

    __rmul__ = __mul__

    def _map_exponents(self, factor: int) -> "Cyclo":
        n = self._n
        counts = [0] * n
        for i, v in self._nonzero():
            counts[(i * factor) % n] += v
        return Cyclo._raw(n, _reduce(n, counts), self._den)

    def conjugate(self) -> "Cyclo":
        return self._map_exponents(-1)

    conj = conjugate

    def galois(self, c: int) -> "Cyclo":
        """Automorphism zeta_n -> zeta_n^c (c coprime to n)."""
        if math.gcd(c, self._n) != 1:
            raise ValueError(f"{c} is not a unit modulo {self._n}")
        return self._map_exponents(c)

    def inverse(self) -> "Cyclo":
        if not self:
            raise ZeroDivisionError("inverse of exact zero")
        if self.is_rational():
            return Cyclo.rational(1 / self.as_fraction())
        # product of the non-trivial conjugates; x * cofactor = norm(x) in Q
        cofactor = ONE
        for c in range(2, self._n):
            if math.gcd(c, self._n) == 1:
                cofactor = cofactor * self.galois(c)
        norm = (self * cofactor).as_fraction()
        return cofactor * (1 / norm)

    def __truediv__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        e = abs(exponent)
        result = ONE
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def abs2(self) -> "Cyclo":
        return self * self.conjugate()

    # -- comparison / hashing --

    def __eq__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        x, y = Cyclo._common(self, other)
        return x._den == y._den and x._num == y._num

    def normalized_trace(self) -> Fraction:
        """Tr(x) / [Q(zeta_n):Q]; independent of the order used to store x."""
        n = self._n
        total = Fraction(0)
        for i, v in self._nonzero():
            m = n // math.gcd(n, i)
            total += Fraction(v * _mobius(m), _totient(m))
        return total / self._den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.normalized_trace())
        return self._hash

    # -- floating embedding --

    def __complex__(self) -> complex:
        n = self._n
        re, im = [], []
        for i, v in self._nonzero():
            c = v / self._den
            ang = 2.0 * math.pi * i / n
            re.append(c * math.cos(ang))
            im.append(c * math.sin(ang))
        return complex(math.fsum(re), math.fsum(im))

    def to_complex(self) -> complex:
        return complex(self)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self) -> str:
        terms = []
        for i, v in self._nonzero():
            c = Fraction(v, self._den)
            terms.append(f"{c}" if i == 0 else f"{c}*z{self._n}^{i}")
        return f"Cyclo({' + '.join(terms) or '0'})"

    def to_json(self) -> dict:
        return {"order": self._n, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Cyclo":
        return cls(int(obj["order"]), [Fraction(int(a), int(b)) for a, b in obj["coeffs"]])


ZERO = Cyclo._raw(1, [0])
ONE = Cyclo._raw(1, [1])


def root_of_unity(n: int, t: int = 1) -> Cyclo:
    """zeta_n^t in canonical form."""
    if n < 1:
        raise InvalidOrderError(f"order must be positive, got {n}")
    counts = [0] * n
    counts[t % n] = 1
    return Cyclo.from_counts(n, counts)


def exp2pi(frac) -> Cyclo:
    """exp(2*pi*i*frac) for rational frac."""
    f = Fraction(frac)
    return root_of_unity(f.denominator, f.numerator)


def is_zero_exact(x) -> bool:
    return Cyclo.coerce(x).is_zero()


def to_float(x) -> complex:
    return complex(Cyclo.coerce(x))


# --- monomial vectors ------------------------------------------------------


class RootVector:
    """sqrt(scale_sq) * (e_0, ..., e_{dim-1}) with e_i zero or a root of unity.

    ``exponents[i]`` is the power of zeta_order, or -1 for a zero entry.
    """

    __slots__ = ("order", "exponents", "scale_sq")

    def __init__(self, order: int, exponents: Sequence[int | None], scale_sq=1):
        self.order = int(order)
        self.exponents = np.array(
            [-1 if e is None else int(e) % self.order for e in exponents], dtype=np.int64
        )
        self.scale_sq = Fraction(scale_sq)

    @classmethod
    def basis_vector(cls, dim: int, index: int) -> "RootVector":
        exps = [None] * dim
        exps[index] = 0
        return cls(1, exps, 1)

    @classmethod
    def from_phases(cls, phases: Sequence, scale_sq) -> "RootVector":
        """Build from rational phase fractions (None for zero entries): entry = exp(2 pi i p)."""
        fr = [None if p is None else Fraction(p) for p in phases]
        order = math.lcm(1, *(p.denominator for p in fr if p is not None))
        exps = [None if p is None else (p * order).numerator for p in fr]
        return cls(order, exps, scale_sq)

    @classmethod
    def from_scalars(cls, scalars: Sequence[Cyclo], scale_sq) -> "RootVector":
        """Recognise exact scalars that are each zero or a root of unity."""
        order = math.lcm(1, *(s.order for s in scalars))
        exps = []
        for s in scalars:
            if not s:
                exps.append(None)
                continue
            z = complex(s)
            t = round(cmath.phase(z) * order / (2 * math.pi)) % order
            if s != root_of_unity(order, t):
                raise ValueError(f"{s!r} is not a root of unity")
            exps.append(t)
        return cls(order, exps, scale_sq)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def lifted(self, order: int) -> np.ndarray:
        if order % self.order:
            raise InvalidOrderError(f"cannot lift order {self.order} to {order}")
        step = order // self.order
        return np.where(self.exponents >= 0, self.exponents * step, -1)

    def components(self) -> list[Cyclo]:
        """Entries without the sqrt(scale_sq) prefactor."""
        return [ZERO if e < 0 else root_of_unity(self.order, int(e)) for e in self.exponents]

    def to_numpy(self) -> np.ndarray:
        ang = 2 * np.pi * self.exponents / self.order
        vals = np.where(self.exponents >= 0, np.exp(1j * ang), 0.0)
        return math.sqrt(self.scale_sq) * vals

    def bracket(self, other: "RootVector") -> tuple[Fraction, Cyclo]:
        """(scale product, sum_i conj(u_i) v_i) so that <u|v> = sqrt(scale) * sum."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        n = math.lcm(self.order, other.order)
        eu, ev = self.lifted(n), other.lifted(n)
        both = (eu >= 0) & (ev >= 0)
        counts = np.bincount((ev[both] - eu[both]) % n, minlength=n)
        return self.scale_sq * other.scale_sq, Cyclo.from_counts(n, counts.tolist())

    def overlap_sq(self, other: "RootVector") -> Cyclo:
        """|<u|v>|^2 exactly."""
        scale, s = self.bracket(other)
        return s.abs2() * scale

    def inner(self, other: "RootVector") -> Cyclo | None:
        """<u|v> exactly when sqrt of the scale product is rational, else None."""
        scale, s = self.bracket(other)
        num, den = scale.numerator, scale.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn != num or rd * rd != den:
            return None
        return s * Fraction(rn, rd)

    def outer_exponents(self) -> tuple[int, np.ndarray]:
        """Flattened exponents of |u><u| (row-major), -1 where zero."""
        e = self.exponents
        mask = (e[:, None] >= 0) & (e[None, :] >= 0)
        diff = (e[:, None] - e[None, :]) % self.order
        return self.order, np.where(mask, diff, -1).ravel()

    def __eq__(self, other):
        if not isinstance(other, RootVector):
            return NotImplemented
        n = math.lcm(self.order, other.order)
        return self.scale_sq == other.scale_sq and np.array_equal(self.lifted(n), other.lifted(n))

    __hash__ = None

    def __repr__(self) -> str:
        return f"RootVector(order={self.order}, exponents={self.exponents.tolist()}, scale_sq={self.scale_sq})"

    def to_json(self) -> dict:
        return {
            "norm_sq": [self.scale_sq.numerator, self.scale_sq.denominator],
            "components": [c.to_json() for c in self.components()],
        }
