"""Dense square operators over the exact (cyclotomic) or float backend."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from numbers import Number, Rational
from typing import Iterable, Sequence

import numpy as np

from .cyclo import ONE, ZERO, Cyclo

EXACT = "exact"
FLOAT = "float"

DEGENERACY_TOL = 1e-8


class DimensionError(ValueError):
    pass


class BackendError(TypeError):
    pass


class ContractError(ValueError):
    pass


def _to_object_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Cyclo.coerce(v)
    return out


_conj = np.frompyfunc(lambda c: c.conjugate(), 1, 1)
_to_complex = np.frompyfunc(complex, 1, 1)
_is_nonzero = np.frompyfunc(bool, 1, 1)


class Operator:
    """Square matrix tagged with its backend.

    Exact entries are :class:`Cyclo` in an object array; float entries are
    complex128.  Index convention for tensor products is left-factor major:
    ``i = i_A * dim(B) + i_B``.
    """

    __slots__ = ("data", "label")

    def __init__(self, data, label: str = ""):
        arr = np.asarray(data)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"operator must be square, got shape {arr.shape}")
        if arr.dtype == object:
            self.data = _to_object_array(arr)
        else:
            self.data = arr.astype(complex)
        self.label = label

    # -- constructors --

    @classmethod
    def identity(cls, dim: int, backend: str = EXACT, label: str = "I") -> "Operator":
        return cls.diag([1] * dim, backend, label)

    @classmethod
    def zeros(cls, dim: int, backend: str = EXACT, label: str = "0") -> "Operator":
        if backend == EXACT:
            arr = np.empty((dim, dim), dtype=object)
            arr.fill(ZERO)
            return cls._wrap(arr, label)
        return cls(np.zeros((dim, dim), dtype=complex), label)

    @classmethod
    def diag(cls, values: Sequence, backend: str = EXACT, label: str = "") -> "Operator":
        n = len(values)
        if backend == EXACT:
            arr = np.empty((n, n), dtype=object)
            arr.fill(ZERO)
            for i, v in enumerate(values):
                arr[i, i] = Cyclo.coerce(v)
            return cls._wrap(arr, label)
        return cls(np.diag(np.asarray([complex(v) for v in values], dtype=complex)), label)

    @classmethod
    def unit(cls, dim: int, row: int, col: int, backend: str = EXACT) -> "Operator":
        """Rank-one |row><col|."""
        op = cls.zeros(dim, backend, f"E[{row},{col}]")
        op.data[row, col] = ONE if backend == EXACT else 1.0
        return op

    @classmethod
    def _wrap(cls, arr: np.ndarray, label: str = "") -> "Operator":
        obj = cls.__new__(cls)
        obj.data = arr
        obj.label = label
        return obj

    # -- properties --

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def backend(self) -> str:
        return EXACT if self.data.dtype == object else FLOAT

    @property
    def is_exact(self) -> bool:
        return self.data.dtype == object

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim}, backend={self.backend}, label={self.label!r})"

    # -- conversions --

    def to_float(self) -> "Operator":
        if not self.is_exact:
            return self
        return Operator._wrap(_to_complex(self.data).astype(complex), self.label)

    def to_numpy(self) -> np.ndarray:
        return self.to_float().data

    def with_label(self, label: str) -> "Operator":
        return Operator._wrap(self.data, label)

    def _check(self, other: "Operator") -> None:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if other.backend != self.backend:
            raise BackendError(f"backend mismatch: {self.backend} vs {other.backend}")

    def _coerce_scalar(self, s):
        if self.is_exact:
            if isinstance(s, (Cyclo, int, Rational)):
                return Cyclo.coerce(s)
            raise BackendError(f"cannot scale an exact operator by {type(s).__name__}")
        if isinstance(s, Cyclo):
            return complex(s)
        if isinstance(s, Number):
            return complex(s)
        raise TypeError(f"unsupported scalar {type(s).__name__}")

    # -- algebra --

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        if not self.is_exact:
            return Operator._wrap(self.data @ other.data)
        return Operator._wrap(_exact_matmul(self.data, other.data))

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator._wrap(self.data + other.data)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator._wrap(self.data - other.data)

    def __neg__(self) -> "Operator":
        return Operator._wrap(-self.data)

    def __mul__(self, scalar) -> "Operator":
        if isinstance(scalar, Operator):
            raise TypeError("use @ for operator products")
        s = self._coerce_scalar(scalar)
        if self.is_exact and not s:
            return Operator.zeros(self.dim, EXACT)
        return Operator._wrap(self.data * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Operator":
        s = self._coerce_scalar(scalar)
        return self * (s.inverse() if self.is_exact else 1 / s)

    def __pow__(self, n: int) -> "Operator":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Operator.identity(self.dim, self.backend)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def dag(self) -> "Operator":
        if self.is_exact:
            return Operator._wrap(_conj(self.data.T).astype(object))
        return Operator._wrap(self.data.conj().T)

    adjoint = dag

    def trace(self):
        if self.is_exact:
            total = ZERO
            for i in range(self.dim):
                total = total + self.data[i, i]
            return total
        return complex(np.trace(self.data))

    def kron(self, other: "Operator") -> "Operator":
        if other.backend != self.backend:
            raise BackendError(f"backend mismatch: {self.backend} vs {other.backend}")
        if not self.is_exact:
            return Operator._wrap(np.kron(self.data, other.data))
        na, nb = self.dim, other.dim
        out = np.empty((na * nb, na * nb), dtype=object)
        out.fill(ZERO)
        bnz = [(k, l, other.data[k, l]) for k in range(nb) for l in range(nb) if other.data[k, l]]
        for i in range(na):
            for j in range(na):
                a = self.data[i, j]
                if not a:
                    continue
                for k, l, b in bnz:
                    out[i * nb + k, j * nb + l] = a * b
        return Operator._wrap(out)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> np.ndarray:
        cols = rows if cols is None else cols
        return self.data[np.ix_(list(rows), list(cols))]

    def compress(self, indices: Sequence[int]) -> "Operator":
        return Operator._wrap(self.submatrix(indices), self.label)

    def is_zero(self) -> bool:
        if self.is_exact:
            return not any(bool(v) for v in self.data.flat)
        return not np.any(self.data)

    def equals(self, other: "Operator") -> bool:
        """Exact entrywise equality (same backend)."""
        self._check(other)
        return (self - other).is_zero()

    # -- export --

    def to_csv(self) -> str:
        rows = []
        for row in self.to_numpy():
            rows.append(",".join(f"{z.real!r}+{z.imag!r}i" for z in row))
        return "\n".join(rows) + "\n"

    def to_json(self) -> dict:
        if self.is_exact:
            entries = [[e.to_json() for e in row] for row in self.data]
        else:
            entries = [[[z.real, z.imag] for z in row] for row in self.data.tolist()]
        return {"dim": self.dim, "backend": self.backend, "label": self.label, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "Operator":
        if obj["backend"] == EXACT:
            arr = np.empty((obj["dim"], obj["dim"]), dtype=object)
            for i, row in enumerate(obj["entries"]):
                for j, e in enumerate(row):
                    arr[i, j] = Cyclo.from_json(e)
            return cls._wrap(arr, obj.get("label", ""))
        data = np.array([[complex(re, im) for re, im in row] for row in obj["entries"]])
        return cls(data, obj.get("label", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, inner = a.shape
    m = b.shape[1]
    brows = [[(j, b[k, j]) for j in range(m) if b[k, j]] for k in range(inner)]
    out = np.empty((n, m), dtype=object)
    out.fill(ZERO)
    for i in range(n):
        acc: dict[int, Cyclo] = {}
        for k in range(inner):
            x = a[i, k]
            if not x or not brows[k]:
                continue
            for j, y in brows[k]:
                p = x * y
                acc[j] = acc[j] + p if j in acc else p
        for j, v in acc.items():
            out[i, j] = v
    return out


def tensor(a: Operator, b: Operator) -> Operator:
    return a.kron(b)


def q_commutator(a: Operator, b: Operator, q=1) -> Operator:
    """[A, B]_q = AB - q BA."""
    return a @ b - (b @ a) * q


def commutator(a: Operator, b: Operator) -> Operator:
    return q_commutator(a, b, 1)


def anticommutator(a: Operator, b: Operator) -> Operator:
    return q_commutator(a, b, -1)


@dataclass(frozen=True)
class Residual:
    norm: float
    exact_zero: bool | None


def residual_norm(a) -> Residual:
    """Max-entry modulus; exact backend also reports literal zero-ness.

    Accepts an :class:`Operator` or a raw (possibly rectangular) entry array.
    """
    data = a.data if isinstance(a, Operator) else np.asarray(a)
    if data.size == 0:
        return Residual(0.0, True)
    if data.dtype == object:
        nz = [v for v in data.flat if v]
        norm = max((abs(v) for v in nz), default=0.0)
        return Residual(float(norm), not nz)
    return Residual(float(np.max(np.abs(data))), None)


def exact_or_bitwise_zero(a) -> bool:
    """Literal zero test valid for both backends (float: every entry == 0.0)."""
    data = a.data if isinstance(a, Operator) else np.asarray(a)
    if data.dtype == object:
        return not any(bool(v) for v in data.flat)
    return not np.any(data)


# --- Hermitian spectrum ----------------------------------------------------


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 80):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns (eigenvalues ascending, unitary with eigenvectors as columns).
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    vecs = np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros(0), vecs
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag < 1e-18 * scale:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vecs[:, idx] = vecs[:, idx] @ u
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    vals = np.real(np.diag(a))
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def group_levels(values: Iterable[float], tol: float = DEGENERACY_TOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (energy, multiplicity) with absolute tolerance."""
    levels: list[list[float]] = []
    for v in sorted(values):
        if levels and abs(v - levels[-1][0]) <= tol:
            levels[-1].append(v)
        else:
            levels.append([v])
    return [(float(np.mean(g)), len(g)) for g in levels]


@dataclass
class HermitianSpectrum:
    eigenvalues: np.ndarray
    levels: list[tuple[float, int]]


def hermitian_spectrum(a: Operator | np.ndarray, herm_tol: float = 1e-10) -> HermitianSpectrum:
    data = a.to_numpy() if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    if data.size and np.max(np.abs(data - data.conj().T)) > herm_tol:
        raise ContractError("hermitian_spectrum requires a Hermitian matrix")
    vals, _ = jacobi_eigh(data)
    return HermitianSpectrum(vals, group_levels(vals))
