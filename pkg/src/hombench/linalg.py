"""Exact dense linear algebra over prime fields F_p.

Every matrix carries its own characteristic; mixing characteristics in a
binary operation is a hard error.  Entries live in numpy int64 arrays kept
reduced to the range [0, p).  There is no floating point anywhere: products
that could overflow int64 are routed through Python integers.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "LinalgError",
    "ExactMatrix",
    "rref",
    "kernel_basis",
    "solve",
]

MAX_CHAR = 2**31


class LinalgError(ValueError):
    """Malformed matrix data or mixed-characteristic arithmetic."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


_PRIME_CACHE: dict = {}


def _check_prime(p: int) -> int:
    p = int(p)
    if p not in _PRIME_CACHE:
        if p > MAX_CHAR:
            raise LinalgError(f"characteristic {p} exceeds 2^31")
        if not _is_prime(p):
            raise LinalgError(f"characteristic {p} is not prime")
        _PRIME_CACHE[p] = True
    return p


class ExactMatrix:
    """Dense matrix over F_p with exact modular arithmetic.

    Instances are immutable: the underlying array is marked read-only at
    construction and all operations return fresh matrices.
    """

    __slots__ = ("array", "rows", "cols", "p", "_rref")

    def __init__(self, array, p: int, copy: bool = True):
        p = _check_prime(p)
        arr = np.array(array, dtype=np.int64, copy=copy)
        if arr.ndim != 2:
            raise LinalgError(f"expected a 2-d array, got shape {arr.shape}")
        arr %= p
        arr.setflags(write=False)
        self.array = arr
        self.rows, self.cols = arr.shape
        self.p = p
        self._rref = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int, p: int) -> "ExactMatrix":
        return ExactMatrix(np.zeros((rows, cols), dtype=np.int64), p, copy=False)

    @staticmethod
    def identity(n: int, p: int) -> "ExactMatrix":
        return ExactMatrix(np.eye(n, dtype=np.int64), p, copy=False)

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], p: int) -> "ExactMatrix":
        return ExactMatrix(np.array(rows, dtype=np.int64).reshape(len(rows), -1), p, copy=False)

    @staticmethod
    def column(vec: Sequence[int], p: int) -> "ExactMatrix":
        v = np.array(vec, dtype=np.int64).reshape(-1, 1)
        return ExactMatrix(v, p, copy=False)

    # -- basic protocol -----------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols} mod {self.p})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and np.array_equal(self.array, other.array)
        )

    def __hash__(self):
        return hash((self.p, self.rows, self.cols, self.array.tobytes()))

    def _same_field(self, other: "ExactMatrix") -> None:
        if self.p != other.p:
            raise LinalgError(
                f"mixed characteristics: {self.p} vs {other.p}"
            )

    def is_zero(self) -> bool:
        return not self.array.any()

    def to_lists(self) -> List[List[int]]:
        return self.array.tolist()

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix((self.array + other.array) % self.p, self.p, copy=False)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExactMatrix((self.array - other.array) % self.p, self.p, copy=False)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix((-self.array) % self.p, self.p, copy=False)

    def scale(self, c: int) -> "ExactMatrix":
        return ExactMatrix((self.array * (int(c) % self.p)) % self.p, self.p, copy=False)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise LinalgError(f"inner dimension mismatch {self.shape} @ {other.shape}")
        k = self.cols
        # k*(p-1)^2 must stay below int64 range; otherwise use Python ints
        if k == 0:
            prod = np.zeros((self.rows, other.cols), dtype=np.int64)
        elif k * (self.p - 1) ** 2 < 2**63:
            prod = (self.array @ other.array) % self.p
        else:
            a = self.array.astype(object)
            b = other.array.astype(object)
            prod = ((a @ b) % self.p).astype(np.int64)
        return ExactMatrix(prod, self.p, copy=False)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.array.T, self.p)

    # -- slicing helpers ------------------------------------------------

    def column_at(self, j: int) -> "ExactMatrix":
        return ExactMatrix(self.array[:, j : j + 1], self.p)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "ExactMatrix":
        return ExactMatrix(self.array[r0:r1, c0:c1], self.p)

    # -- echelon machinery ----------------------------------------------

    def rref(self) -> Tuple["ExactMatrix", List[int], int]:
        """Reduced row-echelon form, pivot column indices and rank."""
        if self._rref is None:
            reduced, pivots = _rref_array(self.array, self.p)
            self._rref = (ExactMatrix(reduced, self.p, copy=False), pivots, len(pivots))
        return self._rref

    def rank(self) -> int:
        return self.rref()[2]

    def kernel_matrix(self) -> "ExactMatrix":
        """Matrix whose columns form a basis of the right null space."""
        reduced, pivots, rank = self.rref()
        n = self.cols
        free = [j for j in range(n) if j not in set(pivots)]
        basis = np.zeros((n, len(free)), dtype=np.int64)
        red = reduced.array
        for idx, j in enumerate(free):
            basis[j, idx] = 1
            for row, pc in enumerate(pivots):
                basis[pc, idx] = (-red[row, j]) % self.p
        return ExactMatrix(basis, self.p, copy=False)

    def kernel_basis(self) -> List["ExactMatrix"]:
        km = self.kernel_matrix()
        return [km.column_at(j) for j in range(km.cols)]

    def column_space_basis(self) -> "ExactMatrix":
        """Matrix whose columns are the pivot columns of self."""
        _, pivots, _ = self.rref()
        return ExactMatrix(self.array[:, pivots], self.p)

    def solve(self, b: "ExactMatrix") -> Optional["ExactMatrix"]:
        """Some x with self @ x = b, or None when the system is inconsistent.

        ``b`` may have several columns; all are solved simultaneously.
        """
        self._same_field(b)
        if b.rows != self.rows:
            raise LinalgError(f"rhs has {b.rows} rows, expected {self.rows}")
        aug = np.hstack([self.array, b.array])
        reduced, pivots = _rref_array(aug, self.p)
        n = self.cols
        for row, pc in enumerate(pivots):
            if pc >= n:
                return None  # pivot in the rhs block: inconsistent
        x = np.zeros((n, b.cols), dtype=np.int64)
        for row, pc in enumerate(pivots):
            x[pc, :] = reduced[row, n:]
        return ExactMatrix(x, self.p, copy=False)

    def inverse(self) -> Optional["ExactMatrix"]:
        if self.rows != self.cols:
            return None
        if self.rank() < self.rows:
            return None
        return self.solve(ExactMatrix.identity(self.rows, self.p))


def _rref_array(mat: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Gauss-Jordan elimination over F_p on a copy of ``mat``."""
    m = mat.copy() % p
    rows, cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        pr = r + int(hits[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        nz = np.nonzero(m[:, c])[0]
        for q in nz:
            if q != r:
                m[q] = (m[q] - m[q, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


# -- free-function forms of the core operations ------------------------


def rref(m: ExactMatrix) -> Tuple[ExactMatrix, List[int], int]:
    return m.rref()


def kernel_basis(m: ExactMatrix) -> List[ExactMatrix]:
    return m.kernel_basis()


def solve(m: ExactMatrix, b: ExactMatrix) -> Optional[ExactMatrix]:
    return m.solve(b)


def hstack(mats: Iterable[ExactMatrix]) -> ExactMatrix:
    mats = list(mats)
    p = mats[0].p
    for m in mats[1:]:
        mats[0]._same_field(m)
    return ExactMatrix(np.hstack([m.array for m in mats]), p, copy=False)


def vstack(mats: Iterable[ExactMatrix]) -> ExactMatrix:
    mats = list(mats)
    p = mats[0].p
    for m in mats[1:]:
        mats[0]._same_field(m)
    return ExactMatrix(np.vstack([m.array for m in mats]), p, copy=False)
