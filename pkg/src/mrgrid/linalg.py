"""Dense matrices over GF(2^d).

Entries live in an ``int64`` numpy array; elimination is delegated to the
kernels in :mod:`mrgrid._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .gf2k import FieldSpec, make_field


class DimensionMismatch(ValueError):
    pass


class NotSquare(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Matrix:
    spec: FieldSpec
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"matrix data must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.spec.size):
            raise ValueError("matrix entry outside the field")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(spec, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, spec: FieldSpec, k: int) -> "Matrix":
        return cls(spec, np.eye(k, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.spec == other.spec
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over GF(2^{self.spec.degree}))"

    def columns(self, cols) -> "Matrix":
        return Matrix(self.spec, self.data[:, list(cols)])

    def select_rows(self, rows) -> "Matrix":
        return Matrix(self.spec, self.data[list(rows), :])

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.cols,):
            raise DimensionMismatch(f"vector of length {x.shape} for {self.cols} columns")
        prods = _kernels.gf_mul_array(self.data, x[None, :], self.spec.poly, self.spec.degree)
        return np.bitwise_xor.reduce(prods, axis=1) if self.cols else np.zeros(self.rows, np.int64)

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        out = np.zeros((self.rows, other.cols), dtype=np.int64)
        for k in range(self.cols):
            out ^= _kernels.gf_mul_array(self.data[:, k, None], other.data[None, k, :], self.spec.poly, self.spec.degree)
        return Matrix(self.spec, out)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.spec.degree} {self.spec.poly:#x}"]
        for row in self.data:
            lines.append(" ".join(f"{int(v):x}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Matrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        head = lines[0].split()
        if len(head) != 4:
            raise ValueError("header must be 'rows cols degree poly'")
        rows, cols, degree = int(head[0]), int(head[1]), int(head[2])
        spec = make_field(degree, int(head[3], 16))
        body = [[int(tok, 16) for tok in ln.split()] for ln in lines[1:]]
        if len(body) != rows or any(len(r) != cols for r in body):
            raise ValueError(f"expected {rows} rows of {cols} entries")
        return cls(spec, np.array(body, dtype=np.int64).reshape(rows, cols))


def row_reduce(A: Matrix) -> tuple[int, Matrix, list[int]]:
    """Reduced row-echelon form with leftmost pivots, first nonzero row wins."""
    R, piv = _kernels.rref(A.data, A.spec.poly, A.spec.degree)
    return len(piv), Matrix(A.spec, R), [int(c) for c in piv]


def rank(A: Matrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return row_reduce(A)[0]


class SolveStatus(Enum):
    UNIQUE = "unique"
    UNDERDETERMINED = "underdetermined"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Solution:
    status: SolveStatus
    x: np.ndarray | None = None

    @property
    def unique(self) -> bool:
        return self.status is SolveStatus.UNIQUE


def solve(A: Matrix, b) -> Solution:
    b = np.asarray(b, dtype=np.int64)
    if b.shape != (A.rows,):
        raise DimensionMismatch(f"right-hand side of length {b.shape} for {A.rows} rows")
    aug = Matrix(A.spec, np.hstack([A.data, b[:, None]]))
    r, R, piv = row_reduce(aug)
    if piv and piv[-1] == A.cols:
        return Solution(SolveStatus.INCONSISTENT)
    if r < A.cols:
        return Solution(SolveStatus.UNDERDETERMINED)
    x = np.zeros(A.cols, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R.data[row, A.cols]
    return Solution(SolveStatus.UNIQUE, x)


def determinant(A: Matrix) -> int:
    if A.rows != A.cols:
        raise NotSquare(f"determinant of a {A.rows}x{A.cols} matrix")
    spec = A.spec
    M = [list(map(int, row)) for row in A.data]
    n = len(M)
    det = 1
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return 0
        M[c], M[p] = M[p], M[c]  # char 2: swaps do not flip the sign
        piv = M[c][c]
        det = spec.mul(det, piv)
        inv = spec.inv(piv)
        for i in range(c + 1, n):
            f = spec.mul(M[i][c], inv)
            if f:
                M[i] = [x ^ spec.mul(f, y) for x, y in zip(M[i], M[c])]
    return det


def kernel_basis(A: Matrix) -> list[np.ndarray]:
    """Right null space basis, one vector per free column (free entry = 1)."""
    if A.rows == 0:
        return [np.eye(A.cols, dtype=np.int64)[i] for i in range(A.cols)]
    r, R, piv = row_reduce(A)
    free = [c for c in range(A.cols) if c not in set(piv)]
    basis = []
    for f in free:
        v = np.zeros(A.cols, dtype=np.int64)
        v[f] = 1
        for row, c in enumerate(piv):
            v[c] = R.data[row, f]
        basis.append(v)
    return basis
