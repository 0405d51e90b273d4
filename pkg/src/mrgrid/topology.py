"""Grid-like topologies T(m x n)(a, b, h), their instantiations, and the
encode / erasure-decode path for a concrete code.

Cells are 0-based ``(row, col)`` pairs; cell ``(i, j)`` is flat index
``i*n + j`` in every constraint matrix and bit mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .gf2k import FieldSpec
from .linalg import Matrix, kernel_basis, rank, solve


class InvalidTopology(ValueError):
    pass


class Uncorrectable(ValueError):
    def __init__(self, pattern: "ErasurePattern"):
        super().__init__(f"erasure pattern with {len(pattern)} cells is not correctable by this code")
        self.pattern = pattern


class InconsistentInput(ValueError):
    pass


class NotInformationSet(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    m: int
    n: int
    a: int
    b: int
    h: int

    def __post_init__(self):
        m, n, a, b, h = self.m, self.n, self.a, self.b, self.h
        if m < 1 or n < 1:
            raise InvalidTopology(f"grid must be non-empty, got {m}x{n}")
        if not 0 <= a <= m - 1:
            raise InvalidTopology(f"need 0 <= a <= m-1, got a={a}, m={m}")
        if not 0 <= b <= n - 1:
            raise InvalidTopology(f"need 0 <= b <= n-1, got b={b}, n={n}")
        if not 0 <= h <= (m - a) * (n - b) - 1:
            raise InvalidTopology(f"need 0 <= h <= (m-a)(n-b)-1, got h={h}")

    @property
    def cells(self) -> int:
        return self.m * self.n

    @property
    def num_constraints(self) -> int:
        return self.n * self.a + self.m * self.b + self.h

    def __str__(self):
        return f"T({self.m}x{self.n})({self.a},{self.b},{self.h})"

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "a": self.a, "b": self.b, "h": self.h}

    @classmethod
    def from_json(cls, obj: dict) -> "Topology":
        return cls(*(int(obj[k]) for k in "mnabh"))


def code_dimension(top: Topology) -> int:
    return (top.m - top.a) * (top.n - top.b) - top.h


@dataclass(frozen=True, eq=False)
class ErasurePattern:
    """A set of erased cells on an ``m x n`` grid."""

    m: int
    n: int
    cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        cells = frozenset((int(i), int(j)) for i, j in self.cells)
        for i, j in cells:
            if not (0 <= i < self.m and 0 <= j < self.n):
                raise ValueError(f"cell ({i}, {j}) outside the {self.m}x{self.n} grid")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_cells(cls, m: int, n: int, cells: Iterable) -> "ErasurePattern":
        cells = [tuple(c) for c in cells]
        if len(set(cells)) != len(cells):
            raise ValueError("duplicate cell in erasure pattern")
        return cls(m, n, frozenset(cells))

    @classmethod
    def from_rows(cls, m: int, n: int, rows: Iterable[Iterable[int]]) -> "ErasurePattern":
        return cls(m, n, frozenset((i, j) for i, row in enumerate(rows) for j in row))

    @classmethod
    def from_mask(cls, m: int, n: int, mask: int) -> "ErasurePattern":
        mask = int(mask)
        return cls(m, n, frozenset(divmod(k, n) for k in range(m * n) if mask >> k & 1))

    @classmethod
    def full(cls, m: int, n: int) -> "ErasurePattern":
        return cls(m, n, frozenset((i, j) for i in range(m) for j in range(n)))

    @property
    def mask(self) -> int:
        return sum(1 << (i * self.n + j) for i, j in self.cells)

    def flat(self) -> list[int]:
        return sorted(i * self.n + j for i, j in self.cells)

    def row(self, i: int) -> list[int]:
        return sorted(j for r, j in self.cells if r == i)

    def col(self, j: int) -> list[int]:
        return sorted(i for i, c in self.cells if c == j)

    def rows(self) -> list[list[int]]:
        return [self.row(i) for i in range(self.m)]

    def row_masks(self) -> list[int]:
        masks = [0] * self.m
        for i, j in self.cells:
            masks[i] |= 1 << j
        return masks

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells))

    def __contains__(self, cell):
        return tuple(cell) in self.cells

    def __eq__(self, other):
        return (
            isinstance(other, ErasurePattern)
            and (self.m, self.n, self.cells) == (other.m, other.n, other.cells)
        )

    def __hash__(self):
        return hash((self.m, self.n, self.cells))

    def __le__(self, other: "ErasurePattern") -> bool:
        return self.cells <= other.cells

    def __repr__(self):
        return f"ErasurePattern({self.m}x{self.n}, {sorted(self.cells)})"

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "cells": [list(c) for c in sorted(self.cells)]}

    def to_grid(self) -> str:
        return "\n".join(
            " ".join("x" if (i, j) in self.cells else "." for j in range(self.n)) for i in range(self.m)
        )


@dataclass(frozen=True, eq=False)
class Instantiation:
    """Coefficients pinning a concrete code for a topology.

    ``alpha`` is ``m x a`` (alpha[i, k] multiplies x_ij in column check k),
    ``beta`` is ``n x b`` and ``gamma`` is ``h x m x n``.
    """

    topology: Topology
    spec: FieldSpec
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        t = self.topology
        shapes = {"alpha": (t.m, t.a), "beta": (t.n, t.b), "gamma": (t.h, t.m, t.n)}
        for name, shape in shapes.items():
            arr = np.array(getattr(self, name), dtype=np.int64).reshape(shape)
            if arr.size and (arr.min() < 0 or arr.max() >= self.spec.size):
                raise ValueError(f"{name} has an entry outside GF(2^{self.spec.degree})")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __eq__(self, other):
        return (
            isinstance(other, Instantiation)
            and self.topology == other.topology
            and self.spec == other.spec
            and all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("alpha", "beta", "gamma"))
        )

    def to_json(self) -> dict:
        hexes = np.vectorize(hex, otypes=[object])
        return {
            "topology": self.topology.to_json(),
            "field": self.spec.to_json(),
            "alpha": hexes(self.alpha).tolist() if self.alpha.size else [[] for _ in range(self.topology.m)],
            "beta": hexes(self.beta).tolist() if self.beta.size else [[] for _ in range(self.topology.n)],
            "gamma": hexes(self.gamma).tolist() if self.gamma.size else [],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Instantiation":
        top = Topology.from_json(obj["topology"])
        spec = FieldSpec.from_json(obj["field"])

        def parse(x):
            if isinstance(x, list):
                return [parse(y) for y in x]
            return int(str(x), 16)

        return cls(top, spec, parse(obj["alpha"]), parse(obj["beta"]), parse(obj["gamma"]))


def random_instantiation(top: Topology, spec: FieldSpec, rng: np.random.Generator) -> Instantiation:
    """Every coefficient uniform over the field."""
    hi = spec.size
    return Instantiation(
        top,
        spec,
        rng.integers(0, hi, size=(top.m, top.a), dtype=np.int64),
        rng.integers(0, hi, size=(top.n, top.b), dtype=np.int64),
        rng.integers(0, hi, size=(top.h, top.m, top.n), dtype=np.int64),
    )


def constraint_matrix(inst: Instantiation) -> Matrix:
    """Rows: column checks (by column, then k), row checks (by row, then k),
    global checks (by k).  Column ``i*n + j`` holds the coefficient of x_ij."""
    t = inst.topology
    m, n = t.m, t.n
    H = np.zeros((t.num_constraints, m * n), dtype=np.int64)
    r = 0
    for j in range(n):
        for k in range(t.a):
            H[r, np.arange(m) * n + j] = inst.alpha[:, k]
            r += 1
    for i in range(m):
        for k in range(t.b):
            H[r, i * n + np.arange(n)] = inst.beta[:, k]
            r += 1
    for k in range(t.h):
        H[r] = inst.gamma[k].reshape(-1)
        r += 1
    return Matrix(inst.spec, H)


def is_correctable_by(inst: Instantiation, E: ErasurePattern) -> bool:
    if len(E) == 0:
        return True
    H = constraint_matrix(inst)
    return int(_kernels.rank_of_columns(H.data, [E.mask], inst.spec.poly, inst.spec.degree)[0]) == len(E)


@dataclass(frozen=True, eq=False)
class Codeword:
    """Grid of symbols; cells in ``erased`` carry no meaningful value."""

    values: np.ndarray
    erased: frozenset = frozenset()

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "erased", frozenset((int(i), int(j)) for i, j in self.erased))

    def erase(self, cells: Iterable) -> "Codeword":
        cells = frozenset(tuple(c) for c in cells)
        vals = np.array(self.values)
        for i, j in cells:
            vals[i, j] = 0
        return Codeword(vals, self.erased | cells)

    def __eq__(self, other):
        return (
            isinstance(other, Codeword)
            and self.erased == other.erased
            and np.array_equal(self.values, other.values)
        )

    def to_json(self) -> dict:
        rows = []
        for i, row in enumerate(self.values):
            rows.append([None if (i, j) in self.erased else hex(int(v)) for j, v in enumerate(row)])
        return {"values": rows}

    @classmethod
    def from_json(cls, obj: dict) -> "Codeword":
        vals, erased = [], set()
        for i, row in enumerate(obj["values"]):
            vals.append([])
            for j, v in enumerate(row):
                if v is None:
                    erased.add((i, j))
                    vals[-1].append(0)
                else:
                    vals[-1].append(int(str(v), 16))
        return cls(np.array(vals, dtype=np.int64), frozenset(erased))


def syndrome(inst: Instantiation, w: Codeword) -> np.ndarray:
    return constraint_matrix(inst).matvec(np.asarray(w.values).reshape(-1))


def decode_erasures(inst: Instantiation, w: Codeword) -> Codeword:
    t = inst.topology
    H = constraint_matrix(inst)
    x = np.array(w.values, dtype=np.int64).reshape(-1)
    erased = sorted(i * t.n + j for i, j in w.erased)
    known = np.ones(t.m * t.n, dtype=bool)
    known[erased] = False
    x[~known] = 0
    # constraints that only touch known symbols must already hold
    rhs = H.matvec(x)
    full_known = ~(H.data[:, ~known] != 0).any(axis=1)
    if (rhs[full_known] != 0).any():
        raise InconsistentInput("known symbols violate a fully-known parity check")
    if not erased:
        return Codeword(x.reshape(t.m, t.n))
    pattern = ErasurePattern(t.m, t.n, w.erased)
    if not is_correctable_by(inst, pattern):
        raise Uncorrectable(pattern)
    sol = solve(H.columns(erased), rhs)
    if not sol.unique:
        raise InconsistentInput("known symbols are not consistent with any codeword")
    x[erased] = sol.x
    return Codeword(x.reshape(t.m, t.n))


def systematic_encode(inst: Instantiation, info_set: Iterable, values) -> Codeword:
    t = inst.topology
    cells = [tuple(c) for c in info_set]
    values = np.asarray(values, dtype=np.int64).reshape(-1)
    k = code_dimension(t)
    if len(set(cells)) != len(cells) or len(cells) != k:
        raise NotInformationSet(f"information set must have {k} distinct cells, got {len(cells)}")
    if len(values) != k:
        raise ValueError(f"expected {k} information symbols, got {len(values)}")
    H = constraint_matrix(inst)
    info = [i * t.n + j for i, j in cells]
    rest = sorted(set(range(t.m * t.n)) - set(info))
    x = np.zeros(t.m * t.n, dtype=np.int64)
    x[info] = values
    if not rest:
        if (H.matvec(x) != 0).any():
            raise NotInformationSet("information symbols violate the constraints")
        return Codeword(x.reshape(t.m, t.n))
    Hp = H.columns(rest)
    if rank(Hp) < len(rest):
        raise NotInformationSet("parity positions are not determined by the information set")
    sol = solve(Hp, H.matvec(x))
    if not sol.unique:
        raise NotInformationSet("information set admits no consistent codeword for these values")
    x[rest] = sol.x
    return Codeword(x.reshape(t.m, t.n))


def restrict_to_column(inst: Instantiation, j: int) -> Matrix:
    """Generator (row-space basis) of the code punctured to column ``j``."""
    return _punctured_generator(inst, [i * inst.topology.n + j for i in range(inst.topology.m)])


def restrict_to_row(inst: Instantiation, i: int) -> Matrix:
    n = inst.topology.n
    return _punctured_generator(inst, [i * n + j for j in range(n)])


def generator_matrix(inst: Instantiation) -> Matrix:
    H = constraint_matrix(inst)
    basis = kernel_basis(H)
    t = inst.topology
    if not basis:
        return Matrix.zeros(inst.spec, 0, t.m * t.n)
    return Matrix(inst.spec, np.array(basis))


def _punctured_generator(inst: Instantiation, coords: list[int]) -> Matrix:
    G = generator_matrix(inst)
    return G.columns(coords)
