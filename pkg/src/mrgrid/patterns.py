"""Classification of erasure patterns.

Closed-form characterizations (regularity, row/column peeling, the
bipartite-core rank count for T(1,1,h), the column-count rule for T(1,0,h))
live next to a randomized generic-rank oracle that they are checked against.

Exhaustive enumeration works on ``int`` bit masks (cell ``(i, j)`` at bit
``i*n + j``) and evaluates predicates in vectorised batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Callable, Iterator

import numpy as np

from . import _kernels
from .gf2k import make_field
from .topology import (
    ErasurePattern,
    Topology,
    constraint_matrix,
    random_instantiation,
)

MAX_ENUM_CELLS = 24
CHUNK = 1 << 18


class GridTooLarge(ValueError):
    pass


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Regularity:
    regular: bool
    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()
    excess: int = 0

    def __bool__(self):
        return self.regular

    def to_json(self) -> dict:
        out = {"regular": self.regular}
        if not self.regular:
            out["witness"] = {"rows": list(self.rows), "cols": list(self.cols), "excess": self.excess}
        return out


def _popcount(x: int) -> int:
    return bin(x).count("1")


def is_regular(E: ErasurePattern, a: int, b: int) -> Regularity:
    """Check |E ∩ (U×V)| <= v·a + u·b − a·b over all nonempty U, V.

    For a fixed V the best U is every row with more than b hits inside V
    (each such row adds its own surplus), or the single best row when no
    row has a surplus.  On failure the witness maximises the excess.
    """
    rows = E.row_masks()
    best = None
    for V in range(1, 1 << E.n):
        v = _popcount(V)
        gains = [_popcount(r & V) - b for r in rows]
        U = [i for i, g in enumerate(gains) if g > 0]
        if U:
            surplus = sum(gains[i] for i in U)
        else:
            i = max(range(E.m), key=gains.__getitem__)
            U, surplus = [i], gains[i]
        excess = surplus - a * (v - b)
        if excess > 0 and (best is None or excess > best[0]):
            best = (excess, tuple(U), tuple(j for j in range(E.n) if V >> j & 1))
    if best is None:
        return Regularity(True)
    return Regularity(False, best[1], best[2], best[0])


def is_regular_naive(E: ErasurePattern, a: int, b: int) -> bool:
    """Brute force over every nonempty U and V; oracle for :func:`is_regular`."""
    cells = E.cells
    for u in range(1, E.m + 1):
        for U in combinations(range(E.m), u):
            for v in range(1, E.n + 1):
                for V in combinations(range(E.n), v):
                    hit = sum(1 for i in U for j in V if (i, j) in cells)
                    if hit > v * a + u * b - a * b:
                        return False
    return True


# ---------------------------------------------------------------------------
# peeling
# ---------------------------------------------------------------------------


def peel(E: ErasurePattern, a: int, b: int) -> ErasurePattern:
    """Iterative row/column decoding: clear any row with <= b erasures and
    any column with <= a erasures until nothing changes."""
    cells = set(E.cells)
    while True:
        row_w, col_w = {}, {}
        for i, j in cells:
            row_w[i] = row_w.get(i, 0) + 1
            col_w[j] = col_w.get(j, 0) + 1
        keep = {(i, j) for i, j in cells if row_w[i] > b and col_w[j] > a}
        if keep == cells:
            return ErasurePattern(E.m, E.n, frozenset(keep))
        cells = keep


@dataclass(frozen=True)
class BipartiteCore:
    left: frozenset
    right: frozenset
    edges: frozenset
    components: int

    @property
    def ell(self) -> int:
        return len(self.left)

    @property
    def r(self) -> int:
        return len(self.right)

    @property
    def e(self) -> int:
        return len(self.edges)

    def degrees(self) -> dict:
        deg = {}
        for i, j in self.edges:
            deg[("L", i)] = deg.get(("L", i), 0) + 1
            deg[("R", j)] = deg.get(("R", j), 0) + 1
        return deg


def bipartite_core(E: ErasurePattern) -> BipartiteCore:
    """Strip degree-1 vertices (a lone erasure in a row or column) to a fixpoint."""
    edges = peel(E, 1, 1).cells
    left = frozenset(i for i, _ in edges)
    right = frozenset(j for _, j in edges)
    parent = {("L", i): ("L", i) for i in left}
    parent.update({("R", j): ("R", j) for j in right})

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ra, rb = find(("L", i)), find(("R", j))
        if ra != rb:
            parent[ra] = rb
    comps = len({find(x) for x in parent})
    return BipartiteCore(left, right, frozenset(edges), comps)


def correctable_T11h(E: ErasurePattern, m: int | None = None, n: int | None = None, h: int = 1) -> bool:
    core = bipartite_core(E)
    return core.e == 0 or core.e <= h + core.ell + core.r - core.components


def simple_cycle_core_check(E: ErasurePattern) -> bool:
    """Core is empty or one simple cycle (connected, all degrees exactly 2)."""
    core = bipartite_core(E)
    if core.e == 0:
        return True
    return core.components == 1 and all(d == 2 for d in core.degrees().values())


def correctable_T10h(E: ErasurePattern, m: int | None = None, n: int | None = None, h: int = 0) -> bool:
    nonempty_cols = len({j for _, j in E.cells})
    return len(E) - nonempty_cols <= h


# ---------------------------------------------------------------------------
# randomized generic-rank oracle
# ---------------------------------------------------------------------------


class OracleVerdict(Enum):
    CORRECTABLE = "Correctable"
    PROBABLY_UNCORRECTABLE = "ProbablyUncorrectable"

    def __bool__(self):
        return self is OracleVerdict.CORRECTABLE


def default_oracle_degree(top: Topology) -> int:
    return max(16, 2 * math.ceil(math.log2(max(2, top.m * top.n))) + 8)


def oracle_matrices(top: Topology, trials: int = 3, degree: int | None = None, seed=0):
    """Constraint matrices of ``trials`` uniformly random instantiations.

    The draw depends only on (topology, trials, degree, seed), never on the
    pattern, so batch and single-pattern oracle calls agree exactly.
    """
    spec = make_field(degree or default_oracle_degree(top))
    rng = np.random.default_rng(seed)
    return spec, [constraint_matrix(random_instantiation(top, spec, rng)).data for _ in range(trials)]


def correctable_oracle(
    top: Topology, E: ErasurePattern, trials: int = 3, degree: int | None = None, seed=0
) -> OracleVerdict:
    """Correctable as soon as one random instantiation reaches rank |E| on
    the erased columns (a certificate); otherwise ProbablyUncorrectable.
    Each failed trial errs with probability <= |E| / 2^degree."""
    if len(E) == 0:
        return OracleVerdict.CORRECTABLE
    ok = oracle_batch(top, trials, degree, seed)(np.array([E.mask], dtype=np.int64))
    return OracleVerdict.CORRECTABLE if ok[0] else OracleVerdict.PROBABLY_UNCORRECTABLE


def oracle_batch(top: Topology, trials: int = 3, degree: int | None = None, seed=0):
    spec, mats = oracle_matrices(top, trials, degree, seed)

    def predicate(masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        weight = _kernels.popcount(masks)
        ok = weight == 0
        todo = np.nonzero(~ok & (weight <= top.num_constraints))[0]
        for H in mats:
            if todo.size == 0:
                break
            ranks = _kernels.rank_of_columns(H, masks[todo], spec.poly, spec.degree)
            hit = ranks == weight[todo]
            ok[todo[hit]] = True
            todo = todo[~hit]
        return ok

    return predicate


# ---------------------------------------------------------------------------
# batch predicates over bit masks
# ---------------------------------------------------------------------------


def _row_masks(masks: np.ndarray, m: int, n: int) -> np.ndarray:
    full = (1 << n) - 1
    return np.stack([(masks >> (i * n)) & full for i in range(m)], axis=1)


def regular_batch(top: Topology) -> Callable[[np.ndarray], np.ndarray]:
    def predicate(masks):
        return _kernels.regular_rows(_row_masks(np.asarray(masks, np.int64), top.m, top.n), top.n, top.a, top.b)

    return predicate


def t10h_batch(top: Topology) -> Callable[[np.ndarray], np.ndarray]:
    col_mask = sum(1 << (i * top.n) for i in range(top.m))

    def predicate(masks):
        masks = np.asarray(masks, np.int64)
        nonempty = sum(((masks & (col_mask << j)) != 0).astype(np.int64) for j in range(top.n))
        return _kernels.popcount(masks) - nonempty <= top.h

    return predicate


def t11h_batch(top: Topology) -> Callable[[np.ndarray], np.ndarray]:
    def predicate(masks):
        return _kernels.t11h(masks, top.m, top.n, top.h)

    return predicate


def simple_cycle_batch(top: Topology) -> Callable[[np.ndarray], np.ndarray]:
    # e >= l + r on a core with all degrees >= 2, so e <= 1 + l + r - c holds
    # exactly for an empty core or a single simple cycle
    def predicate(masks):
        return _kernels.t11h(masks, top.m, top.n, 1)

    return predicate


PREDICATES = {
    "regular": regular_batch,
    "t10h": t10h_batch,
    "t11h": t11h_batch,
    "simple-cycle": simple_cycle_batch,
}


def resolve_predicate(top: Topology, predicate, trials=3, degree=None, seed=0):
    if callable(predicate):
        return predicate
    if predicate == "oracle":
        return oracle_batch(top, trials, degree, seed)
    try:
        return PREDICATES[predicate](top)
    except KeyError:
        raise ValueError(f"unknown predicate {predicate!r}") from None


def iter_mask_chunks(top: Topology, shard: tuple[int, int] | None = None) -> Iterator[np.ndarray]:
    """All 2^(mn) masks in ascending order, optionally one contiguous shard."""
    total = 1 << (top.m * top.n)
    lo, hi = 0, total
    if shard is not None:
        index, count = shard
        if not 0 <= index < count:
            raise ValueError(f"bad shard {shard}")
        lo, hi = total * index // count, total * (index + 1) // count
    for start in range(lo, hi, CHUNK):
        yield np.arange(start, min(hi, start + CHUNK), dtype=np.int64)


def _check_size(top: Topology):
    if top.m * top.n > MAX_ENUM_CELLS:
        raise GridTooLarge(f"{top.m}x{top.n} grid has more than {MAX_ENUM_CELLS} cells")


def correctable_masks(
    top: Topology, predicate="oracle", trials=3, degree=None, seed=0, shard=None
) -> np.ndarray:
    _check_size(top)
    pred = resolve_predicate(top, predicate, trials, degree, seed)
    out = [chunk[pred(chunk)] for chunk in iter_mask_chunks(top, shard)]
    return np.concatenate(out) if out else np.zeros(0, np.int64)


def enumerate_correctable(
    top: Topology, predicate="oracle", trials=3, degree=None, seed=0, shard=None
) -> set[ErasurePattern]:
    masks = correctable_masks(top, predicate, trials, degree, seed, shard)
    return {ErasurePattern.from_mask(top.m, top.n, int(x)) for x in masks}


@dataclass
class ConjectureReport:
    """Regularity vs oracle on every pattern of a T(a,b,0) grid."""

    topology: Topology
    total: int
    regular: int
    correctable: int
    regular_not_correctable: list
    correctable_not_regular: list

    def to_json(self) -> dict:
        return {
            "topology": self.topology.to_json(),
            "patterns": self.total,
            "regular": self.regular,
            "correctable": self.correctable,
            "regular_but_uncorrectable": [ErasurePattern.from_mask(self.topology.m, self.topology.n, x).to_json()["cells"] for x in self.regular_not_correctable],
            "irregular_but_correctable": [ErasurePattern.from_mask(self.topology.m, self.topology.n, x).to_json()["cells"] for x in self.correctable_not_regular],
        }


def regularity_report(top: Topology, trials=3, degree=None, seed=0, limit=50) -> ConjectureReport:
    """Compare regularity with the oracle.  For a >= 2 this is evidence only."""
    _check_size(top)
    reg_pred = regular_batch(top)
    ora_pred = oracle_batch(top, trials, degree, seed)
    n_reg = n_cor = total = 0
    rnc, cnr = [], []
    for chunk in iter_mask_chunks(top):
        reg = reg_pred(chunk)
        cor = ora_pred(chunk)
        total += chunk.size
        n_reg += int(reg.sum())
        n_cor += int(cor.sum())
        rnc.extend(int(x) for x in chunk[reg & ~cor][: max(0, limit - len(rnc))])
        cnr.extend(int(x) for x in chunk[cor & ~reg][: max(0, limit - len(cnr))])
    return ConjectureReport(top, total, n_reg, n_cor, rnc, cnr)
