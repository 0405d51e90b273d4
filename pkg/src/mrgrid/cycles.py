"""Edge labelings of complete bipartite graphs with no zero-sum simple cycle.

Vertices of K_{n_left,n_right} are numbered ``0..n_left-1`` on the left and
``n_left..n_left+n_right-1`` on the right; edge ``(i, j)`` joins left ``i``
to right ``n_left + j``.  Labels are ``d``-bit integers combined by XOR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

import numpy as np

from . import _kernels
from .topology import Instantiation, Topology

CYCLE_LIMIT = 10**7
MAX_LABEL_BITS = 62


class TooManyCycles(ValueError):
    pass


class ZeroLocalCoefficient(ValueError):
    pass


class NotNormalized(ValueError):
    pass


class KTooLarge(ValueError):
    pass


class SearchSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EdgeLabeling:
    n_left: int
    n_right: int
    d: int
    labels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.labels, dtype=np.int64).reshape(self.n_left, self.n_right)
        if not 0 <= self.d <= MAX_LABEL_BITS:
            raise ValueError(f"label dimension must be in [0, {MAX_LABEL_BITS}]")
        if arr.size and (arr.min() < 0 or arr.max() >= (1 << self.d)):
            raise ValueError(f"label does not fit in {self.d} bits")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    def __eq__(self, other):
        return (
            isinstance(other, EdgeLabeling)
            and (self.n_left, self.n_right, self.d) == (other.n_left, other.n_right, other.d)
            and np.array_equal(self.labels, other.labels)
        )

    def label(self, u: int, w: int) -> int:
        if u > w:
            u, w = w, u
        return int(self.labels[u, w - self.n_left])

    def weight(self, vertices) -> int:
        """XOR of the labels along a vertex walk (not closed)."""
        acc = 0
        for u, w in zip(vertices, vertices[1:]):
            acc ^= self.label(u, w)
        return acc

    def to_json(self) -> dict:
        return {
            "n_left": self.n_left,
            "n_right": self.n_right,
            "d": self.d,
            "labels": [[i, j, hex(int(self.labels[i, j]))] for i in range(self.n_left) for j in range(self.n_right)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EdgeLabeling":
        nl, nr = int(obj["n_left"]), int(obj["n_right"])
        arr = np.zeros((nl, nr), dtype=np.int64)
        seen = set()
        for i, j, x in obj["labels"]:
            if (i, j) in seen:
                raise ValueError(f"edge ({i}, {j}) labeled twice")
            seen.add((i, j))
            arr[i, j] = int(str(x), 16)
        if len(seen) != nl * nr:
            raise ValueError("every edge of the complete bipartite graph needs a label")
        return cls(nl, nr, int(obj["d"]), arr)


@dataclass(frozen=True)
class SimpleCycle:
    """Closed walk listed from its smallest vertex, second vertex < last."""

    vertices: tuple[int, ...]

    def __len__(self):
        return len(self.vertices)

    def edges(self, n_left: int) -> list[tuple[int, int]]:
        out = []
        L = len(self.vertices)
        for t in range(L):
            u, w = self.vertices[t], self.vertices[(t + 1) % L]
            out.append((u, w - n_left) if u < w else (w, u - n_left))
        return out

    @classmethod
    def canonical(cls, vertices) -> "SimpleCycle":
        vs = list(vertices)
        k = vs.index(min(vs))
        vs = vs[k:] + vs[:k]
        if len(vs) > 2 and vs[1] > vs[-1]:
            vs = [vs[0]] + vs[1:][::-1]
        return cls(tuple(vs))


# ---------------------------------------------------------------------------
# instantiation <-> labeling
# ---------------------------------------------------------------------------


def normalize_instantiation(inst: Instantiation) -> Instantiation:
    """Rescale x_ij -> alpha_i beta_j x_ij so every local check becomes a
    plain XOR; global coefficients pick up alpha_i^-1 beta_j^-1."""
    t = inst.topology
    if t.a != 1 or t.b != 1:
        raise ValueError(f"normalization needs T(1,1,h), got {t}")
    alpha, beta = inst.alpha[:, 0], inst.beta[:, 0]
    if (alpha == 0).any() or (beta == 0).any():
        raise ZeroLocalCoefficient("some local coefficient is zero")
    F = inst.spec
    ainv = [F.inv(int(x)) for x in alpha]
    binv = [F.inv(int(x)) for x in beta]
    gamma = np.zeros_like(inst.gamma)
    for k in range(t.h):
        for i in range(t.m):
            for j in range(t.n):
                gamma[k, i, j] = F.mul(F.mul(int(inst.gamma[k, i, j]), ainv[i]), binv[j])
    return Instantiation(t, F, np.ones((t.m, 1), np.int64), np.ones((t.n, 1), np.int64), gamma)


def labeling_from_instantiation(inst: Instantiation) -> EdgeLabeling:
    t = inst.topology
    if (t.a, t.b, t.h) != (1, 1, 1):
        raise NotNormalized(f"expected T(1,1,1), got {t}")
    if (inst.alpha != 1).any() or (inst.beta != 1).any():
        raise NotNormalized("local coefficients must all be 1; normalize first")
    return EdgeLabeling(t.m, t.n, inst.spec.degree, inst.gamma[0])


def instantiation_from_labeling(L: EdgeLabeling, spec) -> Instantiation:
    top = Topology(L.n_left, L.n_right, 1, 1, 1)
    return Instantiation(
        top, spec, np.ones((L.n_left, 1), np.int64), np.ones((L.n_right, 1), np.int64), L.labels[None, :, :]
    )


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------


def count_simple_cycles(n_left: int, n_right: int, max_len: int | None = None) -> int:
    """Closed form: C(a,k) C(b,k) k! (k-1)! / 2 cycles of length 2k."""
    top = min(n_left, n_right)
    total = 0
    for k in range(2, top + 1):
        if max_len is not None and 2 * k > max_len:
            break
        total += math.comb(n_left, k) * math.comb(n_right, k) * math.factorial(k) * math.factorial(k - 1) // 2
    return total


def _guard(n_left, n_right, max_len):
    c = count_simple_cycles(n_left, n_right, max_len)
    if c > CYCLE_LIMIT:
        raise TooManyCycles(f"K_{{{n_left},{n_right}}} has {c} cycles of length <= {max_len}")
    return c


def _max_len(n_left, n_right, max_len):
    full = 2 * min(n_left, n_right)
    return full if max_len is None else min(full, max_len)


def enumerate_simple_cycles(n_left: int, n_right: int, max_len: int | None = None) -> Iterator[SimpleCycle]:
    L = _max_len(n_left, n_right, max_len)
    _guard(n_left, n_right, L)
    for vs in _kernels.iter_cycles_py(n_left, n_right, L):
        yield SimpleCycle(vs)


@dataclass(frozen=True)
class PropertyA:
    holds: bool
    cycle: SimpleCycle | None = None
    cycles_checked: int = 0

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"holds": self.holds, "cycles_checked": self.cycles_checked}
        if self.cycle is not None:
            out["zero_cycle"] = list(self.cycle.vertices)
        return out


def has_property_A(L: EdgeLabeling, max_len: int | None = None) -> PropertyA:
    """Every simple cycle (of length <= max_len, if given) has a nonzero
    XOR of labels.  In characteristic 2 this is the same as requiring that
    internally disjoint paths with common endpoints carry distinct weights."""
    ml = _max_len(L.n_left, L.n_right, max_len)
    _guard(L.n_left, L.n_right, ml)
    count, cyc = _kernels.scan_cycles(L.labels, ml, True)
    if cyc.size:
        return PropertyA(False, SimpleCycle(tuple(int(v) for v in cyc)), count)
    return PropertyA(True, None, count)


def simple_paths(n_left: int, n_right: int, v1: int, v2: int, length: int | None = None) -> Iterator[tuple[int, ...]]:
    nv = n_left + n_right
    on = [False] * nv
    path = [v1]
    on[v1] = True

    def nbrs(u):
        return range(n_left, nv) if u < n_left else range(n_left)

    def walk():
        u = path[-1]
        if u == v2:
            if length is None or len(path) - 1 == length:
                yield tuple(path)
            return
        if length is not None and len(path) - 1 >= length:
            return
        for w in nbrs(u):
            if not on[w]:
                on[w] = True
                path.append(w)
                yield from walk()
                path.pop()
                on[w] = False

    yield from walk()


def property_A_by_paths(L: EdgeLabeling) -> bool:
    """Direct check: no two internally disjoint v1-v2 paths share a weight."""
    nv = L.n_left + L.n_right
    for v1 in range(nv):
        for v2 in range(v1 + 1, nv):
            by_weight: dict[int, list[frozenset]] = {}
            for p in simple_paths(L.n_left, L.n_right, v1, v2):
                inner = frozenset(p[1:-1])
                w = L.weight(p)
                for other in by_weight.get(w, ()):
                    if not (inner & other):
                        return False
                by_weight.setdefault(w, []).append(inner)
    return True


def path_bound(k: int, D: int) -> int:
    lg = math.log2(k)
    return math.ceil(k ** (lg + 1) * D ** (k - lg - 1) - 1e-9)


def path_class_count(L: EdgeLabeling, v1: int, v2: int, k: int) -> tuple[int, int]:
    """Largest number of length-k v1-v2 simple paths sharing one weight,
    next to the bound k^(log2 k + 1) * D^(k - log2 k - 1), D the max degree."""
    D = max(L.n_left, L.n_right)
    if v1 == v2:
        raise ValueError("endpoints must differ")
    if k < 1 or k * k > D:
        raise KTooLarge(f"need 1 <= k <= sqrt(D) = {math.sqrt(D):.3f}, got k={k}")
    counts: dict[int, int] = {}
    for p in simple_paths(L.n_left, L.n_right, v1, v2, k):
        w = L.weight(p)
        counts[w] = counts.get(w, 0) + 1
    return max(counts.values(), default=0), path_bound(k, D)


# ---------------------------------------------------------------------------
# minimal label dimension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionSearch:
    found: bool
    d: int
    labeling: EdgeLabeling | None = None
    searched: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"found": self.found, "d": self.d, "labelings_tried": self.searched}
        if self.labeling is not None:
            out["labeling"] = self.labeling.to_json()
        return out


def _cycle_edge_index(n: int) -> list[list[int]]:
    return [[i * n + j for i, j in c.edges(n)] for c in enumerate_simple_cycles(n, n)]


def min_label_dimension(n: int, d_max: int, strategy: str = "exhaustive", budget: int = 0, seed=0) -> DimensionSearch:
    """Smallest d <= d_max admitting a labeling of K_{n,n} without zero-sum
    simple cycles.  ``exhaustive`` scans labelings in lexicographic order
    (n <= 3, d <= 3); ``random`` tries ``budget`` uniform labelings per d."""
    if strategy == "exhaustive" and (n > 3 or d_max > 3):
        raise SearchSpaceTooLarge(f"exhaustive search limited to n <= 3, d <= 3 (got n={n}, d_max={d_max})")
    if strategy not in ("exhaustive", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    cycles = _cycle_edge_index(n)
    E = n * n
    tried = {}
    rng = np.random.default_rng(seed)
    for d in range(1, d_max + 1):
        if strategy == "exhaustive":
            hit, count = _exhaustive_labels(cycles, E, d)
        else:
            hit, count = _random_labels(cycles, E, d, budget, rng)
        tried[d] = count
        if hit is not None:
            L = EdgeLabeling(n, n, d, hit.reshape(n, n))
            assert has_property_A(L).holds
            return DimensionSearch(True, d, L, tried)
    return DimensionSearch(False, d_max, None, tried)


def _zero_free(batch: np.ndarray, cycles: list[list[int]]) -> np.ndarray:
    ok = np.ones(batch.shape[0], dtype=bool)
    for cyc in cycles:
        ok &= np.bitwise_xor.reduce(batch[:, cyc], axis=1) != 0
    return ok


def _exhaustive_labels(cycles, E, d, chunk=1 << 16):
    total = 1 << (E * d)
    q = 1 << d
    digits = q ** np.arange(E - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        batch = (idx[:, None] // digits[None, :]) % q
        ok = _zero_free(batch, cycles)
        if ok.any():
            first = int(np.argmax(ok))
            return batch[first], start + first + 1
    return None, total


def _random_labels(cycles, E, d, budget, rng, chunk=4096):
    done = 0
    while done < budget:
        size = min(chunk, budget - done)
        batch = rng.integers(0, 1 << d, size=(size, E), dtype=np.int64)
        ok = _zero_free(batch, cycles)
        if ok.any():
            first = int(np.argmax(ok))
            return batch[first], done + first + 1
        done += size
    return None, done


def random_labeling(n_left: int, n_right: int, d: int, rng) -> EdgeLabeling:
    return EdgeLabeling(n_left, n_right, d, rng.integers(0, 1 << d, size=(n_left, n_right), dtype=np.int64))


def all_labelings(n_left: int, n_right: int, d: int) -> Iterator[EdgeLabeling]:
    for labels in product(range(1 << d), repeat=n_left * n_right):
        yield EdgeLabeling(n_left, n_right, d, np.array(labels).reshape(n_left, n_right))
