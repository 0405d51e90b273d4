import itertools
import math

import numpy as np
import pytest

from mrgrid import _kernels
from mrgrid import cycles as C
from mrgrid.constructions import random_mr_candidate, verify_mr
from mrgrid.gf2k import make_field
from mrgrid.topology import ErasurePattern, Instantiation, InvalidTopology, Topology, is_correctable_by, random_instantiation


def brute_cycle_count(nl, nr):
    """Count edge subsets forming one connected 2-regular subgraph."""
    edges = list(itertools.product(range(nl), range(nr)))
    total = 0
    for mask in range(1, 1 << len(edges)):
        sub = [e for k, e in enumerate(edges) if mask >> k & 1]
        deg = {}
        for i, j in sub:
            deg[("L", i)] = deg.get(("L", i), 0) + 1
            deg[("R", j)] = deg.get(("R", j), 0) + 1
        if any(d != 2 for d in deg.values()):
            continue
        seen, stack = set(), [next(iter(deg))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            for i, j in sub:
                if v == ("L", i):
                    stack.append(("R", j))
                elif v == ("R", j):
                    stack.append(("L", i))
        total += len(seen) == len(deg)
    return total


def zero_labeling(nl, nr, d=1):
    return C.EdgeLabeling(nl, nr, d, np.zeros((nl, nr), np.int64))


# -- enumeration -------------------------------------------------------------


@pytest.mark.parametrize("nl,nr,count", [(2, 2, 1), (3, 3, 15), (1, 5, 0), (4, 4, 204), (2, 3, 3)])
def test_cycle_counts(nl, nr, count):
    assert sum(1 for _ in C.enumerate_simple_cycles(nl, nr)) == count
    assert C.count_simple_cycles(nl, nr) == count


def test_k33_split():
    lengths = [len(c.vertices) for c in C.enumerate_simple_cycles(3, 3)]
    assert lengths.count(4) == 9 and lengths.count(6) == 6


@pytest.mark.parametrize("nl,nr", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)])
def test_counts_match_brute_force(nl, nr):
    assert C.count_simple_cycles(nl, nr) == brute_cycle_count(nl, nr)


def test_enumeration_is_canonical_and_stable():
    a = [c.vertices for c in C.enumerate_simple_cycles(4, 4)]
    b = [c.vertices for c in C.enumerate_simple_cycles(4, 4)]
    assert a == b
    assert len(set(a)) == len(a)
    for vs in a:
        assert C.SimpleCycle.canonical(vs[::-1]).vertices == vs
        assert C.SimpleCycle.canonical(vs[2:] + vs[:2]).vertices == vs


def test_edge_sets_are_distinct_cycles():
    sets = {frozenset(c.edges(4)) for c in C.enumerate_simple_cycles(4, 4)}
    assert len(sets) == 204


def test_max_len_filter():
    assert sum(1 for _ in C.enumerate_simple_cycles(4, 4, max_len=4)) == 36
    assert C.count_simple_cycles(9, 9, 6) == math.comb(9, 2) ** 2 + math.comb(9, 3) ** 2 * 6


def test_too_many_cycles():
    with pytest.raises(C.TooManyCycles):
        C.has_property_A(zero_labeling(9, 9))


# -- Property A --------------------------------------------------------------


def test_property_a_examples():
    r = C.has_property_A(zero_labeling(2, 2))
    assert not r.holds and r.cycle is not None
    one = C.EdgeLabeling(2, 2, 1, [[1, 0], [0, 0]])
    assert C.has_property_A(one).holds


def test_property_a_k22_exhaustive():
    good = [L for L in C.all_labelings(2, 2, 1) if C.has_property_A(L)]
    assert len(good) == 8
    assert all(int(np.bitwise_xor.reduce(L.labels.ravel())) == 1 for L in good)


def test_paths_agree_with_cycles():
    rng = np.random.default_rng(8)
    seen = set()
    for _ in range(100):
        L = C.random_labeling(3, 3, int(rng.integers(2, 5)), rng)
        by_cycles = C.has_property_A(L).holds
        assert C.property_A_by_paths(L) == by_cycles
        seen.add(by_cycles)
    assert seen == {True, False}


def test_zero_cycle_witness_sums_to_zero():
    rng = np.random.default_rng(2)
    for _ in range(50):
        L = C.random_labeling(4, 4, 2, rng)
        r = C.has_property_A(L)
        if not r.holds:
            vs = r.cycle.vertices
            assert L.weight(vs + (vs[0],)) == 0


def test_scan_backends_agree():
    rng = np.random.default_rng(4)
    for _ in range(30):
        labels = rng.integers(0, 8, (4, 5)).astype(np.int64)
        py = _kernels._scan_cycles_py(labels, 8, False)
        assert py[0] == C.count_simple_cycles(4, 5)
        if _kernels.HAS_NUMBA:
            nb = _kernels._scan_cycles_nb(labels, 8, True)
            pz = _kernels._scan_cycles_py(labels, 8, True)
            assert nb[0] == pz[0] and list(nb[1]) == list(pz[1])


# -- instantiation <-> labeling ----------------------------------------------


def test_normalize_fixed_point():
    rng = np.random.default_rng(0)
    L = C.random_labeling(3, 3, 8, rng)
    inst = C.instantiation_from_labeling(L, make_field(8))
    assert C.normalize_instantiation(inst) == inst
    assert C.labeling_from_instantiation(inst) == L


def test_normalize_zero_local():
    top = Topology(2, 3, 1, 1, 1)
    inst = Instantiation(top, make_field(4), [[0], [1]], [[1], [1], [1]], [[[1, 2, 3], [3, 4, 5]]])
    with pytest.raises(C.ZeroLocalCoefficient):
        C.normalize_instantiation(inst)


def test_labeling_needs_normalized_t111():
    top = Topology(2, 3, 1, 1, 1)
    inst = Instantiation(top, make_field(4), [[2], [1]], [[1], [1], [1]], [[[1, 2, 3], [3, 4, 5]]])
    with pytest.raises(C.NotNormalized):
        C.labeling_from_instantiation(inst)


def test_zero_gamma_gives_zero_labeling():
    top = Topology(2, 3, 1, 1, 1)
    inst = Instantiation(top, make_field(4), [[1], [1]], [[1], [1], [1]], np.zeros((1, 2, 3)))
    L = C.labeling_from_instantiation(inst)
    assert not L.labels.any() and not C.has_property_A(L)


def test_normalization_preserves_correctable_set():
    inst = random_mr_candidate(Topology(3, 3, 1, 1, 1), make_field(3), seed=9)
    norm = C.normalize_instantiation(inst)
    for mask in range(512):
        E = ErasurePattern.from_mask(3, 3, mask)
        assert is_correctable_by(inst, E) == is_correctable_by(norm, E)


def test_no_2x2_t111():
    # one global check on a 2x2 grid with local checks leaves dimension 0
    with pytest.raises(InvalidTopology):
        Topology(2, 2, 1, 1, 1)


@pytest.mark.parametrize("m,n", [(2, 3), (3, 3), (3, 4)])
def test_certified_mr_labeling_has_property_a(m, n):
    inst = random_mr_candidate(Topology(m, n, 1, 1, 1), make_field(16), seed=n)
    assert verify_mr(inst).mr
    L = C.labeling_from_instantiation(C.normalize_instantiation(inst))
    assert C.has_property_A(L).holds


def test_mr_iff_property_a_small_field():
    rng = np.random.default_rng(5)
    top = Topology(3, 3, 1, 1, 1)
    for _ in range(15):
        L = C.random_labeling(3, 3, 3, rng)
        inst = C.instantiation_from_labeling(L, make_field(3))
        assert verify_mr(inst).mr == C.has_property_A(L).holds


def test_labeling_json_round_trip():
    L = C.random_labeling(2, 3, 5, np.random.default_rng(1))
    assert C.EdgeLabeling.from_json(L.to_json()) == L
    bad = L.to_json()
    bad["labels"] = bad["labels"][1:]
    with pytest.raises(ValueError):
        C.EdgeLabeling.from_json(bad)


# -- paths -------------------------------------------------------------------


def test_path_bound_arithmetic():
    assert C.path_bound(3, 9) == math.ceil(3 ** (math.log2(3) + 1) * 9 ** (2 - math.log2(3)))
    assert C.path_bound(3, 9) == 43
    assert C.path_bound(1, 4) == 1


def test_path_count_k1():
    L = C.random_labeling(4, 4, 3, np.random.default_rng(0))
    size, bound = C.path_class_count(L, 0, 5, 1)
    assert size <= 1 == bound


def test_path_total_k99():
    assert sum(1 for _ in C.simple_paths(9, 9, 0, 9, 3)) == 64


def test_path_count_reports_on_bad_labeling():
    size, bound = C.path_class_count(zero_labeling(9, 9), 0, 9, 3)
    assert size == 64 and bound == 43


def test_path_errors():
    L = zero_labeling(4, 4)
    with pytest.raises(C.KTooLarge):
        C.path_class_count(L, 0, 5, 3)
    with pytest.raises(ValueError):
        C.path_class_count(L, 1, 1, 1)


# -- dimension search --------------------------------------------------------


def test_min_dimension_k22():
    res = C.min_label_dimension(2, 3)
    assert res.found and res.d == 1 and C.has_property_A(res.labeling)


def test_min_dimension_k33_small_d():
    res = C.min_label_dimension(3, 2)
    assert not res.found and res.searched == {1: 1 << 9, 2: 1 << 18}


@pytest.mark.slow
def test_min_dimension_k33_exhaustive_d3():
    # the cycle space of K_{3,3} has dimension 4 and every nonzero element is
    # a simple cycle, so the labels must embed it: d >= 4
    res = C.min_label_dimension(3, 3)
    assert not res.found and res.searched[3] == 1 << 27


def test_min_dimension_k33_random_d4():
    res = C.min_label_dimension(3, 4, "random", budget=200, seed=0)
    assert res.found and res.d == 4 and C.has_property_A(res.labeling)


def test_random_zero_budget():
    res = C.min_label_dimension(3, 5, "random", budget=0)
    assert not res.found and res.d == 5


def test_search_guard():
    with pytest.raises(C.SearchSpaceTooLarge):
        C.min_label_dimension(4, 1)
    with pytest.raises(C.SearchSpaceTooLarge):
        C.min_label_dimension(3, 4)
