import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrgrid import constructions as C
from mrgrid.cycles import has_property_A, labeling_from_instantiation, normalize_instantiation
from mrgrid.gf2k import make_field
from mrgrid.linalg import Matrix, determinant, rank
from mrgrid.patterns import correctable_T10h, is_regular
from mrgrid.topology import (
    ErasurePattern,
    Instantiation,
    InvalidTopology,
    Topology,
    code_dimension,
    constraint_matrix,
    generator_matrix,
    is_correctable_by,
)

F16 = make_field(4)
F256 = make_field(8)
PATTERN12 = ErasurePattern.from_rows(4, 6, [{0, 1, 2}, {0, 3, 4}, {1, 3, 5}, {2, 4, 5}])


def random_regular(rng, m, n, b, p=0.55):
    while True:
        mask = sum(1 << k for k in range(m * n) if rng.random() < p)
        E = ErasurePattern.from_mask(m, n, mask)
        if is_regular(E, 1, b):
            return E


def heavy_regular(rng, m, n, b):
    """Rejection-sample a regular pattern in which every nonempty row exceeds b."""
    while True:
        E = C.drop_light_rows(random_regular(rng, m, n, b, 0.6), b)
        if len(E):
            return E


# -- component codes ---------------------------------------------------------


def test_rs_parity_row():
    code = C.rs_mds(F16, 5, 4)
    assert code.parity_check.data.tolist() == [[1, 1, 1, 1, 1]]


def test_rs_whole_space():
    code = C.rs_mds(F16, 5, 5)
    assert code.parity_check.shape == (0, 5)
    assert code.generator.rows == 5


def test_rs_pairs_invertible():
    H = C.rs_mds(F16, 6, 4).parity_check
    for j1, j2 in itertools.combinations(range(6), 2):
        assert determinant(H.columns([j1, j2])) != 0


@pytest.mark.parametrize("spec", [F16, F256], ids=["GF16", "GF256"])
def test_rs_mds_up_to_8(spec):
    for n in range(1, 9):
        for k in range(0, n + 1):
            assert C.rs_mds(spec, n, k).is_mds()


def test_rs_mds_brute_force_distance():
    # minimum distance n-k+1 by enumerating a GF(4) code
    F4 = make_field(2)
    code = C.rs_mds(F4, 4, 2)
    G = code.generator
    weights = []
    for coeffs in itertools.product(range(4), repeat=2):
        if any(coeffs):
            w = np.zeros(4, np.int64)
            for c, row in zip(coeffs, G.data):
                w ^= np.array([F4.mul(c, int(x)) for x in row])
            weights.append(np.count_nonzero(w))
    assert min(weights) == 3


def test_rs_not_enough_points():
    with pytest.raises(C.NotEnoughPoints):
        C.rs_mds(make_field(2), 5, 2)
    with pytest.raises(C.NotEnoughPoints):
        C.rs_mds(F16, 3, 1, points=[1, 1, 2])


def test_non_mds_detected():
    H = Matrix(F16, [[1, 1, 0, 0], [0, 0, 1, 1]])
    assert not C.LinearCode(F16, 4, 2, H).is_mds()


def test_linear_code_json_round_trip():
    code = C.rs_mds(F256, 7, 4)
    back = C.LinearCode.from_json(code.to_json())
    assert back.parity_check == code.parity_check and (back.n, back.k) == (7, 4)


def test_tensor_parity_2x2():
    from mrgrid.patterns import peel

    inst = C.tensor_instantiation(C.parity_code(F16, 2), C.parity_code(F16, 2))
    assert code_dimension(inst.topology) == 1
    for mask in range(16):
        E = ErasurePattern.from_mask(2, 2, mask)
        assert is_correctable_by(inst, E) == (len(peel(E, 1, 1)) == 0)


def test_tensor_membership_and_dimension(rng):
    col, row = C.rs_mds(F16, 4, 2), C.rs_mds(F16, 5, 3)
    inst = C.tensor_instantiation(col, row)
    G = generator_matrix(inst)
    assert G.rows == col.k * row.k
    for _ in range(20):
        coeffs = rng.integers(0, 16, G.rows)
        w = np.zeros(20, np.int64)
        for c, g in zip(coeffs, G.data):
            w ^= np.array([F16.mul(int(c), int(x)) for x in g])
        grid = w.reshape(4, 5)
        for j in range(5):
            assert not col.parity_check.matvec(grid[:, j]).any()
        for i in range(4):
            assert not row.parity_check.matvec(grid[i]).any()


# -- explicit T(1,0,2) construction ------------------------------------------


def test_mr_t102_example():
    inst = C.mr_T102(3, 4)
    assert inst.spec.degree == 4
    assert inst.gamma[0, :, 0].tolist() == [0x0, 0x1, 0x2]
    s = [0, 1, 2]
    c = [0, 4, 8, 12]
    for i, j in itertools.product(range(3), range(4)):
        assert inst.gamma[1, i, j] == F16.square(s[i]) ^ F16.mul(c[j], s[i])
    assert (inst.alpha == 1).all()


def test_mr_t102_small_cases():
    for m in range(2, 11):
        for n in range(1, 21):
            if m * n > 20:
                continue
            try:
                inst = C.mr_T102(m, n)
            except InvalidTopology:
                assert (m - 1) * n - 1 < 2
                continue
            verdict = C.verify_mr(inst)
            assert verdict.mr, (m, n, verdict.counterexample)
            assert verdict.characterization == "t10h"


def test_zero_gamma_not_mr():
    inst = C.mr_T102(3, 4)
    zero = Instantiation(inst.topology, inst.spec, inst.alpha, inst.beta, np.zeros_like(inst.gamma))
    verdict = C.verify_mr(zero)
    assert not verdict.mr
    E = verdict.counterexample
    assert correctable_T10h(E, 3, 4, 2)
    assert max(len(E.col(j)) for j in range(4)) >= 2
    assert verdict.checked == 2144


def test_det3_reduces_to_vandermonde():
    for s1, s2, s3 in itertools.combinations(range(4), 3):
        for c in (0, 4, 8, 12):
            det, vdm = C.th_h2_det3_identity(F16, s1, s2, s3, c)
            assert det == vdm != 0


def test_det4_examples():
    assert C.th_h2_det4_identity(F256, 7, 7, 3, 9, 5, 6) == (0, 0)
    assert C.th_h2_det4_identity(F256, 0, 0, 0, 0, 0, 0) == (0, 0)


@settings(max_examples=200, deadline=None)
@given(*[st.integers(0, 255)] * 6)
def test_det4_identity_property(s1, s2, s3, s4, c1, c2):
    det, prod = C.th_h2_det4_identity(F256, s1, s2, s3, s4, c1, c2)
    assert det == prod


# -- boosting and the tailored row code --------------------------------------


def test_boost_example():
    E = ErasurePattern.from_rows(2, 5, [{0, 1, 2, 4}, {0, 2, 3, 4}])
    B = C.boost(E, 2)
    assert B.rows() == [[0, 1, 2], [0, 1, 4], [0, 2, 3], [0, 2, 4]]


def test_boost_exact_weight_unchanged():
    E = ErasurePattern.from_rows(2, 4, [{0, 1, 3}, {1, 2, 3}])
    assert C.boost(E, 2) == E


def test_boost_row_too_light():
    with pytest.raises(C.RowTooLight):
        C.boost(ErasurePattern.from_rows(2, 4, [{0}, {1, 2, 3}]), 2)


def test_boost_preserves_regularity():
    rng = np.random.default_rng(21)
    for t in range(200):
        m, n, b = [(4, 6, 2), (3, 5, 1), (5, 6, 2), (4, 5, 1)][t % 4]
        E = heavy_regular(rng, m, n, b)
        B = C.boost(E, b)
        assert is_regular(B, 1, b), E
        nonempty = [r for r in B.rows() if r]
        assert all(len(r) == b + 1 for r in nonempty)
        delta = sum(len(r) - b - 1 for r in E.rows() if r)
        assert B.m == m + delta
        union = {}
        for i, r in C._boosted_rows(E, b):
            union.setdefault(i, set()).update(r)
        assert all(union[i] == set(row) for i, row in enumerate(E.rows()))
        assert {j for _, j in B.cells} == {j for _, j in E.cells}


def test_row_code_light_rows_only():
    E = ErasurePattern.from_rows(3, 5, [{0}, {1, 2}, set()])
    code = C.row_code_for_regular_pattern(E, 2)
    assert code.is_mds() and (code.n, code.k) == (5, 3)


def _certify(E, b, code):
    inst = C.tensor_instantiation(C.parity_code(code.spec, E.m), code)
    return is_correctable_by(inst, E)


def test_row_code_twelve_cell_pattern():
    code = C.row_code_for_regular_pattern(PATTERN12, 2)
    assert (code.n, code.k) == (6, 4)
    assert _certify(PATTERN12, 2, code)


def test_row_code_not_regular():
    E = ErasurePattern(3, 3, frozenset(itertools.product([0, 1], [0, 1])))
    with pytest.raises(C.NotRegular):
        C.row_code_for_regular_pattern(E, 1)


@pytest.mark.parametrize("m,n,b", [(4, 6, 2), (3, 5, 1)])
def test_row_code_random_regular(m, n, b):
    rng = np.random.default_rng(m * 100 + n)
    for t in range(20):
        E = random_regular(rng, m, n, b)
        code = C.row_code_for_regular_pattern(E, b, seed=t)
        assert _certify(E, b, code)


def test_row_code_seed_deterministic():
    a = C.row_code_for_regular_pattern(PATTERN12, 2, seed=5)
    b = C.row_code_for_regular_pattern(PATTERN12, 2, seed=5)
    assert a.parity_check == b.parity_check


# -- verification and structure ----------------------------------------------


def test_default_characterization():
    assert C.default_characterization(Topology(3, 4, 1, 0, 2)) == "t10h"
    assert C.default_characterization(Topology(3, 3, 1, 1, 1)) == "t11h"
    assert C.default_characterization(Topology(3, 4, 1, 2, 0)) == "regular"
    assert C.default_characterization(Topology(4, 4, 2, 1, 0)) == "oracle"


def test_random_t111_mr_and_labeling():
    top = Topology(3, 3, 1, 1, 1)
    inst = C.random_mr_candidate(top, make_field(16), seed=4)
    verdict = C.verify_mr(inst)
    assert verdict.mr and verdict.characterization == "t11h"
    assert verdict.mr == C.verify_mr(inst, "oracle", degree=24, seed=1).mr
    assert has_property_A(labeling_from_instantiation(normalize_instantiation(inst)))


def test_tiny_field_not_mr():
    top = Topology(3, 3, 1, 1, 1)
    found = False
    for seed in range(20):
        if not C.verify_mr(C.random_mr_candidate(top, make_field(1), seed=seed)).mr:
            found = True
            break
    assert found


def test_mr_rank_equals_dimension():
    inst = C.mr_T102(4, 5)
    assert 20 - rank(constraint_matrix(inst)) == code_dimension(inst.topology)


def test_structure_report():
    rep = C.structure_report(C.mr_T102(3, 4))
    assert rep["dimension"] == rep["expected_dimension"] == 6
    assert rep["columns"] == [True] * 4 and rep["local_mds_ok"]


def test_verdict_json():
    js = C.verify_mr(C.mr_T102(3, 4)).to_json()
    assert js == {"mr": True, "characterization": "t10h", "patterns_checked": 2144}
