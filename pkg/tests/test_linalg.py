import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrgrid.gf2k import make_field
from mrgrid.linalg import (
    DimensionMismatch,
    Matrix,
    NotSquare,
    SolveStatus,
    determinant,
    kernel_basis,
    rank,
    row_reduce,
    solve,
)

F16 = make_field(4)
F256 = make_field(8)


def random_matrix(spec, rows, cols, rng):
    return Matrix(spec, rng.integers(0, spec.size, (rows, cols)))


def leibniz_det(A):
    """Permutation expansion; signs vanish in characteristic 2."""
    k = A.rows
    total = 0
    for perm in itertools.permutations(range(k)):
        term = 1
        for i, j in enumerate(perm):
            term = A.spec.mul(term, int(A.data[i, j]))
        total ^= term
    return total


def test_rank_identity_and_zero():
    assert rank(Matrix.identity(F16, 5)) == 5
    assert rank(Matrix.zeros(F16, 3, 4)) == 0


def test_vandermonde_rank():
    s = [0x3, 0x7, 0xA]
    rows = [[F16.pow(x, r) for x in s] for r in range(3)]
    assert rank(Matrix(F16, rows)) == 3


def test_rref_shape(rng):
    for _ in range(30):
        A = random_matrix(F16, 4, 6, rng)
        r, R, piv = row_reduce(A)
        assert r == len(piv)
        assert piv == sorted(piv)
        for row, c in enumerate(piv):
            col = R.data[:, c]
            assert col[row] == 1 and np.count_nonzero(col) == 1
            assert not R.data[row, :c].any()
        assert not R.data[r:].any()


def test_rank_matches_determinant(rng):
    for _ in range(40):
        A = random_matrix(make_field(2), 3, 3, rng)
        assert (rank(A) == 3) == (determinant(A) != 0)


def test_kernel_backends_agree(rng):
    from mrgrid import _kernels

    H = rng.integers(0, 256, (5, 9)).astype(np.int64)
    masks = rng.integers(0, 1 << 9, 200).astype(np.int64)
    a = _kernels._rank_columns_np(H, masks, F256.poly, 8)
    if _kernels.HAS_NUMBA:
        b = _kernels._rank_columns_nb(H, masks, F256.poly, 8)
        assert np.array_equal(a, b)
    for m, r in zip(masks[:40], a[:40]):
        cols = [k for k in range(9) if m >> k & 1]
        assert r == rank(Matrix(F256, H[:, cols]))


def test_solve_identity():
    b = [3, 1, 4]
    sol = solve(Matrix.identity(F16, 3), b)
    assert sol.status is SolveStatus.UNIQUE and list(sol.x) == b


def test_solve_inconsistent():
    assert solve(Matrix.zeros(F16, 2, 2), [1, 0]).status is SolveStatus.INCONSISTENT


def test_solve_underdetermined():
    assert solve(Matrix(F16, [[1, 1]]), [0]).status is SolveStatus.UNDERDETERMINED


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve(Matrix.identity(F16, 2), [1, 2, 3])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_solve_recovers_solution(seed, k):
    rng = np.random.default_rng(seed)
    A = random_matrix(F256, k + 2, k, rng)
    x = rng.integers(0, 256, k)
    sol = solve(A, A.matvec(x))
    assert sol.status is not SolveStatus.INCONSISTENT
    if rank(A) == k:
        assert sol.status is SolveStatus.UNIQUE and np.array_equal(sol.x, x)
    else:
        assert np.array_equal(A.matvec(sol.x), A.matvec(x))


def test_determinant_examples():
    assert determinant(Matrix.identity(F16, 4)) == 1
    assert determinant(Matrix(F16, [[5, 6], [5, 6]])) == 0
    a, b, c, d = 0x3, 0x9, 0xE, 0x6
    assert determinant(Matrix(F16, [[a, b], [c, d]])) == F16.mul(a, d) ^ F16.mul(b, c)
    with pytest.raises(NotSquare):
        determinant(Matrix.zeros(F16, 2, 3))


def test_determinant_matches_leibniz(rng):
    for k in (1, 2, 3, 4):
        for _ in range(10):
            A = random_matrix(F16, k, k, rng)
            assert determinant(A) == leibniz_det(A)


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(F16, 3)) == []
    assert len(kernel_basis(Matrix.zeros(F16, 2, 3))) == 3
    (v,) = kernel_basis(Matrix(F16, [[1, 1]]))
    assert list(v) == [1, 1]


def test_kernel_rank_nullity(rng):
    for _ in range(30):
        A = random_matrix(F16, 3, 6, rng)
        basis = kernel_basis(A)
        assert len(basis) == 6 - rank(A)
        for v in basis:
            assert not A.matvec(v).any()
        if basis:
            assert rank(Matrix(F16, np.array(basis))) == len(basis)


def test_matmul_associative(rng):
    A, B, C = (random_matrix(F256, 3, 3, rng) for _ in range(3))
    assert A.matmul(B).matmul(C) == A.matmul(B.matmul(C))
    with pytest.raises(DimensionMismatch):
        A.matmul(random_matrix(F256, 2, 3, rng))


def test_text_round_trip(rng):
    A = random_matrix(F256, 3, 5, rng)
    assert Matrix.from_text(A.to_text()) == A


def test_entries_validated():
    with pytest.raises(ValueError):
        Matrix(F16, [[16]])


def test_row_reduce_deterministic(rng):
    A = random_matrix(F16, 4, 4, rng)
    assert row_reduce(A)[1] == row_reduce(A)[1]
