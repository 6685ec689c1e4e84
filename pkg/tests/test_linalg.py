import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hombench.linalg import ExactMatrix, LinalgError, hstack, kernel_basis, rref, solve


def mat(rows, p):
    return ExactMatrix.from_rows(rows, p)


class TestRref:
    def test_identity_f2(self):
        m = ExactMatrix.identity(2, 2)
        reduced, pivots, rank = rref(m)
        assert reduced == m
        assert pivots == [0, 1]
        assert rank == 2

    def test_zero_f3(self):
        m = ExactMatrix.zeros(3, 3, 3)
        reduced, pivots, rank = rref(m)
        assert reduced == m
        assert pivots == []
        assert rank == 0

    def test_rank_one_f2(self):
        m = mat([[1, 1], [1, 1]], 2)
        reduced, pivots, rank = rref(m)
        assert reduced == mat([[1, 1], [0, 0]], 2)
        assert rank == 1

    def test_normalizes_pivots_f5(self):
        m = mat([[2, 4], [1, 3]], 5)
        reduced, _, rank = rref(m)
        assert rank == 2
        assert reduced == ExactMatrix.identity(2, 5)


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        assert kernel_basis(ExactMatrix.identity(3, 2)) == []

    def test_zero_matrix_full_kernel(self):
        vecs = kernel_basis(ExactMatrix.zeros(2, 3, 5))
        assert len(vecs) == 3

    def test_sum_kernel_f2(self):
        vecs = kernel_basis(mat([[1, 1]], 2))
        assert len(vecs) == 1
        assert vecs[0] == ExactMatrix.column([1, 1], 2)


class TestSolve:
    def test_identity(self):
        m = ExactMatrix.identity(2, 3)
        b = ExactMatrix.column([1, 0], 3)
        assert solve(m, b) == b

    def test_inconsistent(self):
        m = mat([[0]], 2)
        b = ExactMatrix.column([1], 2)
        assert solve(m, b) is None

    def test_underdetermined_verifies(self):
        m = mat([[1, 1]], 2)
        b = ExactMatrix.column([0], 2)
        x = solve(m, b)
        assert x is not None
        assert (m @ x) == b


class TestFieldDiscipline:
    def test_mixed_characteristic_rejected(self):
        a = ExactMatrix.identity(2, 2)
        b = ExactMatrix.identity(2, 3)
        with pytest.raises(LinalgError):
            a @ b
        with pytest.raises(LinalgError):
            a + b

    def test_nonprime_rejected(self):
        with pytest.raises(LinalgError):
            ExactMatrix.zeros(1, 1, 4)

    def test_huge_characteristic_rejected(self):
        with pytest.raises(LinalgError):
            ExactMatrix.zeros(1, 1, 2**31 + 11)

    def test_large_prime_matmul_is_exact(self):
        p = 2147483647  # largest prime below 2^31
        a = mat([[p - 1, p - 2], [1, p - 1]], p)
        sq = a @ a
        expect = (a.array.astype(object) @ a.array.astype(object)) % p
        assert np.array_equal(sq.array, expect.astype(np.int64))


class TestInverse:
    def test_invertible(self):
        m = mat([[1, 1], [0, 1]], 2)
        inv = m.inverse()
        assert inv is not None
        assert m @ inv == ExactMatrix.identity(2, 2)

    def test_singular(self):
        assert mat([[1, 1], [1, 1]], 2).inverse() is None


small_primes = st.sampled_from([2, 3, 5])


@st.composite
def matrices(draw, max_dim=5):
    p = draw(small_primes)
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    entries = draw(
        st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r)
    )
    arr = np.array(entries, dtype=np.int64).reshape(r, c)
    return ExactMatrix(arr, p)


@settings(max_examples=120, deadline=None)
@given(matrices())
def test_rref_idempotent(m):
    reduced, _, rank = rref(m)
    again, _, rank2 = rref(reduced)
    assert again == reduced
    assert rank == rank2


@settings(max_examples=120, deadline=None)
@given(matrices())
def test_rank_of_transpose(m):
    assert m.rank() == m.transpose().rank()


@settings(max_examples=120, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert m.rank() + m.kernel_matrix().cols == m.cols


@settings(max_examples=120, deadline=None)
@given(matrices())
def test_kernel_vectors_annihilate(m):
    km = m.kernel_matrix()
    if km.cols:
        assert (m @ km).is_zero()
    # kernel vectors are independent
    assert km.rank() == km.cols


@settings(max_examples=120, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_solve_round_trip(m, rnd):
    if m.rows == 0 or m.cols == 0:
        return
    x0 = ExactMatrix.column([rnd.randrange(m.p) for _ in range(m.cols)], m.p)
    b = m @ x0
    x = solve(m, b)
    assert x is not None
    assert (m @ x) == b


def test_hstack_requires_same_field():
    with pytest.raises(LinalgError):
        hstack([ExactMatrix.identity(1, 2), ExactMatrix.identity(1, 3)])
