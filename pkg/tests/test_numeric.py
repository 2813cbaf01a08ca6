import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from opvessel.errors import NotSquareError
from opvessel.numeric import (
    DEFAULT_TOL,
    ToleranceProfile,
    cluster_values,
    eig_decompose,
    invariant_closure,
    multiset_distance,
    nullspace_basis,
    rank_with_tol,
)

from instances import crandn


class TestToleranceProfile:
    def test_defaults(self):
        tol = ToleranceProfile()
        assert (tol.residual_tol, tol.rank_tol, tol.eig_cluster_tol) == (1e-9, 1e-10, 1e-7)

    @pytest.mark.parametrize("bad", [-1e-3, 1.0, 2.0])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            ToleranceProfile(residual_tol=bad)

    def test_direction_tol(self):
        assert ToleranceProfile(residual_tol=1e-8).direction_tol == pytest.approx(1e-4)


class TestNullspace:
    def test_zero_matrix(self):
        K = nullspace_basis(np.zeros((2, 2)))
        assert K.shape == (2, 2)
        assert_allclose(K.conj().T @ K, np.eye(2), atol=1e-14)

    def test_identity(self):
        assert nullspace_basis(np.eye(3)).shape == (3, 0)

    def test_rank_one(self):
        K = nullspace_basis([[1, 1], [1, 1]])
        assert K.shape == (2, 1)
        assert abs(abs(np.vdot(K[:, 0], [1, -1])) / np.sqrt(2) - 1) < 1e-12

    def test_absolute_cutoff(self):
        M = np.diag([1e-12, 1e-13])
        assert nullspace_basis(M).shape[1] == 0  # relative cutoff: full rank
        assert nullspace_basis(M, cutoff=1e-10).shape[1] == 2

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**31))
    def test_kernel_property(self, rows, cols, rank, seed):
        rng = np.random.default_rng(seed)
        rank = min(rank, rows, cols)
        M = crandn(rng, rows, rank) @ crandn(rng, rank, cols)
        K = nullspace_basis(M)
        assert K.shape[1] == cols - rank_with_tol(M)
        assert np.linalg.norm(M @ K) <= DEFAULT_TOL.residual_tol * max(np.linalg.norm(M, 2), 1)
        assert_allclose(K.conj().T @ K, np.eye(K.shape[1]), atol=1e-12)


class TestRank:
    def test_examples(self):
        assert rank_with_tol(np.eye(4)) == 4
        assert rank_with_tol(np.outer([1, 2], [3, 4])) == 1
        assert rank_with_tol([[1, 0], [0, 1e-12]]) == 1

    def test_zero(self):
        assert rank_with_tol(np.zeros((3, 2))) == 0


class TestEigDecompose:
    def test_diagonal(self):
        out = eig_decompose(np.diag([1.0, 2.0, 3.0]))
        assert [(round(c.eigenvalue.real, 12), c.multiplicity) for c in out] == [(1, 1), (2, 1), (3, 1)]
        for c, e in zip(out, np.eye(3)):
            assert abs(abs(np.vdot(c.right_vector, e)) - 1) < 1e-12

    def test_nilpotent(self):
        (c,) = eig_decompose([[0, 1], [0, 0]])
        assert c.multiplicity == 2 and abs(c.eigenvalue) < 1e-12

    def test_cluster(self):
        (c,) = eig_decompose([[2, 1], [0, 2 + 1e-9]])
        assert c.multiplicity == 2 and abs(c.eigenvalue - 2) < 1e-8

    def test_not_square(self):
        with pytest.raises(NotSquareError):
            eig_decompose(np.zeros((2, 3)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 2**31))
    def test_residuals_and_count(self, n, seed):
        M = crandn(np.random.default_rng(seed), n, n)
        out = eig_decompose(M)
        assert sum(c.multiplicity for c in out) == n
        scale = np.linalg.norm(M, 2)
        for c in out:
            assert np.linalg.norm(M @ c.right_vector - c.eigenvalue * c.right_vector) <= 1e-9 * scale
            assert np.linalg.norm(c.left_vector.conj() @ M - c.eigenvalue * c.left_vector.conj()) <= 1e-9 * scale


def test_cluster_values_single_linkage():
    groups = cluster_values([0.0, 0.5e-7, 1.0e-7, 1.0], 0.6e-7)
    assert [len(g) for g in groups] == [3, 1]


def test_multiset_distance_uses_cluster_means():
    desired = [-1, -1, 2]
    achieved = [-1 + 1e-5, -1 - 1e-5, 2 + 1e-12]
    assert multiset_distance(achieved, desired) < 1e-11
    assert multiset_distance([0, 1], [0]) == np.inf


def test_invariant_closure_krylov():
    A = np.diag([1.0, 2.0, 3.0])
    assert invariant_closure(np.ones((3, 1)), [A]).shape[1] == 3
    assert invariant_closure(np.array([[1.0], [1.0], [0.0]]), [A]).shape[1] == 2
