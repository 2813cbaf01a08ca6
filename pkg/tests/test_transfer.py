import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from opvessel.errors import (
    NonCommutingError,
    NonMinimalError,
    SingularMatrixError,
    SpectrumPointError,
)
from opvessel.families import random_line_vessel, random_pencil_vessel
from opvessel.transfer import (
    Divisor,
    DivisorEntry,
    RealizedRMF,
    best_direction,
    divisor_contains,
    joint_spectrum,
    placement_condition_check,
    quotient_realization,
    restricted_transfer,
    rmf_eval,
    rmf_inverse,
    rmf_pole_divisor,
    rmf_zero_divisor,
    transfer_eval,
    vessel_spectrum,
)
from opvessel.vessel import (
    CurvePoint,
    Direction,
    curve_fiber,
    discriminant_polys,
    fiber_residual,
    find_regular_direction,
    minimality_report,
    sample_curve_points,
)

from instances import crandn, lemma_triple, random_rmf


def mults(D):
    return sorted((round(complex(e.point).real, 8), round(complex(e.point).imag, 8), e.multiplicity)
                  for e in D.entries)


class TestJointSpectrum:
    def test_diagonal(self):
        rep = joint_spectrum(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        got = sorted((p.lambda1.real, p.lambda2.real, p.multiplicity) for p in rep.pairs)
        assert_allclose(np.array(got), [[1, 3, 1], [2, 4, 1]], atol=1e-12)

    def test_zero(self):
        rep = joint_spectrum(np.zeros((2, 2)), np.zeros((2, 2)))
        assert len(rep.pairs) == 1 and rep.pairs[0].multiplicity == 2

    def test_jordan(self):
        A1 = np.array([[1.0, 1.0], [0.0, 1.0]])
        (pair,) = joint_spectrum(A1, A1 @ A1).pairs
        assert pair.multiplicity == 2
        assert abs(pair.lambda1 - 1) < 1e-7 and abs(pair.lambda2 - 1) < 1e-7

    def test_non_commuting(self):
        with pytest.raises(NonCommutingError):
            joint_spectrum([[0, 1], [0, 0]], [[0, 0], [1, 0]])

    @pytest.mark.parametrize("family", [random_line_vessel, random_pencil_vessel])
    def test_on_curve_and_smooth(self, family):
        for seed in range(5):
            V = family(np.random.default_rng(seed), 6)
            rep = vessel_spectrum(V)
            assert rep.total_multiplicity == 6
            assert all(p.on_curve and p.smooth for p in rep.pairs)


class TestTransferEval:
    @pytest.fixture
    def pencil(self):
        return random_pencil_vessel(np.random.default_rng(21), 4)

    def test_at_infinity_is_d(self, pencil):
        disc = discriminant_polys(pencil)
        v = np.array([1.0, 2.0])
        for p in sample_curve_points(disc.p_in, 1).at_infinity:
            assert_allclose(transfer_eval(pencil, p, v), pencil.D @ v)

    def test_zero_c(self):
        V = random_line_vessel(np.random.default_rng(3), 3)
        V = V.replace(C=np.zeros_like(V.C))
        p = sample_curve_points(discriminant_polys(V).p_in, 1).affine[0]
        assert_allclose(transfer_eval(V, p, [1.0]), V.D @ [1.0])

    def test_direction_independence(self, pencil):
        disc = discriminant_polys(pencil)
        for p in sample_curve_points(disc.p_in, 10, seed=4).affine:
            v = curve_fiber(pencil, p).basis[:, 0]
            a = transfer_eval(pencil, p, v, xi=Direction(1, 0))
            b = transfer_eval(pencil, p, v, xi=Direction(0.3, 1 - 0.2j))
            assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a)
            assert fiber_residual(pencil, p, a, "output") <= 1e-9

    def test_rejects_non_fiber_vector(self, pencil):
        p = sample_curve_points(discriminant_polys(pencil).p_in, 1).affine[0]
        fib = curve_fiber(pencil, p).basis[:, 0]
        other = np.array([fib[1].conj(), -fib[0].conj()])
        with pytest.raises(Exception, match="fiber"):
            transfer_eval(pencil, p, other)

    def test_pole_raises(self):
        V = random_line_vessel(np.random.default_rng(2), 3)
        pair = vessel_spectrum(V).pairs[0]
        with pytest.raises(SpectrumPointError):
            best_direction(V, CurvePoint.affine(pair.lambda1, pair.lambda2))


class TestRMF:
    def test_scalar(self):
        W = RealizedRMF([[0]], [[1]], [[1]], [[0]])
        assert rmf_eval(W, 2)[0, 0] == pytest.approx(0.5)
        assert_allclose(rmf_eval(W, np.inf), [[0]])
        with pytest.raises(SpectrumPointError) as info:
            rmf_eval(W, 0)
        assert info.value.payload["distance"] == 0

    def test_zero_b(self):
        W = RealizedRMF(np.eye(2), np.zeros((2, 1)), np.ones((1, 2)), [[3]])
        assert rmf_eval(W, 5)[0, 0] == 3

    def test_restricted_scalar(self):
        V = random_line_vessel(np.random.default_rng(0), 1)
        S = restricted_transfer(V, Direction(1, 0))
        a, b, c, d = V.A1[0, 0], V.B_tilde[0, 0] * V.sigma1[0, 0], V.C[0, 0], V.D[0, 0]
        assert rmf_eval(S, 0.7)[0, 0] == pytest.approx(d + c * b / (0.7 - a))

    def test_restricted_rejects_singular_direction(self):
        V = random_line_vessel(np.random.default_rng(0), 2, c=0.0)
        with pytest.raises(SingularMatrixError):
            restricted_transfer(V, Direction(0, 1))

    def test_restricted_minimal(self):
        V = random_pencil_vessel(np.random.default_rng(5), 5)
        xi = find_regular_direction(V)
        S = restricted_transfer(V, xi)
        assert minimality_report(V, xi=xi).restricted_minimal
        assert rmf_pole_divisor(S).degree == V.n

    def test_inverse_scalar(self):
        W = RealizedRMF([[0]], [[1]], [[1]], [[1]])
        Wi = rmf_inverse(W)
        assert Wi.A[0, 0] == -1
        assert rmf_eval(Wi, 2)[0, 0] == pytest.approx(1 - 1 / 3)

    def test_inverse_c_zero(self):
        W = RealizedRMF(np.diag([1.0, 2.0]), np.ones((2, 1)), np.zeros((1, 2)), [[2]])
        Wi = rmf_inverse(W)
        assert_allclose(Wi.A, W.A) and Wi.D[0, 0] == 0.5

    def test_inverse_singular(self):
        with pytest.raises(SingularMatrixError):
            rmf_inverse(RealizedRMF([[0]], [[1]], [[1]], [[0]]))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 6), st.integers(1, 3))
    def test_inverse_product(self, seed, n, p):
        rng = np.random.default_rng(seed)
        W = random_rmf(rng, n, p)
        Wi = rmf_inverse(W)
        poles = np.concatenate([np.linalg.eigvals(W.A), np.linalg.eigvals(Wi.A)])
        lam = 3.0 * np.exp(2j * np.pi * rng.uniform()) + 0.5 * crandn(rng)
        if np.min(np.abs(poles - lam)) < 0.1:
            return
        assert np.linalg.norm(rmf_eval(W, lam) @ rmf_eval(Wi, lam) - np.eye(p)) <= 1e-8


class TestDivisors:
    def test_pole_examples(self):
        W = RealizedRMF(np.diag([1.0, 2.0]), np.ones((2, 1)), np.ones((1, 2)), [[1]])
        assert mults(rmf_pole_divisor(W)) == [(1, 0, 1), (2, 0, 1)]
        assert mults(rmf_pole_divisor(RealizedRMF([[0]], [[1]], [[1]], [[0]]))) == [(0, 0, 1)]
        J = RealizedRMF([[0, 1], [0, 0]], [[0], [1]], [[1, 0]], [[1]])
        assert mults(rmf_pole_divisor(J)) == [(0, 0, 2)]

    def test_pole_requires_minimal(self):
        W = RealizedRMF(np.diag([1.0, 2.0]), [[1], [0]], [[1, 1]], [[1]])
        with pytest.raises(NonMinimalError):
            rmf_pole_divisor(W)

    def test_zero_examples(self):
        W = RealizedRMF([[0]], [[1]], [[-1]], [[1]])  # (l - 1) / l
        assert mults(rmf_zero_divisor(W)) == [(1, 0, 1)]
        I = RealizedRMF(np.diag([1.0, 2.0]), np.ones((2, 1)), np.zeros((1, 2)), [[1]])
        assert rmf_zero_divisor(I).degree == 0

    def test_zero_of_inverse_is_pole(self):
        W = random_rmf(np.random.default_rng(4), 4, 2)
        assert mults(rmf_zero_divisor(rmf_inverse(W))) == mults(rmf_pole_divisor(W))

    def test_contains_examples(self):
        assert divisor_contains(Divisor(), Divisor([DivisorEntry(3.0, 1)]))
        assert not divisor_contains(Divisor([DivisorEntry(0.0, 2)]), Divisor([DivisorEntry(0.0, 1)]))
        assert divisor_contains(Divisor([DivisorEntry(1.0, 1)]), Divisor([DivisorEntry(1 + 1e-9, 1)]))

    def test_contains_checks_direction(self):
        a = Divisor([DivisorEntry(1.0, 1, np.array([1.0, 0.0]))])
        b = Divisor([DivisorEntry(1.0, 1, np.array([2j, 0.0]))])
        c = Divisor([DivisorEntry(1.0, 1, np.array([1.0, 1.0]))])
        assert divisor_contains(a, b) and not divisor_contains(a, c)


class TestPlacementCondition:
    def test_identity(self):
        S = random_rmf(np.random.default_rng(1), 3, 2)
        ok, w = placement_condition_check(S, S)
        assert ok and w.lemma_consistent

    def test_d_scaled(self):
        S = random_rmf(np.random.default_rng(1), 3, 2)
        T = RealizedRMF(S.A, S.B, S.C, 2 * S.D)
        ok, w = placement_condition_check(S, T)
        assert not ok and not w.infinity_match

    @pytest.mark.parametrize("kind, expected", [("feedback", True), ("moved", False), ("rotated", False)])
    def test_lemma_classes(self, kind, expected):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            S, T = lemma_triple(rng, kind, int(rng.integers(1, 7)))
            zeros_ok = divisor_contains(rmf_zero_divisor(T), rmf_zero_divisor(S))
            poles_ok = divisor_contains(rmf_pole_divisor(quotient_realization(T, S)), rmf_pole_divisor(S))
            assert zeros_ok == poles_ok == expected

    def test_rotated_keeps_locations(self):
        # same zero locations, only directions differ: the direction test is what fails
        S, T = lemma_triple(np.random.default_rng(3), "rotated", 4)
        zS, zT = rmf_zero_divisor(S), rmf_zero_divisor(T)
        strip = lambda D: Divisor([DivisorEntry(e.point, e.multiplicity) for e in D.entries])
        assert divisor_contains(strip(zT), strip(zS))
        assert not divisor_contains(zT, zS)
