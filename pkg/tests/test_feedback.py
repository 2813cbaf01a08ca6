import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from opvessel.errors import InadmissibleFeedbackError
from opvessel.families import random_line_vessel, random_pencil_vessel
from opvessel.feedback import (
    admissible_basis,
    closed_loop,
    controller_vessel,
    factorization_check,
    is_admissible,
    restricted_factorization_residual,
)
from opvessel.transfer import transfer_eval, vessel_spectrum
from opvessel.vessel import (
    CurvePoint,
    curve_fiber,
    discriminant_polys,
    find_regular_direction,
    sample_curve_points,
    validate_vessel,
)

from instances import crandn


def random_admissible(V, rng, scale=1.0):
    basis = admissible_basis(V)
    return scale * sum(crandn(rng) * B for B in basis)


@pytest.fixture
def pencil():
    return random_pencil_vessel(np.random.default_rng(31), 5)


class TestAdmissibility:
    def test_zero_feedback(self, pencil):
        ok, res = is_admissible(pencil, np.zeros((2, 5)))
        assert ok and res["state"][0] == 0 and res["input"][0] == 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31))
    def test_line_family_everything_admissible(self, seed):
        rng = np.random.default_rng(seed)
        V = random_line_vessel(rng, 4)
        assert is_admissible(V, crandn(rng, 1, 4))[0]
        assert len(admissible_basis(V)) == 4

    def test_random_feedback_inadmissible(self, pencil):
        rng = np.random.default_rng(0)
        for _ in range(5):
            ok, res = is_admissible(pencil, crandn(rng, 2, 5))
            assert not ok

    def test_basis_dimension_and_membership(self, pencil):
        basis = admissible_basis(pencil)
        assert len(basis) == pencil.n - 1
        rng = np.random.default_rng(1)
        assert is_admissible(pencil, random_admissible(pencil, rng, 5.0))[0]

    def test_output_map_is_admissible(self, pencil):
        # the construction makes -D^-1 C admissible
        F = -np.linalg.solve(pencil.D, pencil.C)
        assert is_admissible(pencil, F)[0]


class TestClosedLoop:
    def test_zero_is_identity(self, pencil):
        assert closed_loop(pencil, np.zeros((2, 5))).allclose(pencil)

    def test_line_vessel_e1(self):
        V = random_line_vessel(np.random.default_rng(4), 3)
        F = np.array([[1.0, 0.0, 0.0]])
        W = closed_loop(V, F)
        assert_allclose(W.A1, V.A1 + V.B_tilde @ V.sigma1 @ F)
        assert validate_vessel(W).passed

    def test_residuals_inherited(self, pencil):
        F = random_admissible(pencil, np.random.default_rng(2))
        W = closed_loop(pencil, F)
        rep = validate_vessel(W)
        assert rep.passed
        assert rep.max_relative() <= max(2 * validate_vessel(pencil).max_relative(), 1e-13)

    def test_inadmissible_rejected(self, pencil):
        with pytest.raises(InadmissibleFeedbackError):
            closed_loop(pencil, np.ones((2, 5)))


class TestControllerVessel:
    def test_zero_feedback_is_identity(self, pencil):
        R = controller_vessel(pencil, np.zeros((2, 5)))
        disc = discriminant_polys(pencil)
        for p in sample_curve_points(disc.p_in, 5).affine:
            v = curve_fiber(pencil, p).basis[:, 0]
            assert_allclose(transfer_eval(R, p, v), v, atol=1e-14)

    @pytest.mark.parametrize("family", [random_line_vessel, random_pencil_vessel])
    def test_validity_iff_admissible(self, family):
        rng = np.random.default_rng(7)
        V = family(rng, 4)
        for k in range(10):
            F = random_admissible(V, rng) if k % 2 == 0 else crandn(rng, V.m, V.n)
            assert validate_vessel(controller_vessel(V, F)).passed == is_admissible(V, F)[0]


class TestFactorization:
    def test_zero_feedback(self, pencil):
        disc = discriminant_polys(pencil)
        rep = factorization_check(pencil, np.zeros((2, 5)), sample_curve_points(disc.p_in, 5).affine)
        assert rep.passed and rep.max_residual <= 1e-14

    @pytest.mark.parametrize("family", [random_line_vessel, random_pencil_vessel])
    def test_admissible_factorization(self, family):
        rng = np.random.default_rng(9)
        V = family(rng, 5)
        F = random_admissible(V, rng)
        pts = sample_curve_points(discriminant_polys(V).p_in, 50, seed=3).affine
        rep = factorization_check(V, F, pts)
        assert rep.passed and rep.max_residual <= 1e-8
        assert len(rep.evaluated) == 50

    def test_point_near_pole_skipped(self):
        V = random_line_vessel(np.random.default_rng(10), 3)
        F = np.array([[0.5, -0.2, 0.1]])
        pole = vessel_spectrum(closed_loop(V, F)).pairs[0]
        near = CurvePoint.affine(pole.lambda1, pole.lambda2)
        rep = factorization_check(V, F, [near] + sample_curve_points(discriminant_polys(V).p_in, 3).affine)
        assert len(rep.skipped) == 1 and len(rep.evaluated) == 3

    def test_restricted_identity(self, pencil):
        rng = np.random.default_rng(12)
        F = random_admissible(pencil, rng)
        xi = find_regular_direction(pencil)
        lams = 3 * np.exp(2j * np.pi * rng.uniform(size=20))
        assert restricted_factorization_residual(pencil, F, xi, lams) <= 1e-8
