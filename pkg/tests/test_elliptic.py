import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opvessel.elliptic import (
    O,
    ECDivisor,
    ECPoint,
    EllipticCurve,
    divisor_from_record,
    divisor_to_record,
    ec_group_op,
    ec_multiply,
    ec_negate,
    forbidden_point,
    genus1_achievability,
    is_principal,
    miller_build,
    phi_of_divisor,
    points_close,
)
from opvessel.errors import NotPrincipalError, OffEllipticCurveError

from instances import random_principal

E = EllipticCurve(-1.0, 0.0)  # y^2 = x^3 - x
P0, P1, Pm1 = ECPoint.affine(0, 0), ECPoint.affine(1, 0), ECPoint.affine(-1, 0)


def random_curve(rng):
    while True:
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        if abs(4 * a ** 3 + 27 * b ** 2) > 0.1:
            return EllipticCurve(a, b)


class TestCurve:
    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            EllipticCurve(0, 0)

    def test_membership(self):
        assert E.contains(P0) and E.contains(O)
        with pytest.raises(OffEllipticCurveError):
            ec_group_op(E, ECPoint.affine(1, 1), P0)


class TestGroupLaw:
    def test_two_torsion(self):
        assert points_close(ec_group_op(E, P0, P1), Pm1)
        assert ec_group_op(E, P0, P0).is_infinity
        assert ec_multiply(E, 2, P1).is_infinity

    def test_identity_and_inverse(self):
        P = E.lift(2.0)
        assert points_close(ec_group_op(E, P, O), P)
        assert ec_group_op(E, P, P, negate=True).is_infinity
        assert ec_group_op(E, P, ec_negate(E, P)).is_infinity

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31))
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        C = random_curve(rng)
        P, Q, R = (C.random_point(rng) for _ in range(3))
        lhs = ec_group_op(C, ec_group_op(C, P, Q), R)
        rhs = ec_group_op(C, P, ec_group_op(C, Q, R))
        assert points_close(lhs, rhs, 1e-9)

    def test_multiply_matches_repeated_addition(self):
        rng = np.random.default_rng(1)
        P = E.random_point(rng)
        acc = O
        for _ in range(5):
            acc = ec_group_op(E, acc, P)
        assert points_close(ec_multiply(E, 5, P), acc)
        assert points_close(ec_multiply(E, -1, P), ec_negate(E, P))


class TestPhi:
    def test_examples(self):
        assert points_close(phi_of_divisor(E, ECDivisor.of((P0, 1), (P1, 1))), Pm1)
        assert phi_of_divisor(E, ECDivisor.of((P0, 2))).is_infinity
        assert phi_of_divisor(E, ECDivisor()).is_infinity

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31))
    def test_homomorphism(self, seed):
        rng = np.random.default_rng(seed)
        D1 = ECDivisor([(E.random_point(rng), int(k)) for k in rng.integers(-2, 3, size=3)])
        D2 = ECDivisor([(E.random_point(rng), int(k)) for k in rng.integers(-2, 3, size=3)])
        lhs = phi_of_divisor(E, D1 + D2)
        rhs = ec_group_op(E, phi_of_divisor(E, D1), phi_of_divisor(E, D2))
        assert points_close(lhs, rhs, 1e-8)


class TestPrincipal:
    def test_examples(self):
        assert is_principal(E, ECDivisor.of((P0, 1), (P1, 1), (Pm1, -1), (O, -1)))
        assert is_principal(E, ECDivisor.of((P0, 2), (O, -2)))
        assert not is_principal(E, ECDivisor.of((P0, 1), (O, -1)))
        assert not is_principal(E, ECDivisor.of((P0, 1)))

    def test_miller_single_factor(self):
        f = miller_build(E, ECDivisor.of((P0, 1), (P1, 1), (Pm1, 1), (O, -3)))
        assert len(f.factors) == 1
        Q = E.lift(2.0)
        assert abs(f(Q) / Q.y - 1) < 1e-12 or abs(f(Q) / Q.y + 1) < 1e-12

    def test_miller_vertical(self):
        Q = E.lift(2.0)
        f = miller_build(E, ECDivisor.of((Q, 1), (ec_negate(E, Q), 1), (O, -2)))
        R = E.lift(3.0)
        assert abs(f(R) / f(E.lift(-0.5)) - (3.0 - 2.0) / (-0.5 - 2.0)) < 1e-10

    def test_not_principal(self):
        with pytest.raises(NotPrincipalError):
            miller_build(E, ECDivisor.of((P0, 1), (O, -1)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31))
    def test_weil_reciprocity(self, seed):
        rng = np.random.default_rng(seed)
        C = random_curve(rng)
        Df = random_principal(C, rng, int(rng.integers(1, 4)))
        Dg = random_principal(C, rng, int(rng.integers(1, 4)))
        f, g = miller_build(C, Df), miller_build(C, Dg)
        lhs, rhs = f.evaluate_divisor(Dg), g.evaluate_divisor(Df)
        assert abs(lhs - rhs) <= 1e-7 * max(abs(lhs), abs(rhs))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31))
    def test_miller_divisor(self, seed):
        # |f| scales like h**k near a point of multiplicity k
        rng = np.random.default_rng(seed)
        D = random_principal(E, rng, 2)
        f = miller_build(E, D)
        for P, k in D.normalized().entries:
            if P.is_infinity:
                continue
            near = [ECPoint(P.x + h, P.y * np.sqrt(E.rhs(P.x + h) / P.y ** 2)) for h in (1e-5, 1e-3)]
            assert abs(np.log10(abs(f(near[0]) / f(near[1]))) + 2 * k) < 0.2


class TestForbiddenPoint:
    def test_example(self):
        Z = ECDivisor.of((P0, 1), (P1, 1), (Pm1, 1))
        p = forbidden_point(E, Z, ECDivisor.of((O, 1)), [P0])
        assert points_close(p, P0)
        assert is_principal(E, Z - ECDivisor.of((O, 1), (P0, 1), (p, 1)))

    def test_preconditions(self):
        with pytest.raises(ValueError):
            forbidden_point(E, ECDivisor.of((P0, 1)), ECDivisor.of((O, 1)), [])
        with pytest.raises(ValueError):
            forbidden_point(E, ECDivisor.of((P0, 1), (P1, 1)), ECDivisor.of((O, 1)), [P0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31))
    def test_certificate(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        Z = ECDivisor([(E.random_point(rng), 1) for _ in range(n)])
        D_inf = ECDivisor.of((O, 1))
        partial = [E.random_point(rng) for _ in range(n - 2)]
        p = forbidden_point(E, Z, D_inf, partial)
        tup = ECDivisor([(q, 1) for q in partial + [p]])
        assert is_principal(E, Z - D_inf - tup)
        other = E.random_point(rng)
        assert not is_principal(E, Z - D_inf - ECDivisor([(q, 1) for q in partial + [other]]))


class TestAchievability:
    def test_trivial(self):
        Z = ECDivisor.of((P0, 1), (P1, 1))
        res = genus1_achievability(E, Z, Z, ECDivisor.of((O, 1)))
        assert res.achievable and abs(res.f(E.lift(2.0)) - 1) < 1e-12

    def test_degree_mismatch(self):
        with pytest.raises(ValueError):
            genus1_achievability(E, ECDivisor.of((P0, 1)), ECDivisor(), ECDivisor.of((O, 1)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.booleans())
    def test_single_mark_equals_principality(self, seed, principal):
        rng = np.random.default_rng(seed)
        D = random_principal(E, rng, 2)
        Z = D.positive_part()
        P = -(D - Z)
        if not principal:
            P = ECDivisor([(E.random_point(rng), k) for _, k in P.entries])
        res = genus1_achievability(E, Z, P, ECDivisor.of((O, 1)))
        assert res.achievable == is_principal(E, Z - P)
        if res.achievable:
            assert abs(res.values[0] - 1) < 1e-10

    def test_two_marks_can_fail(self):
        # Z - P is principal with f = (x - 2) / x, which differs at x = 3 and x = -1/2
        Q = E.lift(2.0)
        Z = ECDivisor.of((Q, 1), (ec_negate(E, Q), 1))
        P = ECDivisor.of((P0, 2))
        assert is_principal(E, Z - P)
        res = genus1_achievability(E, Z, P, ECDivisor.of((E.lift(3.0), 1), (E.lift(-0.5), 1)))
        assert not res.achievable
        assert abs(res.values[0] / res.values[1] - (1 / 3) / 5) < 1e-10

    def test_two_marks_symmetric_pair(self):
        # f = (x - x_Q) / x is even: equal values at R and -R
        Q, R = E.lift(2.0), E.lift(3.0)
        Z = ECDivisor.of((Q, 1), (ec_negate(E, Q), 1))
        P = ECDivisor.of((P0, 2))
        res = genus1_achievability(E, Z, P, ECDivisor.of((R, 1), (ec_negate(E, R), 1)))
        assert res.achievable
        assert all(abs(v - 1) < 1e-10 for v in res.values)


def test_record_roundtrip():
    D = ECDivisor.of((P0, 2), (E.lift(1 + 1j), -1), (O, -1))
    back = divisor_from_record(divisor_to_record(D))
    assert [k for _, k in back.entries] == [2, -1, -1]
    assert all(points_close(a, b) for (a, _), (b, _) in zip(back.entries, D.entries))
    with pytest.raises(ValueError):
        divisor_from_record([{"point": "O", "mult": 1.5}])
    with pytest.raises(ValueError):
        divisor_from_record([{"point": "O", "mult": 1, "extra": 1}])
