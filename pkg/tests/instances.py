"""Seeded problem generators shared by the test modules."""

import numpy as np

from opvessel.elliptic import O, ECDivisor, ec_group_op
from opvessel.transfer import RealizedRMF


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_rmf(rng, n, p, label=""):
    """Minimal (generically) square realization with well-separated poles."""
    A = crandn(rng, n, n) / np.sqrt(n)
    return RealizedRMF(A, crandn(rng, n, p), crandn(rng, p, n), np.eye(p) + 0.3 * crandn(rng, p, p), label)


def lemma_triple(rng, kind, n, p=2):
    """``(S, T)`` for the divisor-difference lemma.

    ``kind``: ``"feedback"`` (T = S R^-1 for a state feedback R, both sides
    true), ``"moved"`` (unrelated T, zeros elsewhere) or ``"rotated"``
    (T = U T0 with T0 of the feedback kind: same zero locations, wrong
    directions).
    """
    S = random_rmf(rng, n, p, "S")
    if kind == "moved":
        return S, random_rmf(rng, n, p, "T")
    K = crandn(rng, p, n)
    T = RealizedRMF(S.A + S.B @ K, S.B, S.C + S.D @ K, S.D, "T")
    if kind == "rotated":
        U = np.eye(p) + crandn(rng, p, p)
        T = RealizedRMF(T.A, T.B, U @ T.C, U @ T.D, "UT")
    return S, T


def random_principal(E, rng, k):
    """O-free principal divisor ``Q1 + .. + Qk - P1 - .. - Pk``."""
    Qs = [E.random_point(rng) for _ in range(k)]
    Ps = [E.random_point(rng) for _ in range(k - 1)]
    last = O
    for q in Qs:
        last = ec_group_op(E, last, q)
    for p in Ps:
        last = ec_group_op(E, last, p, negate=True)
    return ECDivisor([(q, 1) for q in Qs] + [(p, -1) for p in Ps + [last]])
