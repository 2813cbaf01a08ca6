"""Genus one: divisors on an elliptic curve
========================================

On a cubic curve y^2 = x^3 + a x + b a degree-zero divisor is the divisor
of a function exactly when its points add up to the identity O under the
chord-tangent law (Abel). This decides which pole configurations are
reachable, and it singles out one forbidden completion of any partial
choice of poles.
"""

# %%
from pathlib import Path

import numpy as np

from opvessel import (
    ECDivisor,
    ECPoint,
    EllipticCurve,
    ec_group_op,
    forbidden_point,
    genus1_achievability,
    is_principal,
    miller_build,
)
from opvessel.elliptic import O, ec_negate

DATA = Path(__file__).parent / "data"
E = EllipticCurve(-1.0, 0.0)
P0, P1, Pm1 = ECPoint.affine(0, 0), ECPoint.affine(1, 0), ECPoint.affine(-1, 0)

# %% [markdown]
# The three 2-torsion points of y^2 = x^3 - x add up to O, and y is the
# single line with divisor (P0) + (P1) + (P-1) - 3(O).

# %%
print("P0 + P1 =", ec_group_op(E, P0, P1))
D = ECDivisor.of((P0, 1), (P1, 1), (Pm1, 1), (O, -3))
print("principal:", is_principal(E, D))
f = miller_build(E, D)
for (alpha, beta, gamma), e in f.factors:
    print(f"  line {alpha.real + 0:+.0f} x {beta.real + 0:+.0f} y {gamma.real + 0:+.0f}, exponent {e}")

# %% [markdown]
# Weil reciprocity as a numerical check: f(div g) = g(div f) for two
# functions whose divisors avoid each other (and O).


# %%
def principal_off_O(rng):
    q1, q2, p1 = (E.random_point(rng) for _ in range(3))
    p2 = ec_group_op(E, ec_group_op(E, q1, q2), p1, negate=True)
    return ECDivisor.of((q1, 1), (q2, 1), (p1, -1), (p2, -1))


rng = np.random.default_rng(2)
Df, Dg = principal_off_O(rng), principal_off_O(rng)
lhs = miller_build(E, Df).evaluate_divisor(Dg)
rhs = miller_build(E, Dg).evaluate_divisor(Df)
print(f"f(div g) = {lhs:.8f}\ng(div f) = {rhs:.8f}")

# %% [markdown]
# Forbidden completion: with Z of degree 3 and D_inf = {O}, after choosing
# one pole p_1 freely there is exactly one p_2 that makes
# Z - D_inf - p_1 - p_2 principal. Choosing it would give no feedback.

# %%
Z = ECDivisor([(E.random_point(rng), 1) for _ in range(3)])
p1 = E.random_point(rng)
p2 = forbidden_point(E, Z, ECDivisor.of((O, 1)), [p1])
print("forbidden p_2:", p2)
print("completed tuple principal:",
      is_principal(E, Z - ECDivisor.of((O, 1), (p1, 1), (p2, 1))))

# %% [markdown]
# Achievability with two marked points: f = (x - 2)/x has the right divisor
# but different values at x = 3 and x = -1/2, so it cannot be normalized
# to 1 on both. At a symmetric pair R, -R it can.

# %%
Q = E.lift(2.0)
Zq = ECDivisor.of((Q, 1), (ec_negate(E, Q), 1))
Pq = ECDivisor.of((P0, 2))
for marks in [ECDivisor.of((E.lift(3.0), 1), (E.lift(-0.5), 1)),
              ECDivisor.of((E.lift(3.0), 1), (ec_negate(E, E.lift(3.0)), 1))]:
    res = genus1_achievability(E, Zq, Pq, marks)
    print("achievable:", res.achievable, res.reason)

# %%
from opvessel.cli import main

main(["ec", "--in", str(DATA / "ec_torsion.json")])
