"""Transfer functions on the curve
===============================

The transfer function of a vessel acts on input fibers and returns vectors
in output fibers. It is computed with a resolvent along some direction xi,
but the answer must not depend on that choice. The joint spectrum of
(A1, A2) lies on the curve, and restricting along a direction gives an
ordinary rational matrix function whose poles and zeros we can read off.
"""

# %%
import numpy as np

from opvessel import (
    Direction,
    curve_fiber,
    discriminant_polys,
    find_regular_direction,
    random_pencil_vessel,
    restricted_transfer,
    rmf_pole_divisor,
    rmf_zero_divisor,
    sample_curve_points,
    transfer_eval,
    vessel_spectrum,
)
from opvessel.vessel import fiber_residual, on_curve_residual, CurvePoint

V = random_pencil_vessel(np.random.default_rng(3), 4)
disc = discriminant_polys(V)

# %% [markdown]
# Two resolvent directions, same answer.

# %%
xi_a, xi_b = find_regular_direction(V), Direction(0.3, 1 - 0.2j)
print(" point                               |S_a v - S_b v| / |S_a v|   output fiber residual")
for p in sample_curve_points(disc.p_in, 6, seed=2).affine:
    v = curve_fiber(V, p, curve=disc.p_in).basis[:, 0]
    a = transfer_eval(V, p, v, xi=xi_a)
    b = transfer_eval(V, p, v, xi=xi_b)
    l1, l2 = p.coords()
    print(f" ({l1:7.3f}, {l2:7.3f})   {np.linalg.norm(a - b) / np.linalg.norm(a):10.1e}"
          f"               {fiber_residual(V, p, a, 'output'):.1e}")

# %% [markdown]
# Over the line at infinity the transfer function is just D.

# %%
for p in sample_curve_points(disc.p_in, 1).at_infinity:
    print("at infinity, S v = D v:", np.allclose(transfer_eval(V, p, [1.0, 0.0]), V.D @ [1.0, 0.0]))

# %% [markdown]
# The joint spectrum: every eigenvalue pair sits on the curve at a smooth
# point.

# %%
spec = vessel_spectrum(V)
for pair in spec.pairs:
    res = on_curve_residual(disc.p_in, CurvePoint.affine(pair.lambda1, pair.lambda2))
    print(f"  ({pair.lambda1:.4f}, {pair.lambda2:.4f})  mult {pair.multiplicity}"
          f"  on curve {pair.on_curve} (rel. |p_in| {res:.1e})  smooth {pair.smooth}")

# %% [markdown]
# Restricted along xi the transfer function is ``D + C (l - A_xi)^-1 B_xi``.
# Its left pole divisor comes from the eigenstructure of ``A_xi`` and the
# zero divisor from that of the inverse realization.

# %%
S = restricted_transfer(V, xi_a)
print("poles:", [np.round(complex(e.point), 4) for e in rmf_pole_divisor(S).entries])
print("zeros:", [np.round(complex(e.point), 4) for e in rmf_zero_divisor(S).entries])
