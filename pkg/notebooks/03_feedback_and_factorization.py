"""Admissible feedback and the controller factorization
=====================================================

State feedback u = F x keeps the vessel structure only when F satisfies
two linear compatibility equations. For admissible F the closed loop is
again a vessel on the same curve, and the open-loop transfer function
splits as the closed loop after a controller vessel:

    S = S_CL * S_Ctrl   on the curve.
"""

# %%
from pathlib import Path

import numpy as np

from opvessel import (
    admissible_basis,
    closed_loop,
    controller_vessel,
    discriminant_polys,
    factorization_check,
    is_admissible,
    random_pencil_vessel,
    sample_curve_points,
    validate_vessel,
)

DATA = Path(__file__).parent / "data"
rng = np.random.default_rng(0)
V = random_pencil_vessel(rng, 5)

# %% [markdown]
# The admissible feedbacks form a linear space. For this family it has
# dimension n - 1; a random F is almost never in it.

# %%
basis = admissible_basis(V)
print("dimension of admissible feedbacks:", len(basis))
F_good = sum(rng.normal() * B for B in basis)
F_bad = rng.normal(size=(V.m, V.n))
for name, F in [("combination of basis", F_good), ("random", F_bad)]:
    ok, res = is_admissible(V, F)
    worst = max(r / max(c, 1e-300) for r, c in res.values())
    print(f"  {name:22s} admissible {ok}  (worst relative residual {worst:.1e})")

# %% [markdown]
# The controller vessel is a valid vessel exactly when F is admissible.

# %%
for name, F in [("admissible", F_good), ("random", F_bad)]:
    print(f"  controller vessel for {name:10s} F valid: {validate_vessel(controller_vessel(V, F)).passed}")

# %% [markdown]
# Closed loop and factorization, checked on 30 curve points away from the
# spectra of the three vessels involved.

# %%
V_cl = closed_loop(V, F_good)
print("closed loop valid:", validate_vessel(V_cl).passed)
pts = sample_curve_points(discriminant_polys(V).p_in, 30, seed=4).affine
rep = factorization_check(V, F_good, pts)
print(f"factorization: {len(rep.evaluated)} points, max relative residual {rep.max_residual:.1e}, "
      f"{len(rep.skipped)} skipped")

# %%
from opvessel.cli import main

main(["factor-check", "--in", str(DATA / "pencil_feedback.json")])
