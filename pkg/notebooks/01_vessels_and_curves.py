"""Vessels and their discriminant curves
=====================================

A vessel couples two commuting operators A1, A2 on a state space with
input and output coupling data. The determinantal polynomial of the input
pencil cuts out a plane curve, and every input signal lives in a fiber
over that curve. This script builds two small vessels, checks the
compatibility conditions and looks at the curve.

Run with ``python3 notebooks/01_vessels_and_curves.py``.
"""

# %%
from pathlib import Path

import numpy as np

from opvessel import (
    LineVesselSpec,
    build_line_vessel,
    curve_fiber,
    discriminant_polys,
    random_pencil_vessel,
    sample_curve_points,
    validate_vessel,
)

np.set_printoptions(precision=4, suppress=True)
DATA = Path(__file__).parent / "data"

# %% [markdown]
# The simplest useful family sits over a line: A2 is an affine function of
# A1, so the curve is the line ``c l1 - l2 + d = 0``. Here A1 is a 2x2
# nilpotent Jordan block.

# %%
V = build_line_vessel(LineVesselSpec(A1=[[0, 1], [0, 0]], b=[0, 1], c_row=[1, 0], c=1.0, d=0.0))
report = validate_vessel(V)
print("line vessel passes:", report.passed)
for name in report.residuals:
    print(f"  {name:9s} relative residual {report.relative(name):.2e}")

disc = discriminant_polys(V)
print("p_in coefficients (rows: powers of l1, columns: powers of l2):")
print(disc.p_in.coeffs)
print("mu = det(D~)/det(D):", disc.mu)

# %% [markdown]
# Break the vessel on purpose: a small change in A2 violates the
# commutation and colligation conditions.

# %%
A2 = V.A2.copy()
A2[0, 1] += 1e-3
broken = validate_vessel(V.replace(A2=A2))
print("perturbed vessel passes:", broken.passed)
print("  worst relative residual:", f"{broken.max_relative():.2e}")

# %% [markdown]
# A two-input vessel with a quadratic curve. Points on the curve come from
# solving for l2 over seeded values of l1; at each point the input fiber is
# one-dimensional.

# %%
W = random_pencil_vessel(np.random.default_rng(0), 4)
disc = discriminant_polys(W)
print("curve degree:", disc.p_in.degree)
sample = sample_curve_points(disc.p_in, 5, seed=1)
for p in sample.affine:
    fib = curve_fiber(W, p, curve=disc.p_in)
    l1, l2 = p.coords()
    print(f"  ({l1:.3f}, {l2:.3f})  fiber dim {fib.dim}  |p_in| = {abs(disc.p_in(l1, l2)):.1e}")
print("points at infinity:", len(sample.at_infinity))

# %% [markdown]
# The same check from the command line:
#
#     opvessel validate --in notebooks/data/line_vessel.json

# %%
from opvessel.cli import main

main(["validate", "--in", str(DATA / "line_vessel.json")])
