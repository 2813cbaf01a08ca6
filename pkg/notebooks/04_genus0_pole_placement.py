"""Pole placement on a line (genus 0)
===================================

Over a line the curve is the Riemann sphere. Placing the poles of the
restricted closed loop at points p_1..p_n amounts to finding a rational
function g with poles bounded by the open-loop poles Z, vanishing at
infinity, and equal to -1 at every p_j. Then f = 1/(g + 1) has its poles
exactly at the p_j, and the gain K is read from K (t - A)^-1 B = g(t).

On the sphere such g always exists for distinct targets (the no-feedback
set is empty), and the result agrees with Ackermann's formula.
"""

# %%
from pathlib import Path

import numpy as np

from opvessel import (
    Divisor,
    DivisorEntry,
    LineVesselSpec,
    ackermann_oracle,
    basis_L_genus0,
    build_f,
    build_line_vessel,
    place_poles_genus0,
    random_line_vessel,
    restricted_transfer,
    solve_interpolation,
)
from opvessel.genus0 import INF

np.set_printoptions(precision=4, suppress=True)
DATA = Path(__file__).parent / "data"

# %% [markdown]
# Hand-sized instance: Z = 2*{0}, D_inf = {inf}, targets 1 and 2. The space
# of candidates is spanned by 1/t and 1/t^2; g = -3/t + 2/t^2 and
# f = t^2 / ((t - 1)(t - 2)).

# %%
B = basis_L_genus0(Divisor([DivisorEntry(0.0, 2)]), Divisor([DivisorEntry(INF, 1)]))
a = solve_interpolation(B, [1, 2])
f = build_f(a, B, [1, 2])
print("coefficients a:", a.real)
print("f numerator:", f.numerator.real, " denominator:", f.denominator.real)
print("f at infinity:", f(INF).real)

# %% [markdown]
# The nilpotent double integrator with both poles sent to -1. The targets
# repeat, so the characteristic route is used; the gain is F = -(1, 2).

# %%
V = build_line_vessel(LineVesselSpec(A1=[[0, 1], [0, 0]], b=[0, 1], c_row=[1, 0]))
F, rep = place_poles_genus0(V, [-1, -1])
print("F =", F.real, " route:", rep.route)
print("achieved poles:", np.sort_complex(rep.achieved))

# %% [markdown]
# Random line vessels of growing size against Ackermann's formula.

# %%
rng = np.random.default_rng(1)
print(" n   |F + K|/|K|   spectrum error   admissible   conditions")
for n in range(1, 9):
    V = random_line_vessel(rng, n)
    desired = rng.normal(size=n) + 1j * rng.normal(size=n)
    F, rep = place_poles_genus0(V, desired)
    S = restricted_transfer(V, rep.xi)
    K = ackermann_oracle(S.A, S.B, desired)
    print(f" {n}   {np.linalg.norm(F + K) / np.linalg.norm(K):10.1e}   {rep.spectrum_error:13.1e}"
          f"   {str(rep.admissible):10s}   {rep.conditions_hold}")

# %%
from opvessel.cli import main

main(["place", "--in", str(DATA / "place_double_pole.json")])
