"""
The eigenfunction behind an eigenvalue
======================================

The log-amplitude rides along with the angle, so the radial spinor (u, v)
comes for free once the eigenvalue is known. Artificially strong gravity
(G = 1e-6) makes the small-r power law visible.
"""

import math

import numpy as np

from rwndirac.params import PhysicalInput, derive_params
from rwndirac.shooting import ShootingOptions, find_eigenvalue
from rwndirac.wavefunction import (
    connector_solution,
    far_field_rate,
    fit_small_r_exponent,
    residual,
    small_r_behaviour,
)

# lambda sits below (3/2) Z* here, so a SelfAdjointnessWarning is expected
p = derive_params(PhysicalInput(Z=1, g_ratio=1e-6), k=-1)
opts = ShootingOptions(r0=1e-12)
rec = find_eigenvalue(-1, 0, p, opts=opts)
con = connector_solution(rec, p, opts)
sol = con.solution
print(f"eps = {rec.eps:.15f}; orbit shadows the connector up to r = {con.r_split:.1f}")

# near the singularity R ~ r**(lambda/Z*)
expo, kind = small_r_behaviour(p)
print(f"small r: {kind} law with exponent {expo:.6f}, fitted {fit_small_r_exponent(sol):.6f}")

# far away R decays like exp(-sqrt(1 - eps^2) r)
print(f"large r: rate {far_field_rate(sol):.6e}, expected {-math.sqrt(1 - rec.eps**2):.6e}")

print(f"residual in the (u, v) system: {residual(sol, p):.1e}")
print(f"L2 norm in the gauge R(1) = 1: {sol.norm:.6f}")

peak = int(np.argmax(sol.R))
print(f"amplitude peaks at r = {sol.r[peak]:.1f}, about 1/alpha as for the Bohr radius")

sol.write_csv("ground_state.csv")
print("wrote ground_state.csv")
