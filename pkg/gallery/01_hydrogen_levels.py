"""
Hydrogen levels from winding numbers
====================================

Every energy eps launches one orbit on the compactified cylinder. The orbit
wraps around the cylinder some number of times before settling; that count
is the winding number. Eigenvalues are the energies where it jumps.
"""

import numpy as np

from rwndirac.oracle import sommerfeld
from rwndirac.params import PhysicalInput, derive_params
from rwndirac.shooting import find_eigenvalue, launch_orbit

# physical hydrogen: tiny gravity, physical anomalous moment
p = derive_params(PhysicalInput(Z=1), k=-1)
print(f"Z* = {p.z_star:.3e}, gamma = {p.gamma:.6f}, lambda = {p.lam:.3e}")

# the winding number is a step function of eps; near 1 the steps crowd
for eps in (0.0, 0.9, 0.99997, 0.999975, 0.999994, 0.999996):
    o = launch_orbit(eps, p)
    print(f"eps = {eps:<9} winding = {o.winding}  ({o.classification}, {o.reason})")

# bisection on the integer predicate winding >= N + 1
print("\n k  N   eps                   Sommerfeld            difference")
for k, N in [(-1, 0), (-1, 1), (1, 1), (-2, 0), (-1, 2)]:
    rec = find_eigenvalue(k, N, p)
    ref = sommerfeld(N + abs(k), k, 1).eps
    print(f"{k:2d} {N:2d}   {rec.eps:.16f}  {ref:.16f}  {rec.eps - ref:+.2e}")

# the anomalous moment lifts the k <-> -k degeneracy, but only barely at Z=1
a = find_eigenvalue(-1, 1, p).eps
b = find_eigenvalue(1, 1, p).eps
print(f"\n2S - 2P splitting at Z=1: {a - b:.3e}")

# a uniform grid shows the monotone staircase
grid = np.linspace(0.99999, 0.999999, 11)
print("staircase:", [launch_orbit(e, p).winding for e in grid])
