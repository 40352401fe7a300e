"""
Barrier curves on the cylinder
==============================

The winding-number bounds rest on curves the flow crosses in one direction
only. Each check evaluates a margin that is positive exactly when the
inequality holds, on a grid dense near both ends.
"""

from rwndirac.barriers import eta_crossing_bound, slanted_u, slanted_v, verify_all
from rwndirac.params import PhysicalInput, derive_params

for z in (1, 45, 100, 137):
    p = derive_params(PhysicalInput(Z=z), k=-1)
    print(f"Z = {z}")
    for rep in verify_all(p, grid=20000, k_max=5):
        tag = "" if rep.in_hypotheses else "   (outside hypotheses)"
        print(f"  {rep.line()}{tag}")

# constants from the slanted-barrier estimate: u bounds A^2 + B^2, v bounds C^2
print(f"\nu(1) = {slanted_u(1):.4f}, v(1) = {slanted_v(1):.4f}")
print(f"Omega = 0 is crossed downwards only for eta below about {eta_crossing_bound():.5f}")
