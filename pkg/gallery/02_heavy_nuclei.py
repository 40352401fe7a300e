"""
Levels diving towards the lower continuum
=========================================

As Z grows past 1/alpha the lowest levels fall through eps = 0 and end at
eps = -1. The point-nucleus Coulomb problem has no solution there; the
anomalous moment keeps the problem well posed and the curves continue.

The sweep takes about a minute on one core.
"""

import numpy as np

from rwndirac.params import PhysicalInput
from rwndirac.shooting import spectrum_sweep

zs = np.arange(120.0, 172.0, 4.0)
table = spectrum_sweep(zs, [-1, 1], 2, PhysicalInput(Z=1.0))

print("   Z    (k=-1,N=0)   (k=-1,N=1)   (k=1,N=1)")
for z in zs:
    row = [r for r in table if r.z == z]
    cells = {(r.k, r.N): r for r in row}

    def cell(key):
        r = cells[key]
        return f"{r.eps:+.6f}" if r.found else "   --    "

    print(f"{z:5.0f}   {cell((-1, 0))}    {cell((-1, 1))}    {cell((1, 1))}")

# near Z = 144 two curves pass through zero together; the (k=1, N=1)
# level dips below the (k=-1, N=0) one and reaches -1 first
table.write("heavy_nuclei.csv")
print("\nwrote heavy_nuclei.csv")
