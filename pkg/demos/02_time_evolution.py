"""Solve the initial value problem twice: through the transform and with split-step.

Run: python demos/02_time_evolution.py
"""

import time

import numpy as np

from nonlocal_ist import UniformGrid, gaussian_potential
from nonlocal_ist.evolution import ist_solve
from nonlocal_ist.splitstep import conserved_quantity, split_step

xgrid = UniformGrid(-16, 16, 512)
q0 = gaussian_potential(xgrid, 0.08, shift=0.5)
q0 = q0.with_values(q0.values * np.exp(0.3j * xgrid.nodes))
print(f"Q(0) = {conserved_quantity(q0):.10f}")

for t in (0.1, 0.25, 0.5):
    start = time.perf_counter()
    ist = ist_solve(q0, t)
    mid = time.perf_counter()
    pde = split_step(q0, t, 1e-3)
    end = time.perf_counter()
    gap = np.max(np.abs(ist.values - pde.values))
    print(f"t = {t:<5} |IST - split-step|_inf = {gap:.2e}   "
          f"Q drift {abs(conserved_quantity(pde) - conserved_quantity(q0)):.1e}   "
          f"(IST {mid - start:.1f} s, split-step {end - mid:.2f} s)")
