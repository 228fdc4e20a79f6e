"""Watch the discretisation errors shrink under grid refinement.

Run: python demos/03_refinement.py
"""

from nonlocal_ist import UniformGrid, gaussian_potential, reflection_coefficients, scattering_coefficients
from nonlocal_ist.reconstruction import reconstruct_q, relative_l2

print("  nx    nk    K   Wronskian gap   roundtrip rel L2")
prev = None
for nx, kmax in ((256, 12), (512, 24), (1024, 48)):
    xgrid = UniformGrid(-16, 16, nx)
    kgrid = UniformGrid(-kmax, kmax, 2 * nx)
    q = gaussian_potential(xgrid, 0.08)
    data = scattering_coefficients(q, kgrid)
    rec = reconstruct_q(reflection_coefficients(data), xgrid)
    err = relative_l2(rec.values, q.values, xgrid.spacing)
    note = f"  (ratio {prev / err:.2f})" if prev else ""
    print(f"{nx:5d} {kgrid.n:5d} {kmax:4d}   {data.wronskian_residual:.2e}       {err:.2e}{note}")
    prev = err
