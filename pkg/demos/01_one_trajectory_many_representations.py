"""One classical trajectory drives every SU(1,1) representation.

A parametrically driven oscillator, omega(t) = 1 + 0.2 sin t, is integrated
once on the unit disc.  The quantum states of two different discrete-series
weights (k = 1/4 and k = 3/4, the even and odd sectors of the oscillator)
are then evolved exactly in a 512-level basis.  At every time they remain
coherent states sitting at the same classical point z(t).

Run:  python3 demos/01_one_trajectory_many_representations.py
"""

import numpy as np

from gcsdyn.oracle import stability_experiment
from gcsdyn.tracks import CoefficientTrack, Sinusoid

track = CoefficientTrack.oscillator(Sinusoid(offset=1.0, amplitude=0.2, frequency=1.0), b=0.0, T=10)
grid = np.linspace(0, 10, 101)

report = stability_experiment("SU11", [0.25, 0.75, 1.5], track, z0=0.3, grid=grid, trunc_dim=512)

print("classical point on the disc")
for i in range(0, len(grid), 20):
    z = report.z[i]
    print(f"  t = {grid[i]:5.1f}   z = {z.real:+.6f} {z.imag:+.6f}i   |z| = {abs(z):.6f}")

print("\nfidelity |<k; z(t)| psi_k(t)>| along the shared trajectory")
for k, fid in report.fidelity.items():
    print(f"  k = {k:<5} min fidelity = {fid.min():.15f}   "
          f"<K0> rel. error = {report.k0_error[k]:.1e}   basis = {report.trunc_dim[k]}")
print(f"\nwall time {report.wall_time:.1f} s")
