"""Spin coherent states and the sphere flow.

The stereographic coordinate z of a spin coherent state obeys a Riccati
equation.  Trajectories that pass near the south pole make |z| blow up, so the
integrator switches to the antipodal chart w = -1/z and back.  The spin-1/2
case gives an independent check: its coherent state is proportional to
(1, z), so z(t) = psi_1(t) / psi_0(t) for the exactly evolved spinor.

Run:  python3 demos/02_sphere_flow.py
"""

import numpy as np
from scipy.linalg import expm

from gcsdyn.algebra import su2_generators
from gcsdyn.flow import su2_flow
from gcsdyn.oracle import stability_experiment
from gcsdyn.tracks import CoefficientTrack

h0, h, z0 = 0.4, 0.9 - 0.3j, 0.6 + 0.1j
grid = np.linspace(0, 6, 13)
track = CoefficientTrack.linear(h0, h, T=6)
traj = su2_flow(z0, track, grid)

# in matrix form the flow corresponds to H = h* J+ + h J- + h0 J0
g = su2_generators(0.5)
H = np.conj(h) * g["Jp"] + h * g["Jm"] + h0 * g["J0"]
print("   t      |z| flow      chart      |z - psi1/psi0|")
for t, z, flipped in zip(grid, traj.z, traj.chart):
    psi = expm(-1j * H * t) @ np.array([1, z0])
    ref = psi[1] / psi[0]
    print(f"{t:5.2f}  {abs(z):12.6f}  {'antipodal' if flipped else 'standard ':9}  "
          f"{abs(z - ref) / max(1, abs(ref)):.1e}")

report = stability_experiment("SU2", [0.5, 1.0, 2.5, 6.0], track, z0, np.linspace(0, 6, 61))
print("\nhigher spins on the same trajectory:")
for j, f in report.min_fidelity.items():
    print(f"  j = {j:<4} min fidelity {f:.14f}")
