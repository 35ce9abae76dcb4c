"""Two routes to the disc trajectory of an oscillator with friction.

Route one integrates the Riccati equation directly.  Route two solves the
classical auxiliary oscillator eps'' + Omega^2 eps = 0 once and builds an
SU(1,1) fractional-linear map from eps = rho e^{i gamma} at each time.  The
track below has piecewise frequency and friction; at a friction jump the
derivative of eps picks up the jump times eps.

The reduced maps that drop the rho' term (or rotate the other way) only
agree for a stationary rho.  The table shows by how much they miss.

Run:  python3 demos/03_two_paths_on_the_disc.py
"""

import numpy as np

from gcsdyn.oracle import mobius_vs_riccati_experiment
from gcsdyn.tracks import CoefficientTrack, PiecewiseConstant

track = CoefficientTrack.oscillator(
    omega=PiecewiseConstant((0, 3, 7), (1.0, 1.4, 0.8)),
    b=PiecewiseConstant((0, 5), (0.0, 0.3)), T=10)
grid = np.linspace(0, 10, 201)

for convention in ("full", "rotating", "counter_rotating"):
    rep = mobius_vs_riccati_experiment(track, 0.3 + 0.2j, grid, convention=convention)
    print(f"{convention:17s} sup disc distance {rep.sup_distance:.2e}   "
          f"Wronskian drift {rep.wronskian_drift:.1e}")

rep = mobius_vs_riccati_experiment(track, 0.3 + 0.2j, grid)
print("\n   t     rho       gamma     z (Riccati)")
for i in range(0, len(grid), 25):
    z = rep.z_riccati[i]
    print(f"{grid[i]:5.1f}  {rep.eps.rho[i]:.6f}  {rep.eps.gamma[i]:8.4f}  {z.real:+.6f} {z.imag:+.6f}i")
