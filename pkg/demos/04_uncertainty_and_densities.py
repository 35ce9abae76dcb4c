"""Uncertainty products and wavefunction shapes.

* Squeezed oscillator states: <q^2><p^2> = 4k^2 |1 - z^2|^2 / (1 - |z|^2)^2,
  which never drops below 4k^2.  The floor is reached whenever z^2 is real and
  nonnegative, i.e. on the whole real diameter of the disc.
* Magnetic coherent states (x + iy)^N exp(-a r^2): the product computed from
  the actual state, and the radius where the density per unit area peaks.

Run:  python3 demos/04_uncertainty_and_densities.py
"""

import numpy as np

from gcsdyn.observables import magnetic_means, quadrature_means_matrix, uncertainty_product
from gcsdyn.states import density, magnetic_params_from_s, parity_params

print("uncertainty product / 4k^2 for k = 1/4 (closed form and matrix contraction)")
for z in (0.0, 0.5, -0.5, 0.5j, 0.4 + 0.4j, 0.9):
    mm = quadrature_means_matrix(0.25, z)
    print(f"  z = {complex(z):<12}  {uncertainty_product(0.25, z) / 0.25:.10f}   "
          f"{mm['q2'] * mm['p2'] / 0.25:.10f}")

print("\nmagnetic states at real s = 0.3")
for N in (0, 1, 2, 4):
    m = magnetic_means(N, 0.3)
    print(f"  N = {N}: <x^2><p_x^2> = {m['x2'] * m['px2']:.6f}   ((N+1)^2/4 = {(N + 1) ** 2 / 4})")

print("\ndensity maxima")
p = parity_params(-1, 0.3)
x = np.linspace(0.01, 4, 4000)
xs = x[np.argmax(density(p, x))]
print(f"  odd oscillator state: x*^2 = {xs**2:.4f}, 1/lambda = {1 / p.lam:.4f}")
for N in (1, 4):
    p = magnetic_params_from_s(N, 0.3)
    r = np.linspace(0, 5, 5000)
    rs = r[np.argmax(density(p, r))]
    print(f"  magnetic N = {N}: r* = {rs:.4f}, (N / 2 Re a)^(1/2) = {np.sqrt(N / (2 * p.a.real)):.4f}")
