"""Coherent states of an (N+1)-level system.

States of the symmetric U(N+1) representation with m quanta are labelled by
z in C^N.  Their overlaps follow the reproducing kernel (1 + y* z)^m up to
normalization, the Euler equations linearize in projective coordinates, and
the number-type means are m zeta_i* zeta_j / (1 + |z|^2) with zeta = (1, z).

Run:  python3 demos/06_multilevel_states.py
"""

import numpy as np

from gcsdyn.observables import un1_means_closed, un1_means_matrix
from gcsdyn.oracle import stability_experiment
from gcsdyn.states import un1_cs, un1_kernel
from gcsdyn.tracks import CoefficientTrack

rng = np.random.default_rng(1)
y = rng.normal(size=2) + 1j * rng.normal(size=2)
z = rng.normal(size=2) + 1j * rng.normal(size=2)
print("overlap, three quanta in three levels")
print(f"  numeric {un1_cs(2, 3, y).overlap(un1_cs(2, 3, z)):.12f}")
print(f"  kernel  {un1_kernel(3, y, z):.12f}")

print("\n<a_i^dagger a_j>, closed form minus contraction:",
      f"{np.max(np.abs(un1_means_closed(3, z) - un1_means_matrix(2, 3, z))):.1e}")

A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
track = CoefficientTrack.matrix((A + A.conj().T) / 4, T=5)
report = stability_experiment("UN1", [1, 2, 4], track, [0.2, -0.3j], np.linspace(0, 5, 51))
print("\nstability under a random Hermitian Hamiltonian:")
for m, f in report.min_fidelity.items():
    print(f"  m = {m}: min fidelity {f:.14f}")
