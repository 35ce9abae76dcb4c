"""Thermal averages as coherent-state means in a doubled Fock space.

The two-mode state sqrt(1 - z^2) sum_n z^n |n, n> with z = exp(-beta omega / 2)
reproduces canonical averages of any observable acting on the first mode.
For the number operator the result is the Bose occupation 1/(e^{beta omega} - 1).

Run:  python3 demos/05_thermal_states.py
"""

from gcsdyn.observables import bose_occupation, thermal_average_check

print(" beta*omega   coherent-state mean    canonical trace       Bose occupation")
for bw in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
    rep = thermal_average_check(bw, "number")
    print(f"{bw:10.2f}   {rep.closed_form_value.real:.15f}   {rep.matrix_value.real:.15f}   "
          f"{bose_occupation(bw):.15f}")

print("\nother observables at beta*omega = 1:")
for op in ("identity", "vacuum_projector", lambda n: n**2):
    rep = thermal_average_check(1.0, op)
    print(f"  {rep.name:40s} {rep.closed_form_value.real:.12f}  (diff {rep.abs_discrepancy:.1e})")
