"""Watch a superradiant emission run exactly in reverse.

Pumped atoms radiate a growing field; flipping the field phase at time T
and evolving for another T returns the cavity to vacuum and the atoms to
their initial superposition, to machine precision.  The same flip applied
to a bare product of the dominant atomic state with a coherent field is
only approximately reversed, with a residual that shrinks as 1/N.
"""

import numpy as np

from superabsorption import PumpSpec, SystemParams, reversal_check

pump = PumpSpec(np.pi / 2)

print("exact joint-state flip:")
print("  N    g t N    final <n>      atomic fidelity")
for n_atoms in (1, 2, 4, 8):
    params = SystemParams(n_atoms=n_atoms, coupling=1.0, fock_cutoff=14)
    out = reversal_check(params, pump, 1.2 / n_atoms, variant="exact")
    print(f"  {n_atoms:<4d} 1.2      {out['final_mean_n']:<13.2e} {out['atomic_fidelity']:.15f}")

print()
print("coherent-field approximation of the flipped state:")
print("  N    g t N    final <n>      atomic fidelity")
for n_atoms in (2, 4, 8):
    params = SystemParams(n_atoms=n_atoms, coupling=1.0, fock_cutoff=14)
    out = reversal_check(params, pump, 0.3 / n_atoms, variant="coherent")
    print(f"  {n_atoms:<4d} 0.3      {out['final_mean_n']:<13.2e} {out['atomic_fidelity']:.8f}")

print()
print("The residual photon number of the product-state variant is the")
print("incoherent part of the dipole fluctuations, a factor tan^2(theta/2)/N")
print("below the coherent field, so the reversal sharpens with atom number.")
