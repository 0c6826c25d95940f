"""Photons completely absorbable in a fixed window grow as N^2.

For each atom number the input photon count is tuned until the
absorption-emission turning point lands exactly at the chosen window, then
the absorbed photons are bookkept.  Without losses the points fall on an
exact square law.
"""

import numpy as np

from superabsorption import (
    PumpSpec,
    ScenarioSpec,
    SystemParams,
    fit_power_law,
    scaling_sweep,
)
from superabsorption.states import atomic_coherence

pump = PumpSpec(0.5)
rho = abs(atomic_coherence(pump))
t0 = np.sqrt(0.03) / (rho * 10.0)  # window sized for a sub-photon sweep

base = ScenarioSpec(
    params=SystemParams(n_atoms=2, coupling=1.0, fock_cutoff=12),
    pump=pump, duration=1.5 * t0, samples=241, initial_photons=0.01,
)
points = scaling_sweep(base, range(2, 11), t0)
fit = fit_power_law([(p.n_atoms, p.n_absorbed) for p in points])

print("   N    calibrated n0   absorbed    absorbed / N^2")
for p in points:
    print(f"   {p.n_atoms:<4d} {p.n_input:<15.5f} {p.n_absorbed:<11.5f} "
          f"{p.n_absorbed / p.n_atoms**2:.6f}")
print()
print(f"power-law fit: absorbed = {fit.prefactor:.5f} * N^{fit.exponent:.4f}"
      f"  (stderr {fit.stderr_q:.4f}, r^2 = {fit.r_squared:.6f})")
