"""Photon yield versus aperture position along the cavity axis.

Shifting the hole array moves the atoms across the standing-wave antinodes
and nodes: the effective coupling follows cos(2 pi dz / lambda).  With
Poisson-distributed atom numbers around a mean of 2.7, the pumped
superposition state outshines fully excited atoms at every antinode.
"""

import numpy as np

from superabsorption import (
    ImperfectionModel,
    IntegratorSettings,
    PumpSpec,
    ScenarioSpec,
    SystemParams,
    run_aperture_scan,
)

TWO_PI = 2 * np.pi
LAMBDA = 791e-9

params = SystemParams(
    n_atoms=3, mean_atoms=2.7,
    coupling=TWO_PI * 256e3,
    cavity_rate=TWO_PI * 131e3,
    atomic_rate=TWO_PI * 25e3,
    enable_atomic_decay=True,
    fock_cutoff=8,
)
spec = ScenarioSpec(
    params=params, pump=PumpSpec(np.pi / 2), duration=100e-9, samples=41,
    imperfections=ImperfectionModel(atom_number_distribution="poisson",
                                    monte_carlo_samples=60),
    seed=11,
)

offsets = np.linspace(-LAMBDA / 2, LAMBDA / 2, 17)
result = run_aperture_scan(spec, offsets, LAMBDA, IntegratorSettings(method="expm-action"))

print("   dz/lambda   superposition   fully excited")
for i, dz in enumerate(result.offsets):
    s, f = result.superposition[i], result.fully_excited[i]
    bar = "*" * int(30 * s) + "|"
    print(f"   {dz/LAMBDA:+7.3f}     {s:7.3f}         {f:7.3f}   {bar}")
print()
print(f"reference yield (fully excited at the antinode): {result.reference_peak:.4f} photons")
