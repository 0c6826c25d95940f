"""Collective emission and absorption of N two-level atoms in a damped cavity.

The package simulates superradiance of pump-prepared atomic superposition
states coupled to a single cavity mode, and its time-reversed counterpart,
superabsorption, in which an opposite-phase input field is completely
absorbed within a finite time that scales as 1/N.  Dense linear algebra on
the symmetric collective-spin sector keeps desk-scale parameter sweeps
instant; a brute-force product-space oracle validates the reduction.
"""

from .hilbert import (
    BasisSpec,
    OperatorMatrix,
    collective_jz,
    collective_lowering,
    embed_joint,
    excitation_number,
    fock_annihilator,
    fock_number,
    phase_flip_operator,
    tc_hamiltonian,
)
from .states import (
    AtomicState,
    FieldState,
    JointState,
    PumpSpec,
    atomic_coherence,
    coherent_state,
    joint_product_state,
    superposition_atomic_state,
    vacuum_state,
)
from .dynamics import (
    DissipationSpec,
    IntegratorSettings,
    TimeSeries,
    evolve_lindblad,
    evolve_unitary,
    observables,
)
from .experiments import (
    AbsorptionAccounting,
    ImperfectionModel,
    PowerLawFit,
    ScenarioSpec,
    SystemParams,
    absorption_accounting,
    complete_absorption_time,
    equivalent_atom_number,
    find_turning_point,
    fit_power_law,
    reversal_check,
    run_aperture_scan,
    run_ordinary_absorption,
    run_pump_off,
    run_superabsorption,
    run_superradiance,
    scaling_sweep,
    short_time_photon_number,
    superradiant_amplitude,
)

__version__ = "0.1.0"
