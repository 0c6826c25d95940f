"""The product-space oracle validates the collective-ladder reduction."""

import numpy as np
import pytest

from superabsorption.dynamics import evolve_unitary
from superabsorption.hilbert import BasisSpec, tc_hamiltonian
from superabsorption.oracle import (
    OracleError,
    brute_force_evolve,
    dicke_embedding_check,
    embed_ladder_amplitudes,
    jaynes_cummings_reference,
    product_space_hamiltonian,
    product_space_jz,
    product_space_number,
    product_superposition_state,
)
from superabsorption.states import (
    PumpSpec,
    coherent_state,
    joint_product_state,
    superposition_atomic_state,
    vacuum_state,
)


def test_jaynes_cummings_reference_values():
    assert jaynes_cummings_reference(1.0, 0.0) == 0.0
    assert jaynes_cummings_reference(1.0, np.pi / 2) == pytest.approx(1.0)
    assert jaynes_cummings_reference(1.0, np.pi / 2, "ground+one_photon") == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(OracleError):
        jaynes_cummings_reference(1.0, 0.1, "nonsense")


def test_single_atom_reproduces_rabi_oscillation():
    grid = np.linspace(0, 4.0, 41)
    out = brute_force_evolve(1, PumpSpec(np.pi), vacuum_state(BasisSpec(1, 4)), 1.0, grid)
    assert np.max(np.abs(out.mean_n - np.sin(grid) ** 2)) < 1e-12


@pytest.mark.parametrize("n_atoms", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.0, -0.3j])
def test_reduced_and_product_space_agree(n_atoms, alpha):
    """Superradiance (vacuum) and superabsorption (coherent) inputs."""
    g = 1.3
    basis = BasisSpec(n_atoms, 12)
    pump = PumpSpec(np.pi / 2, 0.8)
    fld = coherent_state(alpha, basis) if alpha else vacuum_state(basis)
    grid = np.linspace(0, 2.5, 41)

    psi0 = joint_product_state(superposition_atomic_state(n_atoms, pump), fld)
    reduced, _ = evolve_unitary(psi0, tc_hamiltonian(basis, g), grid, basis)
    product = brute_force_evolve(n_atoms, pump, fld, g, grid)

    assert np.max(np.abs(reduced.mean_n - product.mean_n)) < 1e-10
    assert np.max(np.abs(reduced.mean_jz - product.mean_jz)) < 1e-10


def test_oracle_guards():
    with pytest.raises(OracleError):
        brute_force_evolve(4, PumpSpec(0.5), vacuum_state(BasisSpec(1, 4)), 1.0, [0, 1])
    with pytest.raises(OracleError):
        brute_force_evolve(2, PumpSpec(0.5), vacuum_state(BasisSpec(1, 20)), 1.0, [0, 1])


def test_embedding_fidelity_and_negative_control():
    assert dicke_embedding_check(3, PumpSpec(0.0)) == pytest.approx(1.0)
    assert dicke_embedding_check(3, PumpSpec(np.pi / 2, 1.3)) == pytest.approx(1.0, abs=1e-12)

    # corrupt one ladder amplitude: the embedded state no longer matches
    ladder = superposition_atomic_state(3, PumpSpec(np.pi / 2, 1.3)).amplitudes.copy()
    ladder[1] *= 0.7
    ladder /= np.linalg.norm(ladder)
    product = product_superposition_state(3, PumpSpec(np.pi / 2, 1.3))
    overlap = abs(np.vdot(product, embed_ladder_amplitudes(ladder))) ** 2
    assert overlap < 0.999


def test_nonsymmetric_states_stay_outside_symmetric_sector():
    """The coupling commutes with atom exchange, so the antisymmetric
    component never leaks into the symmetric ladder's image."""
    n_atoms, fock = 3, 6
    h = product_space_hamiltonian(n_atoms, fock, 1.0)
    w, v = np.linalg.eigh(h)

    # antisymmetric combination |egg> - |geg| on atoms 0 and 1, vacuum field
    atom = np.zeros(8, dtype=complex)
    atom[0b100] = 1 / np.sqrt(2)
    atom[0b010] = -1 / np.sqrt(2)
    fld = np.zeros(fock + 1, dtype=complex)
    fld[0] = 1.0
    psi_asym = np.kron(fld, atom)

    sym = np.kron(fld, embed_ladder_amplitudes(
        superposition_atomic_state(n_atoms, PumpSpec(np.pi / 2)).amplitudes))

    for t in (0.4, 1.7, 3.0):
        phase = np.exp(-1j * w * t)
        evolved_asym = v @ (phase * (v.conj().T @ psi_asym))
        evolved_sym = v @ (phase * (v.conj().T @ sym))
        assert abs(np.vdot(evolved_sym, evolved_asym)) < 1e-12


def test_product_space_time_reversal():
    """Phase flip plus forward evolution undoes the emission in the full
    product space too, so the reversal is not a reduction artifact."""
    n_atoms, fock, g, t = 3, 8, 1.0, 0.45
    h = product_space_hamiltonian(n_atoms, fock, g)
    nop = product_space_number(n_atoms, fock)
    w, v = np.linalg.eigh(h)

    psi0 = np.kron(
        np.eye(fock + 1, dtype=complex)[0],
        product_superposition_state(n_atoms, PumpSpec(np.pi / 2, 0.4)),
    )
    prop = lambda psi: v @ (np.exp(-1j * w * t) * (v.conj().T @ psi))
    mid = prop(psi0)
    flip = np.kron(np.diag((-1.0) ** np.arange(fock + 1)), np.eye(2**n_atoms))
    back = prop(flip @ mid)

    assert np.real(back.conj() @ nop @ back) < 1e-12
    assert abs(np.vdot(psi0, back)) ** 2 > 1 - 1e-12


def test_product_space_jz_matches_ladder_baseline():
    jz = product_space_jz(2, 3)
    # all-ground product index 0b00 = last... atom order: |gg> is index 0
    vec = np.zeros(4 * 4, dtype=complex)
    vec[0] = 1.0
    assert np.real(vec.conj() @ jz @ vec) == pytest.approx(-1.0)
