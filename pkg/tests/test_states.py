import numpy as np
import pytest

from superabsorption.hilbert import BasisSpec, collective_lowering
from superabsorption.states import (
    AtomicState,
    CutoffError,
    FieldState,
    JointState,
    PumpSpec,
    StateError,
    atomic_coherence,
    atomic_fidelity,
    coherent_state,
    cutoff_for_amplitude,
    ground_atomic_state,
    joint_product_state,
    partial_trace_atoms,
    partial_trace_field,
    superposition_atomic_state,
    vacuum_state,
)


class TestCoherentState:
    def test_zero_amplitude_is_vacuum(self):
        spec = BasisSpec(1, 12)
        fld = coherent_state(0.0, spec)
        assert fld.amplitudes[0] == pytest.approx(1.0)
        assert np.allclose(fld.amplitudes[1:], 0.0)

    def test_unit_amplitude_moments(self):
        fld = coherent_state(1.0, BasisSpec(1, 20))
        assert fld.mean_photons() == pytest.approx(1.0, abs=1e-8)
        assert fld.amplitudes[0] == pytest.approx(np.exp(-0.5), abs=1e-10)

    def test_two_photon_mean(self):
        fld = coherent_state(2.0, BasisSpec(1, 30))
        assert fld.mean_photons() == pytest.approx(4.0, abs=1e-8)

    def test_norm_and_tail(self):
        fld = coherent_state(1.5 - 0.5j, BasisSpec(1, 25))
        assert np.linalg.norm(fld.amplitudes) == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= fld.discarded_tail < 1e-8

    def test_cutoff_guard(self):
        assert cutoff_for_amplitude(1.0) == 17
        with pytest.raises(CutoffError):
            coherent_state(1.0, BasisSpec(1, 16))

    def test_phase_convention(self):
        fld = coherent_state(1j, BasisSpec(1, 20))
        assert np.angle(fld.amplitudes[1]) == pytest.approx(np.pi / 2)


class TestSuperpositionState:
    def test_theta_zero_all_ground(self):
        for n in (1, 4, 7):
            atom = superposition_atomic_state(n, PumpSpec(0.0))
            assert atom.amplitudes[0] == pytest.approx(1.0)
            assert np.allclose(atom.amplitudes[1:], 0.0)

    def test_theta_pi_all_excited(self):
        atom = superposition_atomic_state(5, PumpSpec(np.pi, 0.3))
        assert abs(atom.amplitudes[-1]) == pytest.approx(1.0)
        assert np.allclose(atom.amplitudes[:-1], 0.0)

    def test_two_atom_balanced_amplitudes(self):
        # expanding (|g>+|e>)(|g>+|e>)/2 over excited count gives 1/2, 1/sqrt2, 1/2
        atom = superposition_atomic_state(2, PumpSpec(np.pi / 2))
        assert np.allclose(atom.amplitudes, [0.5, 1 / np.sqrt(2), 0.5], atol=1e-12)

    @pytest.mark.parametrize("n_atoms", [1, 2, 3])
    def test_matches_product_expansion(self, n_atoms):
        from superabsorption.oracle import dicke_embedding_check

        fid = dicke_embedding_check(n_atoms, PumpSpec(1.1, 0.7))
        assert fid >= 1 - 1e-12

    def test_macro_dipole_expectation(self):
        pump = PumpSpec(0.9, 2.2)
        for n in (2, 5, 9):
            atom = superposition_atomic_state(n, pump)
            jm = collective_lowering(BasisSpec(n, 1)).entries
            dipole = atom.amplitudes.conj() @ jm @ atom.amplitudes
            assert abs(dipole - n * atomic_coherence(pump)) < 1e-10


class TestAtomicCoherence:
    def test_edge_cases(self):
        assert atomic_coherence(PumpSpec(0.0)) == 0.0
        assert atomic_coherence(PumpSpec(np.pi / 2)) == pytest.approx(0.5)

    def test_closed_form_value(self):
        val = atomic_coherence(PumpSpec(np.pi / 3, np.pi))
        assert val == pytest.approx(-0.43301270189, abs=1e-10)

    def test_maximal_at_half_pi(self):
        grid = np.linspace(0, np.pi, 101)
        mags = [abs(atomic_coherence(PumpSpec(t))) for t in grid]
        assert max(mags) == pytest.approx(0.5)
        assert np.argmax(mags) == 50


class TestPumpSpec:
    def test_rejects_out_of_range_area(self):
        with pytest.raises(StateError):
            PumpSpec(-0.1)
        with pytest.raises(StateError):
            PumpSpec(3.5)

    def test_phase_wraps(self):
        assert PumpSpec(1.0, 2 * np.pi + 0.5).phase == pytest.approx(0.5)


class TestJointState:
    def test_ground_vacuum_is_basis_vector(self):
        spec = BasisSpec(2, 3)
        joint = joint_product_state(ground_atomic_state(2), vacuum_state(spec))
        assert joint.data[0] == pytest.approx(1.0)
        assert np.allclose(joint.data[1:], 0.0)

    def test_product_norm(self):
        spec = BasisSpec(3, 20)
        joint = joint_product_state(
            superposition_atomic_state(3, PumpSpec(1.2, 0.4)),
            coherent_state(0.8j, spec),
        )
        assert np.linalg.norm(joint.data) == pytest.approx(1.0, abs=1e-12)

    def test_partial_trace_recovers_atoms(self):
        spec = BasisSpec(2, 18)
        atom = superposition_atomic_state(2, PumpSpec(0.8, 1.0))
        joint = joint_product_state(atom, coherent_state(0.5, spec))
        rho_a = partial_trace_field(joint, spec)
        expected = np.outer(atom.amplitudes, atom.amplitudes.conj())
        assert np.max(np.abs(rho_a - expected)) < 1e-12
        assert atomic_fidelity(joint, atom, spec) == pytest.approx(1.0, abs=1e-12)

    def test_partial_trace_recovers_field(self):
        spec = BasisSpec(2, 18)
        fld = coherent_state(0.5 - 0.2j, spec)
        joint = joint_product_state(ground_atomic_state(2), fld)
        rho_f = partial_trace_atoms(joint, spec)
        expected = np.outer(fld.amplitudes, fld.amplitudes.conj())
        assert np.max(np.abs(rho_f - expected)) < 1e-12

    def test_density_validation(self):
        good = np.diag([0.5, 0.5]).astype(complex)
        JointState("density", good)
        with pytest.raises(StateError):
            JointState("density", np.diag([1.2, -0.2]).astype(complex))
        with pytest.raises(StateError):
            JointState("density", np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex))
        with pytest.raises(StateError):
            JointState("pure", np.array([1.0, 1.0]))
        with pytest.raises(StateError):
            JointState("thing", np.array([1.0, 0.0]))

    def test_to_density(self):
        psi = JointState("pure", np.array([1.0, 1.0]) / np.sqrt(2))
        rho = psi.to_density()
        assert rho.kind == "density"
        assert np.allclose(rho.data, 0.5 * np.ones((2, 2)))


def test_field_and_atomic_norm_guards():
    with pytest.raises(StateError):
        FieldState(np.array([1.0, 1.0]))
    with pytest.raises(StateError):
        AtomicState(np.array([0.5, 0.5]))
