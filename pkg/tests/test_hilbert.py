import numpy as np
import pytest
import scipy.linalg as sla

from superabsorption.hilbert import (
    ATOMIC,
    FIELD,
    BasisError,
    BasisSpec,
    OperatorMatrix,
    atomic_identity,
    collective_jz,
    collective_lowering,
    embed_joint,
    excitation_number,
    field_identity,
    fock_annihilator,
    fock_number,
    phase_flip_operator,
    tc_hamiltonian,
)


def test_basis_dimensions():
    spec = BasisSpec(2, 4)
    assert spec.atomic_dim == 3
    assert spec.field_dim == 5
    assert spec.joint_dim == 15


def test_basis_rejects_degenerate_cutoff():
    with pytest.raises(BasisError):
        BasisSpec(2, 0)
    with pytest.raises(BasisError):
        BasisSpec(0, 4)


def test_fock_ladder_entries():
    a = fock_annihilator(BasisSpec(1, 2)).entries
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2.0))
    assert np.count_nonzero(a) == 2
    # a|0> = 0
    vac = np.array([1.0, 0, 0])
    assert np.allclose(a @ vac, 0.0)


def test_number_operator_diagonal():
    spec = BasisSpec(1, 5)
    a = fock_annihilator(spec).entries
    n = a.conj().T @ a
    assert np.allclose(np.diag(n), np.arange(6))
    assert np.allclose(n, fock_number(spec).entries)


def test_commutator_truncates_at_top():
    spec = BasisSpec(1, 6)
    a = fock_annihilator(spec).entries
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert np.diag(comm)[-1] == pytest.approx(-6.0)  # truncation boundary


def test_single_atom_lowering_is_sigma_minus():
    jm = collective_lowering(BasisSpec(1, 1)).entries
    assert jm[0, 1] == pytest.approx(1.0)
    assert np.count_nonzero(jm) == 1


def test_two_atom_lowering_matrix_element():
    # from the middle of the N=2 ladder: sqrt(J(J+1) - m(m-1)) with J=1, m=0
    jm = collective_lowering(BasisSpec(2, 1)).entries
    assert jm[0, 1] == pytest.approx(np.sqrt(2.0))
    assert jm[1, 2] == pytest.approx(np.sqrt(2.0))


@pytest.mark.parametrize("n_atoms", [1, 2, 3, 5])
def test_lowering_ladder_bottoms_out(n_atoms):
    jm = collective_lowering(BasisSpec(n_atoms, 1)).entries
    power = np.linalg.matrix_power(jm, n_atoms + 1)
    assert np.max(np.abs(power)) == 0.0


def test_hamiltonian_single_excitation_block():
    spec = BasisSpec(1, 1)
    g = 0.7
    h = tc_hamiltonian(spec, g).entries
    # basis order: |0,g>, |0,e>, |1,g>, |1,e>; coupling |0,e> <-> |1,g>
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = expected[2, 1] = g
    assert np.allclose(h, expected)


def test_hamiltonian_hermitian():
    h = tc_hamiltonian(BasisSpec(4, 9), 2.3).entries
    assert np.max(np.abs(h - h.conj().T)) == 0.0


def test_hamiltonian_conserves_excitation():
    spec = BasisSpec(3, 8)
    h = tc_hamiltonian(spec, 1.7).entries
    nexc = excitation_number(spec).entries
    comm = h @ nexc - nexc @ h
    assert np.max(np.abs(comm)) < 1e-12 * np.max(np.abs(h))


def test_phase_flip_signs_and_unitarity():
    spec = BasisSpec(2, 5)
    r = phase_flip_operator(spec, basis_tag=FIELD).entries
    assert np.allclose(np.diag(r), (-1.0) ** np.arange(6))
    assert np.allclose(r @ r, np.eye(6))  # self-inverse
    rj = phase_flip_operator(spec).entries
    assert np.allclose(rj @ rj.conj().T, np.eye(spec.joint_dim))


def test_phase_flip_negates_annihilator():
    spec = BasisSpec(1, 7)
    a = fock_annihilator(spec).entries
    r = phase_flip_operator(spec, basis_tag=FIELD).entries
    assert np.allclose(r @ a @ r.conj().T, -a)


def test_phase_flip_maps_coherent_to_opposite():
    from superabsorption.states import coherent_state

    spec = BasisSpec(1, 20)
    r = phase_flip_operator(spec, basis_tag=FIELD).entries
    plus = coherent_state(0.9 + 0.4j, spec).amplitudes
    minus = coherent_state(-0.9 - 0.4j, spec).amplitudes
    assert np.max(np.abs(r @ plus - minus)) < 1e-14


@pytest.mark.parametrize("n_atoms,fock", [(1, 6), (2, 9), (4, 12)])
def test_flip_conjugation_reverses_time(n_atoms, fock):
    spec = BasisSpec(n_atoms, fock)
    h = tc_hamiltonian(spec, 1.9).entries
    r = phase_flip_operator(spec).entries
    for t in (0.3, 1.1):
        u = sla.expm(-1j * h * t)
        u_back = sla.expm(1j * h * t)
        assert np.max(np.abs(r @ u @ r.conj().T - u_back)) < 1e-10


def test_embed_joint_identity_and_mixed_product():
    spec = BasisSpec(2, 4)
    eye = embed_joint(field_identity(spec), atomic_identity(spec)).entries
    assert np.allclose(eye, np.eye(15))

    a = fock_annihilator(spec)
    jm = collective_lowering(spec)
    left = embed_joint(a, atomic_identity(spec)).entries
    right = embed_joint(field_identity(spec), jm).entries
    both = embed_joint(a, jm).entries
    assert np.allclose(left @ right, both)


def test_embed_joint_rejects_wrong_tags():
    spec = BasisSpec(2, 4)
    a = fock_annihilator(spec)
    with pytest.raises(BasisError):
        embed_joint(a, a)
    with pytest.raises(BasisError):
        embed_joint(collective_lowering(spec), a)


def test_operator_matrix_validation():
    with pytest.raises(BasisError):
        OperatorMatrix(np.zeros((2, 3)), FIELD)
    with pytest.raises(BasisError):
        OperatorMatrix(np.zeros((2, 2)), "nonsense")
    op = OperatorMatrix(np.array([[0, 1j], [0, 0]]), ATOMIC)
    assert np.allclose(op.dag.entries, np.array([[0, 0], [-1j, 0]]))


def test_constructors_deterministic():
    spec = BasisSpec(3, 7)
    h1 = tc_hamiltonian(spec, 1.234).entries
    h2 = tc_hamiltonian(spec, 1.234).entries
    assert h1.tobytes() == h2.tobytes()
    j1 = collective_jz(spec).entries
    j2 = collective_jz(spec).entries
    assert j1.tobytes() == j2.tobytes()
