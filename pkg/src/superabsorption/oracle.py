"""Independent correctness anchors for the symmetric-ladder simulator.

Everything here is built on the full 2^N product space with one sigma
operator per atom, bypassing the collective-ladder reduction entirely, so
agreement between the two routes validates the reduction rather than
restating it.  Test-time only; capped at N = 3 where the product space
(8 x field levels) stays instant to diagonalize.
"""

from __future__ import annotations

from math import comb
from typing import NamedTuple

import numpy as np

from .states import FieldState, PumpSpec

MAX_ORACLE_ATOMS = 3


class OracleError(ValueError):
    pass


class OracleSeries(NamedTuple):
    times: np.ndarray
    mean_n: np.ndarray
    mean_jz: np.ndarray


def _sigma_minus_chain(n_atoms: int, which: int) -> np.ndarray:
    """Lowering operator |g><e| for one atom, identity on the others.

    Atom 0 owns the most significant bit of the product index; within each
    atom the basis order is (|g>, |e|).
    """
    sm = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    op = np.array([[1.0]], dtype=complex)
    for i in range(n_atoms):
        op = np.kron(op, sm if i == which else np.eye(2))
    return op


def product_space_hamiltonian(n_atoms: int, fock_cutoff: int, g: float) -> np.ndarray:
    """H = g sum_i (a+ sigma_i + a sigma_i+) on the full 2^N product space."""
    if n_atoms > MAX_ORACLE_ATOMS:
        raise OracleError(f"oracle is capped at N = {MAX_ORACLE_ATOMS}, got {n_atoms}")
    fdim = fock_cutoff + 1
    n = np.arange(1, fdim)
    a = np.zeros((fdim, fdim), dtype=complex)
    a[n - 1, n] = np.sqrt(n)
    adim = 2**n_atoms
    h = np.zeros((fdim * adim, fdim * adim), dtype=complex)
    for i in range(n_atoms):
        sm = _sigma_minus_chain(n_atoms, i)
        h += np.kron(a.conj().T, sm) + np.kron(a, sm.conj().T)
    return g * h


def product_space_jz(n_atoms: int, fock_cutoff: int) -> np.ndarray:
    """J_z = (1/2) sum_i sigma_z_i embedded in the product space."""
    fdim = fock_cutoff + 1
    adim = 2**n_atoms
    jz = np.zeros((adim, adim), dtype=complex)
    for i in range(n_atoms):
        sz = np.diag([-1.0, 1.0]).astype(complex)  # |g> below |e>
        op = np.array([[1.0]], dtype=complex)
        for q in range(n_atoms):
            op = np.kron(op, sz if q == i else np.eye(2))
        jz += 0.5 * op
    return np.kron(np.eye(fdim), jz)


def product_space_number(n_atoms: int, fock_cutoff: int) -> np.ndarray:
    fdim = fock_cutoff + 1
    return np.kron(np.diag(np.arange(fdim, dtype=complex)), np.eye(2**n_atoms))


def product_superposition_state(n_atoms: int, pump: PumpSpec) -> np.ndarray:
    """The literal N-fold product (cos|g> + e^{-i phi0} sin|e>)^(x N)."""
    half = pump.pulse_area / 2.0
    single = np.array([np.cos(half), np.exp(-1j * pump.phase) * np.sin(half)], dtype=complex)
    psi = np.array([1.0], dtype=complex)
    for _ in range(n_atoms):
        psi = np.kron(psi, single)
    return psi


def embed_ladder_amplitudes(ladder: np.ndarray) -> np.ndarray:
    """Map symmetric-ladder amplitudes (indexed by excited count k) into the
    2^N product space, spreading each k evenly over the C(N,k) configurations.
    """
    n_atoms = ladder.size - 1
    out = np.zeros(2**n_atoms, dtype=complex)
    for idx in range(2**n_atoms):
        k = bin(idx).count("1")
        out[idx] = ladder[k] / np.sqrt(comb(n_atoms, k))
    return out


def brute_force_evolve(
    n_atoms: int,
    pump: PumpSpec,
    fld: FieldState,
    g: float,
    t_grid: np.ndarray,
) -> OracleSeries:
    """Exact product-space evolution of the pumped atoms and a given field.

    Propagates with a one-time eigendecomposition of the per-atom
    Hamiltonian; samples <n> and <J_z> at the grid points.
    """
    if n_atoms > MAX_ORACLE_ATOMS:
        raise OracleError(f"oracle is capped at N = {MAX_ORACLE_ATOMS}, got {n_atoms}")
    fock_cutoff = fld.dim - 1
    if fock_cutoff > 12:
        raise OracleError(f"oracle fock cutoff capped at 12, got {fock_cutoff}")
    h = product_space_hamiltonian(n_atoms, fock_cutoff, g)
    nop = product_space_number(n_atoms, fock_cutoff)
    jzop = product_space_jz(n_atoms, fock_cutoff)
    psi0 = np.kron(fld.amplitudes, product_superposition_state(n_atoms, pump))

    w, v = np.linalg.eigh(h)
    coeff = v.conj().T @ psi0
    t_grid = np.asarray(t_grid, dtype=float)
    mean_n = np.empty(t_grid.size)
    mean_jz = np.empty(t_grid.size)
    for q, t in enumerate(t_grid):
        psi = v @ (np.exp(-1j * w * t) * coeff)
        mean_n[q] = np.real(psi.conj() @ nop @ psi)
        mean_jz[q] = np.real(psi.conj() @ jzop @ psi)
    return OracleSeries(t_grid, mean_n, mean_jz)


def jaynes_cummings_reference(g: float, t: float, initial: str = "excited+vacuum") -> float:
    """Closed-form single-atom photon number: sin^2(gt) or cos^2(gt)."""
    if initial == "excited+vacuum":
        return float(np.sin(g * t) ** 2)
    if initial == "ground+one_photon":
        return float(np.cos(g * t) ** 2)
    raise OracleError(f"unknown initial condition {initial!r}")


def dicke_embedding_check(n_atoms: int, pump: PumpSpec) -> float:
    """Overlap |<product|embedded ladder>|^2; 1 when the pumped product state
    lies entirely in the symmetric sector (it always should)."""
    if n_atoms > MAX_ORACLE_ATOMS:
        raise OracleError(f"oracle is capped at N = {MAX_ORACLE_ATOMS}, got {n_atoms}")
    from .states import superposition_atomic_state

    product = product_superposition_state(n_atoms, pump)
    embedded = embed_ladder_amplitudes(superposition_atomic_state(n_atoms, pump).amplitudes)
    return float(np.abs(np.vdot(product, embedded)) ** 2)
