"""Initial states: coherent and vacuum fields, pump-prepared atoms, products.

The pump rotates every atomic Bloch vector by a pulse area theta about an
axis set by the common atom-field relative phase phi0, so each atom ends in
cos(theta/2)|g> + exp(-i phi0) sin(theta/2)|e>.  The N-atom product of that
state is exchange symmetric and therefore lives entirely on the J = N/2
ladder; its ladder amplitudes are binomial.

Phase convention: phi0 is measured relative to the input-field phase.  The
package fixes no analytic sign for the phase of the emitted field; scenario
runners determine it numerically from a short probe evolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np

from .hilbert import BasisSpec

TWO_PI = 2.0 * np.pi


class StateError(ValueError):
    """Invalid state construction."""


class CutoffError(StateError):
    """Fock cutoff too small for the requested field amplitude."""


@dataclass(frozen=True)
class PumpSpec:
    """Pump pulse area theta in [0, pi] and relative phase phi0 (stored mod 2*pi)."""

    pulse_area: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.pulse_area <= np.pi:
            raise StateError(f"pulse area must lie in [0, pi], got {self.pulse_area}")
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)


@dataclass(frozen=True)
class FieldState:
    """Normalized amplitude vector over Fock levels |0..n_max>.

    discarded_tail reports the probability removed by truncating the ideal
    (infinite) expansion, before renormalization.
    """

    amplitudes: np.ndarray
    discarded_tail: float = 0.0

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-10:
            raise StateError(f"field state must be unit norm (got {nrm})")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def mean_photons(self) -> float:
        return float(np.sum(np.arange(self.dim) * np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class AtomicState:
    """Normalized amplitudes over the symmetric ladder, indexed by the
    number of excited atoms k = 0..N (m = k - N/2)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-10:
            raise StateError(f"atomic state must be unit norm (got {nrm})")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.size - 1


@dataclass(frozen=True)
class JointState:
    """Pure vector or density matrix on the field (x) atomic product space."""

    kind: str
    data: np.ndarray

    def __post_init__(self):
        m = np.array(self.data, dtype=complex)
        if self.kind == "pure":
            m = m.ravel()
            nrm = np.linalg.norm(m)
            if abs(nrm - 1.0) > 1e-8:
                raise StateError(f"pure state norm {nrm} differs from 1 beyond 1e-8")
        elif self.kind == "density":
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise StateError(f"density matrix must be square, got {m.shape}")
            if np.max(np.abs(m - m.conj().T)) > 1e-8:
                raise StateError("density matrix is not Hermitian within 1e-8")
            tr = np.trace(m).real
            if abs(tr - 1.0) > 1e-8:
                raise StateError(f"density matrix trace {tr} differs from 1 beyond 1e-8")
            evmin = float(np.linalg.eigvalsh(m)[0])
            if evmin < -1e-8:
                raise StateError(f"density matrix has eigenvalue {evmin} < -1e-8")
        else:
            raise StateError(f"kind must be 'pure' or 'density', got {self.kind!r}")
        m.setflags(write=False)
        object.__setattr__(self, "data", m)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    def to_density(self) -> "JointState":
        if self.kind == "density":
            return self
        return JointState("density", np.outer(self.data, self.data.conj()))


def cutoff_for_amplitude(alpha: complex) -> int:
    """Smallest cutoff the tail-safety heuristic accepts for amplitude alpha.

    n_max >= |alpha|^2 + 6|alpha| + 10 keeps the discarded Poisson tail
    below 1e-8 for |alpha| <= 4.
    """
    r = abs(alpha)
    return int(np.ceil(r * r + 6.0 * r + 10.0))


def coherent_state(alpha: complex, spec: BasisSpec) -> FieldState:
    """Truncated coherent state c_n = exp(-|a|^2/2) a^n / sqrt(n!), renormalized.

    Rejects cutoffs below the tail-safety heuristic so that the discarded
    probability stays under 1e-8 and <n> matches |alpha|^2 to that level.
    """
    alpha = complex(alpha)
    need = cutoff_for_amplitude(alpha)
    if spec.fock_cutoff < need:
        raise CutoffError(
            f"fock_cutoff {spec.fock_cutoff} too small for |alpha| = {abs(alpha):.3f}; "
            f"the tail-safety heuristic requires at least {need}"
        )
    n = np.arange(spec.field_dim)
    if alpha == 0:
        return vacuum_state(spec)
    # log-magnitude keeps the factorials tame at large cutoff
    ln_fact = np.array([lgamma(k + 1.0) for k in n])
    ln_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * ln_fact
    amps = np.exp(ln_mag) * np.exp(1j * n * np.angle(alpha))
    kept = float(np.sum(np.abs(amps) ** 2))
    return FieldState(amps / np.sqrt(kept), discarded_tail=max(0.0, 1.0 - kept))


def vacuum_state(spec: BasisSpec) -> FieldState:
    amps = np.zeros(spec.field_dim, dtype=complex)
    amps[0] = 1.0
    return FieldState(amps)


def superposition_atomic_state(n_atoms: int, pump: PumpSpec) -> AtomicState:
    """Ladder amplitudes of the N-fold product of pumped single atoms.

    The coefficient of the k-excited ladder state is
    sqrt(C(N,k)) cos^(N-k)(theta/2) sin^k(theta/2) exp(-i k phi0).
    theta = 0 gives all-ground, theta = pi all-excited, exactly.
    """
    if n_atoms < 1:
        raise StateError(f"need at least one atom, got {n_atoms}")
    half = pump.pulse_area / 2.0
    c, s = np.cos(half), np.sin(half)
    k = np.arange(n_atoms + 1)
    amps = np.zeros(n_atoms + 1, dtype=complex)
    if s == 0.0:
        amps[0] = 1.0
    elif c == 0.0:
        amps[-1] = np.exp(-1j * n_atoms * pump.phase)
    else:
        ln_binom = np.array(
            [lgamma(n_atoms + 1.0) - lgamma(q + 1.0) - lgamma(n_atoms - q + 1.0) for q in k]
        )
        ln_mag = 0.5 * ln_binom + (n_atoms - k) * np.log(c) + k * np.log(s)
        amps = np.exp(ln_mag) * np.exp(-1j * k * pump.phase)
        amps /= np.linalg.norm(amps)
    return AtomicState(amps)


def ground_atomic_state(n_atoms: int) -> AtomicState:
    return superposition_atomic_state(n_atoms, PumpSpec(0.0))


def atomic_coherence(pump: PumpSpec) -> complex:
    """Single-atom off-diagonal element rho_eg = sin(theta)/2 * exp(-i phi0).

    This is the per-atom dipole; the N-atom ensemble carries <J-> = N rho_eg,
    the macro dipole that drives collective emission and absorption.
    """
    return 0.5 * np.sin(pump.pulse_area) * np.exp(-1j * pump.phase)


def joint_product_state(atom: AtomicState, fld: FieldState) -> JointState:
    """Product state |field> (x) |atoms| as a pure joint vector."""
    return JointState("pure", np.kron(fld.amplitudes, atom.amplitudes))


def _as_density(state: JointState) -> np.ndarray:
    if state.kind == "pure":
        return np.outer(state.data, state.data.conj())
    return state.data


def partial_trace_field(state: JointState, spec: BasisSpec) -> np.ndarray:
    """Reduced atomic density matrix (trace over the field factor)."""
    rho = _as_density(state).reshape(spec.field_dim, spec.atomic_dim, spec.field_dim, spec.atomic_dim)
    return np.trace(rho, axis1=0, axis2=2)


def partial_trace_atoms(state: JointState, spec: BasisSpec) -> np.ndarray:
    """Reduced field density matrix (trace over the atomic factor)."""
    rho = _as_density(state).reshape(spec.field_dim, spec.atomic_dim, spec.field_dim, spec.atomic_dim)
    return np.trace(rho, axis1=1, axis2=3)


def atomic_fidelity(state: JointState, target: AtomicState, spec: BasisSpec) -> float:
    """Overlap <target| rho_atoms |target> of the reduced atomic state."""
    rho_a = partial_trace_field(state, spec)
    v = target.amplitudes
    return float(np.real(v.conj() @ rho_a @ v))
