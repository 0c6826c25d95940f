"""Operators on the truncated cavity-field (x) collective-spin space.

Conventions shared by the whole package:

* Field factor: Fock states |0>..|n_max>, dimension n_max + 1.
* Atomic factor: symmetric ladder indexed by the number k = 0..N of excited
  atoms, i.e. spin projection m = k - N/2 on the J = N/2 ladder; dimension
  N + 1.  All atoms are prepared identically, so the dynamics never leaves
  this exchange-symmetric sector (validated against the full product-space
  evolution in the oracle module).
* Joint space: field index slow, atomic index fast.  A joint operator is
  numpy.kron(field_op, atomic_op).
* hbar == 1; rates in rad/s, times in seconds.

All constructors are pure functions of their arguments and return the same
matrix bit for bit on every call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FIELD = "field"
ATOMIC = "atomic"
JOINT = "joint"

# Above this joint dimension dense matrices stop being a good idea; the
# regimes this package targets (N <= ~10, n <= ~10 photons) stay well below.
DENSE_DIM_LIMIT = 4096


class BasisError(ValueError):
    """Invalid basis specification or mismatched operator bases."""


@dataclass(frozen=True)
class BasisSpec:
    """Dimensions of one run: N two-level atoms and a Fock cutoff n_max."""

    n_atoms: int
    fock_cutoff: int

    def __post_init__(self):
        if self.n_atoms < 1:
            raise BasisError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        if self.fock_cutoff < 1:
            raise BasisError(
                "fock_cutoff must be >= 1; a cutoff of 0 leaves no photon "
                f"dynamics at all (got {self.fock_cutoff})"
            )

    @property
    def field_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def atomic_dim(self) -> int:
        return self.n_atoms + 1

    @property
    def joint_dim(self) -> int:
        return self.field_dim * self.atomic_dim


@dataclass(frozen=True)
class OperatorMatrix:
    """A square complex matrix tagged with the basis it acts on."""

    entries: np.ndarray
    basis_tag: str

    def __post_init__(self):
        if self.basis_tag not in (FIELD, ATOMIC, JOINT):
            raise BasisError(f"unknown basis tag {self.basis_tag!r}")
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise BasisError(f"operator entries must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.basis_tag)


def as_matrix(op) -> np.ndarray:
    """Accept either an OperatorMatrix or a bare ndarray."""
    return op.entries if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=complex)


def fock_annihilator(spec: BasisSpec) -> OperatorMatrix:
    """Field annihilation operator a with a|n> = sqrt(n)|n-1>, a|0> = 0.

    The creation operator is the conjugate transpose.  On the truncated
    space [a, a+] = 1 everywhere except the top Fock level.
    """
    n = np.arange(1, spec.field_dim)
    a = np.zeros((spec.field_dim, spec.field_dim), dtype=complex)
    a[n - 1, n] = np.sqrt(n)
    return OperatorMatrix(a, FIELD)


def fock_number(spec: BasisSpec) -> OperatorMatrix:
    """Photon number operator a+a, diagonal 0..n_max."""
    return OperatorMatrix(np.diag(np.arange(spec.field_dim, dtype=complex)), FIELD)


def collective_lowering(spec: BasisSpec) -> OperatorMatrix:
    """Collective lowering J- on the symmetric ladder.

    J-|J,m> = sqrt(J(J+1) - m(m-1)) |J,m-1> with J = N/2; the raising
    operator is the conjugate transpose and (J-)^(N+1) = 0 exactly.
    """
    j = spec.n_atoms / 2.0
    k = np.arange(1, spec.atomic_dim)  # number of excited atoms in the source state
    m = k - j
    jm = np.zeros((spec.atomic_dim, spec.atomic_dim), dtype=complex)
    jm[k - 1, k] = np.sqrt(j * (j + 1) - m * (m - 1))
    return OperatorMatrix(jm, ATOMIC)


def collective_jz(spec: BasisSpec) -> OperatorMatrix:
    """J_z, diagonal m = -N/2 .. N/2 in excited-atom-count order."""
    j = spec.n_atoms / 2.0
    return OperatorMatrix(np.diag(np.arange(spec.atomic_dim) - j).astype(complex), ATOMIC)


def embed_joint(field_op: OperatorMatrix, atomic_op: OperatorMatrix) -> OperatorMatrix:
    """Tensor-embed a field and an atomic operator into the joint space.

    Ordering is fixed package-wide: field index slow, atomic index fast.
    """
    if field_op.basis_tag != FIELD or atomic_op.basis_tag != ATOMIC:
        raise BasisError(
            "embed_joint needs (field, atomic) operators, got "
            f"({field_op.basis_tag!r}, {atomic_op.basis_tag!r})"
        )
    return OperatorMatrix(np.kron(field_op.entries, atomic_op.entries), JOINT)


def field_identity(spec: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(np.eye(spec.field_dim, dtype=complex), FIELD)


def atomic_identity(spec: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(np.eye(spec.atomic_dim, dtype=complex), ATOMIC)


def tc_hamiltonian(spec: BasisSpec, g: float) -> OperatorMatrix:
    """Tavis-Cummings exchange coupling H = g (a+ J- + a J+), hbar = 1.

    Hermitian by construction and commuting with the total excitation
    number, so every run conserves energy and excitation when lossless.
    g may be zero or negative: zero occurs at field nodes in the aperture
    scan, and a sign flip is gauge-equivalent to a field phase flip.
    """
    if not np.isfinite(g):
        raise BasisError(f"coupling g must be finite, got {g}")
    a = fock_annihilator(spec).entries
    jm = collective_lowering(spec).entries
    h = g * (np.kron(a.conj().T, jm) + np.kron(a, jm.conj().T))
    return OperatorMatrix(h, JOINT)


def phase_flip_operator(spec: BasisSpec, basis_tag: str = JOINT) -> OperatorMatrix:
    """Field phase flip, diagonal (-1)^n over Fock levels.

    Unitary and self-inverse; conjugation sends a -> -a exactly, also on
    the truncated space, so flip . U(t) . flip = U(-t) holds as a matrix
    identity for the exchange Hamiltonian.  With basis_tag=JOINT the flip
    acts as the identity on the atomic factor.
    """
    signs = (-1.0) ** np.arange(spec.field_dim)
    if basis_tag == FIELD:
        return OperatorMatrix(np.diag(signs).astype(complex), FIELD)
    if basis_tag == JOINT:
        full = np.repeat(signs, spec.atomic_dim)
        return OperatorMatrix(np.diag(full).astype(complex), JOINT)
    raise BasisError(f"phase flip is defined on 'field' or 'joint', not {basis_tag!r}")


def excitation_number(spec: BasisSpec) -> OperatorMatrix:
    """Total excitation N_exc = a+a (x) 1 + 1 (x) (J_z + N/2); commutes with H."""
    nph = np.kron(fock_number(spec).entries, np.eye(spec.atomic_dim))
    nat = np.kron(np.eye(spec.field_dim), np.diag(np.arange(spec.atomic_dim)))
    return OperatorMatrix(nph + nat, JOINT)


@lru_cache(maxsize=32)
def joint_operators(spec: BasisSpec) -> dict:
    """Cached bundle of the joint-space matrices every propagator needs."""
    a = np.kron(fock_annihilator(spec).entries, np.eye(spec.atomic_dim))
    jm = np.kron(np.eye(spec.field_dim), collective_lowering(spec).entries)
    jz = np.kron(np.eye(spec.field_dim), collective_jz(spec).entries)
    ops = {
        "a": a,
        "ad": a.conj().T,
        "n": a.conj().T @ a,
        "jm": jm,
        "jp": jm.conj().T,
        "jz": jz,
        "jpjm": jm.conj().T @ jm,
        "flip": phase_flip_operator(spec).entries,
    }
    for m in ops.values():
        m.setflags(write=False)
    return ops
