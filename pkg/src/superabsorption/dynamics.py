"""Time propagation of joint states and observable sampling.

Two propagators share one observable-sampling path:

* evolve_unitary: one-time eigendecomposition of the (time-independent)
  Hamiltonian, exact up to roundoff.  Default for pure lossless runs.
* evolve_lindblad: fixed-step RK4 on
  drho/dt = -i[H, rho] + sum_k (L rho L+ - {L+L, rho}/2)
  with L_cav = sqrt(2 gamma_c) a and optionally L_atom = sqrt(2 gamma_a) J-.
  Rates are half linewidths, so photon energy decays at 2 gamma_c.

The Fock truncation is monitored through the population of the top two
levels; runs abort rather than silently losing probability.  Positivity is
monitored, never enforced: a violation beyond tolerance means the
integration failed and raising beats clipping.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .hilbert import BasisSpec, as_matrix, joint_operators
from .states import JointState

STEP_GUARD = 0.05  # dt * fastest rate must stay below this


class IntegrationError(RuntimeError):
    """Propagation failed or produced an unreliable state."""


class StepSizeError(IntegrationError):
    pass


class TruncationError(IntegrationError):
    """Fock cutoff too small: population reached the top of the ladder."""


class PositivityError(IntegrationError):
    pass


class NonHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class DissipationSpec:
    """Cavity and collective-atomic half linewidths, rad/s.

    Atomic decay is modeled collectively through J- so the dynamics stays in
    the symmetric sector; it is disabled by default because the transit time
    of the atoms is short against their free-space lifetime.
    """

    cavity_rate: float = 0.0
    atomic_rate: float = 0.0
    enable_atomic_decay: bool = False

    def __post_init__(self):
        if self.cavity_rate < 0 or self.atomic_rate < 0:
            raise ValueError("decay rates must be nonnegative")

    @property
    def effective_atomic_rate(self) -> float:
        return self.atomic_rate if self.enable_atomic_decay else 0.0

    @property
    def lossless(self) -> bool:
        return self.cavity_rate == 0.0 and self.effective_atomic_rate == 0.0


@dataclass(frozen=True)
class IntegratorSettings:
    """Knobs for the master-equation integrator.

    method "rk4" is the fixed-step default; "expm-action" applies the exact
    exponential of the sparse Liouvillian per sample interval, which is not
    stability-limited by the empty top of the Fock ladder and is the faster
    choice for parameter sweeps.  dt=None derives the RK4 step from the
    guard dt * w_max <= guard_factor with w_max an upper bound on the
    Hamiltonian spectrum and the decay rates.  positivity_interval=0 picks
    a dimension-dependent default (every sample for small systems, thinned
    for large ones, always the final sample).
    """

    dt: float | None = None
    sample_every: int = 1
    method: str = "rk4"
    tail_abort_threshold: float = 1e-6
    guard_factor: float = 0.04
    positivity_interval: int = 0
    positivity_tolerance: float = 1e-8

    def __post_init__(self):
        if self.method not in ("rk4", "expm-action", "eigendecomposition"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 < self.guard_factor <= STEP_GUARD:
            raise StepSizeError(
                f"guard factor must lie in (0, {STEP_GUARD}], got {self.guard_factor}"
            )
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


@dataclass
class TimeSeries:
    """Observables sampled on a strictly increasing time grid.

    mean_jpjm tracks the collective correlator <J+ J-> used by the
    absorption bookkeeping; purity is tr(rho^2).
    """

    times: np.ndarray
    mean_n: np.ndarray
    mean_jz: np.ndarray
    mean_a: np.ndarray
    trace_or_norm: np.ndarray
    tail: np.ndarray
    mean_jpjm: np.ndarray
    purity: np.ndarray

    def __post_init__(self):
        lengths = {
            len(self.times), len(self.mean_n), len(self.mean_jz), len(self.mean_a),
            len(self.trace_or_norm), len(self.tail), len(self.mean_jpjm), len(self.purity),
        }
        if len(lengths) != 1:
            raise ValueError("all series tracks must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def value_at(self, track: str, t: float) -> float:
        """Linear interpolation of a real track at time t."""
        y = getattr(self, track)
        return float(np.interp(t, self.times, np.real(y)))

    def integral_to(self, track: str, t: float) -> float:
        """Trapezoidal integral of a real track over [times[0], t]."""
        ts, y = self.times, np.real(getattr(self, track))
        if not ts[0] <= t <= ts[-1] + 1e-15:
            raise ValueError(f"t = {t} outside the sampled range")
        inside = ts <= t
        ts_cut = np.append(ts[inside], t) if ts[inside][-1] < t else ts[inside]
        y_cut = np.interp(ts_cut, ts, y)
        return float(np.trapezoid(y_cut, ts_cut))


def observables(state: JointState, spec: BasisSpec) -> dict:
    """Expectation record {mean_n, mean_jz, mean_a, mean_jpjm, purity, tail, trace}.

    tail is the population of the top two Fock levels, the truncation
    health measure every propagator watches.
    """
    ops = joint_operators(spec)
    if state.kind == "pure":
        psi = state.data
        nrm2 = float(np.real(np.vdot(psi, psi)))
        mean = lambda m: complex(np.vdot(psi, m @ psi))
        pops = np.abs(psi.reshape(spec.field_dim, spec.atomic_dim)) ** 2
        purity = nrm2 * nrm2
        trace = nrm2
    else:
        rho = state.data
        # tr(M rho) as an elementwise sum, avoiding a dim^3 product
        mean = lambda m: complex(np.sum(m * rho.T))
        pops = np.real(np.diagonal(rho)).reshape(spec.field_dim, spec.atomic_dim)
        purity = float(np.real(np.sum(rho * rho.conj().T)))
        trace = float(np.real(np.trace(rho)))
    return {
        "mean_n": float(np.real(mean(ops["n"]))),
        "mean_jz": float(np.real(mean(ops["jz"]))),
        "mean_a": mean(ops["a"]),
        "mean_jpjm": float(np.real(mean(ops["jpjm"]))),
        "purity": purity,
        "tail": float(np.sum(pops[-2:, :])),
        "trace": trace,
    }


def _series_from_records(times, records) -> TimeSeries:
    return TimeSeries(
        times=np.asarray(times, dtype=float),
        mean_n=np.array([r["mean_n"] for r in records]),
        mean_jz=np.array([r["mean_jz"] for r in records]),
        mean_a=np.array([r["mean_a"] for r in records], dtype=complex),
        trace_or_norm=np.array([r["trace"] for r in records]),
        tail=np.array([r["tail"] for r in records]),
        mean_jpjm=np.array([r["mean_jpjm"] for r in records]),
        purity=np.array([r["purity"] for r in records]),
    )


def _check_tail(rec, threshold, t):
    if rec["tail"] > threshold:
        raise TruncationError(
            f"top-of-ladder population {rec['tail']:.3e} exceeded {threshold:.1e} "
            f"at t = {t:.3e} s; raise the Fock cutoff"
        )


def require_hermitian(h: np.ndarray, tol: float = 1e-12):
    scale = max(1.0, float(np.max(np.abs(h))))
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > tol * scale:
        raise NonHermitianError(f"Hamiltonian deviates from Hermitian by {dev:.3e}")


def evolve_unitary(
    state: JointState,
    hamiltonian,
    t_grid,
    spec: BasisSpec,
    settings: IntegratorSettings | None = None,
) -> tuple[TimeSeries, JointState]:
    """Exact propagation |psi(t)> = exp(-iHt)|psi(0)> via eigendecomposition.

    The Hamiltonian is diagonalized once; each grid point costs one matrix
    vector product, so dense grids are cheap.  Norm conservation is exact
    up to roundoff and the truncation tail is checked at every sample.
    """
    if state.kind != "pure":
        raise IntegrationError("evolve_unitary needs a pure state; use evolve_lindblad")
    settings = settings or IntegratorSettings()
    h = as_matrix(hamiltonian)
    require_hermitian(h)
    t_grid = np.asarray(t_grid, dtype=float)

    w, v = np.linalg.eigh(h)
    coeff = v.conj().T @ state.data
    records = []
    psi = state.data
    for t in t_grid:
        psi = v @ (np.exp(-1j * w * t) * coeff)
        rec = observables(JointState("pure", psi), spec)
        _check_tail(rec, settings.tail_abort_threshold, t)
        records.append(rec)
    return _series_from_records(t_grid, records), JointState("pure", psi)


def _spectral_bound(h) -> float:
    """Tight upper estimate of the spectral radius by power iteration."""
    dim = h.shape[0]
    rng = np.random.default_rng(7)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(30):
        w = h @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return 1.1 * lam


def _auto_dt(h, diss, guard_factor, spec):
    # the dissipative spectrum extends to the decay rate of the topmost
    # ladder states, not just the bare rates
    ops = joint_operators(spec)
    gc = 2.0 * diss.cavity_rate
    ga = 2.0 * diss.effective_atomic_rate
    w_max = (
        _spectral_bound(h)
        + gc * float(np.max(np.real(np.diag(ops["n"]))))
        + ga * float(np.max(np.real(np.diag(ops["jpjm"]))))
    )
    return guard_factor / max(w_max, gc, ga, 1e-30)


def _lindblad_rhs_factory(h, spec, diss):
    """Right-hand side with operators in CSR form; rho stays dense.

    The commutator and both anticommutators fold into one drift matrix
    G = -iH - gamma_c a+a - gamma_a J+J-.  Every Runge-Kutta stage input is
    Hermitian (the generator preserves Hermiticity), so rho G+ = (G rho)+
    and, with a and J- real, Y a+ = (a Y^T)^T; one evaluation is then a
    handful of sparse @ dense products at O(nnz * dim) instead of O(dim^3).
    """
    ops = joint_operators(spec)
    gc = 2.0 * diss.cavity_rate
    ga = 2.0 * diss.effective_atomic_rate
    drift = -1j * h - 0.5 * gc * ops["n"] - 0.5 * ga * ops["jpjm"]
    gs = sp.csr_matrix(drift)
    a = sp.csr_matrix(ops["a"].real) if gc else None
    jm = sp.csr_matrix(ops["jm"].real) if ga else None

    def rhs(rho):
        x = gs @ rho
        out = x + x.conj().T
        if gc:
            y = a @ rho
            out += gc * (a @ np.ascontiguousarray(y.T)).T
        if ga:
            z = jm @ rho
            out += ga * (jm @ np.ascontiguousarray(z.T)).T
        return out

    return rhs


def _build_liouvillian(h, spec, diss):
    """Sparse matrix acting on row-major vec(rho)."""
    ops = joint_operators(spec)
    gc = 2.0 * diss.cavity_rate
    ga = 2.0 * diss.effective_atomic_rate
    dim = spec.joint_dim
    eye = sp.identity(dim, dtype=complex, format="csr")
    hs = sp.csr_matrix(h)
    liou = -1j * (sp.kron(hs, eye) - sp.kron(eye, hs.T))
    if gc:
        a = sp.csr_matrix(ops["a"])
        nph = sp.csr_matrix(ops["n"])
        liou = liou + gc * (
            sp.kron(a, a.conj()) - 0.5 * sp.kron(nph, eye) - 0.5 * sp.kron(eye, nph.T)
        )
    if ga:
        jm = sp.csr_matrix(ops["jm"])
        jpjm = sp.csr_matrix(ops["jpjm"])
        liou = liou + ga * (
            sp.kron(jm, jm.conj()) - 0.5 * sp.kron(jpjm, eye) - 0.5 * sp.kron(eye, jpjm.T)
        )
    return liou.tocsr()


def evolve_lindblad(
    state: JointState,
    hamiltonian,
    dissipation: DissipationSpec,
    t_grid,
    spec: BasisSpec,
    settings: IntegratorSettings | None = None,
) -> tuple[TimeSeries, JointState]:
    """Master-equation propagation with cavity and optional collective decay.

    Pure inputs are promoted to density matrices.  The fixed RK4 step obeys
    dt * w_max <= guard_factor; the trace is conserved algebraically by the
    generator, so any drift flags an integrator bug and aborts the run.
    The expm-action method is step-size free and agrees with RK4 to the
    integrator tolerance.
    """
    settings = settings or IntegratorSettings()
    h = as_matrix(hamiltonian)
    require_hermitian(h)
    t_grid = np.asarray(t_grid, dtype=float)
    rho = state.to_density().data.copy()

    if settings.method == "expm-action":
        stepper = _expm_stepper(h, spec, dissipation)
    else:
        dt_max = _auto_dt(h, dissipation, settings.guard_factor, spec)
        dt = settings.dt if settings.dt is not None else dt_max
        if dt > dt_max * (1 + 1e-12):
            raise StepSizeError(
                f"dt = {dt:.3e} violates the step guard (max {dt_max:.3e} for this "
                "Hamiltonian and these rates)"
            )
        rhs = _lindblad_rhs_factory(h, spec, dissipation)

        def stepper(rho, span):
            n_sub = int(np.ceil(span / dt - 1e-12))
            hsub = span / n_sub
            for _ in range(n_sub):
                k1 = rhs(rho)
                k2 = rhs(rho + 0.5 * hsub * k1)
                k3 = rhs(rho + 0.5 * hsub * k2)
                k4 = rhs(rho + hsub * k3)
                rho = rho + (hsub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            return rho

    pos_interval = settings.positivity_interval
    if pos_interval == 0:
        pos_interval = 1 if spec.joint_dim <= 160 else max(1, (len(t_grid) - 1) // 8)

    records = []
    t_now = t_grid[0]
    for idx, t_target in enumerate(t_grid):
        span = t_target - t_now
        if span > 0:
            rho = stepper(rho, span)
            t_now = t_target
        rec = observables(_raw_density(rho), spec)
        _check_tail(rec, settings.tail_abort_threshold, t_target)
        if abs(rec["trace"] - 1.0) > 1e-6:
            raise IntegrationError(
                f"trace drifted to {rec['trace']:.9f} at t = {t_target:.3e} s"
            )
        if pos_interval and (idx % pos_interval == 0 or idx == len(t_grid) - 1):
            evmin = float(np.linalg.eigvalsh(rho)[0])
            if evmin < -settings.positivity_tolerance:
                raise PositivityError(
                    f"minimum eigenvalue {evmin:.3e} below -{settings.positivity_tolerance:.0e} "
                    f"at t = {t_target:.3e} s; reduce dt or raise the cutoff"
                )
        records.append(rec)

    rho = 0.5 * (rho + rho.conj().T)  # scrub roundoff asymmetry before validation
    return _series_from_records(t_grid, records), JointState("density", rho)


def _expm_stepper(h, spec, diss):
    """Action of exp(span * L) on vec(rho) by a scaled Taylor series.

    The Liouvillian is scaled into substeps of one-norm at most 2, where
    the plain Taylor series converges to full precision in under twenty
    matrix-vector products; no stability limit from the stiff empty top of
    the ladder applies.
    """
    from scipy.sparse.linalg import onenormest

    liou = _build_liouvillian(h, spec, diss)
    dim = spec.joint_dim
    norm1 = float(onenormest(liou))

    def stepper(rho, span):
        n_sub = max(1, int(np.ceil(norm1 * span / 2.0)))
        dt = span / n_sub
        v = rho.reshape(-1)
        for _ in range(n_sub):
            acc = v.copy()
            term = v
            for k in range(1, 60):
                term = liou @ term
                term *= dt / k
                acc += term
                if np.max(np.abs(term)) <= 1e-16 * np.max(np.abs(acc)):
                    break
            v = acc
        return v.reshape(dim, dim)

    return stepper


def _raw_density(rho):
    """Wrap an in-flight density matrix without the construction checks."""
    obj = JointState.__new__(JointState)
    object.__setattr__(obj, "kind", "density")
    object.__setattr__(obj, "data", rho)
    return obj
