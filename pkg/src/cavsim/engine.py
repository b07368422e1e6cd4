"""Stochastic integration of single trajectories.

The coupled equations of motion are

    dx_j = (p_j / m) dt
    dp_j = F(x_j, alpha) dt
    dalpha = [i(delta_c - u0 sum_j sin^2 x_j) - kappa] alpha dt + eta_p dt
             - i eta sum_j sin(x_j) dt + sqrt(kappa/2) (dW_1 + i dW_2),

integrated either with Euler-Maruyama steps or with a split scheme that
treats the field exactly as an Ornstein-Uhlenbeck process over each step
(atoms frozen), which lifts the kappa*dt stability limit of the stiff
field equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .model import (
    MASS,
    TWO_PI,
    ObservableRecord,
    PumpSchedule,
    SimParams,
    TrajectoryState,
    wrap_positions,
)

SCHEMES = ("euler_maruyama", "split_exponential")

#: Euler-Maruyama becomes unstable on the stiff field equation well below
#: this; reject configurations beyond it.
MAX_EULER_KAPPA_DT = 0.1

# Purpose tags keep the initial-condition and noise streams of one
# trajectory statistically independent.
_INIT_TAG = 0x1A17
_NOISE_TAG = 0x2B29


def _mask64(seed: int) -> int:
    return int(seed) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RngStream:
    """Handle for the random streams of one trajectory.

    Identical (master_seed, init_index, noise_index) triples reproduce
    identical draws on every run and under any worker layout; distinct
    triples give statistically independent counter-based streams. The
    initial-condition stream depends only on (master_seed, init_index),
    so trajectories sharing an initial condition share its draws.
    """

    master_seed: int
    init_index: int = 0
    noise_index: int = 0

    def init_rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            (_mask64(self.master_seed), _INIT_TAG, int(self.init_index))
        )
        return np.random.Generator(np.random.Philox(seq))

    def noise_rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            (
                _mask64(self.master_seed),
                _NOISE_TAG,
                int(self.init_index),
                int(self.noise_index),
            )
        )
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class IntegratorConfig:
    """Scheme choice, sampling stride and end time of a run.

    The freeze flags pin parts of the dynamics for validation runs
    (frozen atoms isolate the field equation; a frozen field makes the
    atomic motion Hamiltonian).
    """

    scheme: str = "split_exponential"
    record_stride: int = 1
    t_end: float = 1.0
    freeze_atoms: bool = False
    freeze_field: bool = False

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")

    @property
    def scheme_id(self) -> int:
        return (
            _kernels.EULER_MARUYAMA
            if self.scheme == "euler_maruyama"
            else _kernels.SPLIT_EXPONENTIAL
        )


@dataclass
class ObservableSeries:
    """Array-backed time series of ObservableRecords."""

    t: np.ndarray
    theta: np.ndarray
    bunching: np.ndarray
    re_alpha: np.ndarray
    im_alpha: np.ndarray

    @property
    def photon_number(self) -> np.ndarray:
        return self.re_alpha * self.re_alpha + self.im_alpha * self.im_alpha

    def __len__(self) -> int:
        return self.t.shape[0]

    def record(self, i: int) -> ObservableRecord:
        return ObservableRecord(
            t=float(self.t[i]),
            theta=float(self.theta[i]),
            bunching=float(self.bunching[i]),
            photon_number=float(self.re_alpha[i] ** 2 + self.im_alpha[i] ** 2),
            re_alpha=float(self.re_alpha[i]),
            im_alpha=float(self.im_alpha[i]),
        )

    def to_records(self) -> list[ObservableRecord]:
        return [self.record(i) for i in range(len(self))]

    def index_of_time(self, t: float, tol: float = 1e-9) -> int:
        """Index of the recorded instant t; error if t was not recorded."""
        idx = int(np.argmin(np.abs(self.t - t)))
        if abs(float(self.t[idx]) - t) > tol * max(1.0, abs(t)):
            raise ValueError(f"time {t} was not recorded")
        return idx


class Snapshot(NamedTuple):
    """Full phase-space snapshot of the atoms at one instant."""

    x: np.ndarray
    p: np.ndarray


class TrajectoryRun(NamedTuple):
    series: ObservableSeries
    final_state: TrajectoryState
    snapshots: dict[float, Snapshot]


def sample_initial(params: SimParams, rng: RngStream | np.random.Generator) -> TrajectoryState:
    """Thermal initial state: positions uniform over one lattice period,
    momenta Maxwell-Boltzmann with variance m*k_B*T, dark cavity."""
    gen = rng.init_rng() if isinstance(rng, RngStream) else rng
    x = wrap_positions(gen.uniform(0.0, TWO_PI, params.n_atoms))
    sigma_p = math.sqrt(MASS * params.temp_init)
    p = sigma_p * gen.standard_normal(params.n_atoms)
    return TrajectoryState(x=x, p=p, alpha=0.0 + 0.0j, t=0.0)


def _check_scheme_step(params: SimParams, cfg: IntegratorConfig) -> None:
    if cfg.scheme == "euler_maruyama" and params.kappa * params.dt > MAX_EULER_KAPPA_DT:
        raise ValueError(
            f"euler_maruyama with kappa*dt = {params.kappa * params.dt:.3g} is "
            f"unstable; need kappa*dt <= {MAX_EULER_KAPPA_DT} or the "
            "split_exponential scheme"
        )


def _span_steps(span: float, dt: float) -> tuple[int, float]:
    """Number of steps covering a span and the length of the final,
    possibly shortened, step."""
    n = max(1, int(math.ceil(span / dt - 1e-9)))
    return n, span - (n - 1) * dt


def step(
    state: TrajectoryState,
    eta_p: complex,
    params: SimParams,
    cfg: IntegratorConfig,
    rng: np.random.Generator | None = None,
) -> TrajectoryState:
    """One integrator step of length params.dt.

    Consumes exactly two standard normals from rng when the noise term
    is active; bit-identical to the corresponding step inside
    run_trajectory.
    """
    state.validate(params.n_atoms)
    _check_scheme_step(params, cfg)
    use_noise = params.noise_on and not cfg.freeze_field
    if use_noise:
        if rng is None:
            raise ValueError("noise is on but no random generator was given")
        noise = rng.standard_normal((1, 2))
    else:
        noise = np.empty((0, 2), dtype=np.float64)

    x = state.x.copy()
    p = state.p.copy()
    buf = np.empty(1, dtype=np.float64)
    alpha, _ = _kernels.integrate_span(
        x, p, complex(state.alpha),
        1, params.dt, params.dt, state.t, state.t + params.dt,
        params.eta, params.u0, params.kappa, params.delta_c,
        complex(eta_p), noise, use_noise,
        cfg.freeze_atoms, cfg.freeze_field, cfg.scheme_id,
        2, 0,  # stride 2 with offset 0: step 1 never records
        buf, buf, buf, buf, buf,
    )
    return TrajectoryState(x=x, p=p, alpha=alpha, t=state.t + params.dt)


def run_trajectory(
    params: SimParams,
    schedule: PumpSchedule,
    cfg: IntegratorConfig,
    rng: RngStream | np.random.Generator | None = None,
    initial: TrajectoryState | None = None,
    snapshot_times: Sequence[float] = (),
) -> TrajectoryRun:
    """Integrate one trajectory from its initial time to cfg.t_end.

    The drive is switched at schedule boundaries; a step never straddles
    a boundary (the step landing on one is shortened to end exactly
    there). Observables are recorded at the initial instant, after every
    record_stride-th step and at the final instant. Returns the series,
    the final state (for protocol chaining) and any requested
    phase-space snapshots, whose times must lie on span boundaries or at
    the run's endpoints.
    """
    _check_scheme_step(params, cfg)

    noise_gen: np.random.Generator | None
    if initial is None:
        if not isinstance(rng, RngStream):
            raise ValueError("an RngStream is required to sample the initial state")
        initial = sample_initial(params, rng)
    initial.validate(params.n_atoms)
    if isinstance(rng, RngStream):
        noise_gen = rng.noise_rng()
    else:
        noise_gen = rng

    t0 = initial.t
    t_end = float(cfg.t_end)
    if not t_end > t0:
        raise ValueError(f"t_end = {t_end} must exceed the initial time {t0}")

    use_noise = params.noise_on and not cfg.freeze_field
    if use_noise and noise_gen is None:
        raise ValueError("noise is on but no random generator was given")

    # span boundaries: drive switches plus requested snapshot instants
    snapshot_times = [float(ts) for ts in snapshot_times]
    for ts in snapshot_times:
        if ts < t0 or ts > t_end:
            raise ValueError(f"snapshot time {ts} outside the run [{t0}, {t_end}]")
    cuts = sorted(set(schedule.switch_times_between(t0, t_end)) | {ts for ts in snapshot_times if ts > t0})
    edges = [t0] + [c for c in cuts if c < t_end] + [t_end]

    x = initial.x.copy()
    p = initial.p.copy()
    alpha = complex(initial.alpha)

    snapshots: dict[float, Snapshot] = {}
    for ts in snapshot_times:
        if ts == t0:
            snapshots[ts] = Snapshot(x.copy(), p.copy())

    chunks_t = [np.array([t0])]
    chunks_theta = [np.array([float(np.mean(np.sin(x)))])]
    chunks_bunch = [np.array([float(np.mean(np.sin(x) ** 2))])]
    chunks_re = [np.array([alpha.real])]
    chunks_im = [np.array([alpha.imag])]

    step_offset = 0
    for a, b in zip(edges, edges[1:]):
        eta_p = schedule.value_at(a)
        n_steps, dt_last = _span_steps(b - a, params.dt)
        if use_noise:
            noise = noise_gen.standard_normal((n_steps, 2))
        else:
            noise = np.empty((0, 2), dtype=np.float64)
        cap = n_steps // cfg.record_stride + 1
        out = [np.empty(cap, dtype=np.float64) for _ in range(5)]
        alpha, n_rec = _kernels.integrate_span(
            x, p, alpha,
            n_steps, params.dt, dt_last, a, b,
            params.eta, params.u0, params.kappa, params.delta_c,
            complex(eta_p), noise, use_noise,
            cfg.freeze_atoms, cfg.freeze_field, cfg.scheme_id,
            cfg.record_stride, step_offset,
            out[0], out[1], out[2], out[3], out[4],
        )
        step_offset += n_steps
        if n_rec:
            chunks_t.append(out[0][:n_rec])
            chunks_theta.append(out[1][:n_rec])
            chunks_bunch.append(out[2][:n_rec])
            chunks_re.append(out[3][:n_rec])
            chunks_im.append(out[4][:n_rec])
        for ts in snapshot_times:
            if ts == b:
                snapshots[ts] = Snapshot(x.copy(), p.copy())

    final = TrajectoryState(x=x, p=p, alpha=alpha, t=t_end)

    if step_offset % cfg.record_stride != 0:  # final instant not on the stride
        s = np.sin(x)
        chunks_t.append(np.array([t_end]))
        chunks_theta.append(np.array([float(np.mean(s))]))
        chunks_bunch.append(np.array([float(np.mean(s * s))]))
        chunks_re.append(np.array([alpha.real]))
        chunks_im.append(np.array([alpha.imag]))

    series = ObservableSeries(
        t=np.concatenate(chunks_t),
        theta=np.concatenate(chunks_theta),
        bunching=np.concatenate(chunks_bunch),
        re_alpha=np.concatenate(chunks_re),
        im_alpha=np.concatenate(chunks_im),
    )
    return TrajectoryRun(series=series, final_state=final, snapshots=snapshots)
