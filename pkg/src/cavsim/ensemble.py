"""Parallel trajectory ensembles and their reductions.

An ensemble is the Cartesian product of n_init initial conditions and
n_noise noise realizations. Trajectory (i, j) draws from the
counter-based streams of RngStream(master_seed, i, j), so results are
bit-identical for any worker count and trajectories sharing i start
from the same sampled state. Reductions run over arrays assembled in
fixed (i, j) order, which pins the floating-point summation order
regardless of completion order.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import IntegratorConfig, RngStream, run_trajectory
from .model import TWO_PI, PumpSchedule, SimParams


class TrajectoryFailure(RuntimeError):
    """A trajectory aborted; carries its (init_index, noise_index)."""

    def __init__(self, init_index: int, noise_index: int, cause: str):
        super().__init__(
            f"trajectory (init={init_index}, noise={noise_index}) failed: {cause}"
        )
        self.init_index = init_index
        self.noise_index = noise_index
        self._args = (init_index, noise_index, cause)

    def __reduce__(self):  # keep picklable across pool workers
        return (TrajectoryFailure, self._args)


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble layout and seeding."""

    n_init: int
    n_noise: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.n_init < 1 or self.n_noise < 1:
            raise ValueError(
                f"ensemble needs n_init >= 1 and n_noise >= 1, got "
                f"{self.n_init} x {self.n_noise}"
            )

    @property
    def n_trajectories(self) -> int:
        return self.n_init * self.n_noise

    def stream(self, init_index: int, noise_index: int) -> RngStream:
        return RngStream(self.master_seed, init_index, noise_index)

    def grid(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n_init) for j in range(self.n_noise)]


@dataclass
class EnsembleResult:
    """Per-trajectory observable series plus fixed reductions.

    Row m of every (M, T) array belongs to traj_index[m]; rows are in
    lexicographic (init, noise) order.
    """

    spec: EnsembleSpec
    traj_index: tuple[tuple[int, int], ...]
    times: np.ndarray        # (T,)
    theta: np.ndarray        # (M, T)
    bunching: np.ndarray     # (M, T)
    re_alpha: np.ndarray     # (M, T)
    im_alpha: np.ndarray     # (M, T)
    snapshot_x: dict[float, np.ndarray] = field(default_factory=dict)  # t -> (M, N)
    snapshot_p: dict[float, np.ndarray] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)  # scenario-specific per-trajectory data

    @property
    def n_trajectories(self) -> int:
        return self.theta.shape[0]

    @property
    def photon_number(self) -> np.ndarray:
        return self.re_alpha**2 + self.im_alpha**2

    @property
    def final_theta(self) -> np.ndarray:
        return self.theta[:, -1]

    @property
    def final_bunching(self) -> np.ndarray:
        return self.bunching[:, -1]

    def record_index(self, at_time: float, tol: float = 1e-9) -> int:
        idx = int(np.argmin(np.abs(self.times - at_time)))
        if abs(float(self.times[idx]) - at_time) > tol * max(1.0, abs(at_time)):
            raise ValueError(f"time {at_time} was not recorded")
        return idx

    def theta_mean(self) -> np.ndarray:
        return self.theta.mean(axis=0)

    def theta_std(self) -> np.ndarray:
        return self.theta.std(axis=0)

    def theta_abs_mean(self) -> np.ndarray:
        return np.abs(self.theta).mean(axis=0)

    def bunching_mean(self) -> np.ndarray:
        return self.bunching.mean(axis=0)

    def bunching_std(self) -> np.ndarray:
        return self.bunching.std(axis=0)

    def photon_mean(self) -> np.ndarray:
        return self.photon_number.mean(axis=0)

    def sign_fractions(self, at_time: float) -> dict[str, float]:
        """Fractions of trajectories with negative, zero and positive
        order parameter at a recorded instant; they sum to one."""
        th = self.theta[:, self.record_index(at_time)]
        m = th.shape[0]
        neg = int(np.sum(th < 0.0))
        pos = int(np.sum(th > 0.0))
        return {
            "negative": neg / m,
            "zero": (m - neg - pos) / m,
            "positive": pos / m,
        }


def odd_fraction(result: EnsembleResult, at_time: float) -> float:
    """Fraction of trajectories with strictly negative order parameter
    at a recorded instant. Theta == 0 counts as not-odd (the event has
    probability zero for continuous dynamics)."""
    th = result.theta[:, result.record_index(at_time)]
    return float(np.sum(th < 0.0)) / th.shape[0]


def position_histogram(
    result: EnsembleResult, at_time: float, n_bins: int
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized density of wrapped positions pooled over the ensemble
    at a snapshot instant; returns (bin_centers, density)."""
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    snap = result.snapshot_x.get(at_time)
    if snap is None:
        raise ValueError(f"no position snapshot stored at t = {at_time}")
    edges = np.linspace(0.0, TWO_PI, n_bins + 1)
    density, _ = np.histogram(snap.ravel(), bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, density


def _run_one(task) -> tuple:
    (i, j, params, schedule, cfg, master_seed, snapshot_times) = task
    try:
        stream = RngStream(master_seed, i, j)
        run = run_trajectory(
            params, schedule, cfg, stream, snapshot_times=snapshot_times
        )
    except Exception as exc:  # fail fast with the grid position attached
        raise TrajectoryFailure(i, j, repr(exc)) from exc
    s = run.series
    snaps_x = {t: snap.x for t, snap in run.snapshots.items()}
    snaps_p = {t: snap.p for t, snap in run.snapshots.items()}
    return (i, j, s.t, s.theta, s.bunching, s.re_alpha, s.im_alpha, snaps_x, snaps_p)


def run_ensemble(
    params: SimParams,
    schedule: PumpSchedule,
    cfg: IntegratorConfig,
    spec: EnsembleSpec,
    snapshot_times: Sequence[float] = (),
    workers: int = 1,
) -> EnsembleResult:
    """Run the full (n_init x n_noise) grid and assemble reductions.

    The outcome is independent of the worker count; any trajectory
    failure aborts the whole ensemble (partial ensembles would bias the
    sign statistics).
    """
    snapshot_times = tuple(float(t) for t in snapshot_times)
    grid = spec.grid()
    tasks = [
        (i, j, params, schedule, cfg, spec.master_seed, snapshot_times)
        for (i, j) in grid
    ]
    if workers <= 1 or len(tasks) == 1:
        outputs = [_run_one(t) for t in tasks]
    else:
        with multiprocessing.Pool(processes=workers) as pool:
            outputs = pool.map(_run_one, tasks, chunksize=1)

    by_key = {(o[0], o[1]): o for o in outputs}
    ordered = [by_key[key] for key in grid]

    times = ordered[0][2]
    m = len(ordered)
    shape = (m, times.shape[0])
    theta = np.empty(shape)
    bunch = np.empty(shape)
    re_a = np.empty(shape)
    im_a = np.empty(shape)
    for row, o in enumerate(ordered):
        theta[row] = o[3]
        bunch[row] = o[4]
        re_a[row] = o[5]
        im_a[row] = o[6]

    snapshot_x: dict[float, np.ndarray] = {}
    snapshot_p: dict[float, np.ndarray] = {}
    for ts in snapshot_times:
        snapshot_x[ts] = np.stack([o[7][ts] for o in ordered])
        snapshot_p[ts] = np.stack([o[8][ts] for o in ordered])

    return EnsembleResult(
        spec=spec,
        traj_index=tuple(grid),
        times=times,
        theta=theta,
        bunching=bunch,
        re_alpha=re_a,
        im_alpha=im_a,
        snapshot_x=snapshot_x,
        snapshot_p=snapshot_p,
    )
