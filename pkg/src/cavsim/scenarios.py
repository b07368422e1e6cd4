"""Catalog of ready-to-run experiments.

Each builder returns fully parameterized scenarios for one experiment
family: spontaneous self-organization, seeded organization, the
odd-pattern probability sweep, the steady-state phase diagram, the
dynamical build-up grid and the pattern-flip protocol. Builders encode
the reference parameter set (N = 1000, sqrt(N) eta = 500, N u0 = -100,
kappa = 100, delta_c = N u0 / 2 - kappa, k_B T = 2 kappa, all in recoil
units); `rescale` shrinks ensembles, durations and atom numbers for
desk-scale runs while holding the collective couplings sqrt(N) eta and
N u0 fixed, which preserves the organization physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .engine import (
    IntegratorConfig,
    RngStream,
    run_trajectory,
    sample_initial,
)
from .ensemble import EnsembleResult, EnsembleSpec, TrajectoryFailure, run_ensemble
from .model import PumpSchedule, SimParams, order_parameter, steady_state_field

DEFAULT_SEED = 12345

#: Collective transverse pump strength sqrt(N)*eta at which a thermal gas
#: at the reference initial temperature becomes unstable; attached to the
#: self-organization scenario as a reference constant.
REFERENCE_COLLECTIVE_THRESHOLD = 200.0


@dataclass(frozen=True)
class OutputRequest:
    """Reductions a scenario asks for beyond the standard aggregates."""

    per_trajectory_series: bool = False
    snapshot_times: tuple[float, ...] = ()
    odd_fraction_times: tuple[float, ...] = ()
    histogram_bins: int = 64


@dataclass(frozen=True)
class FlipProtocol:
    """Three-stage drive protocol that flips an organized pattern.

    A strong pulse with a pi/2 phase offset to the transverse laser
    destructively interferes with the field scattered by the realized
    pattern; in 'match-pattern' mode the pulse (and the weaker hold
    drive after it) are mirrored in phase when the realized pattern is
    odd, so that the interference is destructive for either sign. In
    'fixed' mode the literal (+i pulse, +real hold) drive is applied
    regardless of the realized pattern, which only flips even patterns.
    """

    pulse_on: float = 2000.0
    pulse_off: float = 2100.0
    pulse_magnitude: float = 2.0e4
    hold_drive: float = 500.0
    pulse_mode: str = "match-pattern"

    def __post_init__(self) -> None:
        if self.pulse_mode not in ("match-pattern", "fixed"):
            raise ValueError(f"unknown pulse_mode {self.pulse_mode!r}")
        if not 0.0 < self.pulse_on < self.pulse_off:
            raise ValueError("need 0 < pulse_on < pulse_off")

    def schedule(self, sign: float = 1.0) -> PumpSchedule:
        return PumpSchedule(
            (
                (0.0, 0.0),
                (self.pulse_on, sign * self.pulse_magnitude * 1j),
                (self.pulse_off, sign * self.hold_drive),
            )
        )


@dataclass(frozen=True)
class Scenario:
    """A self-describing, reproducible simulation run."""

    name: str
    kind: str
    params: SimParams
    schedule: PumpSchedule
    cfg: IntegratorConfig
    spec: EnsembleSpec
    outputs: OutputRequest = OutputRequest()
    tags: tuple[tuple[str, float], ...] = ()
    flip: FlipProtocol | None = None

    def tag(self, key: str) -> float:
        for k, v in self.tags:
            if k == key:
                return v
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "params": {
                "n_atoms": self.params.n_atoms,
                "eta": self.params.eta,
                "u0": self.params.u0,
                "kappa": self.params.kappa,
                "delta_c": self.params.delta_c,
                "temp_init": self.params.temp_init,
                "dt": self.params.dt,
                "noise_on": self.params.noise_on,
            },
            "schedule": [[t, v.real, v.imag] for t, v in self.schedule.segments],
            "cfg": {
                "scheme": self.cfg.scheme,
                "record_stride": self.cfg.record_stride,
                "t_end": self.cfg.t_end,
                "freeze_atoms": self.cfg.freeze_atoms,
                "freeze_field": self.cfg.freeze_field,
            },
            "ensemble": {
                "n_init": self.spec.n_init,
                "n_noise": self.spec.n_noise,
                "master_seed": self.spec.master_seed,
            },
            "outputs": {
                "per_trajectory_series": self.outputs.per_trajectory_series,
                "snapshot_times": list(self.outputs.snapshot_times),
                "odd_fraction_times": list(self.outputs.odd_fraction_times),
                "histogram_bins": self.outputs.histogram_bins,
            },
            "tags": [[k, v] for k, v in self.tags],
            "flip": None
            if self.flip is None
            else {
                "pulse_on": self.flip.pulse_on,
                "pulse_off": self.flip.pulse_off,
                "pulse_magnitude": self.flip.pulse_magnitude,
                "hold_drive": self.flip.hold_drive,
                "pulse_mode": self.flip.pulse_mode,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            name=d["name"],
            kind=d["kind"],
            params=SimParams(**d["params"]),
            schedule=PumpSchedule(
                tuple((row[0], complex(row[1], row[2])) for row in d["schedule"])
            ),
            cfg=IntegratorConfig(**d["cfg"]),
            spec=EnsembleSpec(**d["ensemble"]),
            outputs=OutputRequest(
                per_trajectory_series=d["outputs"]["per_trajectory_series"],
                snapshot_times=tuple(d["outputs"]["snapshot_times"]),
                odd_fraction_times=tuple(d["outputs"]["odd_fraction_times"]),
                histogram_bins=d["outputs"]["histogram_bins"],
            ),
            tags=tuple((k, v) for k, v in d.get("tags", [])),
            flip=None if d.get("flip") is None else FlipProtocol(**d["flip"]),
        )


def reference_params(
    n_atoms: int = 1000,
    sqrt_n_eta: float = 500.0,
    collective_u0: float = -100.0,
    kappa: float = 100.0,
    dt: float = 1e-2,
    noise_on: bool = True,
) -> SimParams:
    """Reference parameter set; eta and u0 are stored per atom, the
    detuning is collective_u0/2 - kappa and the initial thermal energy
    is twice the cavity linewidth."""
    return SimParams(
        n_atoms=n_atoms,
        eta=sqrt_n_eta / math.sqrt(n_atoms),
        u0=collective_u0 / n_atoms,
        kappa=kappa,
        delta_c=collective_u0 / 2.0 - kappa,
        temp_init=2.0 * kappa,
        dt=dt,
        noise_on=noise_on,
    )


def scenario_selforg(master_seed: int = DEFAULT_SEED) -> list[Scenario]:
    """Spontaneous self-organization without a cavity drive: 50 x 10
    trajectories to t = 1e4, spatial snapshots at start and end."""
    params = reference_params()
    t_end = 1.0e4
    return [
        Scenario(
            name="selforg",
            kind="selforg",
            params=params,
            schedule=PumpSchedule.constant(0.0),
            cfg=IntegratorConfig(record_stride=100, t_end=t_end),
            spec=EnsembleSpec(n_init=50, n_noise=10, master_seed=master_seed),
            outputs=OutputRequest(snapshot_times=(0.0, t_end)),
            tags=(
                ("eta_p", 0.0),
                ("sqrt_n_eta", params.collective_eta),
                ("reference_collective_threshold", REFERENCE_COLLECTIVE_THRESHOLD),
            ),
        )
    ]


def scenario_seeded(
    eta_p: complex = 500.0, master_seed: int = DEFAULT_SEED
) -> list[Scenario]:
    """Organization under a longitudinal seed: the injected lattice
    alone (transverse laser off), and the two seeded signs -eta_p and
    +eta_p on top of the reference transverse pump. 20 x 10
    trajectories, full per-trajectory order-parameter series."""
    eta_p = complex(eta_p)
    t_end = 1.0e4
    base = reference_params()
    no_transverse = replace(base, eta=0.0)
    depth = abs(no_transverse.u0) * abs(
        steady_state_field(0.0, 0.5, eta_p, no_transverse)
    ) ** 2
    out = OutputRequest(per_trajectory_series=True, snapshot_times=(0.0, t_end))
    cfg = IntegratorConfig(record_stride=100, t_end=t_end)

    def spec() -> EnsembleSpec:
        return EnsembleSpec(n_init=20, n_noise=10, master_seed=master_seed)

    return [
        Scenario(
            name="pump_only",
            kind="seeded",
            params=no_transverse,
            schedule=PumpSchedule.constant(eta_p),
            cfg=cfg,
            spec=spec(),
            outputs=out,
            tags=(
                ("eta_p", eta_p.real),
                ("sqrt_n_eta", 0.0),
                ("uniform_gas_lattice_depth", depth),
            ),
        ),
        Scenario(
            name="seed_even",
            kind="seeded",
            params=base,
            schedule=PumpSchedule.constant(-eta_p),
            cfg=cfg,
            spec=spec(),
            outputs=out,
            tags=(("eta_p", -eta_p.real), ("sqrt_n_eta", base.collective_eta)),
        ),
        Scenario(
            name="seed_odd",
            kind="seeded",
            params=base,
            schedule=PumpSchedule.constant(eta_p),
            cfg=cfg,
            spec=spec(),
            outputs=out,
            tags=(("eta_p", eta_p.real), ("sqrt_n_eta", base.collective_eta)),
        ),
    ]


def scenario_odd_probability(
    eta_p_values: Sequence[float] = (0.0, 125.0, 250.0, 500.0, 1000.0),
    master_seed: int = DEFAULT_SEED,
) -> list[Scenario]:
    """Probability of ending in the odd pattern after a short kick
    (t = 1) as a function of the longitudinal drive, 5000 x 5
    trajectories per point. Seeds are independent per point."""
    values = [float(v) for v in eta_p_values]
    if any(v < 0 for v in values):
        raise ValueError("eta_p values must be >= 0 for the odd-probability sweep")
    params = reference_params()
    t_end = 1.0
    out: list[Scenario] = []
    for k, v in enumerate(values):
        out.append(
            Scenario(
                name=f"etap_{v:g}",
                kind="odd-prob",
                params=params,
                schedule=PumpSchedule.constant(v),
                cfg=IntegratorConfig(record_stride=10, t_end=t_end),
                spec=EnsembleSpec(
                    n_init=5000, n_noise=5, master_seed=master_seed + k
                ),
                outputs=OutputRequest(odd_fraction_times=(t_end,)),
                tags=(("eta_p", v), ("sqrt_n_eta", params.collective_eta)),
            )
        )
    return out


def scenario_phase_diagram(
    eta_p: float = -500.0,
    sqrt_n_eta_values: Sequence[float] = (0.0, 90.0, 120.0, 180.0, 240.0, 300.0, 400.0, 500.0),
    master_seed: int = DEFAULT_SEED,
) -> list[Scenario]:
    """Steady-state order and bunching parameters versus the transverse
    pump strength for one longitudinal drive, evaluated at t = 20 N.
    The full final-theta list is emitted so any averaging convention
    can be applied downstream."""
    out: list[Scenario] = []
    for k, v in enumerate(float(w) for w in sqrt_n_eta_values):
        params = reference_params(sqrt_n_eta=v)
        t_end = 20.0 * params.n_atoms
        out.append(
            Scenario(
                name=f"sqrtneta_{v:g}",
                kind="phase-diagram",
                params=params,
                schedule=PumpSchedule.constant(eta_p),
                cfg=IntegratorConfig(record_stride=200, t_end=t_end),
                spec=EnsembleSpec(n_init=5, n_noise=5, master_seed=master_seed + k),
                outputs=OutputRequest(),
                tags=(("eta_p", float(eta_p)), ("sqrt_n_eta", v)),
            )
        )
    return out


def scenario_buildup(
    sqrt_n_eta_values: Sequence[float] = (0.0, 90.0, 120.0, 180.0),
    eta_p_values: Sequence[float] = (0.0, -500.0, -5000.0),
    master_seed: int = DEFAULT_SEED,
) -> list[Scenario]:
    """Dynamical onset of the seeded pattern from a uniform gas for a
    grid of transverse pump strengths and longitudinal drives; keeps
    the full order-parameter series of every trajectory."""
    out: list[Scenario] = []
    t_end = 2000.0
    k = 0
    for v in (float(w) for w in sqrt_n_eta_values):
        for ep in (float(w) for w in eta_p_values):
            params = reference_params(sqrt_n_eta=v)
            out.append(
                Scenario(
                    name=f"sqrtneta_{v:g}_etap_{ep:g}",
                    kind="buildup",
                    params=params,
                    schedule=PumpSchedule.constant(ep),
                    cfg=IntegratorConfig(record_stride=100, t_end=t_end),
                    spec=EnsembleSpec(n_init=5, n_noise=5, master_seed=master_seed + k),
                    outputs=OutputRequest(per_trajectory_series=True),
                    tags=(("eta_p", ep), ("sqrt_n_eta", v)),
                )
            )
            k += 1
    return out


def scenario_flip(
    pulse_mode: str = "match-pattern", master_seed: int = DEFAULT_SEED
) -> list[Scenario]:
    """Pattern-flip protocol: organize freely to t = 2000, hit the
    cavity with a strong pi/2-offset pulse for 100 time units, then
    hold a weak drive and watch the opposite pattern re-form."""
    params = reference_params()
    flip = FlipProtocol(pulse_mode=pulse_mode)
    return [
        Scenario(
            name="flip",
            kind="flip",
            params=params,
            schedule=flip.schedule(1.0),
            cfg=IntegratorConfig(record_stride=100, t_end=4000.0),
            spec=EnsembleSpec(n_init=1, n_noise=1, master_seed=master_seed),
            outputs=OutputRequest(per_trajectory_series=True),
            tags=(
                ("eta_p_pulse_magnitude", flip.pulse_magnitude),
                ("sqrt_n_eta", params.collective_eta),
                ("pulse_to_scattering_ratio", flip.pulse_magnitude / params.collective_eta),
            ),
            flip=flip,
        )
    ]


#: Stable CLI identifiers -> (builder, allowed keyword arguments).
CATALOG: dict[str, tuple[Callable[..., list[Scenario]], tuple[str, ...], str]] = {
    "selforg": (scenario_selforg, (), "spontaneous self-organization, no cavity drive"),
    "seeded": (scenario_seeded, ("eta_p",), "organization with a longitudinal seed"),
    "odd-prob": (
        scenario_odd_probability,
        ("eta_p_values",),
        "odd-pattern probability vs drive strength after a short kick",
    ),
    "phase-diagram": (
        scenario_phase_diagram,
        ("eta_p", "sqrt_n_eta_values"),
        "steady-state order parameter vs transverse pump strength",
    ),
    "buildup": (
        scenario_buildup,
        ("sqrt_n_eta_values", "eta_p_values"),
        "onset speed of the seeded pattern across a drive grid",
    ),
    "flip": (scenario_flip, ("pulse_mode",), "dynamically flip an organized pattern"),
}


def build_scenarios(kind: str, master_seed: int = DEFAULT_SEED, **args) -> list[Scenario]:
    if kind not in CATALOG:
        raise ValueError(
            f"unknown scenario {kind!r}; available: {', '.join(sorted(CATALOG))}"
        )
    builder, allowed, _ = CATALOG[kind]
    for key in args:
        if key not in allowed:
            raise ValueError(
                f"scenario {kind!r} does not accept argument {key!r}"
                + (f"; allowed: {', '.join(allowed)}" if allowed else "")
            )
    return builder(master_seed=master_seed, **args)


def rescale(
    scenario: Scenario,
    ensemble: float = 1.0,
    time: float = 1.0,
    atoms: float = 1.0,
) -> Scenario:
    """Desk-scale override: shrink or grow the ensemble (initial-
    condition axis), the integration time and the atom number. Atom
    rescaling holds sqrt(N) eta and N u0 fixed so the collective
    coupling, and with it the organization regime, is preserved."""
    if min(ensemble, time, atoms) <= 0:
        raise ValueError("scale factors must be positive")
    params = scenario.params
    if atoms != 1.0:
        n_new = max(1, round(params.n_atoms * atoms))
        params = replace(
            params,
            n_atoms=n_new,
            eta=params.collective_eta / math.sqrt(n_new),
            u0=params.collective_u0 / n_new,
        )
    cfg = scenario.cfg
    outputs = scenario.outputs
    if time != 1.0:
        t_end = cfg.t_end * time
        if scenario.flip is not None and t_end <= scenario.flip.pulse_off:
            raise ValueError(
                f"scaled t_end = {t_end:g} would end before the flip pulse is over"
            )
        cfg = replace(cfg, t_end=t_end)
        outputs = replace(
            outputs,
            snapshot_times=tuple(ts * time for ts in outputs.snapshot_times),
            odd_fraction_times=tuple(ts * time for ts in outputs.odd_fraction_times),
        )
    spec = scenario.spec
    if ensemble != 1.0:
        spec = replace(spec, n_init=max(1, round(spec.n_init * ensemble)))
    return replace(scenario, params=params, cfg=cfg, spec=spec, outputs=outputs)


# --- execution ------------------------------------------------------------

def _run_flip_trajectory(task) -> tuple:
    (i, j, params, cfg, flip, master_seed) = task
    try:
        stream = RngStream(master_seed, i, j)
        state = sample_initial(params, stream)
        gen = stream.noise_rng()

        free = PumpSchedule.constant(0.0)
        cfg1 = replace(cfg, t_end=flip.pulse_on)
        r1 = run_trajectory(params, free, cfg1, rng=gen, initial=state)

        sign = 1.0
        if flip.pulse_mode == "match-pattern" and order_parameter(r1.final_state.x) < 0:
            sign = -1.0
        sched = flip.schedule(sign)

        cfg2 = replace(cfg, t_end=flip.pulse_off)
        r2 = run_trajectory(params, sched, cfg2, rng=gen, initial=r1.final_state)
        r3 = run_trajectory(params, sched, cfg, rng=gen, initial=r2.final_state)

        # segment-initial records duplicate the previous segment's final one
        t = np.concatenate([r1.series.t, r2.series.t[1:], r3.series.t[1:]])
        theta = np.concatenate([r1.series.theta, r2.series.theta[1:], r3.series.theta[1:]])
        bunch = np.concatenate(
            [r1.series.bunching, r2.series.bunching[1:], r3.series.bunching[1:]]
        )
        re_a = np.concatenate(
            [r1.series.re_alpha, r2.series.re_alpha[1:], r3.series.re_alpha[1:]]
        )
        im_a = np.concatenate(
            [r1.series.im_alpha, r2.series.im_alpha[1:], r3.series.im_alpha[1:]]
        )
        return (i, j, t, theta, bunch, re_a, im_a, sign)
    except Exception as exc:
        raise TrajectoryFailure(i, j, repr(exc)) from exc


def _run_flip_ensemble(scenario: Scenario, workers: int) -> EnsembleResult:
    import multiprocessing

    spec = scenario.spec
    flip = scenario.flip
    assert flip is not None
    if not scenario.cfg.t_end > flip.pulse_off:
        raise ValueError("flip scenario must integrate past the pulse")
    grid = spec.grid()
    tasks = [
        (i, j, scenario.params, scenario.cfg, flip, spec.master_seed)
        for (i, j) in grid
    ]
    if workers <= 1 or len(tasks) == 1:
        outputs = [_run_flip_trajectory(t) for t in tasks]
    else:
        with multiprocessing.Pool(processes=workers) as pool:
            outputs = pool.map(_run_flip_trajectory, tasks, chunksize=1)
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
    return EnsembleResult(
        spec=spec,
        traj_index=tuple(grid),
        times=times,
        theta=theta,
        bunching=bunch,
        re_alpha=re_a,
        im_alpha=im_a,
        extras={"pulse_sign": np.array([o[7] for o in ordered])},
    )


def run_scenario(scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """Execute one scenario; flip scenarios run their chained protocol,
    everything else is a plain ensemble under a static schedule."""
    if scenario.flip is not None:
        return _run_flip_ensemble(scenario, workers)
    return run_ensemble(
        scenario.params,
        scenario.schedule,
        scenario.cfg,
        scenario.spec,
        snapshot_times=scenario.outputs.snapshot_times,
        workers=workers,
    )
