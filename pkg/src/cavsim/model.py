"""Core model: parameters, state containers and closed-form physics.

A cloud of N atoms moves along the axis of a lossy standing-wave cavity.
A transverse laser (strength ``eta`` per atom) scatters light into the
mode, a longitudinal laser (complex ``eta_p``) drives the mode through a
mirror, and the intracavity amplitude ``alpha`` reacts back on the atoms
through the optical potential

    U(x, alpha) = u0 |alpha|^2 sin^2(x) + 2 eta Re(alpha) sin(x).

Everything is expressed in recoil units: hbar = 1, wave number k = 1 and
recoil frequency omega_R = 1, which fixes the atomic mass to m = 1/2.
Positions are then measured in 1/k, momenta in photon recoils, energies
in recoil energies and times in inverse recoil frequencies.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: Atomic mass in recoil units (fixed by hbar = k = omega_R = 1).
MASS = 0.5

#: Below this initial thermal energy (in recoil units) the semiclassical
#: description of the atomic motion becomes questionable.
SEMICLASSICAL_TEMP = 10.0


class SemiclassicalValidityWarning(UserWarning):
    """Initial temperature too low for the semiclassical description."""


@dataclass(frozen=True)
class SimParams:
    """Physical constants of one simulation, all in recoil units.

    ``eta`` is the per-atom transverse pump strength; the collective
    quantities sqrt(N)*eta and N*u0 are what the physics actually depends
    on and are exposed as properties.
    """

    n_atoms: int
    eta: float
    u0: float
    kappa: float
    delta_c: float
    temp_init: float
    dt: float = 1e-2
    noise_on: bool = True

    def __post_init__(self) -> None:
        if self.n_atoms < 1:
            raise ValueError(f"n_atoms must be >= 1, got {self.n_atoms}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.temp_init > 0:
            raise ValueError(f"temp_init must be > 0, got {self.temp_init}")
        if self.u0 > 0:
            raise ValueError(f"u0 must be <= 0 (high-field-seeker regime), got {self.u0}")
        for name in ("eta", "u0", "kappa", "delta_c", "temp_init", "dt"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.temp_init <= SEMICLASSICAL_TEMP:
            warnings.warn(
                f"temp_init = {self.temp_init} recoil energies is low; the "
                "semiclassical treatment assumes a thermal energy well above "
                "the recoil energy",
                SemiclassicalValidityWarning,
                stacklevel=2,
            )

    @property
    def collective_eta(self) -> float:
        """sqrt(N) * eta, the collective scattering strength."""
        return math.sqrt(self.n_atoms) * self.eta

    @property
    def collective_u0(self) -> float:
        """N * u0, the collective dispersive shift."""
        return self.n_atoms * self.u0


@dataclass(frozen=True)
class PumpSchedule:
    """Piecewise-constant complex longitudinal drive eta_p(t).

    Evaluation is right-continuous: eta_p(t) is the value of the last
    segment whose start time is <= t.
    """

    segments: tuple[tuple[float, complex], ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        object.__setattr__(
            self,
            "segments",
            tuple((float(t), complex(v)) for t, v in self.segments),
        )
        times = [t for t, _ in self.segments]
        if times[0] != 0.0:
            raise ValueError(f"first segment must start at t = 0, got {times[0]}")
        for a, b in zip(times, times[1:]):
            if not b > a:
                raise ValueError(f"segment starts must increase strictly ({a} -> {b})")
        for t, v in self.segments:
            if not (math.isfinite(t) and math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("schedule entries must be finite")

    @classmethod
    def constant(cls, eta_p: complex = 0.0) -> "PumpSchedule":
        return cls(((0.0, complex(eta_p)),))

    def value_at(self, t: float) -> complex:
        """Drive amplitude at time t (right-continuous lookup)."""
        times = [s for s, _ in self.segments]
        idx = bisect_right(times, t) - 1
        if idx < 0:
            idx = 0
        return self.segments[idx][1]

    def switch_times_between(self, t0: float, t1: float) -> list[float]:
        """Segment starts strictly inside (t0, t1)."""
        return [t for t, _ in self.segments if t0 < t < t1]


@dataclass
class TrajectoryState:
    """Positions, momenta, cavity amplitude and time of one trajectory."""

    x: np.ndarray
    p: np.ndarray
    alpha: complex
    t: float = 0.0

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=np.float64)
        self.p = np.asarray(self.p, dtype=np.float64)
        self.alpha = complex(self.alpha)
        self.t = float(self.t)

    def validate(self, n_atoms: int | None = None) -> None:
        if self.x.shape != self.p.shape or self.x.ndim != 1:
            raise ValueError("x and p must be 1-d arrays of equal length")
        if n_atoms is not None and self.x.shape[0] != n_atoms:
            raise ValueError(f"state holds {self.x.shape[0]} atoms, params expect {n_atoms}")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.p))):
            raise ValueError("non-finite atomic coordinates")
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise ValueError("non-finite field amplitude")
        if np.any(self.x < 0.0) or np.any(self.x >= TWO_PI):
            raise ValueError("positions must be wrapped into [0, 2*pi)")

    def copy(self) -> "TrajectoryState":
        return TrajectoryState(self.x.copy(), self.p.copy(), self.alpha, self.t)


def wrap_positions(x: np.ndarray) -> np.ndarray:
    """Wrap coordinates into [0, 2*pi); the dynamics are 2*pi-periodic."""
    wrapped = np.mod(x, TWO_PI)
    # x % 2*pi can round up to exactly 2*pi for tiny negative x
    wrapped[wrapped >= TWO_PI] -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class ObservableRecord:
    """One time-stamped sample of the standard observables."""

    t: float
    theta: float
    bunching: float
    photon_number: float
    re_alpha: float
    im_alpha: float


# --- closed-form physics -------------------------------------------------

def potential(x, alpha: complex, params: SimParams):
    """Single-particle optical potential in recoil energies.

    u0 |alpha|^2 sin^2(x) + 2 eta Re(alpha) sin(x); accepts scalar or
    array positions.
    """
    s = np.sin(x)
    aa = (alpha.real * alpha.real + alpha.imag * alpha.imag)
    return params.u0 * aa * s * s + 2.0 * params.eta * alpha.real * s


def force(x, alpha: complex, params: SimParams):
    """Dipole force -dU/dx, in units of hbar*k*omega_R."""
    aa = (alpha.real * alpha.real + alpha.imag * alpha.imag)
    return -params.u0 * aa * np.sin(2.0 * x) - 2.0 * params.eta * alpha.real * np.cos(x)


def order_parameter(x: Sequence[float] | np.ndarray) -> float:
    """Mean of sin(x_j): 0 for a homogeneous gas, +1/-1 for the two
    perfectly ordered patterns."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("order_parameter of an empty configuration")
    return float(np.mean(np.sin(x)))


def bunching(x: Sequence[float] | np.ndarray) -> float:
    """Mean of sin^2(x_j): localization at the lattice antinodes,
    independent of which pattern is occupied."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("bunching of an empty configuration")
    s = np.sin(x)
    return float(np.mean(s * s))


def effective_detuning(bunching_value: float, params: SimParams) -> float:
    """Cavity detuning dressed by the atom-induced dispersive shift:
    delta_c - N u0 B."""
    return params.delta_c - params.n_atoms * params.u0 * bunching_value


def steady_state_field(
    theta: float,
    bunching_value: float,
    eta_p: complex,
    params: SimParams,
) -> complex:
    """Noise-free stationary cavity amplitude for a frozen atomic
    configuration: (-i eta N Theta + eta_p) / (kappa - i Delta)."""
    delta = effective_detuning(bunching_value, params)
    num = complex(0.0, -params.eta * params.n_atoms * theta) + complex(eta_p)
    return num / complex(params.kappa, -delta)


class FieldDrift(NamedTuple):
    """Deterministic part of the field equation, d(alpha)/dt = rate,
    split into the linear coefficient and the drive."""

    rate: complex
    linear: complex   # multiplies alpha: i(delta_c - u0 sum sin^2) - kappa
    drive: complex    # eta_p - i eta sum sin


def field_drift(state: TrajectoryState, eta_p: complex, params: SimParams) -> FieldDrift:
    """Drift of the cavity amplitude for the instantaneous atom
    configuration, exposing (linear, drive) for exponential stepping."""
    s = np.sin(state.x)
    sum_sin = float(np.sum(s))
    sum_sin2 = float(np.sum(s * s))
    linear = complex(-params.kappa, params.delta_c - params.u0 * sum_sin2)
    drive = complex(eta_p) - 1j * (params.eta * sum_sin)
    return FieldDrift(linear * state.alpha + drive, linear, drive)


def observe(state: TrajectoryState) -> ObservableRecord:
    """Standard observables of a state."""
    th = order_parameter(state.x)
    b = bunching(state.x)
    re, im = state.alpha.real, state.alpha.imag
    return ObservableRecord(
        t=state.t,
        theta=th,
        bunching=b,
        photon_number=re * re + im * im,
        re_alpha=re,
        im_alpha=im,
    )
