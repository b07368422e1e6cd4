import math

import numpy as np
import pytest

from cavsim import (
    TWO_PI,
    EnsembleResult,
    EnsembleSpec,
    IntegratorConfig,
    PumpSchedule,
    RngStream,
    TrajectoryFailure,
    TrajectoryState,
    odd_fraction,
    position_histogram,
    run_ensemble,
    run_trajectory,
)
from cavsim.model import wrap_positions

from conftest import desk_params


def small_run(noise_on=True, workers=1, n_init=2, n_noise=2, seed=99, t_end=0.5,
              snapshot_times=()):
    params = desk_params(n_atoms=16, noise_on=noise_on)
    cfg = IntegratorConfig(record_stride=10, t_end=t_end)
    spec = EnsembleSpec(n_init=n_init, n_noise=n_noise, master_seed=seed)
    return run_ensemble(params, PumpSchedule.constant(100.0), cfg, spec,
                        snapshot_times=snapshot_times, workers=workers)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(n_init=0, n_noise=3, master_seed=1)
    with pytest.raises(ValueError):
        EnsembleSpec(n_init=3, n_noise=0, master_seed=1)
    assert EnsembleSpec(n_init=3, n_noise=4, master_seed=1).n_trajectories == 12


def test_noise_free_realizations_are_identical():
    res = small_run(noise_on=False)
    # same initial condition, different noise index, no noise term
    assert np.array_equal(res.theta[0], res.theta[1])
    assert np.array_equal(res.theta[2], res.theta[3])
    assert not np.array_equal(res.theta[0], res.theta[2])
    assert res.traj_index == ((0, 0), (0, 1), (1, 0), (1, 1))


def test_worker_count_does_not_change_results():
    a = small_run(workers=1, snapshot_times=(0.0, 0.5))
    b = small_run(workers=2, snapshot_times=(0.0, 0.5))
    assert np.array_equal(a.theta, b.theta)
    assert np.array_equal(a.re_alpha, b.re_alpha)
    for t in (0.0, 0.5):
        assert np.array_equal(a.snapshot_x[t], b.snapshot_x[t])
        assert np.array_equal(a.snapshot_p[t], b.snapshot_p[t])


def test_shared_initial_conditions_across_noise_axis():
    res = small_run(snapshot_times=(0.0,))
    x0 = res.snapshot_x[0.0]
    assert np.array_equal(x0[0], x0[1])   # (0,0) and (0,1)
    assert np.array_equal(x0[2], x0[3])   # (1,0) and (1,1)
    assert not np.array_equal(x0[0], x0[2])


def test_trajectory_failure_is_identified():
    params = desk_params(n_atoms=4, dt=2e-3)  # kappa dt = 0.2: EM rejected
    cfg = IntegratorConfig(scheme="euler_maruyama", t_end=1.0)
    spec = EnsembleSpec(n_init=2, n_noise=1, master_seed=0)
    with pytest.raises(TrajectoryFailure) as err:
        run_ensemble(params, PumpSchedule.constant(0.0), cfg, spec)
    assert err.value.init_index == 0 and err.value.noise_index == 0
    assert "init=0" in str(err.value)


def test_odd_fraction_balanced_at_start():
    params = desk_params(n_atoms=100)
    cfg = IntegratorConfig(record_stride=1, t_end=2 * params.dt)
    spec = EnsembleSpec(n_init=200, n_noise=1, master_seed=123)
    res = run_ensemble(params, PumpSchedule.constant(0.0), cfg, spec, workers=2)
    frac = odd_fraction(res, 0.0)
    m = res.n_trajectories
    assert abs(frac - 0.5) <= 3.0 / (2.0 * math.sqrt(m))


def test_odd_fraction_conventions():
    spec = EnsembleSpec(n_init=4, n_noise=1, master_seed=0)
    times = np.array([0.0, 1.0])
    theta = np.array([[0.2, -0.3], [0.1, 0.0], [0.4, 0.5], [-0.1, -0.2]])
    zeros = np.zeros_like(theta)
    res = EnsembleResult(
        spec=spec, traj_index=((0, 0), (1, 0), (2, 0), (3, 0)), times=times,
        theta=theta, bunching=zeros, re_alpha=zeros, im_alpha=zeros,
    )
    # theta == 0 counts as not-odd
    assert odd_fraction(res, 1.0) == pytest.approx(0.5)
    assert odd_fraction(res, 0.0) == pytest.approx(0.25)
    fr = res.sign_fractions(1.0)
    assert fr["negative"] + fr["zero"] + fr["positive"] == pytest.approx(1.0)
    assert fr["zero"] == pytest.approx(0.25)
    with pytest.raises(ValueError):
        odd_fraction(res, 0.7)


def test_position_histogram_flat_then_delta():
    res = small_run(n_init=6, n_noise=2, snapshot_times=(0.0,), t_end=0.1)
    centers, density = position_histogram(res, 0.0, 16)
    assert centers.shape == (16,) and density.shape == (16,)
    width = TWO_PI / 16
    assert np.sum(density) * width == pytest.approx(1.0)
    # thermal start is uniform: multinomial fluctuations around 1/(2 pi)
    n_pooled = res.snapshot_x[0.0].size
    sigma = math.sqrt((1 / width) * (1 / TWO_PI) / n_pooled * 16)
    assert np.max(np.abs(density - 1.0 / TWO_PI)) < 5 * sigma

    delta = EnsembleResult(
        spec=res.spec, traj_index=res.traj_index, times=res.times,
        theta=res.theta, bunching=res.bunching, re_alpha=res.re_alpha,
        im_alpha=res.im_alpha,
        snapshot_x={0.0: np.full((3, 40), math.pi / 2.0)},
    )
    centers_d, density_d = position_histogram(delta, 0.0, 16)
    occupied = density_d > 0
    assert occupied.sum() == 1
    assert centers_d[occupied][0] == pytest.approx(math.pi / 2.0, abs=width)

    with pytest.raises(ValueError):
        position_histogram(res, 0.05, 16)


def test_mirror_trajectories_have_opposite_order_parameter():
    # x -> -x, p -> -p, alpha -> -alpha, eta_p -> -eta_p is an exact
    # symmetry of the noise-free dynamics
    params = desk_params(n_atoms=30, noise_on=False)
    cfg = IntegratorConfig(record_stride=5, t_end=1.0)
    stream = RngStream(17, 0, 0)
    from cavsim import sample_initial

    state = sample_initial(params, stream)
    mirrored = TrajectoryState(
        x=wrap_positions(-state.x), p=-state.p, alpha=-state.alpha, t=0.0
    )
    a = run_trajectory(params, PumpSchedule.constant(120.0), cfg, initial=state)
    b = run_trajectory(params, PumpSchedule.constant(-120.0), cfg, initial=mirrored)
    np.testing.assert_allclose(b.series.theta, -a.series.theta, atol=1e-7)
    np.testing.assert_allclose(b.series.re_alpha, -a.series.re_alpha, atol=1e-7)
