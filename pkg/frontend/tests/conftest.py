"""Synthetic bundle fixtures: hand-written files in the bundle layout,
so renderer tests never depend on the simulator."""

import json
import math

import numpy as np
import pytest


def write_csv(path, header, columns):
    rows = np.column_stack(columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def make_bundle(root, kind, runs, set_files=None, schema_version=1):
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema_version": schema_version,
        "generator": {"name": "cavsim", "version": "0.1.0"},
        "scenario_kind": kind,
        "config": {"scenario": kind, "master_seed": 1},
        "provenance": {},
        "runs": [{"name": name, "path": f"runs/{name}", "scenario": {}} for name in runs],
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    for name, content in runs.items():
        run_dir = root / "runs" / name
        run_dir.mkdir(parents=True)
        t = content["t"]
        theta = content["theta"]
        write_csv(
            run_dir / "aggregate.csv",
            ["t", "theta_mean", "theta_std", "theta_abs_mean",
             "bunching_mean", "bunching_std", "photon_mean"],
            [t, theta, 0 * t, np.abs(theta), 0.5 + 0 * t, 0 * t, 1 + 0 * t],
        )
        summary = {
            "name": name,
            "kind": kind,
            "n_trajectories": content.get("n_traj", 1),
            "final_time": float(t[-1]),
            "final_theta": [float(theta[-1])],
            "final_bunching": [0.5],
            "sign_fractions": {"negative": 0.0, "zero": 0.0, "positive": 1.0},
            "odd_fraction": {},
        }
        if "histogram_times" in content:
            summary["histograms"] = []
            for idx, ht in enumerate(content["histogram_times"]):
                fname = f"histogram_{idx:02d}.csv"
                centers = np.linspace(0.1, 2 * math.pi - 0.1, 16)
                density = np.full(16, 1.0 / (2 * math.pi))
                if idx:  # peaked at pi/2 for later instants
                    density = 0.02 + np.exp(-((centers - math.pi / 2) ** 2))
                    density /= np.sum(density) * (2 * math.pi / 16)
                write_csv(run_dir / fname, ["bin_center", "density"], [centers, density])
                summary["histograms"].append({"time": ht, "file": fname})
        (run_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
        if content.get("trajectories"):
            traj_dir = run_dir / "trajectories"
            traj_dir.mkdir()
            for k in range(content["trajectories"]):
                phase = 2 * math.pi * k / content["trajectories"]
                th = np.tanh(0.01 * t) * math.cos(phase)
                re = 5 * np.cos(0.01 * t + phase)
                im = 5 * np.sin(0.01 * t + phase)
                write_csv(
                    traj_dir / f"traj_{k:04d}_00.csv",
                    ["t", "theta", "bunching", "photon_number", "re_alpha", "im_alpha"],
                    [t, th, 0.5 + 0 * t, re**2 + im**2, re, im],
                )
    for fname, (header, columns) in (set_files or {}).items():
        write_csv(root / fname, header, columns)
    return root


@pytest.fixture
def selforg_bundle(tmp_path):
    t = np.linspace(0.0, 100.0, 51)
    return make_bundle(
        tmp_path / "selforg", "selforg",
        {"selforg": {"t": t, "theta": np.tanh(0.05 * t),
                     "histogram_times": [0.0, 100.0]}},
    )


@pytest.fixture
def seeded_bundle(tmp_path):
    t = np.linspace(0.0, 100.0, 51)
    runs = {
        name: {"t": t, "theta": np.tanh(0.05 * t), "trajectories": 4,
               "histogram_times": [100.0], "n_traj": 4}
        for name in ("pump_only", "seed_even", "seed_odd")
    }
    return make_bundle(tmp_path / "seeded", "seeded", runs)


@pytest.fixture
def oddprob_bundle(tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    eta_p = np.array([0.0, 125.0, 250.0, 500.0, 1000.0])
    frac = np.array([0.5, 0.62, 0.8, 0.97, 1.0])
    return make_bundle(
        tmp_path / "oddprob", "odd-prob",
        {f"etap_{v:g}": {"t": t, "theta": 0 * t} for v in eta_p},
        set_files={"odd_probability.csv": (
            ["eta_p", "odd_fraction", "n_trajectories"],
            [eta_p, frac, np.full(5, 1000.0)],
        )},
    )


@pytest.fixture
def phase_bundle(tmp_path):
    t = np.linspace(0.0, 10.0, 11)
    v = np.repeat([300.0, 400.0, 500.0], 5)
    theta = np.clip(0.002 * v + np.linspace(-0.2, 0.2, 15), -1, 1)
    return make_bundle(
        tmp_path / "phase", "phase-diagram",
        {"sqrtneta_300": {"t": t, "theta": 0 * t}},
        set_files={"phase_diagram.csv": (
            ["sqrt_n_eta", "eta_p", "init_index", "noise_index",
             "final_theta", "final_bunching"],
            [v, np.full(15, -500.0), np.zeros(15), np.zeros(15),
             theta, np.full(15, 0.8)],
        )},
    )


@pytest.fixture
def flip_bundle(tmp_path):
    t = np.linspace(0.0, 4000.0, 401)
    return make_bundle(
        tmp_path / "flip", "flip",
        {"flip": {"t": t, "theta": np.tanh(0.01 * (t - 500)), "trajectories": 1}},
    )
