"""Secondary acceptance: render every figure kind from real simulator
bundles (produced through the cavsim CLI, never imported) and check that
re-rendering is byte-identical."""

import json
import shutil
import subprocess
import sys

import pytest

from plotkit import PlotSpec, render

CAVSIM = shutil.which("cavsim")

# micro-scale configs per scenario family the five figure kinds draw on
CONFIGS = {
    "selforg": {
        "scenario": "selforg", "master_seed": 31,
        "scale": {"ensemble": 0.08, "time": 0.002, "atoms": 0.02},
    },
    "seeded": {
        "scenario": "seeded", "master_seed": 32,
        "scale": {"ensemble": 0.15, "time": 0.002, "atoms": 0.02},
    },
    "odd-prob": {
        "scenario": "odd-prob", "master_seed": 33,
        "args": {"eta_p_values": [0.0, 250.0, 1000.0]},
        "scale": {"ensemble": 0.002, "atoms": 0.02},
    },
    "phase-diagram": {
        "scenario": "phase-diagram", "master_seed": 34,
        "args": {"sqrt_n_eta_values": [300.0, 500.0]},
        "scale": {"ensemble": 0.2, "time": 0.001, "atoms": 0.02},
    },
    "flip": {
        "scenario": "flip", "master_seed": 35,
        "scale": {"atoms": 0.02},
    },
}

KIND_TO_SCENARIO = {
    "histogram": "selforg",
    "theta_traces": "seeded",
    "odd_probability": "odd-prob",
    "phase_diagram": "phase-diagram",
    "flip_panels": "flip",
}


@pytest.fixture(scope="module")
def bundles(tmp_path_factory):
    if CAVSIM is None:
        pytest.skip("cavsim CLI not installed")
    root = tmp_path_factory.mktemp("bundles")
    out = {}
    for name, config in CONFIGS.items():
        cfg_path = root / f"{name}.json"
        cfg_path.write_text(json.dumps(config))
        bundle_dir = root / name
        proc = subprocess.run(
            [CAVSIM, "run", str(cfg_path), "--out", str(bundle_dir), "--workers", "2"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        out[name] = bundle_dir
    return out


def test_all_five_kinds_render_and_rerender_identically(bundles, tmp_path):
    for kind, scenario in KIND_TO_SCENARIO.items():
        first = render(PlotSpec(bundles[scenario], kind, tmp_path / f"{kind}_1.svg"))
        again = render(PlotSpec(bundles[scenario], kind, tmp_path / f"{kind}_2.svg"))
        assert first.stat().st_size > 500, kind
        assert first.read_bytes() == again.read_bytes(), kind
        print(f"[SECONDARY] {kind}: rendered from {scenario} bundle, "
              f"re-render byte-identical")


def test_cli_renders_and_rejects_mismatch(bundles, tmp_path):
    out = tmp_path / "cli.svg"
    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "plot", str(bundles["flip"]),
         "--kind", "flip_panels", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()

    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "plot", str(bundles["selforg"]),
         "--kind", "flip_panels", "--out", str(tmp_path / "bad.svg")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "does not match" in proc.stderr
