"""Bit-stable output bundles: manifest, CSV series and JSON summaries.

Every number is written with shortest round-trip decimal formatting, so
re-reading a file recovers the identical double. Bundles produced from
the same config are byte-identical regardless of worker count; nothing
time- or host-dependent is written into a bundle.
"""

from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .ensemble import EnsembleResult, odd_fraction, position_histogram
from .scenarios import Scenario

SCHEMA_VERSION = 1

AGGREGATE_HEADER = (
    "t,theta_mean,theta_std,theta_abs_mean,bunching_mean,bunching_std,photon_mean"
)
TRAJECTORY_HEADER = "t,theta,bunching,photon_number,re_alpha,im_alpha"
HISTOGRAM_HEADER = "bin_center,density"


def fmt(value: float) -> str:
    """Shortest decimal that round-trips to the identical double."""
    return repr(float(value))


def _write_csv(path: Path, header: str, columns: list[np.ndarray]) -> None:
    n = columns[0].shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in range(n):
            fh.write(",".join(fmt(col[row]) for col in columns) + "\n")


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(header)))
    return {name: data[:, k] for k, name in enumerate(header)}


def _traj_filename(i: int, j: int) -> str:
    return f"traj_{i:04d}_{j:02d}.csv"


def _run_summary(scenario: Scenario, result: EnsembleResult) -> dict:
    final_t = float(result.times[-1])
    scenario_dict = scenario.to_dict()
    summary: dict = {
        "name": scenario.name,
        "kind": scenario.kind,
        "params": scenario_dict["params"],
        "schedule": scenario_dict["schedule"],
        "tags": {k: v for k, v in scenario.tags},
        "n_trajectories": result.n_trajectories,
        "final_time": final_t,
        "final_theta": [float(v) for v in result.final_theta],
        "final_bunching": [float(v) for v in result.final_bunching],
        "sign_fractions": result.sign_fractions(final_t),
        "odd_fraction": {
            fmt(t): odd_fraction(result, t) for t in scenario.outputs.odd_fraction_times
        },
    }
    if "pulse_sign" in result.extras:
        summary["pulse_signs"] = [float(v) for v in result.extras["pulse_sign"]]
    return summary


def write_run(run_dir: Path, scenario: Scenario, result: EnsembleResult) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)

    _write_csv(
        run_dir / "aggregate.csv",
        AGGREGATE_HEADER,
        [
            result.times,
            result.theta_mean(),
            result.theta_std(),
            result.theta_abs_mean(),
            result.bunching_mean(),
            result.bunching_std(),
            result.photon_mean(),
        ],
    )

    summary = _run_summary(scenario, result)
    histograms = []
    for idx, ts in enumerate(scenario.outputs.snapshot_times):
        centers, density = position_histogram(result, ts, scenario.outputs.histogram_bins)
        name = f"histogram_{idx:02d}.csv"
        _write_csv(run_dir / name, HISTOGRAM_HEADER, [centers, density])
        histograms.append({"time": float(ts), "file": name})
    if histograms:
        summary["histograms"] = histograms
    _write_json(run_dir / "summary.json", summary)

    if scenario.outputs.per_trajectory_series:
        traj_dir = run_dir / "trajectories"
        traj_dir.mkdir(exist_ok=True)
        for row, (i, j) in enumerate(result.traj_index):
            _write_csv(
                traj_dir / _traj_filename(i, j),
                TRAJECTORY_HEADER,
                [
                    result.times,
                    result.theta[row],
                    result.bunching[row],
                    result.photon_number[row],
                    result.re_alpha[row],
                    result.im_alpha[row],
                ],
            )


def _write_set_files(
    out_dir: Path, kind: str, runs: list[tuple[Scenario, EnsembleResult]]
) -> None:
    if kind == "odd-prob":
        rows = []
        for sc, res in runs:
            t = sc.outputs.odd_fraction_times[-1] if sc.outputs.odd_fraction_times else float(res.times[-1])
            rows.append((sc.tag("eta_p"), odd_fraction(res, t), res.n_trajectories))
        rows.sort(key=lambda r: r[0])
        with open(out_dir / "odd_probability.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("eta_p,odd_fraction,n_trajectories\n")
            for eta_p, frac, n in rows:
                fh.write(f"{fmt(eta_p)},{fmt(frac)},{n}\n")
    elif kind == "phase-diagram":
        with open(out_dir / "phase_diagram.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("sqrt_n_eta,eta_p,init_index,noise_index,final_theta,final_bunching\n")
            for sc, res in runs:
                v = sc.tag("sqrt_n_eta")
                ep = sc.tag("eta_p")
                for row, (i, j) in enumerate(res.traj_index):
                    fh.write(
                        f"{fmt(v)},{fmt(ep)},{i},{j},"
                        f"{fmt(res.final_theta[row])},{fmt(res.final_bunching[row])}\n"
                    )
    elif kind == "buildup":
        with open(out_dir / "buildup_index.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("name,sqrt_n_eta,eta_p,path\n")
            for sc, _ in runs:
                fh.write(
                    f"{sc.name},{fmt(sc.tag('sqrt_n_eta'))},{fmt(sc.tag('eta_p'))},"
                    f"runs/{sc.name}\n"
                )


def prepare_out_dir(out_dir: Path, force: bool) -> None:
    """Refuse to clobber existing data unless forced; forced overwrite
    only clears directories that look like bundles we wrote."""
    if not out_dir.exists():
        return
    entries = list(out_dir.iterdir())
    if not entries:
        return
    if not force:
        raise FileExistsError(
            f"output directory {out_dir} is not empty; pass --force to overwrite"
        )
    if not (out_dir / "manifest.json").exists():
        raise FileExistsError(
            f"refusing to overwrite {out_dir}: it is not a cavsim bundle"
        )
    for entry in entries:
        if entry.is_dir():
            shutil.rmtree(entry)
        else:
            entry.unlink()


def write_outputs(
    runs: list[tuple[Scenario, EnsembleResult]],
    config: RunConfig,
    out_dir: str | Path | None = None,
) -> Path:
    """Write the bundle for one executed config; returns its root."""
    if not runs:
        raise ValueError("nothing to write: empty run list")
    if out_dir is None:
        out_dir = config.out_dir
    if out_dir is None:
        raise ValueError("no output directory: pass out_dir or set it in the config")
    root = Path(out_dir)
    prepare_out_dir(root, config.force)
    root.mkdir(parents=True, exist_ok=True)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "generator": {"name": "cavsim", "version": __version__},
        "scenario_kind": config.kind,
        "config": config.resolved(),
        "provenance": dict(sorted(config.provenance.items())),
        "runs": [
            {"name": sc.name, "path": f"runs/{sc.name}", "scenario": sc.to_dict()}
            for sc, _ in runs
        ],
    }
    _write_json(root / "manifest.json", manifest)

    for sc, res in runs:
        write_run(root / "runs" / sc.name, sc, res)

    _write_set_files(root, config.kind, runs)
    return root


def bundle_digest(root: str | Path) -> str:
    """SHA-256 over every file in a bundle (sorted relative paths and
    contents); equal digests mean byte-identical bundles."""
    root = Path(root)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        digest.update(str(path.relative_to(root)).encode())
        digest.update(b"\0")
        digest.update(path.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()
