"""Readers for simulation output bundles.

A bundle is a directory with a manifest.json, one subdirectory per run
under runs/ (aggregate.csv, summary.json, optional histogram_*.csv and
trajectories/*.csv) and, for sweep scenarios, set-level CSV files. This
module never computes physics; it only loads what the simulator wrote.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUPPORTED_SCHEMA = 1


class BundleError(ValueError):
    """Missing, malformed or incompatible bundle content."""


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    if not path.exists():
        raise BundleError(f"missing file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not header or header == [""]:
        raise BundleError(f"empty header in {path}")
    data = (
        np.array(rows, dtype=np.float64)
        if rows
        else np.empty((0, len(header)), dtype=np.float64)
    )
    if rows and data.shape[1] != len(header):
        raise BundleError(f"ragged rows in {path}")
    return {name: data[:, k] for k, name in enumerate(header)}


@dataclass
class Run:
    name: str
    path: Path
    summary: dict

    def aggregate(self) -> dict[str, np.ndarray]:
        return read_csv_columns(self.path / "aggregate.csv")

    def histograms(self) -> list[tuple[float, dict[str, np.ndarray]]]:
        out = []
        for entry in self.summary.get("histograms", []):
            out.append((entry["time"], read_csv_columns(self.path / entry["file"])))
        return out

    def trajectory_files(self) -> list[Path]:
        traj_dir = self.path / "trajectories"
        if not traj_dir.is_dir():
            return []
        return sorted(traj_dir.glob("traj_*.csv"))


@dataclass
class Bundle:
    root: Path
    manifest: dict
    runs: list[Run]

    @property
    def scenario_kind(self) -> str:
        return self.manifest["scenario_kind"]

    def run(self, name: str | None = None) -> Run:
        if name is None:
            return self.runs[0]
        for r in self.runs:
            if r.name == name:
                return r
        raise BundleError(
            f"no run named {name!r}; available: {', '.join(r.name for r in self.runs)}"
        )

    def set_file(self, filename: str) -> dict[str, np.ndarray]:
        return read_csv_columns(self.root / filename)


def load_bundle(root: str | Path) -> Bundle:
    root = Path(root)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise BundleError(f"{root} is not a bundle (no manifest.json)")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"unreadable manifest: {exc}") from exc
    schema = manifest.get("schema_version")
    if schema != SUPPORTED_SCHEMA:
        raise BundleError(
            f"unsupported schema version {schema!r} (supported: {SUPPORTED_SCHEMA})"
        )
    if "scenario_kind" not in manifest or "runs" not in manifest:
        raise BundleError("manifest lacks scenario_kind or runs")

    runs = []
    for entry in manifest["runs"]:
        run_dir = root / entry["path"]
        summary_path = run_dir / "summary.json"
        if not summary_path.exists():
            raise BundleError(f"missing run summary: {summary_path}")
        runs.append(
            Run(
                name=entry["name"],
                path=run_dir,
                summary=json.loads(summary_path.read_text(encoding="utf-8")),
            )
        )
    if not runs:
        raise BundleError("bundle contains no runs")
    return Bundle(root=root, manifest=manifest, runs=runs)
