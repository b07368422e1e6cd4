"""Figure rendering for the five standard bundle views.

Rendering is deterministic: identical bundle input and options give a
byte-identical image file. SVG output is the default (diff-friendly);
PNG works by naming the output file accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import Bundle, BundleError, load_bundle, read_csv_columns

KINDS = ("histogram", "theta_traces", "odd_probability", "phase_diagram", "flip_panels")

#: Figure kinds each scenario family can serve.
KIND_FOR_SCENARIO = {
    "histogram": ("selforg", "seeded"),
    "theta_traces": ("seeded", "buildup", "flip"),
    "odd_probability": ("odd-prob",),
    "phase_diagram": ("phase-diagram",),
    "flip_panels": ("flip",),
}

TIME_LABEL = r"$t\ (\omega_\mathrm{R}^{-1})$"


@dataclass
class PlotSpec:
    bundle_dir: Path
    kind: str
    out_path: Path
    run: str | None = None          # run selection for multi-run bundles
    max_traces: int = 50            # cap on per-trajectory lines
    style: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.bundle_dir = Path(self.bundle_dir)
        self.out_path = Path(self.out_path)
        if self.kind not in KINDS:
            raise BundleError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        suffix = self.out_path.suffix.lower()
        if suffix not in (".svg", ".png"):
            raise BundleError(f"unsupported output format {suffix!r} (use .svg or .png)")


def _deterministic_rc():
    return matplotlib.rc_context(
        {
            "svg.hashsalt": "plotkit",
            "figure.dpi": 100,
            "savefig.dpi": 100,
            "axes.grid": True,
            "grid.alpha": 0.3,
            "font.size": 9,
        }
    )


def _save(fig, out_path: Path) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    # a fixed metadata block keeps SVG/PNG bytes independent of the clock
    if out_path.suffix.lower() == ".svg":
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(out_path, format="png")
    plt.close(fig)


def _plot_histogram(bundle: Bundle, spec: PlotSpec):
    run = bundle.run(spec.run)
    histograms = run.histograms()
    if not histograms:
        raise BundleError(f"run {run.name!r} holds no spatial histograms")
    fig, axes = plt.subplots(
        1, len(histograms), figsize=(3.2 * len(histograms), 2.6), sharey=True
    )
    axes = np.atleast_1d(axes)
    for ax, (t, cols) in zip(axes, histograms):
        ax.fill_between(cols["bin_center"], cols["density"], step="mid", alpha=0.4)
        ax.step(cols["bin_center"], cols["density"], where="mid")
        ax.set_xlabel(r"$kx$")
        ax.set_title(rf"$t = {t:g}\ \omega_\mathrm{{R}}^{{-1}}$")
        ax.set_xlim(0.0, 2.0 * np.pi)
        ax.set_ylim(bottom=0.0)
    axes[0].set_ylabel("density")
    fig.suptitle(f"atomic density: {run.name}")
    fig.tight_layout()
    return fig


def _plot_theta_traces(bundle: Bundle, spec: PlotSpec):
    if spec.run is not None:
        runs = [bundle.run(spec.run)]
    else:
        runs = [r for r in bundle.runs if r.trajectory_files()]
    runs = [r for r in runs if r.trajectory_files()]
    if not runs:
        raise BundleError("bundle holds no per-trajectory series")
    fig, axes = plt.subplots(
        len(runs), 1, figsize=(5.0, 1.9 * len(runs)), sharex=True, squeeze=False
    )
    for ax, run in zip(axes[:, 0], runs):
        for path in run.trajectory_files()[: spec.max_traces]:
            cols = read_csv_columns(path)
            ax.plot(cols["t"], cols["theta"], lw=0.6, alpha=0.7)
        ax.set_ylim(-1.05, 1.05)
        ax.set_ylabel(r"$\Theta$")
        ax.set_title(run.name, fontsize=8, loc="right")
    axes[-1, 0].set_xlabel(TIME_LABEL)
    fig.tight_layout()
    return fig


def _plot_odd_probability(bundle: Bundle, spec: PlotSpec):
    cols = bundle.set_file("odd_probability.csv")
    fig, ax = plt.subplots(figsize=(4.2, 2.8))
    ax.plot(cols["eta_p"], cols["odd_fraction"], "o-")
    ax.axhline(0.5, color="k", lw=0.6, ls=":")
    ax.set_xlabel(r"$\eta_\mathrm{p}\ (\omega_\mathrm{R})$")
    ax.set_ylabel(r"$P(\Theta < 0)$")
    ax.set_ylim(0.0, 1.05)
    fig.tight_layout()
    return fig


def _plot_phase_diagram(bundle: Bundle, spec: PlotSpec):
    cols = bundle.set_file("phase_diagram.csv")
    fig, (ax_t, ax_b) = plt.subplots(
        2, 1, figsize=(4.4, 4.2), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]},
    )
    ax_t.plot(cols["sqrt_n_eta"], cols["final_theta"], "o", ms=3.5, alpha=0.7)
    ax_t.axhline(0.0, color="k", lw=0.6, ls=":")
    ax_t.set_ylabel(r"$\Theta$")
    ax_t.set_ylim(-1.05, 1.05)
    ax_b.plot(cols["sqrt_n_eta"], cols["final_bunching"], "s", ms=3.5, alpha=0.7)
    ax_b.set_ylabel(r"$\mathcal{B}$")
    ax_b.set_ylim(0.0, 1.05)
    ax_b.set_xlabel(r"$\sqrt{N}\eta\ (\omega_\mathrm{R})$")
    eta_p = cols["eta_p"][0] if cols["eta_p"].size else float("nan")
    ax_t.set_title(rf"steady state, $\eta_\mathrm{{p}} = {eta_p:g}\ \omega_\mathrm{{R}}$")
    fig.tight_layout()
    return fig


def _plot_flip_panels(bundle: Bundle, spec: PlotSpec):
    run = bundle.run(spec.run)
    files = run.trajectory_files()
    if not files:
        raise BundleError(f"run {run.name!r} holds no per-trajectory series")
    cols = read_csv_columns(files[0])
    fig, axes = plt.subplots(4, 1, figsize=(5.2, 6.4), sharex=True)
    panels = (
        ("theta", r"$\Theta$"),
        ("photon_number", r"$|\alpha|^2$"),
        ("re_alpha", r"$\mathrm{Re}\,\alpha$"),
        ("im_alpha", r"$\mathrm{Im}\,\alpha$"),
    )
    for ax, (key, label) in zip(axes, panels):
        ax.plot(cols["t"], cols[key], lw=0.8)
        ax.set_ylabel(label)
    axes[0].set_ylim(-1.05, 1.05)
    axes[-1].set_xlabel(TIME_LABEL)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "histogram": _plot_histogram,
    "theta_traces": _plot_theta_traces,
    "odd_probability": _plot_odd_probability,
    "phase_diagram": _plot_phase_diagram,
    "flip_panels": _plot_flip_panels,
}


def render(spec: PlotSpec) -> Path:
    """Render one figure kind from a bundle to spec.out_path."""
    bundle = load_bundle(spec.bundle_dir)
    allowed = KIND_FOR_SCENARIO[spec.kind]
    if bundle.scenario_kind not in allowed:
        raise BundleError(
            f"figure kind {spec.kind!r} does not match scenario "
            f"{bundle.scenario_kind!r} (serves: {', '.join(allowed)})"
        )
    with _deterministic_rc():
        fig = _RENDERERS[spec.kind](bundle, spec)
        _save(fig, spec.out_path)
    return spec.out_path
