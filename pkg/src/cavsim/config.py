"""Run configuration: JSON parsing, validation and scenario assembly.

A config selects a catalog scenario (or carries an inline one), the
master seed, desk-scale factors and parameter overrides. Every value is
validated before any computation starts; unknown keys are rejected with
their field path. The resolved, result-defining part of a config is
echoed into the output manifest, so a manifest can be replayed.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, replace

from .model import SimParams
from .scenarios import CATALOG, DEFAULT_SEED, Scenario, build_scenarios, rescale

_PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(SimParams))
_SCALE_KEYS = ("ensemble", "time", "atoms")
_OUTPUT_KEYS = ("per_trajectory_series", "histogram_bins")
_TOP_KEYS = (
    "scenario",
    "scenario_inline",
    "master_seed",
    "args",
    "scale",
    "params",
    "outputs",
    "workers",
    "out_dir",
    "force",
)


class ConfigError(ValueError):
    """Invalid run configuration; the message carries the field path."""


@dataclass
class RunConfig:
    scenario_kind: str | None = None
    inline: Scenario | None = None
    master_seed: int = DEFAULT_SEED
    scenario_args: dict = field(default_factory=dict)
    scale_ensemble: float = 1.0
    scale_time: float = 1.0
    scale_atoms: float = 1.0
    params_override: dict = field(default_factory=dict)
    outputs_override: dict = field(default_factory=dict)
    workers: int = 1
    out_dir: str | None = None
    force: bool = False
    provenance: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        if self.inline is not None:
            return self.inline.kind
        assert self.scenario_kind is not None
        return self.scenario_kind

    def resolved(self) -> dict:
        """Result-defining echo of this config (execution details like
        worker count, output path and overwrite mode excluded, so output
        bundles do not depend on them)."""
        out: dict = {"master_seed": self.master_seed}
        if self.inline is not None:
            out["scenario_inline"] = self.inline.to_dict()
        else:
            out["scenario"] = self.scenario_kind
        if self.scenario_args:
            out["args"] = dict(sorted(self.scenario_args.items()))
        out["scale"] = {
            "ensemble": self.scale_ensemble,
            "time": self.scale_time,
            "atoms": self.scale_atoms,
        }
        if self.params_override:
            out["params"] = dict(sorted(self.params_override.items()))
        if self.outputs_override:
            out["outputs"] = dict(sorted(self.outputs_override.items()))
        return out


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{path}: {message}")


def _check_number(value, path: str, *, integer: bool = False, positive: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{path}: must be > 0, got {value!r}")
    return value


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Accepts either a plain config object or a previously written
    manifest (replayed through its embedded config echo).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    if "schema_version" in raw and "config" in raw:  # manifest replay
        raw = raw["config"]
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a JSON object")
    return _parse_dict(raw)


def _parse_dict(raw: dict) -> RunConfig:
    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown field")

    cfg = RunConfig()
    prov = cfg.provenance

    has_name = "scenario" in raw
    has_inline = "scenario_inline" in raw
    if has_name == has_inline:
        raise ConfigError(
            "top level: exactly one of 'scenario' and 'scenario_inline' is required"
        )
    if has_name:
        name = raw["scenario"]
        _require(isinstance(name, str), "scenario", f"expected a string, got {name!r}")
        _require(
            name in CATALOG,
            "scenario",
            f"unknown scenario {name!r}; available: {', '.join(sorted(CATALOG))}",
        )
        cfg.scenario_kind = name
    else:
        inline = raw["scenario_inline"]
        _require(isinstance(inline, dict), "scenario_inline", "expected an object")
        try:
            cfg.inline = Scenario.from_dict(inline)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"scenario_inline: {exc}") from exc
        cfg.master_seed = cfg.inline.spec.master_seed

    if "master_seed" in raw:
        cfg.master_seed = _check_number(raw["master_seed"], "master_seed", integer=True)
    # provenance is value-based (differs from the default) so that a
    # manifest replay reports the same origins as the original run
    if has_inline and "master_seed" not in raw:
        prov["master_seed"] = "inline"
    else:
        prov["master_seed"] = "user" if cfg.master_seed != DEFAULT_SEED else "default"

    if "args" in raw:
        _require(isinstance(raw["args"], dict), "args", "expected an object")
        _require(not has_inline, "args", "not applicable to an inline scenario")
        allowed = CATALOG[cfg.scenario_kind][1]
        for key, value in raw["args"].items():
            _require(key in allowed, f"args.{key}", f"not accepted by scenario {cfg.scenario_kind!r}")
            cfg.scenario_args[key] = value
            prov[f"args.{key}"] = "user"

    if "scale" in raw:
        _require(isinstance(raw["scale"], dict), "scale", "expected an object")
        for key, value in raw["scale"].items():
            _require(key in _SCALE_KEYS, f"scale.{key}", "unknown field")
            setattr(cfg, f"scale_{key}", float(_check_number(value, f"scale.{key}", positive=True)))
    for key in _SCALE_KEYS:
        prov[f"scale.{key}"] = "user" if getattr(cfg, f"scale_{key}") != 1.0 else "default"

    if "params" in raw:
        _require(isinstance(raw["params"], dict), "params", "expected an object")
        for key, value in raw["params"].items():
            _require(key in _PARAM_FIELDS, f"params.{key}", "unknown field")
            if key == "noise_on":
                _require(isinstance(value, bool), "params.noise_on", f"expected a boolean, got {value!r}")
            elif key == "n_atoms":
                _check_number(value, "params.n_atoms", integer=True)
            else:
                _check_number(value, f"params.{key}")
            cfg.params_override[key] = value
            prov[f"params.{key}"] = "user"

    if "outputs" in raw:
        _require(isinstance(raw["outputs"], dict), "outputs", "expected an object")
        for key, value in raw["outputs"].items():
            _require(key in _OUTPUT_KEYS, f"outputs.{key}", "unknown field")
            if key == "per_trajectory_series":
                _require(isinstance(value, bool), f"outputs.{key}", f"expected a boolean, got {value!r}")
            else:
                _check_number(value, f"outputs.{key}", integer=True, positive=True)
            cfg.outputs_override[key] = value
            prov[f"outputs.{key}"] = "user"

    if "workers" in raw:
        cfg.workers = _check_number(raw["workers"], "workers", integer=True, positive=True)
    if "out_dir" in raw:
        _require(isinstance(raw["out_dir"], str), "out_dir", "expected a string")
        cfg.out_dir = raw["out_dir"]
    if "force" in raw:
        _require(isinstance(raw["force"], bool), "force", "expected a boolean")
        cfg.force = raw["force"]

    # fail here, not mid-run, if the assembled scenarios are invalid
    build_run_scenarios(cfg)
    return cfg


def build_run_scenarios(config: RunConfig) -> list[Scenario]:
    """Assemble the scenario list a config describes: catalog build (or
    inline scenario), parameter overrides, then desk-scale factors."""
    if config.inline is not None:
        scenarios = [config.inline]
        if config.provenance.get("master_seed") == "user":
            scenarios = [
                replace(s, spec=replace(s.spec, master_seed=config.master_seed))
                for s in scenarios
            ]
    else:
        try:
            scenarios = build_scenarios(
                config.scenario_kind, master_seed=config.master_seed, **config.scenario_args
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"args: {exc}") from exc

    if config.params_override:
        rebuilt = []
        for s in scenarios:
            try:
                rebuilt.append(replace(s, params=replace(s.params, **config.params_override)))
            except ValueError as exc:
                msg = str(exc)
                path = next((f for f in _PARAM_FIELDS if msg.startswith(f)), None)
                raise ConfigError(
                    f"params.{msg}" if path else f"params: {msg}"
                ) from exc
        scenarios = rebuilt

    if config.outputs_override:
        scenarios = [
            replace(s, outputs=replace(s.outputs, **config.outputs_override))
            for s in scenarios
        ]

    try:
        return [
            rescale(
                s,
                ensemble=config.scale_ensemble,
                time=config.scale_time,
                atoms=config.scale_atoms,
            )
            for s in scenarios
        ]
    except ValueError as exc:
        raise ConfigError(f"scale: {exc}") from exc
