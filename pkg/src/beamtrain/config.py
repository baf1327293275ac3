"""Experiment config files and built-in presets.

A config file is a JSON object with the fields of
:class:`~beamtrain.experiment.ExperimentConfig`, or ``{"panels": [...]}``
holding several such objects. ``profile`` is ``"los"``, ``"nlos"`` or an
object ``{"kind": ..., "powers": [...]}``. SNR entries may be ``"inf"``
for a noiseless run.
"""

from __future__ import annotations

import copy
import json
import math

from .channel import ChannelProfile, profile_by_name
from .experiment import ExperimentConfig

FIELDS = ("profile", "m_tx", "n_rx", "schemes", "epsilons", "snr_db_grid",
          "trials", "master_seed")

_FIG2_SNR = [-10, -5, 0, 5, 10, 15, 20, 25, 30]


def _panel(profile, m, epsilons, snrs, trials=1000):
    return {
        "profile": profile,
        "m_tx": m,
        "n_rx": m,
        "schemes": ["SGV", "STV"],
        "epsilons": list(epsilons),
        "snr_db_grid": list(snrs),
        "trials": trials,
        "master_seed": 0,
    }


PRESETS = {
    "fig2-left": {
        "description": "LOS array gain vs transmit SNR, M=N=16",
        "panels": [_panel("los", 16, [1, 2, 3], _FIG2_SNR)],
    },
    "fig2-middle": {
        "description": "NLOS array gain vs transmit SNR, M=N=16",
        "panels": [_panel("nlos", 16, [1, 2, 3], _FIG2_SNR)],
    },
    "fig2-right": {
        "description": "array gain vs iteration count at 25 dB, LOS/NLOS, M=N in {16, 32}",
        "panels": [_panel(p, m, range(1, 9), [25])
                   for p in ("los", "nlos") for m in (16, 32)],
    },
}


class ConfigError(ValueError):
    """Invalid config; the message names the offending field or line."""


def preset_panels(name: str) -> list:
    try:
        return copy.deepcopy(PRESETS[name]["panels"])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def load_panels(path) -> list:
    """Raw panel dicts from a JSON config file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and "panels" in data:
        panels = data["panels"]
        if not isinstance(panels, list) or not panels:
            raise ConfigError(f"{path}: 'panels' must be a nonempty list")
        return panels
    if isinstance(data, dict):
        return [data]
    raise ConfigError(f"{path}: top level must be a JSON object")


def parse_override(text: str) -> tuple:
    """``"key=value"`` -> ``(["key"], value)``; values are JSON, else strings."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override {text!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_overrides(panels: list, overrides) -> list:
    """Apply dotted-key overrides to every panel, in order (last wins)."""
    for path, value in overrides:
        if path[0] not in FIELDS:
            raise ConfigError(f"override: unknown field {'.'.join(path)!r}")
        for panel in panels:
            node = panel
            for part in path[:-1]:
                if not isinstance(node.get(part), dict):
                    if part == "profile" and isinstance(node.get(part), str):
                        node[part] = _profile_dict(node[part])
                    else:
                        node[part] = {}
                node = node[part]
            node[path[-1]] = copy.deepcopy(value)
    return panels


def _profile_dict(name):
    prof = profile_by_name(name)
    return {"kind": prof.kind.value, "powers": list(prof.powers)}


def _parse_profile(raw, where):
    if isinstance(raw, str):
        try:
            return profile_by_name(raw)
        except ValueError as exc:
            raise ConfigError(f"{where}.profile: {exc}") from None
    if isinstance(raw, dict):
        kind = raw.get("kind")
        powers = raw.get("powers")
        if powers is None and isinstance(kind, str):
            return _parse_profile(kind, where)
        try:
            return ChannelProfile(str(kind).upper(), tuple(powers))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.profile: {exc}") from None
    raise ConfigError(f"{where}.profile: expected 'los', 'nlos' or an object")


def _snr(value, where):
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: SNR entries must be numbers or 'inf', got {value!r}")
    return float(value)


def _int_field(raw, name, where):
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{name}: expected an integer, got {value!r}")
    return value


def _int_list(raw, name, where):
    value = raw[name]
    if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{where}.{name}: expected a list of integers, got {value!r}")
    return value


def build_config(raw: dict, where: str = "config") -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(raw) - set(FIELDS))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")
    missing = [f for f in FIELDS if f not in raw and f != "master_seed"]
    if missing:
        raise ConfigError(f"{where}: missing field(s) {missing}")
    schemes = raw["schemes"]
    if isinstance(schemes, str) or not isinstance(schemes, list):
        raise ConfigError(f"{where}.schemes: expected a list such as ['SGV', 'STV']")
    grid = raw["snr_db_grid"]
    if not isinstance(grid, list):
        raise ConfigError(f"{where}.snr_db_grid: expected a list")
    try:
        return ExperimentConfig(
            profile=_parse_profile(raw["profile"], where),
            m_tx=_int_field(raw, "m_tx", where),
            n_rx=_int_field(raw, "n_rx", where),
            schemes=tuple(schemes),
            epsilons=tuple(_int_list(raw, "epsilons", where)),
            snr_db_grid=tuple(_snr(v, f"{where}.snr_db_grid") for v in grid),
            trials=_int_field(raw, "trials", where),
            master_seed=_int_field(raw, "master_seed", where) if "master_seed" in raw else 0,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def build_configs(panels: list) -> list:
    return [build_config(p, f"panels[{i}]") for i, p in enumerate(panels)]


def panel_to_json(cfg: ExperimentConfig) -> dict:
    return {
        "profile": {"kind": cfg.profile.kind.value, "powers": list(cfg.profile.powers)},
        "m_tx": cfg.m_tx,
        "n_rx": cfg.n_rx,
        "schemes": [s.value for s in cfg.schemes],
        "epsilons": list(cfg.epsilons),
        "snr_db_grid": ["inf" if math.isinf(s) else s for s in cfg.snr_db_grid],
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
    }
