"""JSON configuration schema.

A config document has the sections ``geometry``, ``noma``, ``power``,
``fading``, ``elements`` and ``gamma_override`` plus an optional
``scenario_kind``.  Omitted sections take the baseline values; unknown keys
are rejected so that typos cannot silently fall back to a default.

``power`` accepts either ``noise_dbm`` or the pair
``bandwidth_hz``/``noise_figure_db`` for the noise floor.
"""
from __future__ import annotations

import json
from dataclasses import asdict

from ..channel import FadingParams, GammaFit
from ..errors import ConfigError
from ..scenario import (GeometryConfig, NomaConfig, PowerConfig, ScenarioKind,
                        SystemConfig, default_config, noise_power_dbm)

TOP_LEVEL = {"scenario_kind", "geometry", "noma", "power", "fading", "elements", "gamma_override"}
SECTION_KEYS = {
    "geometry": {"bs_position", "ris_position", "R1", "R2", "alpha"},
    "noma": {"a_near", "a_far", "gamma_th_sic", "beta_rfl", "beta_rfr"},
    "power": {"pt_dbm", "noise_dbm", "bandwidth_hz", "noise_figure_db"},
    "fading": {"m", "omega"},
    "gamma_override": {"k", "theta"},
}


def _section(doc, name):
    body = doc.get(name, {})
    if not isinstance(body, dict):
        raise ConfigError("expected an object", name)
    unknown = set(body) - SECTION_KEYS[name]
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}", f"{name}.{sorted(unknown)[0]}")
    return body


def _number(body, key, section):
    value = body[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", f"{section}.{key}")
    return float(value)


def config_from_dict(doc: dict) -> SystemConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)}", sorted(unknown)[0])

    elements = doc.get("elements", 30)
    if isinstance(elements, bool) or not isinstance(elements, int):
        raise ConfigError(f"expected an integer, got {elements!r}", "elements")
    # baseline values; carries the reference gamma tuple when one exists for this N
    base = default_config(elements)

    geo = _section(doc, "geometry")
    geo_kwargs = {}
    for key in ("bs_position", "ris_position"):
        if key in geo:
            vec = geo[key]
            if not isinstance(vec, list) or len(vec) != 3:
                raise ConfigError("expected a list of three numbers", f"geometry.{key}")
            geo_kwargs[key] = tuple(_number(dict(enumerate(vec)), i, f"geometry.{key}") for i in range(3))
    for key in ("R1", "R2", "alpha"):
        if key in geo:
            geo_kwargs[key] = _number(geo, key, "geometry")
    geometry = GeometryConfig(**{**asdict(base.geometry), **geo_kwargs})

    noma_body = _section(doc, "noma")
    noma = NomaConfig(**{**asdict(base.noma),
                         **{k: _number(noma_body, k, "noma") for k in noma_body}})

    pw = _section(doc, "power")
    pt = _number(pw, "pt_dbm", "power") if "pt_dbm" in pw else base.power.pt_dbm
    if "noise_dbm" in pw:
        if "bandwidth_hz" in pw or "noise_figure_db" in pw:
            raise ConfigError("give either noise_dbm or bandwidth_hz/noise_figure_db", "power.noise_dbm")
        noise = _number(pw, "noise_dbm", "power")
    elif "bandwidth_hz" in pw or "noise_figure_db" in pw:
        if not ("bandwidth_hz" in pw and "noise_figure_db" in pw):
            raise ConfigError("bandwidth_hz and noise_figure_db must be given together",
                              "power.bandwidth_hz")
        bw = _number(pw, "bandwidth_hz", "power")
        if bw <= 0:
            raise ConfigError("must be positive", "power.bandwidth_hz")
        noise = noise_power_dbm(bw, _number(pw, "noise_figure_db", "power"))
    else:
        noise = base.power.noise_dbm
    power = PowerConfig(pt_dbm=pt, noise_dbm=noise)

    fad = _section(doc, "fading")
    fading = FadingParams(**{**asdict(base.fading), **{k: _number(fad, k, "fading") for k in fad}})

    if "gamma_override" in doc:
        raw = doc["gamma_override"]
        if raw is None:
            override = None
        else:
            ov = _section(doc, "gamma_override")
            if set(ov) != {"k", "theta"}:
                raise ConfigError("needs both k and theta", "gamma_override")
            override = GammaFit(_number(ov, "k", "gamma_override"), _number(ov, "theta", "gamma_override"))
    else:
        override = base.gamma_override

    kind = doc.get("scenario_kind", ScenarioKind.STAR.value)
    return SystemConfig(geometry=geometry, noma=noma, power=power, fading=fading,
                        n_elements=elements, scenario_kind=kind, gamma_override=override)


def load_config(path) -> SystemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})", str(path)) from None
    return config_from_dict(doc)


def config_to_dict(cfg: SystemConfig) -> dict:
    g = cfg.geometry
    override = cfg.gamma_override
    return {
        "scenario_kind": cfg.scenario_kind.value,
        "geometry": {"bs_position": list(g.bs_position), "ris_position": list(g.ris_position),
                     "R1": g.R1, "R2": g.R2, "alpha": g.alpha},
        "noma": asdict(cfg.noma),
        "power": {"pt_dbm": cfg.power.pt_dbm, "noise_dbm": cfg.power.noise_dbm},
        "fading": asdict(cfg.fading),
        "elements": cfg.n_elements,
        "gamma_override": None if override is None else {"k": override.k_raw, "theta": override.theta},
    }
