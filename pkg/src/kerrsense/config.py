"""Run configuration files.

A config is a YAML document::

    units: hz2pi            # required: gamma | hz2pi
    gamma_hz2pi: 1.0e9      # required for hz2pi
    sweeps:
      - name: fig4b
        base: {delta: 0, u_kerr: 1, eps: 1.0e6, g2: crit}
        axes:
          - {name: eps, scale: log, start: 1.0e3, stop: 1.0e7, count: 41}
        outputs: [steady, noise, snr]
        branch_policy: lowest     # optional
        rel_step: 1.0e-3          # optional
        json_mirror: false        # optional

Unknown keys are errors. Every error carries the offending field and line.
"""
from __future__ import annotations

from pathlib import Path

import yaml

from .errors import ConfigError, ParameterError
from .params import CavityParams, UnitConvention
from .sweep import Axis, SweepSpec

__all__ = ["load_config", "parse_config"]

_TOP_KEYS = {"units", "gamma_hz2pi", "sweeps"}
_SWEEP_KEYS = {"name", "base", "axes", "outputs", "branch_policy", "rel_step", "json_mirror"}
_BASE_KEYS = {"delta", "u_kerr", "eps", "g2"}
_AXIS_KEYS = {"name", "scale", "start", "stop", "count", "values"}


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def _mapping(node: yaml.Node, field: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("expected a mapping", line=_line(node), field=field)
    out = {}
    for key_node, value_node in node.value:
        key = key_node.value
        path = f"{field}.{key}" if field else key
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", line=_line(key_node), field=path)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", line=_line(key_node), field=path)
        out[key] = value_node
    for key in sorted(required - out.keys()):
        raise ConfigError(f"missing required key {key!r}", line=_line(node), field=f"{field}.{key}" if field else key)
    return out


def _scalar(node: yaml.Node, field: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("expected a scalar", line=_line(node), field=field)
    return node.value


def _number(node: yaml.Node, field: str) -> float:
    text = _scalar(node, field)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", line=_line(node), field=field) from None


def _integer(node: yaml.Node, field: str) -> int:
    value = _number(node, field)
    if value != int(value):
        raise ConfigError(f"expected an integer, got {value!r}", line=_line(node), field=field)
    return int(value)


def _boolean(node: yaml.Node, field: str) -> bool:
    text = _scalar(node, field).lower()
    if text in ("true", "yes", "on"):
        return True
    if text in ("false", "no", "off"):
        return False
    raise ConfigError(f"expected true or false, got {text!r}", line=_line(node), field=field)


def _sequence(node: yaml.Node, field: str) -> list[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError("expected a list", line=_line(node), field=field)
    return list(node.value)


def _axis(node: yaml.Node, field: str) -> Axis:
    keys = _mapping(node, field, _AXIS_KEYS, {"name"})
    name = _scalar(keys["name"], f"{field}.name")
    kw = {"name": name}
    if "values" in keys:
        extra = sorted(set(keys) - {"name", "values"})
        if extra:
            raise ConfigError(f"'values' excludes {extra}", line=_line(keys[extra[0]]), field=f"{field}.{extra[0]}")
        kw["values"] = tuple(_number(v, f"{field}.values") for v in _sequence(keys["values"], f"{field}.values"))
    else:
        for k in ("start", "stop", "count"):
            if k not in keys:
                raise ConfigError(f"missing required key {k!r}", line=_line(node), field=f"{field}.{k}")
        kw["scale"] = _scalar(keys["scale"], f"{field}.scale") if "scale" in keys else "linear"
        kw["start"] = _number(keys["start"], f"{field}.start")
        kw["stop"] = _number(keys["stop"], f"{field}.stop")
        kw["count"] = _integer(keys["count"], f"{field}.count")
    try:
        return Axis(**kw)
    except ParameterError as exc:
        sub = f"{field}.{exc.field}" if exc.field else field
        line = _line(keys[exc.field]) if exc.field in keys else _line(node)
        raise ConfigError(str(exc), line=line, field=sub) from None


def _base(node: yaml.Node, field: str, units: UnitConvention, gamma_hz: float | None) -> CavityParams:
    keys = _mapping(node, field, _BASE_KEYS)
    gamma = gamma_hz if units is UnitConvention.HZ_OVER_2PI else 1.0
    values = {}
    for k, v in keys.items():
        if k == "g2" and isinstance(v, yaml.ScalarNode) and v.value == "crit":
            values[k] = gamma / 4.0
        else:
            values[k] = _number(v, f"{field}.{k}")
    try:
        return CavityParams(gamma=gamma, **values)
    except ParameterError as exc:
        line = _line(keys[exc.field]) if exc.field in keys else _line(node)
        raise ConfigError(str(exc), line=line, field=f"{field}.{exc.field}") from None


def _sweep(node: yaml.Node, field: str, units: UnitConvention, gamma_hz: float | None) -> SweepSpec:
    keys = _mapping(node, field, _SWEEP_KEYS, {"name", "base", "outputs"})
    name = _scalar(keys["name"], f"{field}.name")
    if not name or "/" in name or name.startswith("."):
        raise ConfigError(f"sweep name {name!r} is not a plain file stem", line=_line(keys["name"]), field=f"{field}.name")
    base = _base(keys["base"], f"{field}.base", units, gamma_hz)
    axes = ()
    if "axes" in keys:
        items = _sequence(keys["axes"], f"{field}.axes")
        axes = tuple(_axis(a, f"{field}.axes[{i}]") for i, a in enumerate(items))
    outputs = tuple(_scalar(o, f"{field}.outputs") for o in _sequence(keys["outputs"], f"{field}.outputs"))
    kw = {}
    if "branch_policy" in keys:
        kw["branch_policy"] = _scalar(keys["branch_policy"], f"{field}.branch_policy")
    if "rel_step" in keys:
        kw["rel_step"] = _number(keys["rel_step"], f"{field}.rel_step")
    if "json_mirror" in keys:
        kw["json_mirror"] = _boolean(keys["json_mirror"], f"{field}.json_mirror")
    try:
        return SweepSpec(name=name, units=units, base=base, axes=axes, outputs=outputs, gamma_hz=gamma_hz, **kw)
    except ParameterError as exc:
        key = exc.field if exc.field in keys else ("outputs" if "output" in str(exc) else None)
        line = _line(keys[key]) if key else _line(node)
        raise ConfigError(str(exc), line=line, field=f"{field}.{key or exc.field or ''}".rstrip(".")) from None


def parse_config(text: str) -> list[SweepSpec]:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {getattr(exc, 'problem', exc)}", line=mark.line + 1 if mark else None) from None
    if root is None:
        raise ConfigError("config is empty", line=1)
    keys = _mapping(root, "", _TOP_KEYS, {"units", "sweeps"})
    try:
        units = UnitConvention.parse(_scalar(keys["units"], "units"))
    except ValueError as exc:
        raise ConfigError(str(exc), line=_line(keys["units"]), field="units") from None
    gamma_hz = None
    if "gamma_hz2pi" in keys:
        gamma_hz = _number(keys["gamma_hz2pi"], "gamma_hz2pi")
        if not gamma_hz > 0.0:
            raise ConfigError("gamma_hz2pi must be > 0", line=_line(keys["gamma_hz2pi"]), field="gamma_hz2pi")
    elif units is UnitConvention.HZ_OVER_2PI:
        raise ConfigError("hz2pi units need gamma_hz2pi", line=_line(keys["units"]), field="gamma_hz2pi")
    items = _sequence(keys["sweeps"], "sweeps")
    if not items:
        raise ConfigError("no sweeps defined", line=_line(keys["sweeps"]), field="sweeps")
    specs = [_sweep(s, f"sweeps[{i}]", units, gamma_hz) for i, s in enumerate(items)]
    names = [s.name for s in specs]
    dup = next((n for n in names if names.count(n) > 1), None)
    if dup:
        raise ConfigError(f"sweep name {dup!r} is used twice", line=_line(keys["sweeps"]), field="sweeps")
    return specs


def load_config(path: str | Path) -> list[SweepSpec]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
