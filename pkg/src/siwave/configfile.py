"""Plain-text run configuration: parsing, overrides, validation, manifest echo.

Format: INI-like sections [model], [grid], [time], [initial], [newton],
[output], [mms].  Keys are `key = value`; `#` or `;` start comment lines.
Unknown sections or keys are rejected with their line number.  The bump key in
[initial] may repeat (one bump per line, `amplitude, center, radius`); every
other key appears at most once.
"""

from __future__ import annotations

import copy

from .core import Grid1D, ModelParams, make_params, make_params_delta1
from .driver import DEFAULT_BLOWUP_GUARD, MANUFACTURED, REFINE_MODES, RunConfig
from .initcond import BumpSpec, InitialData
from .newton import NewtonConfig


class ConfigError(ValueError):
    """Invalid configuration; carries the offending line when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


def _parse_float(text: str, where: str, lineno: int | None) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}", lineno) from None


def _parse_int(text: str, where: str, lineno: int | None) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {text!r}", lineno) from None


_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_bool(text: str, where: str, lineno: int | None) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"{where}: expected a boolean, got {text!r}", lineno) from None


def _parse_float_list(text: str, where: str, lineno: int | None) -> list[float]:
    text = text.strip()
    if not text:
        return []
    return [_parse_float(part.strip(), where, lineno) for part in text.split(",")]


def _parse_bump(text: str, where: str, lineno: int | None) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(
            f"{where}: expected 'amplitude, center, radius', got {text!r}", lineno
        )
    a, c, r = (_parse_float(p, where, lineno) for p in parts)
    return a, c, r


def _choice(options: tuple[str, ...]):
    def parse(text: str, where: str, lineno: int | None) -> str:
        value = text.strip().lower()
        if value not in options:
            raise ConfigError(
                f"{where}: expected one of {', '.join(options)}, got {text!r}", lineno
            )
        return value

    return parse


SCHEMA = {
    "model": {
        "mu": _parse_float,
        "p": _parse_float,
        "theta": _parse_float,
        "nu_squared": _parse_float,
    },
    "grid": {
        "s": _parse_int,
        "dx": _parse_float,
    },
    "time": {
        "dt": _parse_float,
        "t_final": _parse_float,
        "snapshots": _parse_float_list,
        "blowup_guard": _parse_float,
    },
    "initial": {
        "bump": _parse_bump,
    },
    "newton": {
        "epsilon": _parse_float,
        "fd_step": _parse_float,
        "max_iters": _parse_int,
        "reuse_jacobian": _parse_bool,
    },
    "output": {
        "scheme": _choice(("gfem", "fdm", "both")),
        "emit_physical": _parse_bool,
    },
    "mms": {
        "solution": _choice(tuple(sorted(MANUFACTURED))),
        "refine": _choice(REFINE_MODES),
    },
}

SECTION_ORDER = ("model", "grid", "time", "initial", "newton", "output", "mms")

REQUIRED = (("model", "mu"), ("model", "p"), ("model", "theta"),
            ("time", "dt"), ("time", "t_final"))

Sections = dict


def empty_sections() -> Sections:
    return {name: {} for name in SECTION_ORDER} | {"initial": {"bump": []}}


def parse_config_text(text: str) -> Sections:
    """Parse and type-check a config document; raises ConfigError with line numbers."""
    sections = empty_sections()
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in SCHEMA:
                raise ConfigError(f"unknown section [{name}]", lineno)
            current = name
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside any [section]", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in SCHEMA[current]:
            raise ConfigError(f"unknown key {key!r} in section [{current}]", lineno)
        where = f"[{current}] {key}"
        parsed = SCHEMA[current][key](value, where, lineno)
        if current == "initial" and key == "bump":
            sections["initial"]["bump"].append(parsed)
        elif key in sections[current]:
            raise ConfigError(f"duplicate key {key!r} in section [{current}]", lineno)
        else:
            sections[current][key] = parsed
    return sections


def load_config(path) -> Sections:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read())


def apply_overrides(sections: Sections, assignments: list[str]) -> Sections:
    """Apply `section.key=value` overrides; they beat file values outright."""
    out = copy.deepcopy(sections)
    for item in assignments:
        key_part, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        section, dot, key = key_part.strip().lower().partition(".")
        if not dot or section not in SCHEMA:
            raise ConfigError(f"override {item!r}: unknown section {section!r}")
        if key not in SCHEMA[section]:
            raise ConfigError(
                f"override {item!r}: unknown key {key!r} in section [{section}]"
            )
        where = f"override [{section}] {key}"
        if section == "initial" and key == "bump":
            groups = [g.strip() for g in value.split(";") if g.strip()]
            out["initial"]["bump"] = [_parse_bump(g, where, None) for g in groups]
        else:
            out[section][key] = SCHEMA[section][key](value.strip(), where, None)
    return out


def resolve(sections: Sections) -> Sections:
    """Fill defaults and normalize; the result is what the manifest echoes."""
    out = copy.deepcopy(sections)
    for section, key in REQUIRED:
        if key not in out[section]:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
    grid = out["grid"]
    if "s" in grid and "dx" in grid:
        raise ConfigError("give either grid s or grid dx, not both")
    if "dx" in grid:
        try:
            grid["s"] = Grid1D.from_spacing(grid.pop("dx")).n_cells
        except ValueError as err:
            raise ConfigError(str(err)) from None
    if "s" not in grid:
        raise ConfigError("missing required key 's' (or 'dx') in section [grid]")
    time = out["time"]
    time.setdefault("snapshots", [time["t_final"]])
    time.setdefault("blowup_guard", DEFAULT_BLOWUP_GUARD)
    newton = out["newton"]
    newton.setdefault("epsilon", NewtonConfig.epsilon)
    newton.setdefault("max_iters", NewtonConfig.max_iters)
    newton.setdefault("reuse_jacobian", NewtonConfig.reuse_jacobian)
    output = out["output"]
    output.setdefault("scheme", "both")
    output.setdefault("emit_physical", True)
    mms = out["mms"]
    mms.setdefault("solution", "standing_wave")
    mms.setdefault("refine", "joint")
    return out


def _build_params(model: dict) -> ModelParams:
    if model.get("nu_squared") is None:
        return make_params_delta1(model["mu"], model["p"], model["theta"])
    return make_params(model["mu"], model["nu_squared"], model["p"], model["theta"])


def build_run_config(resolved: Sections) -> RunConfig:
    """Construct and validate the RunConfig described by a resolved document."""
    try:
        params = _build_params(resolved["model"])
        grid = Grid1D(resolved["grid"]["s"])
        bumps = tuple(BumpSpec(*triple) for triple in resolved["initial"]["bump"])
        newton = NewtonConfig(
            epsilon=resolved["newton"]["epsilon"],
            fd_step=resolved["newton"].get("fd_step"),
            max_iters=resolved["newton"]["max_iters"],
            reuse_jacobian=resolved["newton"]["reuse_jacobian"],
        )
        config = RunConfig(
            scheme=resolved["output"]["scheme"],
            params=params,
            grid=grid,
            dt=resolved["time"]["dt"],
            t_final=resolved["time"]["t_final"],
            initial=InitialData(bumps=bumps),
            snapshot_times=tuple(resolved["time"]["snapshots"]),
            newton=newton,
            emit_physical=resolved["output"]["emit_physical"],
            blowup_guard=resolved["time"]["blowup_guard"],
        )
        config.validate()
    except ValueError as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(str(err)) from err
    return config


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, list):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def manifest_text(resolved: Sections) -> str:
    """Echo the winning configuration as a reloadable document."""
    lines = ["# resolved run configuration"]
    for section in SECTION_ORDER:
        body = resolved.get(section, {})
        lines.append("")
        lines.append(f"[{section}]")
        if section == "initial":
            for bump in body.get("bump", []):
                lines.append(f"bump = {_fmt(list(bump))}")
            continue
        for key in SCHEMA[section]:
            if key in body and body[key] is not None:
                lines.append(f"{key} = {_fmt(body[key])}")
    return "\n".join(lines) + "\n"
