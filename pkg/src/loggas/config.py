"""Line-oriented run configuration.

Grammar::

    file     := (line "\\n")*
    line     := blank | comment | pair | section
    comment  := "#" text
    pair     := key "=" value
    section  := "[block]"

Keys before the first ``[block]`` are global.  Inside a block section only
``length`` (one integer) and ``row`` (repeated, one per matrix row) are
allowed.  A row lists the block's entries separated by ``;``; each entry is
a polynomial given by space-separated coefficients in increasing powers,
e.g. ``row = 1 ; 0 1`` is the row (1, x).  Lists are space-separated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import ConfigError

COMMANDS = ("canonical", "grand", "pfaffian", "debruijn-check", "verify")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split())


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _fmt_float(v: float) -> str:
    return repr(float(v))


KEYS: dict[str, tuple[Callable, Callable]] = {
    "command": (_choice(*COMMANDS), str),
    "domain": (_choice("line", "circle", "interval"), str),
    "charges": (_ints, lambda v: " ".join(map(str, v))),
    "populations": (_ints, lambda v: " ".join(map(str, v))),
    "total_charge": (int, str),
    "fugacities": (_floats, lambda v: " ".join(map(_fmt_float, v))),
    "potential": (_floats, lambda v: " ".join(map(_fmt_float, v))),
    "beta": (float, _fmt_float),
    "family": (_choice("monomial", "hermite"), str),
    "interval": (_floats, lambda v: " ".join(map(_fmt_float, v))),
    "tol_rel": (float, _fmt_float),
    "tol_abs": (float, _fmt_float),
    "nodes": (int, str),
    "max_depth": (int, str),
    "t_cut": (float, _fmt_float),
    "oracle_nodes": (int, str),
    "tolerance": (float, _fmt_float),
    "random_trials": (int, str),
}

QUAD_KEYS = ("tol_rel", "tol_abs", "nodes", "max_depth", "t_cut")
_COMMON = {"command", "family", "beta", "potential"} | set(QUAD_KEYS)
_ENSEMBLE = _COMMON | {"domain", "charges"}
SCHEMAS: dict[str, tuple[set, set]] = {
    # command: (allowed, required)
    "canonical": (_ENSEMBLE | {"populations"}, {"charges", "populations"}),
    "grand": (_ENSEMBLE | {"total_charge", "fugacities"}, {"charges", "total_charge"}),
    "pfaffian": (_ENSEMBLE | {"populations"}, {"charges", "populations"}),
    "verify": (_ENSEMBLE | {"populations", "total_charge", "fugacities", "oracle_nodes", "tolerance"},
               {"charges"}),
    "debruijn-check": ((_COMMON - {"family", "beta"}) | {"domain", "interval", "tolerance", "random_trials",
                                                          "oracle_nodes"}, set()),
}


@dataclass(frozen=True)
class Block:
    length: int
    rows: tuple  # rows[n][l] = coefficient tuple


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RunConfig) and self.command == other.command
                and self.values == other.values and self.blocks == other.blocks)


def _parse_row(text: str, lineno: int) -> tuple:
    entries = []
    for part in text.split(";"):
        try:
            coeffs = _floats(part)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad row entry {part.strip()!r}: {exc}") from None
        if not coeffs:
            raise ConfigError(f"line {lineno}: empty row entry")
        entries.append(coeffs)
    return tuple(entries)


def parse_config(text: str) -> RunConfig:
    """Parse and validate against the command's schema; raise ConfigError on any problem."""
    values: dict = {}
    blocks: list[dict] = []
    unknown: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[block]":
            blocks.append({"length": None, "rows": []})
            continue
        if line.startswith("["):
            raise ConfigError(f"line {lineno}: unknown section {line}")
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        if blocks:
            if key == "length":
                try:
                    blocks[-1]["length"] = int(value)
                except ValueError:
                    raise ConfigError(f"line {lineno}: block length must be an integer") from None
            elif key == "row":
                blocks[-1]["rows"].append(_parse_row(value, lineno))
            else:
                unknown.append(f"[block].{key}")
            continue
        if key not in KEYS:
            unknown.append(key)
            continue
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        try:
            values[key] = KEYS[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    if "command" not in values:
        raise ConfigError("missing key: command")
    command = values.pop("command")
    allowed, required = SCHEMAS[command]
    extra = sorted(set(values) - allowed)
    if extra:
        raise ConfigError(f"keys not accepted by {command}: {', '.join(extra)}")
    missing = sorted(required - set(values))
    if missing:
        raise ConfigError(f"missing keys for {command}: {', '.join(missing)}")
    parsed_blocks = []
    for i, b in enumerate(blocks, start=1):
        if b["length"] is None or b["length"] < 1:
            raise ConfigError(f"block {i}: positive length required")
        if any(len(r) != b["length"] for r in b["rows"]):
            raise ConfigError(f"block {i}: every row needs {b['length']} entries")
        parsed_blocks.append(Block(b["length"], tuple(b["rows"])))
    if parsed_blocks and command != "debruijn-check":
        raise ConfigError(f"[block] sections are only accepted by debruijn-check, not {command}")
    if command == "debruijn-check" and not parsed_blocks and not values.get("random_trials"):
        raise ConfigError("debruijn-check needs [block] sections or random_trials")
    if command == "verify" and "populations" not in values and "total_charge" not in values:
        raise ConfigError("verify needs populations or total_charge")
    return RunConfig(command, values, parsed_blocks)


def render_config(cfg: RunConfig) -> str:
    """Config text that parses back to ``cfg``."""
    lines = [f"command = {cfg.command}"]
    for key in KEYS:
        if key in cfg.values:
            lines.append(f"{key} = {KEYS[key][1](cfg.values[key])}")
    for b in cfg.blocks:
        lines.append("[block]")
        lines.append(f"length = {b.length}")
        for row in b.rows:
            lines.append("row = " + " ; ".join(" ".join(_fmt_float(c) for c in e) for e in row))
    return "\n".join(lines) + "\n"


def echo_inputs(cfg: RunConfig) -> dict:
    """Inputs section of a result document: rendered key strings plus block rows."""
    out = {"command": cfg.command}
    for key in KEYS:
        if key in cfg.values:
            out[key] = KEYS[key][1](cfg.values[key])
    if cfg.blocks:
        out["blocks"] = [{"length": b.length,
                          "rows": [" ; ".join(" ".join(_fmt_float(c) for c in e) for e in row) for row in b.rows]}
                         for b in cfg.blocks]
    return out


def inputs_to_text(inputs: dict) -> str:
    """Inverse of ``echo_inputs``: config text from an echoed inputs section."""
    lines = [f"command = {inputs['command']}"]
    for key, value in inputs.items():
        if key in ("command", "blocks"):
            continue
        lines.append(f"{key} = {value}")
    for b in inputs.get("blocks", []):
        lines.append("[block]")
        lines.append(f"length = {b['length']}")
        lines.extend(f"row = {r}" for r in b["rows"])
    return "\n".join(lines) + "\n"
