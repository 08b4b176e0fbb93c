"""Rendering of result documents as ``key=value`` text or versioned YAML."""

from __future__ import annotations

import math

import yaml

SCHEMA = "cycleguess/v1"


def _round(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return x
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return _round(x.item())
    return x


def structured(doc: dict, command: str) -> str:
    body = {"schema": SCHEMA, "command": command, **_round(doc)}
    return yaml.safe_dump(body, sort_keys=False, default_flow_style=False, width=120)


def _flatten(prefix: str, value, out: list[str]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    elif isinstance(value, (list, tuple)):
        out.append(f"{prefix}=" + ",".join(str(_round(v)) for v in value))
    else:
        out.append(f"{prefix}={_round(value)}")


def text(doc: dict) -> str:
    out: list[str] = []
    _flatten("", _round(doc), out)
    return "\n".join(out) + "\n"


def render(doc: dict, command: str, fmt: str) -> str:
    return structured(doc, command) if fmt == "structured" else text(doc)
