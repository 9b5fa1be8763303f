"""Flat ``key = value`` config text with ``#`` comments.

Shared by the solver configs, the CLI and the reports.  Values stay strings
here; callers coerce them.  Rationals are written ``p/q``.
"""
from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple


class ConfigParseError(ValueError):
    pass


def parse_kv(text: str, source: str = "<config>") -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not key or not key.replace("_", "").isalnum():
            raise ConfigParseError(f"{source}:{lineno}: bad key {key!r}")
        if key in out:
            raise ConfigParseError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def format_kv(items: Mapping[str, object]) -> str:
    """Canonical text: sorted keys, one per line, trailing newline."""
    return "".join(f"{k} = {items[k]}\n" for k in sorted(items))


def config_hash(items: Mapping[str, object]) -> str:
    return hashlib.sha256(format_kv(items).encode("utf-8")).hexdigest()[:16]


def as_fraction(val: str, key: str) -> Fraction:
    try:
        return Fraction(val.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigParseError(f"{key}: not a rational: {val!r}") from exc


def as_float(val: str, key: str) -> float:
    try:
        return float(Fraction(val.strip())) if "/" in val else float(val)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigParseError(f"{key}: not a number: {val!r}") from exc


def as_int(val: str, key: str) -> int:
    try:
        return int(val)
    except ValueError as exc:
        raise ConfigParseError(f"{key}: not an integer: {val!r}") from exc


def as_floats(val: str, key: str) -> Tuple[float, ...]:
    if not val.strip():
        return ()
    return tuple(as_float(x, key) for x in val.split(","))


def fmt_float(x: float) -> str:
    # repr round-trips exactly, so the canonical text (and hash) is stable
    return repr(float(x))


def fmt_floats(xs: Iterable[float]) -> str:
    return ",".join(fmt_float(x) for x in xs)
