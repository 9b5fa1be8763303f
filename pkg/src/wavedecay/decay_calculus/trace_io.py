"""Line-oriented text form of iteration traces.

One state per line::

    step=3 region=exterior phi=(4/5,0/1,0/1,0/1) dphi=(...) dbar=(...)

Lines starting with ``#`` carry metadata (``# key: value``) and are ignored
by :func:`parse_states`.  Tilts are not written; parsed exponents are plain
rationals.
"""
from __future__ import annotations

import io
import os
import re
from fractions import Fraction
from typing import Iterable, List, TextIO, Union

from .bounds import BoundState, DecayBound, Region
from .engine import IterationTrace

_LINE = re.compile(
    r"^step=(?P<step>\d+) region=(?P<region>\w+) "
    r"phi=\((?P<phi>[^)]*)\) dphi=\((?P<dphi>[^)]*)\) dbar=\((?P<dbar>[^)]*)\)\s*$")


def _bound(region: Region, body: str) -> DecayBound:
    parts = [Fraction(x) for x in body.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected four exponents, got {body!r}")
    return DecayBound.make(region, *parts)


def parse_state(line: str) -> BoundState:
    m = _LINE.match(line.strip())
    if not m:
        raise ValueError(f"not a trace line: {line!r}")
    region = Region(m["region"])
    return BoundState(_bound(region, m["phi"]), _bound(region, m["dphi"]),
                      _bound(region, m["dbar"]), int(m["step"]))


def parse_states(lines: Iterable[str]) -> List[BoundState]:
    out = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(parse_state(line))
    return out


def format_trace(trace: IterationTrace) -> str:
    buf = io.StringIO()
    buf.write(f"# region: {trace.region.value}\n")
    buf.write(f"# terminated: {str(trace.terminated).lower()}\n")
    if trace.switch_index is not None:
        buf.write(f"# switch_index: {trace.switch_index}\n")
    for st in trace.background:
        buf.write(f"# background: {st.line()}\n")
    for note in trace.notes:
        buf.write(f"# note: {note}\n")
    for st in trace.states:
        buf.write(st.line() + "\n")
    return buf.getvalue()


def write_trace(trace: IterationTrace, dest: Union[str, os.PathLike, TextIO]) -> None:
    text = format_trace(trace)
    if hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_states(src: Union[str, os.PathLike, TextIO]) -> List[BoundState]:
    if hasattr(src, "read"):
        return parse_states(src.read().splitlines())
    with open(src, encoding="utf-8") as fh:
        return parse_states(fh.read().splitlines())


def read_metadata(src: Union[str, os.PathLike]) -> dict:
    """``# key: value`` comment lines; repeated keys collect into lists."""
    meta: dict = {}
    with open(src, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#") or ":" not in line:
                continue
            key, _, val = line[1:].partition(":")
            key, val = key.strip(), val.strip()
            if key in meta:
                if not isinstance(meta[key], list):
                    meta[key] = [meta[key]]
                meta[key].append(val)
            else:
                meta[key] = val
    return meta


GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


def golden_path(region: Region, sigma: Fraction) -> str:
    sigma = Fraction(sigma)
    name = f"{region.value}_sigma_{sigma.numerator}_{sigma.denominator}.trace"
    return os.path.join(GOLDEN_DIR, name)


def load_golden(region: Region, sigma: Fraction) -> List[BoundState]:
    return read_states(golden_path(region, sigma))
