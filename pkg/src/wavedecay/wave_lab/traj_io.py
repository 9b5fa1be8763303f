"""Binary trajectory container.

Layout (all text ASCII, lines end in ``\\n``)::

    WAVEDECAY-TRAJECTORY 1
    endian little
    dtype float64
    n_snapshots <m>
    n_points <n+1>
    fields phi,dt_phi
    config_bytes <k>
    <k bytes of canonical key = value config text>
    END
    <m blocks, each phi[0..n] then dt_phi[0..n], float64 little-endian>

The companion index ``<path>.idx`` lists snapshot times, one ``repr`` per
line, preceded by a ``# index snapshot time`` header.  Files are
byte-identical for identical configs.
"""
from __future__ import annotations

import os
from typing import List, Union

import numpy as np

from .config import SimConfig
from .solver import Trajectory

MAGIC = b"WAVEDECAY-TRAJECTORY 1\n"
_DTYPE = np.dtype("<f8")


def index_path(path) -> str:
    return os.fspath(path) + ".idx"


def save_trajectory(traj: Trajectory, path: Union[str, os.PathLike]) -> List[str]:
    """Write the container and its index; returns both paths."""
    cfg_text = traj.config.to_text().encode("ascii")
    m, n = traj.phi.shape
    header = b"".join([
        MAGIC, b"endian little\n", b"dtype float64\n",
        f"n_snapshots {m}\n".encode(), f"n_points {n}\n".encode(),
        b"fields phi,dt_phi\n", f"config_bytes {len(cfg_text)}\n".encode(),
        cfg_text, b"END\n",
    ])
    body = np.stack([traj.phi, traj.dt_phi], axis=1).astype(_DTYPE, copy=False)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(body).tobytes())
    idx = index_path(path)
    with open(idx, "w", encoding="ascii", newline="\n") as fh:
        fh.write("# index snapshot time\n")
        for i, t in enumerate(traj.times):
            fh.write(f"{i} {float(t)!r}\n")
    return [os.fspath(path), idx]


def _line(fh) -> str:
    line = fh.readline()
    if not line.endswith(b"\n"):
        raise ValueError("truncated trajectory header")
    return line[:-1].decode("ascii")


def load_trajectory(path: Union[str, os.PathLike]) -> Trajectory:
    with open(path, "rb") as fh:
        if fh.readline() != MAGIC:
            raise ValueError(f"{path}: not a trajectory file")
        meta = {}
        for _ in range(5):
            key, _, val = _line(fh).partition(" ")
            meta[key] = val
        if meta.get("endian") != "little" or meta.get("dtype") != "float64":
            raise ValueError(f"{path}: unsupported encoding {meta}")
        key, _, val = _line(fh).partition(" ")
        if key != "config_bytes":
            raise ValueError(f"{path}: malformed header")
        cfg_text = fh.read(int(val)).decode("ascii")
        if _line(fh) != "END":
            raise ValueError(f"{path}: malformed header")
        m, n = int(meta["n_snapshots"]), int(meta["n_points"])
        raw = np.frombuffer(fh.read(), dtype=_DTYPE)
    if raw.size != m * 2 * n:
        raise ValueError(f"{path}: expected {m * 2 * n} values, found {raw.size}")
    body = raw.reshape(m, 2, n).astype(float)
    cfg = SimConfig.from_text(cfg_text, os.fspath(path))
    times = _read_index(index_path(path), m)
    return Trajectory(cfg, times, body[:, 0].copy(), body[:, 1].copy())


def _read_index(path: str, m: int) -> np.ndarray:
    times = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            _, t = line.split()
            times.append(float(t))
    if len(times) != m:
        raise ValueError(f"{path}: {len(times)} times for {m} snapshots")
    return np.asarray(times)
