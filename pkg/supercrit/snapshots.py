"""
Self-describing binary snapshots of scalar fields.

Layout (little-endian): 8-byte magic b"SCFIELD\\0", uint32 version, 4 reserved
bytes, int64 N, float64 L, uint32 name length, name bytes (utf-8), then N*N
float64 values in row-major order. A text sidecar ``<stem>.meta.txt`` holds
the multiplier metadata and run notes as ``key: value`` lines.
"""

import struct
from pathlib import Path

import numpy as np

from supercrit.logging_config import loggers
from supercrit.spectral import Grid, SpectralField

logger = loggers['spectral']

MAGIC = b"SCFIELD\0"
VERSION = 1
HEADER = struct.Struct("<8sI4x")
GRID_HEADER = struct.Struct("<qdI")


def sidecar_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}.meta.txt")


def write_snapshot(path, field, metadata=None):
    """Write field to path and its metadata sidecar; returns the path"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    name = field.name.encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(HEADER.pack(MAGIC, VERSION))
        handle.write(GRID_HEADER.pack(field.grid.N, field.grid.L, len(name)))
        handle.write(name)
        handle.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C"))

    lines = [f"name: {field.name}", f"N: {field.grid.N}", f"L: {field.grid.L!r}"]
    for key, value in (metadata or {}).items():
        lines.append(f"{key}: {value}")
    sidecar_path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Wrote snapshot {path}")
    return path


def read_snapshot(path):
    """Read a field written by write_snapshot"""
    data = Path(path).read_bytes()
    if len(data) < HEADER.size + GRID_HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a supercrit field snapshot")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    N, L, name_length = GRID_HEADER.unpack_from(data, HEADER.size)
    offset = HEADER.size + GRID_HEADER.size
    name = data[offset:offset + name_length].decode("utf-8")
    offset += name_length
    expected = N * N * 8
    if len(data) - offset != expected:
        raise ValueError(f"{path}: expected {expected} value bytes, found {len(data) - offset}")
    values = np.frombuffer(data, dtype="<f8", count=N * N, offset=offset).reshape(N, N)
    return SpectralField(Grid(int(N), float(L)), values=values, name=name)


def read_sidecar(path):
    metadata = {}
    for line in sidecar_path(path).read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(": ")
        if key:
            metadata[key] = value
    return metadata
