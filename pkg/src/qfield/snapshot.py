"""QMX1 binary snapshots.

Layout (all little-endian)::

    b"QMX1"              magic
    u32                  format version (1)
    u32 u32 u32          nx ny nz
    u32                  field count
    field count x u8     tags: b"T", b"E", b"B", b"r" (rho), b"J", b"U", b"A"
    payload              f64 arrays in tag order, x index fastest;
                         vector fields (E, B, J, A) as three consecutive
                         component arrays

The payload length is fully determined by the header, so a truncated or
padded file is rejected with the expected and actual byte counts.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["MAGIC", "VERSION", "TAGS", "Snapshot", "SnapshotError", "write_snapshot", "read_snapshot",
           "encode", "decode"]

MAGIC = b"QMX1"
VERSION = 1
TAGS = {"T": 1, "E": 3, "B": 3, "rho": 1, "J": 3, "U": 1, "A": 3}
_BYTE = {"T": b"T", "E": b"E", "B": b"B", "rho": b"r", "J": b"J", "U": b"U", "A": b"A"}
_NAME = {v: k for k, v in _BYTE.items()}
_HEAD = struct.Struct("<4sIIIII")


class SnapshotError(ValueError):
    """Malformed snapshot file."""


@dataclass
class Snapshot:
    """Named fields on an ``(nx, ny, nz)`` grid; insertion order is file order."""

    shape: tuple[int, int, int]
    fields: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        for name, arr in self.fields.items():
            self._check(name, arr)

    def _check(self, name: str, arr: np.ndarray) -> None:
        if name not in TAGS:
            raise SnapshotError(f"unknown field {name!r}; expected one of {sorted(TAGS)}")
        want = self.shape if TAGS[name] == 1 else (3, *self.shape)
        if arr.shape != want:
            raise SnapshotError(f"field {name} has shape {arr.shape}, expected {want}")

    def add(self, name: str, arr: np.ndarray) -> None:
        arr = np.asarray(arr, dtype=np.float64)
        self._check(name, arr)
        self.fields[name] = arr

    def __eq__(self, other) -> bool:
        # bit-exact comparison, so NaN payloads compare by representation
        if not isinstance(other, Snapshot) or self.shape != other.shape:
            return False
        if list(self.fields) != list(other.fields):
            return False
        return all(a.tobytes() == other.fields[k].tobytes() for k, a in self.fields.items())

    @classmethod
    def from_state(cls, F, sources=None) -> Snapshot:
        snap = cls(F.grid.shape)
        snap.add("T", F.T)
        snap.add("E", F.E)
        snap.add("B", F.B)
        if sources is not None and getattr(sources, "rho", None) is not None:
            snap.add("rho", sources.rho)
            snap.add("J", sources.J)
        return snap


def _payload_bytes(shape, tags) -> int:
    cells = shape[0] * shape[1] * shape[2]
    return 8 * cells * sum(TAGS[t] for t in tags)


def encode(snap: Snapshot) -> bytes:
    nx, ny, nz = snap.shape
    parts = [_HEAD.pack(MAGIC, VERSION, nx, ny, nz, len(snap.fields))]
    parts.append(b"".join(_BYTE[name] for name in snap.fields))
    for arr in snap.fields.values():
        comps = arr[None] if arr.ndim == 3 else arr
        for comp in comps:
            parts.append(np.asarray(comp, dtype="<f8").tobytes(order="F"))
    return b"".join(parts)


def decode(data: bytes) -> Snapshot:
    if len(data) < _HEAD.size:
        raise SnapshotError(f"file too short for header: expected at least {_HEAD.size} bytes, got {len(data)}")
    magic, version, nx, ny, nz, count = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported format version {version}")
    if min(nx, ny, nz) < 1:
        raise SnapshotError(f"invalid dimensions {nx}x{ny}x{nz}")
    off = _HEAD.size
    if len(data) < off + count:
        raise SnapshotError(f"truncated tag list: expected at least {off + count} bytes, got {len(data)}")
    tags = []
    for b in data[off:off + count]:
        name = _NAME.get(bytes([b]))
        if name is None:
            raise SnapshotError(f"unknown field tag {bytes([b])!r}")
        tags.append(name)
    if len(set(tags)) != len(tags):
        raise SnapshotError(f"duplicate field tags {tags}")
    off += count
    shape = (nx, ny, nz)
    expected = off + _payload_bytes(shape, tags)
    if len(data) != expected:
        raise SnapshotError(f"payload size mismatch: expected {expected} bytes, got {len(data)}")
    snap = Snapshot(shape)
    cells = nx * ny * nz
    for name in tags:
        comps = []
        for _ in range(TAGS[name]):
            flat = np.frombuffer(data, dtype="<f8", count=cells, offset=off)
            comps.append(flat.reshape(shape, order="F").astype(np.float64))
            off += 8 * cells
        arr = comps[0] if TAGS[name] == 1 else np.stack(comps)
        snap.fields[name] = np.ascontiguousarray(arr)
    return snap


def write_snapshot(path: str | Path, snap: Snapshot) -> None:
    Path(path).write_bytes(encode(snap))


def read_snapshot(path: str | Path) -> Snapshot:
    return decode(Path(path).read_bytes())
