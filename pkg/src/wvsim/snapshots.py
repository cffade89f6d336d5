"""Binary wave-function snapshots.

Layout (little-endian): magic "WVSIM1" (6 bytes), u8 N, u32 M, f64 L,
f64 t, then M^N (re, im) f64 pairs in row-major axis order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .grid import GridSpec, make_grid
from .state import WaveFunction

MAGIC = b"WVSIM1"
_HEADER = struct.Struct("<BIdd")  # N, M, L, t


def write_snapshot(path, psi: WaveFunction) -> None:
    grid = psi.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(
            _HEADER.pack(
                grid.n_particles, grid.points_per_axis, grid.half_width, psi.time
            )
        )
        fh.write(np.ascontiguousarray(psi.amplitudes, dtype="<c16").tobytes())


def read_snapshot(path, grid: GridSpec | None = None) -> WaveFunction:
    """Read a snapshot; validates magic and payload size.

    When ``grid`` is given it must match the stored geometry; otherwise a
    fresh GridSpec is built from the header.
    """
    blob = Path(path).read_bytes()
    if len(blob) < len(MAGIC) + _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    if blob[: len(MAGIC)] != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {blob[:len(MAGIC)]!r}")
    n, m, half_width, t = _HEADER.unpack_from(blob, len(MAGIC))
    payload = blob[len(MAGIC) + _HEADER.size :]
    expected = 16 * m**n
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    if grid is None:
        grid = make_grid(n, m, half_width)
    elif (grid.n_particles, grid.points_per_axis, grid.half_width) != (
        n,
        m,
        half_width,
    ):
        raise SnapshotFormatError(
            f"{path}: snapshot geometry (N={n}, M={m}, L={half_width}) does not "
            "match the supplied grid"
        )
    amps = np.frombuffer(payload, dtype="<c16").reshape((m,) * n).copy()
    return WaveFunction(amps, grid, t)
