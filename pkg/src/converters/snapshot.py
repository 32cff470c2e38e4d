"""
Binary field snapshots.

Layout: a 32-byte header (8-byte magic, then n, N and value count as
little-endian int64) followed by float64 values in row-major grid order.
A ``.meta`` sidecar carries human-readable metadata.
"""

import struct
from pathlib import Path
from typing import Optional

import numpy as np
from rich.console import Console

from ..constants import SNAPSHOT_HEADER_SIZE, SNAPSHOT_MAGIC
from ..errors import ArgumentError
from .metadata import generate_metadata

console = Console()

HEADER_FORMAT = "<8sqqq"


def write_snapshot(
    values: np.ndarray,
    path: Path,
    n: int,
    name: str = "u",
    problem: Optional[str] = None,
    operator: Optional[str] = None,
    extra: Optional[dict] = None,
) -> Optional[Path]:
    """
    Write a basic scalar field and its sidecar.

    Returns:
        Path to the binary file, or None if writing failed
    """
    values = np.ascontiguousarray(values, dtype="<f8")
    N = values.shape[0] if values.ndim else 0
    if values.ndim != 2 * n or any(size != N for size in values.shape):
        raise ArgumentError(f"field of shape {values.shape} is not an N^{2 * n} grid")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(struct.pack(HEADER_FORMAT, SNAPSHOT_MAGIC, n, N, values.size))
            f.write(values.tobytes(order="C"))
        meta = generate_metadata(name, n, N, values.size, problem, operator, extra)
        path.with_suffix(".meta").write_text(meta, encoding="utf-8")
        return path
    except OSError as e:
        console.print(f"[red]✗ Snapshot write failed: {e}[/red]")
        return None


def read_snapshot(path: Path) -> np.ndarray:
    """Read a snapshot back into an array of shape (N,) * 2n."""
    raw = Path(path).read_bytes()
    if len(raw) < SNAPSHOT_HEADER_SIZE:
        raise ArgumentError(f"{path} is too short to be a snapshot")
    magic, n, N, count = struct.unpack(HEADER_FORMAT, raw[:SNAPSHOT_HEADER_SIZE])
    if magic != SNAPSHOT_MAGIC:
        raise ArgumentError(f"{path} is not a field snapshot (magic {magic!r})")
    if count != N ** (2 * n) or len(raw) != SNAPSHOT_HEADER_SIZE + 8 * count:
        raise ArgumentError(f"{path} header does not match its payload")
    data = np.frombuffer(raw, dtype="<f8", offset=SNAPSHOT_HEADER_SIZE, count=count)
    return data.reshape((N,) * (2 * n)).copy()
