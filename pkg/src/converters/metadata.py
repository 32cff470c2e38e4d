"""
Sidecar metadata for field snapshots.
Plain ``key = value`` text, one entry per line, written next to the binary file.
"""

from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from ..constants import APP_NAME, APP_VERSION


def generate_metadata(
    name: str,
    n: int,
    N: int,
    count: int,
    problem: Optional[str] = None,
    operator: Optional[str] = None,
    extra: Optional[dict] = None,
) -> str:
    """
    Generate sidecar metadata text for a snapshot.

    Args:
        name: Field name (u, psi, ...)
        n: Complex dimension
        N: Grid points per real axis
        count: Number of stored values
        problem: Optional problem name
        operator: Optional operator description
        extra: Optional additional key/value pairs

    Returns:
        Metadata text
    """
    entries = {
        "field": name,
        "n": n,
        "N": N,
        "count": count,
        "dtype": "float64",
        "order": "row-major",
        "axes": ",".join(f"{c}{i}" for i in range(1, n + 1) for c in "xy"),
    }
    if problem:
        entries["problem"] = problem
    if operator:
        entries["operator"] = operator
    for key, value in (extra or {}).items():
        entries[key] = value
    entries["writer"] = f"{APP_NAME} {APP_VERSION}"
    entries["written"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return "".join(f"{key} = {value}\n" for key, value in entries.items())


def read_metadata(path: Path) -> dict:
    """Parse a sidecar file back into a dictionary of strings."""
    data = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            data[key.strip()] = value.strip()
    return data
