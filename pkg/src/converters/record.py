"""
Run records: JSON summaries and CSV residual histories.
"""

import csv
import json
import math
from pathlib import Path
from typing import Optional

from rich.console import Console

console = Console()


def _clean(value):
    """Make floats JSON-safe (inf/nan become strings)."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return _clean(value.item())
    return value


def write_json(data: dict, path: Path) -> Optional[Path]:
    """Write an indented JSON record; returns None if writing failed."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_clean(data), f, indent=2)
        return path
    except (OSError, TypeError) as e:
        console.print(f"[red]✗ Could not write {path.name}: {e}[/red]")
        return None


def residual_rows(run) -> list:
    """(t, iteration, residual) rows of a SolveRun, in path order."""
    rows = []
    for point in run.path:
        for iteration, value in enumerate(point.residual_history):
            rows.append((point.t, iteration, value))
    return rows


def write_residual_csv(rows: list, path: Path, header: tuple = ("t", "iteration", "residual")) -> Optional[Path]:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow([f"{item:.17g}" if isinstance(item, float) else item for item in row])
        return path
    except OSError as e:
        console.print(f"[red]✗ Could not write {path.name}: {e}[/red]")
        return None


def write_run_artifacts(run, out_dir: Path, n: int) -> list:
    """record.json, residuals.csv and u.bin (+ u.meta) for a finished solve."""
    from .snapshot import write_snapshot

    out_dir = Path(out_dir)
    written = [
        write_json(run.to_dict(), out_dir / "record.json"),
        write_residual_csv(residual_rows(run), out_dir / "residuals.csv"),
    ]
    if run.u is not None:
        written.append(
            write_snapshot(run.u, out_dir / "u.bin", n, "u", run.problem, run.operator, {"b": f"{run.b:.17g}"})
        )
    return [path for path in written if path is not None]
