"""CSV result tables and JSON run manifests."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import UNITS, ResultTable


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_table(table: ResultTable) -> str:
    """CSV text: ``#`` provenance lines, the column header, then rows at 17 significant digits."""
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in table.metadata.items()]
    lines.append("# units: " + ",".join(table.units))
    lines.append(",".join(table.columns))
    rows = np.atleast_2d(table.rows)
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def read_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    columns = lines[0].split(",")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return columns, rows.reshape(-1, len(columns))


def manifest_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".manifest.json")


def write_results(
    table: ResultTable,
    path: str | Path,
    config: dict | None = None,
    config_file: str | Path | None = None,
) -> Path:
    """Write ``table`` as CSV at ``path`` plus a JSON manifest next to it."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(format_table(table))
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err}") from err

    manifest = {
        "code_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "units": UNITS,
        "results_file": path.name,
        "n_rows": int(np.atleast_2d(table.rows).shape[0]),
        "columns": table.columns,
        "metadata": table.metadata,
        "wall_clock_s": table.timings,
        "config": config,
    }
    if config_file is not None:
        manifest["config_file"] = str(config_file)
        manifest["config_file_sha256"] = hashlib.sha256(Path(config_file).read_bytes()).hexdigest()
    mpath = manifest_path(path)
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return mpath
