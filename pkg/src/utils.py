import io
import json
import logging
import os
import sys
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd

import config
from errors import ConfigError

logger = logging.getLogger(__name__)

LEVEL_COLUMNS = [
    "n", "l", "s", "nu", "eta_exact", "eta_rho0", "E_exact", "E_asym",
    "rel_err_eta", "asymptotic_unreliable", "eta_asym", "rho0",
]


######################## Level tables ##############################


def level_rows(levels: Iterable) -> list:
    """Flatten EnergyLevel objects into table rows (plain Python scalars)."""
    rows = []
    for level in levels:
        rows.append({
            "n": level.qn.n,
            "l": level.qn.l,
            "s": level.qn.s,
            "nu": level.nu,
            "eta_exact": level.eta_exact,
            "eta_rho0": level.eta_rho0,
            "E_exact": level.energy_exact,
            "E_asym": level.energy_asym,
            "rel_err_eta": level.rel_err_eta,
            "asymptotic_unreliable": bool(level.asymptotic_unreliable),
            "eta_asym": level.eta_asym,
            "rho0": level.rho0,
        })
    return rows


def levels_frame(levels: Iterable, sort_by_energy: bool = True) -> pd.DataFrame:
    frame = pd.DataFrame(level_rows(levels), columns=LEVEL_COLUMNS)
    if sort_by_energy:
        # stable sort on (E_exact, n, l, -s) keeps ties in a fixed order
        frame = frame.assign(_ms=-frame["s"]).sort_values(
            ["E_exact", "n", "l", "_ms"], kind="mergesort"
        ).drop(columns="_ms")
    return frame.reset_index(drop=True)


######################## Writing ##############################


def _native(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    return value


def render_table(frame: pd.DataFrame, fmt: str, meta: Optional[Dict[str, Any]] = None) -> str:
    """Serialise a table to text; identical inputs give identical bytes.

    CSV: optional '# key=value' metadata lines, then a mandatory header row.
    JSON: {"meta": {...}, "rows": [...]} with sorted keys and round-trip float repr.
    """
    meta = {key: _native(value) for key, value in (meta or {}).items()}
    if fmt == "csv":
        buffer = io.StringIO()
        for key in sorted(meta):
            value = meta[key]
            buffer.write(f"# {key}={config.FLOAT_FORMAT % value if isinstance(value, float) else value}\n")
        frame.to_csv(buffer, index=False, float_format=config.FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()
    if fmt == "json":
        rows = [{key: _native(value) for key, value in row.items()} for row in frame.to_dict(orient="records")]
        return json.dumps({"meta": meta, "rows": rows}, sort_keys=True, indent=2, allow_nan=True) + "\n"
    raise ConfigError(f"unknown output format {fmt!r}, expected one of {config.OUTPUT_FORMATS}")


def write_table(frame: pd.DataFrame, path: Optional[str], fmt: str, meta: Optional[Dict[str, Any]] = None) -> None:
    """Write to ``path`` or, when it is None or '-', to stdout."""
    text = render_table(frame, fmt, meta)
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("Wrote %d rows to %s", len(frame), path)


######################## Reading ##############################


def format_from_path(path: str, default: Optional[str] = "csv") -> Optional[str]:
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    return ext if ext in config.OUTPUT_FORMATS else default


def _parse_meta_value(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def read_table(path: str, fmt: Optional[str] = None) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Load a table written by write_table, returning (rows, metadata)."""
    fmt = fmt or format_from_path(path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if fmt == "json":
        data = json.loads(text)
        return pd.DataFrame(data["rows"]), data.get("meta", {})
    meta = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        meta[key] = _parse_meta_value(value)
    return pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip"), meta
