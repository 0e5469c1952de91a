"""CLI utilities: logging setup, configuration loading and atomic report writing."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
from uuid import uuid4

from pydantic import ValidationError
import pandas as pd

from mwmw.configs.settings import app_config
from mwmw.errors import ConfigError
from mwmw.schemas.run_config import RunConfig


GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
BOLD = "\033[1m"
RESET = "\033[0m"

PRESETS_DIR = Path(__file__).resolve().parents[1] / "presets"


def setup_file_logging(log_file: Path, level: str = "INFO") -> None:
    """Configure file-only logging for the CLI."""
    log_file.parent.mkdir(parents=True, exist_ok=True)
    log_file.touch(exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        handlers=[logging.FileHandler(log_file, encoding="utf-8")],
        force=True,
    )


def preset_names() -> List[str]:
    return sorted(p.stem for p in PRESETS_DIR.glob("*.json"))


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_set_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply ``dotted.path=value`` overrides in order; values are parsed as JSON when possible.

    Examples
    --------
    >>> apply_set_overrides({"run": {"s": 1.0}}, ["run.s=0", "output.format=json"])
    {'run': {'s': 0}, 'output': {'format': 'json'}}
    """
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {item!r} is not of the form key=value")
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override {item!r}: {part!r} is not a section")
            node = child
        node[parts[-1]] = _parse_value(raw)
    return data


def load_config(ref: str, overrides: Sequence[str] = ()) -> RunConfig:
    """Load a run configuration from a JSON path or a preset name.

    Raises
    ------
    ConfigError
        If the file cannot be read or the configuration does not validate.
    """
    path = Path(ref)
    if not path.is_file():
        preset = PRESETS_DIR / f"{ref}.json"
        if not preset.is_file():
            raise ConfigError(f"no config file or preset named {ref!r}. Presets: {preset_names()}")
        path = preset
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    data = apply_set_overrides(data, overrides)
    try:
        config = RunConfig(**data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}:\n{exc}") from exc
    logging.info("Loaded config %s from %s", config.name, path)
    return config


def resolve_threads(threads: Optional[int]) -> int:
    """``--threads`` if given, else ``MWMW_THREADS``."""
    return max(1, int(threads)) if threads is not None else app_config.THREADS


def persist_atomic(path: Path, payload: str) -> Path:
    """Write ``payload`` to a temporary sibling of ``path`` and move it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.parent / f".{path.name}.{uuid4().hex}.tmp"
    try:
        tmp_path.write_text(payload, encoding="utf-8")
        os.replace(tmp_path, path)
    except Exception:
        logging.exception("Failed to persist %s", path)
        tmp_path.unlink(missing_ok=True)
        raise
    return path


def dump_json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def write_table(
    rows: List[Dict[str, Any]],
    out_dir: Path,
    stem: str,
    fmt: str,
    columns: Optional[List[str]] = None,
    meta: Optional[Dict[str, Any]] = None,
) -> List[Path]:
    """Write report rows as CSV (with a ``.meta.json`` sidecar) or as one JSON document.

    CSV floats carry 17 significant digits; JSON floats use the shortest text
    that reads back to the same double.
    """
    meta = meta or {}
    if fmt == "json":
        return [persist_atomic(out_dir / f"{stem}.json", dump_json({"meta": meta, "rows": rows}))]
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    df = pd.DataFrame(rows, columns=columns)
    text = df.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    written = [persist_atomic(out_dir / f"{stem}.csv", text)]
    if meta:
        written.append(persist_atomic(out_dir / f"{stem}.meta.json", dump_json(meta)))
    return written


def status(passed: Optional[bool]) -> str:
    if passed is None:
        return f"{YELLOW}SKIP{RESET}"
    return f"{GREEN}PASS{RESET}" if passed else f"{RED}FAIL{RESET}"
