"""Point-cloud files (csv, xyz, json) and JSON reports, all written atomically."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .geometry import PointCloud

FORMATS = ("csv", "xyz", "json")


class CloudFormatError(ValueError):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return "%.17g" % v


def _infer(path, fmt: Optional[str]) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise CloudFormatError(f"unknown format {fmt!r}")
        return fmt
    ext = Path(path).suffix.lower().lstrip(".")
    return ext if ext in FORMATS else "csv"


def parse_cloud_text(text: str, fmt: str = "csv") -> PointCloud:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CloudFormatError(f"line {exc.lineno}: {exc.msg}") from exc
        pts = data["points"] if isinstance(data, dict) else data
        rows = [list(map(float, p)) for p in pts]
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise CloudFormatError("inconsistent point dimensions")
        if isinstance(data, dict) and "dim" in data and data["dim"] not in dims:
            raise CloudFormatError("declared dim does not match points")
        return PointCloud(np.array(rows, dtype=float))
    rows, dim = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",") if fmt == "csv" else line.split()
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise CloudFormatError(f"line {lineno}: cannot parse {raw!r}") from None
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise CloudFormatError(f"line {lineno}: expected {dim} coordinates, got {len(row)}")
        rows.append(row)
    if not rows:
        raise CloudFormatError("no points in file")
    return PointCloud(np.array(rows, dtype=float))


def load_cloud(path, fmt: Optional[str] = None) -> PointCloud:
    """Read a cloud; the format comes from the suffix unless ``fmt`` is given."""
    return parse_cloud_text(Path(path).read_text(encoding="utf-8"), _infer(path, fmt))


def format_cloud(cloud: PointCloud, fmt: str = "csv") -> str:
    # 17 significant digits round-trip every double exactly
    if fmt == "json":
        return json.dumps({"dim": cloud.dim, "points": cloud.points.tolist()}) + "\n"
    sep = "," if fmt == "csv" else " "
    return "".join(sep.join(_fmt(v) for v in p) + "\n" for p in cloud.points)


def save_cloud(cloud: PointCloud, path, fmt: Optional[str] = None) -> None:
    atomic_write(path, format_cloud(cloud, _infer(path, fmt)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def report_json(report: dict) -> str:
    body = {"tool": "mucrit", "version": __version__, **_jsonable(report)}
    return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"


def save_report(report: dict, path) -> None:
    atomic_write(path, report_json(report))
