"""File export: binary grid fields, CSV profiles and run reports.

Every writer goes through :func:`atomic_write`, so readers never see a
partially written file.
"""
import csv
import io
import json
import math
import os
import tempfile

import numpy as np

MAGIC = "MWFZP"
VERSION = 1
KINDS = ("real", "complex")


def atomic_write(path, data):
    """Write ``data`` (bytes or str) to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"{path}: parent directory does not exist")
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_field(field, dx):
    """Header line plus little-endian float64 payload, row-major."""
    a = np.asarray(field)
    if a.ndim != 2:
        raise ValueError("field must be two-dimensional")
    kind = "complex" if np.iscomplexobj(a) else "real"
    rows, cols = a.shape
    header = f"{MAGIC} {VERSION} {rows} {cols} {float(dx)!r} {kind}\n".encode("ascii")
    if kind == "complex":
        payload = np.ascontiguousarray(a, dtype="<c16").view("<f8")
    else:
        payload = np.ascontiguousarray(a, dtype="<f8")
    return header + payload.tobytes(order="C")


def export_field(field, path, dx=1.0):
    try:
        atomic_write(path, encode_field(field, dx))
    except OSError as exc:
        raise OSError(f"cannot write field to {path}: {exc}") from exc


def import_field(path):
    """Read a grid file; returns ``(array, dx)``."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        payload = fh.read()
    if len(header) != 6 or header[0] != MAGIC:
        raise ValueError(f"{path}: not a grid file")
    if int(header[1]) != VERSION:
        raise ValueError(f"{path}: unsupported version {header[1]}")
    rows, cols, dx, kind = int(header[2]), int(header[3]), float(header[4]), header[5]
    if kind not in KINDS:
        raise ValueError(f"{path}: unknown kind {kind!r}")
    values = np.frombuffer(payload, dtype="<f8")
    expected = rows * cols * (2 if kind == "complex" else 1)
    if values.size != expected:
        raise ValueError(f"{path}: expected {expected} values, found {values.size}")
    if kind == "complex":
        arr = values.view("<c16").reshape(rows, cols).astype(np.complex128)
    else:
        arr = values.reshape(rows, cols).astype(np.float64)
    return arr, dx


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    return str(value)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def export_profile(coords, values, path, header=("X", "intensity")):
    """Two-column CSV with a header row."""
    coords = np.asarray(coords)
    values = np.asarray(values)
    if coords.shape != values.shape:
        raise ValueError("coords and values differ in length")
    try:
        atomic_write(path, csv_text(header, zip(coords.tolist(), values.tolist())))
    except OSError as exc:
        raise OSError(f"cannot write profile to {path}: {exc}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def flatten(d, prefix=""):
    """Nested dict to ``{"a.b": value}``."""
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, (list, tuple)) and v and all(isinstance(x, dict) for x in v):
            for i, x in enumerate(v):
                out.update(flatten(x, f"{key}.{i}."))
        else:
            out[key] = v
    return out


def report_text(record):
    lines = []
    for k, v in flatten(record).items():
        if isinstance(v, (list, tuple)):
            v = ",".join(_fmt(x) for x in v)
        lines.append(f"{k} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def write_report(record, directory, stem="report"):
    """Write ``<stem>.txt`` (flat key = value) and ``<stem>.json``."""
    atomic_write(os.path.join(directory, f"{stem}.txt"), report_text(record))
    atomic_write(os.path.join(directory, f"{stem}.json"),
                 json.dumps(_jsonable(record), indent=2, sort_keys=True) + "\n")
