"""Run-directory output: CSV tables, JSON documents and the key-value manifest."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "{:.16e}"


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row of length {len(row)} for {len(self.columns)} columns")

    @classmethod
    def from_columns(cls, **cols) -> "Table":
        names = list(cols)
        arrays = [np.atleast_1d(np.asarray(v)) for v in cols.values()]
        n = len(arrays[0])
        if any(len(a) != n for a in arrays):
            raise ValueError("columns have different lengths")
        return cls(names, [[a[i] for a in arrays] for i in range(n)])


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value).replace(",", ";")


def write_csv(table: Table, path: Path) -> Path:
    path = Path(path)
    lines = [",".join(table.columns)]
    lines += [",".join(_cell(v) for v in row) for row in table.rows]
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV written by :func:`write_csv`."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def to_jsonable(obj):
    """Complex numbers become ``[re, im]``; arrays become nested lists."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(doc, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_jsonable(doc), indent=1, sort_keys=True) + "\n")
    return path


def complex_matrix(data) -> np.ndarray:
    """Inverse of :func:`to_jsonable` for a matrix of ``[re, im]`` pairs."""
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def write_manifest(entries: dict, path: Path) -> Path:
    lines = []
    for key, value in flatten(entries).items():
        if isinstance(value, (float, np.floating)):
            text = repr(float(value))
        elif isinstance(value, (bool, np.bool_)):
            text = "true" if value else "false"
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)


def read_manifest(path: Path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out[k] = v
    return out
