"""Plain-text inputs and CSV/JSON outputs.

Key-value files hold one ``key = value`` per line; ``#`` starts a comment.

Kernel references are either a file path or a builtin:

    riesz:j=1,m=2[,scale=1]     inverse-x[:scale=1]     zero:m=2
    angular:p=2[,n=16,scale=1]  (m=2 density e^{i p theta})

Kernel files use the keys ``family`` (riesz | custom | zero | inverse-x |
angular), ``m``, ``j``, ``p``, ``n``, ``scale`` and, for custom kernels,
``omega``: comma-separated complex samples (``1+2j`` or ``1+2i``).  For m=1
the two samples are Omega(-1), Omega(+1); for m=2 they are taken at the
angles 2 pi k / n.
"""
from __future__ import annotations

import configparser
import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .kernel import KernelSpec, angular_mode, inverse_x, make_kernel, zero_kernel
from .riemann import PeriodicGrid, grid_points


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    return complex(s)


def parse_floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(_fraction(v)) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _fraction(v: str) -> float:
    v = v.strip()
    if "/" in v:
        num, den = v.split("/")
        return float(num) / float(den)
    return float(v)


def read_kv(path: str | Path) -> dict[str, str]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    text = Path(path).read_text()
    parser.read_string("[root]\n" + text)
    return {k.strip().replace("_", "-"): v.strip() for k, v in parser["root"].items()}


def kernel_from_mapping(d: dict[str, str]) -> KernelSpec:
    family = d.get("family", "riesz").strip()
    scale = float(d.get("scale", 1.0))
    if family == "zero":
        return zero_kernel(int(d.get("m", 1)))
    if family == "inverse-x":
        return inverse_x(scale)
    if family == "angular":
        return angular_mode(int(d["p"]), int(d.get("n", 16)), scale)
    if family == "riesz":
        return make_kernel("riesz", int(d.get("m", 1)), j=int(d.get("j", 1)), scale=scale)
    if family == "custom":
        omega = [parse_complex(v) for v in d["omega"].split(",") if v.strip()]
        return make_kernel("custom", int(d["m"]), omega=omega, scale=scale)
    raise ValueError(f"unknown kernel family {family!r}")


def parse_kernel_ref(ref: str, base: Path | None = None) -> KernelSpec:
    ref = ref.strip()
    name, _, args = ref.partition(":")
    if name in {"riesz", "inverse-x", "zero", "angular"}:
        d = {"family": name}
        for item in filter(None, (s.strip() for s in args.split(","))):
            key, _, val = item.partition("=")
            d[key.strip()] = val.strip()
        return kernel_from_mapping(d)
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    if not path.exists():
        raise FileNotFoundError(f"kernel file {path} not found")
    return kernel_from_mapping(read_kv(path))


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_json(path: str | Path, payload: dict) -> None:
    def default(o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(type(o))

    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=default) + "\n")


def write_periodic_grid(path: str | Path, g: PeriodicGrid) -> None:
    write_csv(path, ["t", "re", "im"], ((t, v.real, v.imag) for t, v in zip(g.t, g.values)))


def read_periodic_grid(path: str | Path) -> PeriodicGrid:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    t = np.array([float(r["t"]) for r in rows])
    grid = PeriodicGrid(vals)
    if not np.allclose(t, grid_points(grid.n), atol=1e-9):
        raise ValueError(f"{path}: t column must be -pi + 2 pi j / n")
    return grid


def write_symbol_grid(path, grid, m: int) -> None:
    pts = grid.points().reshape(-1, m)
    vals = grid.values.ravel()
    flags = grid.flags.ravel()
    header = [f"xi_{i + 1}" for i in range(m)] + ["re", "im", "N", "flags"]
    rows = (
        [*map(float, p), v.real, v.imag, float(grid.N), "nonconverged" if f else ""]
        for p, v, f in zip(pts, vals, flags)
    )
    write_csv(path, header, rows)


def write_box_grid(path, u: np.ndarray) -> None:
    """Box grid as rows (i_1..i_{m-1}, d, re, im); lateral indices 0..2L-1, depth 1..D."""
    m = u.ndim
    header = [f"i_{k + 1}" for k in range(m - 1)] + ["d", "re", "im"]
    rows = []
    for idx in np.ndindex(*u.shape):
        v = u[idx]
        rows.append([*idx[:-1], idx[-1] + 1, float(v.real), float(v.imag)])
    write_csv(path, header, rows)


def read_box_grid(path, shape: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            lat = tuple(int(row[f"i_{k + 1}"]) for k in range(len(shape) - 1))
            d = int(row["d"]) - 1
            if not 0 <= d < shape[-1] or any(not 0 <= i < s for i, s in zip(lat, shape)):
                raise ValueError(f"{path}: node {lat + (d + 1,)} outside the box")
            out[lat + (d,)] = complex(float(row["re"]), float(row.get("im", 0.0) or 0.0))
    return out
