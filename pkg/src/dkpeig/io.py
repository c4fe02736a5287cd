"""Field files and run configuration.

Binary field format: one line of JSON header, then ``N*N`` little-endian
complex128 values in C order (``[ix, iy]``)::

    {"format": "dkpeig-field-1", "N": 256, "L": 12.0, "name": "phi", "k": [0.0, 4.0]}\\n
    <payload>

CSV format: a ``#`` header line carrying the same JSON, then rows
``x,y,re,im`` at 17 significant digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .spectral import ComplexField, Grid2D

FORMAT = "dkpeig-field-1"


class ConfigError(ValueError):
    """Malformed configuration (CLI exit code 2)."""


def _header(f: ComplexField, k: complex | None) -> dict:
    return {
        "format": FORMAT,
        "N": f.grid.N,
        "L": f.grid.L,
        "name": f.name,
        "k": None if k is None else [complex(k).real, complex(k).imag],
    }


def serialize_field(f: ComplexField, path, k: complex | None = None, fmt: str | None = None) -> Path:
    """Write ``f`` as binary (lossless) or CSV; ``fmt`` defaults from the suffix."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "bin")
    head = json.dumps(_header(f, k), sort_keys=True)
    if fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(head.encode() + b"\n")
            fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())
    elif fmt == "csv":
        X, Y = f.grid.mesh
        data = np.column_stack(
            [X.ravel(), Y.ravel(), f.values.real.ravel(), f.values.imag.ravel()]
        )
        with open(path, "w") as fh:
            fh.write("# " + head + "\n")
            fh.write("x,y,re,im\n")
            np.savetxt(fh, data, fmt="%.17g", delimiter=",")
    else:
        raise ValueError(f"unknown field format {fmt!r}")
    return path


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        line = fh.readline()
    text = line.decode().lstrip("# ").strip()
    try:
        head = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: missing or malformed field header") from exc
    if head.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    return head


def deserialize_field(path) -> ComplexField:
    path = Path(path)
    head = read_header(path)
    grid = Grid2D(int(head["N"]), float(head["L"]))
    n = grid.N
    with open(path, "rb") as fh:
        first = fh.readline()
        if first.startswith(b"#"):
            values = _read_csv(fh, grid, path)
        else:
            payload = fh.read()
            if len(payload) != n * n * 16:
                raise ValueError(
                    f"{path}: header says N={n} ({n * n * 16} bytes) but payload has {len(payload)} bytes"
                )
            values = np.frombuffer(payload, dtype="<c16").reshape(n, n)
    return ComplexField(grid, values, head.get("name", ""))


def _read_csv(fh, grid: Grid2D, path) -> np.ndarray:
    fh.readline()  # column names
    data = np.loadtxt(fh, delimiter=",", ndmin=2)
    n = grid.N
    if data.shape != (n * n, 4):
        raise ValueError(f"{path}: header says N={n} but file has {data.shape[0]} rows")
    return (data[:, 2] + 1j * data[:, 3]).reshape(n, n)


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex number {text!r}") from exc


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def _complex_list(text: str) -> tuple[complex, ...]:
    return tuple(parse_complex(p) for p in text.split(",") if p.strip())


def _pairs(text: str) -> tuple[tuple[float, ...], ...]:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            out.append(tuple(float(v) for v in chunk.split(",")))
    return tuple(out)


def _opt_float(text: str):
    return None if text.strip().lower() in ("", "none", "default") else float(text)


# key -> (parser, default)
SCHEMA = {
    "N": (int, 256),
    "L": (float, 12.0),
    "potential": (str, "gaussian"),
    "amplitude": (float, 0.1),
    "sigma": (float, 1.0),
    "center_x": (float, 0.0),
    "center_y": (float, 0.0),
    "order": (int, 3),
    "bumps": (_pairs, ()),
    "potential_file": (str, ""),
    "k": (_complex_list, (4j,)),
    "lambda": (_complex_list, (6j,)),
    "points": (_pairs, ((0.0, 0.0),)),
    "tol_fixed_point": (float, 1e-12),
    "tol_residual": (float, 1e-8),
    "max_iter": (int, 200),
    "alpha_l": (float, 1.0),
    "sobolev_order": (int, 4),
    "dealias": (_parse_bool, True),
    "contraction_C": (float, 0.49),
    "series_max_terms": (int, 500),
    "series_order": (int, 3),
    "enforce_region": (_parse_bool, True),
    "newton": (_parse_bool, False),
    "x0": (float, 0.3),
    "lambda0": (float, 0.5),
    "y0": (float, 0.0),
    "y_end": (float, -10.0),
    "Y0": (float, 10.0),
    "step": (_opt_float, None),
    "interpolation": (str, "bicubic"),
    "binary": (_parse_bool, False),
    "output_dir": (str, "dkpeig-out"),
    "seed": (int, 0),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]

    @classmethod
    def from_pairs(cls, pairs) -> "RunConfig":
        vals = {k: d for k, (_, d) in SCHEMA.items()}
        for key, raw, where in pairs:
            if key not in SCHEMA:
                raise ConfigError(f"{where}: unknown configuration key {key!r}")
            parser = SCHEMA[key][0]
            try:
                vals[key] = parser(raw)
            except ConfigError as exc:
                raise ConfigError(f"{where}: key {key!r}: {exc}") from None
            except ValueError:
                raise ConfigError(f"{where}: key {key!r}: bad value {raw!r}") from None
        return cls(vals)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, tuple):
                return [enc(e) for e in v]
            return v

        return {k: enc(v) for k, v in sorted(self.values.items())}


def parse_config_text(text: str, source: str = "<config>") -> list[tuple[str, str, str]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip(), f"{source}:{lineno}"))
    return pairs


def load_config(path=None, overrides=()) -> RunConfig:
    """Defaults, then the file at ``path``, then ``key=value`` overrides."""
    pairs = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        pairs += parse_config_text(text, str(path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        pairs.append((key.strip(), value.strip(), "--set"))
    return RunConfig.from_pairs(pairs)
