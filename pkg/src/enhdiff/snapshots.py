"""Field snapshot export/import: CSV (coordinates + value) and a small
self-describing binary for restart.

Binary layout (little endian): magic b"ENHD1", kind byte (0 Cartesian,
1 polar), two uint32 dims, four float64 geometry words, one float64 time,
then the value array as row-major float64.  Cartesian geometry words are
(ly, 0, 0, 0); polar ones are (r_min, r_max, 0, 0).
"""
from __future__ import annotations

import csv
import struct

import numpy as np

from .errors import ConfigError
from .grid import CartesianGrid, ScalarField
from .polar import PolarField, PolarGrid

MAGIC = b"ENHD1"
_HEADER = struct.Struct("<5sBII4dd")


def save_field_csv(fieldval, path) -> None:
    """x,y (or r,theta), value rows; floats as shortest round-trip repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(fieldval, ScalarField):
            writer.writerow(("x", "y", "value"))
            X, Y = fieldval.grid.mesh
        else:
            writer.writerow(("r", "theta", "value"))
            X, Y = fieldval.grid.mesh
        for a, b, v in zip(X.ravel(), Y.ravel(), fieldval.values.ravel()):
            writer.writerow((repr(float(a)), repr(float(b)), repr(float(v))))


def save_field_binary(fieldval, path) -> None:
    if isinstance(fieldval, ScalarField):
        kind = 0
        geo = (fieldval.grid.ly, 0.0, 0.0, 0.0)
        dims = (fieldval.grid.nx, fieldval.grid.ny)
    elif isinstance(fieldval, PolarField):
        kind = 1
        geo = (fieldval.grid.r_min, fieldval.grid.r_max, 0.0, 0.0)
        dims = (fieldval.grid.nr, fieldval.grid.ntheta)
    else:
        raise ConfigError(f"cannot serialize {type(fieldval).__name__}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, kind, dims[0], dims[1], *geo, fieldval.time))
        fh.write(np.ascontiguousarray(fieldval.values, dtype="<f8").tobytes())


def load_field_binary(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, kind, n1, n2, g0, g1, _g2, _g3, time = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ConfigError(f"{path} is not an ENHD1 snapshot")
        values = np.frombuffer(fh.read(8 * n1 * n2), dtype="<f8").reshape(n1, n2).copy()
    if kind == 0:
        return ScalarField(CartesianGrid(nx=n1, ny=n2, ly=g0), values, time)
    if kind == 1:
        return PolarField(PolarGrid(nr=n1, ntheta=n2, r_min=g0, r_max=g1), values, time)
    raise ConfigError(f"unknown snapshot kind {kind}")
