"""Discretized domain and real-valued functions on it.

A ``Grid`` is an ordered finite set of sites in R^d standing in for a compact
domain; a ``Field`` carries one finite real value per site. Site order is
frozen at construction and is the identity used by every other module; the
coordinates themselves are only needed for labeling and export.

Grids and Fields are immutable after construction (backing arrays are marked
read-only), so they can be shared across workers without synchronization.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, GridMismatch


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered sites in R^d, d >= 1. At least two, pairwise distinct."""

    sites: np.ndarray

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=float)
        if sites.ndim == 1:
            sites = sites[:, None]
        if sites.ndim != 2:
            raise ValueError("sites must be a (n_sites, dim) array")
        if sites.shape[0] < 2:
            raise ValueError("a grid needs at least 2 sites")
        if not np.all(np.isfinite(sites)):
            raise ValueError("site coordinates must be finite")
        if np.unique(sites, axis=0).shape[0] != sites.shape[0]:
            raise ValueError("sites must be pairwise distinct")
        sites = sites.copy()
        sites.setflags(write=False)
        object.__setattr__(self, "sites", sites)

    @classmethod
    def regular(cls, n_sites: int, lo: float = 0.0, hi: float = 1.0) -> "Grid":
        """Equispaced one-dimensional grid on [lo, hi]."""
        return cls(np.linspace(lo, hi, n_sites))

    @property
    def n_sites(self) -> int:
        return self.sites.shape[0]

    @property
    def dim(self) -> int:
        return self.sites.shape[1]

    def coords(self) -> np.ndarray:
        """First-axis coordinates, convenient for one-dimensional grids."""
        return self.sites[:, 0]

    def key(self) -> bytes:
        """Stable fingerprint used as a cache key."""
        return self.sites.tobytes()

    def __len__(self) -> int:
        return self.n_sites


@dataclass(frozen=True, eq=False)
class Field:
    """One finite real value per grid site."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_sites,):
            raise ValueError(
                f"values shape {values.shape} does not match grid with "
                f"{self.grid.n_sites} sites"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


class FieldExtremum(NamedTuple):
    value: float
    site_index: int


def same_grid(f: Field, g: Field) -> bool:
    return f.grid is g.grid or np.array_equal(f.grid.sites, g.grid.sites)


def sup_field(f: Field) -> FieldExtremum:
    """Maximum value and the smallest site index attaining it."""
    i = int(np.argmax(f.values))
    return FieldExtremum(float(f.values[i]), i)


def inf_field(f: Field) -> FieldExtremum:
    """Minimum value and the smallest site index attaining it."""
    i = int(np.argmin(f.values))
    return FieldExtremum(float(f.values[i]), i)


_BINARY_OPS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
    "min": np.minimum,
    "max": np.maximum,
    "pow": np.power,
}


def combine(f: Field, g: Field, op: str) -> Field:
    """Componentwise combination of two fields on a common grid.

    ``op`` is one of add, sub, mul, div, min, max, pow. Division by zero and
    fractional powers of negative bases raise ``DomainError``.
    """
    if op not in _BINARY_OPS:
        raise ValueError(f"unknown op {op!r}; expected one of {sorted(_BINARY_OPS)}")
    if not same_grid(f, g):
        raise GridMismatch("fields live on different grids")
    a, b = f.values, g.values
    if op == "div" and np.any(b == 0.0):
        raise DomainError("division by zero entry")
    if op == "pow":
        fractional = b != np.floor(b)
        if np.any((a < 0.0) & fractional):
            raise DomainError("negative base with fractional exponent")
    with np.errstate(over="ignore", invalid="ignore"):
        out = _BINARY_OPS[op](a, b)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"componentwise {op} produced non-finite values")
    return Field(f.grid, out)


# ---------------------------------------------------------------------------
# Serialization. CSV columns: site_index, coord_1..coord_d, value. The JSON
# mirror holds the raw "sites" and "values" arrays.
# ---------------------------------------------------------------------------

def field_to_csv(f: Field, path) -> None:
    d = f.grid.dim
    header = ["site_index"] + [f"coord_{j + 1}" for j in range(d)] + ["value"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(f.grid.n_sites):
            row = [i] + [format(c, ".17g") for c in f.grid.sites[i]]
            row.append(format(f.values[i], ".17g"))
            writer.writerow(row)


def field_from_csv(path) -> Field:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 2
        sites, values = [], []
        for row in reader:
            sites.append([float(c) for c in row[1 : 1 + d]])
            values.append(float(row[1 + d]))
    return Field(Grid(np.asarray(sites)), np.asarray(values))


def field_to_json(f: Field) -> str:
    return json.dumps({"sites": f.grid.sites.tolist(), "values": f.values.tolist()})


def field_from_json(doc: str) -> Field:
    data = json.loads(doc)
    return Field(Grid(np.asarray(data["sites"])), np.asarray(data["values"]))
