"""Sampled vector fields on rectangular lattices, plus the EFLD1 text format."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

# value-kind codes stored in the header slot after n
KIND_REAL = 0
KIND_COMPLEX = 1


class GridError(ValueError):
    pass


def axis_count(lo: float, hi: float, h: float) -> int:
    steps = (hi - lo) / h
    r = round(steps)
    if abs(steps - r) > 1e-9 * max(1.0, abs(steps)):
        raise GridError(f"axis [{lo}, {hi}] is not a whole number of steps of h={h}")
    return int(r) + 1


@dataclass
class GridField:
    """Values on the lattice lo + h * index, shape (*counts, dim_v).

    With boundary_axis set, the face of the halfspace is the lattice row at
    the lower end of that axis and the field lives on the side above it."""

    box: tuple[tuple[float, float], ...]
    h: float
    values: np.ndarray
    boundary_axis: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.box = tuple((float(a), float(b)) for a, b in self.box)
        if not self.h > 0:
            raise GridError("h must be positive")
        for lo, hi in self.box:
            if not hi >= lo:
                raise GridError(f"invalid axis [{lo}, {hi}]")
        counts = tuple(axis_count(lo, hi, self.h) for lo, hi in self.box)
        v = np.asarray(self.values)
        if v.ndim == len(counts):
            v = v[..., None]
        if v.shape[:-1] != counts:
            raise GridError(f"values have shape {v.shape[:-1]}, lattice needs {counts}")
        self.values = v
        if self.boundary_axis is not None and not 0 <= self.boundary_axis < len(counts):
            raise GridError("boundary_axis out of range")

    @property
    def dim(self) -> int:
        return len(self.box)

    @property
    def dim_v(self) -> int:
        return self.values.shape[-1]

    @property
    def counts(self) -> tuple[int, ...]:
        return self.values.shape[:-1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def axes(self) -> list[np.ndarray]:
        return [lo + self.h * np.arange(c) for (lo, _), c in zip(self.box, self.counts)]

    def points(self) -> np.ndarray:
        """Lattice points, shape (*counts, dim)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def face(self) -> GridField:
        """The boundary row as an (n-1)-dimensional field."""
        if self.boundary_axis is None:
            raise GridError("field has no boundary axis")
        a = self.boundary_axis
        vals = np.take(self.values, 0, axis=a)
        box = self.box[:a] + self.box[a + 1:]
        return GridField(box, self.h, vals, None, dict(self.metadata))

    def with_values(self, values, **meta) -> GridField:
        md = dict(self.metadata)
        md.update(meta)
        return GridField(self.box, self.h, values, self.boundary_axis, md)

    def __add__(self, other: GridField) -> GridField:
        self._check_same(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: GridField) -> GridField:
        self._check_same(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c) -> GridField:
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def _check_same(self, other: GridField):
        if self.box != other.box or self.h != other.h or self.values.shape != other.values.shape:
            raise GridError("fields live on different grids")

    # EFLD1 format: header, one "lo hi count" line per axis, then values
    def save(self, path) -> None:
        path = Path(path)
        kind = KIND_COMPLEX if self.is_complex else KIND_REAL
        axis = -1 if self.boundary_axis is None else self.boundary_axis
        lines = [f"EFLD1 {self.dim} {kind} {self.dim_v} {self.h!r} {axis}"]
        for (lo, hi), c in zip(self.box, self.counts):
            lines.append(f"{lo!r} {hi!r} {c}")
        flat = self.values.reshape(-1, self.dim_v)
        if kind == KIND_COMPLEX:
            for row in flat:
                lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
        else:
            for row in flat:
                lines.append(" ".join(repr(float(x)) for x in row))
        path.write_text("\n".join(lines) + "\n")
        Path(str(path) + ".json").write_text(json.dumps(self.metadata, sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> GridField:
        path = Path(path)
        lines = path.read_text().split("\n")
        head = lines[0].split()
        if len(head) != 6 or head[0] != "EFLD1":
            raise GridError(f"{path}: not an EFLD1 file")
        n, kind, dim_v, h, axis = int(head[1]), int(head[2]), int(head[3]), float(head[4]), int(head[5])
        box, counts = [], []
        for line in lines[1:1 + n]:
            lo, hi, c = line.split()
            box.append((float(lo), float(hi)))
            counts.append(int(c))
        nums = np.array(" ".join(lines[1 + n:]).split(), dtype=float)
        if kind == KIND_COMPLEX:
            nums = nums[0::2] + 1j * nums[1::2]
        values = nums.reshape(*counts, dim_v)
        side = Path(str(path) + ".json")
        meta = json.loads(side.read_text()) if side.exists() else {}
        return cls(tuple(box), h, values, None if axis < 0 else axis, meta)


def sample_field(f: Callable, box: Sequence[Sequence[float]], h: float, boundary_axis: int | None = None,
                 vectorized: bool = True, metadata: dict | None = None) -> GridField:
    """values[p] = f(p) at every lattice point of the box.

    A vectorized evaluator receives an array of points (N, n) and returns
    (N,) or (N, dim_v); otherwise f is called point by point."""
    box = tuple((float(a), float(b)) for a, b in box)
    if not h > 0:
        raise GridError("h must be positive")
    counts = tuple(axis_count(lo, hi, h) for lo, hi in box)
    axes = [lo + h * np.arange(c) for (lo, _), c in zip(box, counts)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(box))
    vals = None
    if vectorized:
        try:
            out = np.asarray(f(pts))
            if out.shape[0] == len(pts) and out.ndim in (1, 2):
                vals = out
        except Exception:
            vals = None
    if vals is None:
        rows = []
        for p in pts:
            try:
                rows.append(np.atleast_1d(np.asarray(f(p))))
            except Exception as exc:
                raise GridError(f"evaluator failed at lattice point {tuple(p)}: {exc}") from exc
        vals = np.array(rows)
    if vals.ndim == 1:
        vals = vals[:, None]
    return GridField(box, h, vals.reshape(*counts, vals.shape[-1]), boundary_axis, dict(metadata or {}))
