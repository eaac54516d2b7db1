"""Rectangular state spaces, grids, cell masks, and densities of states.

The state of a system is a point x in a box Omega = [lo_1, hi_1] x ... x
[lo_n, hi_n].  Distributions over Omega are represented two ways:

* ``DensityOfStates`` -- a callable mu(x, t) >= 0, the state-count measure
  and maximum-entropy distribution.  It is sampled onto grids on demand and
  the sampled snapshot is normalized against the grid quadrature, so a
  snapshot always integrates to 1 to machine precision regardless of how the
  evaluator itself is scaled.
* ``GridDensity`` -- a probability density rho sampled at the cell centers
  of a regular grid, normalized so that sum(values) * cell_volume = 1.

All integrals are midpoint-rule quadratures over cell centers: second-order
accurate, positivity preserving, and exact for densities built from the same
grid samples.  All types are immutable after construction.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DimensionError,
    EmptySupportError,
    ForbiddenBoundaryError,
    InvalidDensityError,
)

DEFAULT_NORM_TOL = 1e-8


class Boundary(Enum):
    """Per-axis boundary behaviour of the box."""

    PERIODIC = "periodic"
    REFLECTING = "reflecting"
    FORBIDDEN = "forbidden"  # flags configurations the framework excludes

    @classmethod
    def parse(cls, name: str) -> "Boundary":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown boundary kind {name!r}") from None


def _as_tuple(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class StateSpace:
    """A rectangular box with per-axis boundary behaviour."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    boundary: tuple[Boundary, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_tuple(self.lo))
        object.__setattr__(self, "hi", _as_tuple(self.hi))
        bnd = self.boundary
        if isinstance(bnd, (str, Boundary)):
            bnd = (bnd,) * len(self.lo)
        bnd = tuple(Boundary.parse(b) if isinstance(b, str) else b for b in bnd)
        object.__setattr__(self, "boundary", bnd)
        if len(self.lo) < 1:
            raise DimensionError("state space needs dim >= 1")
        if len(self.hi) != len(self.lo) or len(self.boundary) != len(self.lo):
            raise DimensionError("lo, hi, boundary must have equal length")
        for a, b in zip(self.lo, self.hi):
            if not (a < b):
                raise ValueError(f"need lo < hi per axis, got [{a}, {b}]")

    @classmethod
    def box(cls, lo, hi, boundary="reflecting") -> "StateSpace":
        lo = _as_tuple(np.atleast_1d(lo))
        hi = _as_tuple(np.atleast_1d(hi))
        return cls(lo, hi, boundary)

    @classmethod
    def unit(cls, dim: int = 2, boundary="reflecting") -> "StateSpace":
        return cls.box((0.0,) * dim, (1.0,) * dim, boundary)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def volume(self) -> float:
        return math.prod(self.widths)

    def require_supported(self, what: str = "operation") -> None:
        if any(b is Boundary.FORBIDDEN for b in self.boundary):
            raise ForbiddenBoundaryError(
                f"{what} is not defined on a space with a forbidden boundary axis"
            )

    def contains(self, points: np.ndarray, atol: float = 0.0) -> np.ndarray:
        """Boolean per-point inside test; ``points`` has shape (..., dim)."""
        pts = np.asarray(points, dtype=float)
        lo = np.asarray(self.lo) - atol
        hi = np.asarray(self.hi) + atol
        return np.all((pts >= lo) & (pts <= hi), axis=-1)

    def fold(self, points: np.ndarray) -> np.ndarray:
        """Map points back into the box: wrap periodic axes, reflect reflecting ones.

        Points on forbidden axes are clipped (callers reject such spaces up
        front; clipping keeps the helper total).
        """
        pts = np.array(points, dtype=float, copy=True)
        for ax, kind in enumerate(self.boundary):
            lo, w = self.lo[ax], self.widths[ax]
            x = pts[..., ax]
            if kind is Boundary.PERIODIC:
                pts[..., ax] = lo + np.mod(x - lo, w)
            elif kind is Boundary.REFLECTING:
                u = np.mod(x - lo, 2.0 * w)
                pts[..., ax] = lo + np.where(u > w, 2.0 * w - u, u)
            else:
                pts[..., ax] = np.clip(x, lo, lo + w)
        return pts


@dataclass(frozen=True)
class Grid:
    """Regular cell-centered grid tiling a state space exactly."""

    space: StateSpace
    shape: tuple[int, ...]

    def __post_init__(self):
        shp = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "shape", shp)
        if len(shp) != self.space.dim:
            raise DimensionError("grid shape rank must equal space dim")
        if any(n < 1 for n in shp):
            raise ValueError("grid shape entries must be positive")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def n_cells(self) -> int:
        return math.prod(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(w / n for w, n in zip(self.space.widths, self.shape))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinates along each axis."""
        out = []
        for lo, d, n in zip(self.space.lo, self.spacing, self.shape):
            ax = lo + (np.arange(n) + 0.5) * d
            ax.flags.writeable = False
            out.append(ax)
        return tuple(out)

    @cached_property
    def centers(self) -> np.ndarray:
        """All cell centers, shape ``(*shape, dim)``, row-major."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        pts = np.stack(mesh, axis=-1)
        pts.flags.writeable = False
        return pts

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.space, tuple(n * factor for n in self.shape))

    def cell_index(self, points: np.ndarray) -> tuple[np.ndarray, ...]:
        """Map points (..., dim) to integer cell indices, clipped to the grid."""
        pts = np.asarray(points, dtype=float)
        idx = []
        for ax in range(self.dim):
            i = np.floor((pts[..., ax] - self.space.lo[ax]) / self.spacing[ax])
            idx.append(np.clip(i, 0, self.shape[ax] - 1).astype(np.intp))
        return tuple(idx)

    def integrate(self, values: np.ndarray, region: "CellMask | None" = None) -> float:
        """Midpoint-rule integral of cell-sampled ``values`` over the region."""
        vals = np.asarray(values, dtype=float)
        if vals.shape != self.shape:
            raise DimensionError(
                f"values shape {vals.shape} does not match grid {self.shape}"
            )
        if region is None:
            total = float(vals.sum())
        else:
            if region.grid != self:
                raise DimensionError("mask belongs to a different grid")
            total = float(vals[region.values].sum())
        return total * self.cell_volume

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Multilinear interpolation of cell-centered ``values`` at ``points``.

        Boundary behaviour follows the space: periodic axes wrap across the
        seam, reflecting axes mirror.  Implemented by padding one ghost cell
        per axis so a single map_coordinates call handles mixed boundaries.
        """
        vals = np.asarray(values, dtype=float)
        if vals.shape != self.shape:
            raise DimensionError("values shape does not match grid")
        pts = self.space.fold(np.asarray(points, dtype=float))
        coords = []
        for ax in range(self.dim):
            c = (pts[..., ax] - self.space.lo[ax]) / self.spacing[ax] - 0.5
            coords.append(c + 1.0)  # shift into the padded array
        padded = vals
        for ax, kind in enumerate(self.space.boundary):
            mode = "wrap" if kind is Boundary.PERIODIC else "symmetric"
            width = [(0, 0)] * self.dim
            width[ax] = (1, 1)
            padded = np.pad(padded, width, mode=mode)
        flat = [c.ravel() for c in coords]
        out = ndimage.map_coordinates(padded, np.array(flat), order=1, mode="nearest")
        return out.reshape(np.asarray(points, dtype=float).shape[:-1])


@dataclass(frozen=True)
class CellMask:
    """Boolean region over the cells of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=bool)
        if vals.shape != self.grid.shape:
            raise DimensionError(
                f"mask shape {vals.shape} does not match grid {self.grid.shape}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def full(cls, grid: Grid) -> "CellMask":
        return cls(grid, np.ones(grid.shape, dtype=bool))

    @classmethod
    def empty(cls, grid: Grid) -> "CellMask":
        return cls(grid, np.zeros(grid.shape, dtype=bool))

    @classmethod
    def from_box(cls, grid: Grid, lo, hi) -> "CellMask":
        """Cells whose centers fall inside the axis-aligned box [lo, hi]."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != (grid.dim,) or hi.shape != (grid.dim,):
            raise DimensionError("box bounds must have one entry per axis")
        inside = np.ones(grid.shape, dtype=bool)
        for ax, centers in enumerate(grid.axes):
            sel = (centers >= lo[ax]) & (centers <= hi[ax])
            shape = [1] * grid.dim
            shape[ax] = -1
            inside &= sel.reshape(shape)
        return cls(grid, inside)

    @classmethod
    def from_predicate(cls, grid: Grid, pred: Callable[[np.ndarray], np.ndarray]) -> "CellMask":
        return cls(grid, np.asarray(pred(grid.centers), dtype=bool))

    @property
    def n_cells(self) -> int:
        return int(self.values.sum())

    def complement(self) -> "CellMask":
        return CellMask(self.grid, ~self.values)

    def union(self, other: "CellMask") -> "CellMask":
        self._check_same_grid(other)
        return CellMask(self.grid, self.values | other.values)

    def intersection(self, other: "CellMask") -> "CellMask":
        self._check_same_grid(other)
        return CellMask(self.grid, self.values & other.values)

    def is_disjoint(self, other: "CellMask") -> bool:
        self._check_same_grid(other)
        return not np.any(self.values & other.values)

    def contains_points(self, points: np.ndarray) -> np.ndarray:
        """Whether each (folded) point lands in a masked cell."""
        folded = self.grid.space.fold(points)
        return self.values[self.grid.cell_index(folded)]

    def _check_same_grid(self, other: "CellMask") -> None:
        if self.grid != other.grid:
            raise DimensionError("masks live on different grids")


class DensityOfStates:
    """The state-count measure mu(x, t), supplied as an evaluator.

    The evaluator may be scaled arbitrarily (only the shape matters): grid
    snapshots are renormalized against the midpoint quadrature of the grid
    they are sampled on, and cached per (grid, time).
    """

    def __init__(
        self,
        evaluator: Callable[[np.ndarray, float], np.ndarray],
        time_dependent: bool = False,
        norm_tol: float = DEFAULT_NORM_TOL,
        name: str = "mu",
    ):
        self._evaluator = evaluator
        self.time_dependent = bool(time_dependent)
        self.norm_tol = float(norm_tol)
        self.name = name
        self._cache: OrderedDict[tuple[Grid, float], np.ndarray] = OrderedDict()
        self._cache_limit = 64

    @classmethod
    def uniform(cls, space: StateSpace) -> "DensityOfStates":
        inv_vol = 1.0 / space.volume

        def evaluator(points, t):
            pts = np.asarray(points, dtype=float)
            return np.full(pts.shape[:-1], inv_vol)

        return cls(evaluator, time_dependent=False, name="uniform")

    def __call__(self, points: np.ndarray, t: float = 0.0) -> np.ndarray:
        out = np.asarray(self._evaluator(np.asarray(points, dtype=float), float(t)), dtype=float)
        if np.any(~np.isfinite(out)):
            raise InvalidDensityError(f"{self.name} evaluated to a non-finite value")
        if np.any(out < 0):
            raise InvalidDensityError(f"{self.name} evaluated to a negative value")
        return out

    def snapshot(self, grid: Grid, t: float = 0.0) -> np.ndarray:
        """Cell-center samples on ``grid`` at time ``t``, grid-normalized."""
        key = (grid, 0.0 if not self.time_dependent else float(t))
        cached = self._cache.get(key)
        if cached is not None:
            self._cache.move_to_end(key)
            return cached
        raw = self(grid.centers, key[1])
        total = float(raw.sum()) * grid.cell_volume
        if total <= 0.0:
            raise InvalidDensityError(f"{self.name} has zero total mass on the grid")
        vals = raw / total
        vals.flags.writeable = False
        self._cache[key] = vals
        if len(self._cache) > self._cache_limit:
            self._cache.popitem(last=False)
        return vals

    def on_grid(self, grid: Grid, t: float = 0.0) -> "GridDensity":
        return GridDensity(grid, self.snapshot(grid, t), norm_tol=self.norm_tol)


@dataclass(frozen=True)
class GridDensity:
    """A probability density sampled at the cell centers of a grid."""

    grid: Grid
    values: np.ndarray
    norm_tol: float = DEFAULT_NORM_TOL

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise DimensionError(
                f"density shape {vals.shape} does not match grid {self.grid.shape}"
            )
        if np.any(~np.isfinite(vals)):
            raise InvalidDensityError("density contains non-finite values")
        if np.any(vals < 0):
            raise InvalidDensityError("density contains negative values")
        total = float(vals.sum()) * self.grid.cell_volume
        if abs(total - 1.0) > self.norm_tol:
            raise InvalidDensityError(
                f"density integrates to {total!r}, outside tolerance {self.norm_tol}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_unnormalized(
        cls, grid: Grid, values: np.ndarray, norm_tol: float = DEFAULT_NORM_TOL
    ) -> "GridDensity":
        vals = np.asarray(values, dtype=float)
        total = float(vals.sum()) * grid.cell_volume
        if total <= 0.0:
            raise EmptySupportError("cannot normalize a density with zero mass")
        return cls(grid, vals / total, norm_tol=norm_tol)

    @classmethod
    def from_evaluator(
        cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray], norm_tol: float = DEFAULT_NORM_TOL
    ) -> "GridDensity":
        return cls.from_unnormalized(grid, np.asarray(fn(grid.centers), dtype=float), norm_tol)

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        return self.grid.interpolate(self.values, points)

    def total_mass(self) -> float:
        return float(self.values.sum()) * self.grid.cell_volume


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def quadrature(field: GridDensity | np.ndarray, region: CellMask | None = None,
               grid: Grid | None = None) -> float:
    """Midpoint-rule integral of a grid field over a region (whole box if None).

    ``field`` is a GridDensity, or a raw array paired with ``grid``.
    """
    if isinstance(field, GridDensity):
        return field.grid.integrate(field.values, region)
    if grid is None:
        if region is None:
            raise DimensionError("raw arrays need an explicit grid")
        grid = region.grid
    return grid.integrate(np.asarray(field, dtype=float), region)


def state_count(region: CellMask, mu: DensityOfStates, t: float = 0.0) -> float:
    """Proportion of all states contained in ``region`` at time ``t``.

    Equals the quadrature of mu over the region; 1 for the whole space,
    additive over disjoint regions (the very same quadrature terms).
    """
    vals = mu.snapshot(region.grid, t)
    n = region.grid.integrate(vals, region)
    # snapshot normalization guarantees n <= 1 up to roundoff
    return min(max(n, 0.0), float(vals.sum()) * region.grid.cell_volume)


def uniform_on(region: CellMask, mu: DensityOfStates, t: float = 0.0) -> GridDensity:
    """The zero-extra-knowledge density given that the state lies in ``region``:
    mu / N_region inside, 0 outside."""
    vals = mu.snapshot(region.grid, t)
    n = region.grid.integrate(vals, region)
    if n <= 0.0:
        raise EmptySupportError("region carries no state measure")
    out = np.where(region.values, vals / n, 0.0)
    return GridDensity(region.grid, out)


# ---------------------------------------------------------------------------
# Serialization: header "dim,shape...,lo...,hi..." then one value per line,
# row-major (C order).
# ---------------------------------------------------------------------------

def save_grid_density(density: GridDensity, path) -> None:
    grid = density.grid
    header = [grid.dim, *grid.shape, *grid.space.lo, *grid.space.hi]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in header))
        fh.write("\n")
        for v in density.values.ravel(order="C"):
            fh.write(repr(float(v)))
            fh.write("\n")


def load_grid_density(path, boundary="reflecting",
                      norm_tol: float = DEFAULT_NORM_TOL) -> GridDensity:
    with open(path, "r") as fh:
        head = fh.readline().strip().split(",")
        dim = int(head[0])
        if len(head) != 1 + 3 * dim:
            raise DimensionError(f"malformed header in {path}")
        shape = tuple(int(s) for s in head[1 : 1 + dim])
        lo = tuple(float(s) for s in head[1 + dim : 1 + 2 * dim])
        hi = tuple(float(s) for s in head[1 + 2 * dim : 1 + 3 * dim])
        values = np.array([float(line) for line in fh if line.strip()])
    grid = Grid(StateSpace(lo, hi, boundary), shape)
    return GridDensity(grid, values.reshape(shape), norm_tol=norm_tol)
