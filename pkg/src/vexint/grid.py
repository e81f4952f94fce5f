"""Periodic sampling grids and dyadic cubes on the box [0, 2L)^n.

The box is sampled at N points per axis, x_i = i*h with h = 2L/N, so that
every dyadic cube corner 2^{-v} m lands exactly on a grid point.  All
quadrature is the rectangle rule (sum times h^n), which on a periodic box
coincides with the trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidConfiguration, InvalidInput, ResolutionExceeded

__all__ = [
    "Grid",
    "DyadicCube",
    "GridFunction",
    "make_grid",
    "enumerate_cubes",
    "cube_mask",
    "cube_sums",
    "cube_broadcast",
]


def _is_power_of_two(x: float) -> bool:
    if x <= 0 or not math.isfinite(x):
        return False
    mantissa, _ = math.frexp(x)
    return mantissa == 0.5


@dataclass(frozen=True)
class DyadicCube:
    """Dyadic cube of side 2^{-v} with lower corner 2^{-v} m."""

    v: int
    m: tuple[int, ...]

    @property
    def side(self) -> float:
        return 2.0 ** (-self.v)

    @property
    def corner(self) -> tuple[float, ...]:
        return tuple(mi * self.side for mi in self.m)

    def measure(self) -> float:
        return self.side ** len(self.m)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, 2L)^n with N points per axis."""

    n: int
    L: float
    N: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N ** self.n

    @property
    def v_max(self) -> int:
        # finest level whose cubes still contain >= 4 grid points per axis
        return int(round(math.log2(self.N / (8.0 * self.L))))

    @property
    def nyquist(self) -> float:
        # largest resolved angular frequency, pi/h
        return math.pi / self.h

    @cached_property
    def axis(self) -> np.ndarray:
        return np.arange(self.N) * self.h

    def coords(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape `self.shape`, one per axis."""
        return tuple(np.meshgrid(*(self.axis,) * self.n, indexing="ij"))

    def centered_coords(self) -> tuple[np.ndarray, ...]:
        """Coordinates folded to [-L, L) per axis (periodic representative)."""
        return tuple(((c + self.L) % (2.0 * self.L)) - self.L for c in self.coords())

    def periodic_radius(self) -> np.ndarray:
        """Periodic distance from each grid point to the origin."""
        d2 = np.zeros(self.shape)
        for c in self.coords():
            d = np.minimum(c, 2.0 * self.L - c)
            d2 = d2 + d * d
        return np.sqrt(d2)

    def center_radius(self) -> np.ndarray:
        """Distance from each grid point to the box center (L, ..., L)."""
        d2 = np.zeros(self.shape)
        for c in self.coords():
            d = c - self.L
            d2 = d2 + d * d
        return np.sqrt(d2)

    def integrate(self, values: np.ndarray) -> float | complex:
        if values.shape != self.shape:
            raise InvalidInput(f"expected array of shape {self.shape}, got {values.shape}")
        return values.sum() * self.h ** self.n

    @cached_property
    def freq_radius(self) -> np.ndarray:
        """|xi| at the DFT frequencies xi_k = (pi/L) k, shape `self.shape`."""
        xi = 2.0 * math.pi * np.fft.fftfreq(self.N, d=self.h)
        if self.n == 1:
            return np.abs(xi)
        grids = np.meshgrid(*(xi,) * self.n, indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    # -- dyadic cube bookkeeping ------------------------------------------

    def cubes_per_axis(self, v: int) -> int:
        return int(round(2.0 * self.L * 2.0 ** v))

    def cells_per_axis(self, v: int) -> int:
        # grid points per cube edge; integral for v <= v_max + 2
        return self.N // (self.cubes_per_axis(v))

    def check_level(self, v: int) -> None:
        if v < 0:
            raise ResolutionExceeded(f"negative dyadic level {v}")
        if v > self.v_max:
            raise ResolutionExceeded(
                f"level {v} cube side {2.0**-v} is below 4 grid cells (h={self.h}); "
                f"finest usable level is {self.v_max}"
            )

    def cube(self, v: int, m: tuple[int, ...] | int) -> DyadicCube:
        if isinstance(m, int):
            m = (m,)
        m = tuple(int(mi) for mi in m)
        self.check_level(v)
        if len(m) != self.n:
            raise InvalidConfiguration(f"cube index {m} has wrong dimension for n={self.n}")
        top = self.cubes_per_axis(v)
        if any(mi < 0 or mi >= top for mi in m):
            raise InvalidConfiguration(f"cube (v={v}, m={m}) does not fit in [0, {2*self.L})^{self.n}")
        return DyadicCube(v, m)

    def cube_slices(self, cube: DyadicCube) -> tuple[slice, ...]:
        c = self.cells_per_axis(cube.v)
        return tuple(slice(mi * c, (mi + 1) * c) for mi in cube.m)

    def corner_index(self, cube: DyadicCube) -> tuple[int, ...]:
        c = self.cells_per_axis(cube.v)
        return tuple(mi * c for mi in cube.m)


@dataclass
class GridFunction:
    """Complex-valued samples on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise InvalidInput(
                f"values of shape {self.values.shape} do not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values.view(np.float64) if np.iscomplexobj(self.values) else self.values)):
            raise InvalidInput("grid function contains non-finite values")

    @classmethod
    def zeros(cls, grid: Grid, dtype=np.complex128) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape, dtype=dtype))

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())


def make_grid(n: int, L: float, N: int) -> Grid:
    """Validated grid constructor.

    Requires n in {1, 2}, L and N powers of two, N >= 16, and enough points
    that level-0 cubes hold at least 4 grid points per axis (v_max >= 0).
    """
    if n not in (1, 2):
        raise InvalidConfiguration(f"dimension n={n} not supported (use 1 or 2)")
    if not _is_power_of_two(L):
        raise InvalidConfiguration(f"box half-length L={L} must be a power of two")
    if not (isinstance(N, (int, np.integer)) and N >= 16 and _is_power_of_two(N)):
        raise InvalidConfiguration(f"N={N} must be a power-of-two integer >= 16")
    if N < 8 * L:
        raise InvalidConfiguration(
            f"N={N} under-resolves the box: need N >= 8L = {8*L} so level-0 cubes hold 4 cells"
        )
    return Grid(n=int(n), L=float(L), N=int(N))


def enumerate_cubes(grid: Grid, v: int) -> list[DyadicCube]:
    """All dyadic cubes of level v inside the box, in index order."""
    grid.check_level(v)
    top = grid.cubes_per_axis(v)
    if grid.n == 1:
        return [DyadicCube(v, (m,)) for m in range(top)]
    return [DyadicCube(v, (m0, m1)) for m0 in range(top) for m1 in range(top)]


def cube_mask(grid: Grid, cube: DyadicCube) -> np.ndarray:
    """Boolean indicator of the cube's grid cells; exact by cell alignment."""
    grid.check_level(cube.v)
    mask = np.zeros(grid.shape, dtype=bool)
    mask[grid.cube_slices(cube)] = True
    return mask


def cube_sums(grid: Grid, values: np.ndarray, v: int) -> np.ndarray:
    """Per-cube cell sums at level v, shape (cubes_per_axis,)*n.

    Multiply by h^n for the per-cube integral; cube (m0, m1) lands at
    index [m0, m1].
    """
    grid.check_level(v)
    if values.shape != grid.shape:
        raise InvalidInput(f"expected array of shape {grid.shape}, got {values.shape}")
    C = grid.cubes_per_axis(v)
    c = grid.cells_per_axis(v)
    if grid.n == 1:
        return values.reshape(C, c).sum(axis=1)
    return values.reshape(C, c, C, c).sum(axis=(1, 3))


def cube_broadcast(grid: Grid, per_cube: np.ndarray, v: int) -> np.ndarray:
    """Expand one value per level-v cube back to full grid shape."""
    grid.check_level(v)
    c = grid.cells_per_axis(v)
    out = np.repeat(np.asarray(per_cube), c, axis=0)
    if grid.n == 2:
        out = np.repeat(out, c, axis=1)
    if out.shape != grid.shape:
        raise InvalidInput(f"per-cube array of shape {np.shape(per_cube)} does not tile level {v}")
    return out
