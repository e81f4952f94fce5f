"""Seeded input generators shared by the experiment driver and the suite.

Every generator is deterministic in (parameters, seed): the draw order is
fixed, so a fixed seed reproduces the corpus item for item.  Coefficient
values follow the documented distribution: log-uniform magnitudes in
[1e-3, 1e3] with uniform phases, support uniform over the valid dyadic
cubes up to the requested level.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import InvalidInput
from .grid import Grid, GridFunction
from .seqspaces import DyadicCoefficients

MAG_LOW = 1.0e-3
MAG_HIGH = 1.0e3
DISTRIBUTIONS = ("log-uniform",)


def valid_cubes(grid: Grid, V: int) -> list[tuple[int, tuple[int, ...]]]:
    """All dyadic keys (j, m) on the grid with level at most V."""
    keys: list[tuple[int, tuple[int, ...]]] = []
    for j in range(int(V) + 1):
        per_axis = grid.cubes_per_axis(j)
        keys.extend((j, m) for m in product(range(per_axis), repeat=grid.n))
    return keys


def random_coefficients(grid: Grid, V: int, count: int, rng,
                        distribution: str = "log-uniform") -> DyadicCoefficients:
    """One coefficient set: `count` draws, later draws overwrite on collision."""
    if distribution not in DISTRIBUTIONS:
        raise InvalidInput(f"unknown coefficient distribution {distribution!r}")
    pool = valid_cubes(grid, V)
    idx = rng.integers(0, len(pool), size=count)
    mags = 10.0 ** rng.uniform(np.log10(MAG_LOW), np.log10(MAG_HIGH), size=count)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=count)
    data = {}
    for k, mag, ph in zip(idx, mags, phases):
        data[pool[k]] = mag * complex(np.cos(ph), np.sin(ph))
    return DyadicCoefficients(grid, V, data)


def coefficient_corpus(grid: Grid, V: int, items: int, count: int, seed: int,
                       distribution: str = "log-uniform") -> list[DyadicCoefficients]:
    rng = np.random.default_rng(seed)
    return [random_coefficients(grid, V, count, rng, distribution) for _ in range(items)]


def random_modes(n: int, L: float, radius: float, count: int, rng) -> dict:
    """Integer Fourier modes k with |pi k / L| <= radius, grid-independent.

    Returned as {k tuple: coefficient}; the same mode set realizes the same
    trigonometric polynomial on every refinement of the box.
    """
    kmax = int(radius * L / np.pi)
    draws = rng.integers(-kmax, kmax + 1, size=(count, n))
    coeffs = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    modes: dict = {}
    for row, c in zip(draws, coeffs):
        if float(np.hypot.reduce(row * np.pi / L)) <= radius:
            modes[tuple(int(k) for k in row)] = c
    return modes


def trig_polynomial(grid: Grid, modes: dict) -> GridFunction:
    """Realize sum_k c_k e^{i pi k.x / L} by placing the modes in FFT bins."""
    spec = np.zeros(grid.shape, dtype=np.complex128)
    for k, c in modes.items():
        if len(k) != grid.n:
            raise InvalidInput(f"mode {k} does not match dimension {grid.n}")
        if any(abs(ki) >= grid.N // 2 for ki in k):
            raise InvalidInput(f"mode {k} is beyond the grid Nyquist index")
        spec[tuple(ki % grid.N for ki in k)] += c
    return GridFunction(grid, np.fft.ifftn(spec) * grid.size)


def mode_corpus(n: int, L: float, radius: float, items: int, count: int,
                seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    return [random_modes(n, L, radius, count, rng) for _ in range(items)]


def band_limited_corpus(grid: Grid, radius: float, items: int, count: int,
                        seed: int) -> list[GridFunction]:
    return [trig_polynomial(grid, modes)
            for modes in mode_corpus(grid.n, grid.L, radius, items, count, seed)]


def simple_function_corpus(grid: Grid, items: int, regions: int,
                           seed: int) -> list[list[tuple[complex, np.ndarray]]]:
    """Simple functions as (value, region mask) lists; regions are disjoint
    cell-aligned slabs along the first axis covering the box."""
    if regions < 1 or regions >= grid.N:
        raise InvalidInput(f"region count {regions} must lie in 1..N-1")
    rng = np.random.default_rng(seed)
    axis = np.arange(grid.N)
    out = []
    for _ in range(items):
        cuts = np.sort(rng.choice(np.arange(1, grid.N), size=regions - 1, replace=False))
        bounds = [0, *cuts.tolist(), grid.N]
        mags = 10.0 ** rng.uniform(np.log10(MAG_LOW), np.log10(MAG_HIGH), size=regions)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=regions)
        pieces = []
        for j in range(regions):
            line = (axis >= bounds[j]) & (axis < bounds[j + 1])
            mask = line if grid.n == 1 else np.broadcast_to(
                line[:, None], grid.shape).copy()
            val = mags[j] * complex(np.cos(phases[j]), np.sin(phases[j]))
            pieces.append((val, mask))
        out.append(pieces)
    return out
