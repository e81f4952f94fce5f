"""Dyadic coefficient sequences and their weighted sequence-space norms.

A coefficient set assigns a complex number to finitely many dyadic cubes
Q_{v,m}.  Its norm routes every level through the weighted indicator sum
F_v(x) = sum_m 2^{v(alpha(x)+n/2)} |lam_{v,m}| chi_{v,m}(x) and hands the
family to the mixed Lebesgue norm; the endpoint space replaces the outer
norm by a supremum of cube-averaged tail sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import InvalidInput, InvalidSelection
from .exponents import ExponentField
from .grid import Grid, GridFunction, cube_sums
from .lebesgue import DEFAULT_TOL, NormResult, mixed_norm

__all__ = [
    "DyadicCoefficients",
    "SubsetSelection",
    "level_function",
    "f_norm",
    "dyadic_tail_sup",
    "f_infty_norm",
    "coefficient_bound_check",
    "full_selection",
    "greedy_selection",
    "f_infty_subset_norm",
    "prop1_equivalence_check",
]

Key = tuple[int, tuple[int, ...]]

# cell budget for the subset-selection search routes
GREEDY_CELL_LIMIT = 2 ** 20


def _normalize_key(v, m) -> tuple[int, tuple[int, ...]]:
    if isinstance(m, (int, np.integer)):
        m = (m,)
    return int(v), tuple(int(mi) for mi in m)


@dataclass
class DyadicCoefficients:
    """Finitely supported map (v, m) -> complex on the grid's dyadic cubes.

    Entries with value exactly zero are dropped, so `support()` is the set
    of nonzero coefficients.  Phases are kept; norms only read moduli.
    """

    grid: Grid
    V: int
    data: dict[Key, complex] = dc_field(repr=False)

    def __post_init__(self) -> None:
        self.V = int(self.V)
        self.grid.check_level(self.V)
        clean: dict[Key, complex] = {}
        for (v, m), raw in self.data.items():
            v, m = _normalize_key(v, m)
            val = complex(raw)
            if not (math.isfinite(val.real) and math.isfinite(val.imag)):
                raise InvalidInput(f"coefficient at (v={v}, m={m}) is not finite")
            if v > self.V:
                raise InvalidInput(f"coefficient level {v} exceeds declared max level {self.V}")
            self.grid.cube(v, m)  # validates level and index bounds
            if val != 0:
                clean[(v, m)] = val
        self.data = clean

    def items(self) -> list[tuple[Key, complex]]:
        return sorted(self.data.items())

    def support(self) -> list[Key]:
        return sorted(self.data)

    def value(self, v: int, m) -> complex:
        return self.data.get(_normalize_key(v, m), 0.0 + 0.0j)

    def __len__(self) -> int:
        return len(self.data)

    def scaled(self, c: complex) -> "DyadicCoefficients":
        return DyadicCoefficients(self.grid, self.V, {k: c * val for k, val in self.data.items()})

    def restricted(self, keys) -> "DyadicCoefficients":
        """Truncation keeping only the given support keys."""
        wanted = {_normalize_key(v, m) for v, m in keys}
        return DyadicCoefficients(
            self.grid, self.V, {k: val for k, val in self.data.items() if k in wanted}
        )

    def to_records(self) -> list[tuple[int, list[int], float, float]]:
        return [(v, list(m), val.real, val.imag) for (v, m), val in self.items()]

    @classmethod
    def from_records(cls, grid: Grid, V: int, records) -> "DyadicCoefficients":
        data: dict[Key, complex] = {}
        for v, m, re, im in records:
            data[_normalize_key(v, m)] = complex(re, im)
        return cls(grid, V, data)


def _constant_exponent(q) -> float:
    if isinstance(q, ExponentField):
        if not q.is_constant:
            raise InvalidInput("this norm is defined for constant q only")
        q = q.min
    q = float(q)
    if not (0.0 < q < math.inf):
        raise InvalidInput(f"exponent q={q} must lie in (0, inf)")
    return q


def _check_grid(lam: DyadicCoefficients, *fields: ExponentField) -> None:
    for f in fields:
        if f.grid != lam.grid:
            raise InvalidInput("coefficients and exponent fields live on different grids")


def level_function(lam: DyadicCoefficients, alpha: ExponentField, v: int) -> GridFunction:
    """F_v(x) = sum_m 2^{v(alpha(x)+n/2)} |lam_{v,m}| chi_{v,m}(x)."""
    grid = lam.grid
    amp = np.zeros(grid.shape)
    for (lv, m), val in lam.data.items():
        if lv == v:
            amp[grid.cube_slices(grid.cube(lv, m))] = abs(val)
    n = grid.n
    return GridFunction(grid, amp * np.exp2(v * (alpha.values + 0.5 * n)))


def f_norm(lam: DyadicCoefficients, alpha: ExponentField, p: ExponentField,
           q: ExponentField, tol: float = DEFAULT_TOL) -> NormResult:
    """Sequence-space norm: mixed (p, q) norm of the weighted level functions."""
    _check_grid(lam, alpha, p, q)
    family = [level_function(lam, alpha, v) for v in range(lam.V + 1)]
    return mixed_norm(family, p, q, tol=tol)


def _level_integrand(lam: DyadicCoefficients, alpha: ExponentField, v: int,
                     q: float) -> np.ndarray:
    # 2^{v(alpha(x)+n/2)q} sum_m |lam_{v,m}|^q chi_{v,m}(x)
    grid = lam.grid
    amp = np.zeros(grid.shape)
    for (lv, m), val in lam.data.items():
        if lv == v:
            amp[grid.cube_slices(grid.cube(lv, m))] = abs(val) ** q
    return amp * np.exp2(v * q * (alpha.values + 0.5 * grid.n))


def dyadic_tail_sup(grid: Grid, integrands, q: float) -> float:
    """sup over dyadic cubes Q of side <= 1 of |Q|^{-1/q} (sum_{v >= level(Q)} int_Q G_v)^{1/q}.

    `integrands` lists the level arrays G_v for v = 0..V; the tail is cut
    exactly at V.  Levels finer than V contribute empty tails and are skipped.
    """
    hn = grid.h ** grid.n
    n = grid.n
    tail = np.zeros(grid.shape)
    best = 0.0
    # suffix-accumulate the level integrands so level-w cubes see sum_{v>=w}
    for w in range(len(integrands) - 1, -1, -1):
        tail = tail + integrands[w]
        per_cube = cube_sums(grid, tail, w) * hn
        top = float(per_cube.max())
        if top > 0.0:
            best = max(best, 2.0 ** (w * n / q) * top ** (1.0 / q))
    return best


def f_infty_norm(lam: DyadicCoefficients, alpha: ExponentField, q) -> float:
    """Endpoint norm: sup over dyadic cubes Q of side <= 1 of the averaged tail

    |Q|^{-1/q} (sum_{v >= level(Q)} int_Q 2^{v(alpha(x)+n/2)q} |lam|^q chi)^{1/q},
    the tail cut exactly at the coefficient max level.
    """
    q = _constant_exponent(q)
    _check_grid(lam, alpha)
    if not lam.data:
        return 0.0
    levels = [_level_integrand(lam, alpha, v, q) for v in range(lam.V + 1)]
    return dyadic_tail_sup(lam.grid, levels, q)


def coefficient_bound_check(lam: DyadicCoefficients, alpha: ExponentField,
                            p: ExponentField, q: ExponentField) -> float:
    """Worst ratio |lam_{j,m}| 2^{j(alpha(x)-n/p(x)+n/2)} / f_norm over support and x in Q."""
    _check_grid(lam, alpha, p, q)
    norm = f_norm(lam, alpha, p, q).value
    if norm == 0.0:
        raise InvalidInput("coefficient bound is undefined for zero norm")
    grid = lam.grid
    n = grid.n
    worst = 0.0
    for (j, m), val in lam.items():
        sl = grid.cube_slices(grid.cube(j, m))
        expo = alpha.values[sl] - n / p.values[sl] + 0.5 * n
        # j >= 0, so the pointwise max of 2^{j expo} sits at max expo
        worst = max(worst, abs(val) * 2.0 ** (j * float(expo.max())) / norm)
    return worst


@dataclass
class SubsetSelection:
    """Per-cube cell masks E_Q, each covering strictly more than half of Q.

    Masks are stored as boolean blocks in the cube's own cell shape, so the
    subset relation E_Q <= Q holds by construction; only the measure
    condition needs checking.
    """

    grid: Grid
    masks: dict[Key, np.ndarray] = dc_field(repr=False)

    def __post_init__(self) -> None:
        clean: dict[Key, np.ndarray] = {}
        for (v, m), mask in self.masks.items():
            v, m = _normalize_key(v, m)
            cube = self.grid.cube(v, m)
            mask = np.asarray(mask, dtype=bool)
            c = self.grid.cells_per_axis(v)
            if mask.shape != (c,) * self.grid.n:
                raise InvalidSelection(
                    f"mask for (v={v}, m={m}) has shape {mask.shape}, cube block is {(c,) * self.grid.n}"
                )
            measure = int(mask.sum()) * self.grid.h ** self.grid.n
            if not measure > cube.measure() / 2.0:
                raise InvalidSelection(
                    f"selected measure {measure} is not more than half of |Q|={cube.measure()} "
                    f"at (v={v}, m={m})"
                )
            clean[(v, m)] = mask
        self.masks = clean


def full_selection(lam: DyadicCoefficients) -> SubsetSelection:
    """The selection E_Q = Q on every supported cube."""
    grid = lam.grid
    masks = {}
    for (v, m) in lam.support():
        c = grid.cells_per_axis(v)
        masks[(v, m)] = np.ones((c,) * grid.n, dtype=bool)
    return SubsetSelection(grid, masks)


def greedy_selection(lam: DyadicCoefficients, alpha: ExponentField, q) -> SubsetSelection:
    """Keep the floor(cells/2)+1 cells of smallest integrand per cube.

    Ties are broken by cell index (stable sort on the C-order flattening of
    the cube's block).
    """
    q = _constant_exponent(q)
    _check_grid(lam, alpha)
    grid = lam.grid
    n = grid.n
    masks = {}
    for (v, m), val in lam.items():
        sl = grid.cube_slices(grid.cube(v, m))
        block = np.exp2(v * q * (alpha.values[sl] + 0.5 * n)) * abs(val) ** q
        flat = block.ravel()
        keep = flat.size // 2 + 1
        order = np.argsort(flat, kind="stable")
        mask = np.zeros(flat.size, dtype=bool)
        mask[order[:keep]] = True
        masks[(v, m)] = mask.reshape(block.shape)
    return SubsetSelection(grid, masks)


def f_infty_subset_norm(lam: DyadicCoefficients, alpha: ExponentField, q,
                        sel: SubsetSelection) -> float:
    """Grid max of (sum_{v,m} 2^{v(alpha(x)+n/2)q} |lam_{v,m}|^q chi_{E_{v,m}}(x))^{1/q}."""
    q = _constant_exponent(q)
    _check_grid(lam, alpha)
    if sel.grid != lam.grid:
        raise InvalidSelection("selection built on a different grid")
    if set(sel.masks) != set(lam.data):
        raise InvalidSelection("selection must cover exactly the coefficient support")
    if not lam.data:
        return 0.0
    grid = lam.grid
    n = grid.n
    total = np.zeros(grid.shape)
    for (v, m), val in lam.items():
        sl = grid.cube_slices(grid.cube(v, m))
        contrib = np.exp2(v * q * (alpha.values[sl] + 0.5 * n)) * abs(val) ** q
        total[sl] += np.where(sel.masks[(v, m)], contrib, 0.0)
    return float(total.max()) ** (1.0 / q)


def _support_cells(lam: DyadicCoefficients) -> int:
    grid = lam.grid
    return sum(grid.cells_per_axis(v) ** grid.n for (v, _m) in lam.data)


def prop1_equivalence_check(lam: DyadicCoefficients, alpha: ExponentField,
                            q) -> tuple[float, float]:
    """(endpoint norm, best subset value found); their ratio is the recorded bracket.

    The subset route tries the greedy rule and the trivial E = Q selection
    and keeps the smaller value.
    """
    q = _constant_exponent(q)
    _check_grid(lam, alpha)
    if not lam.data:
        return 0.0, 0.0
    if _support_cells(lam) > GREEDY_CELL_LIMIT:
        raise InvalidInput("support too large for the subset search route")
    direct = f_infty_norm(lam, alpha, q)
    best = min(
        f_infty_subset_norm(lam, alpha, q, greedy_selection(lam, alpha, q)),
        f_infty_subset_norm(lam, alpha, q, full_selection(lam)),
    )
    return direct, best
