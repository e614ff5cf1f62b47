"""Uniform grids and boolean set rasters: filled Julia sets, their
boundaries, parameter-space (Mandelbrot-type) sets, rotations and rasterized
analytic targets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .dynamics import (
    EscapeSpec,
    MapFamily,
    PerturbedPower,
    PowerPoly,
    RealPower,
    escape_radius,
    family_kind,
    family_name,
)
from .geometry import TargetSet, distance_to_target, format_complex, is_curve


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid of ``nx`` by ``ny`` cells; cell (i, j) has its center at
    ``(x_min + (i + 1/2) dx, y_min + (j + 1/2) dy)``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        for v in (self.x_min, self.x_max, self.y_min, self.y_max):
            if not math.isfinite(v):
                raise ValueError("grid bounds must be finite")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid needs x_min < x_max and y_min < y_max")
        if int(self.nx) != self.nx or int(self.ny) != self.ny or self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs positive integer nx, ny")
        for name in ("x_min", "x_max", "y_min", "y_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))

    @classmethod
    def square(cls, half: float, n: int) -> "GridSpec":
        return cls(-half, half, -half, half, n, n)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def cell_diag(self) -> float:
        return math.hypot(self.dx, self.dy)

    @property
    def symmetric(self) -> bool:
        return self.x_min == -self.x_max and self.y_min == -self.y_max

    def x_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def centers(self) -> np.ndarray:
        """Complex cell centers, shape (ny, nx); row 0 is the bottom row."""
        return self.x_centers()[None, :] + 1j * self.y_centers()[:, None]

    def max_modulus(self) -> float:
        return max(math.hypot(x, y) for x in (self.x_min, self.x_max) for y in (self.y_min, self.y_max))

    def as_dict(self) -> dict:
        return {
            "x_min": self.x_min, "x_max": self.x_max, "y_min": self.y_min,
            "y_max": self.y_max, "nx": self.nx, "ny": self.ny,
        }


@dataclass(frozen=True, eq=False)
class SetRaster:
    """Boolean mask over a grid; ``mask[j, i]`` is cell (i, j)."""

    grid: GridSpec
    mask: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool)
        if m.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(f"mask shape {m.shape} does not match grid ({self.grid.ny}, {self.grid.nx})")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    def __eq__(self, other):
        if not isinstance(other, SetRaster):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.mask, other.mask)

    __hash__ = None

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def empty(self) -> bool:
        return not self.mask.any()

    def set_centers(self) -> np.ndarray:
        """Complex centers of set cells (row-major order)."""
        j, i = np.nonzero(self.mask)
        g = self.grid
        return (g.x_min + (i + 0.5) * g.dx) + 1j * (g.y_min + (j + 0.5) * g.dy)


def family_descriptor(f: MapFamily) -> dict:
    if isinstance(f, PowerPoly):
        return {"family": "P", "n": f.n, "c": format_complex(f.c)}
    if isinstance(f, RealPower):
        return {"family": "F", "t": f.t, "c": format_complex(f.c)}
    return {"family": "R", "n": f.n, "c": format_complex(f.c), "a": format_complex(f.a)}


def _params(f: MapFamily):
    a = f.a if isinstance(f, PerturbedPower) else 0j
    n = getattr(f, "n", 2)
    t = getattr(f, "t", 0.0)
    return a, int(n), float(t)


def _check_radius(required: float, spec: EscapeSpec):
    if spec.radius < required:
        raise ValueError(
            f"escape radius {spec.radius} is below the certified bound {required}; "
            "escapes would not be conclusive"
        )


SAMPLING_MODES = ("center", "cell")


def filled_julia_raster(
    f: MapFamily,
    grid: GridSpec,
    spec: Optional[EscapeSpec] = None,
    sampling: str = "center",
) -> SetRaster:
    """Rasterize K(f).

    ``sampling="center"`` sets a cell iff the orbit of its center stays
    bounded. ``sampling="cell"`` clears a cell only when the whole cell is
    certified to escape (disk arithmetic on the cell's circumscribed disk),
    so thin or totally disconnected sets (Cantor dust) keep the cells they
    pass through. Cell mode is always a superset of center mode.
    """
    spec = spec or EscapeSpec.for_family(f)
    _check_radius(escape_radius(f), spec)
    if sampling not in SAMPLING_MODES:
        raise ValueError(f"sampling must be one of {SAMPLING_MODES}, got {sampling!r}")
    z = grid.centers().reshape(-1)
    a, n, t = _params(f)
    kind = family_kind(f)
    zr = np.ascontiguousarray(z.real)
    zi = np.ascontiguousarray(z.imag)
    if sampling == "center":
        size = z.size
        steps = kernels.escape_steps(
            kind, zr, zi,
            np.full(size, f.c.real), np.full(size, f.c.imag),
            np.full(size, a.real), np.full(size, a.imag),
            n, t, spec.radius, spec.max_iter,
        )
        mask = steps == -1
    else:
        mask = kernels.cell_undecided(
            kind, zr, zi, 0.5 * grid.cell_diag, f.c.real, f.c.imag, a.real, a.imag,
            n, t, spec.radius, spec.max_iter,
        ).astype(bool)
    meta = {
        "kind": "filled_julia",
        **family_descriptor(f),
        "radius": spec.radius,
        "max_iter": spec.max_iter,
        "sampling": sampling,
    }
    return SetRaster(grid, mask.reshape(grid.ny, grid.nx), meta)


def boundary_raster(r: SetRaster) -> SetRaster:
    """Set cells with an unset 8-neighbor; set cells on the grid edge count."""
    m = r.mask
    padded = np.pad(m, 1, constant_values=False)
    ny, nx = m.shape
    interior = np.ones_like(m)
    for dj in (-1, 0, 1):
        for di in (-1, 0, 1):
            if dj or di:
                interior &= padded[1 + dj : 1 + dj + ny, 1 + di : 1 + di + nx]
    return SetRaster(r.grid, m & ~interior, {**r.meta, "kind": "boundary"})


PARAMETER_MODES = ("one", "both")


def parameter_escape_radius(template: MapFamily, grid: GridSpec) -> float:
    """Certified escape radius valid for every parameter on the grid."""
    p = grid.max_modulus()
    if isinstance(template, PowerPoly):
        return escape_radius(PowerPoly(template.n, p))
    if isinstance(template, RealPower):
        return escape_radius(RealPower(template.t, p))
    return escape_radius(PerturbedPower(template.n, abs(template.c), max(p, 1e-300)))


def parameter_raster(
    template: MapFamily,
    grid: GridSpec,
    spec: Optional[EscapeSpec] = None,
    mode: str = "one",
    check_symmetry: bool = False,
    members: Optional[Sequence[complex]] = None,
) -> SetRaster:
    """Parameter-space set over ``grid``.

    PowerPoly / RealPower: the grid sweeps c (template c ignored) and a cell is
    set iff the orbit of 0 stays bounded. PerturbedPower: the grid sweeps a
    (template a ignored, c kept). With c = 0 only v+ = 2√a is followed since
    v- mirrors it; ``check_symmetry`` follows both and asserts agreement.
    With c != 0, ``mode="one"`` keeps cells where at least one critical orbit
    is bounded and ``mode="both"`` where both are. The a = 0 cell is never set.

    ``members`` are parameters known to belong to the set (a critical orbit
    that is exactly periodic); the cells containing them are set as well, so
    components narrower than a cell are not lost between centers.
    """
    if mode not in PARAMETER_MODES:
        raise ValueError(f"mode must be one of {PARAMETER_MODES}, got {mode!r}")
    spec = spec or EscapeSpec(parameter_escape_radius(template, grid), 256)
    _check_radius(parameter_escape_radius(template, grid), spec)
    p = grid.centers().reshape(-1)
    size = p.size
    kind = family_kind(template)
    zeros = np.zeros(size)
    _, n, t = _params(template)
    meta = {
        "kind": "parameter",
        "family": family_name(template),
        "radius": spec.radius,
        "max_iter": spec.max_iter,
    }

    def run(z0, cr, ci, ar, ai):
        return kernels.escape_steps(
            kind, np.ascontiguousarray(z0.real), np.ascontiguousarray(z0.imag),
            cr, ci, ar, ai, n, t, spec.radius, spec.max_iter,
        ) == -1

    if not isinstance(template, PerturbedPower):
        meta["sweep"] = "c"
        if isinstance(template, RealPower):
            meta["t"] = t
        else:
            meta["n"] = n
        mask = run(np.zeros(size, dtype=complex), np.ascontiguousarray(p.real),
                   np.ascontiguousarray(p.imag), zeros, zeros)
        return _with_members(grid, mask, meta, members)

    c = template.c
    meta.update({"sweep": "a", "n": n, "c": format_complex(c), "mode": mode})
    root = 2.0 * np.sqrt(p)
    cr, ci = np.full(size, c.real), np.full(size, c.imag)
    ar, ai = np.ascontiguousarray(p.real), np.ascontiguousarray(p.imag)
    plus = run(c + root, cr, ci, ar, ai)
    if c == 0 and not check_symmetry:
        mask = plus
    else:
        minus = run(c - root, cr, ci, ar, ai)
        if c == 0:
            if not np.array_equal(plus, minus):
                raise AssertionError("v+ and v- orbits disagree at c = 0")
            mask = plus
        else:
            mask = (plus | minus) if mode == "one" else (plus & minus)
    mask &= p != 0
    return _with_members(grid, mask, meta, members)


def cell_index(grid: GridSpec, z: complex) -> Optional[tuple[int, int]]:
    """(i, j) of the cell containing ``z``, or None outside the grid."""
    i = math.floor((z.real - grid.x_min) / grid.dx)
    j = math.floor((z.imag - grid.y_min) / grid.dy)
    if 0 <= i < grid.nx and 0 <= j < grid.ny:
        return i, j
    return None


def _with_members(grid, mask, meta, members):
    mask = mask.reshape(grid.ny, grid.nx)
    if members is not None:
        added = 0
        for z in members:
            ij = cell_index(grid, complex(z))
            if ij is not None and not mask[ij[1], ij[0]]:
                mask[ij[1], ij[0]] = True
                added += 1
        meta["seeded_cells"] = added
    return SetRaster(grid, mask, meta)


def rotate_raster(r: SetRaster, angle: float) -> SetRaster:
    """Cell set iff its center rotated by ``-angle`` falls in a set cell of ``r``."""
    g = r.grid
    if not g.symmetric:
        raise ValueError("rotation needs a grid symmetric about the origin")
    ca, sa = math.cos(angle), math.sin(angle)
    x = g.x_centers()[None, :]
    y = g.y_centers()[:, None]
    wx = x * ca + y * sa
    wy = -x * sa + y * ca
    i = np.floor((wx - g.x_min) / g.dx).astype(np.int64)
    j = np.floor((wy - g.y_min) / g.dy).astype(np.int64)
    ok = (i >= 0) & (i < g.nx) & (j >= 0) & (j < g.ny)
    out = np.zeros((g.ny, g.nx), dtype=bool)
    out[ok] = r.mask[j[ok], i[ok]]
    return SetRaster(g, out, {**r.meta, "rotated_by": angle})


def target_raster(target: TargetSet, grid: GridSpec) -> SetRaster:
    """Curves: cells within half a cell diagonal of the curve. Areas: cells
    whose center lies in the set."""
    d = distance_to_target(grid.centers(), target)
    mask = d <= 0.5 * grid.cell_diag if is_curve(target) else d == 0.0
    return SetRaster(grid, mask, {"kind": "target"})
