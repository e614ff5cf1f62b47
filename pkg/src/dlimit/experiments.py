"""Convergence sweeps over the degree and probes that measure empirical
thresholds N.

A sweep renders one raster per degree, measures its Hausdorff distance to the
limiting set and returns a table. Probes report per-degree containment or
membership and the smallest tested degree from which it holds onward.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import io as dio
from .dynamics import (
    EscapeSpec,
    PerturbedPower,
    PowerPoly,
    RealPower,
    escape_radius,
    iterate_orbit,
)
from .geometry import (
    Circle,
    ClosedDisk,
    Limacon,
    TargetSet,
    critical_fixed_solutions,
    format_complex,
    parse_complex,
    parse_target,
    roots_of_minus_one,
    superattracting_center,
    target_label,
)
from .hausdorff import hausdorff_to_target
from .raster import (
    GridSpec,
    SetRaster,
    boundary_raster,
    filled_julia_raster,
    parameter_escape_radius,
    parameter_raster,
)

CSV_HEADER = ("sweep_value", "d_a_to_b", "d_b_to_a", "d_h", "set_cells", "elapsed_ms")
SWEEP_KINDS = ("julia", "mandelbrot")
MANDELBROT_FAMILIES = ("P", "F", "R0", "Rc")


@dataclass(frozen=True)
class ConvergenceRow:
    value: float
    d_a_to_b: float
    d_b_to_a: float
    d_h: float
    set_cells: int
    elapsed_ms: float


def trend_ok(values: Sequence[float], jitter: float) -> bool:
    """Last below first, and no step up by more than ``jitter``."""
    if len(values) < 2:
        return True
    steps_ok = all(b - a <= jitter for a, b in zip(values, values[1:]))
    return steps_ok and values[-1] < values[0]


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


@dataclass
class SweepTable:
    label: str
    target: TargetSet
    cell_diag: float
    rows: list = field(default_factory=list)
    rasters: dict = field(default_factory=dict)
    report_only: bool = False

    @property
    def d_h(self) -> list[float]:
        return [r.d_h for r in self.rows]

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    def trend_ok(self) -> bool:
        return trend_ok(self.d_h, 2.0 * self.cell_diag)

    def strictly_decreasing(self) -> bool:
        return strictly_decreasing(self.d_h)

    def footer(self) -> str:
        return (f"# target {target_label(self.target)}; trend tolerance 2*cell_diag = "
                f"{2.0 * self.cell_diag!r}; trend {'ok' if self.trend_ok() else 'FAILED'}"
                + ("; report only" if self.report_only else ""))

    def csv_bytes(self, deterministic: bool = False) -> bytes:
        rows = [
            (_value_text(r.value), r.d_a_to_b, r.d_b_to_a, r.d_h, r.set_cells,
             None if deterministic else r.elapsed_ms)
            for r in self.rows
        ]
        return dio.encode_csv(CSV_HEADER, rows)


def _value_text(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _check_values(values: Sequence[float], integer: bool):
    if not values:
        raise ValueError("sweep needs at least one value")
    for v in values:
        if v < 2 or (integer and int(v) != v):
            raise ValueError(f"sweep values must be {'integers ' if integer else ''}>= 2, got {v!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be strictly increasing")


def _measure(table: SweepTable, value, make_raster: Callable[[], SetRaster], keep: bool):
    t0 = time.perf_counter()
    r = make_raster()
    if r.empty:
        rep_ab = rep_ba = rep_h = math.inf
    else:
        rep = hausdorff_to_target(r, table.target)
        rep_ab, rep_ba, rep_h = rep.d_a_to_b, rep.d_b_to_a, rep.d_h
    elapsed = (time.perf_counter() - t0) * 1e3
    table.rows.append(ConvergenceRow(value, rep_ab, rep_ba, rep_h, r.count, elapsed))
    if keep:
        table.rasters[value] = r


def julia_target(c: complex, which: str) -> TargetSet:
    if which == "J" or abs(c) > 1:
        return Circle(1.0)
    return ClosedDisk(1.0)


def julia_convergence_sweep(
    c: complex,
    n_list: Sequence[int],
    grid: GridSpec,
    max_iter: int = 512,
    which: str = "J",
    a: Optional[complex] = None,
    sampling: str = "cell",
    target: Optional[TargetSet] = None,
    keep_rasters: bool = False,
) -> SweepTable:
    """K or J of z^n + c (or z^n + c + a/z^n when ``a`` is given) against its
    limit: J -> unit circle; K -> unit circle for |c| > 1, closed unit disk for
    |c| < 1. |c| = 1 runs in report-only mode."""
    if which not in ("K", "J"):
        raise ValueError(f"which must be 'K' or 'J', got {which!r}")
    _check_values(n_list, integer=True)
    c = complex(c)
    target = target or julia_target(c, which)
    label = f"julia {which} c={format_complex(c)}" + ("" if a is None else f" a={format_complex(a)}")
    table = SweepTable(label, target, grid.cell_diag, report_only=abs(abs(c) - 1.0) < 1e-12)
    for n in n_list:
        f = PowerPoly(n, c) if a is None else PerturbedPower(n, c, a)
        spec = EscapeSpec.for_family(f, max_iter)

        def make(f=f, spec=spec):
            k = filled_julia_raster(f, grid, spec, sampling)
            return boundary_raster(k) if which == "J" else k

        _measure(table, n, make, keep_rasters)
    return table


def mandelbrot_template(kind: str, value, c: Optional[complex] = None):
    if kind == "P":
        return PowerPoly(int(value))
    if kind == "F":
        return RealPower(float(value))
    if kind == "R0":
        return PerturbedPower(int(value), 0j, 1.0)
    if kind == "Rc":
        if c is None or complex(c) == 0:
            raise ValueError("family Rc needs a nonzero c")
        return PerturbedPower(int(value), complex(c), 1.0)
    raise ValueError(f"unknown parameter family {kind!r}; expected one of {MANDELBROT_FAMILIES}")


def certified_members(kind: str, n: int, c: Optional[complex] = None, mode: str = "one") -> list:
    """Parameters whose free critical orbit is exactly periodic, hence members:
    P: 0 and the (n-1)-th roots of -1; R0: the centers a_n^k; Rc (mode "one"):
    a = w^{2n} for every root w of 2w^n - w + c, which fixes the critical point w."""
    if kind == "P":
        return [0j] + roots_of_minus_one(n)
    if kind == "R0" and n >= 3:
        return [superattracting_center(n, k) for k in range(n - 1)]
    if kind == "Rc" and mode == "one":
        return [s.a for s in critical_fixed_solutions(n, complex(c))]
    return []


def mandelbrot_target(kind: str, c: Optional[complex] = None) -> TargetSet:
    if kind in ("P", "F"):
        return ClosedDisk(1.0)
    if kind == "R0":
        return Circle(0.25)
    return Limacon(complex(c))


def mandelbrot_convergence_sweep(
    kind: str,
    values: Sequence[float],
    grid: GridSpec,
    max_iter: int = 256,
    c: Optional[complex] = None,
    mode: str = "one",
    target: Optional[TargetSet] = None,
    keep_rasters: bool = False,
    seed_members: bool = False,
) -> SweepTable:
    """Parameter sets M_n against their limits: P, F -> closed unit disk,
    R0 -> circle of radius 1/4, Rc -> the limaçon of c. With
    ``seed_members`` the cells holding :func:`certified_members` are set."""
    if kind not in MANDELBROT_FAMILIES:
        raise ValueError(f"unknown parameter family {kind!r}; expected one of {MANDELBROT_FAMILIES}")
    _check_values(values, integer=kind != "F")
    target = target or mandelbrot_target(kind, c)
    label = f"mandelbrot {kind}" + ("" if kind != "Rc" else f" c={format_complex(complex(c))}")
    table = SweepTable(label, target, grid.cell_diag)
    for v in values:
        tpl = mandelbrot_template(kind, v, c)
        spec = EscapeSpec(parameter_escape_radius(tpl, grid), max_iter)
        seeds = certified_members(kind, int(v), c, mode) if seed_members and kind != "F" else None
        _measure(table, v, lambda tpl=tpl, spec=spec, seeds=seeds:
                 parameter_raster(tpl, grid, spec, mode, members=seeds), keep_rasters)
    return table


# -- probes --------------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusRow:
    n: int
    contained: bool
    interior_covered: Optional[bool]
    min_modulus: float
    max_modulus: float
    eps: float


@dataclass
class AnnulusProbe:
    inner: float
    outer: float
    cell_diag: float
    rows: list

    @property
    def empirical_n(self) -> Optional[int]:
        """Smallest tested n from which every later row holds."""
        return _first_holding(self.rows, lambda r: r.contained and r.interior_covered is not False)

    def eps(self, n: int) -> float:
        return next(r.eps for r in self.rows if r.n == n)


def _first_holding(rows, ok) -> Optional[int]:
    best = None
    for row in reversed(rows):
        if not ok(row):
            break
        best = row.n
    return best


def annulus_containment_probe(
    producer: Callable[[int], SetRaster],
    n_list: Sequence[int],
    inner: float,
    outer: float,
    interior: Optional[float] = None,
    boundary_only: bool = False,
) -> AnnulusProbe:
    """Per n, whether every set cell center lies in inner <= |z| <= outer
    (slack: one cell diagonal). With ``interior`` also checks that every cell
    with |center| <= interior is set. ``eps`` is the largest deviation of a
    set cell's modulus from the mid radius (inner + outer) / 2."""
    if not 0 <= inner <= outer:
        raise ValueError("annulus needs 0 <= inner <= outer")
    _check_values(n_list, integer=True)
    rows = []
    cell_diag = math.nan
    mid = 0.5 * (inner + outer)
    for n in n_list:
        r = producer(n)
        cell_diag = r.grid.cell_diag
        interior_ok = None
        if interior is not None:
            inside = np.abs(r.grid.centers()) <= interior
            interior_ok = bool(r.mask[inside].all())
        test = boundary_raster(r) if boundary_only else r
        mods = np.abs(test.set_centers())
        if mods.size == 0:
            rows.append(AnnulusRow(n, True, interior_ok, math.nan, math.nan, 0.0))
            continue
        contained = bool(mods.min() >= inner - cell_diag and mods.max() <= outer + cell_diag)
        eps = float(np.max(np.abs(mods - mid)))
        rows.append(AnnulusRow(n, contained, interior_ok, float(mods.min()), float(mods.max()), eps))
    return AnnulusProbe(inner, outer, cell_diag, rows)


def julia_annulus_probe(
    c: complex, eta: float, n_list: Sequence[int], grid: GridSpec,
    max_iter: int = 512, sampling: str = "cell",
) -> AnnulusProbe:
    """K(z^n + c) against A(1 - eta/2, 1 + eta/2). For |c| < 1 the boundary
    is tested against the annulus and D_{1 - eta/2} must be covered."""
    c = complex(c)
    if not 0 < eta <= abs(abs(c) - 1.0):
        raise ValueError(f"eta must lie in (0, ||c| - 1|] = (0, {abs(abs(c) - 1.0)!r}], got {eta!r}")
    inside = abs(c) < 1

    def produce(n):
        f = PowerPoly(n, c)
        return filled_julia_raster(f, grid, EscapeSpec.for_family(f, max_iter), sampling)

    return annulus_containment_probe(
        produce, n_list, 1 - eta / 2, 1 + eta / 2,
        interior=(1 - eta / 2) if inside else None, boundary_only=inside,
    )


def r0_annulus_probe(eps: float, n_list: Sequence[int], grid: GridSpec, max_iter: int = 256) -> AnnulusProbe:
    """M_n(R_0) against A(1/4 - eps, 1/4 + eps); rows report the measured eps."""
    if not 0 < eps < 0.25:
        raise ValueError(f"eps must lie in (0, 1/4), got {eps!r}")

    def produce(n):
        tpl = PerturbedPower(n, 0j, 1.0)
        return parameter_raster(tpl, grid, EscapeSpec(parameter_escape_radius(tpl, grid), max_iter))

    return annulus_containment_probe(produce, n_list, 0.25 - eps, 0.25 + eps)


@dataclass(frozen=True)
class MembershipRow:
    n: int
    member: bool
    certified: bool
    residual: float


def boundary_circle_probe(c: complex, n_list: Sequence[int], max_iter: int = 512) -> list[MembershipRow]:
    """Per n: is c in M_n(P) (orbit of 0 bounded for ``max_iter`` steps), and is
    c an exact solution of c^n + c = 0, which makes membership certain."""
    c = complex(c)
    if not abs(abs(c) - 1.0) < 1e-12:
        raise ValueError(f"boundary probe needs |c| = 1, got |c| = {abs(c)!r}")
    _check_values(n_list, integer=True)
    out = []
    for n in n_list:
        f = PowerPoly(n, c)
        residual = abs(c**n + c)
        member = iterate_orbit(f, 0j, EscapeSpec(escape_radius(f), max_iter)).bounded
        out.append(MembershipRow(n, member, residual < 1e-12, residual))
    return out


@dataclass(frozen=True)
class EmptinessRow:
    n: int
    set_cells: int


@dataclass
class EmptinessProbe:
    c: complex
    rows: list

    @property
    def threshold(self) -> Optional[int]:
        return _first_holding(self.rows, lambda r: r.set_cells == 0)


def m2_emptiness_probe(c: complex, n_list: Sequence[int], grid: GridSpec, max_iter: int = 256) -> EmptinessProbe:
    """Set-cell count of M^2_n(R_c) (both critical orbits bounded) per n."""
    c = complex(c)
    if not abs(c) > 1:
        raise ValueError(f"M^2 emptiness needs |c| > 1, got |c| = {abs(c)!r}")
    _check_values(n_list, integer=True)
    rows = []
    for n in n_list:
        tpl = PerturbedPower(n, c, 1.0)
        spec = EscapeSpec(parameter_escape_radius(tpl, grid), max_iter)
        rows.append(EmptinessRow(n, parameter_raster(tpl, grid, spec, mode="both").count))
    return EmptinessProbe(c, rows)


# -- config-driven runs ---------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce a sweep; mirrors the JSON config keys."""

    kind: str
    family: str
    values: tuple
    grid: GridSpec
    max_iter: int = 512
    c: complex = 0j
    a: Optional[complex] = None
    which: str = "J"
    mode: str = "one"
    sampling: str = "cell"
    seed_members: bool = False
    target: Optional[str] = None
    out_csv: Optional[str] = None
    out_dir: Optional[str] = None
    manifest: Optional[str] = None
    deterministic: bool = False

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"kind must be one of {SWEEP_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "c", complex(self.c))
        if self.a is not None:
            object.__setattr__(self, "a", complex(self.a))
        if self.target is not None:
            parse_target(self.target)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        g = d.pop("grid", None)
        if g is None:
            raise ValueError("config needs a grid")
        if isinstance(g, dict):
            grid = GridSpec(**g)
        elif len(g) in (5, 6):  # [x_min, y_min, x_max, y_max, nx(, ny)]
            grid = GridSpec(g[0], g[2], g[1], g[3], g[4], g[-1])
        else:
            raise ValueError("grid must be an object or [x_min, y_min, x_max, y_max, nx, ny]")
        for key in ("c", "a"):
            if isinstance(d.get(key), str):
                d[key] = parse_complex(d[key])
        known = set(cls.__dataclass_fields__) - {"grid"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(grid=grid, **d)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "family": self.family, "values": list(self.values),
            "grid": self.grid.as_dict(), "max_iter": self.max_iter,
            "c": format_complex(self.c), "a": None if self.a is None else format_complex(self.a),
            "which": self.which, "mode": self.mode, "sampling": self.sampling,
            "seed_members": self.seed_members,
            "target": self.target, "out_csv": self.out_csv, "out_dir": self.out_dir,
            "manifest": self.manifest, "deterministic": self.deterministic,
        }


def run_sweep(cfg: SweepConfig) -> SweepTable:
    """Run a configured sweep and write whatever outputs it names."""
    target = parse_target(cfg.target) if cfg.target else None
    keep = cfg.out_dir is not None
    if cfg.kind == "julia":
        if cfg.family not in ("P", "R"):
            raise ValueError(f"julia sweeps support families P and R, got {cfg.family!r}")
        if cfg.family == "R" and cfg.a is None:
            raise ValueError("family R needs a")
        table = julia_convergence_sweep(
            cfg.c, cfg.values, cfg.grid, cfg.max_iter, cfg.which,
            cfg.a if cfg.family == "R" else None, cfg.sampling, target, keep,
        )
    else:
        table = mandelbrot_convergence_sweep(
            cfg.family, cfg.values, cfg.grid, cfg.max_iter,
            cfg.c if cfg.family == "Rc" else None, cfg.mode, target, keep, cfg.seed_members,
        )
    if cfg.out_csv:
        dio.atomic_write(cfg.out_csv, table.csv_bytes(cfg.deterministic))
    files = []
    if cfg.out_dir:
        for v, r in table.rasters.items():
            path = os.path.join(cfg.out_dir, f"{cfg.kind}_{cfg.family}_{_value_text(v)}.pgm")
            dio.write_raster(r, path)
            files.append(path)
    if cfg.manifest:
        dio.write_json(cfg.manifest, {
            "config": cfg.to_dict(),
            "target": target_label(table.target),
            "cell_diag": table.cell_diag,
            "trend_ok": table.trend_ok(),
            "report_only": table.report_only,
            "rasters": files,
        })
    return table
