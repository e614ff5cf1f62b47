"""Map families, orbit iteration and critical-orbit classification.

Three families are supported:

* ``PowerPoly(n, c)``        z -> z**n + c            (integer n >= 2)
* ``RealPower(t, c)``        z -> z**t + c            (real t > 1, principal branch)
* ``PerturbedPower(n, c, a)`` z -> z**n + c + a / z**n (a != 0)

All arithmetic is spelled out on (re, im) float pairs in the same operation
order as the grid kernels, so a scalar orbit and the raster cell at the same
point agree bit for bit.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

#: Point at infinity. Absorbing under every map; reported as an escape.
INFINITY = complex(math.inf, math.inf)


def is_infinity(z: complex) -> bool:
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


# -- families ---------------------------------------------------------------


@dataclass(frozen=True)
class PowerPoly:
    n: int
    c: complex = 0j

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"PowerPoly needs integer n >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def degree(self) -> float:
        return float(self.n)


@dataclass(frozen=True)
class RealPower:
    t: float
    c: complex = 0j

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 1):
            raise ValueError(f"RealPower needs real t > 1, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def degree(self) -> float:
        return self.t


@dataclass(frozen=True)
class PerturbedPower:
    n: int
    c: complex = 0j
    a: complex = 1 + 0j

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"PerturbedPower needs integer n >= 2, got {self.n!r}")
        if complex(self.a) == 0:
            raise ValueError("PerturbedPower needs a != 0")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "a", complex(self.a))

    @property
    def degree(self) -> float:
        return float(self.n)


MapFamily = Union[PowerPoly, RealPower, PerturbedPower]

# integer codes shared with the grid kernels
KIND_POWER, KIND_REAL, KIND_PERTURBED = 0, 1, 2


def family_kind(f: MapFamily) -> int:
    if isinstance(f, PowerPoly):
        return KIND_POWER
    if isinstance(f, RealPower):
        return KIND_REAL
    if isinstance(f, PerturbedPower):
        return KIND_PERTURBED
    raise TypeError(f"not a map family: {f!r}")


def family_name(f: MapFamily) -> str:
    return {KIND_POWER: "P", KIND_REAL: "F", KIND_PERTURBED: "R"}[family_kind(f)]


# -- scalar arithmetic (mirrors the kernels) --------------------------------


def _ipow(x: float, y: float, n: int) -> tuple[float, float]:
    """(x + iy)**n by repeated squaring."""
    rx, ry = 1.0, 0.0
    bx, by = x, y
    while True:
        if n & 1:
            rx, ry = rx * bx - ry * by, rx * by + ry * bx
        n >>= 1
        if not n:
            return rx, ry
        bx, by = bx * bx - by * by, bx * by + by * bx


def _rpow(x: float, y: float, t: float) -> tuple[float, float]:
    """Principal-branch (x + iy)**t for (x, y) != 0."""
    r2 = x * x + y * y
    if r2 == 0.0:
        return 0.0, 0.0
    theta = math.atan2(y, x)
    if theta == -math.pi and y == 0.0:
        theta = math.pi
    try:
        m = math.exp(t * (0.5 * math.log(r2)))
    except OverflowError:
        return math.inf, math.inf
    return m * math.cos(t * theta), m * math.sin(t * theta)


def _cdiv(ax: float, ay: float, wx: float, wy: float) -> tuple[float, float]:
    d = wx * wx + wy * wy
    if d == 0.0:
        return math.inf, math.inf
    return (ax * wx + ay * wy) / d, (ay * wx - ax * wy) / d


def principal_power(z: complex, t: float) -> complex:
    """``exp(t * Ln z)`` with ``Arg z`` taken in (-pi, pi].

    ``z = 0`` gives 0 for ``t > 0`` and is a domain error otherwise.
    """
    z = complex(z)
    if z == 0:
        if t > 0:
            return 0j
        raise ValueError(f"0**{t} is undefined")
    return complex(*_rpow(z.real, z.imag, float(t)))


def apply_map(f: MapFamily, z: complex) -> complex:
    z = complex(z)
    if is_infinity(z):
        return INFINITY
    x, y = z.real, z.imag
    if isinstance(f, PowerPoly):
        px, py = _ipow(x, y, f.n)
        return complex(px + f.c.real, py + f.c.imag)
    if isinstance(f, RealPower):
        px, py = _rpow(x, y, f.t)
        return complex(px + f.c.real, py + f.c.imag)
    if isinstance(f, PerturbedPower):
        if x == 0.0 and y == 0.0:
            return INFINITY
        px, py = _ipow(x, y, f.n)
        if px == 0.0 and py == 0.0:
            return INFINITY
        qx, qy = _cdiv(f.a.real, f.a.imag, px, py)
        w = complex(px + f.c.real + qx, py + f.c.imag + qy)
        return INFINITY if is_infinity(w) else w
    raise TypeError(f"not a map family: {f!r}")


# -- escape ------------------------------------------------------------------


def escape_radius(f: MapFamily) -> float:
    """Radius beyond which every orbit grows by at least 1 per step.

    With ``|z|**(d-1) >= 2`` and ``|z|**d >= 2(|c|+|a|+1)`` we get
    ``|f(z)| >= |z|**d - |c| - |a| >= |z| + 1``.
    """
    d = f.degree
    a = abs(f.a) if isinstance(f, PerturbedPower) else 0.0
    r = max(2.0 ** (1.0 / (d - 1.0)), (2.0 * (abs(f.c) + a + 1.0)) ** (1.0 / d), 1.0)
    return r + 1e-6


@dataclass(frozen=True)
class EscapeSpec:
    radius: float
    max_iter: int = 512

    def __post_init__(self):
        if not self.radius > 1:
            raise ValueError(f"escape radius must exceed 1, got {self.radius!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        object.__setattr__(self, "max_iter", int(self.max_iter))

    @classmethod
    def for_family(cls, f: MapFamily, max_iter: int = 512) -> "EscapeSpec":
        return cls(escape_radius(f), max_iter)


@dataclass(frozen=True)
class OrbitOutcome:
    """``step`` is the escape index, or None for a bounded orbit."""

    step: Optional[int] = None

    @property
    def escaped(self) -> bool:
        return self.step is not None

    @property
    def bounded(self) -> bool:
        return self.step is None

    def __repr__(self):
        return "Bounded" if self.step is None else f"Escaped({self.step})"


BOUNDED = OrbitOutcome(None)


def _outside(z: complex, r2: float) -> bool:
    if is_infinity(z):
        return True
    return z.real * z.real + z.imag * z.imag > r2


def iterate_orbit(f: MapFamily, z0: complex, spec: EscapeSpec) -> OrbitOutcome:
    """Escape index of the orbit of ``z0``: index 0 is ``z0`` itself.

    The caller is responsible for ``spec.radius >= escape_radius(f)``; a
    smaller radius still runs but the escape is then not certified.
    Non-finite iterates count as escaped at the step they appear.
    """
    r2 = spec.radius * spec.radius
    z = complex(z0)
    if _outside(z, r2):
        return OrbitOutcome(0)
    for m in range(1, spec.max_iter + 1):
        z = apply_map(f, z)
        if _outside(z, r2):
            return OrbitOutcome(m)
    return BOUNDED


# -- critical data and classification ---------------------------------------


@dataclass(frozen=True)
class CriticalData:
    critical_points: tuple  # complex values, or a symbolic description
    critical_values: tuple[complex, ...]


def critical_values(f: MapFamily) -> tuple[complex, ...]:
    if isinstance(f, PerturbedPower):
        s = 2 * cmath.sqrt(f.a)
        return (f.c + s, f.c - s)
    return (f.c,)


def critical_data(f: MapFamily) -> CriticalData:
    if isinstance(f, PerturbedPower):
        pts = (f"all {2 * f.n}-th roots of a={f.a}",)
        return CriticalData(pts, critical_values(f))
    return CriticalData((0j,), critical_values(f))


CANTOR, MCMULLEN, CONNECTED = "Cantor", "McMullen", "Connected"


@dataclass(frozen=True)
class Classification:
    """``tag`` is None where no dichotomy/trichotomy label applies
    (RealPower, and PerturbedPower with c != 0); ``orbits`` always records
    the outcome of each free critical orbit."""

    tag: Optional[str]
    orbits: tuple[OrbitOutcome, ...]

    @property
    def bounded_orbits(self) -> int:
        return sum(o.bounded for o in self.orbits)


def classify(f: MapFamily, spec: EscapeSpec) -> Classification:
    if isinstance(f, (PowerPoly, RealPower)):
        out = iterate_orbit(f, 0j, spec)
        if isinstance(f, RealPower):
            return Classification(None, (out,))
        return Classification(CANTOR if out.escaped else CONNECTED, (out,))

    vp, vm = critical_values(f)
    plus = iterate_orbit(f, vp, spec)
    if f.c != 0:
        return Classification(None, (plus, iterate_orbit(f, vm, spec)))
    # c = 0: v- is the mirror of v+, one free orbit
    if plus.bounded:
        tag = CONNECTED
    elif plus.step == 0:
        tag = CANTOR
    else:
        tag = MCMULLEN
    return Classification(tag, (plus,))
