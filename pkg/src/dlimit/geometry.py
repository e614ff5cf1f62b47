"""Analytic limit sets and the exact algebra behind them.

Limit sets (circle, disk, annulus, limaçon) with point distances, the
superattracting centers of ``z**n + a/z**n``, the roots of -1, the radial
root bundle of ``r**n ± r/2 ∓ |c|/2`` and the fixed-critical-point solutions
of ``2 w**n - w + c = 0`` sorted into their angular sectors.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dynamics import PerturbedPower, apply_map

TWO_PI = 2.0 * math.pi


class RootFindingError(ArithmeticError):
    """All-roots iteration failed, or the roots contradict the sector count."""


# -- target sets -------------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True)
class ClosedDisk:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True)
class ClosedAnnulus:
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not (0 <= self.r_inner < self.r_outer):
            raise ValueError("annulus needs 0 <= r_inner < r_outer")


@dataclass(frozen=True)
class Limacon:
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))


TargetSet = Union[Circle, ClosedDisk, ClosedAnnulus, Limacon]


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / ``a`` / ``bi`` (no spaces, e-notation allowed)."""
    s = text.strip().replace("j", "i")
    if not s or " " in s:
        raise ValueError(f"bad complex number {text!r}")
    try:
        return complex(s.replace("i", "j")) if "i" in s else complex(float(s), 0.0)
    except ValueError:
        raise ValueError(f"bad complex number {text!r}") from None


def parse_target(text: str) -> TargetSet:
    """``circle:R``, ``disk:R``, ``annulus:R1,R2`` or ``limacon:C``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "circle":
            return Circle(float(arg))
        if kind == "disk":
            return ClosedDisk(float(arg))
        if kind == "annulus":
            lo, hi = arg.split(",")
            return ClosedAnnulus(float(lo), float(hi))
        if kind == "limacon":
            return Limacon(parse_complex(arg))
    except ValueError as exc:
        raise ValueError(f"bad target {text!r}: {exc}") from None
    raise ValueError(f"unknown target kind in {text!r}")


def target_label(t: TargetSet) -> str:
    if isinstance(t, Circle):
        return f"circle:{t.r!r}"
    if isinstance(t, ClosedDisk):
        return f"disk:{t.r!r}"
    if isinstance(t, ClosedAnnulus):
        return f"annulus:{t.r_inner!r},{t.r_outer!r}"
    return f"limacon:{format_complex(t.c)}"


def format_complex(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}i"


def is_curve(t: TargetSet) -> bool:
    return isinstance(t, (Circle, Limacon))


# -- limaçon -----------------------------------------------------------------


def limacon_point(c: complex, theta):
    """((e^{iθ} + c) / 2)**2, the parameter whose critical value
    ``c ± 2√a`` has modulus 1. Accepts scalar or array ``theta``."""
    w = (np.exp(1j * np.asarray(theta, dtype=float)) + complex(c)) / 2.0
    out = w * w
    return complex(out) if np.ndim(out) == 0 else out


def limacon_samples(c: complex, count: int) -> np.ndarray:
    theta = np.arange(count) * (TWO_PI / count)
    return limacon_point(c, theta)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _limacon_distance(z: np.ndarray, c: complex, samples: int = 4096, tol: float = 1e-8) -> np.ndarray:
    theta = np.arange(samples) * (TWO_PI / samples)
    curve = limacon_point(c, theta)
    step = TWO_PI / samples
    out = np.empty(z.shape[0])
    chunk = max(1, 2_000_000 // samples)
    for s in range(0, z.shape[0], chunk):
        zz = z[s : s + chunk]
        d = np.abs(zz[:, None] - curve[None, :])
        k = np.argmin(d, axis=1)
        best = d[np.arange(zz.shape[0]), k]
        lo = theta[k] - step
        hi = theta[k] + step
        # golden-section search on the bracketing arc
        x1 = hi - _INV_PHI * (hi - lo)
        x2 = lo + _INV_PHI * (hi - lo)
        f1 = np.abs(zz - limacon_point(c, x1))
        f2 = np.abs(zz - limacon_point(c, x2))
        while np.max(hi - lo) > tol:
            left = f1 < f2
            hi = np.where(left, x2, hi)
            lo = np.where(left, lo, x1)
            x1n = np.where(left, hi - _INV_PHI * (hi - lo), x2)
            x2n = np.where(left, x1, lo + _INV_PHI * (hi - lo))
            f_new = np.abs(zz - limacon_point(c, np.where(left, x1n, x2n)))
            f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
            x1, x2 = x1n, x2n
        out[s : s + chunk] = np.minimum(best, np.minimum(f1, f2))
    return out


def distance_to_target(z, target: TargetSet):
    """Euclidean distance from ``z`` (scalar or array) to the target set."""
    arr = np.asarray(z, dtype=complex)
    flat = arr.reshape(-1)
    r = np.abs(flat)
    if isinstance(target, Circle):
        d = np.abs(r - target.r)
    elif isinstance(target, ClosedDisk):
        d = np.maximum(0.0, r - target.r)
    elif isinstance(target, ClosedAnnulus):
        d = np.maximum(0.0, np.maximum(target.r_inner - r, r - target.r_outer))
    elif isinstance(target, Limacon):
        d = _limacon_distance(flat, target.c)
    else:
        raise TypeError(f"not a target set: {target!r}")
    d = d.reshape(arr.shape)
    return float(d) if d.ndim == 0 else d


def target_boundary_samples(target: TargetSet, count: int) -> np.ndarray:
    """Points spread over a curve target (circle or limaçon)."""
    theta = np.arange(count) * (TWO_PI / count)
    if isinstance(target, Circle):
        return target.r * np.exp(1j * theta)
    if isinstance(target, Limacon):
        return limacon_point(target.c, theta)
    raise TypeError("boundary samples only exist for curve targets")


def annulus_bounds(c_abs: float) -> tuple[float, float]:
    """(l, u) = ((1-|c|)**2/4, (1+|c|)**2/4): moduli bounds of the limaçon."""
    return (1.0 - c_abs) ** 2 / 4.0, (1.0 + c_abs) ** 2 / 4.0


# -- superattracting centers ---------------------------------------------------


def superattracting_center(n: int, k: int) -> complex:
    """a = 2^{-2n/(n-1)} e^{2πik/(n-1)} for n >= 3, 0 <= k <= n-2."""
    if n < 3:
        raise ValueError(f"centers need n >= 3, got {n}")
    if not 0 <= k <= n - 2:
        raise ValueError(f"k must lie in 0..{n - 2}, got {k}")
    return 2.0 ** (-2.0 * n / (n - 1)) * cmath.exp(1j * TWO_PI * k / (n - 1))


@dataclass(frozen=True)
class CenterReport:
    n: int
    k: int
    case: str
    a: complex
    v_plus: complex
    v_minus: complex
    image_plus: complex
    image_minus: complex
    residual_plus: float
    residual_minus: float

    @property
    def residual(self) -> float:
        return max(self.residual_plus, self.residual_minus)


def verify_center_dynamics(n: int, k: int) -> CenterReport:
    """Map both critical values at a = a_n^k and compare with the parity table.

    Here v+ = 2 * 2^{-n/(n-1)} e^{iπk/(n-1)}, which is not always the
    principal root of a (it differs in sign once πk/(n-1) > π/2).


    ========  ========  ===========  ===========
    n         k         R(v+)        R(v-)
    ========  ========  ===========  ===========
    even      even      v+           v+
    even      odd       v-           v-
    odd       even      v+           v-
    odd       odd       v-           v+
    ========  ========  ===========  ===========
    """
    a = superattracting_center(n, k)
    f = PerturbedPower(n, 0j, a)
    # the square root paired with the table: half the argument of a_n^k
    vp = 2.0 * 2.0 ** (-n / (n - 1)) * cmath.exp(1j * math.pi * k / (n - 1))
    vm = -vp
    ip, im = apply_map(f, vp), apply_map(f, vm)
    n_even, k_even = n % 2 == 0, k % 2 == 0
    if n_even and k_even:
        ep, em = vp, vp
    elif n_even:
        ep, em = vm, vm
    elif k_even:
        ep, em = vp, vm
    else:
        ep, em = vm, vp
    case = f"n {'even' if n_even else 'odd'}, k {'even' if k_even else 'odd'}"
    return CenterReport(n, k, case, a, vp, vm, ip, im, abs(ip - ep), abs(im - em))


def roots_of_minus_one(n: int) -> list[complex]:
    """The n-1 solutions of c**(n-1) = -1; each satisfies c**n + c = 0."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    m = n - 1
    return [cmath.exp(1j * math.pi * (2 * j + 1) / m) for j in range(m)]


# -- radial root bundle --------------------------------------------------------


def bisect(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of ``f`` in [lo, hi] given a sign change; stops at width < tol."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol or mid in (lo, hi):
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RadialRootBundle:
    n: int
    c_abs: float
    u: float
    v: float
    x: Optional[float] = None
    y: Optional[float] = None


def radial_roots(n: int, c_abs: float, tol: float = 0.0) -> RadialRootBundle:
    """Positive roots of f(r) = r^n + r/2 - |c|/2 (u), g(r) = r^n - r/2 - |c|/2 (v)
    and, when h(r) = r^n - r/2 + |c|/2 dips below zero, its two roots x < y.

    The default ``tol = 0`` bisects down to adjacent doubles. Even then
    u < |c| < x cannot always be told apart: |c| - u and x - |c| are about
    2|c|^n, which drops below one ulp of |c| for small |c| and large n.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not c_abs > 0:
        raise ValueError("radial roots need |c| > 0")
    half = c_abs / 2.0
    hi = max(1.0, c_abs) + 1.0
    u = bisect(lambda r: r**n + r / 2.0 - half, 0.0, hi, tol)
    v = bisect(lambda r: r**n - r / 2.0 - half, 0.0, hi, tol)
    h = lambda r: r**n - r / 2.0 + half  # noqa: E731
    rc = (1.0 / (2.0 * n)) ** (1.0 / (n - 1))
    if h(rc) < 0:
        return RadialRootBundle(n, c_abs, u, v, bisect(h, 0.0, rc, tol), bisect(h, rc, hi, tol))
    return RadialRootBundle(n, c_abs, u, v)


# -- fixed critical points: 2 w^n - w + c = 0 -------------------------------------


def _poly_and_deriv(w: np.ndarray, n: int, c: complex):
    wn1 = w ** (n - 1)
    return 2.0 * wn1 * w - w + c, 2.0 * n * wn1 - 1.0


def aberth_roots(n: int, c: complex, r0: float, tol: float = 1e-15, max_iter: int = 500) -> np.ndarray:
    """All n roots of 2w^n - w + c by Aberth-Ehrlich simultaneous iteration."""
    k = np.arange(n)
    w = r0 * np.exp(1j * (TWO_PI * k / n + 0.4))
    eye = np.eye(n, dtype=bool)
    for _ in range(max_iter):
        p, dp = _poly_and_deriv(w, n, c)
        ratio = p / dp
        diff = w[:, None] - w[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        step = ratio / (1.0 - ratio * inv.sum(axis=1))
        w = w - step
        if np.all(np.abs(step) <= tol * np.maximum(np.abs(w), 1.0)):
            break
    else:
        raise RootFindingError(
            f"Aberth iteration did not converge for n={n}, c={c}: "
            f"last step max {np.max(np.abs(step)):.3e}"
        )
    for _ in range(3):  # Newton polish
        p, dp = _poly_and_deriv(w, n, c)
        w = w - p / dp
    return w


@dataclass(frozen=True)
class SectorSolution:
    """One root ``w`` of 2w^n - w + c with ``a = w**(2n)``.

    ``k`` is None for a root outside every sector (the small root when
    |c| < 1). ``certified`` is False when the sector band has no separating
    circle behind it (|c| < 1 and h has no positive roots).
    """

    k: Optional[int]
    w: complex
    a: complex
    residual: float
    fixed_residual: float
    theta_low: float
    theta_high: float
    r_low: float
    r_high: float
    on_boundary: bool = False
    certified: bool = True


def _wrap(angle):
    return (angle + math.pi) % TWO_PI - math.pi


def critical_fixed_solutions(n: int, c: complex, gamma: float = 1e-6) -> list[SectorSolution]:
    """Solve 2w^n - w + c = 0 and sort the roots into their sectors.

    |c| >= 1: n sectors centered at Arg(-c)/n + 2kπ/n, radial band
    [u_n, v_n]. |c| < 1: n-1 sectors centered at 2kπ/(n-1), radial band
    [y_n, v_n]; the circle |w| = r for any x_n < r < y_n encloses exactly one
    root, which gets ``k = None``. Without x_n, y_n the smallest root is set
    aside and the rest are sorted over [u_n, v_n] uncertified. Radial bounds
    are widened by the relative margin ``gamma``.

    Every a = w^{2n} makes w a fixed critical point of z^n + c + a/z^n.
    """
    c = complex(c)
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if c == 0:
        raise ValueError("c must be nonzero")
    n = int(n)
    bundle = radial_roots(n, abs(c))
    roots = [complex(w) for w in aberth_roots(n, c, bundle.v)]

    certified = True
    excluded = None
    if abs(c) >= 1:
        count, width = n, math.pi / n
        offset = cmath.phase(-c) / n
        r_lo, r_hi = bundle.u * (1 - gamma), bundle.v * (1 + gamma)
    else:
        count, width = n - 1, math.pi / (n - 1)
        offset = 0.0
        excluded = min(range(n), key=lambda i: abs(roots[i]))
        if bundle.y is not None:
            r_lo, r_hi = bundle.y * (1 - gamma), bundle.v * (1 + gamma)
            if abs(roots[excluded]) > bundle.x * (1 + gamma):
                raise RootFindingError(
                    f"no root inside |w| <= x_n = {bundle.x} for n={n}, c={c}"
                )
        else:
            r_lo, r_hi = bundle.u * (1 - gamma), bundle.v * (1 + gamma)
            certified = False

    out = []
    seen = {}
    for i, w in enumerate(roots):
        residual = abs(2 * w**n - w + c)
        if not residual < 1e-10:
            raise RootFindingError(f"root {w} of n={n}, c={c} has residual {residual:.3e}")
        a = w ** (2 * n)
        fixed = abs(apply_map(PerturbedPower(n, c, a), w) - w)
        k = int(round((cmath.phase(w) - offset) / (2 * width))) % count
        center = offset + 2 * k * width
        delta = _wrap(cmath.phase(w) - center)
        boundary = abs(abs(delta) - width) <= 1e-9 * width
        inside = i != excluded and r_lo <= abs(w) <= r_hi
        kk = k if inside else None
        if kk is not None:
            if kk in seen:
                raise RootFindingError(
                    f"sector {kk} holds two roots ({seen[kk]} and {w}) for n={n}, c={c}"
                )
            seen[kk] = w
        out.append(
            SectorSolution(kk, w, a, residual, fixed, center - width, center + width,
                           r_lo, r_hi, boundary, certified)
        )
    out.sort(key=lambda s: (s.k is None, s.k if s.k is not None else 0, cmath.phase(s.w)))
    return out
