"""Pure numpy implementations of the grid kernels.

Same signatures and arithmetic order as ``_ckernels``; used when the
compiled extension is missing or ``DLIMIT_PURE`` is set.
"""
import math

import numpy as np

BACKEND = "numpy"

_KIND_POWER, _KIND_REAL, _KIND_PERTURBED = 0, 1, 2


def _ipow(x, y, n):
    rx = np.ones_like(x)
    ry = np.zeros_like(y)
    bx, by = x, y
    while True:
        if n & 1:
            rx, ry = rx * bx - ry * by, rx * by + ry * bx
        n >>= 1
        if not n:
            return rx, ry
        bx, by = bx * bx - by * by, bx * by + by * bx


def _rpow(x, y, t):
    r2 = x * x + y * y
    theta = np.arctan2(y, x)
    theta[(theta == -math.pi) & (y == 0.0)] = math.pi
    m = np.exp(t * (0.5 * np.log(r2)))
    return m * np.cos(t * theta), m * np.sin(t * theta)


def _step(kind, x, y, cr, ci, ar, ai, n, t):
    """One map application; returns new (x, y) with non-finite marking escape."""
    if kind == _KIND_POWER:
        px, py = _ipow(x, y, n)
        return px + cr, py + ci
    if kind == _KIND_REAL:
        px, py = _rpow(x, y, t)
        return px + cr, py + ci
    px, py = _ipow(x, y, n)
    d = px * px + py * py
    qx = (ar * px + ai * py) / d
    qy = (ai * px - ar * py) / d
    nx = px + cr + qx
    ny = py + ci + qy
    pole = d == 0.0
    nx[pole] = np.inf
    ny[pole] = np.inf
    return nx, ny


def escape_steps(kind, zr, zi, cr, ci, ar, ai, n, t, radius, max_iter, threads=1):
    """Escape index per seed (-1 for bounded). All array arguments are 1-D
    float64 of equal length; ``c`` and ``a`` vary per seed for parameter scans."""
    size = zr.shape[0]
    out = np.full(size, -1, dtype=np.int32)
    r2 = radius * radius
    x = zr.copy()
    y = zi.copy()
    idx = np.arange(size)
    cr, ci, ar, ai = cr.copy(), ci.copy(), ar.copy(), ai.copy()
    with np.errstate(all="ignore"):
        esc = ~(np.isfinite(x) & np.isfinite(y)) | (x * x + y * y > r2)
        out[idx[esc]] = 0
        keep = ~esc
        for m in range(1, max_iter + 1):
            x, y, idx = x[keep], y[keep], idx[keep]
            cr, ci, ar, ai = cr[keep], ci[keep], ar[keep], ai[keep]
            if idx.size == 0:
                break
            x, y = _step(kind, x, y, cr, ci, ar, ai, n, t)
            esc = ~(np.isfinite(x) & np.isfinite(y)) | (x * x + y * y > r2)
            out[idx[esc]] = m
            keep = ~esc
    return out


def cell_undecided(kind, zr, zi, rho, cr, ci, ar, ai, n, t, radius, max_iter, threads=1):
    """1 where the disk of radius ``rho`` about each seed cannot be shown to
    leave ``|z| <= radius`` entirely within ``max_iter`` steps, else 0.

    Each step carries a disk (center, radius) enclosing the image of the
    previous disk; the disk is certified escaped once a lower bound on
    ``|f(w)|`` over it exceeds ``radius``.
    """
    size = zr.shape[0]
    out = np.zeros(size, dtype=np.uint8)
    x = zr.copy()
    y = zi.copy()
    r = np.full(size, float(rho))
    idx = np.arange(size)
    cabs = math.hypot(cr, ci)
    aabs = math.hypot(ar, ai)
    crv = np.full(1, cr)
    civ = np.full(1, ci)
    arv = np.full(1, ar)
    aiv = np.full(1, ai)
    giveup = 2.0 * radius
    with np.errstate(all="ignore"):
        m = np.sqrt(x * x + y * y)
        keep = ~(m - r > radius)
        for _ in range(max_iter):
            x, y, r, m, idx = x[keep], y[keep], r[keep], m[keep], idx[keep]
            if idx.size == 0:
                break
            fx, fy = _step(kind, x, y, crv, civ, arv, aiv, n, t)
            inner = np.maximum(m - r, 0.0)
            if kind == _KIND_POWER:
                mn = m ** n
                nr = np.where(m > 0.0, mn * np.expm1(n * np.log1p(r / m)), r ** n)
                lowmod = inner ** n - cabs
            elif kind == _KIND_REAL:
                ay = np.abs(y)
                cross = (m <= r) | ((ay <= r) & (x - np.sqrt(np.maximum(r * r - y * y, 0.0)) < 0.0))
                nr = np.where(cross, np.inf, r * t * (m + r) ** (t - 1.0))
                lowmod = inner ** t - cabs
            else:
                mn = m ** n
                q = r / m
                nr = mn * np.expm1(n * np.log1p(q)) + aabs / mn * np.expm1(-n * np.log1p(-q))
                nr = np.where(q < 0.5, nr, np.inf)
                lowmod = np.where(inner > 0.0, inner ** n - cabs - aabs / inner ** n, -np.inf)
                outer = m + r
                lowmod = np.maximum(lowmod, aabs / outer ** n - cabs - outer ** n)
            fin = np.isfinite(fx) & np.isfinite(fy)
            fm = np.sqrt(fx * fx + fy * fy)
            low = np.where(fin, fm - nr, -np.inf)
            low = np.maximum(low, lowmod)
            if kind != _KIND_PERTURBED:
                low = np.where(fin, low, np.inf)
            esc = low > radius
            stuck = ~esc & (~fin | ~(nr <= giveup))
            out[idx[stuck]] = 1
            keep = ~(esc | stuck)
            x, y, r, m = fx, fy, nr, fm
        if idx.size:
            out[idx[keep]] = 1
    return out


def edt_sq(mask, wx=1.0, wy=1.0, threads=1):
    """Squared Euclidean distance from every cell to the nearest True cell.

    Row spacing enters as ``wy`` (squared) and column spacing as ``wx``.
    Column pass is an integer scan; the row pass is an exact brute-force
    minimum over columns, so the result is the true minimum of
    ``wx*di**2 + wy*dj**2`` over set cells.
    """
    ny, nx = mask.shape
    if not mask.any():
        return np.full((ny, nx), np.inf)
    g = np.empty((ny, nx))
    d = np.where(mask[0], 0.0, np.inf)
    g[0] = d
    for j in range(1, ny):
        d = np.where(mask[j], 0.0, d + 1.0)
        g[j] = d
    d = g[ny - 1].copy()
    for j in range(ny - 2, -1, -1):
        d = np.minimum(g[j], d + 1.0)
        g[j] = d
    G = wy * (g * g)
    p = np.arange(nx, dtype=np.float64)
    P = wx * (p[:, None] - p[None, :]) ** 2
    out = np.empty((ny, nx))
    for j in range(ny):
        out[j] = np.min(P + G[j][None, :], axis=1)
    return out
