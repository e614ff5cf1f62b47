# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels. Mirrors ``_pykernels`` operation for operation."""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange, threadid
from libc.math cimport sqrt, log, exp, cos, sin, atan2, pow, expm1, log1p, isfinite, floor, fabs, INFINITY, M_PI

cnp.import_array()

BACKEND = "cython"

cdef enum:
    KIND_POWER = 0
    KIND_REAL = 1
    KIND_PERTURBED = 2


cdef inline void _ipow(double x, double y, long n, double *ox, double *oy) noexcept nogil:
    cdef double rx = 1.0, ry = 0.0, bx = x, by = y, tx
    while True:
        if n & 1:
            tx = rx * bx - ry * by
            ry = rx * by + ry * bx
            rx = tx
        n >>= 1
        if n == 0:
            break
        tx = bx * bx - by * by
        by = bx * by + by * bx
        bx = tx
    ox[0] = rx
    oy[0] = ry


cdef inline void _rpow(double x, double y, double t, double *ox, double *oy) noexcept nogil:
    cdef double r2 = x * x + y * y
    cdef double theta = atan2(y, x)
    cdef double m
    if theta == -M_PI and y == 0.0:
        theta = M_PI
    m = exp(t * (0.5 * log(r2)))
    ox[0] = m * cos(t * theta)
    oy[0] = m * sin(t * theta)


cdef inline void _step(int kind, double x, double y, double cr, double ci,
                       double ar, double ai, long n, double t,
                       double *ox, double *oy) noexcept nogil:
    cdef double px, py, d, qx, qy
    if kind == KIND_POWER:
        _ipow(x, y, n, &px, &py)
        ox[0] = px + cr
        oy[0] = py + ci
    elif kind == KIND_REAL:
        _rpow(x, y, t, &px, &py)
        ox[0] = px + cr
        oy[0] = py + ci
    else:
        _ipow(x, y, n, &px, &py)
        d = px * px + py * py
        if d == 0.0:
            ox[0] = INFINITY
            oy[0] = INFINITY
            return
        qx = (ar * px + ai * py) / d
        qy = (ai * px - ar * py) / d
        ox[0] = px + cr + qx
        oy[0] = py + ci + qy


cdef inline bint _out(double x, double y, double r2) noexcept nogil:
    if not (isfinite(x) and isfinite(y)):
        return True
    return x * x + y * y > r2


cdef int _orbit(int kind, double x, double y, double cr, double ci, double ar,
                double ai, long n, double t, double r2, long max_iter) noexcept nogil:
    cdef long m
    cdef double nx, ny
    if _out(x, y, r2):
        return 0
    for m in range(1, max_iter + 1):
        _step(kind, x, y, cr, ci, ar, ai, n, t, &nx, &ny)
        x = nx
        y = ny
        if _out(x, y, r2):
            return <int>m
    return -1


def escape_steps(int kind, double[::1] zr, double[::1] zi, double[::1] cr,
                 double[::1] ci, double[::1] ar, double[::1] ai, long n, double t,
                 double radius, long max_iter, int threads=1):
    cdef Py_ssize_t size = zr.shape[0], k
    cdef double r2 = radius * radius
    out = np.empty(size, dtype=np.int32)
    cdef int[::1] o = out
    for k in prange(size, nogil=True, schedule="dynamic", chunksize=256, num_threads=threads):
        o[k] = _orbit(kind, zr[k], zi[k], cr[k], ci[k], ar[k], ai[k], n, t, r2, max_iter)
    return out


cdef unsigned char _cell(int kind, double x, double y, double r, double cr, double ci,
                         double ar, double ai, double cabs, double aabs, long n,
                         double t, double radius, long max_iter) noexcept nogil:
    cdef double m = sqrt(x * x + y * y)
    cdef double fx, fy, fm, nr, inner, outer, lowmod, low, q, mn, alt
    cdef bint fin, cross
    cdef long it
    cdef double giveup = 2.0 * radius
    if m - r > radius:
        return 0
    for it in range(max_iter):
        _step(kind, x, y, cr, ci, ar, ai, n, t, &fx, &fy)
        inner = m - r
        if inner < 0.0:
            inner = 0.0
        if kind == KIND_POWER:
            mn = pow(m, <double>n)
            if m > 0.0:
                nr = mn * expm1(n * log1p(r / m))
            else:
                nr = pow(r, <double>n)
            lowmod = pow(inner, <double>n) - cabs
        elif kind == KIND_REAL:
            cross = (m <= r) or (fabs(y) <= r and x - sqrt(max(r * r - y * y, 0.0)) < 0.0)
            if cross:
                nr = INFINITY
            else:
                nr = r * t * pow(m + r, t - 1.0)
            lowmod = pow(inner, t) - cabs
        else:
            mn = pow(m, <double>n)
            q = r / m
            if q < 0.5:
                nr = mn * expm1(n * log1p(q)) + aabs / mn * expm1(-n * log1p(-q))
            else:
                nr = INFINITY
            if inner > 0.0:
                lowmod = pow(inner, <double>n) - cabs - aabs / pow(inner, <double>n)
            else:
                lowmod = -INFINITY
            outer = m + r
            alt = aabs / pow(outer, <double>n) - cabs - pow(outer, <double>n)
            if alt > lowmod:
                lowmod = alt
        fin = isfinite(fx) and isfinite(fy)
        fm = sqrt(fx * fx + fy * fy)
        if fin:
            low = fm - nr
        else:
            low = -INFINITY
        if lowmod > low:
            low = lowmod
        if kind != KIND_PERTURBED and not fin:
            low = INFINITY
        if low > radius:
            return 0
        if not fin or not (nr <= giveup):
            return 1
        x = fx
        y = fy
        r = nr
        m = fm
    return 1


def cell_undecided(int kind, double[::1] zr, double[::1] zi, double rho, double cr,
                   double ci, double ar, double ai, long n, double t, double radius,
                   long max_iter, int threads=1):
    cdef Py_ssize_t size = zr.shape[0], k
    cdef double cabs = sqrt(cr * cr + ci * ci)
    cdef double aabs = sqrt(ar * ar + ai * ai)
    out = np.empty(size, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    for k in prange(size, nogil=True, schedule="dynamic", chunksize=256, num_threads=threads):
        o[k] = _cell(kind, zr[k], zi[k], rho, cr, ci, ar, ai, cabs, aabs, n, t, radius, max_iter)
    return out


cdef void _envelope_row(double *g, double *dst, Py_ssize_t nx, double wx,
                        Py_ssize_t *s, double *tt) noexcept nogil:
    # lower envelope of parabolas wx*(x-i)**2 + g[i]; s: apex columns, tt: start points
    cdef Py_ssize_t q = 0, u
    cdef double w, fa, fb
    s[0] = 0
    tt[0] = 0
    for u in range(1, nx):
        while q >= 0:
            fa = wx * <double>((tt[q] - s[q]) * (tt[q] - s[q])) + g[s[q]]
            fb = wx * <double>((tt[q] - u) * (tt[q] - u)) + g[u]
            if fa > fb:
                q -= 1
            else:
                break
        if q < 0:
            q = 0
            s[0] = u
            tt[0] = 0
        else:
            w = 1.0 + floor((wx * (<double>(u * u) - <double>(s[q] * s[q])) + g[u] - g[s[q]])
                            / (2.0 * wx * <double>(u - s[q])))
            # rounding must not break the strictly increasing start points
            if w <= tt[q]:
                w = tt[q] + 1.0
            if w < nx:
                q += 1
                s[q] = u
                tt[q] = w
    for u in range(nx - 1, -1, -1):
        dst[u] = wx * <double>((u - s[q]) * (u - s[q])) + g[s[q]]
        if u == <Py_ssize_t>tt[q]:
            q -= 1


def edt_sq(mask, double wx=1.0, double wy=1.0, int threads=1):
    """Squared distance to the nearest True cell (two-pass, Meijster et al.)."""
    cdef cnp.uint8_t[:, ::1] b = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t ny = b.shape[0], nx = b.shape[1], i, j
    if not np.any(mask):
        return np.full((ny, nx), np.inf)
    # finite stand-in for "no set cell in this column", larger than any real distance
    cdef double big = ny + nx * sqrt(wx / wy) + 2.0
    g_arr = np.empty((ny, nx))
    cdef double[:, ::1] g = g_arr
    for i in prange(nx, nogil=True, num_threads=threads):
        if b[0, i]:
            g[0, i] = 0.0
        else:
            g[0, i] = big
        for j in range(1, ny):
            if b[j, i]:
                g[j, i] = 0.0
            else:
                g[j, i] = g[j - 1, i] + 1.0
        for j in range(ny - 2, -1, -1):
            if g[j + 1, i] + 1.0 < g[j, i]:
                g[j, i] = g[j + 1, i] + 1.0
    for j in range(ny):
        for i in range(nx):
            g[j, i] = wy * (g[j, i] * g[j, i])
    out = np.empty((ny, nx))
    cdef double[:, ::1] o = out
    s_arr = np.empty((threads, nx), dtype=np.intp)
    t_arr = np.empty((threads, nx))
    cdef Py_ssize_t[:, ::1] s = s_arr
    cdef double[:, ::1] tt = t_arr
    cdef int tid
    for j in prange(ny, nogil=True, num_threads=threads):
        tid = threadid()
        _envelope_row(&g[j, 0], &o[j, 0], nx, wx, &s[tid, 0], &tt[tid, 0])
    return out
