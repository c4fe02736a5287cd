# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Bicubic Hermite interpolation and RK4 for the characteristic flow (compiled).

Tables are ``(4, N, N)`` stacks ``(u, u_x, u_y, u_xy)``.  The force is the
exact x-derivative of the interpolant, so the discrete flow is Hamiltonian
for the interpolated potential.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()


cdef inline double _interp(const double[:, :, ::1] tab, double L, double x, double y,
                           double* val) noexcept nogil:
    cdef Py_ssize_t n = tab.shape[1]
    cdef double dx = 2.0 * L / n
    cdef double sx = (x + L) / dx
    cdef double sy = (y + L) / dx
    cdef double fi = floor(sx)
    cdef double fj = floor(sy)
    cdef double s = sx - fi
    cdef double t = sy - fj
    cdef Py_ssize_t i = (<Py_ssize_t>fi) % n
    cdef Py_ssize_t j = (<Py_ssize_t>fj) % n
    if i < 0:
        i += n
    if j < 0:
        j += n
    cdef Py_ssize_t i1 = (i + 1) % n
    cdef Py_ssize_t j1 = (j + 1) % n
    cdef double g[4][4]
    cdef double mg[4][4]
    cdef double a[4][4]
    cdef double g0, g1, g2, g3
    cdef int r, c
    g[0][0] = tab[0, i, j]; g[0][1] = tab[0, i, j1]
    g[0][2] = tab[2, i, j] * dx; g[0][3] = tab[2, i, j1] * dx
    g[1][0] = tab[0, i1, j]; g[1][1] = tab[0, i1, j1]
    g[1][2] = tab[2, i1, j] * dx; g[1][3] = tab[2, i1, j1] * dx
    g[2][0] = tab[1, i, j] * dx; g[2][1] = tab[1, i, j1] * dx
    g[2][2] = tab[3, i, j] * dx * dx; g[2][3] = tab[3, i, j1] * dx * dx
    g[3][0] = tab[1, i1, j] * dx; g[3][1] = tab[1, i1, j1] * dx
    g[3][2] = tab[3, i1, j] * dx * dx; g[3][3] = tab[3, i1, j1] * dx * dx
    for c in range(4):
        g0 = g[0][c]; g1 = g[1][c]; g2 = g[2][c]; g3 = g[3][c]
        mg[c][0] = g0
        mg[c][1] = g2
        mg[c][2] = -3 * g0 + 3 * g1 - 2 * g2 - g3
        mg[c][3] = 2 * g0 - 2 * g1 + g2 + g3
    for r in range(4):
        g0 = mg[0][r]; g1 = mg[1][r]; g2 = mg[2][r]; g3 = mg[3][r]
        a[r][0] = g0
        a[r][1] = g2
        a[r][2] = -3 * g0 + 3 * g1 - 2 * g2 - g3
        a[r][3] = 2 * g0 - 2 * g1 + g2 + g3
    cdef double v = 0.0, dv = 0.0, sp = 1.0, poly
    for r in range(4):
        poly = a[r][0] + t * (a[r][1] + t * (a[r][2] + t * a[r][3]))
        v += sp * poly
        if r < 3:
            dv += (r + 1) * sp * (a[r + 1][0] + t * (a[r + 1][1] + t * (a[r + 1][2] + t * a[r + 1][3])))
        sp *= s
    val[0] = v
    return dv / dx


def bicubic_eval(tables, double L, double x, double y):
    cdef const double[:, :, ::1] tab = np.ascontiguousarray(tables, dtype=np.float64)
    cdef double v
    cdef double d = _interp(tab, L, x, y, &v)
    return v, d


def bicubic_eval_many(tables, double L, xs, ys):
    cdef const double[:, :, ::1] tab = np.ascontiguousarray(tables, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t m, n = xv.shape[0]
    u = np.empty(n)
    ux = np.empty(n)
    cdef double[::1] uv = u
    cdef double[::1] uxv = ux
    cdef double v
    with nogil:
        for m in range(n):
            uxv[m] = _interp(tab, L, xv[m], yv[m], &v)
            uv[m] = v
    return u, ux


def rk4_bicubic(tables, double L, double x0, double lam0, double y0, double h, Py_ssize_t nsteps):
    cdef const double[:, :, ::1] tab = np.ascontiguousarray(tables, dtype=np.float64)
    ys = np.empty(nsteps + 1)
    xs = np.empty(nsteps + 1)
    ls = np.empty(nsteps + 1)
    cdef double[::1] yv = ys
    cdef double[::1] xv = xs
    cdef double[::1] lv = ls
    cdef double x = x0, lam = lam0, y = y0, xn, ln, yn, fval
    cdef double k1x, k1l, k2x, k2l, k3x, k3l, k4x, k4l
    cdef Py_ssize_t n = 0, last = 0
    cdef bint escaped = False
    yv[0] = y; xv[0] = x; lv[0] = lam
    with nogil:
        for n in range(1, nsteps + 1):
            k1x = lam
            k1l = -_interp(tab, L, x, y, &fval)
            k2x = lam + 0.5 * h * k1l
            k2l = -_interp(tab, L, x + 0.5 * h * k1x, y + 0.5 * h, &fval)
            k3x = lam + 0.5 * h * k2l
            k3l = -_interp(tab, L, x + 0.5 * h * k2x, y + 0.5 * h, &fval)
            k4x = lam + h * k3l
            k4l = -_interp(tab, L, x + h * k3x, y + h, &fval)
            xn = x + h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
            ln = lam + h * (k1l + 2 * k2l + 2 * k3l + k4l) / 6.0
            yn = y0 + n * h
            if fabs(xn) > L or fabs(yn) > L:
                escaped = True
                break
            x = xn; lam = ln; y = yn
            yv[n] = y; xv[n] = x; lv[n] = lam
            last = n
    return ys[: last + 1], xs[: last + 1], ls[: last + 1], bool(escaped)
