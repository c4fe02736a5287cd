"""Pure-Python bicubic Hermite interpolation and RK4 for the characteristic flow.

Mirrors ``_rk4.pyx`` line for line; used when the extension is not built.
Tables are ``(4, N, N)`` stacks ``(u, u_x, u_y, u_xy)``.
"""

import math

import numpy as np


def _coeffs(tables, i, j, dx):
    n = tables.shape[1]
    i1 = (i + 1) % n
    j1 = (j + 1) % n
    f, fx, fy, fxy = tables[0], tables[1], tables[2], tables[3]
    # G rows: value at (i,j),(i,j1) | d/dy ... ; Hermite form in local units
    g = (
        (f[i, j], f[i, j1], fy[i, j] * dx, fy[i, j1] * dx),
        (f[i1, j], f[i1, j1], fy[i1, j] * dx, fy[i1, j1] * dx),
        (fx[i, j] * dx, fx[i, j1] * dx, fxy[i, j] * dx * dx, fxy[i, j1] * dx * dx),
        (fx[i1, j] * dx, fx[i1, j1] * dx, fxy[i1, j] * dx * dx, fxy[i1, j1] * dx * dx),
    )
    # A = M G M^T with M = [[1,0,0,0],[0,0,1,0],[-3,3,-2,-1],[2,-2,1,1]]
    mg = []
    for c in range(4):
        g0, g1, g2, g3 = g[0][c], g[1][c], g[2][c], g[3][c]
        mg.append((g0, g2, -3 * g0 + 3 * g1 - 2 * g2 - g3, 2 * g0 - 2 * g1 + g2 + g3))
    a = [[0.0] * 4 for _ in range(4)]
    for r in range(4):
        m0, m1, m2, m3 = mg[0][r], mg[1][r], mg[2][r], mg[3][r]
        a[r][0] = m0
        a[r][1] = m2
        a[r][2] = -3 * m0 + 3 * m1 - 2 * m2 - m3
        a[r][3] = 2 * m0 - 2 * m1 + m2 + m3
    return a


def bicubic_eval(tables, L, x, y):
    """``(u, u_x)`` of the bicubic Hermite interpolant at ``(x, y)`` (periodic)."""
    n = tables.shape[1]
    dx = 2.0 * L / n
    sx = (x + L) / dx
    sy = (y + L) / dx
    fi = math.floor(sx)
    fj = math.floor(sy)
    s = sx - fi
    t = sy - fj
    a = _coeffs(tables, int(fi) % n, int(fj) % n, dx)
    val = 0.0
    dval = 0.0
    sp = 1.0
    for r in range(4):
        row = a[r]
        poly = row[0] + t * (row[1] + t * (row[2] + t * row[3]))
        val += sp * poly
        if r < 3:
            dval += (r + 1) * sp * (a[r + 1][0] + t * (a[r + 1][1] + t * (a[r + 1][2] + t * a[r + 1][3])))
        sp *= s
    return val, dval / dx


def bicubic_eval_many(tables, L, xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    u = np.empty(xs.shape[0])
    ux = np.empty(xs.shape[0])
    for m in range(xs.shape[0]):
        u[m], ux[m] = bicubic_eval(tables, L, xs[m], ys[m])
    return u, ux


def rk4_bicubic(tables, L, x0, lam0, y0, h, nsteps):
    """RK4 for ``x' = lam, lam' = -u_x(x, y)``, ``u_x`` the derivative of the interpolant.

    Stops before leaving ``[-L, L]^2``.
    Returns ``(ys, xs, lams, escaped)``.
    """
    ys = np.empty(nsteps + 1)
    xs = np.empty(nsteps + 1)
    ls = np.empty(nsteps + 1)
    x, lam, y = float(x0), float(lam0), float(y0)
    ys[0], xs[0], ls[0] = y, x, lam
    n = 0
    escaped = False
    for n in range(1, nsteps + 1):
        k1x = lam
        k1l = -bicubic_eval(tables, L, x, y)[1]
        k2x = lam + 0.5 * h * k1l
        k2l = -bicubic_eval(tables, L, x + 0.5 * h * k1x, y + 0.5 * h)[1]
        k3x = lam + 0.5 * h * k2l
        k3l = -bicubic_eval(tables, L, x + 0.5 * h * k2x, y + 0.5 * h)[1]
        k4x = lam + h * k3l
        k4l = -bicubic_eval(tables, L, x + h * k3x, y + h)[1]
        xn = x + h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
        ln = lam + h * (k1l + 2 * k2l + 2 * k3l + k4l) / 6.0
        yn = y0 + n * h
        if abs(xn) > L or abs(yn) > L:
            escaped = True
            n -= 1
            break
        x, lam, y = xn, ln, yn
        ys[n], xs[n], ls[n] = y, x, lam
    return ys[: n + 1], xs[: n + 1], ls[: n + 1], escaped
