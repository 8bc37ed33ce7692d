# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics match ``sogym.kernels._fallback``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cbrt, fabs, sqrt

cnp.import_array()

cdef double THICKNESS_FLOOR = 1e-9


def tdf_grid(double x0, double y0, double length, double cos_t, double sin_t,
             double ta, double tb, Py_ssize_t nx, Py_ssize_t ny, double spacing):
    out_arr = np.empty((nx + 1, ny + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t ix, iy
    cdef double dx, dy, x1, y1, t, u, v, u2, v2
    cdef double t_mid = 0.5 * (ta + tb)
    cdef double t_half = 0.5 * (tb - ta)
    for ix in range(nx + 1):
        dx = ix * spacing - x0
        for iy in range(ny + 1):
            dy = iy * spacing - y0
            x1 = cos_t * dx + sin_t * dy
            y1 = -sin_t * dx + cos_t * dy
            # same operation order as the NumPy reference implementation
            t = t_mid + t_half * x1 / length
            if t < THICKNESS_FLOOR:
                t = THICKNESS_FLOOR
            u = x1 / length
            v = y1 / t
            u2 = u * u
            v2 = v * v
            out[ix, iy] = 1.0 - cbrt(sqrt(u2 * u2 * u2 + v2 * v2 * v2))
    return out_arr


def tdf_points(double x0, double y0, double length, double cos_t, double sin_t,
               double ta, double tb, xs, ys):
    xs_arr = np.ascontiguousarray(xs, dtype=np.float64)
    ys_arr = np.ascontiguousarray(ys, dtype=np.float64)
    out_arr = np.empty(xs_arr.shape[0], dtype=np.float64)
    cdef double[::1] xv = xs_arr
    cdef double[::1] yv = ys_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef double dx, dy, x1, y1, t, u, v, u2, v2
    cdef double t_mid = 0.5 * (ta + tb)
    cdef double t_half = 0.5 * (tb - ta)
    for i in range(n):
        dx = xv[i] - x0
        dy = yv[i] - y0
        x1 = cos_t * dx + sin_t * dy
        y1 = -sin_t * dx + cos_t * dy
        t = t_mid + t_half * x1 / length
        if t < THICKNESS_FLOOR:
            t = THICKNESS_FLOOR
        u = x1 / length
        v = y1 / t
        u2 = u * u
        v2 = v * v
        out[i] = 1.0 - cbrt(sqrt(u2 * u2 * u2 + v2 * v2 * v2))
    return out_arr


def heaviside(phi, double eps, double alpha):
    phi_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=np.float64)))
    out_arr = np.empty_like(phi_arr)
    cdef double[::1] flat = phi_arr.ravel()
    cdef double[::1] out = out_arr.ravel()
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef double p, scaled
    for i in range(n):
        p = flat[i]
        if p > eps:
            out[i] = 1.0
        elif p < -eps:
            out[i] = alpha
        else:
            scaled = p / eps
            out[i] = 0.75 * (1.0 - alpha) * (scaled - scaled * scaled * scaled / 3.0) \
                + 0.5 * (1.0 + alpha)
    if np.ndim(phi) == 0:
        return float(out_arr[0])
    return out_arr


def heaviside_derivative(phi, double eps, double alpha):
    phi_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(phi, dtype=np.float64)))
    out_arr = np.empty_like(phi_arr)
    cdef double[::1] flat = phi_arr.ravel()
    cdef double[::1] out = out_arr.ravel()
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef double p
    for i in range(n):
        p = flat[i]
        if fabs(p) <= eps:
            out[i] = 0.75 * (1.0 - alpha) * (1.0 / eps - p * p / (eps * eps * eps))
        else:
            out[i] = 0.0
    if np.ndim(phi) == 0:
        return float(out_arr[0])
    return out_arr


def grid_connected(solid, seeds, targets):
    cdef cnp.uint8_t[:, ::1] solid_m = np.ascontiguousarray(solid, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] targets_m = np.ascontiguousarray(targets, dtype=np.uint8)
    cdef cnp.int64_t[:, ::1] seeds_m = np.ascontiguousarray(
        np.asarray(seeds, dtype=np.int64).reshape(-1, 2)
    )
    cdef Py_ssize_t nx = solid_m.shape[0]
    cdef Py_ssize_t ny = solid_m.shape[1]
    visited_arr = np.zeros((nx, ny), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] visited = visited_arr
    queue_arr = np.empty(nx * ny, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t i, ex, ey, px, py, k
    cdef Py_ssize_t[4] ox = [-1, 1, 0, 0]
    cdef Py_ssize_t[4] oy = [0, 0, -1, 1]

    for i in range(seeds_m.shape[0]):
        ex = seeds_m[i, 0]
        ey = seeds_m[i, 1]
        if 0 <= ex < nx and 0 <= ey < ny and solid_m[ex, ey] and not visited[ex, ey]:
            if targets_m[ex, ey]:
                return True
            visited[ex, ey] = 1
            queue[tail] = ex * ny + ey
            tail += 1
    while head < tail:
        ex = queue[head] // ny
        ey = queue[head] % ny
        head += 1
        for k in range(4):
            px = ex + ox[k]
            py = ey + oy[k]
            if 0 <= px < nx and 0 <= py < ny and solid_m[px, py] and not visited[px, py]:
                if targets_m[px, py]:
                    return True
                visited[px, py] = 1
                queue[tail] = px * ny + py
                tail += 1
    return False
