# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of microtrap._kernels_ref; keep the arithmetic in sync."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, fabs, M_PI

cnp.import_array()


def segment_fields(cnp.float64_t[:, :] points,
                   cnp.float64_t[:, :] starts,
                   cnp.float64_t[:, :] ends,
                   cnp.float64_t[:] currents,
                   out=None):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t nseg = starts.shape[0]
    if out is None:
        out = np.zeros((n, 3), dtype=np.float64)
    cdef cnp.float64_t[:, :] res = out
    cdef Py_ssize_t i, m
    cdef double sx, sy, sz, length, ux, uy, uz, pref
    cdef double wx, wy, wz, a, rx, ry, rz, rho2, t1, t2, geom, scale
    for m in range(nseg):
        sx = ends[m, 0] - starts[m, 0]
        sy = ends[m, 1] - starts[m, 1]
        sz = ends[m, 2] - starts[m, 2]
        length = sqrt(sx * sx + sy * sy + sz * sz)
        ux = sx / length
        uy = sy / length
        uz = sz / length
        pref = 1e-7 * currents[m]
        for i in range(n):
            wx = points[i, 0] - starts[m, 0]
            wy = points[i, 1] - starts[m, 1]
            wz = points[i, 2] - starts[m, 2]
            a = wx * ux + wy * uy + wz * uz
            rx = wx - a * ux
            ry = wy - a * uy
            rz = wz - a * uz
            rho2 = rx * rx + ry * ry + rz * rz
            t1 = -a
            t2 = length - a
            geom = t2 / sqrt(rho2 + t2 * t2) - t1 / sqrt(rho2 + t1 * t1)
            scale = pref * geom / rho2
            res[i, 0] += scale * (uy * rz - uz * ry)
            res[i, 1] += scale * (uz * rx - ux * rz)
            res[i, 2] += scale * (ux * ry - uy * rx)
    return out


def infinite_wire_fields(cnp.float64_t[:, :] points,
                         axis_point,
                         direction,
                         double current,
                         out=None):
    cdef Py_ssize_t n = points.shape[0]
    if out is None:
        out = np.zeros((n, 3), dtype=np.float64)
    cdef cnp.float64_t[:, :] res = out
    cdef double ax = axis_point[0], ay = axis_point[1], az = axis_point[2]
    cdef double ux = direction[0], uy = direction[1], uz = direction[2]
    cdef double pref = 2e-7 * current
    cdef Py_ssize_t i
    cdef double wx, wy, wz, a, rx, ry, rz, rho2, scale
    for i in range(n):
        wx = points[i, 0] - ax
        wy = points[i, 1] - ay
        wz = points[i, 2] - az
        a = wx * ux + wy * uy + wz * uz
        rx = wx - a * ux
        ry = wy - a * uy
        rz = wz - a * uz
        rho2 = rx * rx + ry * ry + rz * rz
        scale = pref / rho2
        res[i, 0] += scale * (uy * rz - uz * ry)
        res[i, 1] += scale * (uz * rx - ux * rz)
        res[i, 2] += scale * (ux * ry - uy * rx)
    return out


def noise_samples(cnp.float64_t[:] u1,
                  cnp.float64_t[:] u2,
                  cnp.float64_t[:] u3,
                  double h,
                  int geom,
                  double p0,
                  double p1):
    cdef Py_ssize_t n = u1.shape[0]
    out_arr = np.empty((n, 6), dtype=np.float64)
    cdef cnp.float64_t[:, :] out = out_arr
    cdef Py_ssize_t i
    cdef double phi, mu, st, dx, dy, dz, s, w, x, y, z, yc, depth, factor
    if geom not in (0, 1, 2):
        raise ValueError(f"unknown geometry code {geom}")
    for i in range(n):
        phi = (2.0 * M_PI) * u1[i]
        mu = sqrt(u2[i])
        st = sqrt(1.0 - u2[i])
        dx = st * cos(phi)
        dy = -mu
        dz = st * sin(phi)
        if mu > 0.0:
            s = (h / mu) / (1.0 - u3[i])
            if geom == 0:
                w = 1.0
            elif geom == 1:
                depth = s * mu - h
                w = 1.0 if depth <= p0 else 0.0
            else:
                x = s * dx
                y = s * dy
                z = s * dz
                yc = y + (h + p0)
                w = 1.0 if (x * x + yc * yc <= p0 * p0 and fabs(z) <= p1) else 0.0
        else:
            w = 0.0
        factor = (M_PI / h) * w
        out[i, 0] = factor * (1.0 - dx * dx)
        out[i, 1] = factor * (1.0 - dy * dy)
        out[i, 2] = factor * (1.0 - dz * dz)
        out[i, 3] = factor * (-dx * dy)
        out[i, 4] = factor * (-dx * dz)
        out[i, 5] = factor * (-dy * dz)
    return out_arr
