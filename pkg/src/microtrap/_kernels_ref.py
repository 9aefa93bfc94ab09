"""Pure-numpy reference implementation of the hot kernels.

The compiled extension (microtrap._kernels) mirrors these routines
expression-for-expression so that both backends produce numerically
matching results; keep the two in sync when editing either.
"""

import math

import numpy as np

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi


def segment_fields(points, starts, ends, currents, out=None):
    """Biot-Savart field (T) of straight finite segments, summed over segments.

    points: (N,3) observation points; starts/ends: (M,3); currents: (M,) A.
    Singular observation points (on a segment's supporting line) are the
    caller's responsibility; this routine just evaluates the closed form.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if out is None:
        out = np.zeros((n, 3), dtype=np.float64)
    for m in range(starts.shape[0]):
        seg = ends[m] - starts[m]
        length = math.sqrt(seg[0] ** 2 + seg[1] ** 2 + seg[2] ** 2)
        ux, uy, uz = seg[0] / length, seg[1] / length, seg[2] / length
        pref = 1e-7 * currents[m]  # mu0/(4 pi) * I
        wx = points[:, 0] - starts[m, 0]
        wy = points[:, 1] - starts[m, 1]
        wz = points[:, 2] - starts[m, 2]
        a = wx * ux + wy * uy + wz * uz
        rx = wx - a * ux
        ry = wy - a * uy
        rz = wz - a * uz
        rho2 = rx * rx + ry * ry + rz * rz
        t1 = -a
        t2 = length - a
        geom = t2 / np.sqrt(rho2 + t2 * t2) - t1 / np.sqrt(rho2 + t1 * t1)
        scale = pref * geom / rho2
        out[:, 0] += scale * (uy * rz - uz * ry)
        out[:, 1] += scale * (uz * rx - ux * rz)
        out[:, 2] += scale * (ux * ry - uy * rx)
    return out


def infinite_wire_fields(points, axis_point, direction, current, out=None):
    """Field (T) of an infinite straight wire: |B| = mu0 I / (2 pi rho), azimuthal."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if out is None:
        out = np.zeros((n, 3), dtype=np.float64)
    ux, uy, uz = float(direction[0]), float(direction[1]), float(direction[2])
    pref = 2e-7 * current  # mu0/(2 pi) * I
    wx = points[:, 0] - axis_point[0]
    wy = points[:, 1] - axis_point[1]
    wz = points[:, 2] - axis_point[2]
    a = wx * ux + wy * uy + wz * uz
    rx = wx - a * ux
    ry = wy - a * uy
    rz = wz - a * uz
    rho2 = rx * rx + ry * ry + rz * rz
    scale = pref / rho2
    out[:, 0] += scale * (uy * rz - uz * ry)
    out[:, 1] += scale * (uz * rx - ux * rz)
    out[:, 2] += scale * (ux * ry - uy * rx)
    return out


def noise_samples(u1, u2, u3, h, geom, p0, p1):
    """Per-sample estimates of the reduced current-noise integrals (1/m units).

    Importance sampling with density p ∝ 1/s⁴ over the half-space tangent to
    the conductor at its nearest surface point (atom at the origin, surface
    normal +y, surface plane y = -h). Each returned row is the full
    integrand/density ratio for one sample, zeroed when the point falls
    outside the actual conductor volume:

        f_ij = (pi/h) * [inside] * (delta_ij - d_i d_j)

    geom: 0 half-space, 1 slab/film of thickness p0, 2 cylinder of radius p0
    with axis along z at axial cutoff |z| <= p1.
    Column order: xx, yy, zz, xy, xz, yz.
    """
    phi = TWO_PI * u1
    mu = np.sqrt(u2)
    st = np.sqrt(1.0 - u2)
    dx = st * np.cos(phi)
    dy = -mu
    dz = st * np.sin(phi)
    safe_mu = np.where(mu > 0.0, mu, 1.0)
    s = (h / safe_mu) / (1.0 - u3)

    if geom == 0:
        w = np.where(mu > 0.0, 1.0, 0.0)
    elif geom == 1:
        depth = s * mu - h
        w = np.where((mu > 0.0) & (depth <= p0), 1.0, 0.0)
    elif geom == 2:
        x = s * dx
        y = s * dy
        z = s * dz
        yc = y + (h + p0)
        w = np.where(
            (mu > 0.0) & (x * x + yc * yc <= p0 * p0) & (np.abs(z) <= p1),
            1.0,
            0.0,
        )
    else:
        raise ValueError(f"unknown geometry code {geom}")

    factor = (math.pi / h) * w
    out = np.empty((u1.shape[0], 6), dtype=np.float64)
    out[:, 0] = factor * (1.0 - dx * dx)
    out[:, 1] = factor * (1.0 - dy * dy)
    out[:, 2] = factor * (1.0 - dz * dz)
    out[:, 3] = factor * (-dx * dy)
    out[:, 4] = factor * (-dx * dz)
    out[:, 5] = factor * (-dy * dz)
    return out
