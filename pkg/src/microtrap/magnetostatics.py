"""Static magnetic fields of chip wire layouts.

Coordinate frame: the guide wire runs along z, the transverse bias points
along x, and y is the vertical (height above the chip). Wires are treated
as filaments; their radii matter only for surface-distance bookkeeping and
singularity exclusion.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import DomainError, SingularityError

SINGULARITY_EPS = 1e-9  # m, default exclusion radius around filaments
DEFAULT_FD_STEP = 1e-7  # m, finite-difference step (0.1 um)


def as_vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite vector component in {v!r}")
    return arr


@dataclass(frozen=True)
class InfiniteStraightWire:
    axis_point: np.ndarray
    direction: np.ndarray  # unit vector
    current: float         # A

    def __post_init__(self):
        object.__setattr__(self, "axis_point", as_vec3(self.axis_point))
        d = as_vec3(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise DomainError("wire direction must have unit norm (within 1e-12)")
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class FiniteSegment:
    start: np.ndarray
    end: np.ndarray
    current: float  # A, flowing start -> end

    def __post_init__(self):
        s = as_vec3(self.start)
        e = as_vec3(self.end)
        if np.array_equal(s, e):
            raise DomainError("segment start and end coincide")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)


@dataclass(frozen=True)
class UniformField:
    B: np.ndarray  # T

    def __post_init__(self):
        object.__setattr__(self, "B", as_vec3(self.B))


CurrentElement = InfiniteStraightWire | FiniteSegment | UniformField


@dataclass(frozen=True)
class GuideWire:
    """Infinite guide wire plus its radial build-up (all radii in m)."""

    wire: InfiniteStraightWire
    outer_radius: float = 250e-6
    core_radius: float = 185e-6
    cladding_thickness: float = 55e-6
    sheath_thickness: float = 10e-6

    def __post_init__(self):
        total = self.core_radius + self.cladding_thickness + self.sheath_thickness
        if abs(total - self.outer_radius) > 1e-12:
            raise DomainError(
                f"guide wire radii sum to {total} m, expected outer radius {self.outer_radius} m"
            )

    @property
    def conductor_radius(self) -> float:
        """Radius of the outermost metal surface (below the ceramic sheath)."""
        return self.outer_radius - self.sheath_thickness


@dataclass(frozen=True)
class TransverseWire:
    segment: FiniteSegment
    diameter: float = 800e-6

    def __post_init__(self):
        if self.diameter <= 0:
            raise DomainError("transverse wire diameter must be positive")


@dataclass(frozen=True)
class ChipLayout:
    guide: GuideWire
    transverse: tuple = ()
    bias_x: float = 0.0  # T
    bias_z: float = 0.0  # T

    def __post_init__(self):
        object.__setattr__(self, "transverse", tuple(self.transverse))
        gdir = self.guide.wire.direction
        for tw in self.transverse:
            seg = tw.segment
            # transverse wires must sit below the guide wire without touching it
            mid = 0.5 * (seg.start + seg.end)
            rel_y = mid[1] - self.guide.wire.axis_point[1]
            min_gap = self.guide.outer_radius + 0.5 * tw.diameter
            if rel_y > -min_gap + 1e-12:
                raise DomainError(
                    "transverse wire must lie below the guide wire "
                    f"(axis offset {rel_y} m, need <= {-min_gap} m)"
                )
            if abs(np.dot(seg.end - seg.start, gdir)) > 1e-9 * np.linalg.norm(seg.end - seg.start):
                raise DomainError("transverse wires must be perpendicular to the guide wire")

    @property
    def bias(self) -> np.ndarray:
        return np.array([self.bias_x, 0.0, self.bias_z])

    def elements(self) -> list:
        elems: list = [self.guide.wire]
        elems += [tw.segment for tw in self.transverse]
        if self.bias_x != 0.0 or self.bias_z != 0.0:
            elems.append(UniformField(self.bias))
        return elems

    def scaled_sources(self, alpha: float) -> "ChipLayout":
        """All currents and biases multiplied by alpha; geometry unchanged."""
        guide = replace(self.guide, wire=replace(self.guide.wire, current=alpha * self.guide.wire.current))
        transverse = tuple(
            replace(tw, segment=replace(tw.segment, current=alpha * tw.segment.current))
            for tw in self.transverse
        )
        return replace(self, guide=guide, transverse=transverse,
                       bias_x=alpha * self.bias_x, bias_z=alpha * self.bias_z)

    def inside_conductor(self, p) -> bool:
        p = as_vec3(p)
        w = p - self.guide.wire.axis_point
        a = np.dot(w, self.guide.wire.direction)
        if np.linalg.norm(w - a * self.guide.wire.direction) <= self.guide.outer_radius:
            return True
        for tw in self.transverse:
            if _segment_distance(p, tw.segment) <= 0.5 * tw.diameter:
                return True
        return False


def _line_distance(p, wire: InfiniteStraightWire) -> float:
    w = p - wire.axis_point
    a = np.dot(w, wire.direction)
    return float(np.linalg.norm(w - a * wire.direction))


def _segment_line_distance(p, seg: FiniteSegment) -> float:
    u = seg.end - seg.start
    u = u / np.linalg.norm(u)
    w = p - seg.start
    return float(np.linalg.norm(w - np.dot(w, u) * u))


def _segment_distance(p, seg: FiniteSegment) -> float:
    u = seg.end - seg.start
    length = np.linalg.norm(u)
    u = u / length
    w = p - seg.start
    a = np.clip(np.dot(w, u), 0.0, length)
    return float(np.linalg.norm(w - a * u))


def field_infinite_wire(p, wire: InfiniteStraightWire, eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Field (T) at p of an infinite straight wire; azimuthal, mu0 I/(2 pi rho)."""
    p = as_vec3(p)
    if _line_distance(p, wire) < eps:
        raise SingularityError(f"observation point within {eps} m of the wire axis")
    out = kernels.infinite_wire_fields(p.reshape(1, 3), wire.axis_point, wire.direction, wire.current)
    return out[0]


def field_finite_segment(p, seg: FiniteSegment, eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Field (T) at p of a straight finite segment (closed-form Biot-Savart)."""
    p = as_vec3(p)
    if _segment_line_distance(p, seg) < eps:
        raise SingularityError(f"observation point within {eps} m of the segment line")
    starts = seg.start.reshape(1, 3)
    ends = seg.end.reshape(1, 3)
    currents = np.array([seg.current])
    return kernels.segment_fields(p.reshape(1, 3), starts, ends, currents)[0]


def _layout_arrays(layout: ChipLayout):
    if layout.transverse:
        starts = np.stack([tw.segment.start for tw in layout.transverse])
        ends = np.stack([tw.segment.end for tw in layout.transverse])
        currents = np.array([tw.segment.current for tw in layout.transverse])
    else:
        starts = np.zeros((0, 3))
        ends = np.ones((0, 3))
        currents = np.zeros(0)
    return starts, ends, currents


def total_field_many(points, layout: ChipLayout, eps: float = SINGULARITY_EPS,
                     on_singular: str = "raise") -> np.ndarray:
    """Superposed field (T) at an (N,3) array of points.

    on_singular: "raise" rejects the whole call if any point is within eps
    of a filament; "nan" writes NaN rows for those points instead.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[1] != 3:
        raise DomainError("points must have shape (N, 3)")
    if not np.all(np.isfinite(points)):
        raise DomainError("non-finite observation point")
    gw = layout.guide.wire
    w = points - gw.axis_point
    a = w @ gw.direction
    rho = np.linalg.norm(w - a[:, None] * gw.direction, axis=1)
    bad = rho < eps
    starts, ends, currents = _layout_arrays(layout)
    for m in range(starts.shape[0]):
        u = ends[m] - starts[m]
        u = u / np.linalg.norm(u)
        w = points - starts[m]
        rho = np.linalg.norm(w - (w @ u)[:, None] * u, axis=1)
        bad |= rho < eps
    if np.any(bad):
        if on_singular == "raise":
            raise SingularityError(
                f"{int(bad.sum())} observation point(s) within {eps} m of a filament"
            )
        points = points.copy()
        points[bad] = 1.0  # placeholder, overwritten with NaN below

    out = np.zeros_like(points)
    kernels.infinite_wire_fields(points, gw.axis_point, gw.direction, gw.current, out=out)
    if starts.shape[0]:
        kernels.segment_fields(points, starts, ends, currents, out=out)
    out += layout.bias
    if np.any(bad):
        out[bad] = np.nan
    return out


def total_field(p, layout: ChipLayout, eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Superposed field (T) of all layout sources at a single point."""
    return total_field_many(as_vec3(p).reshape(1, 3), layout, eps=eps)[0]


def field_magnitude(p, layout: ChipLayout, eps: float = SINGULARITY_EPS) -> float:
    return float(np.linalg.norm(total_field(p, layout, eps=eps)))


def _stencil_points(p, step):
    offsets = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        offsets.append(p + e)
        offsets.append(p - e)
    return np.stack(offsets)


def field_jacobian(p, layout: ChipLayout, step: float = DEFAULT_FD_STEP,
                   richardson: bool = False, eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Central-difference Jacobian J[i,j] = dB_i/dx_j (T/m)."""
    if step <= 0:
        raise DomainError("finite-difference step must be positive")
    p = as_vec3(p)
    if richardson:
        j1 = field_jacobian(p, layout, step=step, richardson=False, eps=eps)
        j2 = field_jacobian(p, layout, step=0.5 * step, richardson=False, eps=eps)
        return (4.0 * j2 - j1) / 3.0
    fields = total_field_many(_stencil_points(p, step), layout, eps=eps)
    jac = np.empty((3, 3))
    for j in range(3):
        jac[:, j] = (fields[2 * j] - fields[2 * j + 1]) / (2.0 * step)
    return jac


def field_magnitude_gradient(p, layout: ChipLayout, step: float = DEFAULT_FD_STEP,
                             eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Central-difference gradient of |B| (T/m)."""
    if step <= 0:
        raise DomainError("finite-difference step must be positive")
    p = as_vec3(p)
    mags = np.linalg.norm(total_field_many(_stencil_points(p, step), layout, eps=eps), axis=1)
    return (mags[0::2] - mags[1::2]) / (2.0 * step)


def field_magnitude_hessian(p, layout: ChipLayout, step: float = DEFAULT_FD_STEP,
                            eps: float = SINGULARITY_EPS) -> np.ndarray:
    """Central-difference Hessian of |B| (T/m²), symmetrized."""
    if step <= 0:
        raise DomainError("finite-difference step must be positive")
    p = as_vec3(p)
    pts = [p]
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        pts += [p + e, p - e]
    for j in range(3):
        for k in range(j + 1, 3):
            ej = np.zeros(3)
            ej[j] = step
            ek = np.zeros(3)
            ek[k] = step
            pts += [p + ej + ek, p + ej - ek, p - ej + ek, p - ej - ek]
    mags = np.linalg.norm(total_field_many(np.stack(pts), layout, eps=eps), axis=1)
    h = np.empty((3, 3))
    f0 = mags[0]
    for j in range(3):
        h[j, j] = (mags[1 + 2 * j] + mags[2 + 2 * j] - 2.0 * f0) / step**2
    idx = 7
    for j in range(3):
        for k in range(j + 1, 3):
            fpp, fpm, fmp, fmm = mags[idx:idx + 4]
            idx += 4
            h[j, k] = h[k, j] = (fpp - fpm - fmp + fmm) / (4.0 * step**2)
    return 0.5 * (h + h.T)
