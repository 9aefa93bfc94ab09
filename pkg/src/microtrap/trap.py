"""Trap location and characterization on top of the magnetostatics layer.

A trap is a local minimum of |B|; oscillation frequencies follow from the
|B| Hessian through the atom's static moment. Heights are reported both
from the outermost (sheath) surface of the guide wire and from its metal
surface, which is the relevant distance for surface-noise predictions.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .constants import G_EARTH, H_PLANCK, HBAR, K_B, MU0, MU_B, RB87, AtomSpecies, effective_moment
from .errors import ConvergenceError, DomainError, SingularityError, TrapNotFoundError
from .magnetostatics import (
    DEFAULT_FD_STEP,
    ChipLayout,
    as_vec3,
    field_magnitude_gradient,
    field_magnitude_hessian,
    total_field,
    total_field_many,
)

NEAR_ZERO_BOTTOM = 1e-6       # T (10 mG); below this the trap bottom is flagged
CURVATURE_FLOOR = 1.0         # T/m²; smaller principal curvatures count as flat
GRADIENT_TOL = 1e-9           # T/m


@dataclass(frozen=True)
class TrapCharacterization:
    position: np.ndarray            # m
    B0: float                       # T, field magnitude at the minimum
    f0: float                       # Hz, spin-flip resonance
    principal_curvatures: np.ndarray  # T/m², ascending, flat directions clamped to 0
    principal_axes: np.ndarray      # columns match principal_curvatures
    trap_frequencies: np.ndarray    # Hz, same order
    height_above_surface: float     # m, from the guide wire's outer surface
    height_above_conductor: float   # m, from the metal surface
    gradient_norm: float            # T/m at the reported minimum
    near_zero: bool                 # B0 < 10 mG
    depth: float | None = None      # J, filled in by trap_depth on request


def spin_flip_frequency(B0: float, atom: AtomSpecies = RB87) -> float:
    """Resonance frequency (Hz) between adjacent Zeeman sublevels at field B0."""
    if B0 < 0:
        raise DomainError("trap bottom field must be non-negative")
    return abs(atom.gF) * MU_B * B0 / H_PLANCK


def bottom_field_for_frequency(f0: float, atom: AtomSpecies = RB87) -> float:
    """Inverse of spin_flip_frequency: field (T) with resonance f0 (Hz)."""
    if f0 < 0:
        raise DomainError("spin-flip frequency must be non-negative")
    return f0 * H_PLANCK / (abs(atom.gF) * MU_B)


def trap_height_side_guide(current: float, bias: float) -> float:
    """Distance (m) from the wire axis where the bias cancels the wire field."""
    if current <= 0 or bias <= 0:
        raise DomainError("side-guide height needs positive current and bias")
    return MU0 * current / (2.0 * math.pi * bias)


def radial_frequency_side_guide(bias: float, rho: float, B0: float,
                                atom: AtomSpecies = RB87) -> float:
    """Analytic radial frequency (Hz) of a side guide with bottom field B0."""
    if bias <= 0 or rho <= 0 or B0 <= 0:
        raise DomainError("side-guide frequency needs positive bias, rho and B0")
    mu = effective_moment(atom)
    return (bias / rho) * math.sqrt(mu / (atom.mass * B0)) / (2.0 * math.pi)


def _objective(layout: ChipLayout, atom: AtomSpecies, include_gravity: bool, fd_step: float):
    tilt = atom.mass * G_EARTH / effective_moment(atom) if include_gravity else 0.0

    def value(p):
        return float(np.linalg.norm(total_field(p, layout))) + tilt * p[1]

    def grad(p):
        g = field_magnitude_gradient(p, layout, step=fd_step)
        if tilt:
            g = g + np.array([0.0, tilt, 0.0])
        return g

    def hess(p):
        return field_magnitude_hessian(p, layout, step=fd_step)

    return value, grad, hess


def find_minimum(layout: ChipLayout, seed, atom: AtomSpecies = RB87, *,
                 grad_tol: float = GRADIENT_TOL, max_iter: int = 200,
                 fd_step: float = DEFAULT_FD_STEP,
                 include_gravity: bool = False) -> TrapCharacterization:
    """Refine seed to a |B| minimum and characterize the trap there.

    Damped (eigenvalue-modified) Newton with a backtracking line search;
    converges when the finite-difference |B| gradient drops below grad_tol.
    Flat landscapes and saddles are rejected rather than reported.
    """
    p = as_vec3(seed).copy()
    if layout.inside_conductor(p):
        raise DomainError("seed point lies inside a conductor volume")
    value, grad, hess = _objective(layout, atom, include_gravity, fd_step)

    f = value(p)
    converged = False
    for _ in range(max_iter):
        g = grad(p)
        if np.linalg.norm(g) < grad_tol:
            converged = True
            break
        h = hess(p)
        lam, vecs = np.linalg.eigh(h)
        floor = max(1e-8 * float(np.max(np.abs(lam))), 1e-12)
        step = -vecs @ ((vecs.T @ g) / np.maximum(np.abs(lam), floor))
        # keep steps below 1 mm so far seeds cannot overshoot into a wire
        norm = np.linalg.norm(step)
        if norm > 1e-3:
            step *= 1e-3 / norm
        alpha = 1.0
        improved = False
        for _ in range(40):
            trial = p + alpha * step
            try:
                if not layout.inside_conductor(trial):
                    ft = value(trial)
                    if ft < f:
                        p, f = trial, ft
                        improved = True
                        break
            except SingularityError:
                pass
            alpha *= 0.5
        if not improved:
            # pure gradient fallback, scaled to a micrometer-sized move
            gdir = -g / np.linalg.norm(g)
            alpha = 1e-6
            for _ in range(40):
                trial = p + alpha * gdir
                try:
                    if not layout.inside_conductor(trial):
                        ft = value(trial)
                        if ft < f:
                            p, f = trial, ft
                            improved = True
                            break
                except SingularityError:
                    pass
                alpha *= 0.5
        if not improved:
            g = grad(p)
            converged = np.linalg.norm(g) < grad_tol
            break
    else:
        g = grad(p)
        converged = np.linalg.norm(g) < grad_tol

    gnorm = float(np.linalg.norm(grad(p)))
    if not converged and gnorm >= grad_tol:
        raise ConvergenceError(
            f"no |B| minimum found: gradient norm {gnorm:.3e} T/m after {max_iter} iterations"
        )

    h = hess(p)
    lam, vecs = np.linalg.eigh(h)
    max_curv = float(np.max(lam))
    if max_curv < CURVATURE_FLOOR:
        raise TrapNotFoundError(
            "stationary point has no confining curvature "
            f"(max |B| curvature {max_curv:.3e} T/m²); the layout forms no trap"
        )
    saddle_tol = 1e-6 * max_curv + CURVATURE_FLOOR
    if float(np.min(lam)) < -saddle_tol:
        raise TrapNotFoundError(
            f"converged to a saddle of |B| (curvatures {lam} T/m²)"
        )
    curv = np.maximum(lam, 0.0)

    b0 = float(np.linalg.norm(total_field(p, layout)))
    mu = effective_moment(atom)
    freqs = np.sqrt(mu * curv / atom.mass) / (2.0 * math.pi)

    gw = layout.guide
    w = p - gw.wire.axis_point
    a = float(np.dot(w, gw.wire.direction))
    rho = float(np.linalg.norm(w - a * gw.wire.direction))
    return TrapCharacterization(
        position=p,
        B0=b0,
        f0=spin_flip_frequency(b0, atom),
        principal_curvatures=curv,
        principal_axes=vecs,
        trap_frequencies=freqs,
        height_above_surface=rho - gw.outer_radius,
        height_above_conductor=rho - gw.conductor_radius,
        gradient_norm=gnorm,
        near_zero=b0 < NEAR_ZERO_BOTTOM,
    )


def _fibonacci_directions(n: int) -> np.ndarray:
    k = np.arange(n)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    y = 1.0 - 2.0 * (k + 0.5) / n
    r = np.sqrt(1.0 - y * y)
    return np.stack([r * np.cos(phi), y, r * np.sin(phi)], axis=1)


def trap_depth(char: TrapCharacterization, layout: ChipLayout,
               atom: AtomSpecies = RB87, *, n_rays: int = 26,
               max_extent: float = 5e-3, n_samples: int = 400,
               include_gravity: bool = False) -> float:
    """Escape barrier (J): smallest over sampled rays of max(U) - U(min)."""
    mu = effective_moment(atom)
    tilt = atom.mass * G_EARTH if include_gravity else 0.0

    def potential(points):
        mags = np.linalg.norm(total_field_many(points, layout, on_singular="nan"), axis=1)
        return mu * mags + tilt * points[:, 1]

    u0 = float(potential(char.position.reshape(1, 3))[0])
    barriers = []
    ts = np.linspace(0.0, max_extent, n_samples + 1)[1:]
    for d in _fibonacci_directions(n_rays):
        pts = char.position + ts[:, None] * d
        inside = np.array([layout.inside_conductor(q) for q in pts])
        if inside.any():
            cut = int(np.argmax(inside))
            if cut == 0:
                continue
            pts = pts[:cut]
        u = potential(pts)
        if np.isnan(u).any():
            warnings.warn("escape ray touched a field singularity; ray skipped")
            continue
        barriers.append(float(np.max(u)) - u0)
    if not barriers:
        raise DomainError("no usable escape rays; cannot estimate trap depth")
    return max(min(barriers), 0.0)


@dataclass(frozen=True)
class RampSpec:
    """Linear ramp of currents and biases between two structurally equal layouts."""

    start: ChipLayout
    end: ChipLayout
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 2:
            raise DomainError("a ramp needs at least 2 steps")
        s, e = self.start, self.end
        if len(s.transverse) != len(e.transverse):
            raise DomainError("ramp endpoints differ in transverse wire count")
        if not np.allclose(s.guide.wire.axis_point, e.guide.wire.axis_point) or \
           not np.allclose(s.guide.wire.direction, e.guide.wire.direction):
            raise DomainError("ramp endpoints differ in guide wire geometry")
        for a, b in zip(s.transverse, e.transverse):
            if not np.allclose(a.segment.start, b.segment.start) or \
               not np.allclose(a.segment.end, b.segment.end):
                raise DomainError("ramp endpoints differ in transverse wire geometry")

    def layout_at(self, t: float) -> ChipLayout:
        from dataclasses import replace

        s, e = self.start, self.end
        guide = replace(
            s.guide,
            wire=replace(s.guide.wire,
                         current=(1 - t) * s.guide.wire.current + t * e.guide.wire.current),
        )
        transverse = tuple(
            replace(a, segment=replace(a.segment,
                                       current=(1 - t) * a.segment.current + t * b.segment.current))
            for a, b in zip(s.transverse, e.transverse)
        )
        return replace(s, guide=guide, transverse=transverse,
                       bias_x=(1 - t) * s.bias_x + t * e.bias_x,
                       bias_z=(1 - t) * s.bias_z + t * e.bias_z)


@dataclass(frozen=True)
class RampResult:
    characterizations: list
    failed_at: int | None = None  # index of the first step that lost the trap


def ramp_trajectory(spec: RampSpec, seed, atom: AtomSpecies = RB87,
                    **find_kwargs) -> RampResult:
    """Characterize the trap at every ramp step, seeding each from the last."""
    chars = []
    current_seed = as_vec3(seed)
    for k in range(spec.n_steps):
        t = k / (spec.n_steps - 1)
        layout = spec.layout_at(t)
        try:
            char = find_minimum(layout, current_seed, atom, **find_kwargs)
        except (ConvergenceError, DomainError) as exc:
            warnings.warn(f"trap lost at ramp step {k}: {exc}")
            return RampResult(characterizations=chars, failed_at=k)
        chars.append(char)
        current_seed = char.position
    return RampResult(characterizations=chars)


@dataclass(frozen=True)
class CloudProperties:
    peak_density: float          # m^-3
    phase_space_density: float   # dimensionless
    collision_rate: float        # s^-1
    thermal_radii: np.ndarray    # m, 1/e radii per axis


def cloud_properties(n_atoms: float, temperature: float, frequencies,
                     atom: AtomSpecies = RB87) -> CloudProperties:
    """Gaussian thermal-cloud figures for a harmonic trap."""
    freqs = np.asarray(frequencies, dtype=float)
    if n_atoms < 1:
        raise DomainError("need at least one atom")
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    if np.any(freqs <= 0):
        raise DomainError("trap frequencies must be positive")
    omega = 2.0 * math.pi * freqs
    m = atom.mass
    n0 = n_atoms * float(np.prod(omega)) * (m / (2.0 * math.pi * K_B * temperature)) ** 1.5
    vbar = math.sqrt(8.0 * K_B * temperature / (math.pi * m))
    sigma_s = 8.0 * math.pi * atom.scattering_length**2
    rate = math.sqrt(2.0) * n0 * sigma_s * vbar
    lam_db = H_PLANCK / math.sqrt(2.0 * math.pi * m * K_B * temperature)
    radii = np.sqrt(K_B * temperature / m) / omega
    return CloudProperties(
        peak_density=n0,
        phase_space_density=n0 * lam_db**3,
        collision_rate=rate,
        thermal_radii=radii,
    )


def critical_temperature(n_atoms: float, frequencies) -> float:
    """BEC critical temperature (K): kB·Tc = ħ·ω̄·(N/ζ(3))^(1/3)."""
    freqs = np.asarray(frequencies, dtype=float)
    if n_atoms < 1:
        raise DomainError("need at least one atom")
    if np.any(freqs <= 0):
        raise DomainError("trap frequencies must be positive")
    omega_bar = 2.0 * math.pi * float(np.prod(freqs)) ** (1.0 / 3.0)
    return HBAR * omega_bar * (n_atoms / float(zeta(3.0))) ** (1.0 / 3.0) / K_B
