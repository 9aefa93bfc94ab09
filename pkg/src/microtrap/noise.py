"""Spin-flip loss predictions near warm conductors.

Two routes are deliberately kept independent:

* flip_lifetime_slab — the closed-form lifetime law
  tau = C * f0 * (h/delta) * (2 h^3 + 3 delta^3), valid for a thick slab,
  with a single global normalization constant C.
* quasistatic_noise_tensor — a seeded Monte Carlo evaluation of the
  magnetic noise tensor from delta-correlated Johnson currents
  (one-sided S_j = 4 kB T sigma), valid for heights well below the skin
  depth, for half-space, slab/film and cylinder volumes.

calibrate_quasistatic fixes C once by matching the closed form's small-h
limit to the Monte Carlo rate; the shipped record in data/calibration.cfg
was produced that way and is used whenever no explicit C is passed.

Geometry frame: atom at the origin, conductor surface plane y = -h, chip
axis along z. The trap-bottom field defaults to +z, so the noise components
driving spin flips are the xx and yy ones.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels
from .constants import HBAR, K_B, MU0, RB87, AtomSpecies, transition_moment
from .errors import CalibrationError, DomainError

REFERENCE_TEMPERATURE = 300.0  # K, the temperature at which C_norm is quoted
DEFAULT_STREAMS = 16           # independent MC streams; fixed for reproducibility
CYLINDER_CUTOFF_FACTOR = 50.0  # axial cutoff in units of the atom height


def skin_depth(frequency: float, conductivity: float) -> float:
    """Skin depth (m): 1/sqrt(pi * mu0 * sigma * f)."""
    if frequency <= 0 or conductivity <= 0:
        raise DomainError("skin depth needs positive frequency and conductivity")
    return 1.0 / math.sqrt(math.pi * MU0 * conductivity * frequency)


@dataclass(frozen=True)
class HalfSpace:
    pass


@dataclass(frozen=True)
class Slab:
    thickness: float  # m

    def __post_init__(self):
        if self.thickness <= 0:
            raise DomainError("slab thickness must be positive")


@dataclass(frozen=True)
class Film(Slab):
    """Same truncated volume as Slab; separate name for thin-layer contexts."""


@dataclass(frozen=True)
class Cylinder:
    radius: float                 # m
    axis: tuple = (0.0, 0.0, 1.0)  # unit vector, perpendicular to the surface normal

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("cylinder radius must be positive")
        a = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise DomainError("cylinder axis must be a unit vector")
        if abs(a[1]) > 1e-12:
            raise DomainError("cylinder axis must be horizontal (atom above the curved side)")
        object.__setattr__(self, "axis", tuple(float(x) for x in a))


Geometry = HalfSpace | Slab | Film | Cylinder


@dataclass(frozen=True)
class Conductor:
    geometry: Geometry
    conductivity: float  # S/m
    temperature: float   # K

    def __post_init__(self):
        if self.conductivity <= 0:
            raise DomainError("conductivity must be positive")
        if self.temperature <= 0:
            raise DomainError("temperature must be positive")


ALUMINUM_HALFSPACE = Conductor(HalfSpace(), conductivity=3.77e7, temperature=300.0)


@dataclass(frozen=True)
class NoiseSpectrum:
    """One-sided magnetic noise tensor S_ij (T²/Hz) at a single height."""

    height: float
    tensor: np.ndarray        # (3,3), symmetric
    errors: np.ndarray        # (3,3), 1-sigma MC estimates
    n_samples: int
    seed_entropy: int
    converged: bool
    quasistatic_ok: bool | None = None   # only set when a frequency was supplied
    cutoff_converged: bool | None = None  # cylinder geometries only


def _geometry_code(geometry: Geometry, h: float):
    if isinstance(geometry, HalfSpace):
        return 0, 0.0, 0.0, None
    if isinstance(geometry, Slab):  # covers Film
        return 1, geometry.thickness, 0.0, None
    if isinstance(geometry, Cylinder):
        cutoff = CYLINDER_CUTOFF_FACTOR * h
        return 2, geometry.radius, cutoff, np.asarray(geometry.axis)
    raise DomainError(f"unsupported geometry {geometry!r}")


def _rotation_to_kernel_frame(axis: np.ndarray) -> np.ndarray:
    """Rotation about y mapping the lab-frame cylinder axis onto +z."""
    c, s = axis[2], axis[0]
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _stream_counts(budget: int, n_streams: int) -> list:
    per = (budget + n_streams - 1) // n_streams
    return [per] * n_streams


def _stream_mean(child_seed, count, h, geom, p0, p1):
    gen = np.random.Generator(np.random.PCG64(child_seed))
    u12 = gen.random((count, 2))
    # stratify the radial coordinate: one sample per depth stratum
    u3 = (np.arange(count) + gen.random(count)) / count
    samples = kernels.noise_samples(
        np.ascontiguousarray(u12[:, 0]), np.ascontiguousarray(u12[:, 1]), u3,
        h, geom, p0, p1,
    )
    return samples.mean(axis=0)


def _reduced_tensor(h, geom, p0, p1, budget, seedseq, n_streams, workers):
    children = seedseq.spawn(n_streams)
    counts = _stream_counts(budget, n_streams)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            means = list(pool.map(
                lambda args: _stream_mean(args[0], args[1], h, geom, p0, p1),
                zip(children, counts),
            ))
    else:
        means = [_stream_mean(c, n, h, geom, p0, p1) for c, n in zip(children, counts)]
    means = np.stack(means)  # (n_streams, 6) in fixed stream order
    mean = means.mean(axis=0)
    err = means.std(axis=0, ddof=1) / math.sqrt(n_streams)
    return mean, err, sum(counts)


def _to_matrix(v6: np.ndarray) -> np.ndarray:
    xx, yy, zz, xy, xz, yz = v6
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def quasistatic_noise_tensor(h: float, conductor: Conductor,
                             mc_budget: int = 1_000_000, seed=0, *,
                             n_streams: int = DEFAULT_STREAMS,
                             rel_tol: float = 0.02,
                             frequency: float | None = None,
                             workers: int = 1) -> NoiseSpectrum:
    """Monte Carlo noise tensor at height h above the conductor surface.

    Deterministic for a fixed seed: the budget is split over n_streams
    independently seeded streams whose means are combined in stream order,
    so the result does not depend on the worker count. The inter-stream
    scatter supplies the error estimate; `converged` reports whether the
    relative error on the diagonal met rel_tol within the budget.
    """
    if h <= 0:
        raise DomainError("height must be positive")
    if mc_budget < n_streams:
        raise DomainError(f"mc_budget must be at least n_streams ({n_streams})")
    geom, p0, p1, axis = _geometry_code(conductor.geometry, h)
    seedseq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)

    rot = None
    if axis is not None and not np.allclose(axis, [0.0, 0.0, 1.0]):
        rot = _rotation_to_kernel_frame(axis)

    mean, err, n_total = _reduced_tensor(h, geom, p0, p1, mc_budget, seedseq,
                                         n_streams, workers)

    cutoff_converged = None
    if geom == 2:
        # doubling check on the axial cutoff with a quarter of the budget
        check_budget = max(n_streams, mc_budget // 4)
        mean2, err2, _ = _reduced_tensor(h, geom, p0, 2.0 * p1, check_budget,
                                         seedseq.spawn(1)[0], n_streams, workers)
        fw1 = mean[0] + mean[1]
        fw2 = mean2[0] + mean2[1]
        tol = 2.0 * (err[0] + err[1] + err2[0] + err2[1]) + 0.01 * abs(fw1)
        cutoff_converged = bool(abs(fw2 - fw1) <= tol)

    scale = (MU0 / (4.0 * math.pi)) ** 2 * 4.0 * K_B * conductor.temperature * conductor.conductivity
    tensor = scale * _to_matrix(mean)
    errors = scale * _to_matrix(err)
    if rot is not None:
        tensor = rot.T @ tensor @ rot
        errors = np.abs(rot.T) @ errors @ np.abs(rot)

    diag = np.abs(np.diag(tensor))
    derr = np.diag(errors)
    converged = bool(np.all(derr <= rel_tol * np.maximum(diag, 1e-300)))

    quasistatic_ok = None
    if frequency is not None:
        quasistatic_ok = bool(h <= 0.1 * skin_depth(frequency, conductor.conductivity))

    return NoiseSpectrum(
        height=h,
        tensor=tensor,
        errors=errors,
        n_samples=n_total,
        seed_entropy=int(seedseq.entropy) if seedseq.entropy is not None else 0,
        converged=converged,
        quasistatic_ok=quasistatic_ok,
        cutoff_converged=cutoff_converged,
    )


def flip_weighted_noise(spectrum: NoiseSpectrum, bottom_direction=(0.0, 0.0, 1.0)) -> float:
    """Sum (T²/Hz) of the two tensor components perpendicular to the trap bottom field."""
    n = np.asarray(bottom_direction, dtype=float)
    n = n / np.linalg.norm(n)
    s = spectrum.tensor
    return float(np.trace(s) - n @ s @ n)


def flip_rate_quasistatic(spectrum: NoiseSpectrum, atom: AtomSpecies = RB87,
                          bottom_direction=(0.0, 0.0, 1.0)) -> float:
    """Spin-flip rate (1/s) from a quasistatic noise tensor."""
    moment = transition_moment(atom)
    return (moment / HBAR) ** 2 * flip_weighted_noise(spectrum, bottom_direction) / 2.0


@dataclass(frozen=True)
class CalibrationResult:
    c_norm: float                # s/(Hz·m³)·(unit factors); see flip_lifetime_slab
    residual: float              # max relative spread of per-height constants
    heights: tuple               # m
    per_height: tuple            # the individual constants
    seed: int
    mc_budget: int               # samples per height
    conductivity: float
    temperature: float
    reference_frequency: float
    backend: str


def flip_lifetime_slab(h: float, f0: float, conductor: Conductor,
                       atom: AtomSpecies = RB87, c_norm: float | None = None) -> float:
    """Thermal spin-flip lifetime (s) above a thick slab.

    tau = C * f0 * (h/delta) * (2 h^3 + 3 delta^3)
            / (T / 300 K) / flip_amplitude_factor^2

    with delta the skin depth at f0. C defaults to the bundled calibration
    constant (see calibrate_quasistatic).
    """
    if h <= 0 or f0 <= 0:
        raise DomainError("height and spin-flip frequency must be positive")
    if c_norm is None:
        c_norm = default_calibration().c_norm
    delta = skin_depth(f0, conductor.conductivity)
    geometry = f0 * (h / delta) * (2.0 * h**3 + 3.0 * delta**3)
    temp_factor = conductor.temperature / REFERENCE_TEMPERATURE
    return c_norm * geometry / temp_factor / atom.flip_amplitude_factor**2


def calibrate_quasistatic(conductor: Conductor | None = None,
                          atom: AtomSpecies = RB87, *,
                          heights=(2e-6, 4e-6, 8e-6),
                          mc_budget: int = 400_000, seed: int = 20260809,
                          workers: int = 1,
                          max_residual: float = 0.02) -> CalibrationResult:
    """Fix the closed-form normalization against the Monte Carlo rate.

    For each height (all far below the skin depth at the reference
    frequency) the constant is C_h = 1 / (Gamma_qs(h) * tau(h; C=1)); the
    per-height values must agree to max_residual or the calibration fails.
    The result is independent of the conductor's sigma and T and of the
    atom's flip amplitude, since those scale identically on both sides.
    """
    if conductor is None:
        conductor = ALUMINUM_HALFSPACE
    if not isinstance(conductor.geometry, HalfSpace):
        raise DomainError("calibration runs against a half-space conductor")
    f_ref = 1e6
    delta_ref = skin_depth(f_ref, conductor.conductivity)
    if max(heights) > 0.1 * delta_ref:
        raise DomainError(
            f"calibration heights must stay below delta/10 = {0.1 * delta_ref:.2e} m"
        )
    root = np.random.SeedSequence(seed)
    constants = []
    for h, child in zip(heights, root.spawn(len(heights))):
        spectrum = quasistatic_noise_tensor(h, conductor, mc_budget, child, workers=workers)
        rate = flip_rate_quasistatic(spectrum, atom)
        tau_unit = flip_lifetime_slab(h, f_ref, conductor, atom, c_norm=1.0)
        constants.append(1.0 / (rate * tau_unit))
    c = float(np.mean(constants))
    residual = float(np.max(np.abs(np.asarray(constants) / c - 1.0)))
    if residual > max_residual:
        raise CalibrationError(
            f"per-height calibration constants disagree by {residual:.2%} "
            f"(limit {max_residual:.0%})"
        )
    return CalibrationResult(
        c_norm=c,
        residual=residual,
        heights=tuple(heights),
        per_height=tuple(constants),
        seed=seed,
        mc_budget=mc_budget,
        conductivity=conductor.conductivity,
        temperature=conductor.temperature,
        reference_frequency=f_ref,
        backend=kernels.backend_name(),
    )


_DEFAULT_CALIBRATION: CalibrationResult | None = None


def default_calibration() -> CalibrationResult:
    """The bundled calibration record (data/calibration.cfg), cached."""
    global _DEFAULT_CALIBRATION
    if _DEFAULT_CALIBRATION is None:
        text = resources.files("microtrap.data").joinpath("calibration.cfg").read_text()
        _DEFAULT_CALIBRATION = parse_calibration_record(text)
    return _DEFAULT_CALIBRATION


def parse_calibration_record(text: str) -> CalibrationResult:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    data = tomllib.loads(text)
    return CalibrationResult(
        c_norm=float(data["c_norm"]),
        residual=float(data["residual"]),
        heights=tuple(data["heights_m"]),
        per_height=tuple(data["per_height"]),
        seed=int(data["seed"]),
        mc_budget=int(data["mc_budget"]),
        conductivity=float(data["conductivity"]),
        temperature=float(data["temperature"]),
        reference_frequency=float(data["reference_frequency"]),
        backend=str(data["backend"]),
    )


def format_calibration_record(result: CalibrationResult, version: str) -> str:
    lines = [
        "# quasistatic noise calibration record",
        "# regenerate with: microtrap calibrate",
        f'version = "{version}"',
        f'backend = "{result.backend}"',
        f"c_norm = {result.c_norm!r}",
        f"residual = {result.residual!r}",
        f"seed = {result.seed}",
        f"mc_budget = {result.mc_budget}",
        f"heights_m = [{', '.join(repr(h) for h in result.heights)}]",
        f"per_height = [{', '.join(repr(c) for c in result.per_height)}]",
        f"conductivity = {result.conductivity!r}",
        f"temperature = {result.temperature!r}",
        f"reference_frequency = {result.reference_frequency!r}",
    ]
    return "\n".join(lines) + "\n"


def film_suppression(thickness: float, f0: float, conductivity: float) -> float:
    """Noise-power reduction factor of a thin layer relative to a thick slab.

    The fluctuating currents that matter in a thick slab live within one
    skin depth of the surface, so a layer of thickness t < delta radiates
    roughly t/delta of the power: the suppression factor is delta/t.
    """
    if thickness <= 0:
        raise DomainError("layer thickness must be positive")
    delta = skin_depth(f0, conductivity)
    if thickness >= delta:
        return 1.0
    return delta / thickness


def technical_noise_lifetime(r: float, r_ref: float, tau_ref: float) -> float:
    """Lifetime (s) under residual rf wire currents: tau proportional to r²."""
    if r <= 0 or r_ref <= 0 or tau_ref <= 0:
        raise DomainError("technical-noise law needs positive r, r_ref and tau_ref")
    return tau_ref * (r / r_ref) ** 2


def combine_losses(lifetimes) -> float:
    """Total lifetime (s) of independent loss channels: 1/tau = sum(1/tau_i)."""
    taus = list(lifetimes)
    if not taus:
        raise DomainError("need at least one loss channel")
    if any(t <= 0 for t in taus):
        raise DomainError("channel lifetimes must be positive")
    return 1.0 / sum(1.0 / t for t in taus)


@dataclass(frozen=True)
class LossPrediction:
    tau_thermal: float
    tau_technical: float | None = None
    tau_background: float | None = None

    @property
    def channels(self) -> list:
        return [t for t in (self.tau_thermal, self.tau_technical, self.tau_background)
                if t is not None]

    @property
    def tau_total(self) -> float:
        return combine_losses(self.channels)
