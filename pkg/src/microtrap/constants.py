"""Physical constants and atom species data.

All internal computation is SI; gauss and micrometers are accepted only at
interfaces (see microtrap.units). Constants are fixed literals rather than
scipy.constants lookups so that results are stable across scipy versions.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

MU0 = 4.0e-7 * math.pi     # vacuum permeability, T·m/A
MU_B = 9.2740e-24          # Bohr magneton, J/T
K_B = 1.3807e-23           # Boltzmann constant, J/K
H_PLANCK = 6.6261e-34      # Planck constant, J·s
HBAR = H_PLANCK / (2.0 * math.pi)
G_EARTH = 9.80665          # standard gravity, m/s²


@dataclass(frozen=True)
class PhysicalConstants:
    mu0: float = MU0
    muB: float = MU_B
    kB: float = K_B
    hPlanck: float = H_PLANCK
    hbar: float = HBAR


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    """A magnetically trappable atom in a single Zeeman sublevel.

    flip_amplitude_factor is the transition moment of the rate-limiting
    spin-flip transition relative to a reference two-level system whose
    transverse moment is one Bohr magneton.
    """

    name: str
    mass: float                  # kg
    F: float                     # total spin quantum number
    mF: float                    # magnetic quantum number
    gF: float                    # Landé factor
    flip_amplitude_factor: float = 1.0
    scattering_length: float = 5.31e-9  # s-wave, m

    def __post_init__(self):
        if abs(self.mF) > self.F:
            raise DomainError(f"|mF|={abs(self.mF)} exceeds F={self.F}")
        if self.gF * self.mF <= 0:
            raise DomainError("gF*mF must be > 0 for a weak-field-seeking state")
        if not 0.0 < self.flip_amplitude_factor <= 1.0:
            raise DomainError("flip_amplitude_factor must lie in (0, 1]")
        if self.mass <= 0:
            raise DomainError("mass must be positive")


# ⁸⁷Rb in |F=2, mF=2⟩; the rate-limiting flip is to |2,1⟩ with a moment
# smaller than the muB reference by 1/sqrt(5).
RB87 = AtomSpecies(
    name="Rb87",
    mass=1.4432e-25,
    F=2,
    mF=2,
    gF=0.5,
    flip_amplitude_factor=1.0 / math.sqrt(5.0),
)


def effective_moment(atom: AtomSpecies) -> float:
    """Static magnetic moment gF·mF·μB (J/T) governing the trap potential."""
    return atom.gF * atom.mF * MU_B


def transition_moment(atom: AtomSpecies) -> float:
    """Transverse moment (J/T) of the rate-limiting spin-flip transition."""
    return atom.flip_amplitude_factor * MU_B
