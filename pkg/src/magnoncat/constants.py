"""Physical constants used by the device formulas (SI units)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants. ``hbar`` is derived from ``h`` so h = 2*pi*hbar holds exactly.

    Attributes
    ----------
    mu0 : vacuum permeability (T*m/A)
    Phi0 : superconducting flux quantum h/(2e) (Wb)
    h : Planck constant (J*s)
    kB : Boltzmann constant (J/K)
    gamma0 : modulus of the electron gyromagnetic ratio (rad/s/T),
        default 2*pi * 28 GHz/T
    """

    mu0: float = 4e-7 * math.pi
    Phi0: float = 2.067833848e-15
    h: float = 6.62607015e-34
    kB: float = 1.380649e-23
    gamma0: float = 2 * math.pi * 28e9
    hbar: float = field(init=False)

    def __post_init__(self):
        for name in ("mu0", "Phi0", "h", "kB", "gamma0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be strictly positive")
        object.__setattr__(self, "hbar", self.h / (2 * math.pi))


CONSTANTS = PhysicalConstants()
