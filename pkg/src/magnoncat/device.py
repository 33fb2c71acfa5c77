"""Closed-form device physics of the flux-coupled transmon-magnon circuit.

All energies and rates are stored in ordinary-frequency h-units (GHz for
energies and the transmon frequency, MHz for coupling rates); the factor
2*pi enters only inside the dynamics engine.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .constants import CONSTANTS, PhysicalConstants

# E_J^max * S(phi_b) / E_C below this ratio flags the operating point as
# outside the transmon regime (higher-order corrections grow large there).
TRANSMON_REGIME_RATIO = 20.0

# |sin(2*phi_b)| at or below this snaps to zero so that the analytically
# forced zeros of g_rp at phi_b in {0, pi/2} are exact in floating point.
_SIN2_SNAP = 1e-12

_DEGENERATE_S = 1e-9


class DegenerateSquidError(ValueError):
    """S(phi_b) vanished: fully symmetric SQUID biased at half a flux quantum."""


class ValidityWarning(UserWarning):
    """A soft validity condition of the device model is not met."""


@dataclass(frozen=True)
class DeviceParams:
    """Circuit, magnet and geometry parameters.

    Energies are h-units (GHz); lengths are meters; ``phi_b`` is the reduced
    flux bias pi*Phi_b/Phi_0 in radians.  ``geometry`` holds the
    dimensionless stray-field factors (I_x, I_y, I_z); only I_x enters the
    couplings.  ``R_squid`` is optional and used only for the far-field
    validity diagnostic.
    """

    EJ_max: float = 50.0          # GHz
    EC: float = 0.2               # GHz
    aJ: float = 0.6
    phi_b: float = math.pi / 2    # rad
    cap_asym: float = 0.0         # C_Delta / C_Sigma
    R_yig: float = 3e-6           # m
    d: float = 3e-6               # m
    Ns: float = 2.4e12
    geometry: tuple[float, float, float] = (-1.0, 0.0, -1.0)
    f_m: float = 0.5              # GHz
    alphaG: float = 1e-5
    B_ani: float = -2.5e-3        # T
    R_squid: float | None = None  # m

    def __post_init__(self):
        if self.EJ_max <= 0 or self.EC <= 0:
            raise ValueError("EJ_max and EC must be positive")
        if not 0.0 <= self.aJ <= 1.0:
            raise ValueError("aJ must lie in [0, 1]")
        if not -1.0 <= self.cap_asym <= 1.0:
            raise ValueError("cap_asym must lie in [-1, 1]")
        if self.R_yig <= 0 or self.d <= 0:
            raise ValueError("R_yig and d must be positive")
        if self.Ns < 0:
            raise ValueError("Ns must be nonnegative")
        if self.f_m <= 0:
            raise ValueError("f_m must be positive")
        if self.alphaG < 0:
            raise ValueError("alphaG must be nonnegative")

    @property
    def d_min(self) -> float:
        """Distance from the sphere center to the SQUID edge, sqrt(R^2 + d^2)."""
        return math.hypot(self.R_yig, self.d)


@dataclass(frozen=True)
class CouplingSet:
    """Derived coupling rates and zero-point amplitudes at one bias point.

    J, J_prime, g_rp, g_rp_prime and g_tilde are MHz; omega_q is GHz;
    phi_zpf, delta_zpf and N_zpf are dimensionless; mu_zpf is J/T.
    """

    J: float
    J_prime: float
    g_rp: float
    g_rp_prime: float
    g_tilde: float
    phi_zpf: float
    mu_zpf: float
    omega_q: float
    delta_zpf: float
    N_zpf: float
    transmon_regime_ok: bool


def squid_factor(phi_b: float, aJ: float) -> float:
    """Flux suppression factor S(phi_b) = sqrt(cos^2 + aJ^2 sin^2)."""
    if not 0.0 <= aJ <= 1.0:
        raise ValueError("aJ must lie in [0, 1]")
    c = math.cos(phi_b)
    s = math.sin(phi_b)
    return math.sqrt(c * c + aJ * aJ * s * s)


def _squid_factor_checked(p: DeviceParams) -> float:
    S = squid_factor(p.phi_b, p.aJ)
    if S < _DEGENERATE_S:
        raise DegenerateSquidError(
            f"S(phi_b) = {S:.3g} at phi_b = {p.phi_b:.6g}, aJ = {p.aJ:.6g}: "
            "the SQUID inductive energy vanishes"
        )
    return S


def transmon_regime_ok(p: DeviceParams) -> bool:
    """True when E_J^max * S(phi_b) / E_C >= 20."""
    return p.EJ_max * squid_factor(p.phi_b, p.aJ) / p.EC >= TRANSMON_REGIME_RATIO


def _warn_regime(p: DeviceParams, S: float) -> None:
    if p.EJ_max * S / p.EC < TRANSMON_REGIME_RATIO:
        warnings.warn(
            f"E_J*S/E_C = {p.EJ_max * S / p.EC:.3g} < {TRANSMON_REGIME_RATIO}: "
            "outside the transmon regime, results carry large corrections",
            ValidityWarning,
            stacklevel=3,
        )


def transmon_frequency(p: DeviceParams) -> float:
    """Qubit frequency sqrt(8 E_C E_J^max S) - E_C in GHz (h-units)."""
    S = _squid_factor_checked(p)
    _warn_regime(p, S)
    return math.sqrt(8.0 * p.EC * p.EJ_max * S) - p.EC


def zpf_amplitudes(p: DeviceParams) -> tuple[float, float]:
    """Charge and phase zero-point amplitudes (N_zpf, delta_zpf).

    N_zpf = (E_J S / 32 E_C)^(1/4), delta_zpf = (2 E_C / (E_J S))^(1/4);
    their product is exactly 1/2.
    """
    S = _squid_factor_checked(p)
    ejs = p.EJ_max * S
    n_zpf = (ejs / (32.0 * p.EC)) ** 0.25
    d_zpf = (2.0 * p.EC / ejs) ** 0.25
    return n_zpf, d_zpf


def mu_zpf(p: DeviceParams, const: PhysicalConstants = CONSTANTS) -> float:
    """Transverse magnetic moment zero-point amplitude hbar*gamma0*sqrt(Ns/2) in J/T."""
    return const.hbar * const.gamma0 * math.sqrt(p.Ns / 2.0)


def flux_per_quantum(p: DeviceParams, const: PhysicalConstants = CONSTANTS) -> float:
    """|coefficient| of (m + m^dag) in the reduced flux induced by spin fluctuations.

    phi_zpf = |I_x| * mu0 * mu_zpf / (4 Phi0 d_min).  Warns above 1e-2 where
    the linearized flux expansion stops being trustworthy.
    """
    ix = abs(p.geometry[0])
    val = ix * const.mu0 * mu_zpf(p, const) / (4.0 * const.Phi0 * p.d_min)
    if val > 1e-2:
        warnings.warn(
            f"phi_zpf = {val:.3g} > 1e-2: induced flux is not a small parameter",
            ValidityWarning,
            stacklevel=2,
        )
    return val


def _sin2(phi_b: float) -> float:
    s2 = math.sin(2.0 * phi_b)
    return 0.0 if abs(s2) <= _SIN2_SNAP else s2


def coupling_J(
    p: DeviceParams,
    include_correction: bool = False,
    const: PhysicalConstants = CONSTANTS,
) -> float:
    """Exchange coupling J in MHz.

    J = phi_zpf * (aJ - (C_D/C_S) S^2) * (2 E_C E_J^3)^(1/4) / S^(5/4),
    which reduces to the equal-junction-capacitance form at cap_asym = 0.
    With ``include_correction`` the third-order term J' = -(J/2) delta_zpf^2
    is added.
    """
    S = _squid_factor_checked(p)
    _warn_regime(p, S)
    a_eff = p.aJ - p.cap_asym * S * S
    pref = flux_per_quantum(p, const)
    # (2 E_C E_J^3)^(1/4)/h stays in ordinary-frequency units; GHz -> MHz.
    j = pref * a_eff * (2.0 * p.EC * p.EJ_max**3) ** 0.25 * 1e3 / S**1.25
    if include_correction:
        d_zpf2 = math.sqrt(2.0 * p.EC / (p.EJ_max * S))
        j += -0.5 * j * d_zpf2
    return j


def coupling_grp(
    p: DeviceParams,
    include_correction: bool = False,
    const: PhysicalConstants = CONSTANTS,
) -> float:
    """Radiation-pressure coupling g_rp in MHz (signed by sin 2 phi_b).

    g_rp = (phi_zpf/4) * sqrt(8 E_J E_C) (1 - aJ^2) sin(2 phi_b) / S^(3/2).
    With ``include_correction`` the fourth-order term
    g'_rp = -(g_rp/2) delta_zpf^2 is added.
    """
    S = _squid_factor_checked(p)
    _warn_regime(p, S)
    s2 = _sin2(p.phi_b)
    pref = flux_per_quantum(p, const) / 4.0
    g = pref * math.sqrt(8.0 * p.EJ_max * p.EC) * (1.0 - p.aJ**2) * s2 * 1e3 / S**1.5
    if include_correction:
        d_zpf2 = math.sqrt(2.0 * p.EC / (p.EJ_max * S))
        g += -0.5 * g * d_zpf2
    return g


def modulated_grp(
    p: DeviceParams, phi_ac: float, const: PhysicalConstants = CONSTANTS
) -> float:
    """Parametrically enhanced coupling g_rp~ in MHz under a weak ac flux drive.

    g~ = (phi_zpf/4) * phi_ac * f_p with plasma frequency
    f_p = sqrt(8 E_J E_C) (GHz); independent of the DC bias.  Warns for
    phi_ac > 0.5 where the weak-drive expansion breaks down.
    """
    if abs(phi_ac) > 0.5:
        warnings.warn(
            f"phi_ac = {phi_ac:.3g} > 0.5: beyond the weak-modulation regime",
            ValidityWarning,
            stacklevel=2,
        )
    pref = flux_per_quantum(p, const) / 4.0
    f_p = math.sqrt(8.0 * p.EJ_max * p.EC)  # GHz
    return pref * phi_ac * f_p * 1e3


def couplings(
    p: DeviceParams, phi_ac: float = 0.0, const: PhysicalConstants = CONSTANTS
) -> CouplingSet:
    """Evaluate every derived rate of the device at one bias point."""
    n_zpf, d_zpf = zpf_amplitudes(p)
    return CouplingSet(
        J=coupling_J(p, const=const),
        J_prime=coupling_J(p, include_correction=True, const=const)
        - coupling_J(p, const=const),
        g_rp=coupling_grp(p, const=const),
        g_rp_prime=coupling_grp(p, include_correction=True, const=const)
        - coupling_grp(p, const=const),
        g_tilde=modulated_grp(p, phi_ac, const) if phi_ac else 0.0,
        phi_zpf=flux_per_quantum(p, const),
        mu_zpf=mu_zpf(p, const),
        omega_q=transmon_frequency(p),
        delta_zpf=d_zpf,
        N_zpf=n_zpf,
        transmon_regime_ok=transmon_regime_ok(p),
    )


def critical_distance(
    Bc: float,
    Ms: float = 2e5,
    R_yig: float = 3e-6,
    d_w: float = 100e-9,
    const: PhysicalConstants = CONSTANTS,
) -> float:
    """Minimum magnet-SQUID distance (m) before the stray field kills superconductivity.

    d_c = d_w/2 + (2 mu0 Ms / (3 Bc))^(1/3) * R_yig for a wire of thickness
    d_w, saturation magnetization Ms (A/m) and critical field Bc (T).
    """
    if Bc <= 0 or Ms <= 0 or R_yig <= 0 or d_w <= 0:
        raise ValueError("all critical-distance inputs must be positive")
    return d_w / 2.0 + (2.0 * const.mu0 * Ms / (3.0 * Bc)) ** (1.0 / 3.0) * R_yig


def thermal_occupation(
    f_m: float, T: float, const: PhysicalConstants = CONSTANTS
) -> float:
    """Bose-Einstein occupation 1/(exp(h f / kB T) - 1) for f in GHz, T in K."""
    if f_m <= 0:
        raise ValueError("f_m must be positive")
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0:
        return 0.0
    x = const.h * f_m * 1e9 / (const.kB * T)
    if x > 700:  # exp overflow: occupation is indistinguishable from zero
        return 0.0
    return 1.0 / math.expm1(x)


def far_field_ok(p: DeviceParams) -> bool | None:
    """Whether R_SQUID >> d holds (None when R_squid was not supplied)."""
    if p.R_squid is None:
        return None
    return p.R_squid >= 3.0 * max(p.d, p.R_yig)
