"""Physical constants, relativistic kinematics and field-derived scales.

Internal time is the optical path ``ct`` in metres, so every rate
(sigma', rho') is dimensionless and every frequency is in rad/m.
Seconds appear only when a quantity is reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# CODATA 2018, pinned.
LAMBDA_C = 3.8615926796e-13          # reduced Compton wavelength [m]
ELECTRON_REST_ENERGY = 510998.95      # m_e c^2 [eV]
ELEMENTARY_CHARGE = 1.602176634e-19   # |e| [C]
HBAR = 1.054571817e-34                # [J s]
SPEED_OF_LIGHT = 299792458.0          # [m/s]
ELECTRON_MASS = 9.1093837015e-31      # [kg]

#: hbar*c in eV*m, used to turn rad/m into eV.
HBAR_C_EV_M = LAMBDA_C * ELECTRON_REST_ENERGY


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Kinematics:
    kinetic_energy: float  # eV
    beta: float
    gamma: float


def beta_from_kinetic_energy(kinetic_energy: float) -> Kinematics:
    """Relativistic beta and gamma of an electron with the given kinetic energy [eV]."""
    energy = _check_finite("kinetic_energy", kinetic_energy)
    if energy <= 0.0:
        raise DomainError(f"kinetic energy must be positive, got {energy!r}")
    x = energy / ELECTRON_REST_ENERGY
    gamma = 1.0 + x
    # sqrt(1 - 1/gamma^2) without cancellation at small x
    beta = math.sqrt(x * (2.0 + x)) / gamma
    return Kinematics(kinetic_energy=energy, beta=beta, gamma=gamma)


@dataclass(frozen=True)
class FieldScales:
    """Scales set by a uniform longitudinal field of magnitude ``H`` [T]."""

    H: float
    sigma_L: float          # magnetic length [m]
    omega_per_meter: float  # cyclotron frequency over c [rad/m]
    T_c: float              # cyclotron period [s]

    @property
    def period_ct(self) -> float:
        """Cyclotron period as an optical path [m]."""
        return 2.0 * math.pi / self.omega_per_meter

    @property
    def hbar_omega_ev(self) -> float:
        return HBAR_C_EV_M * self.omega_per_meter

    def landau_radius(self, mode_factor: float) -> float:
        return self.sigma_L * mode_factor


def field_scales(H: float) -> FieldScales:
    H = _check_finite("H", H)
    if H <= 0.0:
        raise DomainError(f"field magnitude must be positive, got {H!r}")
    sigma_L = math.sqrt(2.0 * HBAR / (ELEMENTARY_CHARGE * H))
    omega = 2.0 * LAMBDA_C / sigma_L**2
    T_c = 2.0 * math.pi / (SPEED_OF_LIGHT * omega)
    return FieldScales(H=H, sigma_L=sigma_L, omega_per_meter=omega, T_c=T_c)


@dataclass(frozen=True)
class DiffractionScales:
    tau_d: float  # s
    z_R: float    # m


def diffraction_scales(sigma_w: float, beta: float) -> DiffractionScales:
    """Diffraction time and Rayleigh length of a free packet with waist dispersion ``sigma_w``."""
    sigma_w = _check_finite("sigma_w", sigma_w)
    beta = _check_finite("beta", beta)
    if sigma_w <= 0.0:
        raise DomainError(f"sigma_w must be positive, got {sigma_w!r}")
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    tau_d = sigma_w**2 / (LAMBDA_C * SPEED_OF_LIGHT)
    return DiffractionScales(tau_d=tau_d, z_R=beta * SPEED_OF_LIGHT * tau_d)
