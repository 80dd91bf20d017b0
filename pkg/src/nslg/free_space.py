"""Free spreading from the source to the lens and the matched boundary state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import LAMBDA_C, Kinematics, diffraction_scales
from .errors import DomainError


@dataclass(frozen=True)
class BeamSpec:
    """Quantum numbers and waist dispersion of the packet at the source."""

    n: int
    l: int
    sigma_w: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"radial number n must be a non-negative integer, got {self.n!r}")
        if int(self.l) != self.l:
            raise DomainError(f"OAM l must be an integer, got {self.l!r}")
        if not (math.isfinite(self.sigma_w) and self.sigma_w > 0.0):
            raise DomainError(f"sigma_w must be positive, got {self.sigma_w!r}")

    @property
    def mode_number(self) -> int:
        """2n + |l| + 1."""
        return 2 * self.n + abs(self.l) + 1

    @property
    def mode_factor(self) -> float:
        return math.sqrt(self.mode_number)

    @property
    def rho_w(self) -> float:
        return self.sigma_w * self.mode_factor


@dataclass(frozen=True)
class Geometry:
    d: float          # source-to-boundary distance [m]
    z0: float = 0.0   # boundary position [m], bookkeeping only

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d >= 0.0):
            raise DomainError(f"distance d must be non-negative, got {self.d!r}")


@dataclass(frozen=True)
class BoundaryState:
    rho0: float
    rho0_rate: float    # d rho / d(ct)
    sigma0: float
    sigma0_rate: float  # d sigma / d(ct)
    drho_dz: float


def free_rms_radius(beam: BeamSpec, tau_d: float, t_minus_tg: float) -> float:
    """r.m.s. radius of the free packet a time ``t_minus_tg`` after its waist (any consistent unit)."""
    if not tau_d > 0.0:
        raise DomainError(f"tau_d must be positive, got {tau_d!r}")
    return beam.rho_w * math.hypot(1.0, t_minus_tg / tau_d)


def free_divergence(beam: BeamSpec, z_R: float, z: float) -> float:
    """d rho / dz of the free packet a distance ``z`` downstream of its waist."""
    if not z_R > 0.0:
        raise DomainError(f"z_R must be positive, got {z_R!r}")
    if z < 0.0:
        raise DomainError(f"z must be non-negative, got {z!r}")
    return beam.rho_w * z / (z_R**2 * math.hypot(1.0, z / z_R))


def boundary_state(beam: BeamSpec, geom: Geometry, kin: Kinematics) -> BoundaryState:
    """Dispersion and its rate when the packet reaches the lens a distance ``geom.d`` from the source."""
    scales = diffraction_scales(beam.sigma_w, kin.beta)
    # rectilinear flight: t0 - tg = d / v, so (t0 - tg)/tau_d = d / z_R
    rho0 = free_rms_radius(beam, scales.z_R, geom.d)
    drho_dz = free_divergence(beam, scales.z_R, geom.d)
    rho0_rate = kin.beta * drho_dz
    k = beam.mode_factor
    return BoundaryState(rho0=rho0, rho0_rate=rho0_rate, sigma0=rho0 / k,
                         sigma0_rate=rho0_rate / k, drho_dz=drho_dz)


@dataclass(frozen=True)
class FreeOptics:
    """Closed-form optical functions of a free packet, waist at ``ct_waist``.

    This is the field-free limit of the in-field dynamics; ``gouy`` is the
    dispersion-driven part of the phase measured from ``ct_origin``.
    """

    sigma_w: float
    ct_waist: float = 0.0
    ct_origin: float = 0.0

    @property
    def diffraction_ct(self) -> float:
        return self.sigma_w**2 / LAMBDA_C

    def sigma(self, ct):
        u = (np.asarray(ct, dtype=float) - self.ct_waist) / self.diffraction_ct
        return self.sigma_w * np.hypot(1.0, u)

    def sigma_rate(self, ct):
        u = (np.asarray(ct, dtype=float) - self.ct_waist) / self.diffraction_ct
        return self.sigma_w * u / (self.diffraction_ct * np.hypot(1.0, u))

    def gouy_unit(self, ct):
        """Integral of lambda_C / sigma^2 from ``ct_origin`` to ``ct``."""
        tau = self.diffraction_ct
        return (np.arctan((np.asarray(ct, dtype=float) - self.ct_waist) / tau)
                - np.arctan((self.ct_origin - self.ct_waist) / tau))

    def gouy(self, beam: BeamSpec, ct):
        return beam.mode_number * self.gouy_unit(ct)
