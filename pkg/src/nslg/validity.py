"""Diagnostics for the instantaneous-transfer and hard-edge approximations."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .constants import (ELECTRON_MASS, ELEMENTARY_CHARGE, ELECTRON_REST_ENERGY, LAMBDA_C,
                        SPEED_OF_LIGHT, FieldScales)
from .dynamics import mean_transverse_energy
from .errors import DomainError
from .free_space import BeamSpec

VALID_RATIO = 100.0
MARGINAL_RATIO = 10.0


class Verdict(str, enum.Enum):
    VALID = "valid"
    MARGINAL = "marginal"
    VIOLATED = "violated"


def verdict_for(ratio: float) -> Verdict:
    if ratio >= VALID_RATIO:
        return Verdict.VALID
    if ratio >= MARGINAL_RATIO:
        return Verdict.MARGINAL
    return Verdict.VIOLATED


@dataclass(frozen=True)
class TransferCheck:
    tau_d: float          # s
    T_c: float            # s
    crossing_time: float  # sigma_z / v [s]
    ratio_d: float
    ratio_c: float
    verdict: Verdict


def transfer_time_check(beam: BeamSpec, scales: FieldScales, sigma_z: float, beta: float) -> TransferCheck:
    """Compare diffraction time and cyclotron period with the time to cross the boundary."""
    if not (sigma_z >= 0.0 and 0.0 < beta < 1.0):
        raise DomainError("need sigma_z >= 0 and 0 < beta < 1")
    tau_d = beam.rho_w**2 / (beam.mode_number * LAMBDA_C * SPEED_OF_LIGHT)
    crossing = sigma_z / (beta * SPEED_OF_LIGHT)
    ratio_d = tau_d / crossing if crossing > 0.0 else math.inf
    ratio_c = scales.T_c / crossing if crossing > 0.0 else math.inf
    return TransferCheck(tau_d=tau_d, T_c=scales.T_c, crossing_time=crossing, ratio_d=ratio_d,
                         ratio_c=ratio_c, verdict=verdict_for(min(ratio_d, ratio_c)))


@dataclass(frozen=True)
class SpaceRegime:
    regime: int
    log_density_exponent: float


_TIE = 1e-9


def _exponent(regime: int, zeta: float, tau: float, lam: float) -> float:
    if regime == 1:
        return -zeta**2
    if regime == 2:
        return -(zeta / (tau * lam)) ** 2
    if regime == 3:
        return -tau**2
    return -1.0 / lam**2


def space_regime(zeta: float, tau: float, Lambda_C: float) -> SpaceRegime:
    """Classify the longitudinal tail regime and return its density exponent.

    ``zeta`` and ``tau`` are the boundary offset and centroid position in units
    of sigma_z (magnitudes are used); ``Lambda_C`` is lambda_C / sigma_z.
    On a tie the candidate with the smallest exponent magnitude is reported.
    """
    if not 0.0 < Lambda_C < 1.0:
        raise DomainError(f"Lambda_C must lie in (0, 1), got {Lambda_C!r}")
    zeta, tau = abs(zeta), abs(tau)
    tl = tau * Lambda_C
    near = math.isclose(tau, zeta, rel_tol=_TIE, abs_tol=_TIE)
    short = (True, False) if math.isclose(tl, 1.0, rel_tol=_TIE, abs_tol=_TIE) else (tl < 1.0,)
    early = (True, False) if near else (tau < zeta,)
    candidates = []
    for e in early:
        for s in short:
            regime = (1 if s else 2) if e else (3 if s else 4)
            candidates.append(SpaceRegime(regime, _exponent(regime, zeta, tau, Lambda_C)))
    return min(candidates, key=lambda c: (abs(c.log_density_exponent), c.regime))


@dataclass(frozen=True)
class FringeProfile:
    z: np.ndarray    # uniform nodes [m]
    Hz: np.ndarray   # on-axis field [T]
    H: float         # plateau value [T]
    d0: float        # nominal length [m]

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        hz = np.asarray(self.Hz, dtype=float)
        if z.ndim != 1 or z.shape != hz.shape:
            raise DomainError("z and Hz must be 1-D arrays of equal length")
        if z.size < 3:
            raise DomainError("a fringe profile needs at least 3 samples")
        steps = np.diff(z)
        if not (steps[0] > 0.0 and np.allclose(steps, steps[0], rtol=1e-9, atol=0.0)):
            raise DomainError("fringe profile nodes must be uniform and increasing")
        if not self.H > 0.0:
            raise DomainError("plateau field must be positive")
        if np.any(hz < 0.0) or np.any(hz > self.H * (1.0 + 1e-9)):
            raise DomainError("profile must satisfy 0 <= Hz <= H")
        if hz[0] > 1e-3 * self.H:
            raise DomainError("profile must vanish at the upstream end")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "Hz", hz)

    @classmethod
    def from_samples(cls, z, Hz, d0: float | None = None) -> "FringeProfile":
        """Plateau taken as max(Hz); ``d0`` defaults to the length where Hz >= H/2."""
        z = np.asarray(z, dtype=float)
        Hz = np.asarray(Hz, dtype=float)
        H = float(Hz.max())
        if d0 is None:
            d0 = float((np.count_nonzero(Hz >= 0.5 * H) - 1) * (z[1] - z[0]))
        return cls(z=z, Hz=Hz, H=H, d0=d0)


@dataclass(frozen=True)
class EffectiveLength:
    d: float
    boundary_shift: float   # (d - d0) / 2


def effective_length(profile: FringeProfile) -> EffectiveLength:
    """Hard-edge length that reproduces the integral of (Hz/H)^2."""
    d = float(simpson((profile.Hz / profile.H) ** 2, dx=float(profile.z[1] - profile.z[0])))
    return EffectiveLength(d=d, boundary_shift=0.5 * (d - profile.d0))


@dataclass(frozen=True)
class FringeEnergyChange:
    dE_minus: float   # eV
    dE_plus: float    # eV
    focusing: float   # (|e| rho H)^2 / (8 m), eV


def fringe_energy_change(rho: float, H: float, v_phi0: float) -> FringeEnergyChange:
    """Longitudinal energy change picked up crossing the fringe field, both sign branches.

    ``v_phi0`` is the upstream azimuthal velocity in units of c.
    """
    if not (rho > 0.0 and H >= 0.0):
        raise DomainError("need rho > 0 and H >= 0")
    to_ev = 1.0 / ELEMENTARY_CHARGE
    kick = ELEMENTARY_CHARGE * rho * H
    focusing = kick**2 / (8.0 * ELECTRON_MASS) * to_ev
    drag = 0.5 * kick * abs(v_phi0) * SPEED_OF_LIGHT * to_ev
    return FringeEnergyChange(dE_minus=focusing - drag, dE_plus=focusing + drag, focusing=focusing)


@dataclass(frozen=True)
class AzimuthalVelocity:
    estimate: float   # lambda_C sigma_st / sigma_L^2
    bound: float      # sqrt(2 <E_perp> / m c^2)


def vphi_estimate(beam: BeamSpec, sigma_st: float, scales: FieldScales) -> AzimuthalVelocity:
    energy = mean_transverse_energy(beam, sigma_st, scales).mean
    return AzimuthalVelocity(estimate=LAMBDA_C * sigma_st / scales.sigma_L**2,
                             bound=math.sqrt(2.0 * energy / ELECTRON_REST_ENERGY))
