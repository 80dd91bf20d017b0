"""In-field dispersion dynamics of a nonstationary Laguerre-Gaussian packet.

Two independent routes describe the dispersion sigma(ct) after the lens
entrance at ct = 0:

* the closed form ``sigma_st * sqrt(1 + A sin(s*w*ct - theta))`` with
  ``A = sqrt(1 - (sigma_L/sigma_st)^4)``, see :func:`field_solution_params`;
* a fixed-step RK4 integration of the optical-function equations.

The optical-function system reads (primes are d/d(ct))::

    1/R = sigma'/sigma
    (1/R)^2 + (1/R)' = lambda_C^2 (1/sigma^4 - 1/sigma_L^4)

Substituting the first line, (sigma'/sigma)^2 + (sigma'/sigma)' = sigma''/sigma,
so the second line is the Ermakov-type equation

    sigma'' = lambda_C^2 / sigma^3 - (w/2)^2 sigma,     w = 2 lambda_C / sigma_L^2,

with first integral ``sigma'^2 + lambda_C^2/sigma^2 + (w sigma / 2)^2``.
The field-free case is w = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .constants import LAMBDA_C, FieldScales
from .errors import DomainError, InconsistencyError, StepSizeError
from .free_space import BeamSpec

LANDAU_SNAP = 1e-12
ARCSIN_SLACK = 1e-12


@dataclass(frozen=True)
class FieldSolutionParams:
    sigma_st: float
    theta: float
    s: int
    sigma_L: float
    omega_per_meter: float
    amplitude: float = 0.0   # sqrt(1 - (sigma_L/sigma_st)^4)
    sigma0: float = 0.0
    sigma0_rate: float = 0.0

    @property
    def period_ct(self) -> float:
        return 2.0 * math.pi / self.omega_per_meter

    @property
    def is_landau(self) -> bool:
        return self.s == 0

    def phase(self, dct):
        return self.s * self.omega_per_meter * np.asarray(dct, dtype=float) - self.theta

    def sigma_sq(self, dct):
        x = self.phase(dct)
        # sigma_st^2 (1 + A sin x) split so that neither piece cancels near the minimum
        low = self.sigma_L**4 / (self.sigma_st**2 * (1.0 + self.amplitude))
        bump = 2.0 * np.sin(0.5 * x + 0.25 * math.pi) ** 2
        return low + self.sigma_st**2 * self.amplitude * bump

    def sigma(self, dct):
        return np.sqrt(self.sigma_sq(dct))

    def sigma_rate(self, dct):
        x = self.phase(dct)
        d_sq = self.sigma_st**2 * self.amplitude * self.s * self.omega_per_meter * np.cos(x)
        return 0.5 * d_sq / self.sigma(dct)

    def gouy_unit(self, dct):
        """Integral of lambda_C / sigma^2 over (0, dct), in closed form."""
        dct = np.asarray(dct, dtype=float)
        if self.s == 0:
            return LAMBDA_C * dct / self.sigma_L**2
        b = self.sigma_L**2 / self.sigma_st**2   # sqrt(1 - A^2)
        return (_ermakov_angle(self.phase(dct), self.amplitude, b)
                - _ermakov_angle(-self.theta, self.amplitude, b)) / self.s

    def gouy(self, beam: BeamSpec, dct):
        return gouy_closed_form(self, beam, dct)

    def extremes(self) -> tuple[float, float]:
        """(min sigma, max sigma) over a period."""
        high = self.sigma_st * math.sqrt(1.0 + self.amplitude)
        low = self.sigma_L**2 / high
        return low, high


def _ermakov_angle(x, a, b):
    """Continuous antiderivative of 1/(1 + a sin x) scaled by b/2."""
    k = np.floor((x + math.pi) / (2.0 * math.pi))
    y = x - 2.0 * math.pi * k
    return np.arctan((np.tan(0.5 * y) + a) / b) + math.pi * k


def field_solution_params(sigma0: float, sigma0_rate: float, scales: FieldScales) -> FieldSolutionParams:
    """Stationary dispersion, phase offset and direction of the in-field oscillation.

    ``sigma0_rate`` is d sigma / d(ct) at the entrance.
    """
    if not (math.isfinite(sigma0) and sigma0 > 0.0):
        raise DomainError(f"sigma0 must be positive, got {sigma0!r}")
    if not math.isfinite(sigma0_rate):
        raise DomainError(f"sigma0_rate must be finite, got {sigma0_rate!r}")
    sL = scales.sigma_L
    w = scales.omega_per_meter
    if sigma0_rate == 0.0 and abs(sigma0 / sL - 1.0) <= LANDAU_SNAP:
        return FieldSolutionParams(sigma_st=sL, theta=0.0, s=0, sigma_L=sL, omega_per_meter=w,
                                   amplitude=0.0, sigma0=sigma0, sigma0_rate=0.0)

    kick = sigma0_rate * sL**2 / LAMBDA_C
    mismatch = sL**2 / sigma0 - sigma0
    # sigma_st^2 - sigma_L^2 and sigma_st^2 - sigma0^2, both free of cancellation
    excess = 0.5 * (mismatch**2 + kick**2)
    sigma_st_sq = sL**2 + excess
    above_start = 0.5 * (mismatch * (sL**2 / sigma0 + sigma0) + kick**2)
    a_sst_sq = math.sqrt(excess * (sigma_st_sq + sL**2))   # A * sigma_st^2

    arg = above_start / a_sst_sq
    if abs(arg) > 1.0 + ARCSIN_SLACK:
        raise InconsistencyError(f"arcsin argument {arg!r} outside [-1, 1]")
    theta = math.atan2(above_start, sigma0 * abs(kick))

    if sigma0_rate != 0.0:
        s = 1 if sigma0_rate > 0.0 else -1
    else:
        s = 1 if sL > sigma0 else -1
    return FieldSolutionParams(sigma_st=math.sqrt(sigma_st_sq), theta=theta, s=s, sigma_L=sL,
                               omega_per_meter=w, amplitude=a_sst_sq / sigma_st_sq,
                               sigma0=sigma0, sigma0_rate=sigma0_rate)


def sigma_of_ct(params: FieldSolutionParams, ct_minus_ct0):
    return params.sigma(ct_minus_ct0)


def rms_radius(sigma, beam: BeamSpec):
    return np.asarray(sigma) * beam.mode_factor if np.ndim(sigma) else sigma * beam.mode_factor


def heisenberg_rms_sq(rho0: float, rho0_rate: float, rho_st: float, scales: FieldScales, ct_offset):
    """Mean square radius from the Heisenberg equation of motion."""
    # extended precision: the three terms cancel near the narrowest point
    ld = np.longdouble
    w = ld(scales.omega_per_meter)
    phase = w * np.asarray(ct_offset, dtype=ld)
    r0, rst = ld(rho0), ld(rho_st)
    value = rst**2 + (r0**2 - rst**2) * np.cos(phase) + 2 * r0 * ld(rho0_rate) / w * np.sin(phase)
    value = np.asarray(value, dtype=float)
    if np.any(value < 0.0):
        raise InconsistencyError("negative mean square radius: rho_st does not match the boundary state")
    return value if np.ndim(value) else float(value)


def stationary_radius(sigma_st: float, sigma_L: float, rho_L: float) -> float:
    return rho_L * sigma_st / sigma_L


@dataclass(frozen=True)
class TransverseEnergy:
    mean: float     # <E_perp> [eV]
    landau: float   # epsilon_perp [eV]

    @property
    def ratio(self) -> float:
        return self.mean / self.landau


def mean_transverse_energy(beam: BeamSpec, sigma_st: float, scales: FieldScales) -> TransverseEnergy:
    half = 0.5 * scales.hbar_omega_ev
    mean = half * (beam.mode_number * (sigma_st / scales.sigma_L) ** 2 + beam.l)
    landau = half * (beam.mode_number + beam.l)
    return TransverseEnergy(mean=mean, landau=landau)


@dataclass(frozen=True)
class XiDiagnostics:
    xi1: float
    xi2_scaled: float  # |sigma0'| sigma_L^2 / (lambda_C sigma0)
    xi2_bare: float   # |sigma0'| sigma_L / lambda_C


def xi_diagnostics(sigma0: float, sigma0_rate: float, sigma_L: float) -> XiDiagnostics:
    rate = abs(sigma0_rate)
    return XiDiagnostics(xi1=sigma_L / sigma0,
                         xi2_scaled=rate * sigma_L**2 / (LAMBDA_C * sigma0),
                         xi2_bare=rate * sigma_L / LAMBDA_C)


def gouy_rate(beam: BeamSpec, sigma, scales: FieldScales | None = None):
    """d Phi_G / d(ct); ``scales=None`` is field-free."""
    inv_sL2 = 0.0 if scales is None else 1.0 / scales.sigma_L**2
    return LAMBDA_C * (beam.l * inv_sL2 + beam.mode_number / np.asarray(sigma, dtype=float) ** 2)


def gouy_phase(beam: BeamSpec, ct, sigma, scales: FieldScales | None = None):
    """Cumulative Gouy phase along a sampled dispersion trace (composite Simpson).

    The grid must be uniform; the phase is zero at ``ct[0]``.
    """
    ct = np.asarray(ct, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if ct.ndim != 1 or ct.shape != sigma.shape or ct.size < 2:
        raise DomainError("ct and sigma must be 1-D arrays of equal length >= 2")
    if np.any(sigma <= 0.0):
        raise DomainError("dispersion trace must be strictly positive")
    steps = np.diff(ct)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0) or steps[0] <= 0.0:
        raise DomainError("gouy_phase needs a uniform, increasing ct grid")
    rate = gouy_rate(beam, sigma, scales)
    return cumulative_simpson(rate, dx=float(steps[0]), initial=0.0)


def gouy_closed_form(params: FieldSolutionParams, beam: BeamSpec, dct):
    """Gouy phase accumulated since the entrance, analytic."""
    dct = np.asarray(dct, dtype=float)
    return LAMBDA_C * beam.l * dct / params.sigma_L**2 + beam.mode_number * params.gouy_unit(dct)


@dataclass(frozen=True)
class OpticalState:
    sigma: float
    sigma_rate: float
    gouy: float
    ct: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")
        if not (math.isfinite(self.sigma_rate) and math.isfinite(self.gouy)):
            raise DomainError("optical state must be finite")


def field_optical_state(params: FieldSolutionParams, beam: BeamSpec, dct: float) -> OpticalState:
    return OpticalState(sigma=float(params.sigma(dct)), sigma_rate=float(params.sigma_rate(dct)),
                        gouy=float(gouy_closed_form(params, beam, dct)), ct=float(dct))


# -- ODE oracle ---------------------------------------------------------------

def first_integral(sigma, sigma_rate, omega_per_meter: float = 0.0):
    sigma = np.asarray(sigma, dtype=float)
    return (np.asarray(sigma_rate) ** 2 + (LAMBDA_C / sigma) ** 2
            + (0.5 * omega_per_meter * sigma) ** 2)


@dataclass
class EvolutionTrace:
    ct: np.ndarray
    sigma: np.ndarray
    sigma_rate: np.ndarray
    gouy: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __len__(self):
        return len(self.ct)

    def __eq__(self, other):
        if not isinstance(other, EvolutionTrace):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("ct", "sigma", "sigma_rate", "gouy"))


def _rhs(y, omega, scale):
    sigma, rate, _ = y
    stretch = sigma / scale
    accel = LAMBDA_C**2 / sigma**3 - 0.25 * omega**2 * sigma
    return np.array([rate * stretch, accel * stretch, stretch])


def _rk4_step(y, h, omega, scale):
    k1 = _rhs(y, omega, scale)
    k2 = _rhs(y + 0.5 * h * k1, omega, scale)
    k3 = _rhs(y + 0.5 * h * k2, omega, scale)
    k4 = _rhs(y + h * k3, omega, scale)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _sigma_bound(sigma0, rate0, omega, span):
    """Upper bound on sigma over the span from the first integral alone."""
    energy = first_integral(sigma0, rate0, omega)
    bound = sigma0 + np.sqrt(energy) * span
    if omega > 0.0:
        disc = np.sqrt(np.maximum(energy**2 - (omega * LAMBDA_C) ** 2, 0.0))
        turning = np.sqrt(2.0 * (energy + disc)) / omega
        bound = np.minimum(bound, np.maximum(turning, sigma0))
    return bound


def _land(y_prev, h_full, target, omega, scale, iterations=8):
    """Shorten the last step so that ct lands on ``target`` (secant on h)."""
    h_lo, ct_lo = np.zeros_like(h_full), y_prev[2]
    h_hi, ct_hi = h_full.copy(), _rk4_step(y_prev, h_full, omega, scale)[2]
    h = h_full * (target - ct_lo) / (ct_hi - ct_lo)
    for _ in range(iterations):
        ct = _rk4_step(y_prev, h, omega, scale)[2]
        lower = ct < target
        h_lo = np.where(lower, h, h_lo)
        ct_lo = np.where(lower, ct, ct_lo)
        h_hi = np.where(lower, h_hi, h)
        ct_hi = np.where(lower, ct_hi, ct)
        gap = ct_hi - ct_lo
        h = np.where(gap > 0.0, h_lo + (h_hi - h_lo) * (target - ct_lo) / np.where(gap > 0.0, gap, 1.0), h)
    y = _rk4_step(y_prev, h, omega, scale)
    y[2] = target
    return y


def _integrate_batch(sigma0, rate0, omega, span, steps, max_factor=2000):
    sigma0 = np.asarray(sigma0, dtype=float)
    rate0 = np.asarray(rate0, dtype=float)
    scale = _sigma_bound(sigma0, rate0, omega, span)
    h = span / steps
    y = np.array([sigma0, rate0, np.zeros_like(sigma0)])
    rows = [y.copy()]
    done_at = np.full(sigma0.shape, -1)
    active = np.ones(sigma0.shape, dtype=bool)
    for i in range(1, max_factor * steps + 1):
        hs = np.where(active, h, 0.0)
        y_new = _rk4_step(y, hs, omega, scale)
        if not (np.all(np.isfinite(y_new)) and np.all(y_new[0] > 0.0)):
            return None
        crossing = active & (y_new[2] >= span)
        if crossing.any():
            landed = _land(y[:, crossing], hs[crossing], span, omega, scale[crossing])
            if not (np.all(np.isfinite(landed)) and np.all(landed[0] > 0.0)):
                return None
            y_new[:, crossing] = landed
            done_at[crossing] = i
            active &= ~crossing
        y = y_new
        rows.append(y.copy())
        if not active.any():
            return np.stack(rows), done_at
    raise StepSizeError(f"integration did not reach ct = {span!r} within {max_factor * steps} steps")


def integrate_optical_ode_many(sigma0, sigma0_rate, scales: FieldScales | None, span: float,
                               steps: int, chunk: int = 64) -> list[EvolutionTrace]:
    """Fixed-step RK4 traces of (sigma, sigma') for several initial states.

    The equation is integrated in a Sundman-regularised variable s with
    d(ct)/ds = sigma / sigma_bound, where sigma_bound bounds sigma over the
    span (taken from the first integral).  Steps are uniform in s and equal
    ``span / steps`` in ct where sigma is widest; they shrink in ct through
    the narrow waists, which a uniform ct grid cannot resolve.  The last step
    is shortened to land exactly on ``span``.
    """
    steps = int(steps)
    if steps < 2:
        raise DomainError("steps must be >= 2")
    if not span > 0.0:
        raise DomainError("span must be positive")
    sigma0 = np.atleast_1d(np.asarray(sigma0, dtype=float))
    rate0 = np.broadcast_to(np.asarray(sigma0_rate, dtype=float), sigma0.shape)
    if np.any(sigma0 <= 0.0) or not np.all(np.isfinite(rate0)):
        raise DomainError("sigma0 must be positive and sigma0_rate finite")
    omega = 0.0 if scales is None else scales.omega_per_meter
    if omega > 0.0:
        # at least 1000 steps per cyclotron period
        steps = max(steps, math.ceil(1000.0 * span * omega / (2.0 * math.pi)))

    traces: list[EvolutionTrace] = []
    for start in range(0, sigma0.size, chunk):
        s0 = sigma0[start:start + chunk]
        r0 = rate0[start:start + chunk]
        n = steps
        for _ in range(11):
            out = _integrate_batch(s0, r0, omega, span, n)
            if out is not None:
                break
            n *= 2
        else:
            raise StepSizeError("dispersion reached zero; halving the step 10 times did not help")
        rows, done_at = out
        for j in range(s0.size):
            k = done_at[j] + 1
            traces.append(EvolutionTrace(ct=rows[:k, 2, j].copy(), sigma=rows[:k, 0, j].copy(),
                                         sigma_rate=rows[:k, 1, j].copy()))
    return traces


def integrate_optical_ode(sigma0: float, sigma0_rate: float, scales: FieldScales | None,
                          span: float, steps: int) -> EvolutionTrace:
    return integrate_optical_ode_many([sigma0], [sigma0_rate], scales, span, steps)[0]
