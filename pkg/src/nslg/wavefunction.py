"""Transverse NSLG wavefunction on a polar grid, its moments and residuals.

The packet is

    Psi = N rho^|l| / sigma^(|l|+1) L_n^|l|(rho^2/sigma^2)
          * exp[i l phi - i Phi_G - rho^2/(2 sigma^2) + i rho^2 sigma' / (2 lambda_C sigma)]

with N = sqrt(n! / (pi (n+|l|)!)), so the grid norm is one and
<rho^2> = sigma^2 (2n+|l|+1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import LAMBDA_C, SPEED_OF_LIGHT, FieldScales
from .dynamics import FieldSolutionParams, OpticalState
from .errors import DiagnosticsError, DomainError
from .free_space import BeamSpec, FreeOptics

MIN_RADIAL_NODES = 256
RICHARDSON_TOL = 1e-7


def laguerre(n: int, alpha: float, x):
    """Generalised Laguerre polynomial L_n^alpha(x) by upward recurrence."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n!r}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if x.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(2, n + 1):
        prev, cur = cur, ((2 * k - 1 + alpha - x) * cur - (k - 1 + alpha) * prev) / k
    return cur if x.ndim else float(cur)


def coverage_radius(beam: BeamSpec, sigma: float) -> float:
    """Smallest grid extent whose truncated norm is negligible (< 1e-10)."""
    m = beam.mode_number
    x_cut = m + 12.0 * math.sqrt(m) + 40.0
    return sigma * max(8.0, math.sqrt(x_cut))


# Gregory end corrections to the trapezoidal rule, exact for quintics
_GREGORY = (1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0, 863.0 / 60480.0)


def _gregory_weights(n: int, h: float) -> np.ndarray:
    if n < 2 * len(_GREGORY) + 2:
        raise DomainError(f"need at least {2 * len(_GREGORY) + 2} nodes, got {n}")
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    for j, g in enumerate(_GREGORY, start=1):
        diff = np.array([(-1) ** (j - i) * math.comb(j, i) for i in range(j + 1)], dtype=float)
        w[:j + 1] += (-1) ** (j + 1) * g * diff
        w[n - 1 - np.arange(j + 1)] -= g * diff[::-1]
    return w * h


@dataclass(frozen=True)
class TransverseGrid:
    rho: np.ndarray
    phi: np.ndarray
    radial_weights: np.ndarray   # quadrature weights times rho
    phi_weight: float

    @classmethod
    def build(cls, rho_max: float, n_r: int = 512, n_phi: int = 128) -> "TransverseGrid":
        if n_r < MIN_RADIAL_NODES:
            raise DomainError(f"need at least {MIN_RADIAL_NODES} radial nodes, got {n_r}")
        if n_phi < 8:
            raise DomainError(f"need at least 8 azimuthal nodes, got {n_phi}")
        rho = np.linspace(0.0, rho_max, n_r)
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        w = _gregory_weights(n_r, rho[1] - rho[0]) * rho
        return cls(rho=rho, phi=phi, radial_weights=w, phi_weight=2.0 * math.pi / n_phi)

    @classmethod
    def for_mode(cls, beam: BeamSpec, sigma: float, n_r: int = 512, n_phi: int = 128) -> "TransverseGrid":
        return cls.build(coverage_radius(beam, sigma), n_r, n_phi)

    @property
    def d_rho(self) -> float:
        return float(self.rho[1] - self.rho[0])

    @property
    def rho_max(self) -> float:
        return float(self.rho[-1])

    def check_coverage(self, beam: BeamSpec, sigma: float):
        need = coverage_radius(beam, sigma)
        if self.rho_max < need * (1.0 - 1e-12):
            raise DomainError(f"grid extent {self.rho_max:.3e} m below coverage {need:.3e} m for sigma={sigma:.3e} m")

    def check_azimuthal(self, beam: BeamSpec):
        if self.phi.size <= 2 * abs(beam.l):
            raise DomainError(f"{self.phi.size} azimuthal nodes alias l={beam.l}; need more than {2 * abs(beam.l)}")

    def integrate(self, values) -> float:
        """Integral over rho d rho d phi of an (N_r, N_phi) array."""
        return float(self.radial_weights @ np.asarray(values).sum(axis=1).real) * self.phi_weight

    def integrate_complex(self, values) -> complex:
        return complex(self.radial_weights @ np.asarray(values).sum(axis=1)) * self.phi_weight


@dataclass(frozen=True)
class PsiSample:
    values: np.ndarray   # complex, (N_r, N_phi)
    n: int
    l: int
    sigma: float
    sigma_rate: float
    gouy: float

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _radial_envelope(rho, sigma: float, beam: BeamSpec):
    al = abs(beam.l)
    u = rho / sigma
    log_norm = 0.5 * (math.lgamma(beam.n + 1) - math.lgamma(beam.n + al + 1) - math.log(math.pi))
    with np.errstate(divide="ignore"):
        log_power = np.where(u > 0.0, al * np.log(np.where(u > 0.0, u, 1.0)), 0.0 if al == 0 else -np.inf)
    amp = np.exp(log_norm + log_power - 0.5 * u**2) / sigma
    return amp * laguerre(beam.n, al, u**2)


def _psi_parts(grid: TransverseGrid, beam: BeamSpec, sigma: float, gouy: float):
    """Chirp-free factor chi(rho, phi); Psi = chi * exp(i kappa rho^2)."""
    env = _radial_envelope(grid.rho, sigma, beam)
    return env[:, None] * np.exp(1j * (beam.l * grid.phi[None, :] - gouy))


def _kappa(sigma: float, sigma_rate: float) -> float:
    return sigma_rate / (2.0 * LAMBDA_C * sigma)


def psi_transverse(grid: TransverseGrid, state: OpticalState, beam: BeamSpec) -> PsiSample:
    grid.check_coverage(beam, state.sigma)
    chi = _psi_parts(grid, beam, state.sigma, state.gouy)
    chirp = np.exp(1j * _kappa(state.sigma, state.sigma_rate) * grid.rho**2)
    return PsiSample(values=chi * chirp[:, None], n=beam.n, l=beam.l, sigma=state.sigma,
                     sigma_rate=state.sigma_rate, gouy=state.gouy)


def norm(grid: TransverseGrid, psi: PsiSample) -> float:
    return grid.integrate(psi.density)


def mean_rho_sq(grid: TransverseGrid, psi: PsiSample) -> float:
    return grid.integrate(psi.density * grid.rho[:, None] ** 2) / norm(grid, psi)


def _phi_derivative(values, order: int):
    m = values.shape[-1]
    k = np.fft.fftfreq(m, d=1.0 / m)
    if order % 2 == 1 and m % 2 == 0:
        k[m // 2] = 0.0
    return np.fft.ifft((1j * k) ** order * np.fft.fft(values, axis=-1), axis=-1)


def mean_lz(grid: TransverseGrid, psi: PsiSample) -> float:
    lz_psi = -1j * _phi_derivative(psi.values, 1)
    return grid.integrate_complex(np.conj(psi.values) * lz_psi).real / norm(grid, psi)


def _d_rho(f, h):
    """4th-order first and second radial derivatives on nodes 2..N-3."""
    fm2, fm1, f0, fp1, fp2 = f[:-4], f[1:-3], f[2:-2], f[3:-1], f[4:]
    d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
    return d1, d2


def _optics_at(optics, beam: BeamSpec, ct: float, gouy_scale: float):
    sigma = float(optics.sigma(ct))
    rate = float(optics.sigma_rate(ct))
    return sigma, rate, gouy_scale * float(optics.gouy(beam, ct))


def schrodinger_residual(beam: BeamSpec, scales: FieldScales | None, params, ct: float,
                         grid: TransverseGrid | None = None, *, n_r: int = 512, n_phi: int = 128,
                         step_fraction: float = 1e-6, gouy_scale: float = 1.0,
                         check: bool = True) -> float:
    """Relative L2 residual ||i dPsi/d(ct) - H_perp Psi|| / ||H_perp Psi||.

    ``params`` is a :class:`FieldSolutionParams` (with ``scales``) or a
    :class:`FreeOptics` (with ``scales=None``).  Radial derivatives are
    5-point finite differences of the chirp-free factor chi, combined with
    the quadratic phase exp(i kappa rho^2) analytically; azimuthal
    derivatives are spectral.  ``gouy_scale`` rescales the Gouy phase and
    exists for negative controls.
    """
    if scales is None:
        if not isinstance(params, FreeOptics):
            raise DomainError("field-free residual needs FreeOptics")
        omega = 0.0
        clock = 2.0 * math.pi * params.diffraction_ct
    else:
        if not isinstance(params, FieldSolutionParams):
            raise DomainError("in-field residual needs FieldSolutionParams")
        omega = scales.omega_per_meter
        clock = scales.T_c * SPEED_OF_LIGHT
    h = step_fraction * clock

    sigma0, rate0, gouy0 = _optics_at(params, beam, ct, gouy_scale)
    if grid is None:
        grid = TransverseGrid.for_mode(beam, sigma0, n_r, n_phi)
    grid.check_coverage(beam, sigma0)
    grid.check_azimuthal(beam)

    chis, kappas = {}, {}
    for k in (-2, -1, 0, 1, 2):
        sig, rate, gouy = _optics_at(params, beam, ct + k * h, gouy_scale)
        chis[k] = _psi_parts(grid, beam, sig, gouy)
        kappas[k] = _kappa(sig, rate)

    inner = slice(2, -2)
    rho = grid.rho[inner][:, None]
    rho2 = rho**2
    kappa = kappas[0]

    def time_derivative(step):
        d_chi = (chis[step] - chis[-step]) / (2.0 * step * h)
        d_kappa = (kappas[step] - kappas[-step]) / (2.0 * step * h)
        return d_chi[inner] + 1j * d_kappa * rho2 * chis[0][inner]

    chi = chis[0]
    d1, d2 = _d_rho(chi, grid.d_rho)
    chi_phi = _phi_derivative(chi, 1)[inner]
    chi_phiphi = _phi_derivative(chi, 2)[inner]
    c = chi[inner]

    def hamiltonian(d1, d2):
        # e^{-i kappa rho^2} * Laplacian(e^{i kappa rho^2} chi)
        lap = (d2 + d1 / rho + chi_phiphi / rho2 + 4j * kappa * rho * d1
               + 4j * kappa * c - 4.0 * kappa**2 * rho2 * c)
        return (-0.5 * LAMBDA_C * lap + 0.5 * omega * (-1j * chi_phi)
                + omega**2 / (8.0 * LAMBDA_C) * rho2 * c)

    h_psi = hamiltonian(d1, d2)
    dt = time_derivative(1)
    w = grid.radial_weights[inner]

    def l2(values):
        return math.sqrt(max(float(w @ (np.abs(values) ** 2).sum(axis=1)) * grid.phi_weight, 0.0))

    scale = l2(h_psi)
    if check:
        dt_err = l2((dt - time_derivative(2)) / 3.0) / scale
        # coarse stencil (spacing 2 d_rho): coarse entry j sits on fine node 2j+4
        c1, c2 = _d_rho(chi[::2], 2.0 * grid.d_rho)
        m = min(c1.shape[0], (d1.shape[0] - 3) // 2)
        c1, c2 = c1[:m], c2[:m]
        f1, f2 = d1[2:2 + 2 * m:2], d2[2:2 + 2 * m:2]
        fine = slice(4, 4 + 2 * m, 2)
        rho_c = grid.rho[fine][:, None]
        sp_err = np.abs(-0.5 * LAMBDA_C * ((f2 - c2) + (f1 - c1) * (1.0 / rho_c + 4j * kappa * rho_c))) / 15.0
        sp_err = math.sqrt(float(grid.radial_weights[fine] @ (sp_err**2).sum(axis=1)) * grid.phi_weight) / scale
        if dt_err > RICHARDSON_TOL or sp_err > RICHARDSON_TOL:
            raise DiagnosticsError(f"under-resolved residual: time-step error {dt_err:.2e}, grid error {sp_err:.2e}")
    return l2(1j * dt - h_psi) / scale


def continuity_mismatch(free_state: OpticalState, field_state: OpticalState, beam: BeamSpec,
                        grid: TransverseGrid) -> float:
    """L2 distance between the two packets at the boundary, minimised over a global phase."""
    a = psi_transverse(grid, free_state, beam).values
    b = psi_transverse(grid, field_state, beam).values
    overlap = grid.integrate_complex(np.conj(b) * a)
    phase = np.exp(1j * np.angle(overlap)) if overlap != 0 else 1.0
    return math.sqrt(max(grid.integrate(np.abs(a - phase * b) ** 2), 0.0))


@dataclass(frozen=True)
class LongitudinalPacket:
    sigma_z: float
    beta: float
    z0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma_z > 0.0:
            raise DomainError(f"sigma_z must be positive, got {self.sigma_z!r}")

    def width(self, t) -> np.ndarray:
        ct = SPEED_OF_LIGHT * (np.asarray(t, dtype=float) - self.t0)
        return np.hypot(self.sigma_z, LAMBDA_C * ct / self.sigma_z)

    def center(self, t) -> np.ndarray:
        return self.z0 + self.beta * SPEED_OF_LIGHT * (np.asarray(t, dtype=float) - self.t0)


def longitudinal_density(packet: LongitudinalPacket, z, t):
    """Normalised longitudinal probability density [1/m] at position z and time t [s]."""
    width = packet.width(t)
    out = np.exp(-((np.asarray(z, dtype=float) - packet.center(t)) / width) ** 2) / (math.sqrt(math.pi) * width)
    return out if np.ndim(out) else float(out)
