"""Named beam/lens scenarios, the reference comparison table, traces and file emission."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import beta_from_kinetic_energy, diffraction_scales, field_scales
from .dynamics import (EvolutionTrace, field_solution_params, gouy_closed_form,
                       mean_transverse_energy, xi_diagnostics)
from .errors import DomainError
from .free_space import BeamSpec, Geometry, boundary_state
from .validity import transfer_time_check

CSV_HEADER = ("z_m", "ct_m", "sigma_m", "rho_m", "rho_st_m", "rho_L_m", "gouy_rad")
TABLE_TOLERANCE = 0.015
MIN_SAMPLES_PER_PERIOD = 64


@dataclass(frozen=True)
class ScenarioConfig:
    """One lens scenario.

    ``sigma0``/``sigma0_rate`` bypass the free flight from the source when set;
    ``compare_H`` reruns the in-field part at a second field for a side-by-side report.
    """

    name: str
    E_parallel: float            # kinetic energy [eV]
    H: float                     # T
    d: float                     # source-to-lens distance [m]
    sigma_w: float = 1e-6        # m
    n: int = 0
    l: int = 3
    sigma_z: float | None = None
    span_periods: float = 3.0
    samples_per_period: int = 256
    sigma0: float | None = None
    sigma0_rate: float | None = None
    compare_H: float | None = None

    def __post_init__(self):
        for key in ("E_parallel", "H", "sigma_w"):
            value = getattr(self, key)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise DomainError(f"{self.name}: {key} must be positive, got {value!r}")
        if not (math.isfinite(self.d) and self.d >= 0.0):
            raise DomainError(f"{self.name}: d must be non-negative, got {self.d!r}")
        if not self.span_periods >= 1.0:
            raise DomainError(f"{self.name}: span must cover at least one period")
        if int(self.samples_per_period) != self.samples_per_period or self.samples_per_period < MIN_SAMPLES_PER_PERIOD:
            raise DomainError(f"{self.name}: need at least {MIN_SAMPLES_PER_PERIOD} samples per period")
        if self.sigma_z is not None and not self.sigma_z >= 0.0:
            raise DomainError(f"{self.name}: sigma_z must be non-negative")
        if (self.sigma0 is None) != (self.sigma0_rate is None):
            raise DomainError(f"{self.name}: sigma0 and sigma0_rate must be given together")
        if self.compare_H is not None and not self.compare_H > 0.0:
            raise DomainError(f"{self.name}: compare_H must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise DomainError(str(exc)) from exc

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _landau_preset() -> ScenarioConfig:
    sigma_L = field_scales(1.0).sigma_L
    return ScenarioConfig(name="landau", E_parallel=1e3, H=1.0, d=0.0, sigma_w=sigma_L,
                          span_periods=5.0)


PRESETS: dict[str, ScenarioConfig] = {
    "sem": ScenarioConfig(name="sem", E_parallel=1e3, H=1.0, d=0.163, sigma_z=1e-9),
    "tem": ScenarioConfig(name="tem", E_parallel=2e5, H=1.9, d=0.10),
    "medlinac": ScenarioConfig(name="medlinac", E_parallel=1e6, H=0.1, d=0.10),
    "linac": ScenarioConfig(name="linac", E_parallel=1e9, H=0.01, d=1.0),
    "schattschneider": ScenarioConfig(name="schattschneider", E_parallel=2e5, H=1.9, d=0.0,
                                      sigma_w=47.7e-9, n=0, l=1, sigma0=47.7e-9,
                                      sigma0_rate=-3.1e-4, compare_H=1.0),
    "landau": _landau_preset(),
}

TABLE_PRESETS = ("sem", "tem", "medlinac", "linac")

# Reference values, SI units.
TABLE_EXPECTED: dict[str, dict[str, float]] = {
    "sem": {"rho_L": 72.6e-9, "z_R": 0.163, "rho0": 2.82e-6, "drho_dz": 8.7e-6,
            "xi1": 0.026, "xi2": 6.7e-4},
    "tem": {"rho_L": 52.7e-9, "z_R": 1.79, "rho0": 2.0e-6, "drho_dz": 6.2e-8,
            "xi1": 0.026, "xi2": 3.9e-5},
    "medlinac": {"rho_L": 0.23e-6, "z_R": 2.43, "rho0": 2.0e-6, "drho_dz": 3.4e-8,
                 "xi1": 0.115, "xi2": 5.5e-4},
    "linac": {"rho_L": 0.72e-6, "z_R": 2.58, "rho0": 2.14e-6, "drho_dz": 2.8e-7,
              "xi1": 0.339, "xi2": 0.045},
}
TABLE_COLUMNS = ("rho_L", "z_R", "rho0", "drho_dz", "xi1", "xi2")


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class FieldReport:
    """In-field quantities at one field strength."""

    H: float
    sigma_L: float
    rho_L: float
    sigma_st: float
    rho_st: float
    rho_st_over_rho_L: float
    xi1: float
    xi2_scaled: float
    xi2_bare: float
    energy_mean_ev: float
    energy_landau_ev: float
    energy_ratio: float
    T_c: float


@dataclass
class ScenarioReport:
    name: str
    config: dict
    beta: float
    z0: float                  # lens entrance, measured from the source [m]
    z_R: float | None
    rho0: float
    drho_dz: float | None
    sigma0: float
    sigma0_rate: float
    field: FieldReport
    comparison: FieldReport | None = None
    transfer_verdict: str | None = None
    flags: list[str] = dataclasses.field(default_factory=list)
    trace: EvolutionTrace = dataclasses.field(
        default_factory=lambda: EvolutionTrace(np.empty(0), np.empty(0), np.empty(0), np.empty(0)))

    # reference-table column aliases
    @property
    def rho_L(self) -> float:
        return self.field.rho_L

    @property
    def xi1(self) -> float:
        return self.field.xi1

    @property
    def xi2(self) -> float:
        return self.field.xi2_scaled

    @property
    def rho_st(self) -> float:
        return self.field.rho_st

    def __eq__(self, other):
        if not isinstance(other, ScenarioReport):
            return NotImplemented
        plain = [f.name for f in dataclasses.fields(self) if f.name != "trace"]
        return (all(getattr(self, k) == getattr(other, k) for k in plain)
                and self.trace == other.trace)


def _field_report(beam: BeamSpec, sigma0: float, sigma0_rate: float, H: float):
    scales = field_scales(H)
    params = field_solution_params(sigma0, sigma0_rate, scales)
    xi = xi_diagnostics(sigma0, sigma0_rate, scales.sigma_L)
    energy = mean_transverse_energy(beam, params.sigma_st, scales)
    rho_L = scales.landau_radius(beam.mode_factor)
    report = FieldReport(H=H, sigma_L=scales.sigma_L, rho_L=rho_L, sigma_st=params.sigma_st,
                         rho_st=params.sigma_st * beam.mode_factor,
                         rho_st_over_rho_L=params.sigma_st / scales.sigma_L,
                         xi1=xi.xi1, xi2_scaled=xi.xi2_scaled, xi2_bare=xi.xi2_bare,
                         energy_mean_ev=energy.mean, energy_landau_ev=energy.landau,
                         energy_ratio=energy.ratio, T_c=scales.T_c)
    return report, params


def _trace(params, beam: BeamSpec, config: ScenarioConfig) -> EvolutionTrace:
    count = int(round(config.span_periods * config.samples_per_period))
    ct = np.linspace(0.0, config.span_periods * params.period_ct, count + 1)
    return EvolutionTrace(ct=ct, sigma=params.sigma(ct), sigma_rate=params.sigma_rate(ct),
                          gouy=gouy_closed_form(params, beam, ct))


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Kinematics, boundary state, in-field solution, trace and diagnostics for one scenario."""
    try:
        return _run(config)
    except DomainError as exc:
        raise type(exc)(f"{config.name}: {exc}") from exc
    except ArithmeticError as exc:
        raise type(exc)(f"{config.name}: {exc}") from exc


def _run(config: ScenarioConfig) -> ScenarioReport:
    kin = beta_from_kinetic_energy(config.E_parallel)
    beam = BeamSpec(n=config.n, l=config.l, sigma_w=config.sigma_w)
    if config.sigma0 is None:
        state = boundary_state(beam, Geometry(d=config.d), kin)
        sigma0, sigma0_rate = state.sigma0, state.sigma0_rate
        rho0, drho_dz = state.rho0, state.drho_dz
        z_R = diffraction_scales(beam.sigma_w, kin.beta).z_R
    else:
        sigma0, sigma0_rate = config.sigma0, config.sigma0_rate
        rho0, drho_dz, z_R = sigma0 * beam.mode_factor, sigma0_rate * beam.mode_factor / kin.beta, None

    main, params = _field_report(beam, sigma0, sigma0_rate, config.H)
    comparison = None
    flags: list[str] = []
    if config.compare_H is not None:
        comparison, _ = _field_report(beam, sigma0, sigma0_rate, config.compare_H)
        flags.append(
            f"rho_st/rho_L = {main.rho_st_over_rho_L:.2f} at H = {config.H:g} T but "
            f"{comparison.rho_st_over_rho_L:.2f} at H = {config.compare_H:g} T; "
            "the quoted field and the quoted ratio disagree")

    verdict = None
    if config.sigma_z is not None:
        verdict = transfer_time_check(beam, field_scales(config.H), config.sigma_z, kin.beta).verdict.value

    return ScenarioReport(name=config.name, config=config.to_dict(), beta=kin.beta, z0=config.d,
                          z_R=z_R, rho0=rho0, drho_dz=drho_dz, sigma0=sigma0,
                          sigma0_rate=sigma0_rate, field=main, comparison=comparison,
                          transfer_verdict=verdict, flags=flags, trace=_trace(params, beam, config))


# -- reference table ------------------------------------------------------------

@dataclass(frozen=True)
class TableCell:
    preset: str
    column: str
    computed: float
    expected: float

    @property
    def rel_error(self) -> float:
        return abs(self.computed - self.expected) / abs(self.expected)

    @property
    def ok(self) -> bool:
        return self.rel_error <= TABLE_TOLERANCE


def table1() -> tuple[list[ScenarioReport], list[TableCell]]:
    """Run the four reference scenarios and compare every column with its reference value."""
    reports = [run_scenario(PRESETS[name]) for name in TABLE_PRESETS]
    cells = []
    for report in reports:
        values = {"rho_L": report.rho_L, "z_R": report.z_R, "rho0": report.rho0,
                  "drho_dz": report.drho_dz, "xi1": report.xi1, "xi2": report.xi2}
        for column in TABLE_COLUMNS:
            cells.append(TableCell(report.name, column, values[column],
                                   TABLE_EXPECTED[report.name][column]))
    return reports, cells


# -- emission -------------------------------------------------------------------

def trace_rows(report: ScenarioReport):
    """Rows of the CSV trace; z follows rectilinear flight from the lens entrance."""
    k = math.sqrt(2 * report.config["n"] + abs(report.config["l"]) + 1)
    tr = report.trace
    for ct, sigma, gouy in zip(tr.ct, tr.sigma, tr.gouy):
        yield (report.z0 + report.beta * float(ct), float(ct), float(sigma), float(sigma) * k,
               report.rho_st, report.rho_L, float(gouy))


def to_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in trace_rows(report):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _trace_to_dict(trace: EvolutionTrace) -> dict:
    return {k: [float(v) for v in getattr(trace, k)] for k in ("ct", "sigma", "sigma_rate", "gouy")}


def report_to_dict(report: ScenarioReport) -> dict:
    out = {}
    for f in dataclasses.fields(report):
        value = getattr(report, f.name)
        if f.name == "trace":
            out[f.name] = _trace_to_dict(value)
        elif isinstance(value, FieldReport):
            out[f.name] = dataclasses.asdict(value)
        else:
            out[f.name] = value
    return out


def report_from_dict(data: dict) -> ScenarioReport:
    data = dict(data)
    data["field"] = FieldReport(**data["field"])
    if data.get("comparison") is not None:
        data["comparison"] = FieldReport(**data["comparison"])
    data["trace"] = EvolutionTrace(**{k: np.asarray(v, dtype=float) for k, v in data["trace"].items()})
    return ScenarioReport(**data)


def to_json(report: ScenarioReport) -> str:
    # json uses repr for floats: shortest round-trip decimal
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False)


def from_json(text: str) -> ScenarioReport:
    return report_from_dict(json.loads(text))


def emit(report: ScenarioReport, fmt: str, path: str | Path | None = None) -> str:
    """Serialise ``report`` as ``csv`` (trace) or ``json`` (full report); write to ``path`` if given."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report)
    else:
        raise DomainError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def load_config(path: str | Path, **overrides) -> ScenarioConfig:
    """Read a JSON config; entries of ``overrides`` that are not None replace file values."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DomainError(f"{path}: config must be a JSON object")
    if "preset" in data:
        base = get_preset(data.pop("preset")).to_dict()
        base.update(data)
        data = base
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig.from_dict(data)
