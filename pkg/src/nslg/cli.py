"""Command-line entry point.

Exit status: 0 on success, 1 when a comparison fails, 2 on usage or domain errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .constants import beta_from_kinetic_energy, field_scales
from .dynamics import field_optical_state, field_solution_params
from .errors import DiagnosticsError, DomainError, InconsistencyError, StepSizeError
from .free_space import BeamSpec
from .scenarios import (PRESETS, TABLE_TOLERANCE, emit, get_preset, load_config, run_scenario,
                        table1)
from .validity import (FringeProfile, Verdict, effective_length, fringe_energy_change,
                       transfer_time_check)
from .wavefunction import TransverseGrid, mean_rho_sq, norm, psi_transverse, schrodinger_residual

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
RESIDUAL_LIMIT = 1e-5


def _cmd_table1(args) -> int:
    _, cells = table1()
    print(f"{'preset':<10}{'column':<9}{'computed':>14}{'expected':>14}{'rel.err':>10}  status")
    for c in cells:
        status = "PASS" if c.ok else "FAIL"
        print(f"{c.preset:<10}{c.column:<9}{c.computed:>14.5g}{c.expected:>14.5g}{c.rel_error:>10.4f}  {status}")
    misses = sum(not c.ok for c in cells)
    print(f"{len(cells) - misses}/{len(cells)} cells within {TABLE_TOLERANCE:.1%}")
    return EXIT_OK if misses == 0 else EXIT_FAIL


def _cmd_run(args) -> int:
    overrides = {"span_periods": args.span, "samples_per_period": args.samples_per_period}
    if args.config:
        config = load_config(args.config, **overrides)
    else:
        base = get_preset(args.preset).to_dict()
        base.update({k: v for k, v in overrides.items() if v is not None})
        config = type(get_preset(args.preset)).from_dict(base)
    report = run_scenario(config)
    text = emit(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    for flag in report.flags:
        print(f"flag: {flag}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = get_preset(args.preset)
    beam = BeamSpec(config.n, config.l, config.sigma_w)
    kin = beta_from_kinetic_energy(config.E_parallel)
    check = transfer_time_check(beam, field_scales(config.H), args.sigma_z, kin.beta)
    print(f"tau_d          {check.tau_d:.6g} s")
    print(f"T_c            {check.T_c:.6g} s")
    print(f"sigma_z / v    {check.crossing_time:.6g} s")
    print(f"tau_d ratio    {check.ratio_d:.6g}")
    print(f"T_c ratio      {check.ratio_c:.6g}")
    print(f"verdict        {check.verdict.value}")
    return EXIT_OK if check.verdict is Verdict.VALID else EXIT_FAIL


def _read_profile(path: str) -> FringeProfile:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except ValueError:
        # one header line
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#", skiprows=1)
    if data.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns (z [m], Hz [T])")
    return FringeProfile.from_samples(data[:, 0], data[:, 1])


def _cmd_fringe(args) -> int:
    profile = _read_profile(args.profile)
    length = effective_length(profile)
    change = fringe_energy_change(args.rho, profile.H, args.vphi)
    print(json.dumps({"H": profile.H, "d0": profile.d0, "d_eff": length.d,
                      "boundary_shift": length.boundary_shift, "focusing_ev": change.focusing,
                      "dE_minus_ev": change.dE_minus, "dE_plus_ev": change.dE_plus}, indent=2))
    return EXIT_OK


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        n_r, n_phi = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be NR,NPHI, got {text!r}") from None
    return n_r, n_phi


def _cmd_psi(args) -> int:
    config = get_preset(args.preset)
    report = run_scenario(config)
    scales = field_scales(config.H)
    params = field_solution_params(report.sigma0, report.sigma0_rate, scales)
    beam = BeamSpec(config.n, config.l, config.sigma_w)
    n_r, n_phi = args.grid
    state = field_optical_state(params, beam, args.ct)
    grid = TransverseGrid.for_mode(beam, state.sigma, n_r, n_phi)
    grid.check_azimuthal(beam)
    psi = psi_transverse(grid, state, beam)
    residual = schrodinger_residual(beam, scales, params, args.ct, grid)
    out = {"preset": config.name, "ct": args.ct, "sigma": state.sigma, "gouy": state.gouy,
           "norm": norm(grid, psi), "mean_rho_sq": mean_rho_sq(grid, psi), "residual": residual,
           "rho": grid.rho.tolist(), "phi": grid.phi.tolist(), "density": psi.density.tolist()}
    text = json.dumps(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text + "\n")
    print(f"residual {residual:.3e}", file=sys.stderr)
    return EXIT_OK if residual <= RESIDUAL_LIMIT else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nslg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", help="recompute the reference scenario table")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("run", help="run one scenario and emit its trace or report")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON scenario config")
    src.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--span", type=float, help="trace span in cyclotron periods")
    p.add_argument("--samples-per-period", type=int)
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("validate", help="instantaneous-transfer time check")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--sigma-z", type=float, required=True, help="longitudinal size [m]")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("fringe", help="effective length and energy change for a fringe profile")
    p.add_argument("--profile", required=True, help="two-column CSV: z [m], Hz [T]")
    p.add_argument("--rho", type=float, required=True, help="radius [m]")
    p.add_argument("--vphi", type=float, required=True, help="azimuthal velocity over c")
    p.set_defaults(func=_cmd_fringe)

    p = sub.add_parser("psi", help="density grid and Schroedinger residual at one instant")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--ct", type=float, required=True, help="optical path since the lens entrance [m]")
    p.add_argument("--grid", type=_parse_grid, default=(512, 128), help="NR,NPHI")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=_cmd_psi)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DiagnosticsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (DomainError, InconsistencyError, StepSizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
