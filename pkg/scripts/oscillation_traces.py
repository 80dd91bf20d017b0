"""Write rho(z) traces for every preset as CSV files for an external plotter.

Usage: python scripts/oscillation_traces.py [OUTDIR]
"""
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from nslg.scenarios import PRESETS, emit, run_scenario


def _write(name: str, outdir: Path) -> str:
    report = run_scenario(PRESETS[name])
    path = outdir / f"{name}_trace.csv"
    emit(report, "csv", path)
    return f"{name:<16} {len(report.trace):6d} rows  rho_st/rho_L = {report.field.rho_st_over_rho_L:.3f}  -> {path}"


def main() -> None:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "traces")
    outdir.mkdir(parents=True, exist_ok=True)
    with ProcessPoolExecutor() as pool:
        for line in pool.map(_write, sorted(PRESETS), [outdir] * len(PRESETS)):
            print(line)


if __name__ == "__main__":
    main()
