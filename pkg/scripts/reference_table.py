"""Print the four reference scenarios next to their reference values."""
import sys

from nslg.scenarios import TABLE_TOLERANCE, table1


def main() -> int:
    reports, cells = table1()
    for r in reports:
        print(f"{r.name:<9} beta={r.beta:.6f}  rho_st/rho_L={r.field.rho_st_over_rho_L:9.3f}  "
              f"<E>/eps={r.field.energy_ratio:9.3f}  xi2 (bare)={r.field.xi2_bare:.4g}")
    print()
    misses = 0
    for c in cells:
        misses += not c.ok
        print(f"{c.preset:<9}{c.column:<8}{c.computed:12.5g}{c.expected:12.5g}{c.rel_error:9.2%}"
              f"  {'ok' if c.ok else 'MISS'}")
    print(f"\n{len(cells) - misses}/{len(cells)} within {TABLE_TOLERANCE:.1%}")
    return 0 if misses == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
