"""Stationary radius of the sigma0 = 47.7 nm, sigma0' = -3.1e-4 packet at 1.9 T and at 1 T."""
from nslg.scenarios import PRESETS, run_scenario

report = run_scenario(PRESETS["schattschneider"])
print(f"{'H [T]':>6} {'sigma_L [nm]':>13} {'rho_st/rho_L':>13} {'xi1':>8} {'xi2 scaled':>11} {'xi2 bare':>9}")
for f in (report.field, report.comparison):
    print(f"{f.H:6.2f} {f.sigma_L * 1e9:13.2f} {f.rho_st_over_rho_L:13.3f} {f.xi1:8.4f} "
          f"{f.xi2_scaled:11.4f} {f.xi2_bare:9.3f}")
for flag in report.flags:
    print("flag:", flag)
