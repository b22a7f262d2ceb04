"""Nominal parareal scenario: runtime and iterations over the compression
tolerance, plus the optimizer's choice versus uncompressed communication.

    python3 scripts/parareal_scenario.py --sweep t_C0=0.001:1:13:log
"""

import argparse
import csv
import sys

from fezc.models import NOMINAL_PARAREAL, optimize_compression
from fezc.models.parareal import default_grid, parareal_iterations, parareal_runtime
from fezc.models.scenario import parallel_scenario, parse_sweep, sweep


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sweep", help="key=lo:hi:steps[:log]; optimizer result per value")
    p.add_argument("--csv", default="-")
    a = p.parse_args(argv)
    s = parallel_scenario(NOMINAL_PARAREAL)
    plan = optimize_compression(s)
    print(f"dc* {plan.dc:.3e}  J {plan.J_uncompressed} -> {plan.J}  "
          f"T {plan.T_uncompressed:.3f} -> {plan.T_par:.3f}  improvement {100 * plan.improvement:.2f}%",
          file=sys.stderr)
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    if a.sweep:
        key, values = parse_sweep(a.sweep)
        header, rows = sweep("parareal", NOMINAL_PARAREAL, key, values)
        w.writerow(header)
        w.writerows(rows)
    else:
        w.writerow(["dc", "J", "T_par"])
        for dc in [0.0, *default_grid(s)]:
            x = s.with_dc(float(dc))
            w.writerow([repr(float(dc)), parareal_iterations(x), repr(parareal_runtime(x))])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
