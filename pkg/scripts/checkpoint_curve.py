"""Runtime against checkpoint count for the reference scenario and its
fast and slow I/O variants, with the optimum of each."""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from fezc.errors import InfeasibleError
from fezc.models import checkpoint_nopt, checkpoint_runtime
from fezc.models.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--csv", default="-")
    a = p.parse_args(argv)
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    w.writerow(["scenario", "n", "T"])
    ns = np.arange(1, a.n_max + 1)
    for name in ("reference", "fast_io", "slow_io"):
        _, s = load_scenario(SCENARIOS / f"checkpoint_{name}.txt", "checkpoint")
        plan = checkpoint_nopt(s)
        print(f"{name}: n_opt {plan.n_real:.3f}  n {plan.n}  T {plan.T:.2f}", file=sys.stderr)
        for n in ns:
            try:
                t = float(checkpoint_runtime(s, int(n)))
            except InfeasibleError:
                t = float("nan")
            w.writerow([name, int(n), repr(t)])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
