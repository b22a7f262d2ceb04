"""CG iteration counts with fixed-point block-Jacobi preconditioners for
several grid sizes and bit widths."""

import argparse
import csv
import sys

from fezc.precond import ALLOWED_BITS, HarnessResult, cg_harness


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grids", default="16,32,64")
    p.add_argument("--tile", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="-")
    a = p.parse_args(argv)
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    w.writerow([*HarnessResult.CSV_COLUMNS, "spd"])
    for g in (int(x) for x in a.grids.split(",")):
        for k in ALLOWED_BITS:
            r = cg_harness(g, k, s=a.tile, seed=a.seed)
            w.writerow([*r.csv_row(), r.spd])
            out.flush()
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
