"""Rate-distortion curves for every transform family and order on one field.

    python3 scripts/rd_sweep.py --field sine --dim 2 --refinements 7 --target linf
"""

import argparse
import csv
import sys

import numpy as np

from fezc.coding.codec import QT, TQ, rd_sweep
from fezc.fixtures import FIELDS, make_field
from fezc.mesh import Norm, build_hierarchy
from fezc.transform import Family


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--field", choices=sorted(FIELDS), default="sine")
    p.add_argument("--dim", type=int, choices=(1, 2), default=2)
    p.add_argument("--refinements", type=int, default=7)
    p.add_argument("--target", choices=("linf", "l2", "hm1"), default="linf")
    p.add_argument("--eps-min", type=float, default=1e-7)
    p.add_argument("--eps-max", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=13)
    p.add_argument("--csv", default="-", help="output file, '-' for stdout")
    a = p.parse_args(argv)

    h = build_hierarchy(a.dim, a.refinements)
    u = make_field(a.field, h)
    eps = np.geomspace(a.eps_max, a.eps_min, a.points)
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    w.writerow(["family", "order", "eps", "bits_per_value", "factor", "linf", "l2", "hm1"])
    for fam in Family:
        for order in (TQ, QT):
            for r in rd_sweep(h, u, fam, order, Norm.parse(a.target), eps):
                w.writerow([fam.name.lower(), order.name.lower(), *r.csv_row()])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
