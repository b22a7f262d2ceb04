"""Compression factor of the lifted wavelet against plain hierarchical bases at
equal measured H^-1 error.

For every HB run the wavelet factor is read off the operational hull (the best
wavelet factor among runs whose measured error does not exceed the HB error).
"""

import argparse
import csv
import math
import sys

import numpy as np

from fezc.coding.codec import TQ, rd_sweep
from fezc.fixtures import FIELDS, make_field
from fezc.mesh import Norm, build_hierarchy
from fezc.transform import Family


def matched_ratios(h, u, eps):
    runs = {f: rd_sweep(h, u, f, TQ, Norm.HMINUS1, eps) for f in Family}

    def hull(fam, err):
        return max((r.factor for r in runs[fam] if r.hm1 <= err), default=math.nan)

    rows = []
    for r in runs[Family.HIERARCHICAL]:
        wf = hull(Family.WAVELET, r.hm1)
        rows.append((r.eps, r.hm1, r.bits_per_value, hull(Family.HIERARCHICAL, r.hm1), wf,
                     wf / hull(Family.HIERARCHICAL, r.hm1)))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--field", choices=sorted(FIELDS), default="sine")
    p.add_argument("--refinements", type=int, default=7)
    p.add_argument("--points", type=int, default=19)
    p.add_argument("--csv", default="-")
    a = p.parse_args(argv)
    h = build_hierarchy(2, a.refinements)
    rows = matched_ratios(h, make_field(a.field, h), np.geomspace(1e-3, 1e-6, a.points))
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    w.writerow(["eps", "hb_hm1", "hb_bits_per_value", "hb_factor", "wavelet_factor", "ratio"])
    w.writerows([repr(float(x)) for x in row] for row in rows)
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
