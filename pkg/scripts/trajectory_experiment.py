"""Delta versus independent encoding of a steady state and a travelling wave."""

import argparse
import csv
import sys

import numpy as np

from fezc.fixtures import sine, wave_trajectory
from fezc.mesh import build_hierarchy
from fezc.trajectory import read_backwards, store


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--refinements", type=int, default=6)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--eps", default="1e-2,1e-3,1e-4")
    p.add_argument("--speed", type=float, default=0.004)
    p.add_argument("--csv", default="-")
    a = p.parse_args(argv)
    h = build_hierarchy(2, a.refinements)
    cases = {"steady": [sine(h)] * a.steps, "wave": wave_trajectory(h, a.steps, speed=a.speed)}
    out = sys.stdout if a.csv == "-" else open(a.csv, "w", newline="")
    w = csv.writer(out)
    w.writerow(["case", "eps", "predictor", "bytes", "factor", "max_step_error"])
    for name, states in cases.items():
        for eps in (float(e) for e in a.eps.split(",")):
            for pred in ("delta", "none"):
                s = store(h, states, eps, pred)
                err = max(np.abs(x - y).max() for x, y in zip(read_backwards(s, h), reversed(states)))
                w.writerow([name, repr(eps), pred, s.nbytes, repr(s.compression_factor()), repr(float(err))])
                out.flush()
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
