"""Command line front end.

Exit codes: 0 success, 1 internal or numerical failure, 2 bad arguments,
3 I/O error, 4 malformed input file, 5 tolerance too tight, 6 infeasible model
scenario.  Summaries go to stdout, diagnostics to stderr, tables only to the
file named by ``--csv``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path


from . import __version__
from .coding.codec import RDRow, CompressedBlob, Order, compress, decompress, measure, rd_sweep
from .coding.schedule import make_schedule
from .errors import FezcError, UsageError
from .fixtures import FIELDS, make_field, wave_trajectory
from .mesh import MAX_REFINEMENTS, Norm, build_hierarchy
from .models import scenario as scen
from .models.checkpoint import checkpoint_nopt
from .models.parareal import efficiency, optimize_compression
from .precond import ALLOWED_BITS, cg_harness, write_csv as write_precond_csv
from .rawio import read_raw, write_raw
from .trajectory import BackwardReader, TrajectoryStore, store
from .transform import Family

EXIT_IO = 3

_FAMILIES = {"hb": Family.HIERARCHICAL, "wavelet": Family.WAVELET}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(UsageError.exit_code)


def _eps(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _eps_list(text: str) -> list[float]:
    return [_eps(t) for t in text.split(",") if t.strip()]


def _codec_flags(p):
    p.add_argument("--transform", choices=sorted(_FAMILIES), default="hb")
    p.add_argument("--order", choices=("tq", "qt"), default="tq")
    p.add_argument("--target", choices=("linf", "l2", "hm1"), default="linf")


def _summary(row: RDRow) -> str:
    return (f"bits/value {row.bits_per_value:.4f}  factor {row.factor:.3f}  bytes {row.nbytes}  "
            f"linf {row.linf:.3e}  l2 {row.l2:.3e}  hm1 {row.hm1:.3e}")


def _load_vector(path):
    dim, ref, values = read_raw(path)
    return build_hierarchy(dim, ref), values


def cmd_gen(a) -> int:
    h = build_hierarchy(a.dim, a.refinements)
    out = Path(a.output)
    if a.steps:
        out.mkdir(parents=True, exist_ok=True)
        if a.field == "wave":
            states = wave_trajectory(h, a.steps, speed=a.speed)
        else:
            states = [make_field(a.field, h)] * a.steps
        for t, u in enumerate(states):
            write_raw(out / f"step_{t:05d}.fezr", h.dim, h.refinements, u)
        print(f"wrote {a.steps} {a.field} states with {h.size} values to {out}")
    else:
        write_raw(out, h.dim, h.refinements, make_field(a.field, h))
        print(f"wrote {a.field} field with {h.size} values to {out}")
    return 0


def cmd_compress(a) -> int:
    h, u = _load_vector(a.input)
    blob = compress(h, u, _FAMILIES[a.transform], Order.parse(a.order),
                    make_schedule(h, Norm.parse(a.target), a.eps))
    Path(a.output).write_bytes(blob.to_bytes())
    print(_summary(measure(h, u, blob)))
    return 0


def cmd_decompress(a) -> int:
    blob = CompressedBlob.from_bytes(Path(a.input).read_bytes())
    hd = blob.header
    c = decompress(blob)
    write_raw(a.output, hd.dim, hd.refinements, c.values)
    print(f"decoded {c.values.size} values ({hd.dim}D, {hd.refinements} refinements) to {a.output}")
    return 0


def cmd_rd(a) -> int:
    if not a.eps_list:
        raise UsageError("--eps-list is empty")
    h, u = _load_vector(a.input)
    rows = rd_sweep(h, u, _FAMILIES[a.transform], Order.parse(a.order), Norm.parse(a.target),
                    a.eps_list)
    for r in rows:
        print(f"eps {r.eps:.3e}  {_summary(r)}")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(RDRow.CSV_COLUMNS)
            w.writerows(r.csv_row() for r in rows)
    return 0


def cmd_traj_store(a) -> int:
    files = sorted(Path(a.directory).glob("*.fezr"))
    if not files:
        raise UsageError(f"no .fezr files in {a.directory}")
    loaded = [read_raw(f) for f in files]
    dims = {(d, r) for d, r, _ in loaded}
    if len(dims) != 1:
        raise UsageError("trajectory files use different hierarchies")
    h = build_hierarchy(*dims.pop())
    s = store(h, [v for _, _, v in loaded], a.eps, a.predictor,
              _FAMILIES[a.transform], Order.parse(a.order))
    Path(a.output).write_bytes(s.to_bytes())
    print(f"stored {s.steps} steps  predictor {a.predictor}  bytes {s.nbytes}  "
          f"factor {s.compression_factor():.3f}")
    return 0


def cmd_traj_read(a) -> int:
    s = TrajectoryStore.from_bytes(Path(a.input).read_bytes())
    out = Path(a.directory)
    out.mkdir(parents=True, exist_ok=True)
    reader = BackwardReader(s)
    t = s.steps
    for u in reader:
        t -= 1
        write_raw(out / f"step_{t:05d}.fezr", s.dim, s.refinements, u)
    print(f"read {s.steps} steps backwards into {out}  peak vectors held {reader.high_water}")
    return 0


def cmd_plan(a) -> int:
    params, scenario = scen.load_scenario(a.scenario, a.kind)
    if a.kind == "checkpoint":
        p = checkpoint_nopt(scenario)
        print(f"n_opt {p.n_real:.6f}  n {p.n}  T {p.T:.6f}  b {scenario.b:.9f}")
    else:
        p = optimize_compression(scenario)
        print(f"dc* {p.dc:.6e}  J {p.J}  T_par {p.T_par:.6f}  E {p.E:.6f}  "
              f"J_uncompressed {p.J_uncompressed}  T_uncompressed {p.T_uncompressed:.6f}  "
              f"E_uncompressed {efficiency(scenario.with_dc(0.0)):.6f}  "
              f"improvement {100 * p.improvement:.3f}%")
    if a.sweep:
        key, values = scen.parse_sweep(a.sweep)
        header, rows = scen.sweep(a.kind, params, key, values)
        print(f"swept {key} over {len(rows)} points")
        if a.csv:
            scen.write_csv(a.csv, header, rows)
    elif a.csv:
        raise UsageError("--csv needs --sweep")
    return 0


def cmd_precond(a) -> int:
    results = [cg_harness(a.grid, k, a.block, a.tile, seed=a.seed) for k in a.bits]
    for r in results:
        print(f"grid {r.grid}  k {r.k}  tile {r.s}  block {r.block}  iterations {r.iters_exact} -> "
              f"{r.iters_compressed} ({100 * r.increase:+.1f}%)  spd {r.spd}  bytes {r.storage_bytes}")
    if a.csv:
        write_precond_csv(a.csv, results)
    return 0


def _bits(text: str) -> list[int]:
    try:
        bits = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bit list {text!r}") from None
    if any(b not in ALLOWED_BITS for b in bits):
        raise argparse.ArgumentTypeError(f"bit widths must be among {ALLOWED_BITS}")
    return bits


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fezc", description="Error-controlled compression of finite element data.")
    p.add_argument("--version", action="version", version=f"fezc {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized harnesses")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a synthetic nodal field")
    g.add_argument("field", choices=sorted(FIELDS))
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--dim", type=int, choices=(1, 2), default=2)
    g.add_argument("--refinements", type=int, default=7)
    g.add_argument("--steps", type=int, default=0,
                   help="write a trajectory of this many states into the output directory")
    g.add_argument("--speed", type=float, default=0.004, help="wave speed per step")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("compress", help="compress a raw vector file")
    c.add_argument("input")
    c.add_argument("output")
    _codec_flags(c)
    c.add_argument("--eps", type=_eps, required=True)
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", help="decode a compressed file")
    d.add_argument("input")
    d.add_argument("output")
    d.set_defaults(func=cmd_decompress)

    r = sub.add_parser("rd", help="rate-distortion sweep")
    r.add_argument("input")
    _codec_flags(r)
    r.add_argument("--eps-list", type=_eps_list, required=True)
    r.add_argument("--csv")
    r.set_defaults(func=cmd_rd)

    t = sub.add_parser("traj", help="trajectory storage")
    tsub = t.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    ts = tsub.add_parser("store", help="compress a directory of states in time order")
    ts.add_argument("directory")
    ts.add_argument("output")
    ts.add_argument("--eps", type=_eps, required=True)
    ts.add_argument("--predictor", choices=("delta", "none"), default="delta")
    ts.add_argument("--transform", choices=sorted(_FAMILIES), default="hb")
    ts.add_argument("--order", choices=("tq", "qt"), default="qt")
    ts.set_defaults(func=cmd_traj_store)
    tr = tsub.add_parser("read", help="decode a trajectory backwards into a directory")
    tr.add_argument("input")
    tr.add_argument("directory")
    tr.set_defaults(func=cmd_traj_read)

    pl = sub.add_parser("plan", help="runtime planners")
    pl.add_argument("kind", choices=("checkpoint", "parareal"))
    pl.add_argument("scenario", help="key = value scenario file")
    pl.add_argument("--sweep", help="key=lo:hi:steps[:log]")
    pl.add_argument("--csv")
    pl.set_defaults(func=cmd_plan)

    pc = sub.add_parser("precond", help="CG with fixed-point block-Jacobi preconditioners")
    pc.add_argument("--grid", type=int, default=64)
    pc.add_argument("--bits", type=_bits, default=[16])
    pc.add_argument("--block", type=int, default=None, help="Jacobi block size (default: grid)")
    pc.add_argument("--tile", type=int, default=8)
    pc.add_argument("--csv")
    pc.set_defaults(func=cmd_precond)
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
    except SystemExit as exc:   # --help, --version and flag errors
        return exc.code or 0
    if getattr(a, "refinements", None) is not None and a.refinements > MAX_REFINEMENTS[a.dim]:
        print(f"fezc: error: at most {MAX_REFINEMENTS[a.dim]} refinements in {a.dim}D",
              file=sys.stderr)
        return UsageError.exit_code
    try:
        return a.func(a)
    except FezcError as exc:
        print(f"fezc: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fezc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
