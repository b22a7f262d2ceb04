"""Acceptance checks, one test per criterion.

Each test records a single ``PASS``/``FAIL`` line (printed in the pytest
terminal summary, and directly with ``-s``).  Run on its own with::

    pytest tests/test_acceptance.py -v
"""

import math
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from fezc.coding.codec import QT, TQ, compress, decompress, measure, rd_sweep
from fezc.coding.quantize import QuantizerSpec, dequantize_array, quantize, quantize_array
from fezc.coding.rangecoder import AdaptiveModel, decode_symbols, encode_symbols
from fezc.coding.schedule import make_schedule
from fezc.errors import InfeasibleError
from fezc.fixtures import sine, wave_trajectory
from fezc.mesh import CoefficientVector, Norm, build_hierarchy
from fezc.models import (NOMINAL_PARAREAL, REFERENCE_CHECKPOINT, CheckpointScenario,
                         brute_force_nopt, checkpoint_nopt, optimize_compression,
                         parareal_error_factor, parareal_iterations)
from fezc.models.scenario import checkpoint_scenario, parallel_scenario
from fezc.precond import cg_harness
from fezc.trajectory import read_backwards, store
from fezc.transform import Family, analyze

pytestmark = pytest.mark.slow

RESULTS: list[str] = []


def record(num, name, ok, detail, elapsed, limit, soft=False):
    ok_time = elapsed < limit
    status = "PASS" if ok and ok_time else ("SOFT-FAIL" if soft else "FAIL")
    line = f"[{status}] criterion {num:2d} {name}: {detail} ({elapsed:.1f} s, limit {limit:.0f} s)"
    RESULTS.append(line)
    print(line)
    return ok, ok_time


def check(num, name, ok, detail, elapsed, limit):
    ok, ok_time = record(num, name, ok, detail, elapsed, limit)
    assert ok, detail
    assert ok_time, f"took {elapsed:.1f} s, limit {limit} s"


def test_c01_strict_pointwise_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    hs = {(d, r): build_hierarchy(d, r) for d in (1, 2) for r in range(8)}
    violations, worst = 0, 0.0
    for i in range(1000):
        dim = int(rng.integers(1, 3))
        r = int(rng.integers(0, 8))
        h = hs[(dim, r)]
        eps = 10 ** rng.uniform(-6, -1)
        scale = 10 ** rng.uniform(-3, 3)
        kind = i % 3
        if kind == 0:
            u = rng.standard_normal(h.size)
        elif kind == 1:
            k = rng.uniform(1, 20, size=dim)
            u = np.sin(h.vertex_coords @ k) + 0.01 * rng.standard_normal(h.size)
        else:
            u = np.where(h.vertex_coords[:, 0] < rng.uniform(), 1.0, -0.5)
        u = scale * u
        family = Family(i % 2)
        back = decompress(compress(h, u, family, QT, eps=eps).to_bytes(), h).values
        err = np.abs(back - u).max()
        worst = max(worst, err / eps)
        violations += bool(err > eps)
    check(1, "strict error bound", violations == 0,
          f"1000 vectors, {violations} violations, max error/eps = {worst:.6f}",
          time.perf_counter() - t0, 120)


def test_c02_wavelet_vs_hb_at_matched_hminus1():
    t0 = time.perf_counter()
    h = build_hierarchy(2, 7)
    u = sine(h)
    eps = np.geomspace(1e-3, 1e-6, 19)
    runs = {f: rd_sweep(h, u, f, TQ, Norm.HMINUS1, eps) for f in Family}

    def best_factor(family, err):
        # operational rate-distortion hull: best factor among runs meeting the error
        return max((r.factor for r in runs[family] if r.hm1 <= err), default=math.nan)

    ratios = {}
    for r in runs[Family.HIERARCHICAL]:
        ratios[r.eps] = best_factor(Family.WAVELET, r.hm1) / best_factor(Family.HIERARCHICAL, r.hm1)
    matched = {e: ratios[min(ratios, key=lambda x: abs(math.log(x / e)))] for e in (1e-4, 1e-5)}
    curve = " ".join(f"{v:.2f}" for v in ratios.values())
    ok = all(v >= 1.5 for v in matched.values())
    check(2, "wavelet vs HB", ok,
          "factor ratio at matched H^-1 error: "
          + ", ".join(f"HB eps {e:g} -> {v:.2f}" for e, v in matched.items())
          + f"; full curve eps 1e-3..1e-6: {curve}",
          time.perf_counter() - t0, 60)


def test_c03_bits_per_value_at_interpolation_error():
    t0 = time.perf_counter()
    h = build_hierarchy(2, 7)
    # interpolation error at the midpoints of the finest edges, read off the
    # finest-level HB coefficients of the once-refined interpolant
    fine = build_hierarchy(2, 8)
    c = analyze(fine, CoefficientVector(sine(fine))).values
    eps = float(np.abs(c[fine.level_vertices[-1]]).max())
    u = sine(h)
    out = {}
    for label, fam, order in (("QT+HB", Family.HIERARCHICAL, QT),
                              ("TQ+HB", Family.HIERARCHICAL, TQ)):
        row = measure(h, u, compress(h, u, fam, order, make_schedule(h, Norm.LINF, eps)))
        out[label] = row
    ok = all(r.bits_per_value <= 4.5 and r.linf <= eps for r in out.values())
    check(3, "bits/value", ok,
          f"eps = {eps:.3e}; " + ", ".join(f"{k} {r.bits_per_value:.3f} bits/value (linf {r.linf:.2e})"
                                          for k, r in out.items()),
          time.perf_counter() - t0, 60)


def test_c04_delta_encoding():
    t0 = time.perf_counter()
    h = build_hierarchy(2, 6)
    eps = 1e-3
    steady = [sine(h)] * 200
    waves = wave_trajectory(h, 200)
    ratio = {}
    worst = 0.0
    for name, states in (("constant", steady), ("wave", waves)):
        d = store(h, states, eps, "delta")
        n = store(h, states, eps, "none")
        ratio[name] = d.compression_factor() / n.compression_factor()
        for s in (d, n):
            errs = [np.abs(a - b).max() for a, b in zip(read_backwards(s, h), reversed(states))]
            assert len(errs) == 200
            worst = max(worst, max(errs))
    ok = ratio["constant"] >= 5 and ratio["wave"] >= 1.3 and worst <= eps
    check(4, "delta encoding", ok,
          f"delta/none factor ratio constant {ratio['constant']:.2f}, wave {ratio['wave']:.2f}; "
          f"max step error {worst:.3e} over 200 steps",
          time.perf_counter() - t0, 120)


def test_c05_checkpoint_model():
    t0 = time.perf_counter()
    ref = checkpoint_scenario(REFERENCE_CHECKPOINT)
    plan = checkpoint_nopt(ref)
    brute = brute_force_nopt(ref)
    ok_ref = abs(plan.n_real - brute) <= 1
    rng = np.random.default_rng(5)
    agree = solvable = 0
    for _ in range(500):
        t_c = 10 ** rng.uniform(3, 7)
        t_cp = t_c * 10 ** rng.uniform(-5, -1)
        s = CheckpointScenario(int(round(10 ** rng.uniform(0, 4))), 10 ** rng.uniform(-9, -5),
                               t_c, t_cp, t_cp * rng.uniform(0, 2))
        try:
            p = checkpoint_nopt(s)
        except InfeasibleError:
            continue
        solvable += 1
        n_max = max(10_000, 2 * math.ceil(p.n_real) + 2)
        agree += abs(p.n_real - brute_force_nopt(s, n_max)) <= 1
    fast = CheckpointScenario(ref.N, ref.p_RS, ref.T_C, ref.T_CP / 4, ref.T_DS)
    t_fast = checkpoint_nopt(fast).T
    ok = ok_ref and agree == solvable and solvable > 0 and t_fast < plan.T
    check(5, "checkpoint model", ok,
          f"n_opt {plan.n_real:.4f} vs brute force {brute}; fuzz agreement {agree}/{solvable} "
          f"solvable draws; T(n_opt) {plan.T:.1f} s nominal vs {t_fast:.1f} s with T_CP/4",
          time.perf_counter() - t0, 30)


def test_c06_parareal_model():
    t0 = time.perf_counter()
    s = parallel_scenario(NOMINAL_PARAREAL)
    unit = all(parareal_error_factor(0.0, rho, n) == 1.0 for rho in (0.01, 0.3, 0.9)
               for n in (0, 1, 64, 1000))
    js = [parareal_iterations(s.with_dc(dc)) for dc in np.linspace(0, 0.99 * s.rho, 500)]
    monotone = js == sorted(js)
    never_worse = True
    for t_c0 in np.geomspace(1e-4, 10, 12):
        for tol in (1e-4, 1e-6, 1e-9):
            x = parallel_scenario({**NOMINAL_PARAREAL, "t_C0": t_c0, "TOL": tol})
            p = optimize_compression(x)
            never_worse &= p.T_par <= p.T_uncompressed
    p = optimize_compression(s)
    ok = unit and monotone and never_worse and 0.01 <= p.improvement < 0.10
    check(6, "parareal model", ok,
          f"factor(0)=1: {unit}; J nondecreasing: {monotone}; optimizer never worse: {never_worse}; "
          f"nominal improvement {100 * p.improvement:.2f}% at dc* {p.dc:.2e} (J {p.J_uncompressed} -> {p.J})",
          time.perf_counter() - t0, 10)


def test_c07_quantizer_scan():
    t0 = time.perf_counter()
    # dyadic ranges and grids keep every operation exact, so the bound is checked without rounding slack
    specs = [QuantizerSpec(-3.0, 5.0, 10), QuantizerSpec(0.0, 1.0, 1), QuantizerSpec(-0.5, 0.25, 16),
             QuantizerSpec(2.0**-20, 2.0**-20 + 2.0**-10, 7), QuantizerSpec(-1024.0, 1024.0, 20)]
    ok = True
    lines = []
    for s in specs:
        n = 2**20
        c = s.c_min + (s.c_max - s.c_min) * np.arange(n + 1) / n
        idx = quantize_array(s, c)
        err = np.abs(dequantize_array(s, idx) - c)
        pos = (c - s.c_min) / s.step
        boundary = pos == np.floor(pos)
        at_half = err == s.max_error
        within = bool(np.all(err <= s.max_error))
        equality_only_at_boundaries = bool(np.array_equal(at_half, boundary))
        top = quantize(s, s.c_max) == 2**s.k - 1 and idx[-1] == 2**s.k - 1
        ok &= within and equality_only_at_boundaries and top
        lines.append(f"k={s.k}: {n + 1} values, max err/(step/2) {err.max() / s.max_error:.3f}")
    check(7, "quantizer", ok, "; ".join(lines), time.perf_counter() - t0, 10)


def test_c08_range_coder():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    failures = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 64))
        syms = rng.integers(0, n, int(rng.integers(0, 40))).tolist()
        failures += decode_symbols(AdaptiveModel(n), encode_symbols(AdaptiveModel(n), syms),
                                   len(syms)) != syms
    worst = 0.0
    details = []
    for name, syms, n in (
        ("uniform16", rng.integers(0, 16, 100_000), 16),
        ("geometric", np.minimum(rng.geometric(0.2, 100_000) - 1, 255), 256),
        ("skewed", rng.choice(4, 100_000, p=[0.9, 0.05, 0.03, 0.02]), 4),
    ):
        syms = syms.tolist()
        data = encode_symbols(AdaptiveModel(n), syms)
        assert decode_symbols(AdaptiveModel(n), data, len(syms)) == syms
        counts = Counter(syms)
        h_bytes = -sum(c * math.log2(c / len(syms)) for c in counts.values()) / 8
        budget = 1.02 * h_bytes + 32
        worst = max(worst, len(data) / budget)
        details.append(f"{name} {len(data)} B vs entropy {h_bytes:.0f} B")
    ok = failures == 0 and worst <= 1.0
    check(8, "range coder", ok,
          f"10^4 roundtrips, {failures} failures; " + ", ".join(details),
          time.perf_counter() - t0, 60)


def test_c09_preconditioner_soft():
    t0 = time.perf_counter()
    r16 = cg_harness(64, 16)
    r32 = cg_harness(64, 32)
    ok = r16.increase <= 0.10 and r16.spd and r32.iters_compressed == r32.iters_exact and r32.spd
    elapsed = time.perf_counter() - t0
    detail = (f"exact {r16.iters_exact} iterations; k=16 {r16.iters_compressed} "
              f"({100 * r16.increase:+.1f}%, SPD {r16.spd}); k=32 {r32.iters_compressed}")
    ok, ok_time = record(9, "preconditioner (soft)", ok, detail, elapsed, 60, soft=True)
    if not (ok and ok_time):
        pytest.xfail(f"soft criterion not met: {detail}")


_DIGEST_SCRIPT = r"""
import hashlib
import numpy as np
from fezc.coding.codec import QT, TQ, compress, decompress
from fezc.mesh import CoefficientVector, Norm, build_hierarchy
from fezc.models import NOMINAL_PARAREAL, REFERENCE_CHECKPOINT, checkpoint_nopt, optimize_compression
from fezc.models.scenario import checkpoint_scenario, parallel_scenario
from fezc.transform import Family

h = build_hierarchy(2, 5)
x, y = h.vertex_coords.T
bump = 16 * x * (1 - x) * y * (1 - y)
noisy = bump + np.random.default_rng(7).integers(-512, 512, h.size) / 2.0**16
d = hashlib.sha256()
for u, fam, order, target, eps in [(bump, Family.HIERARCHICAL, TQ, Norm.LINF, 1e-3),
                                   (bump, Family.WAVELET, TQ, Norm.HMINUS1, 1e-4),
                                   (noisy, Family.WAVELET, QT, Norm.LINF, 1e-4),
                                   (noisy, Family.HIERARCHICAL, TQ, Norm.L2, 1e-5)]:
    b = compress(h, u, fam, order, eps=eps, target=target).to_bytes()
    d.update(b)
    d.update(decompress(b, h).values.tobytes())
print(d.hexdigest())
print(repr(checkpoint_nopt(checkpoint_scenario(REFERENCE_CHECKPOINT))))
print(repr(optimize_compression(parallel_scenario(NOMINAL_PARAREAL))))
"""

# inputs and checkpoint arithmetic use only exactly rounded IEEE operations,
# so these values must not change between machines
FROZEN_CODEC_DIGEST = "a24b46bfbc3ba469bfa889266c61b44de52930fb5a10b90b06b0d0818b157bb7"
FROZEN_CHECKPOINT = "CheckpointPlan(n_real=8.276084730551052, n=8, T=104243.4500606331)"


def test_c10_determinism():
    t0 = time.perf_counter()
    runs = [subprocess.run([sys.executable, "-c", _DIGEST_SCRIPT], capture_output=True, text=True,
                           check=True).stdout for _ in range(2)]
    lines = runs[0].splitlines()
    same = runs[0] == runs[1]
    frozen = lines[0] == FROZEN_CODEC_DIGEST and lines[1] == FROZEN_CHECKPOINT
    h = build_hierarchy(2, 5)
    u = sine(h)
    in_process = all(
        compress(h, u, fam, order, eps=1e-4).to_bytes() == compress(h, u.copy(), fam, order, eps=1e-4).to_bytes()
        for fam in Family for order in (TQ, QT))
    r1, r2 = cg_harness(16, 8, seed=3), cg_harness(16, 8, seed=3)
    ok = same and frozen and in_process and r1 == r2
    check(10, "determinism", ok,
          f"two processes identical: {same}; frozen digests match: {frozen}; "
          f"in-process repeat identical: {in_process}; harness repeat identical: {r1 == r2}",
          time.perf_counter() - t0, 60)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
