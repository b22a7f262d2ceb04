"""Flat ``key = value`` scenario files and parameter sweeps."""

from __future__ import annotations

import csv
import math
import unicodedata
from dataclasses import fields

import numpy as np

from ..errors import UsageError
from .checkpoint import CheckpointScenario, checkpoint_nopt, checkpoint_runtime
from .parareal import ParallelScenario, efficiency, optimize_compression

# spellings accepted for each field
_ALIASES = {
    "rho": ("ρ", "rho"),
    "dc": ("Δ_C", "Delta_C", "dc", "delta_c"),
    "T_R": ("T_R",),
}


def _canonical(key: str) -> str:
    key = unicodedata.normalize("NFC", key.strip())
    for name, spellings in _ALIASES.items():
        if key in spellings:
            return name
    return key


def parse_scenario_text(text: str) -> dict[str, float]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = _canonical(key)
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"line {lineno}: {key} is not a number: {value.strip()!r}") from None
    return out


def _build(cls, params: dict):
    names = {f.name for f in fields(cls)}
    unknown = set(params) - names
    if unknown:
        raise UsageError(f"unknown {cls.__name__} keys: {', '.join(sorted(unknown))}")
    try:
        return cls(**params)
    except TypeError as exc:
        raise UsageError(f"incomplete {cls.__name__}: {exc}") from None


def checkpoint_scenario(params: dict) -> CheckpointScenario:
    params = dict(params)
    if "T_R" in params:
        t_r = params.pop("T_R")
        if "T_DS" in params and not math.isclose(t_r, params["T_CP"] + params["T_DS"]):
            raise UsageError("T_R must equal T_CP + T_DS")
        params["T_DS"] = t_r - params.get("T_CP", 0.0)
    return _build(CheckpointScenario, params)


def parallel_scenario(params: dict) -> ParallelScenario:
    params = dict(params)
    if "N" in params:
        params["N"] = int(params["N"])
    return _build(ParallelScenario, params)


def load_scenario(path, kind: str):
    with open(path, encoding="utf-8") as fh:
        params = parse_scenario_text(fh.read())
    return params, (checkpoint_scenario if kind == "checkpoint" else parallel_scenario)(params)


def parse_sweep(arg: str) -> tuple[str, np.ndarray]:
    """``key=lo:hi:steps`` (linear) or ``key=lo:hi:steps:log``."""
    try:
        key, rng = arg.split("=", 1)
        parts = rng.split(":")
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        spacing = parts[3] if len(parts) > 3 else "lin"
        if len(parts) > 4 or spacing not in ("lin", "log"):
            raise ValueError
    except (ValueError, IndexError):
        raise UsageError(f"sweep must look like key=lo:hi:steps[:log], got {arg!r}") from None
    if steps < 1:
        raise UsageError("sweep needs at least one step")
    if spacing == "log":
        if lo <= 0 or hi <= 0:
            raise UsageError("logarithmic sweep bounds must be positive")
        values = np.geomspace(lo, hi, steps)
    else:
        values = np.linspace(lo, hi, steps)
    return _canonical(key), values


CHECKPOINT_COLUMNS = ("n_real", "n", "T")
PARAREAL_COLUMNS = ("dc", "J", "T_par", "E", "J_uncompressed", "T_uncompressed", "E_uncompressed",
                    "improvement")


def checkpoint_row(s: CheckpointScenario) -> list:
    p = checkpoint_nopt(s)
    return [p.n_real, p.n, p.T]


def parareal_row(s: ParallelScenario) -> list:
    p = optimize_compression(s)
    return [p.dc, p.J, p.T_par, p.E, p.J_uncompressed, p.T_uncompressed,
            efficiency(s.with_dc(0.0)), p.improvement]


def sweep(kind: str, params: dict, key: str, values) -> tuple[list[str], list[list]]:
    """Evaluate the planner at every sweep value.

    For checkpoint scenarios ``key == "n"`` tabulates ``T(n)`` itself.
    """
    rows = []
    if kind == "checkpoint":
        if key == "n":
            s = checkpoint_scenario(params)
            ns = np.unique(np.round(values).astype(int))
            return ["n", "T"], [[int(n), checkpoint_runtime(s, n)] for n in ns]
        header = [key, *CHECKPOINT_COLUMNS]
        for v in values:
            rows.append([float(v), *checkpoint_row(checkpoint_scenario({**params, key: float(v)}))])
    else:
        header = [key, *PARAREAL_COLUMNS]
        for v in values:
            rows.append([float(v), *parareal_row(parallel_scenario({**params, key: float(v)}))])
    return header, rows


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])
