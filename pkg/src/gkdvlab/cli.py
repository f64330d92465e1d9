"""Batch front door: one experiment per invocation, reports on disk.

Config comes from an optional flat key=value file plus flag overrides; all
validation problems are reported together before any computation starts.
Outputs are deterministic for a fixed config and seed (canonical JSON, no
timestamps) and written atomically. Exit codes: 0 success, 2 invalid
config, 3 numerical failure (divergence or blow-up) with the diagnostic
report still written.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from . import littlewood_paley as lp
from .estimates import (EstimateReport, TrialEnsemble, l6_smallness_report,
                        verify_bernstein_linfty, verify_bilinear,
                        verify_interpolated, verify_multilinear,
                        verify_strichartz)
from .grid import Field, GridSpec, l2_norm, mixed_norm
from .io import atomic_write_text, canonical_json, save_path
from .norms import besov_report, critical_index, sobolev_report, xs_report
from .airy import free_solution
from .picard import (BlowUpError, PicardConfig, PicardDivergenceError,
                     amplitude_threshold, direct_solve, lipschitz_probe,
                     solve_picard)

KINDS = ("solve", "picard", "norms", "verify-strichartz", "verify-bilinear",
         "verify-multilinear", "verify-smallness", "lipschitz")

_DEFAULTS = {
    "length": 200.0,
    "points": 2048,
    "steps": 64,
    "T": 1.0,
    "p": 5.0,
    "seed": 0,
    "q": 6.0,
    "s": 0.0,
    "trials": 3,
    "estimate": "pair",
    "case": "near",
    "amplitude": 0.1,
    "levels": 4,
    "max_iters": 16,
    "contraction_target": 0.9,
    "tolerance": 1e-10,
    "workers": 1,
    "format": "json",
}


@dataclass
class RunConfig:
    kind: str
    length: float
    points: int
    dt: float
    steps: int
    p: float
    T: float
    seed: int
    band_lo: Optional[int]
    band_hi: Optional[int]
    outdir: str
    format: str
    q: float
    s: float
    trials: int
    estimate: str
    bilinear_form: bool
    case: str
    amplitude: float
    amplitude_bisect: bool
    delta_scale: float
    levels: int
    max_iters: int
    contraction_target: float
    tolerance: float
    workers: int

    def grid(self) -> GridSpec:
        return GridSpec(self.length, self.points, self.dt, self.steps)

    def echo(self) -> Dict:
        d = asdict(self)
        d["version"] = __version__
        return d


def _parse_config_file(path: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gkdvlab",
        description="experiments for the supercritical dispersive laboratory")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--outdir", default=None,
                    help="output directory (default $GKDVLAB_OUTDIR or .)")
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--dry-run", action="store_true")
    ap.add_argument("--length", type=float, default=None)
    ap.add_argument("--points", type=int, default=None)
    ap.add_argument("--dt", type=float, default=None)
    ap.add_argument("--steps", type=int, default=None)
    ap.add_argument("--p", type=float, default=None)
    ap.add_argument("--T", type=float, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--band-lo", type=int, default=None)
    ap.add_argument("--band-hi", type=int, default=None)
    ap.add_argument("--q", type=float, default=None)
    ap.add_argument("--s", type=float, default=None)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--estimate", choices=("pair", "bernstein", "interpolated"),
                    default=None)
    ap.add_argument("--bilinear-form", action="store_true",
                    help="interpolated estimate: use the two-factor form")
    ap.add_argument("--case", choices=("near", "far"), default=None)
    ap.add_argument("--amplitude", type=float, default=None)
    ap.add_argument("--amplitude-bisect", action="store_true")
    ap.add_argument("--delta-scale", type=float, default=None)
    ap.add_argument("--levels", type=int, default=None)
    ap.add_argument("--max-iters", type=int, default=None)
    ap.add_argument("--contraction-target", type=float, default=None)
    ap.add_argument("--tolerance", type=float, default=None)
    ap.add_argument("--workers", type=int, default=None)
    return ap


def _coerce(key: str, raw: str):
    kind = type(_DEFAULTS.get(key, ""))
    if key in ("band_lo", "band_hi"):
        return int(raw)
    if key in ("amplitude_bisect", "bilinear_form"):
        return raw.lower() in ("1", "true", "yes", "on")
    if key == "delta_scale":
        return float(raw)
    if kind is float:
        return float(raw)
    if kind is int:
        return int(raw)
    return raw


def resolve_config(argv: List[str]) -> tuple:
    """(RunConfig, dry_run) from argv; raises ValueError listing every
    problem at once."""
    ns = _build_parser().parse_args(argv)
    problems: List[str] = []
    file_vals: Dict = {}
    if ns.config:
        try:
            raw = _parse_config_file(ns.config)
        except OSError as e:
            raise ValueError(f"cannot read config file: {e}")
        for k, v in raw.items():
            if k not in _DEFAULTS and k not in ("dt", "band_lo", "band_hi",
                                                "outdir", "amplitude_bisect",
                                                "bilinear_form", "delta_scale"):
                problems.append(f"unknown config key {k!r}")
                continue
            try:
                file_vals[k] = _coerce(k, v)
            except ValueError:
                problems.append(f"config key {k!r}: cannot parse {v!r}")

    def pick(key, flag_val):
        if flag_val is not None:
            return flag_val
        if key in file_vals:
            return file_vals[key]
        return _DEFAULTS.get(key)

    length = pick("length", ns.length)
    points = pick("points", ns.points)
    steps = pick("steps", ns.steps)
    T = pick("T", ns.T)
    dt = ns.dt if ns.dt is not None else file_vals.get("dt")
    p = pick("p", ns.p)
    if T is not None and T <= 0:
        problems.append("T must be positive")
    if dt is not None and dt <= 0:
        problems.append("dt must be positive")
    if steps is not None and steps < 1:
        problems.append("steps must be >= 1")
    if length is not None and length <= 0:
        problems.append("length must be positive")
    if points is not None and (points < 16 or points & (points - 1)):
        problems.append("points must be a power of two, at least 16")
    if dt is not None and T is not None and steps and \
            abs(steps * dt - T) > 1e-9 * max(T, 1.0):
        problems.append("dt, steps and T are inconsistent (need T = steps*dt)")
    if dt is None and T is not None and steps:
        dt = T / steps
    if p is not None and p < 5.0:
        problems.append("p must be >= 5 (the supercritical scope of this laboratory)")
    seed = pick("seed", ns.seed)
    if seed is not None and seed < 0:
        problems.append("seed must be nonnegative")
    trials = pick("trials", ns.trials)
    if trials is not None and trials < 1:
        problems.append("trials must be >= 1")
    q = pick("q", ns.q)
    workers = pick("workers", ns.workers)
    if workers is not None and workers < 1:
        problems.append("workers must be >= 1")
    levels = pick("levels", ns.levels)
    if levels is not None and levels < 1:
        problems.append("levels must be >= 1")
    max_iters = pick("max_iters", ns.max_iters)
    if max_iters is not None and max_iters < 1:
        problems.append("max_iters must be >= 1")
    ct = pick("contraction_target", ns.contraction_target)
    if ct is not None and not (0 < ct < 1):
        problems.append("contraction_target must lie in (0, 1)")
    tol = pick("tolerance", ns.tolerance)
    if tol is not None and tol <= 0:
        problems.append("tolerance must be positive")
    amplitude = pick("amplitude", ns.amplitude)
    if amplitude is not None and amplitude <= 0:
        problems.append("amplitude must be positive")
    band_lo = ns.band_lo if ns.band_lo is not None else file_vals.get("band_lo")
    band_hi = ns.band_hi if ns.band_hi is not None else file_vals.get("band_hi")
    if (band_lo is None) != (band_hi is None):
        problems.append("band-lo and band-hi must be given together")
    if band_lo is not None and band_hi is not None and band_lo > band_hi:
        problems.append("band-lo must not exceed band-hi")
    outdir = ns.outdir or file_vals.get("outdir") \
        or os.environ.get("GKDVLAB_OUTDIR") or "."
    fmt = pick("format", ns.format)
    if problems:
        raise ValueError("invalid configuration:\n  " + "\n  ".join(problems))
    cfg = RunConfig(
        kind=ns.kind, length=float(length), points=int(points),
        dt=float(dt), steps=int(steps), p=float(p), T=float(T),
        seed=int(seed), band_lo=band_lo, band_hi=band_hi,
        outdir=outdir, format=fmt, q=float(q), s=float(pick("s", ns.s)),
        trials=int(trials), estimate=pick("estimate", ns.estimate),
        bilinear_form=bool(ns.bilinear_form or
                           file_vals.get("bilinear_form", False)),
        case=pick("case", ns.case), amplitude=float(amplitude),
        amplitude_bisect=bool(ns.amplitude_bisect or
                              file_vals.get("amplitude_bisect", False)),
        delta_scale=float(ns.delta_scale if ns.delta_scale is not None
                          else file_vals.get("delta_scale", 1e-3)),
        levels=int(levels), max_iters=int(max_iters),
        contraction_target=float(ct), tolerance=float(tol),
        workers=int(workers))
    return cfg, ns.dry_run


def seeded_profile(grid: GridSpec, seed: int, amplitude: float = 1.0) -> Field:
    """Deterministic localized oscillating bump; the standard CLI data."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    center = grid.domain_length * rng.uniform(0.35, 0.65)
    width = grid.domain_length / 25.0
    carrier = 0.8 * (1.0 + 0.1 * rng.standard_normal())
    x = grid.x
    vals = amplitude * np.exp(-(((x - center) / width) ** 2)) \
        * np.cos(carrier * (x - center))
    return Field.from_values(grid, vals)


def _band(cfg: RunConfig, grid: GridSpec):
    if cfg.band_lo is None:
        return None
    return range(cfg.band_lo, cfg.band_hi + 1)


def _report_path(cfg: RunConfig, name: str) -> str:
    ext = "csv" if cfg.format == "csv" else "json"
    return os.path.join(cfg.outdir, f"{name}.{ext}")


def _write_estimate(cfg: RunConfig, rep: EstimateReport, name: str) -> str:
    rep.config["cli"] = cfg.echo()
    path = _report_path(cfg, name)
    if cfg.format == "csv":
        atomic_write_text(path, rep.to_csv())
    else:
        atomic_write_text(path, rep.to_json() + "\n")
    return path


def _write_json(cfg: RunConfig, payload: Dict, name: str) -> str:
    payload = dict(payload)
    payload["schema_version"] = 1
    payload["config"] = cfg.echo()
    path = os.path.join(cfg.outdir, f"{name}.json")
    atomic_write_text(path, canonical_json(payload) + "\n")
    return path


def _dry_run_plan(cfg: RunConfig) -> str:
    lines = [f"kind: {cfg.kind}"]
    grid = cfg.grid()
    band = _band(cfg, grid) or lp.default_band(grid)
    mem = (grid.num_steps + 1) * grid.num_points * 16 / 1e6
    lines.append(f"grid: L={grid.domain_length} N={grid.num_points} "
                 f"dt={grid.dt:.6g} K={grid.num_steps}")
    lines.append(f"bands: {len(band)} (z={band.start}..{band.stop - 1})")
    if cfg.kind.startswith("verify-"):
        lines.append(f"trials: {cfg.trials}")
    lines.append(f"path memory estimate: {mem:.1f} MB")
    lines.append(f"outputs: {cfg.outdir}")
    return "\n".join(lines)


def _run_solve(cfg: RunConfig) -> int:
    grid = cfg.grid()
    phi = seeded_profile(grid, cfg.seed, cfg.amplitude)
    try:
        path = direct_solve(phi, cfg.p)
    except BlowUpError as e:
        # overflow reports sup = inf, which strict json cannot carry
        sup = e.sup if math.isfinite(e.sup) else "overflow"
        _write_json(cfg, {"failure": "blow_up", "time": e.time, "sup": sup},
                    "solve-report")
        return 3
    means = np.real(path.spectral_matrix[:, 0])
    l2s = [l2_norm(s) for s in path.snapshots]
    save_path(path, os.path.join(cfg.outdir, "solve-path.bin"))
    _write_json(cfg, {
        "mass_drift": float(np.max(np.abs(means - means[0]))
                            * grid.domain_length),
        "l2_initial": l2s[0], "l2_final": l2s[-1],
        "l2_drift": max(abs(v - l2s[0]) for v in l2s),
        "sup_final": float(np.abs(path.snapshots[-1].values).max()),
    }, "solve-report")
    return 0


def _run_picard(cfg: RunConfig) -> int:
    grid = cfg.grid()
    phi = seeded_profile(grid, cfg.seed, cfg.amplitude)
    if cfg.amplitude_bisect:
        shape = seeded_profile(grid, cfg.seed, 1.0)
        thr = amplitude_threshold(shape, cfg.p, max_iters=cfg.max_iters,
                                  contraction_target=cfg.contraction_target)
        _write_json(cfg, {"amplitude_threshold": thr}, "picard-threshold")
        return 0
    pc = PicardConfig(cfg.p, cfg.T, cfg.max_iters, cfg.contraction_target,
                      phi, grid, stop_tolerance=cfg.tolerance)
    try:
        w, trace = solve_picard(pc)
    except PicardDivergenceError as e:
        atomic_write_text(os.path.join(cfg.outdir, "picard-trace.csv"),
                          e.trace.to_csv())
        _write_json(cfg, {"failure": "divergence",
                          "iterations": len(e.trace.rows)}, "picard-report")
        return 3
    atomic_write_text(os.path.join(cfg.outdir, "picard-trace.csv"),
                      trace.to_csv())
    ci = critical_index(cfg.p)
    _write_json(cfg, {
        "converged": trace.converged,
        "iterations": len(trace.rows),
        "alpha": trace.alpha,
        "ratios": trace.ratios,
        "w_final_norm": trace.rows[-1]["w_norm"] if trace.rows else 0.0,
        "s_p": ci.s_p,
    }, "picard-report")
    return 0


def _run_norms(cfg: RunConfig) -> int:
    grid = cfg.grid()
    phi = seeded_profile(grid, cfg.seed, cfg.amplitude)
    ci = critical_index(cfg.p)
    band = _band(cfg, grid)
    rb = besov_report(phi, ci.s_p, band)
    rs = sobolev_report(phi, ci.s_p, band)
    rx = xs_report(free_solution(phi), ci.s_p, band)
    _write_json(cfg, {"besov": rb.to_dict(), "sobolev": rs.to_dict(),
                      "free_path": rx.to_dict()}, "norms-report")
    return 0


def _run_lipschitz(cfg: RunConfig) -> int:
    grid = cfg.grid()
    phi = seeded_profile(grid, cfg.seed, cfg.amplitude)
    pc = PicardConfig(cfg.p, cfg.T, cfg.max_iters, cfg.contraction_target,
                      phi, grid, stop_tolerance=cfg.tolerance)
    records = []
    try:
        for level in range(cfg.levels):
            dphi = phi * (cfg.delta_scale * 0.5 ** level)
            ratio = lipschitz_probe(phi, dphi, pc)
            records.append({"level": level,
                            "delta_scale": cfg.delta_scale * 0.5 ** level,
                            "ratio": ratio})
    except PicardDivergenceError:
        _write_json(cfg, {"failure": "divergence", "records": records},
                    "lipschitz-report")
        return 3
    _write_json(cfg, {"records": records}, "lipschitz-report")
    return 0


def _run_estimates(cfg: RunConfig) -> int:
    ens = TrialEnsemble(cfg.seed, cfg.trials)
    if cfg.kind == "verify-strichartz":
        if cfg.estimate == "bernstein":
            rep = verify_bernstein_linfty(ens, cfg.p)
        elif cfg.estimate == "interpolated":
            rep = verify_interpolated(ens, cfg.q, cfg.p,
                                      bilinear=cfg.bilinear_form)
        else:
            rep = verify_strichartz(ens, cfg.q, cfg.s)
    elif cfg.kind == "verify-bilinear":
        rep = verify_bilinear(ens)
    else:
        rep = verify_multilinear(ens, cfg.p, cfg.case,
                                 num_points=cfg.points)
    _write_estimate(cfg, rep, cfg.kind.replace("verify-", "") + "-report")
    return 0


def _run_smallness(cfg: RunConfig) -> int:
    grid = cfg.grid()
    phi = seeded_profile(grid, cfg.seed, cfg.amplitude)
    rep = l6_smallness_report(phi, cfg.T, cfg.p)
    _write_json(cfg, rep, "smallness-report")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, dry = resolve_config(argv)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 2
    if dry:
        print(_dry_run_plan(cfg))
        return 0
    os.makedirs(cfg.outdir, exist_ok=True)
    if cfg.kind == "solve":
        return _run_solve(cfg)
    if cfg.kind == "picard":
        return _run_picard(cfg)
    if cfg.kind == "norms":
        return _run_norms(cfg)
    if cfg.kind == "lipschitz":
        return _run_lipschitz(cfg)
    if cfg.kind == "verify-smallness":
        return _run_smallness(cfg)
    return _run_estimates(cfg)


if __name__ == "__main__":
    sys.exit(main())
