"""Experiment runner: parse a JSON config, dispatch a pipeline, write reports.

Subcommands: frame-bounds, ap-check, ergodic, smoothness, simulate, validate.
Exit codes: 0 verdict-pass, 2 verdict-fail, 1 error (malformed config gets a
line/field diagnostic).  Reports are byte-deterministic for fixed
(config, seed) and independent of --threads; wall-clock metadata goes to a
separate meta.json.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .ergodic import ap_frame_sum, autocorrelation_estimate, b2_norm_continuous, default_dt
from .frames import fiber_j_window, fiber_rayleigh_bounds, frame_bounds_bandlimited, gramian_fiber, q_lattice
from .process import sample_path, synthesize
from .reporting import Report, canonical_json, config_hash, svg_plot, write_csv, write_meta
from .smoothness import moment_divergence_alpha, smoothness_verdict
from .spectral import DensityFamily, SpectralMeasure
from .wavelet import AffineSystem, builtin_wavelet, littlewood_paley_grid, load_tabulated_wavelet, riesz_potential

KINDS = ("frame-bounds", "ap-check", "ergodic", "smoothness", "simulate")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Config parsing and static validation


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config is not valid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _num(cfg, field, diags, *, required=False, lo=None, hi=None, integer=False):
    if field.split(".")[-1] not in cfg:
        if required:
            diags.append(f"{field}: missing")
        return None
    v = cfg[field.split(".")[-1]]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        diags.append(f"{field}: expected a number, got {type(v).__name__}")
        return None
    if integer and int(v) != v:
        diags.append(f"{field}: expected an integer")
        return None
    if lo is not None and v < lo:
        diags.append(f"{field}: must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        diags.append(f"{field}: must be <= {hi}, got {v}")
    return v


def validate(cfg: dict) -> list:
    """Static config diagnostics only; never runs any numerics."""
    diags = []
    kind = cfg.get("kind")
    if kind not in KINDS:
        diags.append(f"kind: must be one of {list(KINDS)}, got {kind!r}")
    _num(cfg, "seed", diags, required=True, integer=True)
    _num(cfg, "replicas", diags, lo=1, integer=True)
    mode = cfg.get("mode", "complex")
    if mode not in ("complex", "real"):
        diags.append(f"mode: must be 'complex' or 'real', got {mode!r}")

    system = cfg.get("system", {})
    if not isinstance(system, dict):
        diags.append("system: must be an object")
        system = {}
    _num(system, "system.a", diags, lo=2, integer=True)
    _num(system, "system.b", diags, lo=1e-12)

    needs_wavelet = kind in ("frame-bounds", "ap-check", "smoothness")
    wav = cfg.get("wavelet")
    if wav is None:
        if needs_wavelet:
            diags.append("wavelet: missing")
    elif not isinstance(wav, dict) or "name" not in wav:
        diags.append("wavelet: must be an object with a 'name'")
    elif wav["name"] not in ("shannon", "meyer", "tabulated"):
        diags.append(f"wavelet.name: unknown wavelet {wav['name']!r}")
    elif wav["name"] == "tabulated":
        p = wav.get("path")
        if not p or not Path(p).exists():
            diags.append(f"wavelet.path: tabulated wavelet file not found: {p!r}")

    needs_measure = kind in ("ap-check", "ergodic", "smoothness", "simulate")
    meas = cfg.get("measure")
    if needs_measure and meas is None:
        diags.append("measure: missing")
    if meas is not None:
        try:
            SpectralMeasure.from_dict(meas)
        except (ValueError, KeyError, TypeError) as exc:
            diags.append(f"measure: {exc}")

    ra = _num(cfg, "riesz_alpha", diags)
    if ra is not None and not 0 < ra < 1:
        diags.append(f"riesz_alpha: must be in (0, 1), got {ra}")
    alphas = cfg.get("alphas", [cfg.get("alpha")] if "alpha" in cfg else None)
    if kind == "smoothness":
        if not alphas:
            diags.append("alpha: missing (or provide 'alphas')")
        else:
            for a in alphas:
                if not isinstance(a, (int, float)) or not 0 < a < 2:
                    diags.append(f"alpha: values must be in (0, 2), got {a!r}")

    grids = cfg.get("grids", {})
    if not isinstance(grids, dict):
        diags.append("grids: must be an object")
        grids = {}
    _num(grids, "grids.T", diags, lo=1e-9)
    _num(grids, "grids.N", diags, lo=1, integer=True)
    _num(grids, "grids.lambda_points", diags, lo=2, integer=True)
    for eps in grids.get("eps_list", []):
        if not isinstance(eps, (int, float)) or not 0 < eps < 1:
            diags.append(f"grids.eps_list: entries must be in (0, 1), got {eps!r}")
    jw = grids.get("j_window")
    if jw is not None and (not isinstance(jw, list) or len(jw) != 2
                           or jw[0] > jw[1]):
        diags.append(f"grids.j_window: expected [j_lo, j_hi] with j_lo <= j_hi, got {jw!r}")

    tols = cfg.get("tolerances", {})
    band = tols.get("ratio_band")
    if band is not None and (not isinstance(band, list) or len(band) != 2
                             or not band[0] < band[1]):
        diags.append(f"tolerances.ratio_band: expected [lo, hi] with lo < hi, got {band!r}")
    return diags


def _build_wavelet(cfg):
    wav = cfg["wavelet"]
    name = wav["name"]
    if name == "tabulated":
        return load_tabulated_wavelet(wav["path"])
    params = {k: v for k, v in wav.items() if k != "name"}
    return builtin_wavelet(name, **params)


def _build_system(cfg) -> AffineSystem:
    system = cfg.get("system", {})
    return AffineSystem(_build_wavelet(cfg), a=int(system.get("a", 2)),
                        b=float(system.get("b", 1.0)))


def _build_measure(cfg) -> SpectralMeasure:
    return SpectralMeasure.from_dict(cfg["measure"])


def _lambda_grid(grids) -> np.ndarray:
    lo = float(grids.get("lambda_min", 1e-3))
    hi = float(grids.get("lambda_max", 1e3))
    n = int(grids.get("lambda_points", 10_000))
    if grids.get("lambda_log", True):
        pos = np.logspace(math.log10(lo), math.log10(hi), n // 2)
    else:
        pos = np.linspace(lo, hi, n // 2)
    return np.concatenate([-pos[::-1], pos])


def _provenance(cfg, extra=None) -> dict:
    mu_note = None
    if cfg.get("measure"):
        try:
            mu = SpectralMeasure.from_dict(cfg["measure"])
            sup = mu.max_frequency
            mu_note = (f"spectral support truncated to [-{sup:g}, {sup:g}]; "
                       + ("family regeneration available"
                          if mu.family else "no declared family"))
        except Exception:
            mu_note = "measure failed to parse"
    prov = {
        "library_version": __version__,
        "seed": cfg.get("seed"),
        "mode": cfg.get("mode", "complex"),
        "config_sha256": config_hash(cfg),
        "grids": cfg.get("grids", {}),
        "tolerances": cfg.get("tolerances", {}),
        "truncation": mu_note,
        "sampling_condition_asserted": cfg.get("system", {}).get(
            "sampling_condition_asserted", False),
        "continuity_condition": "sampled on grids, not proven",
        "reduction": "replica results reduced in stream_id order",
    }
    if extra:
        prov.update(extra)
    return prov


def _pool_map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Experiment pipelines


def _run_frame_bounds(cfg, out, threads, plot):
    sysm = _build_system(cfg)
    grids = cfg.get("grids", {})
    tols = cfg.get("tolerances", {})
    grid = _lambda_grid(grids)
    fb = frame_bounds_bandlimited(sysm, grid, tol=float(tols.get("frame_tol", 1e-12)))
    estimates = {
        "lower": fb.lower, "upper": fb.upper,
        "arg_lower": fb.arg_lower, "arg_upper": fb.arg_upper,
        "is_frame": fb.is_frame, "n_grid": fb.n_grid,
    }
    verdict = fb.is_frame
    if cfg.get("riesz_alpha") is not None:
        alpha = float(cfg["riesz_alpha"])
        rsys = AffineSystem(riesz_potential(sysm.wavelet, alpha), a=sysm.a, b=sysm.b)
        rb = frame_bounds_bandlimited(rsys, grid, tol=float(tols.get("frame_tol", 1e-12)))
        estimates["riesz"] = {"alpha": alpha, "lower": rb.lower, "upper": rb.upper,
                              "is_frame": rb.is_frame}
        verdict = verdict and rb.is_frame

    lp = littlewood_paley_grid(sysm, grid)
    write_csv(out / "littlewood_paley.csv", ["lambda", "lp_sum"],
              zip(grid.tolist(), lp.tolist()))

    if grids.get("q_depth") is not None:
        depth = int(grids["q_depth"])
        q_max = float(grids.get("q_max", 16.0))
        jw = grids.get("j_window")
        n_pts = int(grids.get("n_fiber_points", 8))
        seed = int(cfg.get("seed", 0))
        qs = q_lattice(sysm, depth, q_max)
        pick = grid[np.linspace(0, len(grid) - 1, n_pts).astype(int)]
        rows = []

        def one(lam):
            window = (int(jw[0]), int(jw[1])) if jw is not None \
                else fiber_j_window(sysm, float(lam), qs)
            fib = gramian_fiber(sysm, float(lam), qs, window)
            rb = fiber_rayleigh_bounds(fib, seed=seed)
            return float(lam), rb.low, rb.high

        for lam, low, high in _pool_map(one, pick, threads):
            rows.append((lam, low, high))
        write_csv(out / "fibers.csv", ["lambda", "rayleigh_low", "rayleigh_high"], rows)
        lows = [r[1] for r in rows]
        highs = [r[2] for r in rows]
        estimates["fibers"] = {"min_low": min(lows), "max_high": max(highs),
                               "q_size": len(qs),
                               "j_window": list(jw) if jw is not None else "per-fiber"}

    if plot:
        svg_plot(out / "littlewood_paley.svg", np.abs(grid), {"lp sum": lp},
                 title="Littlewood-Paley sum", xlabel="|lambda|", ylabel="sum",
                 log_x=True)
    return verdict, estimates, {}


def _run_ap_check(cfg, out, threads, plot):
    sysm = _build_system(cfg)
    mu = _build_measure(cfg)
    grids = cfg.get("grids", {})
    tols = cfg.get("tolerances", {})
    N = int(grids.get("N", 2 ** 14))
    T = float(grids.get("T", 1e3))
    jw = grids.get("j_window", [-2, 6])
    replicas = int(cfg.get("replicas", 20))
    seed = int(cfg["seed"])
    mode = cfg.get("mode", "complex")
    band = tols.get("ratio_band", [0.9, 1.1])
    min_pass = int(tols.get("min_pass", max(1, replicas - 2)))
    rel_tol = float(tols.get("rel_tol", 0.1))
    dt = grids.get("dt")

    def one(r):
        proc = synthesize(mu, seed, r, mode=mode)
        res = ap_frame_sum(proc, sysm, (int(jw[0]), int(jw[1])), N, T,
                           dt=dt, rel_tol=rel_tol)
        return res

    results = _pool_map(one, range(replicas), threads)
    rows = []
    ratios = []
    for r, res in enumerate(results):
        ratio = res.middle / res.b2_estimate if res.b2_estimate else float("inf")
        ratios.append(ratio)
        rows.append((r, res.b2_estimate, res.middle, ratio,
                     band[0] <= ratio <= band[1]))
    write_csv(out / "sandwich.csv",
              ["replica", "b2_estimate", "middle", "ratio", "in_band"], rows)
    passes = sum(1 for row in rows if row[4])
    verdict = passes >= min_pass
    estimates = {
        "bounds": list(results[0].bounds),
        "ratios": ratios,
        "passes": passes,
        "min_pass": min_pass,
        "ratio_band": list(band),
        "cesaro_gap_max": max(r.cesaro_gap for r in results),
        "n_window_note": "inner Cesaro limit realized at largest N before the j-sum",
    }
    if plot:
        svg_plot(out / "ratios.svg", list(range(replicas)), {"middle/b2": ratios},
                 title="Sandwich ratio per replica", xlabel="replica", ylabel="ratio")
    return verdict, estimates, {}


def _run_ergodic(cfg, out, threads, plot):
    mu = _build_measure(cfg)
    grids = cfg.get("grids", {})
    tols = cfg.get("tolerances", {})
    T = float(grids.get("T", 1e3))
    taus = [float(t) for t in grids.get("taus", [0.0, 1.0, 2.0])]
    replicas = int(cfg.get("replicas", 20))
    seed = int(cfg["seed"])
    mode = cfg.get("mode", "complex")
    sigmas = float(tols.get("sigmas", 3.0))
    min_pass = int(tols.get("min_pass", max(1, replicas - 2)))
    shrink_need = float(tols.get("se_shrink", 1.3))
    dt = grids.get("dt")

    targets = {tau: complex(np.conj(complex(mu.covariance_fn()(tau)))) for tau in taus}

    def one(r):
        proc = synthesize(mu, seed, r, mode=mode)
        ests = {tau: autocorrelation_estimate(proc, tau, T, dt=dt) for tau in taus}
        se_T = ests[taus[-1]].se
        est_2T = autocorrelation_estimate(proc, taus[-1], 2 * T, dt=dt)
        trace = b2_norm_continuous(proc, [T / 4, T / 2, T],
                                   dt if dt else default_dt(proc))
        return ests, se_T, est_2T.se, trace

    results = _pool_map(one, range(replicas), threads)
    rows = []
    hits = {tau: 0 for tau in taus}
    shrinks = []
    for r, (ests, se_T, se_2T, trace) in enumerate(results):
        for tau in taus:
            e = ests[tau]
            hit = abs(e.value - targets[tau]) <= sigmas * max(e.se, 1e-300)
            hits[tau] += int(hit)
            rows.append((r, tau, e.value.real, e.value.imag,
                         targets[tau].real, e.se, hit))
        shrinks.append(se_T / se_2T if se_2T > 0 else float("inf"))
    write_csv(out / "autocorr.csv",
              ["replica", "tau", "est_re", "est_im", "target_re", "se", "hit"], rows)
    trace0 = results[0][3]
    write_csv(out / "b2_trace.csv", ["horizon", "partial", "se"],
              [(h, p, trace0.se) for h, p in zip(trace0.horizons, trace0.partials)])
    shrink_med = float(np.median(shrinks))
    coverage_ok = all(hits[tau] >= min_pass for tau in taus)
    verdict = coverage_ok and shrink_med >= shrink_need
    estimates = {
        "hits": {str(tau): hits[tau] for tau in taus},
        "min_pass": min_pass,
        "se_shrink_median": shrink_med,
        "se_shrink_required": shrink_need,
        "b2_final": trace0.estimate,
        "b2_cauchy_gap": trace0.cauchy_gap,
    }
    if plot:
        svg_plot(out / "b2_trace.svg", trace0.horizons, {"partial": trace0.partials},
                 title="Finite-power norm estimate", xlabel="T", ylabel="(1/2T) int |X|^2")
    return verdict, estimates, {}


def _run_smoothness(cfg, out, threads, plot):
    sysm = _build_system(cfg)
    mu = _build_measure(cfg)
    grids = cfg.get("grids", {})
    alphas = [float(a) for a in cfg.get("alphas", [cfg.get("alpha", 0.5)])]
    seed = int(cfg["seed"])
    mode = cfg.get("mode", "complex")
    N = int(grids.get("N", 4096))
    jw = grids.get("j_window")
    eps_list = grids.get("eps_list", [2.0 ** -k for k in range(1, 7)])
    window = grids.get("h_window")
    eps0 = grids.get("h_eps0")
    window = float(window) if window is not None else None
    eps0 = float(eps0) if eps0 is not None else None

    proc = synthesize(mu, seed, 0, mode=mode)

    def one(alpha):
        return smoothness_verdict(
            mu, proc, sysm, alpha,
            j_window=None if jw is None else (int(jw[0]), int(jw[1])),
            N=N, eps_list=eps_list, window=window, eps0=eps0)

    reports = _pool_map(one, alphas, threads)
    rows = []
    for alpha, rep in zip(alphas, reports):
        rows.append((
            alpha, rep.moment_value,
            rep.cov_integral.value if rep.cov_integral else float("nan"),
            rep.second_diff.value,
            rep.weighted_pure.value if rep.weighted_pure else float("nan"),
            rep.weighted_shifted.value if rep.weighted_shifted else float("nan"),
            rep.verdicts["moment"], rep.verdicts["cov_integral"],
            rep.verdicts["second_difference"], rep.verdicts["weighted"],
            rep.consistent))
    write_csv(out / "alpha_sweep.csv",
              ["alpha", "moment", "cov_int", "sd_int", "weighted_pure",
               "weighted_shifted", "v_moment", "v_cov", "v_sd", "v_weighted",
               "consistent"], rows)
    estimates = {"reports": {f"{a:g}": rep.as_dict() for a, rep in zip(alphas, reports)}}
    verdict = all(rep.consistent for rep in reports)
    if cfg.get("boundary") and mu.family is not None:
        expected = float(cfg["boundary"].get("expected_alpha"))
        est = moment_divergence_alpha(mu.family)
        estimates["boundary"] = {"expected_alpha": expected, "estimated_alpha": est,
                                 "within": abs(est - expected) <= float(
                                     cfg["boundary"].get("tolerance", 0.1))}
        verdict = verdict and estimates["boundary"]["within"]
    if plot:
        svg_plot(out / "alpha_sweep.svg", alphas,
                 {"moment": [r.moment_value for r in reports],
                  "second difference": [r.second_diff.value for r in reports]},
                 title="Smoothness criteria", xlabel="alpha", ylabel="value", log_y=True)
    return verdict, estimates, {}


def _run_simulate(cfg, out, threads, plot):
    mu = _build_measure(cfg)
    grids = cfg.get("grids", {})
    seed = int(cfg["seed"])
    mode = cfg.get("mode", "complex")
    t_min = float(grids.get("t_min", 0.0))
    t_max = float(grids.get("t_max", 100.0))
    n_t = int(grids.get("n_t", 1001))
    times = np.linspace(t_min, t_max, n_t)
    proc = synthesize(mu, seed, int(cfg.get("stream_id", 0)), mode=mode)
    values = sample_path(proc, times)
    write_csv(out / "path.csv", ["t", "re", "im"],
              zip(times.tolist(), values.real.tolist(), values.imag.tolist()))
    estimates = {
        "n_samples": n_t,
        "empirical_power": float(np.mean(np.abs(values) ** 2)),
        "total_mass": mu.total_mass,
    }
    if plot:
        svg_plot(out / "path.svg", times, {"re": values.real, "im": values.imag},
                 title="Sample path", xlabel="t", ylabel="X(t)")
    return True, estimates, {}


_RUNNERS = {
    "frame-bounds": _run_frame_bounds,
    "ap-check": _run_ap_check,
    "ergodic": _run_ergodic,
    "smoothness": _run_smoothness,
    "simulate": _run_simulate,
}


def run(config, *, threads=None, out_dir=None, plot=False) -> int:
    """Run the experiment a config describes; returns the process exit code."""
    started = time.time()
    if isinstance(config, (str, os.PathLike)):
        try:
            cfg = load_config(config)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        cfg = config
    diags = validate(cfg)
    if diags:
        for d in diags:
            print(f"config error: {d}", file=sys.stderr)
        return 1
    threads = threads or os.cpu_count() or 1
    out = Path(out_dir) if out_dir else Path(cfg.get("output", {}).get("dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    try:
        verdict, estimates, traces = _RUNNERS[cfg["kind"]](cfg, out, threads, plot)
    except (ValueError, RuntimeError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = Report(kind=cfg["kind"], verdict=bool(verdict), estimates=estimates,
                    provenance=_provenance(cfg), traces=traces)
    report.write(out / "report.json")
    write_meta(out / "meta.json", started, time.time())
    print(f"{cfg['kind']}: {'pass' if verdict else 'FAIL'} "
          f"(report: {out / 'report.json'})")
    return 0 if verdict else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="apframe",
        description="Affine AP-frame and fractional-smoothness experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in KINDS + ("validate",):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: logical cores)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--plot", action="store_true", help="also write SVG plots")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        diags = validate(cfg)
        for d in diags:
            print(d)
        if not diags:
            print("config ok")
        return 0 if not diags else 1

    if cfg.get("kind") != args.command:
        print(f"error: config kind {cfg.get('kind')!r} does not match "
              f"subcommand {args.command!r}", file=sys.stderr)
        return 1
    return run(cfg, threads=args.threads, out_dir=args.out, plot=args.plot)


if __name__ == "__main__":
    sys.exit(main())
