"""Command-line entry point: ``decayplane {verify,generate,analyze,band,significance}``.

Exit codes: 0 success, 1 failed verification, 2 usage, configuration or
I/O error. Values from ``--config`` are overridden by explicit flags.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .analysis import (
    band_table,
    fit_amplitude,
    gof_chi2,
    histogram_alpha,
    separation_significance,
    write_band,
    write_histogram,
    write_toys,
)
from .config import RunConfig, load_config
from .constants import N_EVENTS_DESK
from .errors import DecayPlaneError
from .events import format_real, read_events, write_events
from .generator import GenConfig, generate
from .models import hvt_alpha_pdf, qm_alpha_pdf
from .verify import FAULTS, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_OUT = {
    "generate": "events.csv",
    "analyze": "histogram.csv",
    "band": "band.csv",
    "significance": "toys.csv",
}


def _kv(key: str, value) -> str:
    return f"{key}={format_real(value) if isinstance(value, float) else value}"


def cmd_verify(cfg: RunConfig) -> int:
    checks = run_checks(cfg.a, cfg.quad_depth, cfg.inject_fault)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks if c.gating)
    print("verify=" + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_generate(cfg: RunConfig) -> int:
    gen = GenConfig(
        model=cfg.model,
        n_events=cfg.n_events if cfg.n_events is not None else 1000,
        seed=cfg.seed,
        chunk_size=cfg.chunk_size,
        a=cfg.a,
        hvt_pol_magnitude=cfg.hvt_pol_magnitude,
        sz_weights=cfg.sz_weights,
        workers=cfg.workers,
    )
    t0 = time.perf_counter()
    table = generate(gen)
    write_events(table, cfg.out or DEFAULT_OUT["generate"])
    wall = time.perf_counter() - t0
    print(_kv("events", len(table)))
    print(_kv("acceptance_rate", len(table) / table.n_attempts))
    print(f"wall_time_s={wall:.3f}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    if cfg.input is None:
        raise DecayPlaneError("analyze needs --input")
    hist = histogram_alpha(read_events(cfg.input), cfg.n_bins)
    write_histogram(hist, cfg.out or DEFAULT_OUT["analyze"])
    fit = fit_amplitude(hist)
    report = [
        ("n_events", int(hist.n_total)),
        ("n_bins", hist.n_bins),
        ("A_hat", fit.A_hat),
        ("sigma_A", fit.sigma_A),
        ("chi2_fit", fit.chi2),
        ("ndf_fit", fit.ndf),
        ("p_fit", fit.p_value),
    ]
    for name, model in (("qm", qm_alpha_pdf(cfg.a)), ("hvt", hvt_alpha_pdf())):
        chi2, ndf, p = gof_chi2(hist, model)
        report += [(f"chi2_{name}", chi2), (f"ndf_{name}", ndf), (f"p_{name}", p)]
    for key, value in report:
        print(_kv(key, value))
    return EXIT_OK


def cmd_band(cfg: RunConfig) -> int:
    n = cfg.n_events if cfg.n_events is not None else N_EVENTS_DESK
    band = band_table(n, cfg.n_bins, cfg.a)
    write_band(band, cfg.out or DEFAULT_OUT["band"])
    print(_kv("rows", len(band.expected_qm)))
    print(_kv("sum_qm", float(band.expected_qm.sum())))
    print(_kv("sum_hvt", float(band.expected_hvt.sum())))
    return EXIT_OK


def cmd_significance(cfg: RunConfig) -> int:
    n = cfg.n_events if cfg.n_events is not None else N_EVENTS_DESK
    summary = separation_significance(n, cfg.n_bins, cfg.n_toys, cfg.seed, cfg.a, cfg.workers)
    write_toys(summary, cfg.out or DEFAULT_OUT["significance"])
    print(_kv("n_events", n))
    print(_kv("n_toys", summary.n_toys))
    print(_kv("median_delta_chi2_qm", float(np.median(summary.delta_chi2_qm))))
    print(_kv("median_significance", summary.significance))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "band": cmd_band,
    "significance": cmd_significance,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decayplane", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--events", type=int, dest="n_events")
    p.add_argument("--bins", type=int, dest="n_bins")
    p.add_argument("--toys", type=int, dest="n_toys")
    p.add_argument("--model", type=str.upper, choices=["QM", "HVT"])
    p.add_argument("--a", type=float)
    p.add_argument("--out")
    p.add_argument("--input")
    p.add_argument("--workers", type=int)
    p.add_argument("--chunk-size", type=int, dest="chunk_size")
    p.add_argument("--pol", type=float, dest="hvt_pol_magnitude", help="HVT polarization magnitude")
    p.add_argument("--quad-depth", type=int, dest="quad_depth")
    p.add_argument("--inject-fault", choices=FAULTS, dest="inject_fault", help="self-test of verify")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    return cfg.replace(**overrides)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (DecayPlaneError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
