"""Acceptance criteria, one test each, at the stated tolerances and runtime budgets.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion appears in the terminal summary.
"""
import hashlib
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from decayplane.analysis import band_table, fit_amplitude, gof_chi2, histogram_alpha, separation_significance
from decayplane.generator import GenConfig, generate
from decayplane.kinematics import build_lab_event, decay_plane_alpha
from decayplane.models import (
    PI,
    AlphaPdf,
    fold_alpha_pdf,
    qm_alpha_pdf,
    qm_phi_marginal,
    qm_phi_pdf,
)
from decayplane.spinalg import dwave_joint_density, multipole_from_density, reference_multipole_table

A = 0.642
AMP = 4 * A * A / (3 * PI**3)
FROZEN_SIGNIFICANCE = 35.21460905783067


def test_c1_multipole_table(report):
    t0 = time.perf_counter()
    table = multipole_from_density(dwave_joint_density(1)).as_table()
    dev = np.abs(table - reference_multipole_table())
    elapsed = time.perf_counter() - t0
    n_ok = int(np.count_nonzero(dev <= 1e-14))
    passed = dev.max() <= 1e-14 and elapsed < 1.0
    report(1, "multipole table, 16 entries within 1e-14", passed,
           f"{n_ok}/16 entries match, max_dev={dev.max():.3e}, {elapsed:.2f}s")
    assert passed


def test_c2_fold_closed_forms(report):
    t0 = time.perf_counter()
    alpha = np.linspace(0.0, PI, 101)
    f_pm = fold_alpha_pdf(lambda x, y: qm_phi_pdf(x, y, A), alpha)
    d_pm = np.abs(f_pm - (1 / PI + 6 * A * A / (5 * PI**3) * np.cos(alpha))).max()
    f0 = fold_alpha_pdf(lambda x, y: qm_phi_marginal(x, y, 0, A), alpha)
    d_0 = np.abs(f0 - (1 / PI + 8 * A * A / (5 * PI**3) * np.cos(alpha))).max()
    mix = 2 / 3 * f_pm + 1 / 3 * f0
    d_mix = np.abs(mix - (1 / PI + AMP * np.cos(alpha))).max()
    elapsed = time.perf_counter() - t0
    passed = max(d_pm, d_0, d_mix) <= 1e-9 and abs(AMP - 0.0177240) < 5e-7 and elapsed < 10
    report(2, "numeric fold vs closed forms within 1e-9", passed,
           f"sz=+-1 {d_pm:.2e}, sz=0 {d_0:.2e}, mixture {d_mix:.2e}, A={AMP:.7f}, {elapsed:.2f}s")
    assert passed


def test_c3_hvt_uniformity(report):
    t0 = time.perf_counter()
    pvals = []
    for seed in range(1, 6):
        table = generate(GenConfig(model="HVT", n_events=1_000_000, seed=seed))
        pvals.append(gof_chi2(histogram_alpha(table, 40), AlphaPdf(0.0))[2])
    elapsed = time.perf_counter() - t0
    passed = min(pvals) > 0.001 and elapsed < 30
    report(3, "HVT fold flat, 5 seeds x 1e6 events, p > 0.001", passed,
           "p=" + ",".join(f"{p:.3f}" for p in pvals) + f", {elapsed:.1f}s")
    assert passed


def test_c4_generator_fidelity(report):
    t0 = time.perf_counter()
    hist = histogram_alpha(generate(GenConfig(n_events=1_000_000, seed=2024)), 40)
    p = gof_chi2(hist, qm_alpha_pdf(A))[2]
    fit = fit_amplitude(hist)
    within = abs(fit.A_hat - 0.0177240) < 3 * fit.sigma_A
    pulls = []
    for k in range(200):
        f = fit_amplitude(histogram_alpha(generate(GenConfig(n_events=100_000, seed=10_000 + k)), 40))
        pulls.append((f.A_hat - AMP) / f.sigma_A)
    pulls = np.array(pulls)
    mean, width = pulls.mean(), pulls.std(ddof=1)
    elapsed = time.perf_counter() - t0
    passed = p > 0.001 and within and abs(mean) < 0.15 and abs(width - 1) < 0.15 and elapsed < 120
    report(4, "QM generator: chi2, fitted amplitude, pulls", passed,
           f"p={p:.3f}, A_hat={fit.A_hat:.5f}+-{fit.sigma_A:.5f}, pull mean={mean:.3f} "
           f"width={width:.3f}, {elapsed:.1f}s")
    assert passed


def test_c5_band(report):
    t0 = time.perf_counter()
    band = band_table(832000, 40)
    hvt_dev = np.abs(band.expected_hvt - 20800.0).max()
    excess = band.expected_qm[0] - band.expected_hvt[0]
    target = 832000 * AMP * math.sin(PI / 40)
    rel = abs(excess / target - 1)
    elapsed = time.perf_counter() - t0
    passed = hvt_dev < 1e-9 and rel <= 1e-6 and elapsed < 1
    report(5, "band: HVT 20800 per bin, first-bin excess", passed,
           f"max|HVT-20800|={hvt_dev:.1e}, excess={excess:.4f} rel_dev={rel:.1e}, {elapsed:.3f}s")
    assert passed


def test_c6_geometric_consistency(report):
    t0 = time.perf_counter()
    table = generate(GenConfig(n_events=12_000, seed=77))
    worst, n = 0.0, 0
    for e in table:
        if n == 10_000:
            break
        if 1.0 - e.cos_theta_lambda**2 < 1e-12:  # sin(theta) < 1e-6
            continue
        prot, pim, _, pip = build_lab_event(e)
        worst = max(worst, abs(decay_plane_alpha((prot + pim).p, pim.p, pip.p) - e.alpha))
        n += 1
    elapsed = time.perf_counter() - t0
    passed = n == 10_000 and worst <= 1e-9 and elapsed < 5
    report(6, "lab-frame plane angle equals folded azimuths", passed,
           f"{n} events, max_dev={worst:.2e}, {elapsed:.2f}s")
    assert passed


def _cli(tmp_path, *args):
    res = subprocess.run([sys.executable, "-m", "decayplane", *args], capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0, res.stderr
    return res.stdout


def _sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_c7_determinism(report, tmp_path):
    t0 = time.perf_counter()
    gen = ["generate", "--model", "qm", "--events", "100000", "--seed", "7", "--chunk-size", "10000"]
    sig = ["significance", "--events", "832000", "--toys", "1000", "--seed", "1"]
    hashes = {"gen": set(), "sig": set()}
    summaries = set()
    for run, workers in enumerate(["1", "1", "4"]):
        _cli(tmp_path, *gen, "--workers", workers, "--out", f"ev{run}.csv")
        out = _cli(tmp_path, *sig, "--workers", workers, "--out", f"toys{run}.csv")
        hashes["gen"].add(_sha(tmp_path / f"ev{run}.csv"))
        hashes["sig"].add(_sha(tmp_path / f"toys{run}.csv"))
        summaries.add(out)
    elapsed = time.perf_counter() - t0
    passed = len(hashes["gen"]) == len(hashes["sig"]) == len(summaries) == 1 and elapsed < 60
    report(7, "byte-identical generate/significance, repeats and workers 1/4", passed,
           f"distinct hashes gen={len(hashes['gen'])} sig={len(hashes['sig'])}, {elapsed:.1f}s")
    assert passed


def test_c8_frozen_significance(report):
    t0 = time.perf_counter()
    z = separation_significance(832000, 40, 1000).significance
    elapsed = time.perf_counter() - t0
    passed = z == FROZEN_SIGNIFICANCE
    report(8, "median separation at 832000 events, 40 bins, 1000 toys (frozen)", passed,
           f"Z={z!r} (frozen {FROZEN_SIGNIFICANCE!r}), {elapsed:.2f}s")
    assert passed
