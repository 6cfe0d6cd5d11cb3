"""Histogramming, amplitude fits and toy-ensemble significance for W(alpha)."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import A_LAMBDA, N_BINS, N_EVENTS_DESK
from .errors import DegenerateFit, DomainError, EmptyInput
from .events import EventTable, format_real
from .models import AlphaPdf, hvt_alpha_pdf, qm_alpha_pdf
from .rng import RngStream

PI = math.pi


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray  # float counts are allowed for Asimov (expected) inputs

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    @property
    def n_total(self) -> float:
        return self.counts.sum()


def alpha_edges(n_bins: int) -> np.ndarray:
    if n_bins < 2:
        raise DomainError("n_bins must be >= 2")
    return np.linspace(0.0, PI, n_bins + 1)


def histogram_alpha(events, n_bins: int = N_BINS) -> Histogram:
    """Uniform binning of alpha on [0, pi]; alpha = pi goes to the last bin.

    ``events`` may be an :class:`EventTable`, an iterable of events, or an
    array of alpha values.
    """
    if isinstance(events, EventTable):
        alpha = events.alpha
    elif isinstance(events, np.ndarray):
        alpha = events
    else:
        alpha = np.array([e.alpha for e in events], dtype=float)
    if alpha.size == 0:
        raise EmptyInput("no events to histogram")
    if np.any(alpha < 0.0) or np.any(alpha > PI):
        raise DomainError("alpha outside [0, pi]")
    edges = alpha_edges(n_bins)
    idx = np.minimum((alpha * (n_bins / PI)).astype(np.int64), n_bins - 1)
    return Histogram(edges, np.bincount(idx, minlength=n_bins).astype(np.int64))


def expected_counts(model: AlphaPdf, n_events: float, n_bins: int = N_BINS) -> np.ndarray:
    """Per-bin expectation ``n_events * integral of W over the bin``."""
    if n_events < 1:
        raise DomainError("n_events must be >= 1")
    return n_events * model.bin_probabilities(alpha_edges(n_bins))


@dataclass(frozen=True)
class BandTable:
    edges: np.ndarray
    expected_qm: np.ndarray
    expected_hvt: np.ndarray

    @property
    def err_qm(self) -> np.ndarray:
        return np.sqrt(self.expected_qm)

    @property
    def err_hvt(self) -> np.ndarray:
        return np.sqrt(self.expected_hvt)

    def rows(self):
        for i in range(len(self.expected_qm)):
            yield (
                self.edges[i],
                self.edges[i + 1],
                self.expected_qm[i],
                self.expected_hvt[i],
                self.err_qm[i],
                self.err_hvt[i],
            )


def band_table(n_events: float = N_EVENTS_DESK, n_bins: int = N_BINS, a: float = A_LAMBDA) -> BandTable:
    """Expected QM and HVT counts with Poisson errors per alpha bin."""
    return BandTable(
        alpha_edges(n_bins),
        expected_counts(qm_alpha_pdf(a), n_events, n_bins),
        expected_counts(hvt_alpha_pdf(), n_events, n_bins),
    )


@dataclass(frozen=True)
class FitResult:
    A_hat: float
    sigma_A: float
    chi2: float
    ndf: int
    p_value: float


def _bin_shapes(n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    edges = alpha_edges(n_bins)
    return np.diff(edges) / PI, np.diff(np.sin(edges))


def fit_amplitude(hist: Histogram) -> FitResult:
    """Least-squares fit of A in W = 1/pi + A cos(alpha).

    chi2(A) = sum (n_i - N e_i(A))^2 / (N e_i(0)); the model is linear in
    A so the minimum is closed-form. N is the observed total.
    """
    counts = np.asarray(hist.counts, dtype=float)
    n = counts.sum()
    if n <= 0:
        raise DegenerateFit("all bins are empty")
    e0, s = _bin_shapes(len(counts))
    var = n * e0
    if var.min() < 10.0:
        warnings.warn("expected bin content below 10; chi2 approximation is poor", stacklevel=2)
    curvature = np.sum((n * s) ** 2 / var)
    a_hat = np.sum((counts - n * e0) * n * s / var) / curvature
    a_hat = float(np.clip(a_hat, -1.0 / PI, 1.0 / PI))
    chi2 = float(np.sum((counts - n * (e0 + a_hat * s)) ** 2 / var))
    ndf = len(counts) - 2
    return FitResult(a_hat, float(1.0 / math.sqrt(curvature)), chi2, ndf, float(stats.chi2.sf(chi2, ndf)))


def gof_chi2(hist: Histogram, model: AlphaPdf) -> tuple[float, int, float]:
    """Pearson chi2 of the histogram against a fixed W(alpha)."""
    counts = np.asarray(hist.counts, dtype=float)
    n = counts.sum()
    if n <= 0:
        raise EmptyInput("empty histogram")
    exp = expected_counts(model, n, len(counts))
    chi2 = float(np.sum((counts - exp) ** 2 / exp))
    ndf = len(counts) - 1
    return chi2, ndf, float(stats.chi2.sf(chi2, ndf))


@dataclass(frozen=True)
class ToyRecord:
    toy_id: int
    hypothesis: str
    chi2_qm: float
    chi2_hvt: float

    @property
    def delta_chi2(self) -> float:
        return self.chi2_hvt - self.chi2_qm


@dataclass(frozen=True)
class EnsembleSummary:
    n_toys: int
    delta_chi2_qm: np.ndarray  # toys drawn under QM
    delta_chi2_hvt: np.ndarray  # toys drawn under HVT (the null)
    toys: tuple
    significance: float


def _toy_stream(seed: int, toy: int, hypothesis: int) -> RngStream:
    return RngStream(seed, 2 * toy + hypothesis)


def _toy_block(n_events, n_bins, a, seed, toys) -> list[ToyRecord]:
    band = band_table(n_events, n_bins, a)
    exp = {"QM": band.expected_qm, "HVT": band.expected_hvt}
    records = []
    for toy in toys:
        for h, hyp in enumerate(("QM", "HVT")):
            counts = _toy_stream(seed, toy, h).generator().poisson(exp[hyp])
            c_qm = float(np.sum((counts - exp["QM"]) ** 2 / exp["QM"]))
            c_hvt = float(np.sum((counts - exp["HVT"]) ** 2 / exp["HVT"]))
            records.append(ToyRecord(toy, hyp, c_qm, c_hvt))
    return records


def separation_significance(
    n_events: float = N_EVENTS_DESK,
    n_bins: int = N_BINS,
    n_toys: int = 1000,
    seed: int = 1,
    a: float = A_LAMBDA,
    workers: int = 1,
) -> EnsembleSummary:
    """Median Gaussian-equivalent separation of QM from HVT.

    Each toy draws Poisson bin counts around the expectation of one
    hypothesis and records delta chi2 = chi2(HVT) - chi2(QM), both chi2
    taken against the fixed expected counts. With mu and sd the mean and
    standard deviation of delta chi2 over the HVT toys, the significance
    is (median over QM toys - mu) / sd, floored at 0.

    Toy ``k`` under each hypothesis has its own stream, so the result is
    the same for any ``workers``.
    """
    if n_toys < 100:
        raise DomainError("n_toys must be >= 100")
    if workers > 1:
        chunks = [range(s, min(s + 250, n_toys)) for s in range(0, n_toys, 250)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_toy_block, *zip(*[(n_events, n_bins, a, seed, c) for c in chunks]))
            records = [r for part in parts for r in part]
    else:
        records = _toy_block(n_events, n_bins, a, seed, range(n_toys))
    records.sort(key=lambda r: (r.toy_id, r.hypothesis != "QM"))
    deltas = {
        hyp: np.array([r.delta_chi2 for r in records if r.hypothesis == hyp]) for hyp in ("QM", "HVT")
    }
    null = deltas["HVT"]
    z = (np.median(deltas["QM"]) - null.mean()) / null.std(ddof=1)
    return EnsembleSummary(n_toys, deltas["QM"], deltas["HVT"], tuple(records), float(max(z, 0.0)))


# -- table output -------------------------------------------------------------


def write_histogram(hist: Histogram, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            fh.write(f"{format_real(lo)},{format_real(hi)},{c}\n")


def write_band(band: BandTable, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("bin_lo,bin_hi,expected_qm,expected_hvt,err_qm,err_hvt\n")
        for row in band.rows():
            fh.write(",".join(format_real(x) for x in row) + "\n")


def write_toys(summary: EnsembleSummary, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("toy_id,hypothesis,chi2_qm,chi2_hvt,delta_chi2\n")
        for r in summary.toys:
            fh.write(
                f"{r.toy_id},{r.hypothesis},{format_real(r.chi2_qm)},"
                f"{format_real(r.chi2_hvt)},{format_real(r.delta_chi2)}\n"
            )
