"""Seed-reproducible Monte Carlo generation of QM and HVT events.

Each event draws from its own counter-based stream (stream index = event
id), so event ``i`` depends only on ``(seed, i)``. The samplers work on
whole batches of event ids; the single-event functions are thin wrappers
that pass one id and read the block position from an :class:`RngStream`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .constants import A_LAMBDA
from .errors import DomainError, EnvelopeViolation
from .events import EventTable
from .models import TWO_PI, check_asymmetry, fold_alpha_angles, qm_density
from .rng import RngStream, uniforms

PI = math.pi
_PHI_MAX = np.nextafter(TWO_PI, 0.0)
POLE_CUTOFF = 1e-9
QM_BLOCKS_PER_ATTEMPT = 3
_MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class GenConfig:
    model: str = "QM"
    n_events: int = 1000
    seed: int = 0
    chunk_size: int = 65536
    a: float = A_LAMBDA
    hvt_pol_magnitude: float = 1.0
    sz_weights: tuple = (2.0 / 3.0, 1.0 / 3.0)  # (sz = +-1 combined, sz = 0)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", self.model.upper())
        if self.model not in ("QM", "HVT"):
            raise DomainError(f"unknown model {self.model!r}")
        if self.n_events < 1:
            raise DomainError("n_events must be >= 1")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be >= 1")
        if not 0.0 <= self.hvt_pol_magnitude <= 1.0:
            raise DomainError("hvt_pol_magnitude must lie in [0, 1]")
        if abs(sum(self.sz_weights) - 1.0) > 1e-12 or min(self.sz_weights) < 0.0:
            raise DomainError("sz weights must be non-negative and sum to 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        check_asymmetry(self.a)


def _phi(u: np.ndarray) -> np.ndarray:
    return np.minimum(TWO_PI * u, _PHI_MAX)


# -- batch samplers ---------------------------------------------------------


def batch_sz(seed: int, ids, weights=(2.0 / 3.0, 1.0 / 3.0), block: int = 0) -> np.ndarray:
    u = _rng.uniform_blocks(seed, ids, _rng.SZ, block)[:, 0]
    w_pm, w_0 = weights
    # [0, w_pm/2) -> -1, [w_pm/2, w_pm/2 + w_0) -> 0, rest -> +1
    return np.where(u < w_pm / 2, -1, np.where(u < w_pm / 2 + w_0, 0, 1)).astype(np.int64)


def batch_lambda_direction(seed: int, ids) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic Lambda direction; draws within the pole cutoff are redrawn."""
    ids = np.asarray(ids, dtype=np.uint64)
    cos_t = np.empty(ids.size)
    phi = np.empty(ids.size)
    todo = np.arange(ids.size)
    attempt = 0
    while todo.size:
        u = _rng.uniform_blocks(seed, ids[todo], _rng.LAMBDA_DIRECTION, attempt)
        c = 2.0 * u[:, 0] - 1.0
        ok = (1.0 - c) * (1.0 + c) > POLE_CUTOFF**2
        cos_t[todo[ok]] = c[ok]
        phi[todo[ok]] = _phi(u[ok, 1])
        todo = todo[~ok]
        attempt += 1
    return cos_t, phi


def _qm_attempt(seed, ids, sz, a, first_block):
    u = uniforms(seed, ids, _rng.QM_ANGLES, first_block, 5)
    th1 = PI * u[:, 0]
    ph1 = _phi(u[:, 1])
    th2 = PI * u[:, 2]
    ph2 = _phi(u[:, 3])
    accept = np.zeros(ids.size, dtype=bool)
    for s in (-1, 0, 1):
        sel = sz == s
        if not sel.any():
            continue
        dens = qm_density(s, a)
        env = dens.envelope()
        p = dens.pdf_theta(th1[sel], ph1[sel], th2[sel], ph2[sel])
        if np.any(p > env):
            raise EnvelopeViolation(f"density {p.max()} exceeds envelope {env} (sz={s})")
        accept[sel] = u[sel, 4] * env < p
    return np.cos(th1), ph1, np.cos(th2), ph2, accept


def batch_qm_angles(seed: int, ids, sz, a: float = A_LAMBDA):
    """Accept-reject sampling of (cos_m, phi_m, cos_p, phi_p) per event.

    Proposals are uniform in (theta, phi) for each pion, which is the
    reference measure of the QM density. Returns the four angle arrays
    and the total number of proposals.
    """
    ids = np.asarray(ids, dtype=np.uint64)
    sz = np.asarray(sz)
    out = np.empty((4, ids.size))
    todo = np.arange(ids.size)
    attempt = 0
    n_prop = 0
    while todo.size:
        if attempt >= _MAX_ATTEMPTS:
            raise RuntimeError("accept-reject failed to terminate")
        *ang, acc = _qm_attempt(seed, ids[todo], sz[todo], a, QM_BLOCKS_PER_ATTEMPT * attempt)
        n_prop += todo.size
        for k in range(4):
            out[k, todo[acc]] = ang[k][acc]
        todo = todo[~acc]
        attempt += 1
    return out[0], out[1], out[2], out[3], n_prop


def _orthonormal_pair(c, s, cp, sp):
    e1 = np.stack([c * cp, c * sp, -s])
    e2 = np.stack([-sp, cp, np.zeros_like(c)])
    return e1, e2


def _inverse_linear_cdf(u, k):
    """Invert the CDF of (1 + k x)/2 on [-1, 1]."""
    return (k - 2.0 + 4.0 * u) / (1.0 + np.sqrt((1.0 - k) ** 2 + 4.0 * k * u))


def _frame_angles(n):
    cos_t = np.clip(n[2], -1.0, 1.0)
    phi = np.arctan2(n[1], n[0])
    phi = np.where(phi < 0.0, phi + TWO_PI, phi)
    return cos_t, np.minimum(phi, _PHI_MAX)


def batch_hvt_angles(seed: int, ids, a: float = A_LAMBDA, pol: float = 1.0, first_block: int = 0):
    """Independent decays with P_Lambda = pol * P_hat and P_Lambdabar = -P_Lambda.

    P_hat is isotropic in the Lambda helicity frame; the Lambdabar vector
    carries the same components with opposite sign in its own frame.
    """
    if not 0.0 <= pol <= 1.0:
        raise DomainError("polarization magnitude must lie in [0, 1]")
    ids = np.asarray(ids, dtype=np.uint64)
    u = uniforms(seed, ids, _rng.HVT_ANGLES, first_block, 6)
    cp_ = 2.0 * u[:, 0] - 1.0
    sp_ = np.sqrt((1.0 - cp_) * (1.0 + cp_))
    psi = TWO_PI * u[:, 1]
    p_hat = np.stack([sp_ * np.cos(psi), sp_ * np.sin(psi), cp_])
    e1, e2 = _orthonormal_pair(cp_, sp_, np.cos(psi), np.sin(psi))
    k = a * pol

    def pion(axis, u_cos, u_az):
        x = _inverse_linear_cdf(u_cos, k)
        r = np.sqrt(np.clip((1.0 - x) * (1.0 + x), 0.0, None))
        az = TWO_PI * u_az
        return x * axis + r * (np.cos(az) * e1 + np.sin(az) * e2)

    c1, p1 = _frame_angles(pion(p_hat, u[:, 2], u[:, 3]))
    c2, p2 = _frame_angles(pion(-p_hat, u[:, 4], u[:, 5]))
    return c1, p1, c2, p2


# -- single-event API ---------------------------------------------------------


def sample_sz(rng: RngStream, weights=(2.0 / 3.0, 1.0 / 3.0)) -> int:
    block = rng.take_blocks(_rng.SZ, 1)
    return int(batch_sz(rng.seed, [rng.stream_index], weights, block)[0])


def sample_qm_angles(sz: int, rng: RngStream, a: float = A_LAMBDA):
    a = check_asymmetry(a)
    ids = np.array([rng.stream_index], dtype=np.uint64)
    szs = np.array([sz])
    for _ in range(_MAX_ATTEMPTS):
        first = rng.take_blocks(_rng.QM_ANGLES, QM_BLOCKS_PER_ATTEMPT)
        c1, p1, c2, p2, acc = _qm_attempt(rng.seed, ids, szs, a, first)
        if acc[0]:
            return float(c1[0]), float(p1[0]), float(c2[0]), float(p2[0])
    raise RuntimeError("accept-reject failed to terminate")


def sample_hvt_event(rng: RngStream, a: float = A_LAMBDA, pol: float = 1.0):
    a = check_asymmetry(a)
    first = rng.take_blocks(_rng.HVT_ANGLES, 3)
    c1, p1, c2, p2 = batch_hvt_angles(rng.seed, [rng.stream_index], a, pol, first)
    return float(c1[0]), float(p1[0]), float(c2[0]), float(p2[0])


# -- full generation ----------------------------------------------------------


def generate_range(config: GenConfig, start: int, stop: int) -> EventTable:
    """Events with ids in [start, stop)."""
    ids = np.arange(start, stop, dtype=np.uint64)
    sz = batch_sz(config.seed, ids, config.sz_weights)
    cos_l, phi_l = batch_lambda_direction(config.seed, ids)
    if config.model == "QM":
        c1, p1, c2, p2, n_prop = batch_qm_angles(config.seed, ids, sz, config.a)
    else:
        c1, p1, c2, p2 = batch_hvt_angles(config.seed, ids, config.a, config.hvt_pol_magnitude)
        n_prop = ids.size
    return EventTable(
        model=config.model,
        seed=config.seed,
        event_id=ids.astype(np.int64),
        sz=sz,
        cos_theta_lambda=cos_l,
        phi_lambda=phi_l,
        cos_theta_m=c1,
        phi_m=p1,
        cos_theta_p=c2,
        phi_p=p2,
        alpha=fold_alpha_angles(p1, p2),
        n_attempts=n_prop,
    )


def _ranges(n: int, chunk: int):
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def generate(config: GenConfig) -> EventTable:
    """Generate ``config.n_events`` events; independent of chunking and workers."""
    ranges = _ranges(config.n_events, config.chunk_size)
    if config.workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(generate_range, [config] * len(ranges), *zip(*ranges)))
    else:
        parts = [generate_range(config, s, e) for s, e in ranges]
    return EventTable.concatenate(parts)
