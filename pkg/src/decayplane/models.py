"""Angular densities for the entangled (QM) and independent (HVT) pictures.

Measure convention for the QM four-angle density
-------------------------------------------------
The multipole expansion, with C0 = 2/pi and C1 = 2a/pi, is a normalized
density with respect to the flat measure dtheta1 dphi1 dtheta2 dphi2 on
[0, pi]^2 x [0, 2pi)^2; integrating it over theta1 and theta2 in that
measure gives the azimuthal density 1/(4pi^2) + ... with the reference
coefficients. Solid-angle weighting would rescale the correlation term
by (pi^2/8)^2 and the folded amplitude by pi^4/64. The QM density here
is therefore defined, sampled and marginalized in the flat (theta, phi)
measure. The HVT single-decay density is the physical solid-angle
density (1 + a P.p)/(4 pi); its folded distribution is flat either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .constants import A_LAMBDA
from .errors import DomainError, InvalidQuantumNumbers
from .spinalg import LM_PAIRS, MultipoleSet, dwave_joint_density, multipole_from_density, ylm

PI = math.pi
TWO_PI = 2.0 * math.pi

SZ_WEIGHTS = {1: 1.0 / 3.0, 0: 1.0 / 3.0, -1: 1.0 / 3.0}


def check_asymmetry(a: float) -> float:
    a = float(a)
    if not abs(a) <= 1.0:
        raise DomainError(f"asymmetry parameter a={a} must satisfy |a| <= 1")
    return a


def decay_constant(l: int, a: float) -> float:
    """C_l(0,0;0,0) for the weak decay: 2/pi for l=0, 2a/pi for l=1."""
    return {0: 2.0 / PI, 1: 2.0 * a / PI}[l]


@dataclass(frozen=True)
class AlphaPdf:
    """W(alpha) = 1/pi + A cos(alpha) on [0, pi]."""

    amplitude: float

    def __post_init__(self):
        if abs(self.amplitude) > 1.0 / PI + 1e-15:
            raise DomainError(f"|A| = {abs(self.amplitude)} > 1/pi gives a negative density")

    def __call__(self, alpha):
        return 1.0 / PI + self.amplitude * np.cos(alpha)

    def cdf(self, alpha):
        return np.asarray(alpha) / PI + self.amplitude * np.sin(alpha)

    def bin_probabilities(self, edges) -> np.ndarray:
        return np.diff(self.cdf(np.asarray(edges, dtype=float)))


def _check_phi(*phis) -> None:
    for phi in phis:
        arr = np.asarray(phi)
        if np.any(arr < 0.0) or np.any(arr >= TWO_PI) or np.any(~np.isfinite(arr)):
            raise DomainError("azimuth outside [0, 2 pi)")


def fold_alpha_angles(phi_m, phi_p):
    """Decay-plane angle from the two helicity-frame azimuths.

    s = phi_m + phi_p is folded into [0, pi]; the s = 2 pi boundary takes
    the lower branch (both give 0). Vectorized.
    """
    _check_phi(phi_m, phi_p)
    s = np.asarray(phi_m, dtype=float) + np.asarray(phi_p, dtype=float)
    out = np.select(
        [s <= PI, s <= TWO_PI, s <= 3.0 * PI],
        [s, TWO_PI - s, s - TWO_PI],
        4.0 * PI - s,
    )
    return float(out) if out.ndim == 0 else out


def qm_phi_pdf(phi_m, phi_p, a: float = A_LAMBDA):
    """Reference joint azimuthal density for sz = +-1."""
    _check_phi(phi_m, phi_p)
    a = check_asymmetry(a)
    phi_m = np.asarray(phi_m, dtype=float)
    phi_p = np.asarray(phi_p, dtype=float)
    return (
        1.0 / (4.0 * PI**2)
        + 3.0 * a / (20.0 * PI**3) * (np.cos(phi_m) + np.cos(phi_p))
        + 3.0 * a * a / (10.0 * PI**4) * np.cos(phi_m + phi_p)
    )


_BASIS_DIRS = [(PI / 2, 0.0), (PI / 2, PI / 2), (0.0, 0.0)]  # x, y, z


def multipole_sum(t: MultipoleSet, a: float, th1, ph1, th2, ph2):
    """Unnormalized four-angle shape: (1/4pi) sum C C conj(t) Y Y (complex)."""
    th1, ph1, th2, ph2 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (th1, ph1, th2, ph2)))
    total = np.zeros(th1.shape, dtype=complex)
    for l1, m1 in LM_PAIRS:
        y1 = ylm(l1, m1, th1, ph1)
        for l2, m2 in LM_PAIRS:
            coeff = np.conj(t[l1, l2, m1, m2])
            if coeff == 0:
                continue
            total += decay_constant(l1, a) * decay_constant(l2, a) * coeff * y1 * ylm(l2, m2, th2, ph2)
    return total / (4.0 * PI)


def gauss_legendre(lo: float, hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _chop(x: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    return np.where(np.abs(x) < tol, 0.0, x)


class AngularDensity:
    """Normalized four-angle density built from a joint multipole set.

    The density is with respect to dtheta1 dphi1 dtheta2 dphi2 (see the
    module docstring). Internally it is evaluated in the equivalent
    Cartesian form K [1 + a u.n1 + a v.n2 + a^2 n1.M.n2] with n the pion
    unit vector in its helicity frame.
    """

    def __init__(self, t: MultipoleSet, a: float = A_LAMBDA, n_norm: int = 64):
        self.t = t
        self.a = check_asymmetry(a)
        self.norm = self._normalization(n_norm)

        y00 = ylm(0, 0, 0.0, 0.0).real
        c0 = decay_constant(0, 1.0)
        k = c0 * c0 * y00 * y00 / (4.0 * PI)
        u = np.zeros(3)
        v = np.zeros(3)
        m = np.zeros((3, 3))
        for i, (th, ph) in enumerate(_BASIS_DIRS):
            u[i] = sum((np.conj(self.t[1, 0, mm, 0]) * ylm(1, mm, th, ph)).real for mm in (-1, 0, 1))
            v[i] = sum((np.conj(self.t[0, 1, 0, mm]) * ylm(1, mm, th, ph)).real for mm in (-1, 0, 1))
            for j, (th2, ph2) in enumerate(_BASIS_DIRS):
                m[i, j] = sum(
                    (np.conj(self.t[1, 1, m1, m2]) * ylm(1, m1, th, ph) * ylm(1, m2, th2, ph2)).real
                    for m1 in (-1, 0, 1)
                    for m2 in (-1, 0, 1)
                )
        self.k = k / self.norm
        # drop cos(pi/2) rounding residue so exact zeros stay zero
        self.u = _chop(u / y00)
        self.v = _chop(v / y00)
        self.m = _chop(m / (y00 * y00))

    def _normalization(self, n: int) -> float:
        # 4-D product Gauss-Legendre rule; the integrand is a sum of
        # products, so the rule factorizes into per-harmonic 2-D integrals.
        th, wt = gauss_legendre(0.0, PI, n)
        ph, wp = gauss_legendre(0.0, TWO_PI, n)
        T, P = np.meshgrid(th, ph, indexing="ij")
        W = np.outer(wt, wp)
        integ = {lm: np.sum(W * ylm(lm[0], lm[1], T, P)) for lm in LM_PAIRS}
        total = 0j
        for (l1, l2, m1, m2), val in self.t.items():
            total += (
                decay_constant(l1, self.a) * decay_constant(l2, self.a) * np.conj(val)
                * integ[(l1, m1)] * integ[(l2, m2)]
            )
        return float((total / (4.0 * PI)).real)

    def raw(self, th1, ph1, th2, ph2):
        """Direct multipole sum divided by the normalization (complex)."""
        return multipole_sum(self.t, self.a, th1, ph1, th2, ph2) / self.norm

    def pdf_theta(self, th1, ph1, th2, ph2):
        s1 = np.sin(th1)
        s2 = np.sin(th2)
        n1 = (s1 * np.cos(ph1), s1 * np.sin(ph1), np.cos(th1))
        n2 = (s2 * np.cos(ph2), s2 * np.sin(ph2), np.cos(th2))
        return self._cartesian(n1, n2)

    def _cartesian(self, n1, n2):
        a = self.a
        val = 1.0 + a * (sum(self.u[i] * n1[i] for i in range(3)) + sum(self.v[i] * n2[i] for i in range(3)))
        corr = 0.0
        for i in range(3):
            for j in range(3):
                if self.m[i, j] != 0.0:
                    corr = corr + self.m[i, j] * n1[i] * n2[j]
        return self.k * (val + a * a * corr)

    def phi_marginal(self, ph1, ph2):
        """Joint azimuthal density: the theta1, theta2 integral over [0, pi]^2."""
        ph1 = np.asarray(ph1, dtype=float)
        ph2 = np.asarray(ph2, dtype=float)
        # integral of (sin t cos p, sin t sin p, cos t) over t in [0, pi]
        e1 = (2.0 * np.cos(ph1), 2.0 * np.sin(ph1), 0.0)
        e2 = (2.0 * np.cos(ph2), 2.0 * np.sin(ph2), 0.0)
        a = self.a
        val = PI * PI + a * PI * (
            sum(self.u[i] * e1[i] for i in range(2)) + sum(self.v[i] * e2[i] for i in range(2))
        )
        corr = sum(self.m[i, j] * e1[i] * e2[j] for i in range(2) for j in range(2))
        return self.k * (val + a * a * corr)

    @property
    def cos_sum_coefficient(self) -> float:
        """Coefficient of cos(phi1 + phi2) in :meth:`phi_marginal`."""
        # 4 (Mxx cc' + Mxy cs' + Myx sc' + Myy ss'); the cos(sum) part is 2 (Mxx - Myy)
        return self.k * self.a**2 * 2.0 * (self.m[0, 0] - self.m[1, 1])

    @lru_cache(maxsize=None)
    def envelope(self, n_grid: int = 32, safety: float = 1.05) -> float:
        """``safety`` times the maximum of the density on an n_grid^4 lattice."""
        th = np.linspace(0.0, PI, n_grid)
        ph = np.linspace(0.0, TWO_PI, n_grid, endpoint=False)
        T1, P1, T2 = np.meshgrid(th, ph, th, indexing="ij")
        best = 0.0
        for p2 in ph:
            best = max(best, float(self.pdf_theta(T1, P1, T2, p2).max()))
        return safety * best


@lru_cache(maxsize=None)
def qm_density(sz: int, a: float = A_LAMBDA) -> AngularDensity:
    """The D-wave density for J/psi spin projection ``sz`` (cached)."""
    if sz not in (-1, 0, 1):
        raise InvalidQuantumNumbers(f"sz={sz} must be -1, 0 or +1")
    return AngularDensity(multipole_from_density(dwave_joint_density(sz)), a)


def qm_full_pdf(cos_th_m, phi_m, cos_th_p, phi_p, sz: int, a: float = A_LAMBDA):
    """Normalized four-angle QM density for spin projection ``sz``.

    Density per unit dtheta dphi of each pion, evaluated at the given
    cosines. Vectorized.
    """
    _check_phi(phi_m, phi_p)
    for c in (cos_th_m, cos_th_p):
        if np.any(np.abs(np.asarray(c)) > 1.0):
            raise DomainError("cos(theta) outside [-1, 1]")
    dens = qm_density(sz, check_asymmetry(a))
    return dens.pdf_theta(np.arccos(cos_th_m), phi_m, np.arccos(cos_th_p), phi_p)


def qm_phi_marginal(phi_m, phi_p, sz: int, a: float = A_LAMBDA):
    _check_phi(phi_m, phi_p)
    return qm_density(sz, check_asymmetry(a)).phi_marginal(phi_m, phi_p)


def fold_alpha_pdf(
    joint_phi_pdf: Callable, alpha, n_quad: int = 256, panel: int = 16
):
    """Density of the folded angle from a joint azimuthal density.

    Sums the four branch integrals (s = alpha, 2pi - alpha, 2pi + alpha,
    4pi - alpha) with composite Gauss-Legendre quadrature over phi_m.
    ``joint_phi_pdf`` must accept numpy arrays. Vectorized over ``alpha``.
    """
    if n_quad < 64:
        raise DomainError("n_quad must be at least 64")
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0.0) or np.any(alpha > PI):
        raise DomainError("alpha outside [0, pi]")
    scalar = alpha.ndim == 0
    al = np.atleast_1d(alpha)[:, None]

    panel = min(panel, n_quad)
    n_panels = max(1, n_quad // panel)
    x, w = np.polynomial.legendre.leggauss(panel)
    # nodes on [0, 1] for the composite rule
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    u = ((edges[:-1, None] + edges[1:, None]) / 2 + (edges[1:, None] - edges[:-1, None]) / 2 * x).ravel()
    wu = ((edges[1:, None] - edges[:-1, None]) / 2 * w).ravel()

    branches = [
        (0.0 * al, al, al),  # phi_m in [0, alpha], phi_p = alpha - phi_m
        (0.0 * al, TWO_PI - al, TWO_PI - al),
        (al, TWO_PI + 0.0 * al, al + TWO_PI),
        (TWO_PI - al, TWO_PI + 0.0 * al, 4.0 * PI - al),
    ]
    total = np.zeros(al.shape[0])
    for lo, hi, s in branches:
        length = hi - lo
        phm = lo + length * u
        php = s - phm
        # nodes are interior; guard against rounding onto 2 pi
        phm = np.clip(phm, 0.0, np.nextafter(TWO_PI, 0.0))
        php = np.clip(php, 0.0, np.nextafter(TWO_PI, 0.0))
        total += (length[:, 0] if length.ndim == 2 else length) * np.sum(wu * joint_phi_pdf(phm, php), axis=1)
    return float(total[0]) if scalar else total


def qm_alpha_amplitude(sz: int, a: float = A_LAMBDA) -> float:
    """Closed-form cos(alpha) amplitude per spin projection: 6a^2/(5pi^3) or 8a^2/(5pi^3)."""
    a = check_asymmetry(a)
    if sz in (1, -1):
        return 6.0 * a * a / (5.0 * PI**3)
    if sz == 0:
        return 8.0 * a * a / (5.0 * PI**3)
    raise InvalidQuantumNumbers(f"sz={sz} must be -1, 0 or +1")


def qm_alpha_pdf(a: float = A_LAMBDA) -> AlphaPdf:
    """Isotropic J/psi mixture: A = 4a^2/(3pi^3)."""
    a = check_asymmetry(a)
    return AlphaPdf(4.0 * a * a / (3.0 * PI**3))


def hvt_alpha_pdf() -> AlphaPdf:
    return AlphaPdf(0.0)


def check_polarization(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.shape != (3,) or np.linalg.norm(P) > 1.0 + 1e-12:
        raise DomainError("polarization must be a 3-vector with |P| <= 1")
    return P


def hvt_single_pdf(cos_th, phi, P, a: float = A_LAMBDA):
    """(1 + a P.p)/(4 pi) per unit solid angle."""
    P = check_polarization(P)
    a = check_asymmetry(a)
    cos_th = np.asarray(cos_th, dtype=float)
    if np.any(np.abs(cos_th) > 1.0):
        raise DomainError("cos(theta) outside [-1, 1]")
    _check_phi(phi)
    s = np.sqrt((1.0 - cos_th) * (1.0 + cos_th))
    dot = P[0] * s * np.cos(phi) + P[1] * s * np.sin(phi) + P[2] * cos_th
    return (1.0 + a * dot) / (4.0 * PI)


def hvt_phi_pdf(phi_m, phi_p, P, a: float = A_LAMBDA):
    """Joint azimuthal density of two independent decays with P_bar = -P.

    Each factor is the solid-angle marginal (1/2pi)(1 + (a pi/4)(Px cos + Py sin)).
    """
    P = check_polarization(P)
    a = check_asymmetry(a)
    k = a * PI / 4.0
    phi_m = np.asarray(phi_m, dtype=float)
    phi_p = np.asarray(phi_p, dtype=float)
    f1 = 1.0 + k * (P[0] * np.cos(phi_m) + P[1] * np.sin(phi_m))
    f2 = 1.0 - k * (P[0] * np.cos(phi_p) + P[1] * np.sin(phi_p))
    return f1 * f2 / (4.0 * PI**2)


def hvt_phi_pdf_isotropic(phi_m, phi_p, a: float = A_LAMBDA, pol: float = 1.0, n_quad: int = 16):
    """:func:`hvt_phi_pdf` averaged over an isotropic direction of P (quadrature)."""
    ct, wt = gauss_legendre(-1.0, 1.0, n_quad)
    ph, wp = gauss_legendre(0.0, TWO_PI, 2 * n_quad)
    out = 0.0
    for c, w1 in zip(ct, wt):
        s = math.sqrt(1.0 - c * c)
        for p, w2 in zip(ph, wp):
            P = pol * np.array([s * math.cos(p), s * math.sin(p), c])
            out = out + w1 * w2 * hvt_phi_pdf(phi_m, phi_p, P, a)
    return out / (4.0 * PI)
