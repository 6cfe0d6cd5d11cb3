"""Vector algebra, helicity frames and lab-frame event assembly.

Three-vectors are plain length-3 numpy arrays. Angles follow the usual
spherical convention inside a frame: ``cos(theta)`` is the projection on
``k_hat`` and ``phi`` is measured from ``i_hat`` towards ``j_hat``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import MASSES, Masses
from .errors import DegenerateFrame, DegeneratePlane, DomainError, ZeroVector

TWO_PI = 2.0 * math.pi
_EPS = 1e-12

Z_AXIS = np.array([0.0, 0.0, 1.0])


def vec3(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ZeroVector("cannot normalise a zero vector")
    return v / n


@dataclass(frozen=True)
class FourVector:
    E: float
    p: np.ndarray

    @property
    def mass2(self) -> float:
        return self.E**2 - float(self.p @ self.p)

    @property
    def mass(self) -> float:
        return math.sqrt(max(self.mass2, 0.0))

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.E + other.E, self.p + other.p)

    def boost(self, beta) -> "FourVector":
        """Active boost by velocity ``beta`` (a 3-vector, |beta| < 1)."""
        beta = np.asarray(beta, dtype=float)
        b2 = float(beta @ beta)
        if b2 == 0.0:
            return self
        gamma = 1.0 / math.sqrt(1.0 - b2)
        bp = float(beta @ self.p)
        p = self.p + ((gamma - 1.0) * bp / b2 + gamma * self.E) * beta
        return FourVector(gamma * (self.E + bp), p)


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal triad (i_hat, j_hat, k_hat)."""

    i_hat: np.ndarray
    j_hat: np.ndarray
    k_hat: np.ndarray

    def check(self, tol: float = 1e-12) -> None:
        m = np.array([self.i_hat, self.j_hat, self.k_hat])
        if np.abs(m @ m.T - np.eye(3)).max() > tol:
            raise AssertionError("frame is not orthonormal")
        if np.abs(np.cross(self.i_hat, self.j_hat) - self.k_hat).max() > tol:
            raise AssertionError("frame is not right-handed")

    @property
    def matrix(self) -> np.ndarray:
        """Rows are the frame axes: ``matrix @ v`` gives frame components."""
        return np.array([self.i_hat, self.j_hat, self.k_hat])


def helicity_frame(p_dir, z_ref=Z_AXIS) -> Frame:
    """Helicity frame of a particle moving along ``p_dir``.

    k = p_dir, j = unit(z_ref x k), i = j x k.
    """
    k = unit(p_dir)
    j = np.cross(np.asarray(z_ref, dtype=float), k)
    nj = np.linalg.norm(j)
    if nj <= _EPS:
        raise DegenerateFrame("momentum is collinear with the reference axis")
    j = j / nj
    i = np.cross(j, k)
    return Frame(i, j, k)


def conjugate_frame(f_lambda: Frame) -> Frame:
    """Helicity frame of the recoiling partner: i kept, j and k flipped."""
    return Frame(f_lambda.i_hat.copy(), -f_lambda.j_hat, -f_lambda.k_hat)


def angles_in_frame(p, f: Frame) -> tuple[float, float]:
    """(cos theta, phi) of ``p`` in frame ``f``, phi in [0, 2 pi)."""
    p = np.asarray(p, dtype=float)
    n = np.linalg.norm(p)
    if n == 0.0:
        raise ZeroVector("direction of a zero vector is undefined")
    x, y, z = f.matrix @ (p / n)
    if math.hypot(x, y) < _EPS:
        return (1.0 if z > 0.0 else -1.0), 0.0  # azimuth undefined on the axis
    phi = math.atan2(y, x)
    if phi < 0.0:
        phi += TWO_PI
        if phi >= TWO_PI:  # -0.0 style rounding
            phi = 0.0
    return max(-1.0, min(1.0, z)), phi


def direction_from_angles(cos_theta: float, phi: float, f: Frame) -> np.ndarray:
    if not -1.0 <= cos_theta <= 1.0:
        raise DomainError(f"cos(theta) = {cos_theta} outside [-1, 1]")
    sin_theta = math.sqrt((1.0 - cos_theta) * (1.0 + cos_theta))
    return (
        sin_theta * math.cos(phi) * f.i_hat
        + sin_theta * math.sin(phi) * f.j_hat
        + cos_theta * f.k_hat
    )


def two_body_momentum(m0: float, m1: float, m2: float) -> float:
    """Daughter momentum for m0 -> m1 m2 at rest."""
    s = (m0 * m0 - (m1 + m2) ** 2) * (m0 * m0 - (m1 - m2) ** 2)
    if s < 0.0:
        raise DomainError("decay is kinematically forbidden")
    return math.sqrt(s) / (2.0 * m0)


def _on_shell(mass: float, p: np.ndarray) -> FourVector:
    return FourVector(math.sqrt(mass * mass + float(p @ p)), p)


def build_lab_event(e, masses: Masses = MASSES):
    """Four-momenta (p, pi-, pbar, pi+) in the J/psi rest frame.

    ``e`` needs the angle fields of :class:`decayplane.generator.Event`.
    The pion directions are taken in the Lambda and Lambdabar helicity
    frames, then boosted along the hyperon line of flight.
    """
    sin_l = math.sqrt(max(0.0, 1.0 - e.cos_theta_lambda**2))
    lam_dir = vec3(
        sin_l * math.cos(e.phi_lambda), sin_l * math.sin(e.phi_lambda), e.cos_theta_lambda
    )
    f_lam = helicity_frame(lam_dir)
    f_bar = conjugate_frame(f_lam)

    q = two_body_momentum(masses.jpsi, masses.lam, masses.lam)
    e_lam = math.sqrt(masses.lam**2 + q * q)
    beta_lam = (q / e_lam) * f_lam.k_hat
    beta_bar = (q / e_lam) * f_bar.k_hat

    k = two_body_momentum(masses.lam, masses.proton, masses.pion)
    n_m = direction_from_angles(e.cos_theta_m, e.phi_m, f_lam)
    n_p = direction_from_angles(e.cos_theta_p, e.phi_p, f_bar)

    pim = _on_shell(masses.pion, k * n_m).boost(beta_lam)
    prot = _on_shell(masses.proton, -k * n_m).boost(beta_lam)
    pip = _on_shell(masses.pion, k * n_p).boost(beta_bar)
    pbar = _on_shell(masses.proton, -k * n_p).boost(beta_bar)
    return prot, pim, pbar, pip


def decay_plane_alpha(p_lambda_dir, p_pim, p_pip) -> float:
    """Dihedral angle in [0, pi] between the two decay planes.

    Both normals are built as ``p_lambda x p_pion``; with the partner's
    frame obtained from :func:`conjugate_frame` this makes the angle equal
    to the fold of ``phi_m + phi_p``.
    """
    lam = np.asarray(p_lambda_dir, dtype=float)
    n1 = np.cross(lam, p_pim)
    n2 = np.cross(lam, p_pip)
    l1 = np.linalg.norm(n1)
    l2 = np.linalg.norm(n2)
    if l1 < _EPS or l2 < _EPS:
        raise DegeneratePlane("pion momentum collinear with the Lambda direction")
    n1 /= l1
    n2 /= l2
    # atan2 form of arccos(n1.n2); stays accurate near 0 and pi
    return math.atan2(np.linalg.norm(np.cross(n1, n2)), float(np.clip(n1 @ n2, -1.0, 1.0)))
