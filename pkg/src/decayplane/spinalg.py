"""Spin algebra for the Lambda-Lambdabar system.

Two-particle states use the basis (uu, ud, du, dd): the first arrow is
the Lambda spin along k(Lambda), the second the Lambdabar spin along
k(Lambdabar). Because k(Lambdabar) = -k(Lambda), a spin "up" along the
common quantization axis is "down" in the Lambdabar helicity frame; the
triplet states are relabelled accordingly (``FLIP``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidQuantumNumbers

SQRT_2_3 = math.sqrt(2.0 / 3.0)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |u><d|
SIGMA_MINUS = SIGMA_PLUS.T.copy()

# Spin-1/2 irreducible tensor operators. The normalization reproduces the
# single-hyperon multipoles t00 = 1, t10 = Pz/sqrt3,
# t1+-1 = -+(Px +- i Py)/sqrt6 for rho = (1 + P.sigma)/2.
TENSOR_OPS = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): SIGMA_Z / math.sqrt(3.0),
    (1, 1): -SQRT_2_3 * SIGMA_PLUS,
    (1, -1): SQRT_2_3 * SIGMA_MINUS,
}

FLIP = np.array([[0, 1], [1, 0]], dtype=complex)

LM_PAIRS = [(0, 0), (1, 0), (1, 1), (1, -1)]


def _half_int(x, name: str) -> Fraction:
    f = Fraction(x).limit_denominator(2)
    if abs(float(f) - float(x)) > 1e-12 or f.denominator not in (1, 2):
        raise InvalidQuantumNumbers(f"{name}={x} is not a (half-)integer")
    return f


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M> with the Condon-Shortley phase (Racah formula)."""
    j1, m1, j2, m2, J, M = (
        _half_int(v, n) for v, n in zip((j1, m1, j2, m2, J, M), ("j1", "m1", "j2", "m2", "J", "M"))
    )
    for j, m in ((j1, m1), (j2, m2), (J, M)):
        if j < 0 or abs(m) > j or (j - m).denominator != 1:
            raise InvalidQuantumNumbers(f"invalid pair j={j}, m={m}")
    if m1 + m2 != M or not abs(j1 - j2) <= J <= j1 + j2 or (j1 + j2 + J).denominator != 1:
        return 0.0

    f = math.factorial

    def i(x: Fraction) -> int:
        return int(x)

    pref = Fraction(
        i(2 * J + 1) * f(i(J + j1 - j2)) * f(i(J - j1 + j2)) * f(i(j1 + j2 - J)),
        f(i(j1 + j2 + J + 1)),
    )
    pref *= (
        f(i(J + M)) * f(i(J - M)) * f(i(j1 - m1)) * f(i(j1 + m1)) * f(i(j2 - m2)) * f(i(j2 + m2))
    )
    s = Fraction(0)
    for k in range(0, i(j1 + j2 - J) + 1):
        terms = (
            j1 + j2 - J - k,
            j1 - m1 - k,
            j2 + m2 - k,
            J - j2 + m1 + k,
            J - j1 - m2 + k,
        )
        if any(t < 0 for t in terms):
            continue
        den = f(k)
        for t in terms:
            den *= f(i(t))
        s += Fraction((-1) ** k, den)
    return float(s) * math.sqrt(pref)


def _two_spin_triplet(ms: int) -> np.ndarray:
    """|1, ms> of two spin-1/2 in the common (uu, ud, du, dd) basis."""
    half = Fraction(1, 2)
    vec = np.zeros(4, dtype=complex)
    for a, ma in enumerate((half, -half)):
        for b, mb in enumerate((half, -half)):
            vec[2 * a + b] = clebsch_gordan(half, ma, half, mb, 1, ms)
    return vec


@dataclass(frozen=True)
class JointDensityMatrix:
    rho: np.ndarray

    def check(self, tol: float = 1e-14, eig_floor: float = -1e-12) -> None:
        r = self.rho
        if np.abs(r - r.conj().T).max() > tol:
            raise AssertionError("density matrix is not Hermitian")
        if abs(np.trace(r) - 1.0) > tol:
            raise AssertionError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(r).min() < eig_floor:
            raise AssertionError("density matrix has a negative eigenvalue")

    def reduced(self, which: int) -> np.ndarray:
        """Single-particle density matrix: 0 for Lambda, 1 for Lambdabar."""
        r = self.rho.reshape(2, 2, 2, 2)
        return np.einsum("ajbj->ab", r) if which == 0 else np.einsum("jajb->ab", r)


@lru_cache(maxsize=None)
def _dwave_rho(sz: int) -> np.ndarray:
    # |1, sz> = sum_mL <2 mL; 1 mS | 1 sz> |2 mL> |1 mS>, as a 5 x 4 amplitude array
    amp = np.zeros((5, 4), dtype=complex)
    for row, ml in enumerate(range(-2, 3)):
        ms = sz - ml
        if abs(ms) <= 1:
            triplet = np.kron(np.eye(2), FLIP) @ _two_spin_triplet(ms)
            amp[row] = clebsch_gordan(2, ml, 1, ms, 1, sz) * triplet
    # trace over the orbital projection
    return amp.T @ amp.conj()


def dwave_joint_density(sz: int) -> JointDensityMatrix:
    """Spin density matrix of the D-wave pair for J/psi spin projection ``sz``."""
    if sz not in (-1, 0, 1):
        raise InvalidQuantumNumbers(f"sz={sz} must be -1, 0 or +1")
    return JointDensityMatrix(_dwave_rho(sz).copy())


@dataclass(frozen=True)
class MultipoleSet:
    """Joint multipoles t^{l1,l2}_{m1,m2}; (l1, m1) is the Lambda side.

    Index as ``t[l1, l2, m1, m2]``.
    """

    values: dict

    def __getitem__(self, key) -> complex:
        l1, l2, m1, m2 = key
        return self.values.get((l1, l2, m1, m2), 0j)

    def items(self):
        return self.values.items()

    def as_table(self) -> np.ndarray:
        """4x4 array: rows Lambdabar (l2, m2), columns Lambda (l1, m1), in ``LM_PAIRS`` order."""
        out = np.zeros((4, 4), dtype=complex)
        for r, (l2, m2) in enumerate(LM_PAIRS):
            for c, (l1, m1) in enumerate(LM_PAIRS):
                out[r, c] = self[l1, l2, m1, m2]
        return out

    @classmethod
    def from_table(cls, table) -> "MultipoleSet":
        table = np.asarray(table, dtype=complex)
        vals = {}
        for r, (l2, m2) in enumerate(LM_PAIRS):
            for c, (l1, m1) in enumerate(LM_PAIRS):
                vals[(l1, l2, m1, m2)] = complex(table[r, c])
        return cls(vals)


def multipole_from_density(rho) -> MultipoleSet:
    """t^{l1,l2}_{m1,m2} = Tr(rho T^{l1}_{m1} (x) T^{l2}_{m2})."""
    r = rho.rho if isinstance(rho, JointDensityMatrix) else np.asarray(rho)
    vals = {}
    for l1, m1 in LM_PAIRS:
        for l2, m2 in LM_PAIRS:
            op = np.kron(TENSOR_OPS[(l1, m1)], TENSOR_OPS[(l2, m2)])
            vals[(l1, l2, m1, m2)] = complex(np.trace(r @ op))
    return MultipoleSet(vals)


def reference_multipole_table() -> np.ndarray:
    """Reference sz=+1 multipole table (rows Lambdabar, columns Lambda)."""
    s3 = math.sqrt(3.0) / 6.0
    s6 = math.sqrt(6.0) / 20.0
    return np.array(
        [
            [1.0, -s3, -s6, s6],
            [s3, -2.0 / 15.0, 0.0, 0.0],
            [-s6, 0.0, 0.1, 0.0],
            [s6, 0.0, 0.0, 0.1],
        ]
    )


_YLM_NORM = {
    (0, 0): math.sqrt(1.0 / (4.0 * math.pi)),
    (1, 0): math.sqrt(3.0 / (4.0 * math.pi)),
    (1, 1): math.sqrt(3.0 / (8.0 * math.pi)),
    (2, 0): math.sqrt(5.0 / (16.0 * math.pi)),
    (2, 1): math.sqrt(15.0 / (8.0 * math.pi)),
    (2, 2): math.sqrt(15.0 / (32.0 * math.pi)),
}


def ylm(l: int, m: int, theta, phi):
    """Orthonormal spherical harmonic with the Condon-Shortley phase, l <= 2.

    Vectorized over ``theta`` and ``phi``.
    """
    if l not in (0, 1, 2) or abs(m) > l or int(m) != m:
        raise InvalidQuantumNumbers(f"(l, m) = ({l}, {m}) not supported")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    am = abs(m)
    if l == 0:
        shape = np.ones_like(c)
    elif l == 1:
        shape = c if am == 0 else -s
    else:
        shape = {0: 3.0 * c * c - 1.0, 1: -s * c, 2: s * s}[am]
    val = _YLM_NORM[(l, am)] * shape * np.exp(1j * am * phi)
    if m < 0:
        val = (-1) ** am * np.conj(val)
    return val[()] if val.ndim == 0 else val


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Partial transpose over the second (Lambdabar) factor."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def negativity(rho) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    r = rho.rho if isinstance(rho, JointDensityMatrix) else np.asarray(rho)
    ev = np.linalg.eigvalsh(partial_transpose(r))
    return float(np.abs(ev[ev < 0.0]).sum())
