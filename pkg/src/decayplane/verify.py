"""Numeric cross-checks of the analytic results.

Each check compares an independently computed quantity (a quadrature or
a matrix trace) with its closed form and reports the maximum deviation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import A_LAMBDA
from .models import (
    PI,
    TWO_PI,
    AngularDensity,
    fold_alpha_pdf,
    gauss_legendre,
    hvt_alpha_pdf,
    hvt_phi_pdf_isotropic,
    qm_alpha_pdf,
    qm_density,
    qm_phi_marginal,
    qm_phi_pdf,
)
from .spinalg import (
    MultipoleSet,
    dwave_joint_density,
    multipole_from_density,
    reference_multipole_table,
)

FAULTS = ("none", "a-linear")

# Reference table entries (row = Lambdabar (l2, m2), column = Lambda (l1, m1))
# that pair a transverse Lambda or Lambdabar multipole with l = 0. Both
# reduced density matrices are diagonal, so these vanish for any trace
# formula; they are reported but do not gate the exit code.
TRANSVERSE_SINGLE = [(0, 2), (0, 3), (2, 0), (3, 0)]


@dataclass(frozen=True)
class Check:
    name: str
    max_dev: float
    tol: float
    gating: bool = True

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol

    def line(self) -> str:
        status = ("PASS" if self.passed else "FAIL") if self.gating else "INFO"
        return f"{status} {self.name:<34s} max_dev={self.max_dev:.3e} tol={self.tol:.0e}"


def reference_density_sz_plus_one() -> np.ndarray:
    """The reference sz = +1 joint density matrix, assembled from its Kronecker terms."""
    up = np.array([[1, 0], [0, 0]])
    dn = np.array([[0, 0], [0, 1]])
    lower = np.array([[0, 0], [1, 0]])
    raise_ = np.array([[0, 1], [0, 0]])
    return (
        0.6 * np.kron(dn, up)
        + 0.1 * np.kron(up, dn)
        + 0.15 * (np.kron(up, up) + np.kron(dn, dn) + np.kron(lower, lower) + np.kron(raise_, raise_))
    )


def run_checks(a: float = A_LAMBDA, quad_depth: int = 256, fault: str = "none") -> list[Check]:
    if fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    # closed-form a^2; the injected fault replaces it by a
    a2 = a if fault == "a-linear" else a * a
    alpha = np.linspace(0.0, PI, 101)
    checks = []

    rho = dwave_joint_density(1)
    checks.append(Check("density_matrix_sz+1", float(np.abs(rho.rho - reference_density_sz_plus_one()).max()), 1e-14))
    herm = 0.0
    for sz in (-1, 0, 1):
        r = dwave_joint_density(sz).rho
        ev = np.linalg.eigvalsh(r)
        herm = max(herm, np.abs(r - r.conj().T).max(), abs(np.trace(r) - 1.0), max(0.0, -ev.min()))
    checks.append(Check("density_matrix_validity", float(herm), 1e-12))

    table = multipole_from_density(rho).as_table()
    pub = reference_multipole_table()
    mask = np.ones((4, 4), dtype=bool)
    for r, c in TRANSVERSE_SINGLE:
        mask[r, c] = False
    checks.append(Check("multipole_table", float(np.abs(table - pub)[mask].max()), 1e-14))
    checks.append(
        Check("multipole_table_transverse_l0", float(np.abs(table - pub)[~mask].max()), 1e-14, gating=False)
    )

    norm_dev = max(abs(qm_density(sz, a).norm - 1.0) for sz in (-1, 0, 1))
    checks.append(Check("qm_four_angle_normalization", norm_dev, 1e-12))

    ph, w = gauss_legendre(0.0, TWO_PI, quad_depth)
    P1, P2 = np.meshgrid(ph, ph, indexing="ij")
    phi_norm = float(np.sum(np.outer(w, w) * qm_phi_pdf(P1, P2, a)))
    checks.append(Check("phi_density_normalization", abs(phi_norm - 1.0), 1e-10))

    pub_dens = AngularDensity(MultipoleSet.from_table(pub), a)
    probe = np.linspace(0.05, TWO_PI - 0.05, 32)
    Q1, Q2 = np.meshgrid(probe, probe, indexing="ij")
    rel = np.abs(pub_dens.phi_marginal(Q1, Q2) / qm_phi_pdf(Q1, Q2, a) - 1.0).max()
    checks.append(Check("reference_table_theta_marginal", float(rel), 1e-8))

    def closed(coef):
        return 1.0 / PI + coef * np.cos(alpha)

    a_pm = 6.0 * a2 / (5.0 * PI**3)
    a_0 = 8.0 * a2 / (5.0 * PI**3)
    a_mix = 4.0 * a2 / (3.0 * PI**3)

    f_phi = fold_alpha_pdf(lambda x, y: qm_phi_pdf(x, y, a), alpha, quad_depth)
    checks.append(Check("fold_phi_density_sz+-1", float(np.abs(f_phi - closed(a_pm)).max()), 1e-9))

    folds = {
        sz: fold_alpha_pdf(lambda x, y, sz=sz: qm_phi_marginal(x, y, sz, a), alpha, quad_depth)
        for sz in (-1, 0, 1)
    }
    checks.append(Check("fold_marginal_sz+1", float(np.abs(folds[1] - closed(a_pm)).max()), 1e-9))
    checks.append(Check("fold_marginal_sz-1", float(np.abs(folds[-1] - closed(a_pm)).max()), 1e-9))
    checks.append(Check("fold_marginal_sz0", float(np.abs(folds[0] - closed(a_0)).max()), 1e-9))
    mix = (folds[1] + folds[0] + folds[-1]) / 3.0
    checks.append(Check("fold_mixture", float(np.abs(mix - closed(a_mix)).max()), 1e-9))
    checks.append(Check("mixture_amplitude", abs(qm_alpha_pdf(a).amplitude - a_mix), 1e-12))

    single = fold_alpha_pdf(lambda x, y: np.cos(x) + np.cos(y), alpha, quad_depth)
    checks.append(Check("single_cos_terms_cancel", float(np.abs(single).max()), 1e-9))

    f_hvt = fold_alpha_pdf(lambda x, y: hvt_phi_pdf_isotropic(x, y, a), alpha, quad_depth)
    checks.append(Check("hvt_fold_uniform", float(np.abs(f_hvt - 1.0 / PI).max()), 1e-9))

    x, wx = gauss_legendre(0.0, PI, 64)
    dev = max(abs(float(np.sum(wx * pdf(x))) - 1.0) for pdf in (qm_alpha_pdf(a), hvt_alpha_pdf()))
    checks.append(Check("alpha_pdf_normalization", dev, 1e-12))
    return checks
