import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decayplane.errors import DomainError, InvalidQuantumNumbers
from decayplane.models import (
    PI,
    TWO_PI,
    AlphaPdf,
    AngularDensity,
    fold_alpha_angles,
    fold_alpha_pdf,
    gauss_legendre,
    hvt_alpha_pdf,
    hvt_phi_pdf,
    hvt_phi_pdf_isotropic,
    hvt_single_pdf,
    multipole_sum,
    qm_alpha_amplitude,
    qm_alpha_pdf,
    qm_density,
    qm_full_pdf,
    qm_phi_marginal,
    qm_phi_pdf,
)
from decayplane.spinalg import MultipoleSet, reference_multipole_table

A = 0.642
ALPHA = np.linspace(0.0, PI, 101)
phis = st.floats(0.0, TWO_PI, exclude_max=True)


# -- folding ------------------------------------------------------------------


def test_fold_branches():
    assert fold_alpha_angles(0.3, 0.4) == pytest.approx(0.7)
    assert fold_alpha_angles(PI, 1.5 * PI) == pytest.approx(PI / 2)
    assert fold_alpha_angles(0.0, 0.0) == 0.0
    assert fold_alpha_angles(PI, PI) == 0.0
    assert fold_alpha_angles(1.9 * PI, 1.9 * PI) == pytest.approx(0.2 * PI)


def test_fold_domain():
    with pytest.raises(DomainError):
        fold_alpha_angles(TWO_PI, 0.0)
    with pytest.raises(DomainError):
        fold_alpha_angles(-1e-9, 0.0)


@given(phis, phis)
def test_fold_is_arccos_of_cos_sum(p1, p2):
    a = fold_alpha_angles(p1, p2)
    assert 0.0 <= a <= PI
    assert a == pytest.approx(math.acos(math.cos(p1 + p2)), abs=1e-7)
    assert math.cos(a) == pytest.approx(math.cos(p1 + p2), abs=1e-12)


def test_fold_vectorized():
    p1 = np.array([0.3, PI, 0.0])
    p2 = np.array([0.4, 1.5 * PI, 0.0])
    assert np.allclose(fold_alpha_angles(p1, p2), [0.7, PI / 2, 0.0])


# -- azimuthal density ----------------------------------------------------------


def test_phi_pdf_normalized():
    ph, w = gauss_legendre(0.0, TWO_PI, 64)
    P1, P2 = np.meshgrid(ph, ph, indexing="ij")
    assert np.sum(np.outer(w, w) * qm_phi_pdf(P1, P2, A)) == pytest.approx(1.0, abs=1e-10)


def test_phi_pdf_limits_and_symmetry():
    assert qm_phi_pdf(1.0, 2.0, 0.0) == pytest.approx(1 / (4 * PI**2), abs=1e-16)
    assert qm_phi_pdf(1.0, 2.0, A) == qm_phi_pdf(2.0, 1.0, A)
    with pytest.raises(DomainError):
        qm_phi_pdf(0.1, 0.1, 1.5)


# -- four-angle density ----------------------------------------------------------


@pytest.mark.parametrize("sz", [-1, 0, 1])
def test_four_angle_normalization_frozen(sz):
    # computed once by the factorized product rule; the multipole sum is
    # normalized in the flat (theta, phi) measure
    assert qm_density(sz, A).norm == pytest.approx(1.0, abs=1e-12)


def test_four_angle_normalization_brute_force():
    d = qm_density(1, A)
    th, wt = gauss_legendre(0.0, PI, 10)
    ph, wp = gauss_legendre(0.0, TWO_PI, 10)
    g = np.meshgrid(th, ph, th, ph, indexing="ij")
    w = np.einsum("i,j,k,l->ijkl", wt, wp, wt, wp)
    assert np.sum(w * d.pdf_theta(*g)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("sz", [-1, 0, 1])
def test_cartesian_form_equals_multipole_sum(sz, rng):
    d = qm_density(sz, A)
    th1, th2 = rng.uniform(0, PI, (2, 500))
    ph1, ph2 = rng.uniform(0, TWO_PI, (2, 500))
    direct = d.raw(th1, ph1, th2, ph2)
    assert np.abs(direct.imag).max() < 1e-15
    assert np.abs(direct.real - d.pdf_theta(th1, ph1, th2, ph2)).max() < 1e-15


def test_full_pdf_a_zero_constant(rng):
    c1, c2 = rng.uniform(-1, 1, (2, 50))
    p1, p2 = rng.uniform(0, TWO_PI, (2, 50))
    for sz in (-1, 0, 1):
        v = qm_full_pdf(c1, p1, c2, p2, sz, 0.0)
        assert np.allclose(v, 1.0 / (4.0 * PI**4), rtol=1e-14)


def test_full_pdf_errors():
    with pytest.raises(InvalidQuantumNumbers):
        qm_full_pdf(0.0, 0.0, 0.0, 0.0, 2)
    with pytest.raises(DomainError):
        qm_full_pdf(1.5, 0.0, 0.0, 0.0, 1)


@pytest.mark.parametrize("sz", [-1, 0, 1])
def test_phi_marginal_matches_theta_quadrature(sz):
    d = qm_density(sz, A)
    th, wt = gauss_legendre(0.0, PI, 24)
    probe = np.linspace(0.05, TWO_PI - 0.05, 32)
    for p1 in probe[::4]:
        T1, T2, P2 = np.meshgrid(th, th, probe, indexing="ij")
        num = np.einsum("i,j,ijk->k", wt, wt, d.pdf_theta(T1, p1, T2, P2))
        assert np.abs(num / d.phi_marginal(p1, probe) - 1.0).max() < 1e-8


def test_reference_table_marginal_reproduces_phi_pdf():
    d = AngularDensity(MultipoleSet.from_table(reference_multipole_table()), A)
    probe = np.linspace(0.05, TWO_PI - 0.05, 32)
    P1, P2 = np.meshgrid(probe, probe, indexing="ij")
    assert np.abs(d.phi_marginal(P1, P2) / qm_phi_pdf(P1, P2, A) - 1.0).max() < 1e-8


def test_derived_marginal_correlation_coefficient():
    # the cos(phi1 + phi2) coefficient of the sz=+-1 marginal matches 3a^2/(10 pi^4)
    for sz in (1, -1):
        assert qm_density(sz, A).cos_sum_coefficient == pytest.approx(3 * A * A / (10 * PI**4), rel=1e-13)
    assert qm_density(0, A).cos_sum_coefficient == pytest.approx(4 * A * A / (10 * PI**4), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, PI), phis, st.floats(0, PI), phis, st.sampled_from([-1, 0, 1]))
def test_envelope_bounds_density(t1, p1, t2, p2, sz):
    d = qm_density(sz, A)
    assert d.pdf_theta(t1, p1, t2, p2) <= d.envelope()


# -- folded densities --------------------------------------------------------------


def test_fold_of_flat_density():
    f = fold_alpha_pdf(lambda x, y: np.full_like(x, 1 / (4 * PI**2)), ALPHA, 64)
    assert np.abs(f - 1 / PI).max() < 1e-13


def test_fold_errors():
    with pytest.raises(DomainError):
        fold_alpha_pdf(qm_phi_pdf, ALPHA, 32)
    with pytest.raises(DomainError):
        fold_alpha_pdf(qm_phi_pdf, 3.2)


def test_fold_of_phi_pdf_closed_form():
    f = fold_alpha_pdf(lambda x, y: qm_phi_pdf(x, y, A), ALPHA)
    assert np.abs(f - (1 / PI + 6 * A * A / (5 * PI**3) * np.cos(ALPHA))).max() < 1e-9


@pytest.mark.parametrize("sz", [-1, 0, 1])
def test_fold_of_marginal_closed_form(sz):
    f = fold_alpha_pdf(lambda x, y: qm_phi_marginal(x, y, sz, A), ALPHA)
    assert np.abs(f - (1 / PI + qm_alpha_amplitude(sz, A) * np.cos(ALPHA))).max() < 1e-9


def test_mixture_amplitude():
    assert qm_alpha_pdf(A).amplitude == pytest.approx(0.0177240, abs=5e-7)
    assert Fraction(1, 3) * Fraction(8, 5) + Fraction(2, 3) * Fraction(6, 5) == Fraction(4, 3)
    mix = (2 * qm_alpha_amplitude(1, A) + qm_alpha_amplitude(0, A)) / 3
    assert mix == pytest.approx(qm_alpha_pdf(A).amplitude, rel=1e-15)
    assert qm_alpha_pdf(0.0).amplitude == 0.0
    with pytest.raises(InvalidQuantumNumbers):
        qm_alpha_amplitude(3, A)


def test_alpha_pdf_properties():
    for pdf in (qm_alpha_pdf(A), hvt_alpha_pdf()):
        x, w = gauss_legendre(0.0, PI, 16)
        assert np.sum(w * pdf(x)) == pytest.approx(1.0, abs=1e-14)
        assert pdf.cdf(PI) == pytest.approx(1.0, abs=1e-15)
        assert pdf.bin_probabilities(np.linspace(0, PI, 41)).sum() == pytest.approx(1.0, abs=1e-14)
    assert hvt_alpha_pdf()(0.0) == hvt_alpha_pdf()(PI) == 1 / PI
    with pytest.raises(DomainError):
        AlphaPdf(0.4)


# -- HVT ---------------------------------------------------------------------------

vectors = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: 0 < math.hypot(*v) <= 1
)


def test_hvt_unpolarized():
    assert np.allclose(hvt_single_pdf(np.linspace(-1, 1, 9), 1.0, [0, 0, 0], A), 1 / (4 * PI))


@settings(max_examples=30, deadline=None)
@given(vectors)
def test_hvt_single_normalized(P):
    th, wt = gauss_legendre(0.0, PI, 32)
    ph, wp = gauss_legendre(0.0, TWO_PI, 32)
    T, F = np.meshgrid(th, ph, indexing="ij")
    total = np.sum(np.outer(wt * np.sin(th), wp) * hvt_single_pdf(np.cos(T), F, P, A))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_hvt_single_maximum_along_P():
    P = np.array([0.3, -0.4, 0.5])
    n = P / np.linalg.norm(P)
    phi = math.atan2(n[1], n[0]) % TWO_PI
    peak = hvt_single_pdf(n[2], phi, P, A)
    assert peak == pytest.approx((1 + A * np.linalg.norm(P)) / (4 * PI))
    rng = np.random.default_rng(1)
    c = rng.uniform(-1, 1, 1000)
    f = rng.uniform(0, TWO_PI, 1000)
    assert hvt_single_pdf(c, f, P, A).max() <= peak
    with pytest.raises(DomainError):
        hvt_single_pdf(0.0, 0.0, [1.0, 1.0, 0.0], A)


def test_hvt_phi_pdf_is_marginal_of_single():
    P = np.array([0.2, -0.6, 0.3])
    th, wt = gauss_legendre(0.0, PI, 32)
    wc, c = wt * np.sin(th), np.cos(th)
    for p1, p2 in [(0.3, 4.0), (2.0, 5.5)]:
        m1 = np.sum(wc * hvt_single_pdf(c, p1, P, A))
        m2 = np.sum(wc * hvt_single_pdf(c, p2, -P, A))
        assert hvt_phi_pdf(p1, p2, P, A) == pytest.approx(m1 * m2, rel=1e-12)


def test_hvt_fold_isotropic_uniform():
    f = fold_alpha_pdf(lambda x, y: hvt_phi_pdf_isotropic(x, y, A), ALPHA)
    assert np.abs(f - 1 / PI).max() < 1e-9


def test_hvt_fold_fixed_P_not_uniform():
    P = np.array([1.0, 0.0, 0.0])
    f = fold_alpha_pdf(lambda x, y: hvt_phi_pdf(x, y, P, A), ALPHA)
    assert np.abs(f - 1 / PI).max() > 1e-3
    x, w = gauss_legendre(0.0, PI, 64)
    g = fold_alpha_pdf(lambda x_, y_: hvt_phi_pdf(x_, y_, P, A), x)
    assert np.sum(w * g) == pytest.approx(1.0, abs=1e-10)


def test_multipole_sum_a_zero():
    t = MultipoleSet.from_table(reference_multipole_table())
    v = multipole_sum(t, 0.0, 0.3, 1.0, 2.0, 4.0)
    assert v == pytest.approx(1.0 / (4 * PI**4))
