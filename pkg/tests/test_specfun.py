import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from whitham_kdv import ConditioningWarning, DomainError
from whitham_kdv.specfun import (
    EllipticModulus,
    ThetaParams,
    ellip_E,
    ellip_K,
    ellip_K_complement,
    ellip_KE,
    jacobi_cn,
    log_theta_dd,
    theta3,
)

M_GRID = [0.1 * j for j in range(1, 10)]


@pytest.mark.parametrize("m", M_GRID)
def test_legendre_relation(m):
    lhs = ellip_E(m) * ellip_K(1 - m) + ellip_E(1 - m) * ellip_K(m) - ellip_K(m) * ellip_K(1 - m)
    assert abs(lhs - math.pi / 2) < 1e-12


@pytest.mark.parametrize("m", [0.0, 1e-8, 0.3, 0.7, 0.99, 1 - 1e-9])
def test_K_against_quadrature(m):
    # 1 - m sin^2 written as cos^2 + (1 - m) sin^2 to avoid cancellation near p = pi/2
    m1 = 1 - m
    ref, _ = integrate.quad(lambda p: 1 / math.sqrt(math.cos(p) ** 2 + m1 * math.sin(p) ** 2), 0, math.pi / 2,
                            epsabs=1e-13, epsrel=1e-13, limit=400)
    assert ellip_K(m) == pytest.approx(ref, rel=1e-10, abs=1e-10)


@given(st.floats(0.0, 1.0 - 1e-12))
@settings(max_examples=60, deadline=None)
def test_K_E_against_scipy(m):
    K, E, KmE = ellip_KE(m)
    assert K == pytest.approx(special.ellipk(m), rel=1e-13)
    assert E == pytest.approx(special.ellipe(m), rel=1e-13)
    assert KmE == pytest.approx(K - E, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("m", [1e-12, 1e-6, 0.2, 0.9])
def test_K_minus_E_small_m_has_no_cancellation(m):
    ref = float(mpmath.ellipk(m) - mpmath.ellipe(m))
    assert ellip_KE(m)[2] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("m", [1e-14, 1e-8, 0.5, 1 - 1e-10])
def test_K_complement(m):
    with mpmath.workdps(40):
        ref = float(mpmath.ellipk(1 - mpmath.mpf(m)))
    assert ellip_K_complement(m) == pytest.approx(ref, rel=1e-13)


def test_E_at_one_and_domain():
    assert ellip_E(1.0) == 1.0
    with pytest.raises(DomainError):
        ellip_K(1.0)
    with pytest.raises(DomainError):
        ellip_K(-0.1)
    with pytest.raises(DomainError):
        EllipticModulus(1.5)
    assert EllipticModulus(0.25).complement == 0.75


def test_small_m_series_coefficients():
    m = np.geomspace(1e-6, 1e-3, 30)
    A = np.vstack([m, m**2, m**3]).T
    cK = np.linalg.lstsq(A, np.array([ellip_K(x) for x in m]) / (math.pi / 2) - 1, rcond=None)[0]
    cE = np.linalg.lstsq(A, np.array([ellip_E(x) for x in m]) / (math.pi / 2) - 1, rcond=None)[0]
    assert cK[0] == pytest.approx(0.25, rel=0.01)
    assert cK[1] == pytest.approx(9 / 64, rel=0.01)
    assert cE[0] == pytest.approx(-0.25, rel=0.01)
    assert cE[1] == pytest.approx(-3 / 64, rel=0.01)


def test_log_law_near_one():
    m1 = 1e-6
    m = 1 - m1
    L = math.log(16 / m1)
    assert ellip_E(m) == pytest.approx(1 + 0.5 * (1 - math.sqrt(m)) * (L - 1), abs=1e-6)
    assert ellip_K(m) == pytest.approx(0.5 * L, rel=1e-6)
    # the next term of the expansion closes the absolute gap
    assert ellip_K(m) == pytest.approx(0.5 * L * (1 + m1 / 4) - m1 / 4, abs=1e-10)


@pytest.mark.parametrize("m", [0.2, 0.5, 0.9])
def test_cn_ode(m):
    z = np.linspace(-3, 3, 41)
    h = 1e-3
    c = lambda s: jacobi_cn(s, m)  # noqa: E731
    d = (c(z - 2 * h) - 8 * c(z - h) + 8 * c(z + h) - c(z + 2 * h)) / (12 * h)
    cn = c(z)
    assert np.max(np.abs(d**2 - (1 - cn**2) * (1 - m + m * cn**2))) < 1e-8


@given(st.floats(-50, 50), st.floats(0.0, 1.0 - 1e-6))
@settings(max_examples=100, deadline=None)
def test_cn_against_scipy(z, m):
    assert jacobi_cn(z, m) == pytest.approx(special.ellipj(z, m)[1], abs=1e-12)


def test_cn_periodicity_and_sech_limit():
    m = 0.7
    K = ellip_K(m)
    z = np.linspace(0, 2, 7)
    assert np.allclose(jacobi_cn(z + 4 * K, m), jacobi_cn(z, m), atol=1e-12)
    assert np.allclose(jacobi_cn(z + 2 * K, m), -jacobi_cn(z, m), atol=1e-12)
    assert np.allclose(jacobi_cn(z, 1.0), 1 / np.cosh(z), atol=1e-15)
    assert isinstance(jacobi_cn(0.3, 0.5), float)


def test_theta_symmetries():
    tau = 1j
    assert theta3(1.3, tau) == pytest.approx(theta3(0.3, tau), abs=1e-15)
    assert theta3(-0.3, tau) == pytest.approx(theta3(0.3, tau), abs=1e-15)


@pytest.mark.parametrize("imtau", [0.2, 1.0, 3.0])
@pytest.mark.parametrize("z", [0.0, 0.13, 0.5])
def test_theta_against_brute_force(imtau, z):
    n = np.arange(-50, 51)
    ref = float(np.sum(np.exp(-math.pi * n * n * imtau) * np.cos(2 * math.pi * n * z)))
    assert theta3(z, 1j * imtau) == pytest.approx(ref, rel=1e-14)
    mp = float(mpmath.jtheta(3, math.pi * z, mpmath.exp(-math.pi * imtau)))
    assert theta3(z, 1j * imtau) == pytest.approx(mp, rel=1e-14)


@pytest.mark.parametrize("imtau", [0.3, 1.0])
def test_log_theta_second_derivative(imtau):
    z = np.linspace(-0.5, 0.5, 21)
    h = 1e-3
    lt = lambda s: np.log(theta3(s, 1j * imtau))  # noqa: E731
    fd = (-lt(z - 2 * h) + 16 * lt(z - h) - 30 * lt(z) + 16 * lt(z + h) - lt(z + 2 * h)) / (12 * h * h)
    assert np.max(np.abs(log_theta_dd(z, 1j * imtau) - fd)) < 1e-6


def test_theta_derivatives_termwise():
    th, th1, th2 = theta3(0.2, 0.7j, derivatives=True)
    q = mpmath.exp(-mpmath.pi * 0.7)
    zz = math.pi * 0.2
    assert th1 == pytest.approx(math.pi * float(mpmath.jtheta(3, zz, q, 1)), rel=1e-12)
    assert th2 == pytest.approx(math.pi**2 * float(mpmath.jtheta(3, zz, q, 2)), rel=1e-12)


def test_theta_params_and_errors():
    p = ThetaParams.from_parameter(0.5)
    assert p.imtau == pytest.approx(1.0, rel=1e-14)
    assert p.tau == 1j * p.imtau
    assert p.nterms >= 2
    with pytest.raises(DomainError):
        theta3(0.1, -1j)
    with pytest.raises(DomainError):
        theta3(0.1, 0.5 + 1j)
    with pytest.raises(DomainError):
        ThetaParams(0.0)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        theta3(0.1, 0.01j)
    assert any(issubclass(x.category, ConditioningWarning) for x in w)
