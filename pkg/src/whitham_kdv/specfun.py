"""Complete elliptic integrals, Jacobi cn and the one-dimensional theta function.

All elliptic quantities use the *parameter* convention::

    K(m) = int_0^{pi/2} dpsi / sqrt(1 - m sin^2 psi)

with ``m`` in ``[0, 1]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ConditioningWarning, DomainError

#: Below this Im(tau) the theta series is slowly convergent and badly scaled.
THETA_CONDITIONING_LIMIT = 0.05
#: Distance from m = 1 below which cn is replaced by sech.
CN_SECH_SWITCH = 1e-12


@dataclass(frozen=True)
class EllipticModulus:
    """Elliptic parameter ``m`` with its complementary parameter."""

    m: float

    def __post_init__(self):
        if not 0.0 <= self.m <= 1.0:
            raise DomainError(f"elliptic parameter must lie in [0, 1], got {self.m}")

    @property
    def complement(self) -> float:
        return 1.0 - self.m

    @property
    def K(self) -> float:
        return ellip_K(self.m)

    @property
    def E(self) -> float:
        return ellip_E(self.m)


@dataclass(frozen=True)
class ThetaParams:
    """Purely imaginary ``tau = i * imtau`` and a truncation tolerance."""

    imtau: float
    truncation_tol: float = 1e-15

    def __post_init__(self):
        if not self.imtau > 0.0:
            raise DomainError(f"Im(tau) must be positive, got {self.imtau}")

    @classmethod
    def from_parameter(cls, m: float, truncation_tol: float = 1e-15) -> "ThetaParams":
        """tau = i K(1-m)/K(m)."""
        if not 0.0 < m < 1.0:
            raise DomainError("tau(m) is defined for 0 < m < 1")
        return cls(ellip_K_complement(m) / ellip_K(m), truncation_tol)

    @property
    def tau(self) -> complex:
        return 1j * self.imtau

    @property
    def nterms(self) -> int:
        return theta_nterms(self.imtau, self.truncation_tol)


def _check_m(m, upper_open=False):
    if not (m >= 0.0 and (m < 1.0 if upper_open else m <= 1.0)):
        bound = "[0, 1)" if upper_open else "[0, 1]"
        raise DomainError(f"elliptic parameter m must lie in {bound}, got {m}")


def ellip_K(m: float) -> float:
    """Complete elliptic integral of the first kind via the AGM."""
    _check_m(m, upper_open=True)
    return kernels.ellipk(float(m))


def ellip_E(m: float) -> float:
    """Complete elliptic integral of the second kind; ``E(1) = 1``."""
    _check_m(m)
    if m == 1.0:
        return 1.0
    return kernels.agm_ke(float(m))[1]


def ellip_K_complement(m: float) -> float:
    """K(1 - m) computed from ``sqrt(m)`` so small ``m`` keeps full accuracy."""
    if not 0.0 < m <= 1.0:
        raise DomainError(f"K(1-m) needs 0 < m <= 1, got {m}")
    return kernels.ellipkc(float(m))


def ellip_KE(m: float) -> tuple[float, float, float]:
    """Return ``(K, E, K - E)``; the difference carries no cancellation error."""
    _check_m(m, upper_open=True)
    return kernels.agm_ke(float(m))


def jacobi_cn(z, m: float):
    """Jacobi elliptic function cn(z | m) for real ``z`` (scalar or array)."""
    _check_m(m)
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if 1.0 - m < CN_SECH_SWITCH:
        out = 1.0 / np.cosh(zz)
    else:
        out = kernels.cn_array(np.ascontiguousarray(zz), float(m), kernels.ellipk(float(m)))
    return float(out[0]) if scalar else out


def theta_nterms(imtau: float, tol: float = 1e-15) -> int:
    """Smallest N with exp(-pi N^2 Im tau) < tol."""
    return max(1, int(math.ceil(math.sqrt(-math.log(tol) / (math.pi * imtau)))))


def _imtau(tau) -> float:
    if isinstance(tau, ThetaParams):
        return tau.imtau
    tau = complex(tau)
    if tau.imag <= 0.0:
        raise DomainError(f"theta3 needs Im(tau) > 0, got tau={tau}")
    if tau.real != 0.0:
        raise DomainError("only purely imaginary tau is supported")
    return tau.imag


def theta3(z, tau, derivatives: bool = False, truncation_tol: float = 1e-15):
    """Theta function sum_n exp(i pi n^2 tau + 2 pi i n z) for real ``z``.

    With ``derivatives=True`` return ``(theta, theta', theta'')`` obtained by
    differentiating the series term by term.
    """
    imtau = _imtau(tau)
    if imtau < THETA_CONDITIONING_LIMIT:
        warnings.warn(
            f"Im(tau)={imtau:.3g} is small; theta series is poorly conditioned",
            ConditioningWarning,
            stacklevel=2,
        )
    scalar = np.ndim(z) == 0
    zz = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=float)))
    # the series is 1-periodic; reduce to keep cos/sin arguments small
    zz = zz - np.round(zz)
    th, th1, th2 = kernels.theta3_derivs(zz, imtau, theta_nterms(imtau, truncation_tol))
    if scalar:
        th, th1, th2 = float(th[0]), float(th1[0]), float(th2[0])
    if derivatives:
        return th, th1, th2
    return th


def log_theta_dd(z, tau, truncation_tol: float = 1e-15):
    """Second derivative of log theta(z; tau) in z."""
    th, th1, th2 = theta3(z, tau, derivatives=True, truncation_tol=truncation_tol)
    r = th1 / th
    return th2 / th - r * r
