"""Characteristic speeds of the diagonal Whitham system and the
quasi-momentum / quasi-energy differentials of the cnoidal wave.

The speeds ``lambda_i = 2 (b1 + b2 + b3) + 4 prod_{k != i}(b_i - b_k) / (b_i + alpha)``
are evaluated through an exact rearrangement in terms of ``K``, ``E`` and
``K - E`` in which no denominator cancels, so they stay accurate all the way
to the soliton (m -> 1) and harmonic (m -> 0) edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import specfun
from .errors import ConditioningError, DomainError
from .wave import RiemannTriple

_GC_START = 64
_GC_MAX = 1 << 16
_QUAD_TOL = 1e-11
# series switch for (2 - m) E - 2 (1 - m) K
_GAP_SERIES_M = 1e-4


@dataclass(frozen=True)
class SpeedVector:
    lambda1: float
    lambda2: float
    lambda3: float
    degenerate: bool = False

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3)


def speed_parts(b1: float, b2: float, b3: float) -> tuple[float, float, float, float]:
    """Return ``(2*sum(beta), Lambda1, Lambda2, Lambda3)`` with lambda_i = 2*sum + Lambda_i."""
    d = b1 - b3
    s2 = 2.0 * (b1 + b2 + b3)
    if d <= 0.0:
        return s2, 0.0, 0.0, 0.0
    m = (b2 - b3) / d
    m1 = (b1 - b2) / d
    if m <= 0.0:
        return s2, 4.0 * d, -8.0 * d, -8.0 * d
    if m1 <= 0.0 or m >= 1.0:
        return s2, 0.0, 0.0, -4.0 * d
    K, E, KmE = specfun.ellip_KE(m)
    lam1 = 4.0 * d * m1 * K / E
    lam2 = -4.0 * d * m1 * m * K / (m * K - KmE)
    lam3 = -4.0 * d * m * K / KmE
    return s2, lam1, lam2, lam3


def speeds_raw(b1: float, b2: float, b3: float) -> tuple[float, float, float]:
    s2, l1, l2, l3 = speed_parts(b1, b2, b3)
    return s2 + l1, s2 + l2, s2 + l3


def speed_gaps(b1: float, b2: float, b3: float) -> tuple[float, float]:
    """``(lambda1 - lambda2, lambda2 - lambda3)`` without subtractive cancellation."""
    d = b1 - b3
    if d <= 0.0:
        return 0.0, 0.0
    m = (b2 - b3) / d
    m1 = (b1 - b2) / d
    if m <= 0.0:
        return 12.0 * d, 0.0
    if m1 <= 0.0 or m >= 1.0:
        return 0.0, 4.0 * d
    K, E, KmE = specfun.ellip_KE(m)
    emk = m * K - KmE  # E - (1 - m) K
    g12 = 4.0 * d * m1 * K * (1.0 / E + m / emk)
    if m < _GAP_SERIES_M:
        num = 0.5 * math.pi * m * m * (0.375 + m * (0.09375 + m * 45.0 / 1024.0))
    else:
        num = (1.0 + m1) * E - 2.0 * m1 * K
    g23 = 4.0 * d * m * K * num / (KmE * emk)
    return g12, g23


def speeds(triple: RiemannTriple) -> SpeedVector:
    """Characteristic speeds of the diagonal Whitham system."""
    b1, b2, b3 = triple.as_tuple()
    if triple.degenerate:
        return SpeedVector(6.0 * b1, 6.0 * b1, 6.0 * b1, degenerate=True)
    return SpeedVector(*speeds_raw(b1, b2, b3))


def _wavenumber(b1, b2, b3):
    d = b1 - b3
    return math.pi * math.sqrt(d) / specfun.ellip_K((b2 - b3) / d)


def speeds_via_k(triple: RiemannTriple, rel_step: float = 1e-5) -> SpeedVector:
    """Speeds from ``lambda_i = 2 sum(beta) + 2 k / (dk/dbeta_i)``.

    ``dk/dbeta_i`` is taken by fourth-order centred differences.
    """
    m = triple.m
    if m < 1e-4 or triple.m1 < 1e-4:
        raise ConditioningError(f"speeds_via_k needs 1e-4 <= m <= 1 - 1e-4, got m={m}")
    beta = np.array(triple.as_tuple())
    h = rel_step * triple.width
    k0 = _wavenumber(*beta)
    out = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        dk = (
            -_wavenumber(*(beta + 2 * e))
            + 8.0 * _wavenumber(*(beta + e))
            - 8.0 * _wavenumber(*(beta - e))
            + _wavenumber(*(beta - 2 * e))
        ) / (12.0 * h)
        out.append(2.0 * triple.total + 2.0 * k0 / dk)
    return SpeedVector(*out)


# ---------------------------------------------------------------------------
# quadrature helpers


def gauss_chebyshev_band(g, a: float, b: float, tol: float = _QUAD_TOL) -> float:
    """int_a^b g(lam) / sqrt((b - lam)(lam - a)) dlam, node count doubled to ``tol``."""
    n = _GC_START
    prev = None
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    while True:
        nodes = mid + half * np.cos((2.0 * np.arange(1, n + 1) - 1.0) * math.pi / (2.0 * n))
        val = math.pi / n * float(np.sum(g(nodes)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n >= _GC_MAX:
            return val
        prev = val
        n *= 2


def gauss_legendre(g, a: float, b: float, tol: float = _QUAD_TOL) -> float:
    """int_a^b g, Gauss-Legendre with node doubling."""
    if a == b:
        return 0.0
    n = _GC_START
    prev = None
    while True:
        x, w = _legendre(n)
        val = 0.5 * (b - a) * float(np.dot(w, g(0.5 * (b - a) * x + 0.5 * (b + a))))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n >= 4096:
            return val
        prev = val
        n *= 2


_LEG_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _legendre(n):
    if n not in _LEG_CACHE:
        _LEG_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEG_CACHE[n]


# ---------------------------------------------------------------------------
# quasi-momentum / quasi-energy


class AbelianDifferentials:
    """Normalised differentials dp, dq of the genus-one spectral curve.

    ``dp = (lam + alpha) dlam / (2 sqrt(R))`` and
    ``dq = 12 (lam^2 - sum(beta) lam / 2 + gamma) dlam / (2 sqrt(R))`` with
    ``R = (b1 - lam)(lam - b2)(lam - b3)``. The constants make both integrals
    over the gap ``[b3, b2]`` vanish. A band integral ``int_{b2}^{b1}`` is half
    of the cycle integral around the band, so ``k`` and ``omega`` are twice
    the band integrals.
    """

    def __init__(self, triple: RiemannTriple):
        if not (triple.beta1 > triple.beta2 > triple.beta3):
            raise DomainError("differentials need strictly ordered Riemann invariants")
        self.triple = triple

    @property
    def alpha(self) -> float:
        return self.triple.alpha

    @cached_property
    def gamma(self) -> float:
        b1, b2, b3 = self.triple.as_tuple()
        return self.alpha / 6.0 * (b1 + b2 + b3) + (b1 * b2 + b1 * b3 + b2 * b3) / 3.0

    def _p_num(self, lam):
        return lam + self.alpha

    def _q_num(self, lam):
        return 12.0 * (lam * lam - 0.5 * self.triple.total * lam + self.gamma)

    def _R(self, lam):
        b1, b2, b3 = self.triple.as_tuple()
        return (b1 - lam) * (lam - b2) * (lam - b3)

    def dp(self, lam):
        """Density of dp; imaginary inside the gaps."""
        lam = np.asarray(lam, dtype=float)
        return self._p_num(lam) / (2.0 * np.emath.sqrt(self._R(lam)))

    def dq(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self._q_num(lam) / (2.0 * np.emath.sqrt(self._R(lam)))

    def band_integral(self, which: str) -> float:
        """int_{b2}^{b1} of dp or dq."""
        num = self._p_num if which == "p" else self._q_num
        b1, b2, b3 = self.triple.as_tuple()
        return 0.5 * gauss_chebyshev_band(lambda lam: num(lam) / np.sqrt(lam - b3), b2, b1)

    def gap_integral(self, which: str) -> float:
        """|int_{b3}^{b2}| of dp or dq (the factor i from the square root dropped)."""
        num = self._p_num if which == "p" else self._q_num
        b1, b2, b3 = self.triple.as_tuple()
        return 0.5 * gauss_chebyshev_band(lambda lam: num(lam) / np.sqrt(b1 - lam), b3, b2)

    def _integral_to(self, num, lam: float) -> float:
        b1, b2, b3 = self.triple.as_tuple()
        if b2 <= lam <= b1:
            theta = math.asin(math.sqrt((lam - b2) / (b1 - b2)))

            def g(th):
                ll = b2 + (b1 - b2) * np.sin(th) ** 2
                return num(ll) / np.sqrt(ll - b3)

            return gauss_legendre(g, 0.0, theta)
        if lam <= b3:
            # through the gap (zero by normalisation), then down the lower band
            def g(s):
                ll = b3 - s * s
                return -num(ll) / np.sqrt((b1 - ll) * (b2 - ll))

            return gauss_legendre(g, 0.0, math.sqrt(b3 - lam))
        raise DomainError(f"lambda={lam} lies in a spectral gap")


def quasi_momentum(triple: RiemannTriple, lam: float) -> float:
    """p(lam) = int_{b2}^{lam} dp on the bands (-inf, b3] and [b2, b1]."""
    ad = AbelianDifferentials(triple)
    return ad._integral_to(ad._p_num, lam)


def quasi_energy(triple: RiemannTriple, lam: float) -> float:
    """q(lam) = int_{b2}^{lam} dq on the bands."""
    ad = AbelianDifferentials(triple)
    return ad._integral_to(ad._q_num, lam)
