"""Periodic travelling wave of KdV in Riemann-invariant coordinates.

Both the cn^2 form and the theta-function form are provided; they share the
phase convention ``Omega = k x - omega t + phi0`` and agree pointwise (the
``+K(m)`` shift inside the cn^2 argument is exactly the half period that puts
the crest at ``Omega / (2 pi eps) = 1/2 (mod 1)``, where log theta'' peaks).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import specfun
from .errors import DomainError, ParameterError

THETA_SOLITON_SWITCH = 1e-10
THETA_HARMONIC_SWITCH = 1e-12


@dataclass(frozen=True)
class RiemannTriple:
    """Ordered Riemann invariants ``beta1 >= beta2 >= beta3``."""

    beta1: float
    beta2: float
    beta3: float

    def __post_init__(self):
        b1, b2, b3 = self.beta1, self.beta2, self.beta3
        if not (b1 >= b2 >= b3):
            raise DomainError(f"Riemann invariants must be ordered, got {(b1, b2, b3)}")

    @classmethod
    def from_m(cls, beta1: float, beta3: float, m: float) -> "RiemannTriple":
        return cls(beta1, beta3 + m * (beta1 - beta3), beta3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.beta1, self.beta2, self.beta3)

    @property
    def width(self) -> float:
        """beta1 - beta3."""
        return self.beta1 - self.beta3

    @property
    def total(self) -> float:
        return self.beta1 + self.beta2 + self.beta3

    @property
    def degenerate(self) -> bool:
        return self.beta1 == self.beta3

    @cached_property
    def m(self) -> float:
        if self.degenerate:
            return 0.0
        return min(1.0, max(0.0, (self.beta2 - self.beta3) / self.width))

    @cached_property
    def m1(self) -> float:
        """1 - m, formed from beta1 - beta2 to avoid cancellation."""
        if self.degenerate:
            return 1.0
        return min(1.0, max(0.0, (self.beta1 - self.beta2) / self.width))

    @cached_property
    def _ke(self) -> tuple[float, float, float]:
        if self.m1 == 0.0:
            return math.inf, 1.0, math.inf
        return specfun.ellip_KE(self.m)

    @property
    def K(self) -> float:
        return self._ke[0]

    @property
    def E(self) -> float:
        return self._ke[1]

    @property
    def K_minus_E(self) -> float:
        return self._ke[2]

    @cached_property
    def k(self) -> float:
        """Wave number pi sqrt(beta1 - beta3) / K(m)."""
        if self.degenerate or self.m1 == 0.0:
            return 0.0
        return math.pi * math.sqrt(self.width) / self.K

    @property
    def omega(self) -> float:
        return 2.0 * self.k * self.total

    @cached_property
    def alpha(self) -> float:
        """-beta1 + (beta1 - beta3) E/K."""
        if self.degenerate:
            return -self.beta1
        if self.m1 == 0.0:
            return -self.beta1
        return -self.beta1 + self.width * self.E / self.K

    @cached_property
    def imtau(self) -> float:
        """Im(tau) with tau = i K(1-m)/K(m)."""
        if not 0.0 < self.m < 1.0:
            raise DomainError("tau is only defined for 0 < m < 1")
        return specfun.ellip_K_complement(self.m) / self.K

    @property
    def wavelength(self) -> float:
        """Spatial period in units of epsilon: u(x + eps*L) = u(x)."""
        return 2.0 * math.pi / self.k


@dataclass(frozen=True)
class WavePhase:
    phi0: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")


def edge_values(triple: RiemannTriple) -> tuple[float, float, float]:
    """Roots e1 >= e2 >= e3 of the travelling-wave cubic."""
    b1, b2, b3 = triple.as_tuple()
    return b1 + b2 - b3, b1 - b2 + b3, -b1 + b2 + b3


def riemann_from_edges(e1: float, e2: float, e3: float) -> RiemannTriple:
    """Inverse of :func:`edge_values`; round-off reordering of coincident invariants is clamped."""
    b1, b2, b3 = 0.5 * (e1 + e2), 0.5 * (e1 + e3), 0.5 * (e2 + e3)
    tol = 4 * np.finfo(float).eps * (abs(e1) + abs(e2) + abs(e3))
    if b2 > b1 + tol or b3 > b2 + tol:
        raise DomainError(f"edge values must be ordered, got {(e1, e2, e3)}")
    b2 = min(b2, b1)
    return RiemannTriple(b1, b2, min(b3, b2))


def phase_omega(x, t, triple: RiemannTriple, phase: WavePhase):
    """Omega = k x - omega t + phi0."""
    return triple.k * (np.asarray(x, dtype=float) - 2.0 * triple.total * np.asarray(t, dtype=float)) + phase.phi0


def _reduce(y, half_period):
    return y - 2.0 * half_period * np.round(y / (2.0 * half_period))


def cnoidal_u(x, t, triple: RiemannTriple, phase: WavePhase):
    """u = b1 + b3 - b2 + 2 (b2 - b3) cn^2(K Omega/(pi eps) + K; m).

    For ``m = 1`` exactly the wave is a single soliton with its crest at
    ``x = 2 (b1 + b2 + b3) t``; ``phi0`` is then ignored.
    """
    if not isinstance(phase, WavePhase):
        raise ParameterError("phase must be a WavePhase")
    b1, b2, b3 = triple.as_tuple()
    x = np.asarray(x, dtype=float)
    if triple.degenerate:
        return np.full(np.broadcast(x, np.asarray(t)).shape, b1)[()]
    eps = phase.epsilon
    if triple.m1 == 0.0:
        y = math.sqrt(triple.width) * (x - 2.0 * triple.total * np.asarray(t, dtype=float)) / eps
        return (b3 + 2.0 * (b2 - b3) / np.cosh(y) ** 2)[()]
    K = triple.K
    arg = K * phase_omega(x, t, triple, phase) / (math.pi * eps) + K
    arg = _reduce(arg, 2.0 * K)
    cn = specfun.jacobi_cn(arg, triple.m)
    return (b1 + b3 - b2 + 2.0 * (b2 - b3) * np.asarray(cn) ** 2)[()]


def soliton_limit_u(x, t, triple: RiemannTriple, phase: WavePhase):
    """sech^2 train approximating the wave for m close to 1.

    Uses the same crest positions as :func:`cnoidal_u`; each period carries
    one soliton ``b3 + 2 (b2 - b3) sech^2``.
    """
    b1, b2, b3 = triple.as_tuple()
    K = triple.K
    arg = K * phase_omega(x, t, triple, phase) / (math.pi * phase.epsilon) + K
    y = _reduce(arg, K)
    return (b3 + 2.0 * (b2 - b3) / np.cosh(y) ** 2)[()]


def harmonic_limit_u(x, t, triple: RiemannTriple, phase: WavePhase):
    """Linear (small-amplitude) limit: b1 + (b2 - b3) cos(2 K Omega/(pi eps) + 2 K)."""
    b1, b2, b3 = triple.as_tuple()
    K = triple.K
    arg = K * phase_omega(x, t, triple, phase) / (math.pi * phase.epsilon) + K
    return (b1 + (b2 - b3) * np.cos(2.0 * _reduce(arg, 2.0 * K)))[()]


def theta_u(x, t, triple: RiemannTriple, phase: WavePhase):
    """u = b1 + b2 + b3 + 2 alpha + 2 eps^2 d^2/dx^2 log theta(Omega/(2 pi eps); tau).

    The x-derivative is taken analytically: d/dx of the theta argument is
    ``k / (2 pi eps)``. Near the ends of the modulus range the theta series
    degenerates and the cn^2 form is used instead.
    """
    if not isinstance(phase, WavePhase):
        raise ParameterError("phase must be a WavePhase")
    if triple.degenerate:
        return cnoidal_u(x, t, triple, phase)
    if triple.m < THETA_HARMONIC_SWITCH or triple.m1 < THETA_SOLITON_SWITCH:
        return cnoidal_u(x, t, triple, phase)
    eps = phase.epsilon
    z = phase_omega(x, t, triple, phase) / (2.0 * math.pi * eps)
    ld2 = specfun.log_theta_dd(z, specfun.ThetaParams(triple.imtau))
    scale = triple.k / (2.0 * math.pi * eps)
    return (triple.total + 2.0 * triple.alpha + 2.0 * eps * eps * scale * scale * np.asarray(ld2))[()]
