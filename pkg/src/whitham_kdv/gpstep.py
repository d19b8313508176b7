"""Self-similar modulation solution for the decreasing step u(x, 0) = c (x < 0), 0 (x > 0).

Inside ``-6 c t < x < 4 c t`` the field is the travelling wave with
``beta = (c, beta2, 0)`` where ``beta2`` solves ``lambda2(c, beta2, 0) = x / t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ParameterError
from .wave import RiemannTriple, WavePhase, edge_values, theta_u
from .whitham import speeds_raw

_MONOTONE_CHECKED = False


@dataclass(frozen=True)
class StepProblem:
    """Step of height ``c`` with wave phase ``phi0`` and dispersion ``epsilon``.

    The phase is a free parameter: the self-similar construction does not fix it.
    """

    c: float
    phi0: float = 0.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.c > 0.0:
            raise DomainError(f"step height must be positive, got {self.c}")
        if not self.epsilon > 0.0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")


def _lambda2(c: float, b2: float) -> float:
    return speeds_raw(c, b2, 0.0)[1]


def _check_monotone() -> None:
    global _MONOTONE_CHECKED
    if _MONOTONE_CHECKED:
        return
    b = np.linspace(0.0, 1.0, 401)
    lam = np.array([_lambda2(1.0, x) for x in b])
    if not np.all(np.diff(lam) > 0.0):
        raise ArithmeticError("lambda2(1, beta2, 0) is not increasing in beta2")
    _MONOTONE_CHECKED = True


def gp_edges(c: float) -> tuple[float, float]:
    """Self-similar edge speeds ``(z_-, z_+) = (-6c, 4c)``."""
    if not c > 0.0:
        raise DomainError(f"step height must be positive, got {c}")
    return _lambda2(c, 0.0), _lambda2(c, c)


def gp_beta2(z: float, c: float) -> float:
    """The ``beta2 in [0, c]`` with ``lambda2(c, beta2, 0) = z``."""
    zm, zp = gp_edges(c)
    if not zm <= z <= zp:
        raise DomainError(f"z={z} outside [{zm}, {zp}]")
    _check_monotone()
    if z == zm:
        return 0.0
    if z == zp:
        return float(c)
    return float(brentq(lambda b: _lambda2(c, b) - z, 0.0, c, xtol=1e-12 * c, rtol=1e-15))


def _triple(z: float, c: float) -> RiemannTriple:
    return RiemannTriple(c, gp_beta2(z, c), 0.0)


def gp_solution(x, t: float, prob: StepProblem):
    """Modulated wave inside the zone, ``c`` behind it and ``0`` ahead of it."""
    if not t > 0.0:
        raise DomainError("gp_solution needs t > 0")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    zm, zp = gp_edges(prob.c)
    out = np.empty(xs.size)
    phase = WavePhase(prob.phi0, prob.epsilon)
    for j, xj in enumerate(xs):
        z = xj / t
        if z <= zm:
            out[j] = prob.c
        elif z >= zp:
            out[j] = 0.0
        else:
            out[j] = theta_u(xj, t, _triple(z, prob.c), phase)
    return out if np.ndim(x) else float(out[0])


def envelopes(x, t: float, c: float):
    """Upper and lower envelopes ``(e1, e2) = (c + beta2, c - beta2)`` of the oscillations."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    zm, zp = gp_edges(c)
    up = np.empty(xs.size)
    low = np.empty(xs.size)
    for j, xj in enumerate(xs):
        z = min(max(xj / t, zm), zp)
        e1, e2, _ = edge_values(_triple(z, c))
        up[j], low[j] = e1, e2
    return up, low


def leading_edge_soliton(x, t: float, prob: StepProblem, phase_tilde: float = 0.0):
    """2c sech^2(sqrt(c)(x - x_+)/eps + log(16 c / (c - beta2)) / 2 + phase_tilde / eps).

    ``beta2`` is evaluated at ``x / t``, clamped to the zone; ahead of the
    zone (``beta2 = c``) the value is 0.
    """
    c, eps = prob.c, prob.epsilon
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    zm, zp = gp_edges(c)
    xp = zp * t
    out = np.zeros(xs.size)
    for j, xj in enumerate(xs):
        gap = c - gp_beta2(min(max(xj / t, zm), zp), c)
        if gap <= 0.0:
            continue
        arg = math.sqrt(c) * (xj - xp) / eps + 0.5 * math.log(16.0 * c / gap) + phase_tilde / eps
        out[j] = 2.0 * c / math.cosh(arg) ** 2
    return out if np.ndim(x) else float(out[0])


__all__ = [
    "StepProblem",
    "envelopes",
    "gp_beta2",
    "gp_edges",
    "gp_solution",
    "leading_edge_soliton",
]
