"""Hastings-McLeod solution of q'' = s q + 2 q^3 and the trailing-edge expansion.

Near the trailing edge the KdV field is

    u = v - 4 eps^{1/3} c^{-1/3} q(s) cos(Theta / eps),
    s = -(x - x_-) / (c^{1/3} sqrt(v - xi) eps^{2/3}),

with ``q`` the Hastings-McLeod solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .errors import ConditioningError, ParameterError, RefineMeshError
from .hodograph import EdgeLayerData, trailing_edge
from .hopf import InitialProfile

#: |s| below which Ai is summed from its Maclaurin series
AIRY_SERIES_LIMIT = 7.0

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))


def _airy_series(s: float) -> float:
    # Ai = Ai(0) f(s) + Ai'(0) g(s); f, g from the recurrences of y'' = s y
    z = s * s * s
    f = 1.0
    g = s
    tf, tg = 1.0, s
    k = 0
    while True:
        k += 1
        tf *= z / ((3 * k - 1) * (3 * k))
        tg *= z / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if abs(tf) + abs(tg) < 1e-18 * (abs(f) + abs(g)) or k > 200:
            break
    return _AI0 * f + _AIP0 * g


def _u_coeffs(n: int) -> list[float]:
    # u_k = (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k) u_{k-1}
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    return u


_U = _u_coeffs(40)


def _asym_sum(zeta: float, alternating: bool, start: int = 0, step: int = 1) -> float:
    total = 0.0
    prev = math.inf
    for k in range(start, len(_U), step):
        term = _U[k] / zeta**k
        if alternating and k % 2 == 1:
            term = -term
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
    return total


def airy(s):
    """Airy function Ai(s) for real ``s`` (scalar or array).

    Maclaurin series for ``|s| <= 7``; beyond that the large-argument
    expansions, summed to the smallest term.
    """
    if np.ndim(s):
        return np.vectorize(airy, otypes=[float])(s)
    s = float(s)
    if abs(s) <= AIRY_SERIES_LIMIT:
        return _airy_series(s)
    if s > 0:
        zeta = 2.0 / 3.0 * s**1.5
        return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * s**0.25) * _asym_sum(zeta, True)
    x = -s
    zeta = 2.0 / 3.0 * x**1.5
    # P = sum (-1)^k u_{2k} zeta^{-2k}, Q = sum (-1)^k u_{2k+1} zeta^{-2k-1}
    P = Q = 0.0
    prev = math.inf
    for k in range(0, len(_U) // 2):
        tp = (-1) ** k * _U[2 * k] / zeta ** (2 * k)
        tq = (-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        if abs(tp) > prev:
            break
        P += tp
        Q += tq
        prev = abs(tp)
    ph = zeta + math.pi / 4.0
    return (math.sin(ph) * P - math.cos(ph) * Q) / (math.sqrt(math.pi) * x**0.25)


def hm_left_asymptotic(s):
    """sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6) + 10657/(1024 s^9)) for s << 0."""
    s = np.asarray(s, dtype=float)
    return np.sqrt(-s / 2.0) * (1.0 + 1.0 / (8.0 * s**3) - 73.0 / (128.0 * s**6) + 10657.0 / (1024.0 * s**9))


# ---------------------------------------------------------------------------
# Chebyshev collocation


def _cheb(n: int, L: float):
    """Chebyshev-Lobatto points on [-L, L] (descending) and the differentiation matrix."""
    j = np.arange(n + 1)
    x = np.cos(math.pi * j / n)
    c = np.where((j == 0) | (j == n), 2.0, 1.0) * (-1.0) ** j
    X = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (X + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return L * x, D / L


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from values at the Lobatto points cos(pi j/n)."""
    n = values.size - 1
    a = fft.dct(values, type=1) / n
    a[0] *= 0.5
    a[-1] *= 0.5
    return a


@dataclass
class HastingsMcLeod:
    """Hastings-McLeod solution on [-L, L] with spectral evaluation."""

    L: float
    s: np.ndarray
    q: np.ndarray
    residual: float
    coeffs: np.ndarray = field(repr=False)

    def _eval(self, s, deriv: int = 0):
        s = np.asarray(s, dtype=float)
        c = self.coeffs
        for _ in range(deriv):
            c = np.polynomial.chebyshev.chebder(c)
        return np.polynomial.chebyshev.chebval(s / self.L, c) / self.L**deriv

    def __call__(self, s):
        """q(s); outside [-L, L] the boundary asymptotics are used."""
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        inside = np.abs(s) <= self.L
        out[inside] = self._eval(s[inside])
        right = s > self.L
        if np.any(right):
            out[right] = airy(s[right])
        left = s < -self.L
        if np.any(left):
            out[left] = hm_left_asymptotic(s[left])
        return out[()]

    def derivative(self, s, order: int = 1):
        s = np.asarray(s, dtype=float)
        if np.any(np.abs(s) > self.L):
            raise ValueError("derivatives are only available on [-L, L]")
        return self._eval(s, order)[()]

    def ode_residual(self, s):
        s = np.asarray(s, dtype=float)
        q = self._eval(s)
        return (self._eval(s, 2) - s * q - 2.0 * q**3)[()]


def _solve_hm(L: float, n: int, guess=None, tol: float = 1e-12, maxit: int = 40):
    s, D = _cheb(n, L)
    D2 = D @ D
    if guess is None:
        # positive profile joining sqrt(-s/2) to a decaying tail
        g = np.sqrt(np.log1p(np.exp(-2.0 * s)) / 4.0) * np.exp(-np.clip(s, 0, None) ** 1.5 / 1.5)
    else:
        g = guess(s)
    q = g.copy()
    q[0] = airy(L)
    q[-1] = float(hm_left_asymptotic(-L))
    for it in range(maxit):
        F = D2 @ q - s * q - 2.0 * q**3
        F[0] = 0.0
        F[-1] = 0.0
        Jm = D2 - np.diag(s + 6.0 * q * q)
        Jm[0, :] = 0.0
        Jm[-1, :] = 0.0
        Jm[0, 0] = 1.0
        Jm[-1, -1] = 1.0
        dq = np.linalg.solve(Jm, -F)
        q += dq
        if np.max(np.abs(dq)) < tol:
            break
    else:
        raise RefineMeshError(f"Hastings-McLeod Newton did not converge (L={L}, n={n})")
    F = D2 @ q - s * q - 2.0 * q**3
    res = float(np.max(np.abs(F[1:-1])))
    return s, q, res


def hastings_mcleod(L: float = 10.0, n: int = 160) -> HastingsMcLeod:
    """Solve the Hastings-McLeod boundary-value problem on [-L, L].

    Newton on a Chebyshev collocation discretisation with boundary values
    ``q(L) = Ai(L)`` and the four-term left asymptotic series; the solve on
    ``[-6, 6]`` seeds the final domain.
    """
    if L < 8:
        raise ValueError("L must be at least 8")
    s0, q0, _ = _solve_hm(6.0, max(64, n // 2))
    c0 = _cheb_coeffs(q0)

    def seed(s):
        inside = np.abs(s) <= 6.0
        out = np.where(s > 6.0, airy(np.clip(s, 6.0, None)), hm_left_asymptotic(np.clip(s, None, -6.0)))
        out[inside] = np.polynomial.chebyshev.chebval(s[inside] / 6.0, c0)
        return out

    s, q, res = _solve_hm(L, n, guess=seed)
    if np.any(q <= 0.0):
        raise RefineMeshError("collocation converged to a solution that is not positive")
    return HastingsMcLeod(L=L, s=s, q=q, residual=res, coeffs=_cheb_coeffs(q))


# ---------------------------------------------------------------------------
# trailing-edge expansion


def edge_phase(x, edge: EdgeLayerData) -> np.ndarray:
    """Theta(x) = 2 sqrt(v - xi)(x - x_-) + 2 int_xi^v (h_L'(y) + 6t) sqrt(y - xi) dy."""
    return 2.0 * math.sqrt(edge.v - edge.xi) * (np.asarray(x, dtype=float) - edge.x_minus) + 2.0 * edge.theta_base


def edge_variable(x, epsilon: float, edge: EdgeLayerData) -> np.ndarray:
    """s = -(x - x_-) / (c^{1/3} sqrt(v - xi) eps^{2/3})."""
    ce = edge.c_e
    if not ce > 0.0:
        raise ConditioningError(f"edge coefficient c = {ce} is not positive; edge data invalid")
    scale = ce ** (1.0 / 3.0) * math.sqrt(edge.v - edge.xi) * epsilon ** (2.0 / 3.0)
    return -(np.asarray(x, dtype=float) - edge.x_minus) / scale


def edge_expansion(x, t: float, epsilon: float, edge: EdgeLayerData | None, hm: HastingsMcLeod,
                   profile: InitialProfile | None = None):
    """u = v - 4 eps^{1/3} c^{-1/3} q(s) cos(Theta / eps) near the trailing edge.

    ``edge`` may be ``None``, in which case it is solved for ``profile`` at ``t``.
    """
    if edge is None:
        if profile is None:
            raise ValueError("either edge data or a profile is required")
        edge = trailing_edge(t, profile)
    elif abs(edge.t - t) > 1e-12 * max(1.0, abs(t)):
        raise ValueError(f"edge data are for t={edge.t}, not t={t}")
    if not epsilon > 0.0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    s = edge_variable(x, epsilon, edge)
    amp = 4.0 * epsilon ** (1.0 / 3.0) / edge.c_e ** (1.0 / 3.0)
    return (edge.v - amp * hm(s) * np.cos(edge_phase(x, edge) / epsilon))[()]


__all__ = [
    "AIRY_SERIES_LIMIT",
    "HastingsMcLeod",
    "airy",
    "edge_expansion",
    "edge_phase",
    "edge_variable",
    "hastings_mcleod",
    "hm_left_asymptotic",
]
