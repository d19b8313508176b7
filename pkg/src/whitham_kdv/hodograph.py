"""Hodograph solution of the Whitham system for data with a single decreasing part.

The potential ``q(b1, b2, b3)`` solves the Euler-Poisson-Darboux system
``q_i - q_j = 2 (b_i - b_j) q_ij`` with ``q(b, b, b) = h_L(b)``. Integrating the
inner integral by parts along the characteristic variable ``zeta`` (with
``b3 = f(zeta3)``) gives one formula valid on both sides of the hump minimum::

    q = zeta3 - (1/pi) int_0^pi J(lam) / sqrt(lam - b3) dtheta,
    J(lam) = int_{h_L(lam)}^{zeta3} sqrt(lam - f(zeta)) dzeta,
    lam = (b1 + b2)/2 + (b1 - b2)/2 cos(theta).

``zeta3 < zeta_min`` reproduces the double-integral form built from ``h_L``;
``zeta3 > zeta_min`` the form that also involves the increasing inverse ``h_R``.
Parametrising ``b3`` by ``zeta3`` makes the crossing of ``f_min`` smooth.

Velocities are ``w_i = (lam_i - 2 sum(beta)) q_i / 2 + q`` and the solution
satisfies ``x = lam_i t + w_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, optimize

from . import whitham
from .errors import (
    ConfigurationError,
    ContinuationNeeded,
    DomainError,
    OutsideZone,
)
from .hopf import InitialProfile, breaking_point, hopf_single
from .wave import RiemannTriple, WavePhase, theta_u

_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _half_pi_nodes(n: int):
    """Gauss-Legendre nodes and weights on [0, pi/2]."""
    if n not in _NODE_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _NODE_CACHE[n] = (0.25 * math.pi * (x + 1.0), 0.25 * math.pi * w)
    return _NODE_CACHE[n]


def _unit_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


# ---------------------------------------------------------------------------
# EPD potential


class EpdPotential:
    """Evaluator of q and its gradient for one initial profile.

    Parameters
    ----------
    profile
        Initial datum; must provide ``h_L`` and, when ``b3`` sits on the
        increasing side, ``h_R``.
    n_theta, n_phi
        Midpoint nodes in ``theta`` (spectrally accurate for the smooth periodic
        integrand) and Gauss-Legendre nodes for the ``zeta`` integral after the
        substitution ``zeta = h_L(lam) + (zeta3 - h_L(lam)) sin^2(phi)``.
    """

    def __init__(self, profile: InitialProfile, n_theta: int = 64, n_phi: int = 64):
        self.profile = profile
        self.n_theta = int(n_theta)
        self.n_phi = int(n_phi)
        self._theta = (np.arange(self.n_theta) + 0.5) * math.pi / self.n_theta
        self._cos = np.cos(self._theta)
        phi, w = _half_pi_nodes(self.n_phi)
        self._sp, self._cp, self._w = np.sin(phi), np.cos(phi), w

    def zeta3(self, b3: float, branch: str = "L") -> float:
        p = self.profile
        if branch == "L":
            return float(p.h_L(b3))
        if branch != "R":
            raise ValueError("branch must be 'L' or 'R'")
        if not p.has_right_branch:
            raise ConfigurationError("b3 on the increasing side needs an increasing inverse h_R")
        return float(p.h_R(b3))

    def evaluate(self, b1: float, b2: float, zeta3: float, gradient: bool = True):
        """q and (optionally) dq/db_i, with ``b3 = f(zeta3)``."""
        p = self.profile
        b3 = float(p.f(zeta3))
        if 0.0 < b3 - b2 <= 1e-13 * (1.0 + abs(b2)):
            # round-off from the f(h(b3)) round trip
            b3 = b2
        if not b1 >= b2 >= b3:
            raise DomainError(f"need b1 >= b2 >= b3, got {(b1, b2, b3)}")
        return self._evaluate(b1, b2 - b3, b1 - b2, zeta3, gradient)

    def _length(self, zeta3: float, d: np.ndarray) -> np.ndarray:
        """L with f(zeta3 - L) = f(zeta3) + d, refined by Newton on the stable increment."""
        p = self.profile
        b3 = float(p.f(zeta3))
        L = zeta3 - p.h_L(b3 + d)
        for _ in range(3):
            g = p.f_increment(zeta3 - L, L) + d
            fp = p.fprime(zeta3 - L)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(fp != 0.0, g / fp, 0.0)
            L = L + step
        return L

    def _evaluate(self, b1: float, gap23: float, gap12: float, zeta3: float, gradient: bool):
        """Core evaluation from ``b2 - b3`` and ``b1 - b2`` given separately."""
        p = self.profile
        c = self._cos
        # lam - b3 without cancellation
        d = gap23 + 0.5 * gap12 * (1.0 + c)
        L = self._length(zeta3, d)[:, None]
        sp, cp = self._sp, self._cp
        zl = zeta3 - L
        # lam - f(zeta) = f(zl) - f(zl + L sin^2)
        r = np.maximum(-p.f_increment(zl, L * sp * sp), 0.0)
        jac = 2.0 * L * sp * cp
        J = (np.sqrt(r) * jac) @ self._w
        sq = np.sqrt(d)
        # as d -> 0 (all three invariants merge) J ~ (2/3) d^{3/2} / |f'(zeta3)|;
        # the limits of the ratios are accurate to O(d)
        zero = d <= 1e-12 * (1.0 + abs(float(p.f(zeta3))))
        safe = np.where(zero, 1.0, sq)
        q = zeta3 - float(np.mean(np.where(zero, 0.0, J / safe)))
        if not gradient:
            return q
        with np.errstate(divide="ignore", invalid="ignore"):
            Jl = 0.5 * ((jac / np.sqrt(r)) @ self._w)
        Jl = np.where(np.isfinite(Jl), Jl, 0.0)
        afp = abs(float(p.fprime(zeta3))) if np.any(zero) else 1.0
        J32 = np.where(zero, 2.0 / (3.0 * afp), J / (np.where(zero, 1.0, d) * safe))
        Gp = np.where(zero, 1.0 / afp, Jl / safe) - 0.5 * J32
        g1 = -float(np.mean(Gp * (1.0 + c))) * 0.5
        g2 = -float(np.mean(Gp * (1.0 - c))) * 0.5
        g3 = -0.5 * float(np.mean(J32))
        return q, np.array([g1, g2, g3])

    def _zeta3_of(self, triple: RiemannTriple, branch: str) -> float:
        return self.zeta3(triple.beta3, branch)

    def q(self, triple: RiemannTriple, branch: str = "L") -> float:
        return self.evaluate(triple.beta1, triple.beta2, self._zeta3_of(triple, branch), gradient=False)

    def gradient(self, triple: RiemannTriple, branch: str = "L") -> np.ndarray:
        return self.evaluate(triple.beta1, triple.beta2, self._zeta3_of(triple, branch))[1]


def _check_range(triple: RiemannTriple, profile: InitialProfile):
    if triple.beta3 < profile.f_min:
        raise DomainError(f"b3={triple.beta3} lies below the minimum {profile.f_min} of the data")


def epd_q(triple: RiemannTriple, profile: InitialProfile, branch: str = "L", **quad) -> float:
    """EPD potential q; ``branch="R"`` places b3 on the increasing side of the hump."""
    _check_range(triple, profile)
    return EpdPotential(profile, **quad).q(triple, branch)


def epd_gradient(triple: RiemannTriple, profile: InitialProfile, branch: str = "L", **quad) -> np.ndarray:
    """(dq/db1, dq/db2, dq/db3) by differentiation under the integral."""
    _check_range(triple, profile)
    return EpdPotential(profile, **quad).gradient(triple, branch)


def epd_q_direct(triple: RiemannTriple, profile: InitialProfile, branch: str = "L", n: int = 200) -> float:
    """q from the original integrals in the spectral variable (slow; for cross-checks).

    ``branch="L"``: the double integral of ``h_L`` over
    ``b = (1 - s^2)(b2 + (b1 - b2)(1 + sin th)/2) + s^2 b3``.
    ``branch="R"``: ``(1/2pi) int_{b2}^{b1} I(lam) dlam / sqrt((b1-lam)(lam-b2)(lam-b3))``
    with ``I = int_{fmin}^{lam} h_L/sqrt(lam - xi) - int_{fmin}^{b3} h_R/sqrt(lam - xi)``.
    """
    _check_range(triple, profile)
    b1, b2, b3 = triple.as_tuple()
    s, ws = _unit_nodes(n)
    if branch == "L":
        th, wt = np.polynomial.legendre.leggauss(n)
        th, wt = 0.5 * math.pi * th, 0.5 * math.pi * wt
        B = b2 + (b1 - b2) * (1.0 + np.sin(th)) / 2.0
        beta = (1.0 - s[:, None] ** 2) * B[None, :] + s[:, None] ** 2 * b3
        return float(ws @ profile.h_L(beta) @ wt) / math.pi
    if not profile.has_right_branch:
        raise ConfigurationError("b3 on the increasing side needs an increasing inverse h_R")
    fmin = profile.f_min
    phi, wp = _half_pi_nodes(n)
    th = (np.arange(n) + 0.5) * math.pi / n
    lam = 0.5 * (b1 + b2) + 0.5 * (b1 - b2) * np.cos(th)
    sp2 = np.sin(phi) ** 2
    # xi = fmin + (lam - fmin) sin^2 phi: dxi/sqrt(lam - xi) = 2 sqrt(lam - fmin) sin(phi) dphi
    xiL = fmin + (lam[:, None] - fmin) * sp2
    IL = 2.0 * np.sqrt(lam - fmin) * ((profile.h_L(np.maximum(xiL, fmin)) * np.sin(phi)) @ wp)
    xiR = fmin + (b3 - fmin) * sp2
    jacR = 2.0 * (b3 - fmin) * np.sin(phi) * np.cos(phi)
    IR = (profile.h_R(np.maximum(xiR, fmin)) * jacR / np.sqrt(lam[:, None] - xiR)) @ wp
    return float(np.mean((IL - IR) / np.sqrt(lam - b3))) / 2.0


def tsarev_w(triple: RiemannTriple, profile: InitialProfile, branch: str = "L", **quad) -> np.ndarray:
    """w_i = (lambda_i - 2 sum(beta)) dq/db_i / 2 + q."""
    _check_range(triple, profile)
    pot = EpdPotential(profile, **quad)
    q, g = pot.evaluate(triple.beta1, triple.beta2, pot.zeta3(triple.beta3, branch))
    s2, l1, l2, l3 = whitham.speed_parts(*triple.as_tuple())
    return 0.5 * np.array([l1, l2, l3]) * g + q


# ---------------------------------------------------------------------------
# hodograph equations in the coordinates (b1, m, zeta3)


def _branch_of(zeta3: float, profile: InitialProfile) -> str:
    zm = profile.zeta_min
    return "R" if (zm is not None and zeta3 > zm) else "L"


def coords_from_triple(triple: RiemannTriple, profile: InitialProfile, branch: str | None = None):
    """(b1, m, zeta3) for a triple; the branch defaults to the decreasing side."""
    pot_branch = branch or "L"
    z3 = float(profile.h_L(triple.beta3)) if pot_branch == "L" else float(profile.h_R(triple.beta3))
    return np.array([triple.beta1, triple.m, z3])


def triple_from_coords(y, profile: InitialProfile) -> RiemannTriple:
    b1, m, z3 = float(y[0]), float(y[1]), float(y[2])
    b3 = float(profile.f(z3))
    return RiemannTriple(b1, b3 + m * (b1 - b3), b3)


@dataclass
class _Eval:
    triple: RiemannTriple
    q: float
    grad: np.ndarray
    lam: np.ndarray
    d12: float
    d23: float
    x: float


def _hodo_eval(y, t: float, pot: EpdPotential) -> _Eval:
    b1, m, z3 = float(y[0]), float(y[1]), float(y[2])
    p = pot.profile
    b3 = float(p.f(z3))
    if not (0.0 <= m <= 1.0) or b1 < b3:
        raise OutsideZone(f"coordinates left the zone: b1={b1}, m={m}, b3={b3}")
    D = b1 - b3
    b2 = b3 + m * D
    if m == 1.0:
        b2 = b1
    q, g = pot.evaluate(b1, b2, z3)
    s2, l1, l2, l3 = whitham.speed_parts(b1, b2, b3)
    g12, g23 = whitham.speed_gaps(b1, b2, b3)
    d12 = t + 0.5 * g[0] + (0.5 * l2 * (g[0] - g[1]) / g12 if g12 > 0.0 else 0.0)
    if g23 > 0.0:
        d23 = t + 0.5 * g[2] + 0.5 * l2 * (g[1] - g[2]) / g23
    else:
        raise OutsideZone("b2 = b3: use the trailing-edge system")
    x = (s2 + l1) * t + 0.5 * l1 * g[0] + q
    return _Eval(RiemannTriple(b1, b2, b3), q, g, np.array([s2 + l1, s2 + l2, s2 + l3]), d12, d23, x)


def hodograph_residual(triple: RiemannTriple, x: float, t: float, profile: InitialProfile, branch: str = "L",
                       pot: EpdPotential | None = None) -> np.ndarray:
    """x - lambda_i t - w_i for i = 1, 2, 3."""
    pot = pot or EpdPotential(profile)
    q, g = pot.evaluate(triple.beta1, triple.beta2, pot.zeta3(triple.beta3, branch))
    s2, l1, l2, l3 = whitham.speed_parts(*triple.as_tuple())
    lam = np.array([l1, l2, l3])
    return x - (s2 + lam) * t - (0.5 * lam * g + q)


def _newton(fun, y0, lower, upper, tol=1e-12, maxit=40, steps=None, soft_tol=1e-6):
    """Damped Newton with a forward-difference Jacobian inside a box.

    Converges when ``max|F| <= tol``; also accepts a point whose residual is
    below ``soft_tol`` once the iteration stagnates (quadrature noise floor).
    """
    y = np.array(y0, dtype=float)
    F = fun(y)
    n = y.size
    steps = np.full(n, 1e-7) if steps is None else np.asarray(steps, dtype=float)
    for it in range(maxit):
        norm0 = float(np.max(np.abs(F)))
        if norm0 <= tol:
            return y, F, it
        Jm = np.empty((F.size, n))
        for j in range(n):
            h = steps[j] * max(1.0, abs(y[j]))
            yp = y.copy()
            if yp[j] + h > upper[j]:
                h = -h
            yp[j] += h
            Jm[:, j] = (fun(yp) - F) / h
        try:
            dy = np.linalg.solve(Jm, -F)
        except np.linalg.LinAlgError as exc:
            raise ContinuationNeeded(f"singular hodograph Jacobian at {y}") from exc
        lam = 1.0
        accepted = False
        while lam >= 1e-4:
            yn = np.clip(y + lam * dy, lower, upper)
            try:
                Fn = fun(yn)
                if np.max(np.abs(Fn)) < (1.0 - 1e-4 * lam) * norm0:
                    accepted = True
                    break
            except (OutsideZone, DomainError):
                pass
            lam *= 0.5
        if not accepted:
            if norm0 <= soft_tol:
                return y, F, it
            raise ContinuationNeeded(f"line search failed at {y}, residual {norm0:.3e}")
        step_small = np.all(np.abs(yn - y) <= 4e-16 * np.maximum(1.0, np.abs(y)))
        y, F = yn, Fn
        if step_small and np.max(np.abs(F)) <= soft_tol:
            return y, F, it
    if np.max(np.abs(F)) <= soft_tol:
        return y, F, maxit
    raise ContinuationNeeded(f"Newton did not converge: residual {np.max(np.abs(F)):.3e} at {y}")


# ---------------------------------------------------------------------------
# trailing edge (b2 = b3 = xi, b1 = v)


def _edge_nodes(xi: float, v: float, profile: InitialProfile, n: int):
    """Nodes on [0, pi/2] for integrands in y = xi + (v - xi) sin^2(theta).

    When ``v`` is close to the end of the range of ``f`` (where ``h_L`` is
    singular) the integrand has a layer of width
    ``delta = sqrt(dist / (v - xi))`` at ``theta = pi/2``; the rule is then a
    composite Gauss rule with panels graded geometrically into the layer.
    """
    top = profile.value_range[1]
    dist = top - v if math.isfinite(top) else math.inf
    delta = math.sqrt(dist / (v - xi)) if math.isfinite(dist) else math.inf
    if delta > 0.05:
        return _half_pi_nodes(n)
    x, w = _unit_nodes(32)
    edges = [0.0]
    gap = 0.25 * math.pi
    while gap > 1e-3 * delta:
        edges.append(0.5 * math.pi - gap)
        gap *= 0.25
    edges.append(0.5 * math.pi)
    edges = np.asarray(edges)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (lo + (hi - lo) * x[None, :]).ravel()
    weights = ((hi - lo) * w[None, :]).ravel()
    return nodes, weights


def _y_of_theta(xi: float, v: float, s2: np.ndarray, c: np.ndarray) -> np.ndarray:
    # measured from the nearer end so y - xi and v - y keep full relative accuracy
    return np.where(s2 < 0.5, xi + (v - xi) * s2, v - (v - xi) * c * c)


def phi_integrals(xi: float, v: float, profile: InitialProfile, n: int = 96):
    """phi(xi; v) and derivatives after y = xi + (v - xi) sin^2(theta).

    Returns ``(phi, d_xi phi, d_v phi, d_xi^2 phi, d_v d_xi phi)``.
    """
    if not v > xi:
        raise DomainError("phi(xi; v) needs v > xi")
    th, w = _edge_nodes(xi, v, profile, n)
    s2 = np.sin(th) ** 2
    c = np.cos(th)
    y = _y_of_theta(xi, v, s2, c)
    h1 = profile.h_L_prime(y)
    h2 = profile.h_L_2(y)
    h3 = profile.h_L_3(y)
    phi = float(np.dot(w, h1 * c))
    dxi = float(np.dot(w, h2 * c**3))
    dv = float(np.dot(w, h2 * s2 * c))
    dxi2 = float(np.dot(w, h3 * c**5))
    dvdxi = float(np.dot(w, h3 * s2 * c**3))
    return phi, dxi, dv, dxi2, dvdxi


def theta_integral(xi: float, v: float, t: float, profile: InitialProfile, n: int = 96) -> float:
    """int_xi^v (h_L'(y) + 6 t) sqrt(y - xi) dy."""
    th, w = _edge_nodes(xi, v, profile, n)
    s = np.sin(th)
    y = _y_of_theta(xi, v, s * s, np.cos(th))
    jac = 2.0 * (v - xi) ** 1.5 * s * s * np.cos(th)
    return float(np.dot(w, (profile.h_L_prime(y) + 6.0 * t) * jac))


@dataclass(frozen=True)
class EdgeLayerData:
    """Trailing-edge data: ``x_- = 6 t v + h_L(v)``, ``6 t + phi = 0``, ``d_xi phi = 0``."""

    t: float
    v: float
    xi: float
    x_minus: float
    phi_xixi: float
    #: int_xi^v (h_L'(y) + 6 t) sqrt(y - xi) dy
    theta_base: float = 0.0

    @property
    def c_e(self) -> float:
        return -math.sqrt(self.v - self.xi) * self.phi_xixi


@dataclass(frozen=True)
class LeadingEdge:
    """Leading-edge data: ``b1 = b2 = a``, ``b3 = b``."""

    t: float
    a: float
    b: float
    zeta3: float
    x_plus: float


def _cubic_scale(profile: InitialProfile, bp) -> float:
    h3 = float(profile.h_L_3(bp.u_c))
    if not h3 < 0.0:
        raise DomainError(f"generic breaking needs h_L'''(u_c) < 0, got {h3}")
    return h3


def trailing_edge(t: float, profile: InitialProfile, guess=None, n: int = 96) -> EdgeLayerData:
    """Solve the trailing-edge system for (v, xi) by Newton with the analytic Jacobian."""
    bp = breaking_point(profile)
    if t <= bp.t_c:
        raise DomainError(f"no oscillation zone for t={t} <= t_c={bp.t_c}")
    if guess is None:
        return _march_edges(t, profile)[0]
    v, xi = guess
    lo = profile.f_min
    for _ in range(60):
        phi, dxi, dv, dxi2, dvdxi = phi_integrals(xi, v, profile, n)
        F = np.array([6.0 * t + phi, dxi])
        if abs(F[0]) < 1e-13 * max(1.0, 6.0 * t) and abs(F[1]) < 1e-13 * max(1.0, abs(dxi2)):
            break
        Jm = np.array([[dxi, dv], [dxi2, dvdxi]])
        dxi_, dv_ = np.linalg.solve(Jm, -F)
        step = 1.0
        while True:
            xin, vn = xi + step * dxi_, v + step * dv_
            if vn > xin and xin > lo and vn < profile.value_range[1]:
                break
            step *= 0.5
            if step < 1e-8:
                raise ContinuationNeeded("trailing-edge Newton left the admissible region")
        xi, v = xin, vn
    else:
        raise ContinuationNeeded(f"trailing-edge Newton did not converge at t={t}")
    phi, dxi, dv, dxi2, dvdxi = phi_integrals(xi, v, profile, n)
    return EdgeLayerData(t=float(t), v=float(v), xi=float(xi), x_minus=6.0 * t * v + float(profile.h_L(v)), phi_xixi=dxi2,
                         theta_base=theta_integral(xi, v, t, profile, n))


def leading_edge(t: float, profile: InitialProfile, guess=None, pot: EpdPotential | None = None) -> LeadingEdge:
    """Solve ``t + q_1/2 = 0`` and ``t + q_3/2 = 0`` at ``b1 = b2 = a`` for (a, zeta3)."""
    bp = breaking_point(profile)
    if t <= bp.t_c:
        raise DomainError(f"no oscillation zone for t={t} <= t_c={bp.t_c}")
    if guess is None:
        return _march_edges(t, profile)[1]
    pot = pot or EpdPotential(profile)

    def fun(y):
        a, z3 = y
        b = float(profile.f(z3))
        if a < b:
            raise OutsideZone("a < b")
        _, g = pot.evaluate(a, a, z3)
        return np.array([t + 0.5 * g[0], t + 0.5 * g[2]])

    lo = np.array([profile.f_min, -np.inf])
    hi = np.array([profile.value_range[1], np.inf])
    y, _, _ = _newton(fun, np.asarray(guess, dtype=float), lo, hi, tol=1e-13, steps=[1e-7, 1e-7])
    a, z3 = float(y[0]), float(y[1])
    b = float(profile.f(z3))
    q = pot.evaluate(a, a, z3, gradient=False)
    return LeadingEdge(t=t, a=a, b=b, zeta3=z3, x_plus=(4.0 * a + 2.0 * b) * t + q)


def _march_edges(t: float, profile: InitialProfile, pot: EpdPotential | None = None):
    """Edges at time t by continuation from the breaking point.

    Start from the cubic-data scaling at ``t - t_c = tau0`` and march in
    geometrically growing steps.
    """
    bp = breaking_point(profile)
    if t <= bp.t_c:
        raise DomainError(f"no oscillation zone for t={t} <= t_c={bp.t_c}")
    h3 = _cubic_scale(profile, bp)
    tau = t - bp.t_c
    tau0 = min(tau, 1e-5)
    taus = np.unique(np.concatenate([np.geomspace(tau0, tau, max(2, int(4 * math.log10(tau / tau0)) + 2)), [tau]]))
    s = math.sqrt(tau0 / -h3)
    uc = bp.u_c
    tg = (uc + 6.0 * math.sqrt(2.0) * s, uc - 1.5 * math.sqrt(2.0) * s)
    lg = (uc + 1.5 * math.sqrt(10.0) * s, float(profile.h_L(uc - 2.0 * math.sqrt(10.0) * s)))
    pot = pot or EpdPotential(profile)
    te = le = None
    for tk in taus:
        te = trailing_edge(bp.t_c + tk, profile, guess=tg)
        le = leading_edge(bp.t_c + tk, profile, guess=lg, pot=pot)
        tg = (te.v, te.xi)
        lg = (le.a, le.zeta3)
    return te, le


def whitham_zone(t: float, profile: InitialProfile) -> tuple[float, float]:
    """(x_-, x_+) of the oscillation zone at time t."""
    te, le = _march_edges(t, profile)
    return te.x_minus, le.x_plus


def edge_curves(times, profile: InitialProfile):
    """Arrays (x_-(t), x_+(t)) by a single continuation through increasing times."""
    times = np.asarray(times, dtype=float)
    order = np.argsort(times)
    xm = np.empty(times.size)
    xp = np.empty(times.size)
    pot = EpdPotential(profile)
    te, le = _march_edges(times[order[0]], profile, pot)
    for idx in order:
        tk = times[idx]
        te = trailing_edge(tk, profile, guess=(te.v, te.xi))
        le = leading_edge(tk, profile, guess=(le.a, le.zeta3), pot=pot)
        xm[idx], xp[idx] = te.x_minus, le.x_plus
    return xm, xp


# ---------------------------------------------------------------------------
# the solution curve at fixed t


@dataclass
class ZoneTrace:
    """Solution of the hodograph equations at one time, parametrised by m."""

    t: float
    m: np.ndarray
    beta: np.ndarray  # shape (n, 3)
    zeta3: np.ndarray
    x: np.ndarray
    trailing: EdgeLayerData
    leading: LeadingEdge
    profile: InitialProfile = field(repr=False)

    @property
    def x_minus(self) -> float:
        return self.trailing.x_minus

    @property
    def x_plus(self) -> float:
        return self.leading.x_plus

    def _splines(self):
        if not hasattr(self, "_sp"):
            # drop round-off level repeats of x at the two ends
            keep = np.concatenate([[True], self.x[1:] > np.maximum.accumulate(self.x)[:-1]])
            keep[-1] = True
            if not self.x[-1] > self.x[keep][-2]:
                keep[np.flatnonzero(keep)[-2]] = False
            m, x = self.m[keep], self.x[keep]
            self._sp = (
                interpolate.CubicSpline(m, x),
                interpolate.CubicSpline(m, self.beta[keep, 0]),
                interpolate.CubicSpline(m, self.zeta3[keep]),
                m,
                x,
            )
        return self._sp

    def initial_coords(self, x: float) -> np.ndarray:
        """Interpolated (b1, m, zeta3) at x, from the traced curve."""
        if not self.x_minus <= x <= self.x_plus:
            raise OutsideZone(f"x={x} outside [{self.x_minus}, {self.x_plus}]")
        sx, sb, sz, ms, xs = self._splines()
        j = int(np.clip(np.searchsorted(xs, x), 1, xs.size - 1))
        lo, hi = ms[j - 1], ms[j]
        if (sx(lo) - x) * (sx(hi) - x) < 0:
            m = optimize.brentq(lambda mm: float(sx(mm)) - x, lo, hi, xtol=1e-15)
        else:
            m = lo + (hi - lo) * (x - xs[j - 1]) / (xs[j] - xs[j - 1])
        return np.array([float(sb(m)), m, float(sz(m))])


def _m_grid(n: int) -> np.ndarray:
    # dense near both edges; the leading edge needs log-clustering in 1 - m
    u = np.linspace(0.0, 1.0, n)
    m = np.sin(0.5 * math.pi * u) ** 2
    tail = 1.0 - np.geomspace(1e-3, 1e-9, 13)
    m = np.unique(np.concatenate([m[(m > 1e-7) & (m < 1.0 - 1e-3)], [1e-6, 1e-5, 1e-4], tail]))
    return m


def trace_zone(t: float, profile: InitialProfile, n: int = 160, pot: EpdPotential | None = None,
               edges: tuple[EdgeLayerData, LeadingEdge] | None = None) -> ZoneTrace:
    """Follow the hodograph solution at time t from the trailing (m = 0) to the leading (m = 1) edge."""
    pot = pot or EpdPotential(profile)
    te, le = edges if edges is not None else _march_edges(t, profile, pot)
    ms = _m_grid(n)
    b1 = te.v
    z3 = float(profile.h_L(te.xi))
    rows = [(0.0, te.v, te.xi, te.xi, z3, te.x_minus)]
    prev = None
    for m in ms:
        def fun(y, m=m):
            ev = _hodo_eval((y[0], m, y[1]), t, pot)
            return np.array([ev.d12, ev.d23])

        if prev is not None:
            # secant predictor in m
            (m0, y0), (m1_, y1) = prev
            guess = y1 + (y1 - y0) * (m - m1_) / (m1_ - m0)
        else:
            guess = np.array([b1, z3])
        y, _, _ = _newton(fun, guess, np.array([profile.f_min, -np.inf]), np.array([np.inf, np.inf]), tol=1e-12)
        ev = _hodo_eval((y[0], m, y[1]), t, pot)
        tr = ev.triple
        rows.append((m, tr.beta1, tr.beta2, tr.beta3, y[1], ev.x))
        prev = ((rows[-2][0], np.array([rows[-2][1], rows[-2][4]])), (m, y.copy()))
    rows.append((1.0, le.a, le.a, le.b, le.zeta3, le.x_plus))
    arr = np.array(rows)
    return ZoneTrace(t=t, m=arr[:, 0], beta=arr[:, 1:4], zeta3=arr[:, 4], x=arr[:, 5],
                     trailing=te, leading=le, profile=profile)


def solve_whitham(x: float, t: float, profile: InitialProfile, seed, tol: float = 1e-11,
                  pot: EpdPotential | None = None) -> RiemannTriple:
    """Solve ``x = lambda_i t + w_i`` for the triple.

    ``seed`` is a :class:`RiemannTriple` (taken on the decreasing side of the
    hump), a coordinate vector ``(b1, m, zeta3)`` or a :class:`ZoneTrace`.
    Newton runs in ``(b1, m, zeta3)``, which stays well conditioned at both
    edges, on the divided differences of the three equations and on
    ``x = lambda_1 t + w_1``. Behind the hump minimum ``b3`` lies on the
    increasing side of the data; :func:`solve_coords` returns ``zeta3``, which
    fixes the side.
    """
    pot = pot or EpdPotential(profile)
    if isinstance(seed, ZoneTrace):
        y0 = seed.initial_coords(x)
    elif isinstance(seed, RiemannTriple):
        y0 = coords_from_triple(seed, profile)
    else:
        y0 = np.asarray(seed, dtype=float)

    scale = max(1.0, abs(x))

    def fun(y):
        ev = _hodo_eval(y, t, pot)
        return np.array([ev.d12, ev.d23, (ev.x - x) / scale])

    lo = np.array([profile.f_min, 0.0, -np.inf])
    hi = np.array([np.inf, 1.0, np.inf])
    y, _, _ = _newton(fun, y0, lo, hi, tol=tol, steps=[1e-7, 1e-8, 1e-7])
    if not 0.0 < y[1] < 1.0:
        raise OutsideZone(f"x={x} is outside the oscillation zone at t={t}")
    return triple_from_coords(y, profile)


def solve_coords(x: float, t: float, profile: InitialProfile, seed, tol: float = 1e-11, pot=None) -> np.ndarray:
    """Like :func:`solve_whitham` but returns the coordinates (b1, m, zeta3)."""
    pot = pot or EpdPotential(profile)
    y0 = seed.initial_coords(x) if isinstance(seed, ZoneTrace) else np.asarray(seed, dtype=float)
    scale = max(1.0, abs(x))

    def fun(y):
        ev = _hodo_eval(y, t, pot)
        return np.array([ev.d12, ev.d23, (ev.x - x) / scale])

    y, _, _ = _newton(fun, y0, np.array([profile.f_min, 0.0, -np.inf]), np.array([np.inf, 1.0, np.inf]),
                      tol=tol, steps=[1e-7, 1e-8, 1e-7])
    return y


# ---------------------------------------------------------------------------
# fields


@dataclass
class HodographField:
    """Solved triples on per-time x-grids with the edge curves."""

    times: np.ndarray
    x: list
    beta: list  # per time: (n_x, 3), NaN outside the zone
    x_minus: np.ndarray
    x_plus: np.ndarray
    residual: list  # per time: max |x - lambda_i t - w_i|
    traces: list = field(repr=False, default_factory=list)


def solve_field(times, xs, profile: InitialProfile, polish: bool = True, n_trace: int = 160) -> HodographField:
    """Triples on the x-grid(s) for each time; slices are solved in increasing t."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    pot = EpdPotential(profile)
    xgrids = [np.asarray(xs, dtype=float)] * times.size if np.ndim(xs[0]) == 0 else [np.asarray(g) for g in xs]
    order = np.argsort(times)
    te, le = _march_edges(times[order[0]], profile, pot)
    out_beta = [None] * times.size
    out_res = [None] * times.size
    traces = [None] * times.size
    xm = np.empty(times.size)
    xp = np.empty(times.size)
    for idx in order:
        t = times[idx]
        te = trailing_edge(t, profile, guess=(te.v, te.xi))
        le = leading_edge(t, profile, guess=(le.a, le.zeta3), pot=pot)
        tr = trace_zone(t, profile, n=n_trace, pot=pot, edges=(te, le))
        traces[idx] = tr
        xm[idx], xp[idx] = te.x_minus, le.x_plus
        xg = xgrids[idx]
        beta = np.full((xg.size, 3), np.nan)
        res = 0.0
        for j, xj in enumerate(xg):
            if not tr.x_minus < xj < tr.x_plus:
                continue
            y = tr.initial_coords(xj)
            if polish:
                y = solve_coords(xj, t, profile, y, pot=pot)
            trip = triple_from_coords(y, profile)
            beta[j] = trip.as_tuple()
            branch = _branch_of(float(y[2]), profile)
            r = hodograph_residual(trip, xj, t, profile, branch=branch, pot=pot)
            res = max(res, float(np.max(np.abs(r))))
        out_beta[idx] = beta
        out_res[idx] = res
    return HodographField(times=times, x=xgrids, beta=out_beta, x_minus=xm, x_plus=xp, residual=out_res, traces=traces)


def dsw_solution(x, t: float, profile: InitialProfile, epsilon: float, polish: bool = True,
                 trace: ZoneTrace | None = None, return_beta: bool = False):
    """Leading-order small-epsilon field: modulated theta wave inside the zone, Hopf outside.

    Inside ``(x_-, x_+)`` the phase is ``k x - omega t - k q``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    pot = EpdPotential(profile)
    tr = trace or trace_zone(t, profile, pot=pot)
    out = np.empty(xs.size)
    beta = np.full((xs.size, 3), np.nan)
    inside = (xs > tr.x_minus) & (xs < tr.x_plus)
    # the folded Hopf field reaches past the zone: behind it u joins the
    # upper sheet (u = v at x_-), ahead of it the lower one (u = b at x_+)
    left = xs <= tr.x_minus
    right = xs >= tr.x_plus
    if np.any(left):
        out[left] = hopf_single(xs[left], t, profile, prefer="upper")
    if np.any(right):
        out[right] = hopf_single(xs[right], t, profile, prefer="lower")
    for j in np.flatnonzero(inside):
        y = tr.initial_coords(xs[j])
        if polish:
            y = solve_coords(xs[j], t, profile, y, pot=pot)
        trip = triple_from_coords(y, profile)
        q = pot.evaluate(trip.beta1, trip.beta2, float(y[2]), gradient=False)
        out[j] = theta_u(xs[j], t, trip, WavePhase(phi0=-trip.k * q, epsilon=epsilon))
        beta[j] = trip.as_tuple()
    u = out if np.ndim(x) else float(out[0])
    if return_beta:
        return u, beta
    return u


def phase_function(triple: RiemannTriple, x: float, t: float, profile: InitialProfile, branch: str = "L") -> float:
    """k x - omega t - k q for a triple."""
    q = epd_q(triple, profile, branch)
    return triple.k * x - triple.omega * t - triple.k * q


__all__ = [
    "EdgeLayerData",
    "EpdPotential",
    "HodographField",
    "LeadingEdge",
    "ZoneTrace",
    "dsw_solution",
    "edge_curves",
    "epd_gradient",
    "epd_q",
    "epd_q_direct",
    "hodograph_residual",
    "leading_edge",
    "phi_integrals",
    "solve_field",
    "solve_whitham",
    "theta_integral",
    "trace_zone",
    "trailing_edge",
    "tsarev_w",
    "whitham_zone",
]
