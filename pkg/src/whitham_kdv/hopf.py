"""Initial profiles and the dispersionless equation v_t + 6 v v_x = 0.

Characteristics: ``x = 6 f(zeta) t + zeta`` with ``v = f(zeta)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate, optimize

from .errors import ConfigurationError, DomainError, NoBreakingError, RootBracketError


class ProfileKind(enum.Enum):
    SMOOTH_STEP = "smooth_step"
    NEGATIVE_HUMP = "negative_hump"
    CUSTOM = "custom"


class InitialProfile:
    """Initial datum ``f`` with derivatives and branch inverses.

    Subclasses provide ``f`` and its first three derivatives. ``h_L`` inverts
    the decreasing branch (left of the minimum for a hump) and ``h_R`` the
    increasing branch, when there is one.
    """

    kind = ProfileKind.CUSTOM
    #: interval containing all the structure of f (grids and searches use it)
    support: tuple[float, float] = (-10.0, 10.0)
    #: location and value of the minimum for hump profiles
    zeta_min: float | None = None

    def f(self, x):
        raise NotImplementedError

    def fprime(self, x):
        raise NotImplementedError

    def f2(self, x):
        raise NotImplementedError

    def f3(self, x):
        raise NotImplementedError

    def h_L(self, u):
        raise NotImplementedError

    def h_R(self, u):
        raise ConfigurationError(f"{type(self).__name__} has no increasing branch")

    def f_increment(self, z, dz):
        """f(z + dz) - f(z); subclasses override with a cancellation-free form."""
        z = np.asarray(z, dtype=float)
        return self.f(z + dz) - self.f(z)

    @property
    def has_right_branch(self) -> bool:
        return self.zeta_min is not None

    @property
    def f_min(self) -> float:
        if self.zeta_min is not None:
            return float(self.f(self.zeta_min))
        return float(self.value_range[0])

    @property
    def value_range(self) -> tuple[float, float]:
        xs = np.linspace(*self.support, 4001)
        fx = self.f(xs)
        return float(fx.min()), float(fx.max())

    # derivatives of the decreasing-branch inverse, through zeta = h_L(u)
    def h_L_prime(self, u):
        return 1.0 / self.fprime(self.h_L(u))

    def h_L_2(self, u):
        z = self.h_L(u)
        d1 = self.fprime(z)
        return -self.f2(z) / d1**3

    def h_L_3(self, u):
        z = self.h_L(u)
        d1, d2, d3 = self.fprime(z), self.f2(z), self.f3(z)
        return (3.0 * d2 * d2 - d1 * d3) / d1**5

    def branch_zeta(self, u, branch: str = "L"):
        return self.h_L(u) if branch == "L" else self.h_R(u)

    def describe(self) -> dict:
        return {"kind": self.kind.value}


@dataclass(frozen=True)
class _HumpParams:
    amplitude: float
    width: float


class NegativeHump(InitialProfile):
    """f(x) = -A sech^2(x / l); the minimum -A sits at x = 0."""

    kind = ProfileKind.NEGATIVE_HUMP
    zeta_min = 0.0

    def __init__(self, amplitude: float = 1.0, width: float = 1.0):
        if amplitude <= 0 or width <= 0:
            raise ConfigurationError("hump amplitude and width must be positive")
        self.A = float(amplitude)
        self.l = float(width)
        self.support = (-25.0 * self.l, 25.0 * self.l)

    def f(self, x):
        return -self.A / np.cosh(np.asarray(x, dtype=float) / self.l) ** 2

    def fprime(self, x):
        y = np.asarray(x, dtype=float) / self.l
        return 2.0 * self.A / self.l * np.tanh(y) / np.cosh(y) ** 2

    def f2(self, x):
        y = np.asarray(x, dtype=float) / self.l
        T = np.tanh(y)
        return 2.0 * self.A / self.l**2 * (1.0 - 3.0 * T * T) / np.cosh(y) ** 2

    def f3(self, x):
        y = np.asarray(x, dtype=float) / self.l
        T = np.tanh(y)
        return 2.0 * self.A / self.l**3 * T * (12.0 * T * T - 8.0) / np.cosh(y) ** 2

    def f_increment(self, z, dz):
        a = np.asarray(z, dtype=float) / self.l
        d = np.asarray(dz, dtype=float) / self.l
        t0, t1 = np.tanh(a), np.tanh(a + d)
        diff = np.sinh(d) / (np.cosh(a) * np.cosh(a + d))
        return self.A * diff * (t0 + t1)

    def _arcsech_sqrt(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u >= 0.0) or np.any(u < -self.A):
            raise DomainError(f"hump inverse needs -A <= u < 0, got {u}")
        # arccosh(w), w = sqrt(A/-u), written with w^2 - 1 = (A + u)/(-u)
        r = (self.A + u) / (-u)
        w = np.sqrt(self.A / (-u))
        return self.l * np.log1p(r / (w + 1.0) + np.sqrt(r))

    def h_L(self, u):
        return -self._arcsech_sqrt(u)

    def h_R(self, u):
        return self._arcsech_sqrt(u)

    def h_L_prime(self, u):
        u = np.asarray(u, dtype=float)
        return self.l / (2.0 * u * np.sqrt(1.0 + u / self.A))

    def describe(self) -> dict:
        return {"kind": self.kind.value, "amplitude": self.A, "width": self.l}


class SmoothStep(InitialProfile):
    """f(x) = c (1 - tanh(x / w)) / 2."""

    kind = ProfileKind.SMOOTH_STEP

    def __init__(self, c: float = 1.0, w: float = 0.1):
        if c <= 0 or w <= 0:
            raise ConfigurationError("step height and width must be positive")
        self.c = float(c)
        self.w = float(w)
        self.support = (-30.0 * self.w, 30.0 * self.w)

    @property
    def value_range(self):
        return 0.0, self.c

    def f(self, x):
        return 0.5 * self.c * (1.0 - np.tanh(np.asarray(x, dtype=float) / self.w))

    def fprime(self, x):
        return -0.5 * self.c / self.w / np.cosh(np.asarray(x, dtype=float) / self.w) ** 2

    def f2(self, x):
        y = np.asarray(x, dtype=float) / self.w
        return self.c / self.w**2 * np.tanh(y) / np.cosh(y) ** 2

    def f3(self, x):
        y = np.asarray(x, dtype=float) / self.w
        T = np.tanh(y)
        return self.c / self.w**3 * (1.0 - 3.0 * T * T) / np.cosh(y) ** 2

    def f_increment(self, z, dz):
        a = np.asarray(z, dtype=float) / self.w
        d = np.asarray(dz, dtype=float) / self.w
        return -0.5 * self.c * np.sinh(d) / (np.cosh(a) * np.cosh(a + d))

    def h_L(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0.0) or np.any(u >= self.c):
            raise DomainError("step inverse needs 0 < u < c")
        return self.w * np.arctanh(1.0 - 2.0 * u / self.c)

    def describe(self) -> dict:
        return {"kind": self.kind.value, "c": self.c, "w": self.w}


class LinearProfile(InitialProfile):
    """Decreasing linear datum ``f(x) = (x - b)/a`` (``a < 0``), i.e. h_L(u) = a u + b."""

    def __init__(self, a: float = -1.0, b: float = 0.0, support=(-10.0, 10.0)):
        if a >= 0:
            raise ConfigurationError("linear profile must be decreasing (a < 0)")
        self.a = float(a)
        self.b = float(b)
        self.support = tuple(support)

    def f(self, x):
        return (np.asarray(x, dtype=float) - self.b) / self.a

    def fprime(self, x):
        return np.full(np.shape(x), 1.0 / self.a)[()]

    def f2(self, x):
        return np.zeros(np.shape(x))[()]

    def f3(self, x):
        return np.zeros(np.shape(x))[()]

    def f_increment(self, z, dz):
        return np.broadcast_to(np.asarray(dz, dtype=float) / self.a, np.broadcast(z, dz).shape).copy()[()]

    def h_L(self, u):
        return self.a * np.asarray(u, dtype=float) + self.b

    def describe(self) -> dict:
        return {"kind": "linear", "a": self.a, "b": self.b}


class TabulatedProfile(InitialProfile):
    """Profile from samples: cubic spline for f, monotone (PCHIP) inverses per branch."""

    def __init__(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        if x.ndim != 1 or x.shape != u.shape or x.size < 8:
            raise ConfigurationError("tabulated profile needs matching 1-d arrays of >= 8 samples")
        if np.any(np.diff(x) <= 0):
            raise ConfigurationError("tabulated x must be strictly increasing")
        self._spline = interpolate.CubicSpline(x, u)
        self.support = (float(x[0]), float(x[-1]))
        self._x, self._u = x, u
        imin = int(np.argmin(u))
        self.zeta_min = float(x[imin]) if 0 < imin < x.size - 1 else None
        left = slice(0, imin + 1)
        if imin < 2:
            raise ConfigurationError("tabulated profile has no decreasing branch")
        ul, xl = u[left][::-1], x[left][::-1]
        if np.any(np.diff(ul) <= 0):
            raise ConfigurationError("decreasing branch of the tabulated profile is not monotone")
        self._hl = interpolate.PchipInterpolator(ul, xl, extrapolate=False)
        self._hr = None
        if self.zeta_min is not None and x.size - imin >= 3:
            ur, xr = u[imin:], x[imin:]
            if np.all(np.diff(ur) > 0):
                self._hr = interpolate.PchipInterpolator(ur, xr, extrapolate=False)

    def f(self, x):
        return self._spline(x)

    def fprime(self, x):
        return self._spline(x, 1)

    def f2(self, x):
        return self._spline(x, 2)

    def f3(self, x):
        return self._spline(x, 3)

    def h_L(self, u):
        return self._hl(u)

    def h_R(self, u):
        if self._hr is None:
            raise ConfigurationError("tabulated profile has no increasing branch")
        return self._hr(u)

    @property
    def has_right_branch(self) -> bool:
        return self._hr is not None

    def describe(self) -> dict:
        return {"kind": self.kind.value, "samples": int(self._x.size)}


def make_profile(desc: dict) -> InitialProfile:
    """Build a profile from a config dict: ``{"name": ..., **params}`` or ``{"x": [...], "u": [...]}``."""
    if "x" in desc and "u" in desc:
        return TabulatedProfile(desc["x"], desc["u"])
    name = desc.get("name")
    params = {k: v for k, v in desc.items() if k != "name"}
    if name in ("negative_hump", "sech2"):
        return NegativeHump(**params)
    if name in ("smooth_step", "step"):
        return SmoothStep(**params)
    if name == "linear":
        return LinearProfile(**params)
    raise ConfigurationError(f"unknown profile name {name!r}")


# ---------------------------------------------------------------------------
# characteristics


@dataclass(frozen=True)
class BreakPoint:
    x_c: float
    t_c: float
    u_c: float
    zeta_c: float


def _char_residual(zeta, x, t, profile):
    return zeta + 6.0 * t * profile.f(zeta) - x


def characteristic_roots(x: float, t: float, profile: InitialProfile, samples: int = 4001) -> list[float]:
    """All real zeta with ``x = 6 f(zeta) t + zeta``, ascending."""
    if t < 0:
        raise DomainError("time must be non-negative")
    if t == 0:
        return [float(x)]
    lo_v, hi_v = profile.value_range
    a = x - 6.0 * t * hi_v - 1e-9 * (1 + abs(x))
    b = x - 6.0 * t * lo_v + 1e-9 * (1 + abs(x))
    s0, s1 = profile.support
    inner = np.linspace(max(a, s0), min(b, s1), samples) if max(a, s0) < min(b, s1) else np.empty(0)
    grid = np.unique(np.concatenate([np.linspace(a, b, 257), inner]))
    F = _char_residual(grid, x, t, profile)
    roots = []
    for i in range(grid.size - 1):
        fa, fb = F[i], F[i + 1]
        if fa == 0.0:
            roots.append(grid[i])
        elif (fa < 0.0) != (fb < 0.0) and fb != 0.0:
            roots.append(optimize.brentq(_char_residual, grid[i], grid[i + 1], args=(x, t, profile), xtol=1e-15, rtol=1e-15))
    if F[-1] == 0.0:
        roots.append(grid[-1])
    # near-tangent pairs hiding between samples
    for i in range(1, grid.size - 1):
        if (F[i] - F[i - 1]) * (F[i + 1] - F[i]) < 0 and abs(F[i]) < 1e-3 * (grid[1] - grid[0] + 1e-12) * 10:
            res = optimize.minimize_scalar(
                lambda z: abs(_char_residual(z, x, t, profile)), bounds=(grid[i - 1], grid[i + 1]), method="bounded"
            )
            if abs(_char_residual(res.x, x, t, profile)) < 1e-12 and not any(abs(res.x - r) < 1e-8 for r in roots):
                roots.append(res.x)
    if not roots:
        raise RootBracketError(f"no characteristic through x={x}, t={t}; searched zeta in [{a}, {b}]")
    return sorted(float(r) for r in roots)


def hopf_solve(x: float, t: float, profile: InitialProfile) -> list[float]:
    """Branch values ``v = f(zeta)`` of the (possibly multivalued) solution, descending."""
    roots = characteristic_roots(x, t, profile)
    return sorted((float(profile.f(z)) for z in roots), reverse=True)


def hopf_single(xs, t: float, profile: InitialProfile, prefer: str = "unique"):
    """Vectorised single-valued evaluation of the Hopf solution.

    ``prefer`` chooses the branch where several exist: ``"unique"`` raises,
    ``"upper"``/``"lower"`` pick the largest / smallest value.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if t == 0:
        return profile.f(xs)
    lo_v, hi_v = profile.value_range
    s0, s1 = profile.support
    a = min(xs.min() - 6.0 * t * hi_v, s0) - 1.0
    b = max(xs.max() - 6.0 * t * lo_v, s1) + 1.0
    zg = np.unique(np.concatenate([np.linspace(a, b, 20001), np.linspace(s0, s1, 20001)]))
    xg = zg + 6.0 * t * profile.f(zg)
    out = np.full(xs.shape, np.nan)
    count = np.zeros(xs.shape, dtype=int)
    dx = np.diff(xg)
    # split into monotone pieces of x(zeta)
    sign = np.sign(dx)
    breaks = np.flatnonzero(sign[1:] != sign[:-1]) + 1
    starts = np.concatenate([[0], breaks])
    ends = np.concatenate([breaks, [dx.size]])
    for s, e in zip(starts, ends):
        zp = zg[s : e + 1]
        xp = xg[s : e + 1]
        if xp[-1] < xp[0]:
            zp, xp = zp[::-1], xp[::-1]
        inside = (xs >= xp[0]) & (xs <= xp[-1])
        if not np.any(inside):
            continue
        idx = np.clip(np.searchsorted(xp, xs[inside]) - 1, 0, xp.size - 2)
        zlo, zhi = zp[idx], zp[idx + 1]
        z = _polish(xs[inside], t, profile, np.minimum(zlo, zhi), np.maximum(zlo, zhi))
        v = profile.f(z)
        cur = out[inside]
        cnt = count[inside]
        if prefer == "upper":
            cur = np.where(np.isnan(cur) | (v > cur), v, cur)
        elif prefer == "lower":
            cur = np.where(np.isnan(cur) | (v < cur), v, cur)
        else:
            cur = np.where(np.isnan(cur), v, cur)
        out[inside] = cur
        count[inside] = cnt + 1
    if prefer == "unique" and np.any(count > 1):
        bad = xs[count > 1]
        raise DomainError(f"Hopf solution is multivalued at x in [{bad.min()}, {bad.max()}], t={t}")
    if np.any(count == 0):
        raise RootBracketError("characteristic search failed for some x")
    return out


def _polish(x, t, profile, lo, hi, iters=80):
    """Safeguarded Newton for zeta + 6 t f(zeta) = x inside [lo, hi]."""
    z = 0.5 * (lo + hi)
    flo = _char_residual(lo, x, t, profile)
    for _ in range(iters):
        F = _char_residual(z, x, t, profile)
        dF = 1.0 + 6.0 * t * profile.fprime(z)
        same = np.sign(F) == np.sign(flo)
        lo = np.where(same, z, lo)
        flo = np.where(same, F, flo)
        hi = np.where(same, hi, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            zn = z - F / dF
        ok = (zn > lo) & (zn < hi) & np.isfinite(zn)
        zn = np.where(ok, zn, 0.5 * (lo + hi))
        if np.all(np.abs(zn - z) <= 1e-15 * (1.0 + np.abs(z))):
            return zn
        z = zn
    return z


def breaking_point(profile: InitialProfile, samples: int = 200001) -> BreakPoint:
    """First gradient catastrophe: minimise -1/(6 f'(zeta)) over f' < 0."""
    zs = np.linspace(*profile.support, samples)
    fp = profile.fprime(zs)
    i = int(np.argmin(fp))
    if not fp[i] < 0.0:
        raise NoBreakingError("profile is nowhere decreasing; characteristics never cross")
    lo, hi = zs[max(i - 1, 0)], zs[min(i + 1, zs.size - 1)]
    f2lo, f2hi = float(profile.f2(lo)), float(profile.f2(hi))
    if f2lo * f2hi < 0:
        zc = optimize.brentq(lambda z: float(profile.f2(z)), lo, hi, xtol=1e-15, rtol=1e-15)
    else:
        zc = optimize.minimize_scalar(lambda z: float(profile.fprime(z)), bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-14}).x
    fpc = float(profile.fprime(zc))
    t_c = -1.0 / (6.0 * fpc)
    u_c = float(profile.f(zc))
    return BreakPoint(x_c=6.0 * u_c * t_c + zc, t_c=t_c, u_c=u_c, zeta_c=float(zc))


def hopf_field(xs, t, profile):
    """Convenience: single-valued Hopf solution (raises inside the multivalued region)."""
    return hopf_single(xs, t, profile, prefer="unique")


def characteristic_x(zeta, t, profile):
    return np.asarray(zeta) + 6.0 * t * profile.f(zeta)


__all__ = [
    "BreakPoint",
    "InitialProfile",
    "LinearProfile",
    "NegativeHump",
    "ProfileKind",
    "SmoothStep",
    "TabulatedProfile",
    "breaking_point",
    "characteristic_roots",
    "hopf_single",
    "hopf_solve",
    "make_profile",
]
_ = math  # kept for subclass authors using math in f
