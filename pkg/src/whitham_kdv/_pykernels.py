"""Pure-Python special-function kernels.

Same call signatures as the compiled ``_ckernels`` extension; used when the
extension is not built or ``WHITHAM_KDV_PURE=1`` is set.
"""
import math

import numpy as np

_AGM_TOL = 1e-17
_MAX_AGM = 64


def agm_ke(m):
    """Return ``(K, E, K - E)`` for parameter ``0 <= m < 1``.

    ``K - E`` is accumulated from the AGM sequence directly so it keeps full
    relative accuracy as ``m -> 0``.
    """
    a = 1.0
    b = math.sqrt(1.0 - m)
    c2 = m
    s = 0.5 * c2
    p = 0.5
    for _ in range(_MAX_AGM):
        if c2 <= _AGM_TOL * a * a:
            break
        an = 0.5 * (a + b)
        c = 0.5 * (a - b)
        b = math.sqrt(a * b)
        a = an
        c2 = c * c
        p *= 2.0
        s += p * c2
    k = math.pi / (2.0 * a)
    return k, k * (1.0 - s), k * s


def ellipk(m):
    return math.pi / (2.0 * _agm(1.0, math.sqrt(1.0 - m)))


def ellipkc(m):
    """K(1 - m), evaluated without forming 1 - m."""
    return math.pi / (2.0 * _agm(1.0, math.sqrt(m)))


def _agm(a, b):
    for _ in range(_MAX_AGM):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def cn_array(z, m, quarter):
    """Jacobi cn(z | m) by descending Landen / AGM; ``quarter`` is K(m)."""
    z = np.asarray(z, dtype=float)
    if m == 0.0:
        return np.cos(z)
    period = 4.0 * quarter
    u = z - period * np.round(z / period)
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > 1e-16 and len(a) < _MAX_AGM:
        an = 0.5 * (a[-1] + b)
        cn_ = 0.5 * (a[-1] - b)
        b = math.sqrt(a[-1] * b)
        a.append(an)
        c.append(cn_)
    n = len(a) - 1
    phi = (2.0 ** n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[j] * np.sin(phi) / a[j], -1.0, 1.0)))
    return np.cos(phi)


def theta3_derivs(z, imtau, nterms):
    """Theta series with tau = i*imtau and its first two z-derivatives."""
    z = np.asarray(z, dtype=float)
    th = np.ones_like(z)
    th1 = np.zeros_like(z)
    th2 = np.zeros_like(z)
    w = 2.0 * math.pi * z
    for n in range(1, nterms + 1):
        a = 2.0 * math.exp(-math.pi * n * n * imtau)
        arg = n * w
        cs = np.cos(arg)
        sn = np.sin(arg)
        kn = 2.0 * math.pi * n
        th += a * cs
        th1 -= a * kn * sn
        th2 -= a * kn * kn * cs
    return th, th1, th2
