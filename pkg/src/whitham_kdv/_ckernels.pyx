# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled special-function kernels (same API as ``_pykernels``)."""
from libc.math cimport sqrt, cos, sin, asin, exp, fabs, M_PI, round as cround

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double _AGM_TOL = 1e-17
cdef int _MAX_AGM = 64


def agm_ke(double m):
    """Return ``(K, E, K - E)`` for parameter ``0 <= m < 1``."""
    cdef double a = 1.0, b = sqrt(1.0 - m), c2 = m, s = 0.5 * m, p = 0.5
    cdef double an, c, k
    cdef int i
    for i in range(_MAX_AGM):
        if c2 <= _AGM_TOL * a * a:
            break
        an = 0.5 * (a + b)
        c = 0.5 * (a - b)
        b = sqrt(a * b)
        a = an
        c2 = c * c
        p *= 2.0
        s += p * c2
    k = M_PI / (2.0 * a)
    return k, k * (1.0 - s), k * s


cdef double _agm(double a, double b) nogil:
    cdef int i
    cdef double an
    for i in range(_MAX_AGM):
        if fabs(a - b) <= 1e-16 * a:
            break
        an = 0.5 * (a + b)
        b = sqrt(a * b)
        a = an
    return 0.5 * (a + b)


def ellipk(double m):
    return M_PI / (2.0 * _agm(1.0, sqrt(1.0 - m)))


def ellipkc(double m):
    """K(1 - m), evaluated without forming 1 - m."""
    return M_PI / (2.0 * _agm(1.0, sqrt(m)))


def cn_array(z, double m, double quarter):
    """Jacobi cn(z | m) by descending Landen / AGM; ``quarter`` is K(m)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef Py_ssize_t npts = zz.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(npts)
    cdef double a[65]
    cdef double c[65]
    cdef double b, an, cc, period, u, phi, r, scale
    cdef int n = 0, j
    if m == 0.0:
        for i in range(npts):
            out[i] = cos(zz[i])
        return out.reshape(np.shape(z))
    a[0] = 1.0
    c[0] = sqrt(m)
    b = sqrt(1.0 - m)
    while fabs(c[n]) > 1e-16 and n < _MAX_AGM - 1:
        an = 0.5 * (a[n] + b)
        cc = 0.5 * (a[n] - b)
        b = sqrt(a[n] * b)
        n += 1
        a[n] = an
        c[n] = cc
    period = 4.0 * quarter
    scale = a[n]
    for j in range(n):
        scale *= 2.0
    with nogil:
        for i in range(npts):
            u = zz[i] - period * cround(zz[i] / period)
            phi = scale * u
            for j in range(n, 0, -1):
                r = c[j] * sin(phi) / a[j]
                if r > 1.0:
                    r = 1.0
                elif r < -1.0:
                    r = -1.0
                phi = 0.5 * (phi + asin(r))
            out[i] = cos(phi)
    return out.reshape(np.shape(z))


def theta3_derivs(z, double imtau, int nterms):
    """Theta series with tau = i*imtau and its first two z-derivatives."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef Py_ssize_t npts = zz.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.empty(npts)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th1 = np.empty(npts)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th2 = np.empty(npts)
    cdef double w, t0, t1, t2, amp, kn, cs, sn
    cdef int n
    with nogil:
        for i in range(npts):
            w = 2.0 * M_PI * zz[i]
            t0 = 1.0
            t1 = 0.0
            t2 = 0.0
            for n in range(1, nterms + 1):
                amp = 2.0 * exp(-M_PI * n * n * imtau)
                cs = cos(n * w)
                sn = sin(n * w)
                kn = 2.0 * M_PI * n
                t0 += amp * cs
                t1 -= amp * kn * sn
                t2 -= amp * kn * kn * cs
            th[i] = t0
            th1[i] = t1
            th2[i] = t2
    shp = np.shape(z)
    return th.reshape(shp), th1.reshape(shp), th2.reshape(shp)
