# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dual ascent kernel; mirrors _kernels_py line by line."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs

cnp.import_array()


cdef double _integral(const double[:] w, double[:] base, double[:] qmu,
                      Py_ssize_t a, Py_ssize_t n, double p, double lam) nogil:
    cdef double tot = 0.0, v
    cdef Py_ssize_t k
    for k in range(n):
        v = base[k] + lam * w[a + k]
        if v > 0.0:
            tot += w[a + k] * pow(v / qmu[k], p)
    return tot


cdef double _solve_multiplier(const double[:] w, double[:] base, double[:] qmu,
                              Py_ssize_t a, Py_ssize_t n, double p, double lam0) nogil:
    cdef double c = 0.0, lo, hi, x, f, df, v, r, nx
    cdef Py_ssize_t k
    cdef int it
    if _integral(w, base, qmu, a, n, p, 0.0) >= 1.0:
        return 0.0
    for k in range(n):
        c += w[a + k] * pow(w[a + k] / qmu[k], p)
    lo = 0.0
    hi = pow(c, -1.0 / p)
    x = lam0 if (lo < lam0 and lam0 < hi) else hi
    for it in range(200):
        f = 0.0
        df = 0.0
        for k in range(n):
            v = base[k] + x * w[a + k]
            if v > 0.0:
                r = pow(v / qmu[k], p)
                f += w[a + k] * r
                df += w[a + k] * w[a + k] * p * r / v
        f -= 1.0
        if f > 0.0:
            hi = x
        else:
            lo = x
        if fabs(f) <= 1e-15 or hi - lo <= 1e-16 * hi:
            break
        if df > 0.0:
            nx = x - f / df
        else:
            nx = 0.5 * (lo + hi)
        if not (lo < nx and nx < hi):
            nx = 0.5 * (lo + hi)
        x = nx
    return x


def ascent_sweeps(const cnp.int32_t[:] indptr, const cnp.int32_t[:] indices,
                  const double[:] data, const double[:] mu, double q,
                  double[:] lam, double[:] s, int n_sweeps):
    cdef double p = 1.0 / (q - 1.0)
    cdef double change = 0.0, old, new, v
    cdef Py_ssize_t n_curves = indptr.shape[0] - 1
    cdef Py_ssize_t r, a, n, k, i, maxlen = 0
    cdef int sweep
    for r in range(n_curves):
        if indptr[r + 1] - indptr[r] > maxlen:
            maxlen = indptr[r + 1] - indptr[r]
    cdef double[:] base = np.empty(max(maxlen, 1))
    cdef double[:] qmu = np.empty(max(maxlen, 1))
    with nogil:
        for sweep in range(n_sweeps):
            change = 0.0
            for r in range(n_curves):
                a = indptr[r]
                n = indptr[r + 1] - a
                old = lam[r]
                for k in range(n):
                    i = indices[a + k]
                    v = s[i] - old * data[a + k]
                    base[k] = v if v > 0.0 else 0.0
                    qmu[k] = q * mu[i]
                new = _solve_multiplier(data, base, qmu, a, n, p, old)
                if new != old:
                    for k in range(n):
                        s[indices[a + k]] = base[k] + new * data[a + k]
                    lam[r] = new
                    if fabs(new - old) > change:
                        change = fabs(new - old)
    return change


def density_from_load(s, mu, q):
    return np.power(np.maximum(s, 0.0) / (q * mu), 1.0 / (q - 1.0))
