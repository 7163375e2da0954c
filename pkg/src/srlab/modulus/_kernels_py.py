"""Pure-Python dual ascent kernel; reference for the compiled version."""
from __future__ import annotations

import numpy as np


def _solve_multiplier(w, base, qmu, p, lam0):
    """Smallest lam >= 0 with sum_i w_i ((base_i + lam w_i) / qmu_i)^p >= 1."""
    n = len(w)

    def integral(lam):
        tot = 0.0
        for k in range(n):
            v = base[k] + lam * w[k]
            if v > 0.0:
                tot += w[k] * (v / qmu[k]) ** p
        return tot

    if integral(0.0) >= 1.0:
        return 0.0
    c = 0.0
    for k in range(n):
        c += w[k] * (w[k] / qmu[k]) ** p
    lo, hi = 0.0, c ** (-1.0 / p)
    x = lam0 if lo < lam0 < hi else hi
    for _ in range(200):
        f = 0.0
        df = 0.0
        for k in range(n):
            v = base[k] + x * w[k]
            if v > 0.0:
                r = (v / qmu[k]) ** p
                f += w[k] * r
                df += w[k] * w[k] * p * r / v
        f -= 1.0
        if f > 0.0:
            hi = x
        else:
            lo = x
        if abs(f) <= 1e-15 or hi - lo <= 1e-16 * hi:
            break
        nx = x - f / df if df > 0.0 else 0.5 * (lo + hi)
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        x = nx
    return x


def ascent_sweeps(indptr, indices, data, mu, q, lam, s, n_sweeps):
    """Cyclic exact maximisation of the dual over each curve multiplier.

    ``lam`` (per curve) and ``s`` (per node, s = W^T lam) are updated in
    place.  Returns the largest multiplier change of the last sweep.
    """
    p = 1.0 / (q - 1.0)
    change = 0.0
    n_curves = len(indptr) - 1
    for _ in range(n_sweeps):
        change = 0.0
        for r in range(n_curves):
            a, b = indptr[r], indptr[r + 1]
            idx = indices[a:b]
            w = data[a:b]
            old = lam[r]
            base = [max(s[i] - old * wk, 0.0) for i, wk in zip(idx, w)]
            qmu = [q * mu[i] for i in idx]
            new = _solve_multiplier(list(w), base, qmu, p, old)
            if new != old:
                for k, i in enumerate(idx):
                    s[i] = base[k] + new * w[k]
                lam[r] = new
                change = max(change, abs(new - old))
    return change


def density_from_load(s, mu, q):
    """KKT map rho_i = (s_i / (q mu_i))^(1/(q-1))."""
    return np.power(np.maximum(s, 0.0) / (q * mu), 1.0 / (q - 1.0))

