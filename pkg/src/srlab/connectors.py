"""Explicit horizontal connecting curves and certified distance lower bounds.

Everything here works on *relative* coordinates ``d = p^-1 * q``, so the
results are left-invariant by construction.  Connector lengths are lengths of
genuine horizontal curves from e to d, hence upper bounds for the CC distance:

* H:  lift of a circular arc from 0 to z enclosing the area |t|/4
* RT: rotate, drive straight, rotate
* AA: image under g of the H arc joining e_H and g^-1(d)

Lower bounds combine the horizontal projection with an isoperimetric
estimate on the loop closed by a chord (H) or hyperbolic geodesic (AA).
"""
from __future__ import annotations

import numpy as np

from .curves import SampledCurve, hyperbolic_distance_array, segment_lengths
from .groups import AA, H, RT, GroupId, inv, mul
from .maps import g_forward, g_inverse

TWO_PI = 2.0 * np.pi


def relative(g, p, q) -> np.ndarray:
    return mul(g, inv(g, p), q)


# ---------------------------------------------------------------- Heisenberg arc

def _segment_ratio(phi):
    """(phi - sin phi) / (2 sin^2(phi/2)), increasing from 0 to inf on [0, 2pi)."""
    phi = np.asarray(phi, dtype=float)
    small = phi < 1e-3
    ps = np.where(small, 1.0, phi)
    num = np.where(small, phi ** 3 / 6 - phi ** 5 / 120, ps - np.sin(ps))
    den = 2.0 * np.sin(0.5 * np.where(small, 1.0, phi)) ** 2
    den = np.where(small, phi ** 2 / 2 - phi ** 4 / 24, den)
    return np.where(phi == 0, 0.0, num / np.where(den == 0, 1.0, den))


def _solve_arc_angle(ratio, iters: int = 80):
    ratio = np.asarray(ratio, dtype=float)
    lo = np.zeros_like(ratio)
    hi = np.full_like(ratio, TWO_PI)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = _segment_ratio(mid) < ratio
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def h_arc_length(d) -> np.ndarray:
    """Length of the arc connector from e to d (H, relative coordinates)."""
    d = np.asarray(d, dtype=float)
    c = np.hypot(d[..., 0], d[..., 1])
    at = np.abs(d[..., 2])
    out = np.sqrt(np.pi * at)
    pos = c > 0
    cs = np.where(pos, c, 1.0)
    phi = _solve_arc_angle(np.where(pos, at / cs ** 2, 0.0))
    half = np.sin(0.5 * phi)
    arc = np.where(phi > 1e-8, cs * phi / (2.0 * np.where(half > 0, half, 1.0)), cs)
    return np.where(pos, arc, out)


def h_arc_points(d, n: int = 256) -> np.ndarray:
    """Samples of the arc connector from e to d; shape (n+1, 3)."""
    x, y, t = (float(v) for v in np.asarray(d, dtype=float))
    c = np.hypot(x, y)
    s = np.linspace(0.0, 1.0, n + 1)
    if c == 0 and t == 0:
        return np.zeros((n + 1, 3))
    if c == 0:
        r = np.sqrt(abs(t) / (4 * np.pi))
        sigma = -np.sign(t)
        center = complex(r, 0.0)
        theta0 = np.pi
        phi = TWO_PI
    else:
        phi = float(_solve_arc_angle(abs(t) / c ** 2))
        u = complex(x, y) / c
        n_left = 1j * u
        h = 0.5 * c / np.tan(0.5 * phi) if phi > 1e-12 else 1e12
        # counter-clockwise loops give t < 0
        sigma = 1.0 if t <= 0 else -1.0
        center = 0.5 * c * u + sigma * n_left * h
        r = abs(center)
        theta0 = np.angle(-center)
    if c > 0 and phi <= 1e-12:
        z = s * complex(x, y)
        return np.column_stack([z.real, z.imag, np.zeros_like(s)])
    theta = theta0 + sigma * phi * s
    z = center + r * np.exp(1j * theta)
    cbar = np.conj(center)
    tt = -2.0 * (r * r * sigma * phi * s
                 + r * np.imag(cbar * (np.exp(1j * theta) - np.exp(1j * theta0))))
    z[0] = 0.0
    z[-1] = complex(x, y)
    tt[-1] = t
    return np.column_stack([z.real, z.imag, tt])


# ---------------------------------------------------------------- roto-translation

def _rt_heading(d):
    d = np.asarray(d, dtype=float)
    w = np.hypot(d[..., 0], d[..., 1])
    tau = d[..., 2]
    base = np.arctan2(d[..., 1], d[..., 0])
    lo = np.minimum(0.0, tau)
    hi = np.maximum(0.0, tau)
    # nearest heading base + k*pi to the interval [lo, hi]
    k_lo = np.ceil((lo - base) / np.pi)
    cand_in = base + k_lo * np.pi
    inside = cand_in <= hi
    below = base + (k_lo - 1) * np.pi
    above = cand_in
    pick = np.where(lo - below <= above - hi, below, above)
    phi = np.where(inside, cand_in, pick)
    return np.where(w > 0, phi, 0.0), w, tau


def rt_connector_length(d) -> np.ndarray:
    phi, w, tau = _rt_heading(d)
    return np.where(w > 0, np.abs(phi) + w + np.abs(tau - phi), np.abs(tau))


def rt_connector_points(d, n: int = 90) -> np.ndarray:
    phi, w, tau = (float(v) for v in _rt_heading(d))
    d = np.asarray(d, dtype=float)
    if w == 0:
        s = np.linspace(0, 1, n + 1)
        return np.column_stack([0 * s, 0 * s, tau * s])
    k = max(n // 3, 1)
    s = np.linspace(0, 1, k + 1)
    turn1 = np.column_stack([0 * s, 0 * s, phi * s])
    sign = np.sign(np.cos(phi) * d[0] + np.sin(phi) * d[1]) or 1.0
    drive = np.column_stack([sign * w * s * np.cos(phi), sign * w * s * np.sin(phi), phi + 0 * s])
    drive[-1, :2] = d[:2]
    turn2 = np.column_stack([d[0] + 0 * s, d[1] + 0 * s, phi + (tau - phi) * s])
    return np.vstack([turn1, drive[1:], turn2[1:]])


# ---------------------------------------------------------------- affine-additive

AA_NODES = 64


def aa_connector_points(d, n: int = AA_NODES) -> np.ndarray:
    """g applied to the H arc from e_H to g^-1(d); shape (..., n+1, 3)."""
    d = np.asarray(d, dtype=float)
    if d.ndim == 1:
        return g_forward(h_arc_points(g_inverse(d), n))
    hd = g_inverse(d)
    return g_forward(np.stack([h_arc_points(row, n) for row in hd.reshape(-1, 3)])
                     ).reshape(d.shape[:-1] + (n + 1, 3))


def _h_arc_points_batch(hd, n: int) -> np.ndarray:
    """Vectorised twin of h_arc_points for arrays of relative points."""
    hd = np.asarray(hd, dtype=float)
    x, y, t = hd[:, 0], hd[:, 1], hd[:, 2]
    c = np.hypot(x, y)
    s = np.linspace(0.0, 1.0, n + 1)
    pos = c > 0
    cs = np.where(pos, c, 1.0)
    phi = np.where(pos, _solve_arc_angle(np.where(pos, np.abs(t) / cs ** 2, 0.0)), TWO_PI)
    sigma = np.where(t <= 0, 1.0, -1.0)
    u = (x + 1j * y) / cs
    tanh = np.tan(0.5 * np.where(phi > 1e-12, phi, 1.0))
    h = np.where(phi > 1e-12, 0.5 * cs / tanh, 0.0)
    center = np.where(pos, 0.5 * c * u + sigma * 1j * u * h,
                      np.sqrt(np.abs(t) / (4 * np.pi)) + 0j)
    sigma = np.where(pos, sigma, -np.sign(t))
    r = np.abs(center)
    theta0 = np.angle(-center)
    theta = theta0[:, None] + (sigma * phi)[:, None] * s[None, :]
    e = np.exp(1j * theta)
    z = center[:, None] + r[:, None] * e
    tt = -2.0 * (r[:, None] ** 2 * (sigma * phi)[:, None] * s[None, :]
                 + r[:, None] * np.imag(np.conj(center)[:, None]
                                        * (e - np.exp(1j * theta0)[:, None])))
    straight = pos & (phi <= 1e-12)
    z = np.where(straight[:, None], s[None, :] * (x + 1j * y)[:, None], z)
    tt = np.where(straight[:, None], 0.0, tt)
    z[:, 0] = 0.0
    z[:, -1] = x + 1j * y
    tt[:, -1] = t
    pts = np.stack([z.real, z.imag, tt], axis=-1)
    zero = (~pos) & (t == 0)
    pts[zero] = 0.0
    return pts


def aa_connector_length(d, n: int = AA_NODES, chunk: int = 4096) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    flat = d.reshape(-1, 3)
    out = np.empty(len(flat))
    for i in range(0, len(flat), chunk):
        hd = g_inverse(flat[i:i + chunk])
        pts = g_forward(_h_arc_points_batch(hd, n))
        out[i:i + chunk] = segment_lengths(AA, pts).sum(axis=-1)
    return out.reshape(d.shape[:-1])


# ---------------------------------------------------------------- dispatch

def connector_length(g, d) -> np.ndarray:
    g = GroupId.parse(g)
    if g is H:
        return h_arc_length(d)
    if g is RT:
        return rt_connector_length(d)
    return aa_connector_length(d)


def connector_curve(g, p, q, n: int = 256) -> SampledCurve:
    """Horizontal curve from p to q built from the relative connector."""
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    d = relative(g, p, q)
    if g is H:
        pts = h_arc_points(d, n)
    elif g is RT:
        pts = rt_connector_points(d, n)
    else:
        pts = aa_connector_points(d, n)
    pts = mul(g, p, pts)
    pts[0] = p
    pts[-1] = q
    return SampledCurve.uniform(g, pts)


def geodesic_a_increment(d) -> np.ndarray:
    """Integral of d(eta)/(2 xi) along the hyperbolic geodesic from (1,0) to (lam, t)."""
    d = np.asarray(d, dtype=float)
    xi, eta = d[..., 1], d[..., 2]
    flat = np.abs(eta) < 1e-300
    es = np.where(flat, 1.0, eta)
    c = (xi * xi + es * es - 1.0) / (2.0 * es)
    th_p = np.arctan2(-c, 1.0)
    th_q = np.arctan2(es - c, xi)
    return np.where(flat, 0.0, 0.5 * (th_q - th_p))


def lower_bound(g, d, fiber: bool = False) -> np.ndarray:
    """Certified lower bound on d(e, d).

    With ``fiber=False`` this is the projection bound (|z| for H, the
    hyperbolic distance of the projections for AA).  ``fiber=True`` adds the
    isoperimetric term, which is what keeps balls bounded in the fibre
    direction.  RT always uses sqrt(|z|^2 + t^2).
    """
    g = GroupId.parse(g)
    d = np.asarray(d, dtype=float)
    if g is RT:
        return np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2 + d[..., 2] ** 2)
    if g is H:
        c = np.hypot(d[..., 0], d[..., 1])
        if not fiber:
            return c
        return np.maximum(c, np.sqrt(np.pi * np.abs(d[..., 2])) - c)
    D = hyperbolic_distance_array(np.stack([np.ones_like(d[..., 1]), 0 * d[..., 1]], -1),
                                  d[..., 1:])
    if not fiber:
        return D
    loop = np.abs(d[..., 0] - geodesic_a_increment(d))
    return np.maximum(D, np.sqrt(TWO_PI * loop) - D)


def bracket(g, p, Q):
    """(lower, upper) bounds on d(p, q) for every row q of Q."""
    d = relative(g, p, Q)
    return lower_bound(g, d, fiber=True), connector_length(g, d)
