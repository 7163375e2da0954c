"""The contactomorphism g: H -> AA and the 1-quasiregular map f: AA -> H."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .frames import FD_STEP, contact_covector, frame_matrix, to_coeffs
from .groups import AA, H, GroupId, GroupPoint


# ---------------------------------------------------------------- formulas

def g_forward(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([x * np.exp(-y), np.exp(y), 0.5 * (t - 2 * x * y + 4 * x)], axis=-1)


def g_inverse(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a, lam, t = p[..., 0], p[..., 1], p[..., 2]
    if np.any(lam <= 0):
        raise ValueError("g^-1 needs lambda > 0")
    ll = np.log(lam)
    return np.stack([a * lam, ll, 2 * t + 2 * a * lam * (ll - 2)], axis=-1)


def g_jacobian(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    e = np.exp(-y)
    J = np.zeros(p.shape[:-1] + (3, 3))
    J[..., 0, 0] = e
    J[..., 0, 1] = -x * e
    J[..., 1, 1] = 1.0 / e
    J[..., 2, 0] = 2.0 - y
    J[..., 2, 1] = -x
    J[..., 2, 2] = 0.5
    return J


def f_forward(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a, lam, t = p[..., 0], p[..., 1], p[..., 2]
    if np.any(lam <= 0):
        raise ValueError("f needs lambda > 0")
    r = np.sqrt(lam)
    return np.stack([-r * np.cos(a), r * np.sin(a), t], axis=-1)


def f_jacobian(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a, lam = p[..., 0], p[..., 1]
    r = np.sqrt(lam)
    J = np.zeros(p.shape[:-1] + (3, 3))
    J[..., 0, 0] = r * np.sin(a)
    J[..., 0, 1] = -np.cos(a) / (2 * r)
    J[..., 1, 0] = r * np.cos(a)
    J[..., 1, 1] = np.sin(a) / (2 * r)
    J[..., 2, 2] = 1.0
    return J


def _identity(p):
    return np.asarray(p, dtype=float)


def _identity_jac(p):
    p = np.asarray(p, dtype=float)
    return np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)).copy()


@dataclass(frozen=True)
class SmoothMap:
    name: str
    source: GroupId
    target: GroupId
    forward: Callable
    jacobian: Callable
    inverse: Optional[Callable] = None

    def __call__(self, p):
        if isinstance(p, GroupPoint):
            if p.group is not self.source:
                raise ValueError(f"{self.name} expects a {self.source.name} point")
            return GroupPoint.of(self.target, self.forward(p.coords))
        return self.forward(p)

    def fd_jacobian(self, p, h: float = FD_STEP) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        cols = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            cols.append((self.forward(p + e) - self.forward(p - e)) / (2 * h))
        return np.stack(cols, axis=-1)


MAP_G = SmoothMap("g", H, AA, g_forward, g_jacobian, g_inverse)
MAP_F = SmoothMap("f", AA, H, f_forward, f_jacobian)


def identity_map(group) -> SmoothMap:
    g = GroupId.parse(group)
    return SmoothMap("id", g, g, _identity, _identity_jac, _identity)


def map_g(p: GroupPoint) -> GroupPoint:
    return MAP_G(p)


def map_g_inverse(p: GroupPoint) -> GroupPoint:
    if p.group is not AA:
        raise ValueError("g^-1 expects an affine-additive point")
    return GroupPoint.of(H, g_inverse(p.coords))


def map_f(p: GroupPoint) -> GroupPoint:
    return MAP_F(p)


# ---------------------------------------------------------------- diagnostics

def pullback_array(m: SmoothMap, p):
    """Return (residual, factor) for m^* theta_target = factor * theta_source.

    The factor is the least-squares multiple over the three covector
    components; the residual is the sup-norm of what remains.
    """
    p = np.asarray(p, dtype=float)
    J = m.jacobian(p)
    pulled = np.einsum("...i,...ij->...j", contact_covector(m.target, m.forward(p)), J)
    src = contact_covector(m.source, p)
    factor = np.einsum("...i,...i->...", pulled, src) / np.einsum("...i,...i->...", src, src)
    resid = np.abs(pulled - factor[..., None] * src).max(axis=-1)
    return resid, factor


def pullback_residual(m: SmoothMap, p: GroupPoint) -> tuple[float, float]:
    r, f = pullback_array(m, p.coords)
    return float(r), float(f)


def pushforward_array(m: SmoothMap, p) -> np.ndarray:
    """2x2 matrix of the horizontal differential in the source/target frames.

    Column k holds the (E1, E2) coefficients of m_* E_k; the contact component
    is dropped because a contact map sends horizontals to horizontals.
    """
    p = np.asarray(p, dtype=float)
    pushed = m.jacobian(p) @ frame_matrix(m.source, p)[..., :, :2]
    q = m.forward(p)
    coeffs = np.linalg.solve(frame_matrix(m.target, q)[..., None, :, :],
                             np.swapaxes(pushed, -1, -2)[..., None])[..., 0]
    return np.swapaxes(coeffs[..., :2], -1, -2)


def pushforward_frame_coeffs(m: SmoothMap, p: GroupPoint) -> np.ndarray:
    return pushforward_array(m, p.coords)


def dilatation_array(m: SmoothMap, p) -> np.ndarray:
    sv = np.linalg.svd(pushforward_array(m, p), compute_uv=False)
    with np.errstate(divide="ignore"):
        return np.where(sv[..., 1] > 0, sv[..., 0] / np.where(sv[..., 1] > 0, sv[..., 1], 1.0),
                        np.inf)


def dilatation(m: SmoothMap, p: GroupPoint) -> float:
    return float(dilatation_array(m, p.coords))


def jacobian_determinant(m: SmoothMap, p) -> np.ndarray:
    return np.linalg.det(m.jacobian(np.asarray(p, dtype=float)))


def vertical_leak(m: SmoothMap, p) -> np.ndarray:
    """Contact component of m_* E1, m_* E2; zero for a contact map."""
    p = np.asarray(p, dtype=float)
    pushed = m.jacobian(p) @ frame_matrix(m.source, p)[..., :, :2]
    c = to_coeffs(m.target, m.forward(p)[..., None, :], np.swapaxes(pushed, -1, -2))
    return np.abs(c[..., 2]).max(axis=-1)


def sample_box(group, n: int, rng: np.random.Generator) -> np.ndarray:
    """Default sampling boxes: [-2,2]^3 for H/RT, lam in [e^-2, e^2] for AA."""
    pts = rng.uniform(-2.0, 2.0, size=(n, 3))
    if GroupId.parse(group) is AA:
        pts[:, 1] = rng.uniform(np.exp(-2.0), np.exp(2.0), size=n)
    return pts
