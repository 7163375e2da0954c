"""Contact forms, left-invariant frames and brackets.

Frame ordering is (E1, E2, E3) with E1, E2 horizontal and orthonormal:

* H:  X = d_x + 2y d_t,  Y = d_y - 2x d_t,       E3 = d_t
* RT: X = cos t d_x + sin t d_y,  Y = d_t,       E3 = sin t d_x - cos t d_y
* AA: U = d_a + 2 lam d_t,  V = 2 lam d_lam,     E3 = W = -d_a

E3 is normalised so that the contact form evaluates to 1 on it; the third
frame coefficient of a vector is therefore its contact-form value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import H, GroupId, GroupPoint, left_jacobian, mul

FD_STEP = 1e-5


@dataclass(frozen=True)
class TangentVector:
    base: GroupPoint
    v1: float
    v2: float
    v3: float

    @classmethod
    def of(cls, base: GroupPoint, comps) -> "TangentVector":
        c = np.asarray(comps, dtype=float).reshape(3)
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite tangent components")
        return cls(base, float(c[0]), float(c[1]), float(c[2]))

    @property
    def comps(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3])


@dataclass(frozen=True)
class FrameCoeffs:
    alpha: float
    beta: float
    rest: float

    @property
    def horizontal_norm(self) -> float:
        return float(np.hypot(self.alpha, self.beta))


# ---------------------------------------------------------------- array level

def contact_covector(g, p) -> np.ndarray:
    """Components of the contact form in the coordinate coframe, (..., 3)."""
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    one = np.ones_like(x)
    if g is H:
        return np.stack([-2.0 * y, 2.0 * x, one], axis=-1)
    if g is GroupId.ROTO_TRANSLATION:
        return np.stack([np.sin(t), -np.cos(t), 0.0 * one], axis=-1)
    return np.stack([-one, 0.0 * one, 0.5 / y], axis=-1)


def frame_matrix(g, p) -> np.ndarray:
    """Columns are E1, E2, E3 at p; shape (..., 3, 3)."""
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    F = np.zeros(p.shape[:-1] + (3, 3))
    if g is H:
        F[..., 0, 0] = 1.0
        F[..., 2, 0] = 2.0 * y
        F[..., 1, 1] = 1.0
        F[..., 2, 1] = -2.0 * x
        F[..., 2, 2] = 1.0
    elif g is GroupId.ROTO_TRANSLATION:
        c, s = np.cos(t), np.sin(t)
        F[..., 0, 0], F[..., 1, 0] = c, s
        F[..., 2, 1] = 1.0
        F[..., 0, 2], F[..., 1, 2] = s, -c
    else:
        F[..., 0, 0] = 1.0
        F[..., 2, 0] = 2.0 * y
        F[..., 1, 1] = 2.0 * y
        F[..., 0, 2] = -1.0
    return F


def frame_derivative(g, p) -> np.ndarray:
    """D[k, i, j] = d(E_k)_i / dx_j, hand-differentiated; shape (..., 3, 3, 3)."""
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    D = np.zeros(p.shape[:-1] + (3, 3, 3))
    if g is H:
        D[..., 0, 2, 1] = 2.0
        D[..., 1, 2, 0] = -2.0
    elif g is GroupId.ROTO_TRANSLATION:
        t = p[..., 2]
        c, s = np.cos(t), np.sin(t)
        D[..., 0, 0, 2], D[..., 0, 1, 2] = -s, c
        D[..., 2, 0, 2], D[..., 2, 1, 2] = c, s
    else:
        D[..., 0, 2, 1] = 2.0
        D[..., 1, 1, 1] = 2.0
    return D


def to_coeffs(g, p, v) -> np.ndarray:
    return np.linalg.solve(frame_matrix(g, p), np.asarray(v, dtype=float)[..., None])[..., 0]


def from_coeffs(g, p, c) -> np.ndarray:
    return np.einsum("...ij,...j->...i", frame_matrix(g, p), np.asarray(c, dtype=float))


def bracket_array(g, i: int, j: int, p) -> np.ndarray:
    """[E_i, E_j](p) = DE_j . E_i - DE_i . E_j from the analytic derivatives."""
    F = frame_matrix(g, p)
    D = frame_derivative(g, p)
    Ei, Ej = F[..., :, i], F[..., :, j]
    return (np.einsum("...ab,...b->...a", D[..., j, :, :], Ei)
            - np.einsum("...ab,...b->...a", D[..., i, :, :], Ej))


def bracket_fd_array(g, i: int, j: int, p, h: float = FD_STEP) -> np.ndarray:
    """Same bracket with the frame Jacobians taken by central differences."""
    p = np.asarray(p, dtype=float)

    def jac(k):
        cols = []
        for m in range(3):
            e = np.zeros(3)
            e[m] = h
            cols.append((frame_matrix(g, p + e)[..., :, k]
                         - frame_matrix(g, p - e)[..., :, k]) / (2 * h))
        return np.stack(cols, axis=-1)

    F = frame_matrix(g, p)
    return (np.einsum("...ab,...b->...a", jac(j), F[..., :, i])
            - np.einsum("...ab,...b->...a", jac(i), F[..., :, j]))


def left_invariance_residual_array(g, p0, p) -> np.ndarray:
    """max_k |(DL_p0)_p E_k(p) - E_k(p0 * p)|, per point."""
    J = left_jacobian(g, p0, p)
    pushed = J @ frame_matrix(g, p)
    target = frame_matrix(g, mul(g, p0, p))
    return np.abs(pushed - target).max(axis=(-2, -1))


# ---------------------------------------------------------------- point level

def _check_base(p: GroupPoint, v: TangentVector):
    if v.base != p:
        raise ValueError("tangent vector is not based at p")


def contact_form(p: GroupPoint, v: TangentVector) -> float:
    _check_base(p, v)
    return float(contact_covector(p.group, p.coords) @ v.comps)


def frame(p: GroupPoint) -> tuple[TangentVector, TangentVector, TangentVector]:
    F = frame_matrix(p.group, p.coords)
    return tuple(TangentVector.of(p, F[:, k]) for k in range(3))


def to_frame_coeffs(v: TangentVector) -> FrameCoeffs:
    c = to_coeffs(v.base.group, v.base.coords, v.comps)
    return FrameCoeffs(float(c[0]), float(c[1]), float(c[2]))


def from_frame_coeffs(p: GroupPoint, c: FrameCoeffs) -> TangentVector:
    return TangentVector.of(p, from_coeffs(p.group, p.coords, [c.alpha, c.beta, c.rest]))


def lie_bracket(g, i: int, j: int, p: GroupPoint) -> TangentVector:
    return TangentVector.of(p, bracket_array(g, i, j, p.coords))


def lie_bracket_fd(g, i: int, j: int, p: GroupPoint) -> TangentVector:
    return TangentVector.of(p, bracket_fd_array(g, i, j, p.coords))


def verify_left_invariance(g, p0: GroupPoint, p: GroupPoint) -> float:
    return float(left_invariance_residual_array(g, p0.coords, p.coords))


def inner(v: TangentVector, w: TangentVector) -> float:
    """Sub-Riemannian inner product of the horizontal parts."""
    cv, cw = to_frame_coeffs(v), to_frame_coeffs(w)
    return cv.alpha * cw.alpha + cv.beta * cw.beta


def horizontal_speed(g, p, v) -> np.ndarray:
    c = to_coeffs(g, p, v)
    return np.hypot(c[..., 0], c[..., 1])

