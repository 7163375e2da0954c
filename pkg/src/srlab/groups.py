"""Group laws of the Heisenberg, roto-translation and affine-additive groups.

Every group is realised on a global chart of R^3:

* Heisenberg ``H``:          (x, y, t)
* roto-translation ``RT``:   (x, y, t), t is *not* reduced mod 2 pi
* affine-additive ``AA``:    (a, lam, t) with lam > 0

The array functions (``mul``, ``inv``, ``left_jacobian``) work on arrays of
shape ``(..., 3)`` and broadcast; ``GroupPoint`` wraps a single point.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class GroupMismatch(ValueError):
    """Raised when two points of different groups are combined."""


class GroupId(str, enum.Enum):
    HEISENBERG = "h"
    ROTO_TRANSLATION = "rt"
    AFFINE_ADDITIVE = "aa"

    @classmethod
    def parse(cls, value) -> "GroupId":
        if isinstance(value, GroupId):
            return value
        key = str(value).strip().lower()
        aliases = {
            "h": cls.HEISENBERG, "heisenberg": cls.HEISENBERG,
            "rt": cls.ROTO_TRANSLATION, "rototranslation": cls.ROTO_TRANSLATION,
            "roto-translation": cls.ROTO_TRANSLATION,
            "aa": cls.AFFINE_ADDITIVE, "affineadditive": cls.AFFINE_ADDITIVE,
            "affine-additive": cls.AFFINE_ADDITIVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown group {value!r}") from None


H = GroupId.HEISENBERG
RT = GroupId.ROTO_TRANSLATION
AA = GroupId.AFFINE_ADDITIVE


@dataclass(frozen=True)
class GroupPoint:
    group: GroupId
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        object.__setattr__(self, "group", GroupId.parse(self.group))
        vals = (self.c1, self.c2, self.c3)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite coordinates {vals}")
        if self.group is AA and not self.c2 > 0:
            raise ValueError(f"affine-additive point needs lambda > 0, got {self.c2}")
        for name, v in zip(("c1", "c2", "c3"), vals):
            object.__setattr__(self, name, float(v))

    @classmethod
    def of(cls, group, coords) -> "GroupPoint":
        c = np.asarray(coords, dtype=float).reshape(3)
        return cls(group, c[0], c[1], c[2])

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])

    def __iter__(self):
        return iter((self.c1, self.c2, self.c3))

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        return multiply(self, other)


def _same_group(p: GroupPoint, q: GroupPoint) -> GroupId:
    if p.group is not q.group:
        raise GroupMismatch(f"{p.group.name} vs {q.group.name}")
    return p.group


# ---------------------------------------------------------------- array level

def identity_coords(g) -> np.ndarray:
    g = GroupId.parse(g)
    return np.array([0.0, 1.0, 0.0]) if g is AA else np.zeros(3)


def mul(g, p, q) -> np.ndarray:
    """Product ``p * q`` for coordinate arrays of shape (..., 3)."""
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    q1, q2, q3 = q[..., 0], q[..., 1], q[..., 2]
    if g is H:
        # cross term signed so that dt + 2(x dy - y dx) and X = d_x + 2y d_t
        # are left-invariant
        t = p3 + q3 - 2.0 * (p1 * q2 - p2 * q1)
        return np.stack(np.broadcast_arrays(p1 + q1, p2 + q2, t), axis=-1)
    if g is RT:
        c, s = np.cos(p3), np.sin(p3)
        return np.stack(np.broadcast_arrays(c * q1 - s * q2 + p1,
                                            s * q1 + c * q2 + p2,
                                            p3 + q3), axis=-1)
    return np.stack(np.broadcast_arrays(p1 + q1, p2 * q2, p2 * q3 + p3), axis=-1)


def inv(g, p) -> np.ndarray:
    g = GroupId.parse(g)
    p = np.asarray(p, dtype=float)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    if g is H:
        return -p
    if g is RT:
        c, s = np.cos(p3), np.sin(p3)
        return np.stack([-(c * p1 + s * p2), -(-s * p1 + c * p2), -p3], axis=-1)
    return np.stack([-p1, 1.0 / p2, -p3 / p2], axis=-1)


def left_jacobian(g, p0, p) -> np.ndarray:
    """d(p0 * p)/dp, shape (..., 3, 3)."""
    g = GroupId.parse(g)
    p0 = np.asarray(p0, dtype=float)
    p = np.asarray(p, dtype=float)
    shape = np.broadcast_shapes(p0.shape, p.shape)[:-1]
    J = np.zeros(shape + (3, 3))
    J[..., 0, 0] = 1.0
    J[..., 1, 1] = 1.0
    J[..., 2, 2] = 1.0
    x0, y0, t0 = (np.broadcast_to(p0[..., k], shape) for k in range(3))
    if g is H:
        J[..., 2, 0] = 2.0 * y0
        J[..., 2, 1] = -2.0 * x0
    elif g is RT:
        c, s = np.cos(t0), np.sin(t0)
        J[..., 0, 0], J[..., 0, 1] = c, -s
        J[..., 1, 0], J[..., 1, 1] = s, c
    else:
        J[..., 1, 1] = y0
        J[..., 2, 2] = y0
    return J


def validate_coords(g, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("non-finite coordinates")
    if GroupId.parse(g) is AA and np.any(p[..., 1] <= 0):
        raise ValueError("affine-additive points need lambda > 0")
    return p


# ---------------------------------------------------------------- point level

def identity(g) -> GroupPoint:
    g = GroupId.parse(g)
    return GroupPoint.of(g, identity_coords(g))


def multiply(p_left: GroupPoint, p_right: GroupPoint) -> GroupPoint:
    g = _same_group(p_left, p_right)
    return GroupPoint.of(g, mul(g, p_left.coords, p_right.coords))


def inverse(p: GroupPoint) -> GroupPoint:
    return GroupPoint.of(p.group, inv(p.group, p.coords))


def left_translate(p0: GroupPoint, p: GroupPoint) -> GroupPoint:
    return multiply(p0, p)


def left_translation_jacobian(p0: GroupPoint, p: GroupPoint) -> np.ndarray:
    g = _same_group(p0, p)
    return left_jacobian(g, p0.coords, p.coords)


def random_points(g, n: int, rng: np.random.Generator, box: float = 2.0) -> np.ndarray:
    """Uniform samples in the default box; lam is log-uniform in [e^-box, e^box]."""
    g = GroupId.parse(g)
    pts = rng.uniform(-box, box, size=(n, 3))
    if g is AA:
        pts[:, 1] = np.exp(pts[:, 1])
    return pts
