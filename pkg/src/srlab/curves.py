"""Sampled curves: horizontality, horizontal length, projection and lifts."""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .frames import contact_covector
from .groups import AA, H, RT, GroupId, GroupMismatch, GroupPoint, mul, validate_coords

WARN_DEFECT = 1e-6
MAX_DEFECT = 1e-2


class HorizontalityError(ValueError):
    pass


@dataclass(frozen=True)
class HyperbolicPoint:
    """Point of the right half-plane; the metric is |dz|^2 / (4 xi^2)."""

    xi: float
    eta: float

    def __post_init__(self):
        if not (np.isfinite(self.xi) and np.isfinite(self.eta)):
            raise ValueError("non-finite hyperbolic point")
        if self.xi <= 0:
            raise ValueError(f"xi must be positive, got {self.xi}")


@dataclass(frozen=True, eq=False)
class SampledCurve:
    group: GroupId
    params: np.ndarray
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = GroupId.parse(self.group)
        s = np.asarray(self.params, dtype=float)
        pts = validate_coords(g, np.asarray(self.points, dtype=float))
        if s.ndim != 1 or pts.shape != (s.size, 3):
            raise ValueError("params and points must have matching lengths")
        if s.size < 2:
            raise ValueError("a sampled curve needs at least two samples")
        if np.any(np.diff(s) <= 0):
            raise ValueError("params must be strictly increasing")
        object.__setattr__(self, "group", g)
        object.__setattr__(self, "params", s)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, group, points) -> "SampledCurve":
        pts = np.asarray(points, dtype=float)
        return cls(group, np.linspace(0.0, 1.0, len(pts)), pts)

    @classmethod
    def from_function(cls, group, fn, K: int) -> "SampledCurve":
        s = np.linspace(0.0, 1.0, K + 1)
        return cls(group, s, np.array([fn(si) for si in s], dtype=float))

    @property
    def K(self) -> int:
        return self.params.size - 1

    def point(self, k: int) -> GroupPoint:
        return GroupPoint.of(self.group, self.points[k])

    @property
    def start(self) -> GroupPoint:
        return self.point(0)

    @property
    def end(self) -> GroupPoint:
        return self.point(-1)

    def translated(self, p0) -> "SampledCurve":
        c0 = p0.coords if isinstance(p0, GroupPoint) else np.asarray(p0, dtype=float)
        return SampledCurve(self.group, self.params, mul(self.group, c0, self.points))

    def reparameterized(self, new_params) -> "SampledCurve":
        """Piecewise-linear resampling in chart coordinates."""
        s = np.asarray(new_params, dtype=float)
        pts = np.stack([np.interp(s, self.params, self.points[:, k]) for k in range(3)], axis=1)
        return SampledCurve(self.group, s, pts)

    def concat(self, other: "SampledCurve") -> "SampledCurve":
        if other.group is not self.group:
            raise GroupMismatch("cannot concatenate curves of different groups")
        n1, n2 = self.K, other.K
        s = np.linspace(0.0, 1.0, n1 + n2 + 1)
        return SampledCurve(self.group, s, np.vstack([self.points, other.points[1:]]))


# ---------------------------------------------------------------- segment kernels

def _log_mean_inv(l0, l1):
    """(ln l1 - ln l0) / (l1 - l0), i.e. the mean of 1/lam along the chord."""
    l0 = np.asarray(l0, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    r = l1 / l0 - 1.0
    small = np.abs(r) < 1e-6
    rs = np.where(small, 1.0, r)
    exact = np.log1p(np.where(small, 0.0, r)) / (l0 * rs)
    series = (1.0 - r / 2.0 + r * r / 3.0) / l0
    return np.where(small, series, exact)


def segment_lengths(g, points, rule: str = "chord") -> np.ndarray:
    """Horizontal length of each chord of a sampled curve.

    ``rule="chord"`` integrates the horizontal speed exactly along the chord
    where that has a closed form (H, AA); RT always uses the midpoint rule.
    """
    g = GroupId.parse(g)
    P = np.asarray(points, dtype=float)
    d = np.diff(P, axis=-2)
    if g is H:
        return np.hypot(d[..., 0], d[..., 1])
    if g is RT:
        tm = 0.5 * (P[..., 1:, 2] + P[..., :-1, 2])
        along = d[..., 0] * np.cos(tm) + d[..., 1] * np.sin(tm)
        return np.hypot(along, d[..., 2])
    chord = np.hypot(d[..., 1], d[..., 2])
    if rule == "midpoint":
        lam = 0.5 * (P[..., 1:, 1] + P[..., :-1, 1])
        return chord / (2.0 * lam)
    return 0.5 * chord * _log_mean_inv(P[..., :-1, 1], P[..., 1:, 1])


def segment_defects(g, points, params) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    ds = np.diff(np.asarray(params, dtype=float))
    vel = np.diff(P, axis=0) / ds[:, None]
    mid = 0.5 * (P[1:] + P[:-1])
    return np.abs(np.einsum("ki,ki->k", contact_covector(g, mid), vel))


# ---------------------------------------------------------------- operations

def horizontality_defect(c: SampledCurve) -> float:
    return float(segment_defects(c.group, c.points, c.params).max())


def horizontal_length(c: SampledCurve, rule: str = "chord", check: bool = True) -> float:
    if not np.all(np.isfinite(c.points)):
        raise ValueError("non-finite curve samples")
    if check:
        defect = horizontality_defect(c)
        if defect > MAX_DEFECT:
            raise HorizontalityError(f"curve is not horizontal (defect {defect:.3g})")
        if defect > WARN_DEFECT:
            warnings.warn(f"horizontality defect {defect:.3g} above {WARN_DEFECT:g}",
                          stacklevel=2)
    return float(segment_lengths(c.group, c.points, rule).sum())


def project(c: SampledCurve) -> list[HyperbolicPoint]:
    if c.group is not AA:
        raise GroupMismatch("projection is defined on the affine-additive group")
    return [HyperbolicPoint(float(lam), float(t)) for lam, t in c.points[:, 1:]]


def hyperbolic_length(base) -> float:
    """Length of the polyline through ``base`` in the metric |dz|/(2 xi)."""
    arr = _as_xy(base)
    pts = np.column_stack([np.zeros(len(arr)), arr])
    return float(segment_lengths(AA, pts).sum())


def _as_xy(base) -> np.ndarray:
    if isinstance(base, np.ndarray):
        arr = np.asarray(base, dtype=float)
    else:
        arr = np.array([[b.xi, b.eta] for b in base], dtype=float)
    if np.any(arr[:, 0] <= 0):
        raise ValueError("hyperbolic points need xi > 0")
    return arr


def lift_a(xi, eta, a0: float = 0.0, rule: str = "trapezoid") -> np.ndarray:
    """a-coordinate of the horizontal lift, integrating da = d(eta) / (2 xi)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    d_eta = np.diff(eta, axis=-1)
    if rule == "trapezoid":
        inc = d_eta * 0.25 * (1.0 / xi[..., 1:] + 1.0 / xi[..., :-1])
    else:
        inc = 0.5 * d_eta * _log_mean_inv(xi[..., :-1], xi[..., 1:])
    zero = np.zeros(xi.shape[:-1] + (1,))
    return a0 + np.concatenate([zero, np.cumsum(inc, axis=-1)], axis=-1)


def horizontal_lift(base, a0: float = 0.0, params=None, rule: str = "trapezoid") -> SampledCurve:
    arr = _as_xy(base)
    a = lift_a(arr[:, 0], arr[:, 1], a0, rule)
    s = np.linspace(0.0, 1.0, len(arr)) if params is None else params
    return SampledCurve(AA, s, np.column_stack([a, arr]))


def hyperbolic_distance(p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    return float(hyperbolic_distance_array([p.xi, p.eta], [q.xi, q.eta]))


def hyperbolic_distance_array(p, q) -> np.ndarray:
    """Half of the standard half-plane distance, since the metric is |dz|/(2 xi)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    num = (p[..., 0] - q[..., 0]) ** 2 + (p[..., 1] - q[..., 1]) ** 2
    return 0.5 * np.arccosh(1.0 + num / (2.0 * p[..., 0] * q[..., 0]))


# ---------------------------------------------------------------- CSV exchange

def write_curve_csv(c: SampledCurve, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "c1", "c2", "c3"])
    for s, (c1, c2, c3) in zip(c.params, c.points):
        w.writerow([repr(float(v)) for v in (s, c1, c2, c3)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_curve_csv(source, group) -> SampledCurve:
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) or (
        isinstance(source, str) and "\n" not in source) else source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["s", "c1", "c2", "c3"]:
        raise ValueError("curve CSV needs header s,c1,c2,c3")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return SampledCurve(group, data[:, 0], data[:, 1:])
