"""Haar densities, Monte-Carlo ball volumes and volume-growth scans.

Ball membership is decided twice, once with the connector length (an upper
bound for the CC distance, so it under-counts the ball) and once with the
certified lower bound (over-counts).  Every volume is reported as that
bracket.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import connectors
from .groups import AA, H, RT, GroupId, GroupPoint, identity_coords, mul


class BudgetExhausted(RuntimeError):
    """Monte-Carlo budget used up before reaching the requested accuracy."""


@dataclass
class MCConfig:
    samples: int = 100_000
    seed: int = 0
    batch: int = 20_000
    target_rel_stderr: Optional[float] = None   # raise if not reached
    max_samples: int = 2_000_000


def haar_density(g, p) -> np.ndarray | float:
    """Density of the left Haar measure w.r.t. chart Lebesgue measure."""
    g = GroupId.parse(g)
    if isinstance(p, GroupPoint):
        return float(haar_density(g, p.coords))
    p = np.asarray(p, dtype=float)
    if g is AA:
        return 1.0 / p[..., 1] ** 2
    return np.ones(p.shape[:-1])


def haar_box_integral(g, lo, hi, n: int = 64) -> float:
    """Haar measure of a chart box by Gauss-Legendre quadrature."""
    x, w = np.polynomial.legendre.leggauss(n)
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    nodes = [0.5 * (h - l) * x + 0.5 * (h + l) for l, h in zip(lo, hi)]
    wts = [0.5 * (h - l) * w for l, h in zip(lo, hi)]
    P = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1)
    W = wts[0][:, None, None] * wts[1][None, :, None] * wts[2][None, None, :]
    return float(np.sum(W * haar_density(g, P)))


def translation_jacobian(g, p) -> float:
    """Chart Jacobian determinant of left translation by p."""
    g = GroupId.parse(g)
    return float(np.asarray(p, float)[1] ** 2) if g is AA else 1.0


def _sample_box(g, r: float, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Relative points in a box containing the r-ball at e, with chart weights.

    The weight is the box volume per sample in chart coordinates, so that
    mean(weight * f) estimates the chart integral of f over the box.
    """
    u = rng.random((n, 3))
    if g is H:
        half = np.array([r, r, 4.0 * r * r / np.pi])
        d = (2.0 * u - 1.0) * half
        return d, np.full(n, np.prod(2 * half))
    if g is RT:
        d = (2.0 * u - 1.0) * r
        return d, np.full(n, (2 * r) ** 3)
    # AA: |a| <= r (a moves at most unit speed), log lam in [-2r, 2r],
    # |t| <= sinh(2r) (the widest point of the projected hyperbolic disc);
    # lam is drawn log-uniformly, so d lam = lam d(log lam)
    ua = (2.0 * u[:, 0] - 1.0) * r
    lu = (2.0 * u[:, 1] - 1.0) * 2.0 * r
    ht = np.sinh(2.0 * r)
    ut = (2.0 * u[:, 2] - 1.0) * ht
    lam = np.exp(lu)
    d = np.column_stack([ua, lam, ut])
    return d, (2 * r) * (4 * r) * (2 * ht) * lam


@dataclass
class BallVolume:
    lower: float          # points with connector length <= r
    upper: float          # points with certified lower bound <= r
    stderr: float
    samples: int

    @property
    def volume(self) -> float:
        return 0.5 * (self.lower + self.upper)


def ball_volume(g, center: GroupPoint | None, r: float, mc_cfg: MCConfig | None = None,
                rng=None) -> BallVolume:
    """Monte-Carlo bracket for the Haar measure of the closed r-ball.

    Points are drawn in a box around the identity and translated to the
    centre, so the estimate exercises the density at the actual points
    together with the Jacobian of the translation.
    """
    g = GroupId.parse(g)
    cfg = mc_cfg or MCConfig()
    if not r > 0:
        raise ValueError("radius must be positive")
    p = identity_coords(g) if center is None else center.coords
    jac = translation_jacobian(g, p)
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    sums = np.zeros(2)
    sq = np.zeros(2)
    n = 0
    goal = cfg.samples
    while True:
        while n < goal:
            m = min(cfg.batch, goal - n)
            d, w = _sample_box(g, r, m, rng)
            x = mul(g, p, d)
            weight = w * haar_density(g, x) * jac
            with np.errstate(all="ignore"):
                lo = connectors.lower_bound(g, d, fiber=True)
                inside_up = lo <= r
                # the connector is only evaluated where the lower bound admits the point
                conn = np.full(m, np.inf)
                if np.any(inside_up):
                    conn[inside_up] = connectors.connector_length(g, d[inside_up])
            for k, mask in enumerate((conn <= r, inside_up)):
                v = np.where(mask, weight, 0.0)
                sums[k] += v.sum()
                sq[k] += (v * v).sum()
            n += m
        mean = sums / n
        var = np.maximum(sq / n - mean ** 2, 0.0)
        err = float(np.sqrt(var.max() / n))
        target = cfg.target_rel_stderr
        if target is None or err <= target * max(mean[0], 1e-300):
            break
        if n >= cfg.max_samples:
            raise BudgetExhausted(f"stderr {err:.3g} above target after {n} samples")
        goal = min(2 * n, cfg.max_samples)
    return BallVolume(float(mean[0]), float(mean[1]), err, n)


@dataclass
class VolumeScan:
    radii: list = field(default_factory=list)
    vol_lower: list = field(default_factory=list)
    vol_upper: list = field(default_factory=list)
    stderr: list = field(default_factory=list)
    Q: float = 4.0

    def __post_init__(self):
        n = len(self.radii)
        if not (len(self.vol_lower) == len(self.vol_upper) == len(self.stderr) == n):
            raise ValueError("scan lists must have equal length")

    @property
    def volumes(self) -> list:
        return [0.5 * (a + b) for a, b in zip(self.vol_lower, self.vol_upper)]

    def regularity_ratio(self, end: str = "mid") -> float:
        """max_k (v_k / r_k^Q) / min_k (v_k / r_k^Q) for one end of the bracket."""
        v = {"lower": self.vol_lower, "upper": self.vol_upper, "mid": self.volumes}[end]
        if not v:
            return float("nan")
        s = np.asarray(v) / np.asarray(self.radii) ** self.Q
        return float(s.max() / s.min()) if s.min() > 0 else float("inf")

    def running_exponents(self, end: str = "mid") -> list:
        v = {"lower": self.vol_lower, "upper": self.vol_upper, "mid": self.volumes}[end]
        return [fit_exponent(self.radii[:k + 1], v[:k + 1]) for k in range(len(v))]

    @property
    def exponent(self) -> float:
        return fit_exponent(self.radii, self.volumes)

    def growth_constant(self) -> float:
        """Smallest K with vol_upper(r) <= K r^Q over the scanned radii."""
        if not self.radii:
            return float("nan")
        return float(np.max(np.asarray(self.vol_upper) / np.asarray(self.radii) ** self.Q))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "vol_lower", "vol_upper", "stderr", "exponent_running"])
        for row in zip(self.radii, self.vol_lower, self.vol_upper, self.stderr,
                       self.running_exponents()):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def fit_exponent(radii: Sequence[float], volumes: Sequence[float]) -> float:
    """Least-squares slope of log v against log r (nan for fewer than 2 points)."""
    r = np.asarray(radii, dtype=float)
    v = np.asarray(volumes, dtype=float)
    ok = v > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(r[ok]), np.log(v[ok]), 1)[0])


def growth_scan(g, radii: Sequence[float], mc_cfg: MCConfig | None = None,
                center: GroupPoint | None = None, Q: float = 4.0) -> VolumeScan:
    """Ball volumes over increasing radii, one independent sample stream per radius."""
    g = GroupId.parse(g)
    cfg = mc_cfg or MCConfig()
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    streams = np.random.SeedSequence(cfg.seed).spawn(len(radii))
    scan = VolumeScan(Q=Q)
    for r, ss in zip(radii, streams):
        bv = ball_volume(g, center, r, cfg, rng=np.random.default_rng(ss))
        scan.radii.append(r)
        scan.vol_lower.append(bv.lower)
        scan.vol_upper.append(bv.upper)
        scan.stderr.append(bv.stderr)
    return scan
