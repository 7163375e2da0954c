"""Concrete curve families and analytic densities.

* the product family of vertical curves (a, 1 - (1 - 1/n) s, t) in AA, its
  grid network and the exact constant chain of the Hoelder lower bound;
* the logarithmic ring density rho_N = 3 / (N d) and its energy bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .. import connectors
from ..curves import SampledCurve, segment_lengths
from ..groups import AA, H, GroupId, GroupPoint, mul
from .network import DiscreteCurve, MeasureNetwork, ModulusReport
from .solver import SolverConfig, solve_modulus

Q = 4


# ---------------------------------------------------------------- vertical family in AA

def gamma0_family(n: int, grid=(33, 33), K: int = 64) -> list[SampledCurve]:
    """Vertical curves from E = {lam = 1} to F_n = {lam = 1/n} over a, t in [-1, 1]."""
    if n < 2:
        raise ValueError("n must be >= 2")
    na, nt = grid
    s = np.linspace(0.0, 1.0, K + 1)
    lam = 1.0 - (1.0 - 1.0 / n) * s
    out = []
    for a in np.linspace(-1.0, 1.0, na):
        for t in np.linspace(-1.0, 1.0, nt):
            pts = np.column_stack([np.full_like(s, a), lam, np.full_like(s, t)])
            out.append(SampledCurve(AA, s, pts))
    return out


def vertical_speed(n: int, s):
    """Horizontal speed of the vertical curve at parameter s."""
    c = 1.0 - 1.0 / n
    return c / (2.0 * (1.0 - c * np.asarray(s, dtype=float)))


def _cell_widths(x: np.ndarray) -> np.ndarray:
    """Trapezoid weights of a 1-D grid (half cells at both ends)."""
    if x.size == 1:
        return np.ones(1)
    d = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def gamma0_network(n: int, grid=(32, 64, 32)):
    """Grid network over [-1,1] x [1/n, 1] x [-1,1] and the vertical column family.

    Node measure is the trapezoid cell volume divided by lam^2; each vertical
    edge has the exact horizontal length (1/2) ln(lam_hi / lam_lo).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    na, nl, nt = grid
    a = np.linspace(-1.0, 1.0, na)
    lam = np.linspace(1.0 / n, 1.0, nl)
    t = np.linspace(-1.0, 1.0, nt)
    A, L, T = np.meshgrid(a, lam, t, indexing="ij")
    wa, wl, wt = _cell_widths(a), _cell_widths(lam), _cell_widths(t)
    mu = (wa[:, None, None] * wl[None, :, None] * wt[None, None, :]) / L ** 2
    idx = np.arange(A.size).reshape(A.shape)
    lo, hi = idx[:, :-1, :].ravel(), idx[:, 1:, :].ravel()
    lengths = 0.5 * np.log(L[:, 1:, :] / L[:, :-1, :]).ravel()
    coords = np.column_stack([A.ravel(), L.ravel(), T.ravel()])
    net = MeasureNetwork(mu.ravel(), np.column_stack([lo, hi]), lengths, coords, AA)
    # curves run from lam = 1 down to lam = 1/n
    family = [DiscreteCurve(tuple(idx[i, ::-1, j])) for i in range(na) for j in range(nt)]
    return net, family


def column_modulus(w, mu, q: float = Q) -> float:
    """Closed-form q-modulus of a single path with node weights w and measures mu."""
    w = np.asarray(w, dtype=float)
    mu = np.asarray(mu, dtype=float)
    p = q / (q - 1.0)
    return float(np.sum(w ** p * mu ** (1.0 - p)) ** (1.0 - q))


def gamma0_continuum_modulus(n: int) -> float:
    """Exact Mod_4 of the continuous vertical family: 64 / (27 (1 - n^(-1/3))^3)."""
    return 64.0 / (27.0 * (1.0 - n ** (-1.0 / 3.0)) ** 3)


@dataclass
class Gamma0Bound:
    reference: Fraction          # floor the check compares against
    integral_constant: Fraction  # lower bound for the integrated curve condition
    majorant: Fraction           # bound for the weight integral in the Hoelder step
    derived: Fraction            # integral_constant^4 / majorant^3
    continuum: float             # exact modulus of the continuous family at this n
    discrete: Optional[ModulusReport] = None

    @property
    def consistent(self) -> bool:
        """The reference floor is implied by the derived bound."""
        return self.derived >= self.reference


def gamma0_constants() -> tuple[Fraction, Fraction, Fraction]:
    """(integral constant, majorant, derived bound), in exact arithmetic.

    Each curve gives int_{1/n}^1 rho / (2 lam) dlam >= 1.  Integrating over the
    square |a|, |t| <= 1 (area 4) gives int rho / lam >= 2 * 4 = 8.  Hoelder
    with exponents 4 and 4/3 on (rho / sqrt(lam)) * (1 / sqrt(lam)) bounds the
    left side by E^(1/4) M^(3/4) with E the energy and
    M = int lam^(-2/3) <= 4 * int_0^1 lam^(-2/3) dlam = 4 * 3 = 12.
    """
    area = Fraction(2) * Fraction(2)
    integral_constant = area * Fraction(2)
    # int_0^1 lam^(-2/3) dlam = [3 lam^(1/3)]_0^1
    majorant = area * Fraction(3)
    p, p_conj = Fraction(4), Fraction(4, 3)
    exponent = p / p_conj
    assert exponent.denominator == 1
    derived = integral_constant ** int(p) / majorant ** int(exponent)
    return integral_constant, majorant, derived


def gamma0_modulus_bound(n: int, grid_cfg=None, cfg: SolverConfig | None = None) -> Gamma0Bound:
    """Analytic constant chain, plus the discrete modulus when ``grid_cfg`` is given."""
    if n < 2:
        raise ValueError("n must be >= 2")
    c8, c12, derived = gamma0_constants()
    report = None
    if grid_cfg is not None:
        net, family = gamma0_network(n, tuple(grid_cfg))
        report = solve_modulus(net, family, Q, cfg=cfg)
    return Gamma0Bound(Fraction(2 ** 4, 3 ** 3), c8, c12, derived,
                       gamma0_continuum_modulus(n), report)


# ---------------------------------------------------------------- logarithmic ring density

@dataclass
class RhoN:
    """rho_N(x) = 3 / (N d(x0, x)) on R0 < d < 2^N R0, zero elsewhere.

    ``d`` is the connector length, an upper bound for the CC distance that
    is exact on H.
    """

    x0: GroupPoint
    R0: float
    N: int
    group: GroupId

    def __post_init__(self):
        self.group = GroupId.parse(self.group)
        if self.N < 6:
            raise ValueError("N must be >= 6")
        if not self.R0 > 0:
            raise ValueError("R0 must be positive")

    @property
    def R(self) -> float:
        return self.R0 * 2.0 ** self.N

    def distance(self, pts) -> np.ndarray:
        rel = connectors.relative(self.group, self.x0.coords, np.asarray(pts, dtype=float))
        return connectors.connector_length(self.group, rel)

    def __call__(self, pts) -> np.ndarray:
        pts = pts.coords if isinstance(pts, GroupPoint) else pts
        d = self.distance(pts)
        inside = (d > self.R0) & (d < self.R)
        return np.where(inside, 3.0 / (self.N * np.where(inside, d, 1.0)), 0.0)

    def line_integral(self, c: SampledCurve) -> float:
        """Trapezoid rule on rho times the horizontal length of each chord."""
        vals = self(c.points)
        seg = segment_lengths(c.group, c.points)
        return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * seg))

    @property
    def admissibility_floor(self) -> float:
        return 3.0 * (self.N - 2) / (2.0 * self.N)

    def energy_bound(self, K: float, Q: float = Q, Q_prime: float = Q) -> float:
        """K (6/N)^Q' R0^(Q - Q') sum_{k=1}^N 2^(k (Q - Q'))."""
        k = np.arange(1, self.N + 1)
        return float(K * (6.0 / self.N) ** Q_prime * self.R0 ** (Q - Q_prime)
                     * np.sum(2.0 ** (k * (Q - Q_prime))))


def rho_N_density(x0: GroupPoint, R0: float, N: int, g=H) -> RhoN:
    return RhoN(x0, float(R0), int(N), g)


def radial_test_curves(x0: GroupPoint, R0: float, N: int, count: int = 100,
                       samples: int = 4000, rng=None) -> list[SampledCurve]:
    """Horizontal rays through x0 in H, sampled geometrically from R0/2 to 2^(N+1) R0."""
    if x0.group is not H:
        raise ValueError("radial rays are straight lines in H only")
    rng = np.random.default_rng(0) if rng is None else rng
    r = R0 * np.geomspace(0.5, 2.0 ** (N + 1), samples)
    out = []
    for theta in rng.uniform(0.0, 2.0 * np.pi, count):
        rel = np.column_stack([r * np.cos(theta), r * np.sin(theta), np.zeros_like(r)])
        out.append(SampledCurve(H, r, mul(H, x0.coords, rel)))
    return out
