"""Ring domains {R0 < d(x0, x) < R} discretised as grid networks.

Nodes sit on a lattice in chart coordinates around the identity; by left
invariance the network for a centre x0 is the left translate of it.  Edges
join each node to its images under right multiplication by a few small
group elements (snapped to the lattice) and to its chart neighbours.  An
edge's length is the connector length between its endpoints, an upper bound
for their CC distance, so graph distances overestimate CC distances.

* H:  lattice (i h, j h, 2 k h^2); right multiplication by (+-h, 0, 0),
  (0, +-h, 0), (+-h, +-h, 0) lands exactly on the lattice.
* RT: lattice (i h, j h, k h) with chart neighbours and snapped unit moves.
* AA: lattice in (a, log lam, t) restricted to the slab over the inner
  ball's (a, t) extent.  Balls grow exponentially in AA, so the full ring is
  out of reach; curves inside the slab are a subfamily of the ring's curves,
  so the slab modulus is a lower estimate.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csgraph

from .. import connectors
from ..groups import AA, H, RT, GroupId, GroupPoint, mul
from .network import MeasureNetwork, ModulusReport
from .solver import SolverConfig, solve_connecting_modulus

log = logging.getLogger(__name__)


@dataclass
class RingGrid:
    h: float = 1.0            # lattice step for H and RT
    h_a: float = 0.5          # AA steps in a, log(lam), t
    h_u: float = 0.5
    h_t: float = 0.5
    window: Optional[float] = None  # AA half-width in a and t; None: box around the R0-ball
    q: float = 4.0
    edge_cap: float = 1.5     # drop edges longer than this times the longest at the origin
    tol: float = 2e-3
    rel_gap: float = 2e-2
    max_iter: int = 20_000
    batch: int = 512
    knight: bool = True       # H: add (2,1)-type horizontal moves for isotropy
    max_nodes: int = 2_000_000


@dataclass
class RingNetwork:
    net: MeasureNetwork
    dist: np.ndarray       # graph distance from the centre node
    A: np.ndarray
    B: np.ndarray
    center_index: int


def _lattice_h(cfg: RingGrid, Rb: float, R0: float):
    h = cfg.h
    m = int(np.ceil(Rb / h))
    kt = int(np.ceil(4.0 * Rb * Rb / np.pi / (2 * h * h))) + 1
    steps = np.array([h, h, 2 * h * h])
    axes = [np.arange(-m, m + 1), np.arange(-m, m + 1), np.arange(-kt, kt + 1)]
    to_chart = lambda ijk: ijk * steps
    to_grid = lambda p: np.rint(p / steps).astype(np.int64)
    moves = [(1, 0), (0, 1), (1, 1), (1, -1)]
    if cfg.knight:
        moves += [(2, 1), (1, 2), (2, -1), (1, -2)]
    gens = [sgn * np.array([i * h, j * h, 0.0]) for i, j in moves for sgn in (1, -1)]
    cell = h * h * 2 * h * h
    return axes, to_chart, to_grid, gens, lambda pts: np.full(len(pts), cell)


def _lattice_rt(cfg: RingGrid, Rb: float, R0: float):
    h = cfg.h
    m = int(np.ceil(Rb / h))
    axes = [np.arange(-m, m + 1)] * 3
    steps = np.array([h, h, h])
    gens = [np.array(v, float) for v in [(h, 0, 0), (-h, 0, 0)]]
    return (axes, lambda ijk: ijk * steps, lambda p: np.rint(p / steps).astype(np.int64), gens,
            lambda pts: np.full(len(pts), h ** 3))


def aa_window(R0: float) -> tuple[float, float]:
    """Half-widths in a and t of the smallest chart box containing the AA R0-ball at e.

    a moves at unit speed at most, and sinh(2 R0) is the widest t of the
    projected hyperbolic disc; both are attained.
    """
    return float(R0), float(np.sinh(2.0 * R0))


def _lattice_aa(cfg: RingGrid, Rb: float, R0: float):
    ha, hu, ht = cfg.h_a, cfg.h_u, cfg.h_t
    wa, wt = (cfg.window, cfg.window) if cfg.window is not None else aa_window(R0)
    ma = int(np.floor(wa / ha + 1e-9))
    mt = int(np.floor(wt / ht + 1e-9))
    mu_ = int(np.ceil(2.0 * Rb / hu))
    axes = [np.arange(-ma, ma + 1), np.arange(-mu_, mu_ + 1), np.arange(-mt, mt + 1)]

    def to_chart(ijk):
        return np.column_stack([ijk[:, 0] * ha, np.exp(ijk[:, 1] * hu), ijk[:, 2] * ht])

    def to_grid(p):
        return np.column_stack([np.rint(p[:, 0] / ha), np.rint(np.log(p[:, 1]) / hu),
                                np.rint(p[:, 2] / ht)]).astype(np.int64)

    # flow of the horizontal frame: a-step with t += 2 lam h_a; lam-step exp(+-h_u)
    gens = [np.array(v, float) for v in
            [(ha, 1.0, 2 * ha), (-ha, 1.0, -2 * ha), (0.0, np.exp(hu), 0.0),
             (0.0, np.exp(-hu), 0.0)]]
    return axes, to_chart, to_grid, gens, lambda pts: np.full(len(pts), ha * hu * ht) / pts[:, 1]


_LATTICES = {H: _lattice_h, RT: _lattice_rt, AA: _lattice_aa}


def build_ring_network(g, R0: float, R: float, cfg: RingGrid | None = None,
                       center: Optional[GroupPoint] = None) -> RingNetwork:
    cfg = cfg or RingGrid()
    g = GroupId.parse(g)
    if not (R0 > 0 and R > R0):
        raise ValueError("need R > R0 > 0")
    axes, to_chart, to_grid, gens, cell_mu = _LATTICES[g](cfg, R, R0)
    # first pass: a generous envelope using the certified lower bound
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) > 20 * cfg.max_nodes:
        raise ValueError(f"lattice {shape} too large; coarsen the grid")
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = to_chart(grid.astype(float))
    slack = 2.0 * max(cfg.h, cfg.h_u) + 1.0
    keep = connectors.lower_bound(g, pts, fiber=True) <= R + slack
    grid, pts = grid[keep], pts[keep]
    if len(pts) > cfg.max_nodes:
        raise ValueError(f"{len(pts)} nodes exceed max_nodes={cfg.max_nodes}")

    offsets = np.array([a[0] for a in axes])
    lookup = -np.ones(shape, dtype=np.int64)
    lookup[tuple((grid - offsets).T)] = np.arange(len(grid))

    def find(ijk):
        loc = ijk - offsets
        ok = np.all((loc >= 0) & (loc < np.array(shape)), axis=1)
        out = -np.ones(len(ijk), dtype=np.int64)
        out[ok] = lookup[tuple(loc[ok].T)]
        return out

    src = np.arange(len(grid))
    pairs = []
    # chart neighbours keep the lattice connected in every direction
    for axis in range(3):
        e = np.zeros(3, dtype=np.int64)
        e[axis] = 1
        j = find(grid + e)
        pairs.append(np.column_stack([src[j >= 0], j[j >= 0]]))
    for s in gens:
        j = find(to_grid(mul(g, pts, s)))
        ok = (j >= 0) & (j != src)
        pairs.append(np.column_stack([src[ok], j[ok]]))
    E = np.sort(np.concatenate(pairs), axis=1)
    E = np.unique(E, axis=0)
    with np.errstate(all="ignore"):
        lengths = connectors.connector_length(g, connectors.relative(g, pts[E[:, 0]],
                                                                     pts[E[:, 1]]))
    origin = int(find(np.zeros((1, 3), dtype=np.int64))[0])
    # long edges are poor quadrature for rho and let paths jump the ring
    at_origin = (E[:, 0] == origin) | (E[:, 1] == origin)
    cap = cfg.edge_cap * float(lengths[at_origin].max())
    good = np.isfinite(lengths) & (lengths > 0) & (lengths <= cap)
    E, lengths = E[good], lengths[good]

    net0 = MeasureNetwork(cell_mu(pts), E, lengths)
    dist = csgraph.dijkstra(net0.adjacency(), directed=False, indices=origin)
    # both are upper bounds for the CC distance; the connector is exact on H
    with np.errstate(all="ignore"):
        direct = connectors.connector_length(g, pts)
    dist = np.where(np.isfinite(dist), np.fmin(dist, direct), dist)
    # inside the R-ball plus the layer of nodes one edge outside it
    inner = np.isfinite(dist) & (dist < R)
    layer = np.zeros(len(pts), bool)
    cross = inner[E[:, 0]] != inner[E[:, 1]]
    layer[E[cross].ravel()] = True
    keep = inner | (layer & np.isfinite(dist))
    new = -np.ones(len(pts), dtype=np.int64)
    new[keep] = np.arange(keep.sum())
    E2 = new[E]
    ok = np.all(E2 >= 0, axis=1)
    coords = pts[keep]
    if center is not None:
        coords = mul(g, center.coords, coords)
    net = MeasureNetwork(cell_mu(pts[keep]), E2[ok], lengths[ok], coords, g)
    d = dist[keep]
    A = np.flatnonzero(d <= R0)
    B = np.flatnonzero(d >= R)
    if A.size == 0 or B.size == 0:
        raise ValueError("empty shell: refine the grid or widen the ring")
    return RingNetwork(net, d, A, B, int(new[origin]))


def ring_modulus(g, center: GroupPoint, R0: float, R: float,
                 grid_cfg: RingGrid | None = None) -> ModulusReport:
    """Connecting q-modulus between the R0-ball and the complement of the R-ball."""
    cfg = grid_cfg or RingGrid()
    if not (R0 > 0 and R > R0):
        raise ValueError("need R > R0 > 0")
    ring = build_ring_network(g, R0, R, cfg, center)
    log.info("ring %s R0=%g R=%g: %d nodes, %d edges, |A|=%d |B|=%d", GroupId.parse(g).name,
             R0, R, ring.net.n_nodes, ring.net.n_edges, ring.A.size, ring.B.size)
    scfg = SolverConfig(tol=cfg.tol, rel_gap=cfg.rel_gap, max_iter=cfg.max_iter,
                        batch=cfg.batch)
    return solve_connecting_modulus(ring.net, ring.A, ring.B, cfg.q, cfg.tol, scfg)
