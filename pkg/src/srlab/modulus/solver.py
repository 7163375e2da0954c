"""Discrete q-modulus by dual coordinate ascent.

For a family with node-weight matrix W (curve integral of rho is W @ rho) the
problem is

    minimise   sum_i mu_i rho_i^q   subject to   W rho >= 1,  rho >= 0.

Given curve multipliers lam >= 0 the minimising density is
rho_i = (s_i / (q mu_i))^(1/(q-1)) with s = W^T lam, and the dual value is
sum(lam) - (q-1) sum_i mu_i rho_i^q.  Each ascent step maximises the dual in
one multiplier exactly.  The primal certificate rescales the current density
so that its smallest curve integral is exactly 1, hence dual <= primal always.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import kernels
from .network import (Density, DiscreteCurve, MeasureNetwork, ModulusReport, NetworkError,
                      family_matrix)

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    tol: float = 1e-6          # allowed raw constraint violation
    rel_gap: float = 1e-7      # stop when primal - dual <= rel_gap * primal
    max_iter: int = 10_000     # ascent sweeps in total
    check_every: int = 5
    batch: int = 64            # new paths per constraint-generation round
    max_rounds: int = 2000
    backend: str | None = None


def _check_q(q: float) -> float:
    q = float(q)
    if not np.isfinite(q) or q <= 1.0:
        raise ValueError(f"q must be > 1, got {q}")
    return q


def curve_integrals(net: MeasureNetwork, family: Sequence[DiscreteCurve], rho) -> np.ndarray:
    values = rho.values if isinstance(rho, Density) else np.asarray(rho, dtype=float)
    return family_matrix(net, family) @ values


def is_admissible(rho, family: Sequence[DiscreteCurve], net: MeasureNetwork,
                  tol: float = 1e-9) -> tuple[bool, float]:
    """Whether every curve has rho-integral >= 1 - tol; also the smallest integral."""
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    m = float(curve_integrals(net, family, rho).min())
    return bool(m >= 1.0 - tol), m


def dual_value(lam, s, mu, q) -> float:
    rho = kernels.density_from_load(s, mu, q)
    return float(np.sum(lam) - (q - 1.0) * np.sum(mu * rho ** q))


def _certify(W, lam, s, mu, q, min_integral=None):
    """(rho_feasible, primal, dual, raw_violation) for the current multipliers."""
    rho = kernels.density_from_load(s, mu, q)
    m = float((W @ rho).min()) if min_integral is None else float(min_integral)
    dual = float(np.sum(lam) - (q - 1.0) * np.sum(mu * rho ** q))
    if m <= 0.0:
        return rho, np.inf, dual, 1.0
    feas = rho / m
    return feas, float(np.sum(mu * feas ** q)), dual, max(0.0, 1.0 - m)


def _ascend(W, mu, q, lam, s, cfg: SolverConfig, budget: int):
    """Sweep until the certificate closes; returns (sweeps, certificate)."""
    used = 0
    cert = _certify(W, lam, s, mu, q)
    while used < budget:
        n = min(cfg.check_every, budget - used)
        kernels.ascent_sweeps(W, mu, q, lam, s, n, cfg.backend)
        used += n
        cert = _certify(W, lam, s, mu, q)
        _, primal, dual, viol = cert
        if viol <= cfg.tol and primal - dual <= cfg.rel_gap * primal:
            break
    return used, cert


def solve_modulus(net: MeasureNetwork, family: Sequence[DiscreteCurve], q: float,
                  tol: float = 1e-6, cfg: SolverConfig | None = None) -> ModulusReport:
    """q-modulus of a finite family of discrete curves on ``net``."""
    cfg = replace(cfg or SolverConfig(), tol=tol)
    q = _check_q(q)
    family = list(family)
    if not family:
        raise ValueError("family must be nonempty")
    W = family_matrix(net, family)
    if np.any(np.asarray(W.sum(axis=1)).ravel() <= 0):
        raise NetworkError("every curve needs positive length")
    lam = np.zeros(len(family))
    s = np.zeros(net.n_nodes)
    sweeps, (rho, primal, dual, _) = _ascend(W, net.mu, q, lam, s, cfg, cfg.max_iter)
    viol = max(0.0, 1.0 - float((W @ rho).min()))
    gap_ok = primal - dual <= cfg.rel_gap * primal
    status = "converged" if gap_ok else "max_iter"
    if not gap_ok:
        log.warning("modulus ascent stopped at gap %.3g", (primal - dual) / primal)
    return ModulusReport(primal, Density(rho), dual, viol, sweeps, family, lam.copy(), status)


# ---------------------------------------------------------------- connecting families

def _as_index_set(nodes, n) -> np.ndarray:
    arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise NetworkError("node index out of range")
    return arr


def _edge_weights(net: MeasureNetwork, rho):
    w = 0.5 * (rho[net.edges[:, 0]] + rho[net.edges[:, 1]]) * net.lengths
    # csgraph ignores explicit zeros, so keep every edge strictly positive
    return w + 1e-15 * net.lengths * (1.0 + float(rho.max(initial=0.0)))


def _shortest_to(net, rho, A, B):
    G = net.adjacency(_edge_weights(net, rho))
    dist, pred, _ = csgraph.dijkstra(G, directed=False, indices=A, min_only=True,
                                     return_predecessors=True)
    return dist, pred


def _trace(pred, target, in_A, in_B):
    path = [int(target)]
    v = int(target)
    while not in_A[v]:
        v = int(pred[v])
        if v < 0:
            return None
        path.append(v)
    path.reverse()
    # stop at the first node of B on the way
    for k, v in enumerate(path):
        if in_B[v]:
            return tuple(path[:k + 1])
    return tuple(path)


class _Rows:
    """Incrementally built family matrix."""

    def __init__(self, net: MeasureNetwork):
        self.net = net
        self.curves: list[DiscreteCurve] = []
        self.seen: set = set()
        self._cols: list = []
        self._vals: list = []

    def add(self, path) -> bool:
        if path in self.seen:
            return False
        c = DiscreteCurve(path)
        w = c.weights(self.net)
        self.seen.add(path)
        self.curves.append(c)
        keys = sorted(w)
        self._cols.append(np.array(keys, dtype=np.int64))
        self._vals.append(np.array([w[k] for k in keys]))
        return True

    def integral(self, path, rho) -> float:
        w = DiscreteCurve(path).weights(self.net)
        return float(sum(v * rho[k] for k, v in w.items()))

    def matrix(self) -> sparse.csr_matrix:
        n = self.net.n_nodes
        if not self.curves:
            return sparse.csr_matrix((0, n))
        lens = [len(c) for c in self._cols]
        indptr = np.concatenate([[0], np.cumsum(lens)])
        return sparse.csr_matrix((np.concatenate(self._vals), np.concatenate(self._cols), indptr),
                                 shape=(len(self.curves), n))


def solve_connecting_modulus(net: MeasureNetwork, A: Iterable[int], B: Iterable[int], q: float,
                             tol: float = 1e-6, cfg: SolverConfig | None = None) -> ModulusReport:
    """q-modulus of all network paths from A to B, by constraint generation.

    Each round adds the shortest violating A-B paths under the current
    density (edge weight = node-averaged rho times length) and resumes the
    ascent.  The primal certificate uses the shortest path over *all* A-B
    paths, so it bounds the modulus of the full connecting family.
    """
    cfg = replace(cfg or SolverConfig(), tol=tol)
    q = _check_q(q)
    n = net.n_nodes
    A = _as_index_set(A, n)
    B = _as_index_set(B, n)
    if A.size == 0 or B.size == 0:
        raise ValueError("A and B must be nonempty")
    if np.intersect1d(A, B).size:
        raise ValueError("A and B must be disjoint")
    in_A = np.zeros(n, bool)
    in_A[A] = True
    in_B = np.zeros(n, bool)
    in_B[B] = True
    mu = net.mu

    dist, _ = _shortest_to(net, np.zeros(n), A, B)
    if not np.any(np.isfinite(dist[B])):
        return ModulusReport(0.0, Density(np.zeros(n)), 0.0, 0.0, 0, [], np.zeros(0),
                             "disconnected")

    rows = _Rows(net)
    lam = np.zeros(0)
    s = np.zeros(n)
    sweeps = 0
    status = "max_iter"
    for _round in range(cfg.max_rounds):
        rho = kernels.density_from_load(s, mu, q)
        dist, pred = _shortest_to(net, rho, A, B)
        # paths into deeper B nodes are cut at their first B node anyway,
        # so only nodes entered from outside B give new candidates
        pB = pred[B]
        entry = B[(pB < 0) | ~in_B[np.maximum(pB, 0)]]
        dB = dist[entry]
        order = np.argsort(dB, kind="stable")
        best = _trace(pred, entry[order[0]], in_A, in_B)
        added = 0
        for k in order:
            if added >= cfg.batch or not dB[k] < 1.0 - tol:
                break
            path = _trace(pred, entry[k], in_A, in_B)
            if path is not None and rows.add(path):
                added += 1
        W = rows.matrix()
        if added == 0:
            m = min(rows.integral(best, rho), float((W @ rho).min()))
            _, primal, dual, viol = _certify(W, lam, s, mu, q, m)
            if viol <= tol and primal - dual <= cfg.rel_gap * primal:
                status = "converged"
                break
        if sweeps >= cfg.max_iter:
            break
        if _round == cfg.max_rounds - 1:
            status = "max_rounds"
            break
        lam = np.concatenate([lam, np.zeros(W.shape[0] - lam.size)])
        used, _ = _ascend(W, mu, q, lam, s, cfg, min(4 * cfg.check_every, cfg.max_iter - sweeps))
        sweeps += used

    W = rows.matrix()
    rho = kernels.density_from_load(s, mu, q)
    m = min(_min_path_integral(net, rho, A, B, in_A, in_B, rows), float((W @ rho).min()))
    feas, primal, dual, _ = _certify(W, lam, s, mu, q, m)
    viol = max(0.0, 1.0 - _min_path_integral(net, feas, A, B, in_A, in_B, rows))
    if status != "converged":
        log.warning("connecting modulus stopped (%s) at gap %.3g", status,
                    (primal - dual) / primal if primal > 0 else np.nan)
    return ModulusReport(primal, Density(feas), dual, viol, sweeps, rows.curves, lam.copy(),
                         status)


def _min_path_integral(net, rho, A, B, in_A, in_B, rows) -> float:
    dist, pred = _shortest_to(net, rho, A, B)
    best = _trace(pred, B[np.argmin(dist[B])], in_A, in_B)
    return rows.integral(best, rho)
