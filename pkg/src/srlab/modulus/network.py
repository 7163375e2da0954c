"""Weighted graphs, discrete curves and densities for modulus problems."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import sparse


class NetworkError(ValueError):
    pass


@dataclass(eq=False)
class MeasureNetwork:
    """Nodes with positive measure, undirected edges with positive length.

    Parameters
    ----------
    mu : (n,) array
        Node measures.
    edges : (m, 2) int array
        Endpoints of each edge, no self-loops.
    lengths : (m,) array
        Edge lengths.
    coords : (n, 3) array, optional
        Chart coordinates when the network discretises a group.
    group : optional
        Group of ``coords``.
    """

    mu: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    coords: Optional[np.ndarray] = None
    group: Optional[object] = None
    _lookup: dict = field(default=None, init=False, repr=False)
    _pattern: tuple = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float).reshape(-1)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
        n = self.mu.size
        if n == 0:
            raise NetworkError("network needs at least one node")
        if not np.all(np.isfinite(self.mu)) or np.any(self.mu <= 0):
            raise NetworkError("node measures must be positive and finite")
        if self.lengths.size != len(self.edges):
            raise NetworkError("one length per edge")
        if len(self.edges):
            if self.edges.min() < 0 or self.edges.max() >= n:
                raise NetworkError("edge endpoint out of range")
            if np.any(self.edges[:, 0] == self.edges[:, 1]):
                raise NetworkError("self-loops are not allowed")
        if not np.all(np.isfinite(self.lengths)) or np.any(self.lengths <= 0):
            raise NetworkError("edge lengths must be positive and finite")
        if self.coords is not None:
            self.coords = np.asarray(self.coords, dtype=float).reshape(n, 3)

    @property
    def n_nodes(self) -> int:
        return self.mu.size

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_index(self, i: int, j: int) -> int:
        """Index of the shortest edge joining i and j, or -1."""
        if self._lookup is None:
            lk = {}
            for k, (a, b) in enumerate(self.edges):
                key = (min(a, b), max(a, b))
                if key not in lk or self.lengths[k] < self.lengths[lk[key]]:
                    lk[key] = k
            self._lookup = lk
        return self._lookup.get((min(i, j), max(i, j)), -1)

    def adjacency(self, weights=None) -> sparse.csr_matrix:
        """Symmetric sparse matrix of edge weights (default: lengths).

        Parallel edges keep the smallest weight.  The sparsity pattern is
        computed once and reused, since solvers call this every round.
        """
        w = self.lengths if weights is None else np.asarray(weights, dtype=float)
        if not len(self.edges):
            return sparse.csr_matrix((self.n_nodes, self.n_nodes))
        if self._pattern is None:
            self._pattern = _adjacency_pattern(self)
        group, n_unique, perm, indptr, indices = self._pattern
        if n_unique == len(w):
            ww = w[group]
        else:
            ww = np.full(n_unique, np.inf)
            np.minimum.at(ww, group, w)
        data = np.concatenate([ww, ww])[perm]
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n_nodes, self.n_nodes))

    def scaled(self, c: float) -> "MeasureNetwork":
        return MeasureNetwork(self.mu * c, self.edges, self.lengths, self.coords, self.group)


def _adjacency_pattern(net: MeasureNetwork):
    """(edge -> unique pair, #pairs, data permutation, indptr, indices)."""
    key = np.sort(net.edges, axis=1)
    pairs, group = np.unique(key, axis=0, return_inverse=True)
    group = group.reshape(-1)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    perm = np.lexsort((cols, rows))
    indptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=net.n_nodes))])
    if len(pairs) == len(key):
        # unique edges: map pair order back to edge order
        inv = np.empty(len(key), dtype=np.int64)
        inv[group] = np.arange(len(key))
        group = inv
    return group, len(pairs), perm, indptr.astype(np.int64), cols[perm]


@dataclass(frozen=True)
class DiscreteCurve:
    """Node path i0, ..., im through edges of a network."""

    nodes: tuple

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(nodes) < 2:
            raise NetworkError("a discrete curve needs at least one edge")
        object.__setattr__(self, "nodes", nodes)

    def edge_ids(self, net: MeasureNetwork) -> np.ndarray:
        ids = np.array([net.edge_index(a, b) for a, b in zip(self.nodes[:-1], self.nodes[1:])])
        if np.any(ids < 0) or max(self.nodes) >= net.n_nodes or min(self.nodes) < 0:
            raise NetworkError(f"curve {self.nodes} does not follow network edges")
        return ids

    def weights(self, net: MeasureNetwork) -> dict:
        """Node -> length weight, so that the integral is sum_i w_i rho_i."""
        ids = self.edge_ids(net)
        w: dict = {}
        for (a, b), e in zip(zip(self.nodes[:-1], self.nodes[1:]), ids):
            half = 0.5 * net.lengths[e]
            w[a] = w.get(a, 0.0) + half
            w[b] = w.get(b, 0.0) + half
        return w


@dataclass(frozen=True, eq=False)
class Density:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("a density must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, n: int, value: float) -> "Density":
        return cls(np.full(n, float(value)))

    def energy(self, net: MeasureNetwork, q: float) -> float:
        return float(np.sum(net.mu * self.values ** q))


@dataclass
class ModulusReport:
    primal: float
    density: Density
    dual_bound: float
    max_violation: float
    iterations: int
    family: list = field(default_factory=list)
    multipliers: Optional[np.ndarray] = None
    status: str = "converged"

    @property
    def gap(self) -> float:
        return self.primal - self.dual_bound

    def to_dict(self) -> dict:
        return {"primal": float(self.primal), "dual_bound": float(self.dual_bound),
                "max_violation": float(self.max_violation),
                "iterations": int(self.iterations)}


def family_matrix(net: MeasureNetwork, family: Sequence[DiscreteCurve]) -> sparse.csr_matrix:
    """Rows are curves, columns nodes; entry = node length weight in the curve."""
    rows, cols, vals = [], [], []
    for r, c in enumerate(family):
        for node, w in sorted(c.weights(net).items()):
            rows.append(r)
            cols.append(node)
            vals.append(w)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(family), net.n_nodes))


# ---------------------------------------------------------------- JSON

def network_to_json(net: MeasureNetwork) -> str:
    nodes = []
    for k in range(net.n_nodes):
        item = {"id": k, "mu": float(net.mu[k])}
        if net.coords is not None:
            item["coords"] = [float(v) for v in net.coords[k]]
        nodes.append(item)
    edges = [{"i": int(a), "j": int(b), "len": float(l)}
             for (a, b), l in zip(net.edges, net.lengths)]
    return json.dumps({"nodes": nodes, "edges": edges})


def network_from_json(text) -> MeasureNetwork:
    if isinstance(text, Path):
        text = text.read_text(encoding="utf-8")
    data = json.loads(text)
    nodes = data["nodes"]
    ids = [nd["id"] for nd in nodes]
    index = {v: k for k, v in enumerate(ids)}
    if len(index) != len(ids):
        raise NetworkError("duplicate node ids")
    mu = [nd["mu"] for nd in nodes]
    coords = None
    if nodes and all("coords" in nd for nd in nodes):
        coords = [nd["coords"] for nd in nodes]
    try:
        edges = [(index[e["i"]], index[e["j"]]) for e in data["edges"]]
    except KeyError as exc:
        raise NetworkError(f"edge refers to unknown node {exc}") from None
    lengths = [e["len"] for e in data["edges"]]
    return MeasureNetwork(mu, np.array(edges, dtype=np.int64).reshape(-1, 2), lengths, coords)
