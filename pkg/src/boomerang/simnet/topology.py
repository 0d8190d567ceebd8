"""Channel network state: small-world generation, balances, disjoint paths.

Funds are held as integer micro-units (6 decimal digits) so that every lock,
release, and transfer conserves the network total exactly.  Each undirected
channel carries two directed balances; locked liquidity is tracked per
direction and flows back on rollback or across on execute.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ..errors import UsageError
from .config import SimConfig

UNIT = 10**6


def to_units(amount: float) -> int:
    return round(amount * UNIT)


def from_units(units: int) -> float:
    return units / UNIT


@dataclass
class Topology:
    num_nodes: int
    adjacency: dict = field(default_factory=dict)   # node -> sorted list of neighbors
    balance: dict = field(default_factory=dict)     # (u, v) -> available micro-units
    locked: dict = field(default_factory=dict)      # (u, v) -> locked micro-units

    def add_edge(self, u: int, v: int, balance_uv: int = 0, balance_vu: int = 0):
        if u == v:
            raise UsageError("self loops are not allowed")
        if (u, v) in self.balance:
            raise UsageError(f"duplicate edge {(u, v)}")
        self.adjacency.setdefault(u, []).append(v)
        self.adjacency.setdefault(v, []).append(u)
        self.balance[(u, v)] = balance_uv
        self.balance[(v, u)] = balance_vu
        self.locked[(u, v)] = 0
        self.locked[(v, u)] = 0

    def finish(self):
        """Sort adjacency lists; call once after all edges are added."""
        for node in range(self.num_nodes):
            self.adjacency.setdefault(node, []).sort()
        return self

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.balance

    def edges(self):
        for (u, v) in self.balance:
            if u < v:
                yield (u, v)

    def num_edges(self) -> int:
        return len(self.balance) // 2

    # Liquidity operations used by the engine; callers check availability.

    def lock(self, u: int, v: int, units: int):
        key = (u, v)
        if self.balance[key] < units:
            raise UsageError(f"insufficient balance on {key}")
        self.balance[key] -= units
        self.locked[key] += units

    def unlock(self, u: int, v: int, units: int):
        key = (u, v)
        if self.locked[key] < units:
            raise UsageError(f"lock underflow on {key}")
        self.locked[key] -= units
        self.balance[key] += units

    def transfer_locked(self, u: int, v: int, units: int):
        key = (u, v)
        if self.locked[key] < units:
            raise UsageError(f"lock underflow on {key}")
        self.locked[key] -= units
        self.balance[(v, u)] += units

    def total_funds(self) -> int:
        return sum(self.balance.values()) + sum(self.locked.values())

    def total_locked(self) -> int:
        return sum(self.locked.values())

    def to_json(self) -> str:
        edges = []
        for (u, v) in sorted(self.edges()):
            edges.append(
                {
                    "a": u,
                    "b": v,
                    "balance_ab": from_units(self.balance[(u, v)] + self.locked[(u, v)]),
                    "balance_ba": from_units(self.balance[(v, u)] + self.locked[(v, u)]),
                }
            )
        return json.dumps({"num_nodes": self.num_nodes, "edges": edges}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        data = json.loads(text)
        topo = cls(num_nodes=int(data["num_nodes"]))
        for edge in data["edges"]:
            topo.add_edge(
                int(edge["a"]),
                int(edge["b"]),
                to_units(float(edge["balance_ab"])),
                to_units(float(edge["balance_ba"])),
            )
        return topo.finish()


def gen_topology(cfg: SimConfig, rng) -> Topology:
    """Small-world channel graph: ring lattice plus random rewiring.

    Every lattice edge is rewired with probability ``rewire_prob`` to a
    uniformly chosen new endpoint, skipping self loops and duplicates, so
    the edge count stays num_nodes * ring_neighbors / 2.  Each direction of
    each channel gets an independent log-uniform balance.
    """
    cfg.validate()
    n, k = cfg.num_nodes, cfg.ring_neighbors
    edges = set()
    for j in range(1, k // 2 + 1):
        for i in range(n):
            a, b = i, (i + j) % n
            edges.add((min(a, b), max(a, b)))

    def has(a, b):
        return (min(a, b), max(a, b)) in edges

    for j in range(1, k // 2 + 1):
        for i in range(n):
            a, b = i, (i + j) % n
            if not has(a, b):
                continue  # already rewired away by an earlier pass
            if rng.random() >= cfg.rewire_prob:
                continue
            neighbors = {w for e in edges if i in e for w in e} - {i}
            if len(neighbors) >= n - 1:
                continue  # node already connected to everyone else
            w = rng.randrange(n)
            while w == i or has(i, w):
                w = rng.randrange(n)
            edges.discard((min(a, b), max(a, b)))
            edges.add((min(i, w), max(i, w)))

    topo = Topology(num_nodes=n)
    lo, hi = math.log(cfg.balance_range[0]), math.log(cfg.balance_range[1])
    for (u, v) in sorted(edges):
        balance_uv = to_units(math.exp(rng.uniform(lo, hi)))
        balance_vu = to_units(math.exp(rng.uniform(lo, hi)))
        topo.add_edge(u, v, balance_uv, balance_vu)
    return topo.finish()


def _bfs_shortest(adj: dict, source: int, dest: int):
    """Deterministic BFS shortest path; neighbors visited in sorted order."""
    if source == dest:
        return None
    parent = {source: source}
    frontier = [source]
    while frontier:
        nxt = []
        for node in frontier:
            for nb in adj.get(node, ()):
                if nb in parent:
                    continue
                parent[nb] = node
                if nb == dest:
                    path = [dest]
                    while path[-1] != source:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return tuple(path)
                nxt.append(nb)
        frontier = nxt
    return None


def precompute_paths(topo: Topology, source: int, dest: int, max_paths: int):
    """Up to ``max_paths`` edge-disjoint shortest paths, greedily peeled.

    Each round finds a shortest path by hop count, records it, and removes
    its edges before the next round, so returned paths share no edge.
    """
    if source == dest:
        raise UsageError("source and destination must differ")
    adj = {node: sorted(nbs) for node, nbs in topo.adjacency.items()}
    paths = []
    while len(paths) < max_paths:
        path = _bfs_shortest(adj, source, dest)
        if path is None:
            break
        paths.append(path)
        for a, b in zip(path, path[1:]):
            adj[a].remove(b)
            adj[b].remove(a)
    return paths
