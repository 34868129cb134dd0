"""Qubit interaction graphs and hardware coupling maps.

The interaction graph has one node per logical qubit and one weighted edge
per interacting pair (weight = number of 2-qubit gates between them).
Hardware topologies are undirected coupling graphs with an all-pairs
hop-distance matrix; the built-in IBM-style maps are versioned JSON fixtures
under ``gatecut/data`` and never fetched from a service.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .circuit import Circuit
from .errors import UnknownTopologyError


@dataclass
class InteractionGraph:
    """Weighted logical-qubit graph; nodes may represent merged qubit groups.

    ``weights`` maps a canonical ``(u, v)`` pair (``u < v``) to the summed
    2-qubit gate count; ``members`` maps each node to the set of original
    qubits merged into it (singletons for an unmerged graph). Treat instances
    as immutable: updates (``contract``) return new graphs.
    """

    weights: dict[tuple[int, int], int] = field(default_factory=dict)
    members: dict[int, frozenset[int]] = field(default_factory=dict)

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_edges(cls, num_nodes: int, edges) -> "InteractionGraph":
        g = cls(members={v: frozenset([v]) for v in range(num_nodes)})
        for item in edges:
            u, v = item[0], item[1]
            w = item[2] if len(item) > 2 else 1
            g._add_weight(u, v, w)
        return g

    def _add_weight(self, u: int, v: int, w: int) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        key = (u, v) if u < v else (v, u)
        self.weights[key] = self.weights.get(key, 0) + w

    # -- queries ------------------------------------------------------------
    @property
    def nodes(self):
        return self.members.keys()

    @property
    def num_nodes(self) -> int:
        return len(self.members)

    def node_size(self, v: int) -> int:
        return len(self.members[v])

    def total_weight(self) -> int:
        return sum(self.weights.values())

    def adjacency(self) -> dict[int, dict[int, int]]:
        adj: dict[int, dict[int, int]] = {v: {} for v in self.members}
        for (u, v), w in self.weights.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def degree_weight(self, v: int) -> int:
        total = 0
        for (a, b), w in self.weights.items():
            if a == v or b == v:
                total += w
        return total

    def connected_components(self) -> list[set[int]]:
        adj = self.adjacency()
        seen: set[int] = set()
        comps = []
        for start in self.members:
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            seen.add(start)
            while queue:
                u = queue.popleft()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        comp.add(v)
                        queue.append(v)
            comps.append(comp)
        return comps

    def induced(self, nodes) -> "InteractionGraph":
        """Subgraph on a node subset, keeping weights and member sets."""
        keep = set(nodes)
        sub = InteractionGraph(members={v: self.members[v] for v in keep})
        for (u, v), w in self.weights.items():
            if u in keep and v in keep:
                sub.weights[(u, v)] = w
        return sub


def build_interaction_graph(c: Circuit) -> InteractionGraph:
    """Count 2-qubit gates per qubit pair; 1-qubit gates contribute nothing."""
    g = InteractionGraph(members={v: frozenset([v]) for v in range(c.num_qubits)})
    for gt in c.gates:
        if gt.is_two_qubit:
            g._add_weight(gt.qubits[0], gt.qubits[1], 1)
    return g


def contract_edge(g: InteractionGraph, e: tuple[int, int]) -> InteractionGraph:
    """Merge the endpoints of ``e`` into one node (value semantics).

    Parallel edges sum their weights, the contracted edge's weight vanishes
    as a dropped self-loop, and member sets are unioned.
    """
    u, v = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
    if (u, v) not in g.weights:
        raise ValueError(f"edge {e} not in graph")
    out = InteractionGraph(members={k: m for k, m in g.members.items() if k != v})
    out.members[u] = g.members[u] | g.members[v]
    for (a, b), w in g.weights.items():
        if (a, b) == (u, v):
            continue
        a2 = u if a == v else a
        b2 = u if b == v else b
        if a2 == b2:
            continue
        out._add_weight(a2, b2, w)
    return out


@dataclass
class HardwareTopology:
    """Physical coupling graph with all-pairs hop distances."""

    name: str
    num_physical: int
    couplings: frozenset[tuple[int, int]]
    dist: np.ndarray

    @classmethod
    def from_edges(cls, name: str, num_physical: int, edges) -> "HardwareTopology":
        canon = frozenset((min(a, b), max(a, b)) for a, b in edges)
        for a, b in canon:
            if not (0 <= a < num_physical and 0 <= b < num_physical) or a == b:
                raise ValueError(f"bad coupling ({a},{b}) for {num_physical} qubits")
        dist = _bfs_all_pairs(num_physical, canon)
        if np.any(dist < 0):
            raise ValueError(f"coupling graph of {name!r} is not connected")
        return cls(name, num_physical, canon, dist)

    def neighbors(self, p: int) -> list[int]:
        out = []
        for a, b in self.couplings:
            if a == p:
                out.append(b)
            elif b == p:
                out.append(a)
        return sorted(out)

    def degree(self, p: int) -> int:
        return int(np.count_nonzero(self.dist[p] == 1))

    def has_edge(self, a: int, b: int) -> bool:
        return self.dist[a, b] == 1


def _bfs_all_pairs(n: int, edges) -> np.ndarray:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[src, v] < 0:
                    dist[src, v] = dist[src, u] + 1
                    queue.append(v)
    return dist


# ------------------------------------------------------------------ builders

_FIXTURE_NAMES = ("lagos", "guadalupe", "tokyo", "mumbai", "brisbane")

# bridge ports used when chaining chips into a virtual multi-chip device:
# qubit 6 of one chip connects to qubit 0 of the next (arbitrary but fixed
# boundary choice, recorded here for reproducibility)
MULTI_CHIP_PORT_OUT = 6
MULTI_CHIP_PORT_IN = 0


def _load_fixture(name: str) -> HardwareTopology:
    path = resources.files("gatecut").joinpath(f"data/{name}.json")
    spec = json.loads(path.read_text())
    return HardwareTopology.from_edges(spec["name"], spec["num_qubits"], spec["edges"])


def line_topology(n: int) -> HardwareTopology:
    return HardwareTopology.from_edges(f"line({n})", n, [(i, i + 1) for i in range(n - 1)])


def grid_topology(m: int, n: int) -> HardwareTopology:
    edges = []
    for r in range(m):
        for c in range(n):
            p = r * n + c
            if c + 1 < n:
                edges.append((p, p + 1))
            if r + 1 < m:
                edges.append((p, p + n))
    return HardwareTopology.from_edges(f"grid({m},{n})", m * n, edges)


def multi_chip_topology(k: int, ring: bool = False) -> HardwareTopology:
    """k lagos blocks chained by single bridge edges (optionally closed)."""
    base = _load_fixture("lagos")
    nb = base.num_physical
    edges = []
    for chip in range(k):
        off = chip * nb
        edges.extend((a + off, b + off) for a, b in base.couplings)
    for chip in range(k - 1):
        edges.append((chip * nb + MULTI_CHIP_PORT_OUT, (chip + 1) * nb + MULTI_CHIP_PORT_IN))
    if ring and k > 2:
        edges.append(((k - 1) * nb + MULTI_CHIP_PORT_OUT, MULTI_CHIP_PORT_IN))
    label = f"multi_chip({k},ring)" if ring else f"multi_chip({k})"
    return HardwareTopology.from_edges(label, k * nb, edges)


def topology(name_or_spec) -> HardwareTopology:
    """Resolve a built-in name, a parametric form, or an explicit spec dict.

    Accepted names: the fixture chips (lagos, guadalupe, tokyo, mumbai,
    brisbane) and the parametric families ``line(n)``, ``grid(m,n)``,
    ``multi_chip(k)``. A dict spec needs ``name``, ``num_qubits``, ``edges``.
    """
    if isinstance(name_or_spec, HardwareTopology):
        return name_or_spec
    if isinstance(name_or_spec, dict):
        spec = name_or_spec
        try:
            return HardwareTopology.from_edges(spec["name"], spec["num_qubits"], spec["edges"])
        except (KeyError, ValueError) as exc:
            raise UnknownTopologyError(f"bad topology spec: {exc}") from exc
    name = str(name_or_spec).strip().lower()
    if name in _FIXTURE_NAMES:
        return _load_fixture(name)
    m = re.fullmatch(r"line\((\d+)\)", name)
    if m:
        return line_topology(int(m.group(1)))
    m = re.fullmatch(r"grid\((\d+),(\d+)\)", name)
    if m:
        return grid_topology(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"multi_chip\((\d+)\)", name)
    if m:
        return multi_chip_topology(int(m.group(1)))
    raise UnknownTopologyError(f"unknown topology {name_or_spec!r}")
