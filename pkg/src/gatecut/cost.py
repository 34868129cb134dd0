"""Cut-count and routing-overhead cost model.

``count_cuts`` sums the weights of partition-crossing edges. ``ged_cost``
estimates how hard a subcircuit graph is to embed into the hardware coupling
graph: it places subgraph nodes onto physical qubits and charges
``weight * hop_distance`` for every subgraph edge whose endpoints land
non-adjacent (distance >= 2). Adjacent pairs cost nothing, and deleting
hardware edges or qubits is free, so a subgraph that embeds exactly scores 0.
The combined objective is ``num_cuts + alpha * sum(ged per subcircuit)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .errors import EmptyCircuitError, TooManyNodesError
from .topo import HardwareTopology, InteractionGraph

# effort value requesting brute-force search over all injective placements
EXHAUSTIVE = -1

#: default number of randomized placement restarts
DEFAULT_GED_EFFORT = 16


@dataclass
class Partition:
    """Total assignment of logical qubits to subcircuit indices 0..K-1."""

    assignment: dict[int, int]

    @property
    def num_blocks(self) -> int:
        return 1 + max(self.assignment.values()) if self.assignment else 0

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for q, b in self.assignment.items():
            out[b].append(q)
        for blk in out:
            blk.sort()
        return out

    def canonical(self) -> "Partition":
        """Relabel blocks by order of first appearance over sorted qubits."""
        relabel: dict[int, int] = {}
        assignment = {}
        for q in sorted(self.assignment):
            b = self.assignment[q]
            if b not in relabel:
                relabel[b] = len(relabel)
            assignment[q] = relabel[b]
        return Partition(assignment)

    def key(self) -> tuple[int, ...]:
        return tuple(self.canonical().assignment[q] for q in sorted(self.assignment))

    def validate(self, g: InteractionGraph, max_block: int | None = None) -> None:
        if set(self.assignment) != set(g.nodes):
            raise ValueError("partition does not cover the graph's nodes")
        sizes: dict[int, int] = {}
        for q, b in self.assignment.items():
            sizes[b] = sizes.get(b, 0) + g.node_size(q)
        if sorted(sizes) != list(range(len(sizes))):
            raise ValueError("block indices must be contiguous and non-empty")
        if max_block is not None and any(s > max_block for s in sizes.values()):
            raise ValueError(f"block exceeds size bound {max_block}")


@dataclass
class CostBreakdown:
    """Eq-style objective split: cuts, per-subcircuit GED, weight, total."""

    num_cuts: int
    ged_per_subcircuit: tuple[float, ...]
    alpha: float
    total: float


def count_cuts(g: InteractionGraph, p: Partition) -> int:
    """Sum of weights of edges whose endpoints lie in different blocks."""
    a = p.assignment
    return sum(w for (u, v), w in g.weights.items() if a[u] != a[v])


def gate_density(c: Circuit) -> float:
    """Two-qubit gate density 2*M2 / (N * depth)."""
    if not c.gates:
        raise EmptyCircuitError("gate density needs a non-empty circuit")
    return 2.0 * c.two_qubit_count() / (c.num_qubits * c.depth())


def _added_edge_cost(dist_row: np.ndarray) -> np.ndarray:
    """Per-slot cost of one unit-weight edge to an already-placed neighbor."""
    return np.where(dist_row >= 2, dist_row, 0).astype(np.float64)


def _placement_cost(g: InteractionGraph, t: HardwareTopology, placement: dict[int, int]) -> float:
    total = 0.0
    for (u, v), w in g.weights.items():
        d = int(t.dist[placement[u], placement[v]])
        if d >= 2:
            total += w * d
    return float(total)


def _greedy_place(g: InteractionGraph, t: HardwareTopology, rng) -> dict[int, int]:
    """Weighted-degree-first seeding, then BFS attachment minimizing the
    incremental added-edge cost. ``rng=None`` gives the deterministic base
    pass; otherwise ties and seeds are randomized for restarts."""
    adj = g.adjacency()
    nodes = sorted(g.nodes)
    free = np.ones(t.num_physical, dtype=bool)
    placement: dict[int, int] = {}
    unplaced = set(nodes)
    phys_degree = (t.dist == 1).sum(axis=1).astype(np.float64)

    def seed_component():
        cand = sorted(unplaced, key=lambda v: (-g.degree_weight(v), v))
        node = cand[0] if rng is None else cand[int(rng.integers(0, min(3, len(cand))))]
        score = np.where(free, phys_degree, -np.inf)
        if rng is not None:
            score = score + rng.random(t.num_physical) * 0.5
        slot = int(np.argmax(score))
        placement[node] = slot
        free[slot] = False
        unplaced.discard(node)

    seed_component()
    while unplaced:
        frontier = [
            v for v in unplaced if any(u in placement for u in adj[v])
        ]
        if not frontier:
            seed_component()
            continue
        frontier.sort(key=lambda v: (-sum(w for u, w in adj[v].items() if u in placement), v))
        node = frontier[0] if rng is None else frontier[int(rng.integers(0, min(2, len(frontier))))]
        cost = np.zeros(t.num_physical, dtype=np.float64)
        for u, w in adj[node].items():
            if u in placement:
                cost += w * _added_edge_cost(t.dist[placement[u]])
        cost[~free] = np.inf
        if rng is not None:
            cost = cost + rng.random(t.num_physical) * 1e-6
        slot = int(np.argmin(cost))
        placement[node] = slot
        free[slot] = False
        unplaced.discard(node)
    return placement


def _exhaustive_place(g: InteractionGraph, t: HardwareTopology):
    nodes = sorted(g.nodes)
    if t.num_physical > 8:
        raise ValueError("exhaustive placement is limited to <= 8 physical qubits")
    perms = np.fromiter(
        (p for perm in itertools.permutations(range(t.num_physical), len(nodes)) for p in perm),
        dtype=np.int64,
    ).reshape(-1, max(1, len(nodes)))
    cost = np.zeros(len(perms))
    col = {v: i for i, v in enumerate(nodes)}
    for (u, v), w in g.weights.items():
        d = t.dist[perms[:, col[u]], perms[:, col[v]]]
        cost += w * np.where(d >= 2, d, 0)
    best = int(np.argmin(cost))
    return float(cost[best]), dict(zip(nodes, perms[best].tolist()))


def ged_cost(
    g_sub: InteractionGraph,
    t: HardwareTopology,
    effort: int = DEFAULT_GED_EFFORT,
    seed: int = 7,
) -> tuple[float, dict[int, int]]:
    """Best found added-edge cost of embedding ``g_sub`` into ``t``.

    Runs the deterministic greedy pass plus ``effort`` randomized restarts
    (best-so-far, so results are monotone in ``effort`` for a fixed seed).
    ``effort=EXHAUSTIVE`` enumerates every injective placement instead.
    Returns the cost and the witnessing placement.
    """
    if g_sub.num_nodes > t.num_physical:
        raise TooManyNodesError(
            f"{g_sub.num_nodes} nodes cannot be placed on {t.num_physical} qubits"
        )
    if g_sub.num_nodes == 0:
        return 0.0, {}
    # small devices are cheap to enumerate exactly, so effort is moot there
    if effort == EXHAUSTIVE or t.num_physical <= 8:
        cost, placement = _exhaustive_place(g_sub, t)
        return cost, placement
    if not g_sub.weights:
        placement = dict(zip(sorted(g_sub.nodes), range(t.num_physical)))
        return 0.0, placement

    best_placement = _greedy_place(g_sub, t, None)
    best_cost = _placement_cost(g_sub, t, best_placement)
    root = np.random.default_rng(seed)
    for _ in range(max(0, effort)):
        if best_cost == 0.0:
            break
        rng = np.random.default_rng(root.integers(0, 2**63))
        placement = _greedy_place(g_sub, t, rng)
        c = _placement_cost(g_sub, t, placement)
        if c < best_cost:
            best_cost, best_placement = c, placement
    return best_cost, best_placement


def total_cost(
    g: InteractionGraph,
    p: Partition,
    t: HardwareTopology,
    alpha: float,
    ged_effort: int = DEFAULT_GED_EFFORT,
    seed: int = 7,
) -> CostBreakdown:
    """Combined objective: crossing-weight cuts plus alpha-weighted GED sum."""
    p.validate(g)
    cuts = count_cuts(g, p)
    geds = []
    for block in p.blocks():
        sub = g.induced(block)
        geds.append(ged_cost(sub, t, ged_effort, seed)[0])
    return CostBreakdown(cuts, tuple(geds), alpha, cuts + alpha * sum(geds))
