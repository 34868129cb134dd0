"""Randomized recursive edge-contraction search for cutting solutions.

Each trial contracts random constraint-respecting edges (merging two nodes
only while the merged qubit group stays within the subcircuit size bound)
until the node count drops to ``ceil(sqrt(n))``, then branches into two
independent recursive continuations and keeps the cheaper one. A branch
terminates when no edge can be contracted anymore; the surviving node groups
are the subcircuits and the leaf is scored with
``num_cuts + alpha * sum(ged)``. The best leaf over ``r`` independent trials
wins, with deterministic tie-breaking (fewer subcircuits, then smallest
canonical assignment).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .cost import DEFAULT_GED_EFFORT, CostBreakdown, Partition, count_cuts, ged_cost
from .errors import InfeasibleError
from .topo import HardwareTopology, InteractionGraph

# recursion bottoms out here: both branches would immediately re-terminate,
# so small graphs are contracted to exhaustion directly
_SMALL_CUTOFF = 6

#: fixed seed for leaf GED scoring, kept independent of the trial stream so
#: recomputing a returned solution's cost reproduces it exactly
GED_SEED = 7


def auto_iterations(n_qubits: int) -> int:
    """Repetition count ceil(3 * log2(n)^2) used when iterations='auto'."""
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    return math.ceil(3.0 * math.log2(n_qubits) ** 2)


@dataclass
class CutterConfig:
    alpha: float
    max_subcircuit_qubits: int
    iterations: int | str = "auto"
    seed: int = 0
    ged_effort: int = DEFAULT_GED_EFFORT

    def resolve_iterations(self, n_qubits: int) -> int:
        if self.iterations == "auto":
            return auto_iterations(max(2, n_qubits))
        r = int(self.iterations)
        if r < 1:
            raise ValueError("iterations must be >= 1")
        return r


@dataclass
class CutSolution:
    partition: Partition
    cost: CostBreakdown
    cut_gates: list[tuple[int | None, tuple[int, int]]]
    subcircuit_graphs: list[InteractionGraph] = field(default_factory=list)


class _Contraction:
    """Mutable contraction state for one trial (adjacency + merged groups)."""

    __slots__ = ("adj", "size", "members", "pool", "max_size")

    def __init__(self, g: InteractionGraph, max_size: int):
        self.adj: dict[int, dict[int, int]] = {v: {} for v in g.nodes}
        for (u, v), w in g.weights.items():
            self.adj[u][v] = w
            self.adj[v][u] = w
        self.size = {v: g.node_size(v) for v in g.nodes}
        self.members = {v: set(g.members[v]) for v in g.nodes}
        self.pool: list[tuple[int, int]] = list(g.weights)
        self.max_size = max_size

    def clone(self) -> "_Contraction":
        other = object.__new__(_Contraction)
        other.adj = {v: dict(nb) for v, nb in self.adj.items()}
        other.size = dict(self.size)
        other.members = {v: set(m) for v, m in self.members.items()}
        other.pool = list(self.pool)
        other.max_size = self.max_size
        return other

    def num_nodes(self) -> int:
        return len(self.adj)

    def contract(self, u: int, v: int) -> None:
        """Merge node v into node u, summing parallel edge weights."""
        if len(self.adj[v]) > len(self.adj[u]):
            u, v = v, u
        nb_v = self.adj.pop(v)
        nb_u = self.adj[u]
        nb_u.pop(v, None)
        for x, w in nb_v.items():
            if x == u:
                continue
            self.adj[x].pop(v, None)
            if x in nb_u:
                nb_u[x] += w
                self.adj[x][u] += w
            else:
                nb_u[x] = w
                self.adj[x][u] = w
                self.pool.append((u, x) if u < x else (x, u))
        self.size[u] += self.size.pop(v)
        self.members[u] |= self.members.pop(v)

    def sample_contractible(self, rng) -> tuple[int, int] | None:
        """Uniform draw from the contractible edges; None when none remain."""
        pool = self.pool
        rejects = 0
        while pool:
            i = int(rng.integers(0, len(pool)))
            u, v = pool[i]
            nb = self.adj.get(u)
            if nb is None or v not in nb:
                pool[i] = pool[-1]
                pool.pop()
                continue
            if self.size[u] + self.size[v] <= self.max_size:
                return (u, v)
            rejects += 1
            if rejects > 2 * len(pool) + 16:
                cst = [
                    (u2, v2)
                    for u2, nb2 in self.adj.items()
                    for v2 in nb2
                    if u2 < v2 and self.size[u2] + self.size[v2] <= self.max_size
                ]
                if not cst:
                    return None
                return cst[int(rng.integers(0, len(cst)))]
        return None


class _Scorer:
    """Leaf scoring with a per-search GED cache keyed by qubit group."""

    def __init__(self, g0: InteractionGraph, t: HardwareTopology, cfg: CutterConfig):
        self.g0 = g0
        self.t = t
        self.cfg = cfg
        self.cache: dict[frozenset[int], float] = {}

    def ged(self, group: frozenset[int]) -> float:
        val = self.cache.get(group)
        if val is None:
            sub = self.g0.induced(group)
            val = ged_cost(sub, self.t, self.cfg.ged_effort, GED_SEED)[0]
            self.cache[group] = val
        return val

    def score(self, state: _Contraction) -> tuple[float, int, list[frozenset[int]]]:
        cuts = sum(sum(nb.values()) for nb in state.adj.values()) // 2
        groups = [frozenset(m) for m in state.members.values()]
        ged_sum = sum(self.ged(grp) for grp in groups)
        return cuts + self.cfg.alpha * ged_sum, cuts, groups


def _merge_nodes(state: _Contraction, rng, scorer: _Scorer):
    """One Karger-Stein style descent; returns (total, cuts, groups)."""
    n = state.num_nodes()
    if n <= _SMALL_CUTOFF:
        while True:
            e = state.sample_contractible(rng)
            if e is None:
                return scorer.score(state)
            state.contract(*e)
    threshold = math.ceil(math.sqrt(n))
    while state.num_nodes() > threshold:
        e = state.sample_contractible(rng)
        if e is None:
            return scorer.score(state)
        state.contract(*e)
    rng_a, rng_b = rng.spawn(2)
    branch = state.clone()
    sol_a = _merge_nodes(branch, rng_a, scorer)
    sol_b = _merge_nodes(state, rng_b, scorer)
    return min(sol_a, sol_b, key=lambda s: (s[0], len(s[2]), _groups_key(s[2])))


def _groups_key(groups) -> tuple[int, ...]:
    label = {}
    for grp in sorted(groups, key=min):
        label[min(grp)] = len(label)
    assignment = {}
    for grp in groups:
        for q in grp:
            assignment[q] = label[min(grp)]
    return tuple(assignment[q] for q in sorted(assignment))


def cut_circuit(
    g0: InteractionGraph,
    t: HardwareTopology,
    cfg: CutterConfig,
    circuit: Circuit | None = None,
) -> CutSolution:
    """Search for a minimum-cost cutting solution of the interaction graph.

    Disconnected graphs are solved per connected component and the block
    sets unioned. When the source circuit is supplied, ``cut_gates`` lists
    the crossing gates by index; otherwise entries carry ``None`` indices
    (one entry per unit of crossing weight either way).
    """
    if cfg.max_subcircuit_qubits < 1:
        raise InfeasibleError("subcircuit size bound must be >= 1")
    if cfg.max_subcircuit_qubits > t.num_physical:
        raise InfeasibleError(
            f"size bound {cfg.max_subcircuit_qubits} exceeds the "
            f"{t.num_physical}-qubit topology"
        )
    if any(g0.node_size(v) > cfg.max_subcircuit_qubits for v in g0.nodes):
        raise InfeasibleError("a node group already exceeds the size bound")

    r = cfg.resolve_iterations(g0.num_nodes)
    scorer = _Scorer(g0, t, cfg)
    root_ss = np.random.SeedSequence(cfg.seed)
    comp_streams = root_ss.spawn(len(g0.connected_components()))

    all_groups: list[frozenset[int]] = []
    for comp, comp_ss in zip(g0.connected_components(), comp_streams):
        sub = g0.induced(comp)
        best = None
        for trial_ss in comp_ss.spawn(r):
            rng = np.random.default_rng(trial_ss)
            state = _Contraction(sub, cfg.max_subcircuit_qubits)
            sol = _merge_nodes(state, rng, scorer)
            key = (sol[0], len(sol[2]), _groups_key(sol[2]))
            if best is None or key < best[0]:
                best = (key, sol)
        all_groups.extend(best[1][2])

    assignment: dict[int, int] = {}
    ordered = sorted(all_groups, key=min)
    for b, grp in enumerate(ordered):
        for q in grp:
            assignment[q] = b
    partition = Partition(assignment).canonical()

    cuts = count_cuts(g0, partition)
    geds = tuple(scorer.ged(frozenset(block)) for block in partition.blocks())
    cost = CostBreakdown(cuts, geds, cfg.alpha, cuts + cfg.alpha * sum(geds))

    cut_gates: list[tuple[int | None, tuple[int, int]]] = []
    if circuit is not None:
        for i, gt in enumerate(circuit.gates):
            if gt.is_two_qubit:
                a, b = gt.qubits
                if partition.assignment[a] != partition.assignment[b]:
                    cut_gates.append((i, (a, b)))
    else:
        for (u, v), w in sorted(g0.weights.items()):
            if partition.assignment[u] != partition.assignment[v]:
                cut_gates.extend([(None, (u, v))] * w)

    graphs = [g0.induced(block) for block in partition.blocks()]
    return CutSolution(partition, cost, cut_gates, graphs)
