"""Benchmark circuit generators, planted-optimum instances and experiment
drivers (GED/SWAP correlation, alpha sweep, scaling run).

The four circuit families follow the usual structural patterns (phase-ladder
transform, gridded random circuit, ring-entangled ansatz, nearest-neighbour
Ising steps) in CZ form so every 2-qubit gate is cuttable. Generators are
seed-deterministic; planted instances additionally ship their known optimal
partition and zero-SWAP layouts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .cost import Partition, count_cuts, gate_density, ged_cost
from .cutter import CutSolution, CutterConfig, cut_circuit
from .errors import GatecutError
from .qpd import lower_to_cz, split_circuit
from .router import instantiate_slots, route
from .topo import (
    HardwareTopology,
    InteractionGraph,
    build_interaction_graph,
    multi_chip_topology,
    topology,
)

HALF_PI = math.pi / 2


# ------------------------------------------------------------- generators

def gen_aqft(n: int, degree: int) -> Circuit:
    """Phase-ladder circuit: qubit i interacts with each of its next
    ``degree`` neighbours through one CZ, emitted as packed parallel layers
    (one Hadamard column, then disjoint CZ matchings per neighbour distance,
    then one phase column). The layer packing keeps the gate density honest
    for the density-scaled trade-off weight."""
    if n < 2 or degree < 1:
        raise GatecutError("need n >= 2 and degree >= 1")
    c = Circuit(n)
    for q in range(n):
        c.add("h", q)
    for k in range(1, degree + 1):
        for offset in range(2):
            for i in range(n - k):
                if (i // k) % 2 == offset:
                    c.add("cz", i, i + k)
    for q in range(n):
        c.add("rz", q, params=(math.pi / 2 ** (1 + q % degree),))
    return c


def gen_supremacy(m: int, k: int, depth: int, seed: int = 0) -> Circuit:
    """Grid-patterned random circuit: random 1q layer + cycling CZ pattern."""
    if m < 1 or k < 1 or m * k < 2 or depth < 1:
        raise GatecutError("need an m x k grid with >= 2 qubits and depth >= 1")
    rng = np.random.default_rng(seed)
    n = m * k
    c = Circuit(n)
    for q in range(n):
        c.add("h", q)
    patterns = []
    for parity in (0, 1):
        patterns.append([(r * k + col, r * k + col + 1)
                         for r in range(m) for col in range(parity, k - 1, 2)])
        patterns.append([(r * k + col, (r + 1) * k + col)
                         for r in range(parity, m - 1, 2) for col in range(k)])
    patterns = [p for p in patterns if p]
    for layer in range(depth):
        for q in range(n):
            kind = ("t", "rx", "ry")[int(rng.integers(0, 3))]
            if kind == "t":
                c.add("t", q)
            else:
                c.add(kind, q, params=(float(rng.uniform(0, math.pi)),))
        for a, b in patterns[layer % len(patterns)]:
            c.add("cz", a, b)
    return c


def gen_qaoa(n: int, layers: int, seed: int = 0) -> Circuit:
    """Ring-entangled hardware-efficient ansatz: rz / CZ ring / rx layers."""
    if n < 2 or layers < 1:
        raise GatecutError("need n >= 2 and layers >= 1")
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for q in range(n):
        c.add("h", q)
    ring = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
    for _ in range(layers):
        gamma = float(rng.uniform(0, math.pi))
        beta = float(rng.uniform(0, math.pi))
        for q in range(n):
            c.add("rz", q, params=(gamma,))
        for a, b in ring:
            c.add("cz", a, b)
        for q in range(n):
            c.add("rx", q, params=(beta,))
    return c


def gen_ising(n: int, steps: int, seed: int = 0) -> Circuit:
    """Nearest-neighbour Ising steps in CZ form plus transverse rx layers."""
    if n < 2 or steps < 1:
        raise GatecutError("need n >= 2 and steps >= 1")
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for q in range(n):
        c.add("h", q)
    for _ in range(steps):
        for i in range(n - 1):
            c.add("rz", i, params=(HALF_PI,))
            c.add("rz", i + 1, params=(HALF_PI,))
            c.add("cz", i, i + 1)
        theta = float(rng.uniform(0.2, 1.2))
        for q in range(n):
            c.add("rx", q, params=(theta,))
    return c


def gen_ghz(n: int) -> Circuit:
    c = Circuit(n)
    c.add("h", 0)
    for i in range(n - 1):
        c.add("cx", i, i + 1)
    return c


FAMILIES = ("aqft", "supremacy", "qaoa", "ising")


def benchmark_circuit(family: str, n: int, seed: int = 0) -> Circuit:
    """Standard instance of one family at a given qubit count."""
    if family == "aqft":
        return gen_aqft(n, max(1, n // 2))
    if family == "supremacy":
        rows = int(math.sqrt(n))
        while n % rows:
            rows -= 1
        return gen_supremacy(rows, n // rows, 8, seed)
    if family == "qaoa":
        return gen_qaoa(n, 2, seed)
    if family == "ising":
        return gen_ising(n, 2, seed)
    raise GatecutError(f"unknown benchmark family {family!r}")


# ------------------------------------------------------ planted instances

#: chip size of the lagos building block
_CHIP = 7

#: lagos coupling edges, duplicated per chip when building virtual devices
_CHIP_EDGES = ((0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6))


@dataclass
class PlantedInstance:
    """Benchmark circuit with a known-optimal cut and zero-SWAP layout."""

    circuit: Circuit
    optimal_partition: Partition
    optimal_cuts: int
    optimal_layout: list[dict[int, int]]  # per block: local qubit -> chip qubit
    topology: HardwareTopology


def gen_planted(k_chips: int, depth: int = 8, seed: int = 0) -> PlantedInstance:
    """QUEKO-style instance over chained lagos chips.

    ``k_chips`` selects the virtual device variant: 1 = two chips with one
    bridge (1 planted cut), 2 = three chips in a line (2 cuts), 3 = three
    chips in a ring with gates on two of the three bridges (2 cuts). Gates
    are laid only on intra-chip coupling edges (every edge covered at least
    twice) plus exactly the planted bridge gates, with layer timing
    randomized per seed.
    """
    if k_chips not in (1, 2, 3):
        raise GatecutError("k_chips must be 1, 2 or 3")
    chips = 2 if k_chips == 1 else 3
    ring = k_chips == 3
    device = multi_chip_topology(chips, ring=ring)
    n = chips * _CHIP
    bridges = [(c * _CHIP + 6, (c + 1) * _CHIP) for c in range(chips - 1)]
    planted_bridges = bridges  # ring variant leaves its closing bridge unused

    rng = np.random.default_rng(seed)
    intra = [(c * _CHIP + a, c * _CHIP + b) for c in range(chips) for a, b in _CHIP_EDGES]

    layers: list[list[tuple[int, int]]] = []
    uses = {e: 0 for e in intra}
    for _ in range(depth):
        order = list(intra)
        rng.shuffle(order)
        busy: set[int] = set()
        layer = []
        for a, b in order:
            if a in busy or b in busy or rng.random() < 0.4:
                continue
            layer.append((a, b))
            busy.update((a, b))
            uses[(a, b)] += 1
        layers.append(layer)
    # coverage pass: every intra-chip edge must appear at least twice
    pending = [e for e, cnt in uses.items() for _ in range(max(0, 2 - cnt))]
    while pending:
        busy = set()
        layer = []
        rest = []
        for a, b in pending:
            if a in busy or b in busy:
                rest.append((a, b))
                continue
            layer.append((a, b))
            busy.update((a, b))
        layers.append(layer)
        pending = rest

    c = Circuit(n)
    for q in range(n):
        c.add("h", q)
    bridge_layer = {b: int(rng.integers(0, len(layers))) for b in planted_bridges}
    for li, layer in enumerate(layers):
        for a, b in layer:
            c.add("cz", a, b)
        for (a, b), at in bridge_layer.items():
            if at == li:
                c.add("cz", a, b)
        for q in range(n):
            if rng.random() < 0.25:
                c.add("rz", q, params=(float(rng.uniform(0, math.pi)),))

    assignment = {q: q // _CHIP for q in range(n)}
    partition = Partition(assignment)
    layouts = [{i: i for i in range(_CHIP)} for _ in range(chips)]
    return PlantedInstance(c, partition, len(planted_bridges), layouts, device)


# ------------------------------------------------------------ experiments

def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.std() == 0 or ys.std() == 0:
        return 0.0
    return float(np.corrcoef(xs, ys)[0, 1])


def extract_subcircuit(c: Circuit, qubits) -> Circuit:
    """Gates of ``c`` acting entirely inside the qubit subset, compacted."""
    qubits = sorted(qubits)
    local = {q: i for i, q in enumerate(qubits)}
    keep = set(qubits)
    sub = Circuit(len(qubits))
    for g in c.gates:
        if all(q in keep for q in g.qubits):
            sub.gates.append(g.remap(local))
    return sub


def run_correlation(
    n_samples: int,
    seed: int = 0,
    circuit: Circuit | None = None,
    topo_name: str = "lagos",
    ged_effort: int = 16,
    sizes=(4, 5, 6, 7),
):
    """Sample induced subcircuits, score GED and routed SWAPs, report r."""
    if n_samples < 30:
        raise GatecutError("need at least 30 samples")
    c = circuit if circuit is not None else gen_aqft(16, 8)
    t = topology(topo_name)
    g = build_interaction_graph(c)
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < n_samples:
        size = int(rng.choice(sizes))
        subset = sorted(rng.choice(c.num_qubits, size=size, replace=False).tolist())
        sub_graph = g.induced(subset)
        if not sub_graph.weights:
            continue
        ged = ged_cost(sub_graph, t, ged_effort, 7)[0]
        sub_circuit = extract_subcircuit(c, subset)
        routed = route(sub_circuit, t, seed=int(rng.integers(0, 2**31)), mode="sabre_layout")
        rows.append({"size": size, "ged": ged, "swaps": routed.swap_count})
    r = pearson([row["ged"] for row in rows], [row["swaps"] for row in rows])
    return rows, r


def resolve_alpha(alpha_spec, c: Circuit) -> float:
    """``auto0.2`` / ``auto0.5`` use the 2q gate density; floats pass through."""
    if isinstance(alpha_spec, str):
        if alpha_spec.startswith("auto"):
            return float(alpha_spec[4:]) * gate_density(c)
        return float(alpha_spec)
    return float(alpha_spec)


def routed_subcircuit_depths(c: Circuit, sol: CutSolution, t: HardwareTopology, seed: int):
    """Route every subcircuit (slots filled for depth accounting)."""
    lowered = lower_to_cz(c, [i for i, _ in sol.cut_gates])
    progs, _ = split_circuit(lowered, sol.partition)
    routed = []
    base_depth = 0
    for prog in progs:
        inst = instantiate_slots(prog)
        base_depth += inst.depth()
        routed.append(route(inst, t, seed=seed, mode="sabre_layout"))
    return routed, base_depth


def _sweep_cell(cell):
    """One (alpha, seed) sweep cell; top-level so --jobs can fork it."""
    family, n_qubits, topo_name, spec, seed, max_q, ged_effort = cell
    t = topology(topo_name)
    c = benchmark_circuit(family, n_qubits)
    alpha = resolve_alpha(spec, c)
    g = build_interaction_graph(c)
    cfg = CutterConfig(alpha, max_q, "auto", seed, ged_effort)
    sol = cut_circuit(g, t, cfg, circuit=c)
    routed, base = routed_subcircuit_depths(c, sol, t, seed)
    return {
        "family": family,
        "qubits": n_qubits,
        "topology": t.name,
        "alpha_spec": str(spec),
        "alpha": alpha,
        "seed": seed,
        "num_cuts": sol.cost.num_cuts,
        "num_subcircuits": sol.partition.num_blocks,
        "sum_depth": sum(rc.depth for rc in routed),
        "sum_depth_unrouted": base,
        "swaps": sum(rc.swap_count for rc in routed),
        "sampling_overhead": 9.0**sol.cost.num_cuts,
    }


def _pmap(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def run_alpha_sweep(
    family: str,
    n_qubits: int,
    topo_name: str = "lagos",
    alpha_specs=("0", "auto0.2", "auto0.5"),
    seeds=range(20),
    max_subcircuit_qubits: int | None = None,
    ged_effort: int = 16,
    jobs: int = 1,
):
    """Cut/route each (alpha, seed) cell; returns per-cell rows + medians."""
    t = topology(topo_name)
    max_q = max_subcircuit_qubits or t.num_physical
    cells = [
        (family, n_qubits, topo_name, str(spec), int(seed), max_q, ged_effort)
        for spec in alpha_specs
        for seed in seeds
    ]
    rows = _pmap(_sweep_cell, cells, jobs)
    medians = []
    for spec in alpha_specs:
        cell = [r for r in rows if r["alpha_spec"] == str(spec)]
        medians.append(
            {
                "alpha_spec": str(spec),
                "median_num_cuts": float(np.median([r["num_cuts"] for r in cell])),
                "median_sum_depth": float(np.median([r["sum_depth"] for r in cell])),
                "median_swaps": float(np.median([r["swaps"] for r in cell])),
            }
        )
    return rows, medians


def _queko_cell(cell):
    k, seed, ged_effort = cell
    lagos = topology("lagos")
    inst = gen_planted(k, seed=seed)
    alpha = 0.2 * gate_density(inst.circuit)
    g = build_interaction_graph(inst.circuit)
    cfg = CutterConfig(alpha, _CHIP, "auto", seed, ged_effort)
    sol = cut_circuit(g, lagos, cfg, circuit=inst.circuit)
    # added depth of the planted solution routed under its own layout
    crossing = [
        i
        for i, gt in enumerate(inst.circuit.gates)
        if gt.is_two_qubit
        and inst.optimal_partition.assignment[gt.qubits[0]]
        != inst.optimal_partition.assignment[gt.qubits[1]]
    ]
    lowered = lower_to_cz(inst.circuit, crossing)
    progs, _ = split_circuit(lowered, inst.optimal_partition)
    base = 0
    routed_depth = 0
    swaps = 0
    for prog in progs:
        inst_c = instantiate_slots(prog)
        base += inst_c.depth()
        rc = route(inst_c, lagos, seed=seed, mode="fixed_identity")
        routed_depth += rc.depth
        swaps += rc.swap_count
    return {
        "instance": k,
        "seed": seed,
        "planted_cuts": inst.optimal_cuts,
        "found_cuts": sol.cost.num_cuts,
        "planted_layout_swaps": swaps,
        "added_depth_pct": 100.0 * (routed_depth - base) / base if base else 0.0,
    }


def run_queko(chips=(1, 2, 3), seeds=range(20), ged_effort: int = 16, jobs: int = 1):
    """Planted-optimum study: found vs planted cuts and added depth."""
    cells = [(int(k), int(seed), ged_effort) for k in chips for seed in seeds]
    return _pmap(_queko_cell, cells, jobs)


def run_scale(
    n_qubits: int = 1000,
    family: str = "ising",
    topo_name: str = "brisbane",
    seed: int = 0,
    alpha_spec="auto0.2",
    ged_effort: int = 8,
):
    """Cut-only feasibility run on a large circuit; reports wall time."""
    t = topology(topo_name)
    c = benchmark_circuit(family, n_qubits)
    alpha = resolve_alpha(alpha_spec, c)
    g = build_interaction_graph(c)
    cfg = CutterConfig(alpha, t.num_physical, "auto", seed, ged_effort)
    start = time.perf_counter()
    sol = cut_circuit(g, t, cfg, circuit=c)
    elapsed = time.perf_counter() - start
    return {
        "qubits": n_qubits,
        "family": family,
        "topology": t.name,
        "alpha": alpha,
        "iterations": cfg.resolve_iterations(n_qubits),
        "num_cuts": sol.cost.num_cuts,
        "num_subcircuits": sol.partition.num_blocks,
        "total_cost": sol.cost.total,
        "wall_time_s": elapsed,
    }
