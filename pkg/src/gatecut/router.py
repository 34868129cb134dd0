"""Qubit mapping and SWAP-insertion routing.

A dependency-free stand-in for the SABRE heuristic: route gates from the
front layer whenever their endpoints are adjacent on the device, otherwise
score candidate swaps by the summed hop distance of the front layer plus a
weighted lookahead window, with a decay penalty on recently swapped qubits.
``sabre_layout`` mode refines the initial placement with forward/backward
routing passes before the real run. Absolute swap counts differ from any
particular transpiler; callers should rely on trends and correlations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .errors import TooManyQubitsError
from .topo import HardwareTopology

EXTENDED_SET_SIZE = 20
EXTENDED_SET_WEIGHT = 0.5
DECAY_RATE = 0.001
DECAY_RESET_INTERVAL = 5
LAYOUT_PASSES = 3


@dataclass
class RoutedCircuit:
    """Routing result over physical qubits."""

    physical_circuit: Circuit
    initial_layout: dict[int, int]  # logical -> physical
    final_layout: dict[int, int]
    swap_count: int
    depth: int

    def depth_swap_as_3cx(self) -> int:
        return self.physical_circuit.depth(swap_weight=3)


def _build_dag(c: Circuit):
    """Per-gate predecessor counts and successor lists along qubit wires."""
    n_g = len(c.gates)
    in_deg = [0] * n_g
    successors: list[list[int]] = [[] for _ in range(n_g)]
    last: dict[int, int] = {}
    for i, g in enumerate(c.gates):
        preds = {last[q] for q in g.qubits if q in last}
        in_deg[i] = len(preds)
        for p in preds:
            successors[p].append(i)
        for q in g.qubits:
            last[q] = i
    front = [i for i in range(n_g) if in_deg[i] == 0]
    return in_deg, successors, front


def _route_once(c: Circuit, t: HardwareTopology, layout: dict[int, int], rng, emit: bool):
    """One routing pass. Returns (gates or None, final layout, swap count)."""
    dist = t.dist
    in_deg, successors, front = _build_dag(c)
    in_deg = list(in_deg)
    v2p = dict(layout)
    p2v = {p: v for v, p in v2p.items()}
    out: list[Gate] = [] if emit else None
    swaps = 0
    decay = np.ones(t.num_physical)
    steps_since_reset = 0
    stall = 0
    max_stall = 10 * max(1, c.num_qubits) + 20

    neighbors = {p: t.neighbors(p) for p in range(t.num_physical)}

    def record(kind, qubits, params=()):
        if emit:
            out.append(Gate(kind, qubits, params))

    def do_swap(pa, pb):
        nonlocal swaps, steps_since_reset
        record("swap", (min(pa, pb), max(pa, pb)))
        va, vb = p2v.get(pa), p2v.get(pb)
        if va is not None:
            v2p[va] = pb
        if vb is not None:
            v2p[vb] = pa
        p2v.pop(pa, None)
        p2v.pop(pb, None)
        if va is not None:
            p2v[pb] = va
        if vb is not None:
            p2v[pa] = vb
        swaps += 1
        steps_since_reset += 1
        if steps_since_reset % DECAY_RESET_INTERVAL == 0:
            decay[:] = 1.0
        else:
            decay[pa] += DECAY_RATE
            decay[pb] += DECAY_RATE

    def extended_set(front_list):
        ext = []
        layer = list(front_list)
        counts = list(in_deg)
        while layer and len(ext) < EXTENDED_SET_SIZE:
            nxt = []
            for i in layer:
                for s in successors[i]:
                    counts[s] -= 1
                    if counts[s] == 0:
                        nxt.append(s)
                        if c.gates[s].is_two_qubit:
                            ext.append(s)
            layer = nxt
        return ext

    while front:
        ready = []
        blocked = []
        for i in front:
            g = c.gates[i]
            if not g.is_two_qubit or dist[v2p[g.qubits[0]], v2p[g.qubits[1]]] == 1:
                ready.append(i)
            else:
                blocked.append(i)
        if ready:
            stall = 0
            for i in ready:
                g = c.gates[i]
                record(g.kind, tuple(v2p[q] for q in g.qubits), g.params)
                for s in successors[i]:
                    in_deg[s] -= 1
                    if in_deg[s] == 0:
                        blocked.append(s)
            front = blocked
            continue

        stall += 1
        if stall > max_stall:
            # release valve: walk the closest blocked gate together via swaps
            g = min(blocked, key=lambda i: dist[v2p[c.gates[i].qubits[0]], v2p[c.gates[i].qubits[1]]])
            a, b = c.gates[g].qubits
            while dist[v2p[a], v2p[b]] > 1:
                pa = v2p[a]
                step = min(neighbors[pa], key=lambda p: dist[p, v2p[b]])
                do_swap(pa, step)
            stall = 0
            continue

        ext = extended_set(front)
        candidates = set()
        for i in front:
            for q in c.gates[i].qubits:
                p = v2p[q]
                for nb in neighbors[p]:
                    candidates.add((min(p, nb), max(p, nb)))
        scored = []
        for pa, pb in sorted(candidates):
            trial = dict(v2p)
            va, vb = p2v.get(pa), p2v.get(pb)
            if va is not None:
                trial[va] = pb
            if vb is not None:
                trial[vb] = pa
            f_cost = sum(dist[trial[c.gates[i].qubits[0]], trial[c.gates[i].qubits[1]]] for i in front)
            f_cost /= len(front)
            e_cost = 0.0
            if ext:
                e_cost = sum(dist[trial[c.gates[i].qubits[0]], trial[c.gates[i].qubits[1]]] for i in ext)
                e_cost /= len(ext)
            score = max(decay[pa], decay[pb]) * (f_cost + EXTENDED_SET_WEIGHT * e_cost)
            scored.append((score, (pa, pb)))
        best = min(s for s, _ in scored)
        ties = [sw for s, sw in scored if s <= best + 1e-12]
        pick = ties[int(rng.integers(0, len(ties)))]
        do_swap(*pick)

    return out, dict(v2p), swaps


def route(c: Circuit, t: HardwareTopology, seed: int = 0, mode: str = "sabre_layout") -> RoutedCircuit:
    """Map and route a circuit onto a coupling graph.

    ``fixed_identity`` keeps logical qubit i on physical qubit i;
    ``sabre_layout`` refines the layout with forward/backward passes first.
    Deterministic for a fixed seed. Depth counts every gate (swaps included)
    as one layer; see :meth:`RoutedCircuit.depth_swap_as_3cx` for the
    3-CX-per-swap convention.
    """
    if c.num_qubits > t.num_physical:
        raise TooManyQubitsError(f"{c.num_qubits} logical qubits > {t.num_physical} physical")
    rng = np.random.default_rng(seed)
    layout = {i: i for i in range(c.num_qubits)}
    if mode == "sabre_layout" and c.two_qubit_count() > 0:
        rev = Circuit(c.num_qubits, list(reversed(c.gates)))
        for _ in range(LAYOUT_PASSES):
            _, final, _ = _route_once(c, t, layout, rng, emit=False)
            layout = final
            _, final, _ = _route_once(rev, t, layout, rng, emit=False)
            layout = final
    elif mode not in ("sabre_layout", "fixed_identity"):
        raise ValueError(f"unknown routing mode {mode!r}")

    gates, final, swaps = _route_once(c, t, layout, rng, emit=True)
    measured = tuple(final[q] for q in c.measured_qubits)
    phys = Circuit(t.num_physical, gates, measured)
    return RoutedCircuit(phys, dict(layout), final, swaps, phys.depth())


def instantiate_slots(prog) -> Circuit:
    """Base program for depth accounting: every boundary slot gets the
    deepest single-term realization (one rz rotation)."""
    gates = []
    by_pos: dict[int, list] = {}
    for s in prog.slots:
        by_pos.setdefault(s.pos, []).append(s)
    src = prog.circuit.gates
    for pos in range(len(src) + 1):
        for s in by_pos.get(pos, ()):
            gates.append(Gate("rz", (s.local_qubit,), (-np.pi / 2,)))
        if pos < len(src):
            gates.append(src[pos])
    return Circuit(prog.circuit.num_qubits, gates, prog.circuit.measured_qubits)


def sum_subcircuit_depth(routed) -> int:
    """Total post-routing depth across subcircuits (the overhead metric)."""
    return sum(rc.depth for rc in routed)


def export_routed_qasm(rc: RoutedCircuit) -> str:
    """QASM text of a routed circuit with swaps lowered to 3 cx gates."""
    from .qasm import emit_qasm

    lowered = Circuit(rc.physical_circuit.num_qubits, [], rc.physical_circuit.measured_qubits)
    for g in rc.physical_circuit.gates:
        if g.kind == "swap":
            a, b = g.qubits
            lowered.add("cx", a, b)
            lowered.add("cx", b, a)
            lowered.add("cx", a, b)
        else:
            lowered.gates.append(g)
    return emit_qasm(lowered)
