"""Gate-list intermediate representation of quantum programs.

A circuit is an ordered list of 1- and 2-qubit gates over a single qubit
register, plus an optional list of measured qubits. Qubit ``q`` of an
``n``-qubit circuit corresponds to bit ``q`` of a basis-state index
(little-endian), which is also the convention the simulator uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# kind -> (number of qubits, number of parameters)
GATE_SIGNATURES = {
    "h": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "u3": (1, 3),
    "cz": (2, 0),
    "cx": (2, 0),
    "rzz": (2, 1),
    "swap": (2, 0),
}

TWO_QUBIT_KINDS = frozenset(k for k, (nq, _) in GATE_SIGNATURES.items() if nq == 2)


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, target qubits, real-angle parameters."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        sig = GATE_SIGNATURES.get(self.kind)
        if sig is None:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        nq, np_ = sig
        if len(self.qubits) != nq:
            raise ValueError(f"{self.kind} takes {nq} qubits, got {self.qubits}")
        if len(self.params) != np_:
            raise ValueError(f"{self.kind} takes {np_} params, got {self.params}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} qubits must be distinct: {self.qubits}")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def remap(self, mapping) -> "Gate":
        """Return the same gate on relabeled qubits."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.params, self.tags)


def gate(kind: str, *qubits: int, params=(), tags=()) -> Gate:
    """Shorthand constructor: ``gate("rz", 0, params=(0.5,))``."""
    return Gate(kind, tuple(qubits), tuple(params), frozenset(tags))


@dataclass
class Circuit:
    """Ordered gate list over ``num_qubits`` wires."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    measured_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)
        for q in self.measured_qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"measured qubit {q} out of range")

    def _check(self, g: Gate):
        for q in g.qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")

    def add(self, kind: str, *qubits: int, params=()) -> "Circuit":
        g = gate(kind, *qubits, params=params)
        self._check(g)
        self.gates.append(g)
        return self

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def depth(self, swap_weight: int = 1) -> int:
        """Number of gate layers; every gate occupies one layer unit.

        ``swap_weight=3`` charges each swap as three CX layers instead.
        """
        frontier = [0] * self.num_qubits
        for g in self.gates:
            width = swap_weight if g.kind == "swap" else 1
            start = max(frontier[q] for q in g.qubits)
            for q in g.qubits:
                frontier[q] = start + width
        return max(frontier, default=0)

    def copy(self) -> "Circuit":
        return Circuit(self.num_qubits, list(self.gates), self.measured_qubits)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and self.gates == other.gates
            and self.measured_qubits == other.measured_qubits
        )


def circuits_close(a: Circuit, b: Circuit, tol: float = 1e-12) -> bool:
    """Gate-for-gate equality with angle tolerance (for round-trip tests)."""
    if a.num_qubits != b.num_qubits or len(a.gates) != len(b.gates):
        return False
    if a.measured_qubits != b.measured_qubits:
        return False
    for ga, gb in zip(a.gates, b.gates):
        if ga.kind != gb.kind or ga.qubits != gb.qubits:
            return False
        if any(not math.isclose(x, y, rel_tol=0.0, abs_tol=tol) for x, y in zip(ga.params, gb.params)):
            return False
    return True
