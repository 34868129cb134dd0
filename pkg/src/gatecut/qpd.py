"""Quasiprobability decomposition of cut CZ gates.

A partition-crossing CZ is removed from the circuit and replaced, on each
side, by local single-qubit operations. Writing the CZ as a fixed
``rz(-pi/2) x rz(-pi/2)`` pre-rotation (inserted into both subcircuits at the
cut position) followed by a two-qubit diagonal ``V``, the channel of ``V``
expands into ten weighted terms:

* two singletons: identity on both sides, ``z`` on both sides,
* two families of four: a post-selected Z measurement (outcome ``alpha1``)
  on one side paired with ``rz(alpha2 * pi/2)`` on the other, for all four
  sign combinations, with the product ``alpha1 * alpha2`` carried by the
  coefficient.

Post-selected measurement channels carry a compensation factor of 2 (the
kept branch is unnormalized, and the discarded branch feeds the opposite-sign
term), so the effective channel weight of a term is
``coefficient * 2**(number of measure ops)``. With that convention the
coefficients below reproduce the CZ channel exactly and their absolute sum
equals the gate-cut sampling constant gamma = 3; tests re-derive them from a
superoperator least-squares solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Circuit, Gate
from .cost import Partition
from .errors import NotLoweredError, UnsupportedCutGateError

HALF_PI = math.pi / 2

#: sampling constant for one gate cut
GAMMA = 3.0

#: channel compensation per post-selected measurement op
MEASURE_CHANNEL_FACTOR = 2.0

#: frozen decomposition constants (re-derived by the coefficient oracle test)
COEFF_SINGLETON = 0.5
COEFF_FAMILY = 0.25

FOLD_LABELS = ("I", "Z", "M", "R")

#: pre-rotation hoisted out of every term and emitted into both subcircuits
CUT_COMPENSATION = ("rz", -HALF_PI)


@dataclass(frozen=True)
class CutPoint:
    """One cut CZ: its gate position and the two subcircuit sides."""

    id: int
    gate_index: int
    side_a: tuple[int, int]  # (subcircuit index, local qubit)
    side_b: tuple[int, int]

    def side(self, which: str) -> tuple[int, int]:
        return self.side_a if which == "a" else self.side_b


@dataclass(frozen=True)
class QpdTerm:
    """One raw decomposition term (ops include the pre-rotation)."""

    raw_index: int
    coefficient: float
    side_a_ops: tuple
    side_b_ops: tuple
    fold_label_a: str
    fold_label_b: str
    alpha_a: int | None = None
    alpha_b: int | None = None

    @property
    def num_measurements(self) -> int:
        return sum(1 for op in self.side_a_ops + self.side_b_ops if op[0] == "measure_z")

    @property
    def effective_weight(self) -> float:
        return self.coefficient * MEASURE_CHANNEL_FACTOR**self.num_measurements


def enumerate_terms(cut: CutPoint | None = None) -> list[QpdTerm]:
    """The ten raw terms replacing one cut CZ (identical for every cut)."""
    comp = CUT_COMPENSATION
    terms = [
        QpdTerm(0, COEFF_SINGLETON, (comp,), (comp,), "I", "I"),
        QpdTerm(1, COEFF_SINGLETON, (comp, ("z",)), (comp, ("z",)), "Z", "Z"),
    ]
    idx = 2
    for a1 in (+1, -1):
        for a2 in (+1, -1):
            terms.append(
                QpdTerm(
                    idx,
                    COEFF_FAMILY * a1 * a2,
                    (comp, ("measure_z", a1)),
                    (comp, ("rz", a2 * HALF_PI)),
                    "M",
                    "R",
                    a1,
                    a2,
                )
            )
            idx += 1
    for a1 in (+1, -1):
        for a2 in (+1, -1):
            terms.append(
                QpdTerm(
                    idx,
                    COEFF_FAMILY * a1 * a2,
                    (comp, ("rz", a1 * HALF_PI)),
                    (comp, ("measure_z", a2)),
                    "R",
                    "M",
                    a1,
                    a2,
                )
            )
            idx += 1
    return terms


def realization(label: str, alpha: int | None = None) -> tuple:
    """Slot ops for one folded label, *after* the hoisted pre-rotation."""
    if label == "I":
        return ()
    if label == "Z":
        return (("z",),)
    if label == "M":
        return (("measure_z", alpha),)
    if label == "R":
        return (("rz", alpha * HALF_PI),)
    raise ValueError(f"unknown label {label!r}")


#: per-slot raw options a side must evaluate before folding
SIDE_ASSIGNMENTS = (
    ("I", None),
    ("Z", None),
    ("M", +1),
    ("M", -1),
    ("R", +1),
    ("R", -1),
)


def sampling_variants():
    """The six sampleable circuit pairs for Monte-Carlo estimation.

    The four measurement-family terms per side collapse into two variants
    whose measured outcome signs the shot, so per cut the absolute weights
    sum to gamma = 3. Returns ``(weight, ops_a, ops_b)`` triples in
    slot-suffix form (pre-rotation already lives in the subcircuit).
    """
    meas = (("measure_z", None),)
    out = [
        (COEFF_SINGLETON, (), ()),
        (COEFF_SINGLETON, (("z",),), (("z",),)),
    ]
    for a2 in (+1, -1):
        out.append((COEFF_SINGLETON * a2, meas, (("rz", a2 * HALF_PI),)))
    for a1 in (+1, -1):
        out.append((COEFF_SINGLETON * a1, (("rz", a1 * HALF_PI),), meas))
    return out


def sampling_overhead(n_cuts: int) -> float:
    """Shot multiplier gamma**(2n) = 9**n for n gate cuts."""
    if n_cuts < 0:
        raise ValueError("cut count must be >= 0")
    return float(GAMMA ** (2 * n_cuts))


# --------------------------------------------------------------- lowering

def _rzz_as_cz(theta: float):
    """Return the rz angle pairing with a CZ for rzz(theta), or None.

    rzz(theta) is CZ-equivalent exactly when theta is an odd multiple of
    pi/2: rzz(pi/2) ~ cz . (rz(pi/2) x rz(pi/2)) up to global phase, and the
    3pi/2 case uses rz(-pi/2). Other angles (including the non-entangling
    multiples of pi) have no single-CZ form and are rejected.
    """
    tau = theta % (2 * math.pi)
    for target, sign in ((HALF_PI, +1.0), (3 * HALF_PI, -1.0)):
        if abs(tau - target) < 1e-9:
            return sign * HALF_PI
    return None


def lower_to_cz(c: Circuit, cut_gate_indices) -> Circuit:
    """Rewrite the indexed crossing gates into CZ form.

    ``cx(a, b)`` becomes ``h(b) cz(a, b) h(b)``; ``cz`` stays; ``rzz`` with
    an odd-multiple-of-pi/2 angle becomes a CZ plus local rz rotations.
    The whole circuit stays unitarily identical.
    """
    targets = set(cut_gate_indices)
    out = Circuit(c.num_qubits, [], c.measured_qubits)
    for i, g in enumerate(c.gates):
        if i not in targets:
            out.gates.append(g)
            continue
        if g.kind == "cz":
            out.gates.append(g)
        elif g.kind == "cx":
            a, b = g.qubits
            out.add("h", b)
            out.add("cz", a, b)
            out.add("h", b)
        elif g.kind == "rzz":
            angle = _rzz_as_cz(g.params[0])
            if angle is None:
                raise UnsupportedCutGateError(
                    f"rzz({g.params[0]!r}) at gate {i} has no exact CZ-form cut"
                )
            a, b = g.qubits
            out.add("rz", a, params=(angle,))
            out.add("rz", b, params=(angle,))
            out.add("cz", a, b)
        else:
            raise UnsupportedCutGateError(f"cannot cut {g.kind} at gate {i}")
    return out


# --------------------------------------------------------------- splitting

@dataclass(frozen=True)
class Slot:
    """Boundary op slot: fires before gate index ``pos`` of the local circuit."""

    cut_id: int
    side: str  # "a" | "b"
    pos: int
    local_qubit: int
    gate_index: int  # position of the cut CZ in the lowered circuit


@dataclass
class SubcircuitProgram:
    """One partition block's local circuit plus its boundary slots."""

    index: int
    circuit: Circuit
    slots: tuple[Slot, ...]
    qubit_map: dict[int, int]  # local qubit -> original qubit
    origins: tuple[tuple[int, int], ...] = ()  # per-gate (source index, sub-order)

    @property
    def incident_cuts(self) -> tuple[tuple[int, str], ...]:
        return tuple((s.cut_id, s.side) for s in self.slots)


def split_circuit(c: Circuit, p: Partition) -> tuple[list[SubcircuitProgram], list[CutPoint]]:
    """Split a lowered circuit along a partition into per-block programs.

    Local programs keep the original relative gate order; every crossing CZ
    becomes a :class:`CutPoint` whose pre-rotation is inserted into both
    sides, followed by one boundary slot per side. Local qubit indices are
    compacted (sorted original order) with the mapping recorded.
    """
    blocks = p.blocks()
    local_of = {}
    for b, block in enumerate(blocks):
        for li, q in enumerate(block):
            local_of[q] = (b, li)

    gates: list[list[Gate]] = [[] for _ in blocks]
    origins: list[list[tuple[int, int]]] = [[] for _ in blocks]
    slots: list[list[Slot]] = [[] for _ in blocks]
    cuts: list[CutPoint] = []

    for i, g in enumerate(c.gates):
        homes = {local_of[q][0] for q in g.qubits}
        if len(homes) == 1:
            b = homes.pop()
            mapped = g.remap({q: local_of[q][1] for q in g.qubits})
            gates[b].append(mapped)
            origins[b].append((i, 0))
            continue
        if g.kind != "cz":
            raise NotLoweredError(f"crossing gate {g.kind} at index {i} is not a cz")
        qa, qb = g.qubits
        (ba, la), (bb, lb) = local_of[qa], local_of[qb]
        cut_id = len(cuts)
        cuts.append(CutPoint(cut_id, i, (ba, la), (bb, lb)))
        for b, lq, side in ((ba, la, "a"), (bb, lb, "b")):
            gates[b].append(Gate("rz", (lq,), (CUT_COMPENSATION[1],)))
            origins[b].append((i, 0))
            slots[b].append(Slot(cut_id, side, len(gates[b]), lq, i))

    progs = []
    for b, block in enumerate(blocks):
        measured = tuple(local_of[q][1] for q in c.measured_qubits if q in block)
        sub = Circuit(len(block), gates[b], measured)
        progs.append(
            SubcircuitProgram(
                b,
                sub,
                tuple(slots[b]),
                {li: q for li, q in enumerate(block)},
                tuple(origins[b]),
            )
        )
    return progs, cuts


def reassemble(progs, cuts, num_qubits: int) -> Circuit:
    """Merge programs back, replacing each cut with its CZ realization.

    Together with the pre-rotations already inside the programs this
    reproduces a circuit unitarily equal to the lowered original; used by
    tests to keep the splitter honest.
    """
    events: list[tuple[tuple[int, int, int], Gate]] = []
    for prog in progs:
        inv = prog.qubit_map
        for g, (src, sub) in zip(prog.circuit.gates, prog.origins):
            events.append(((src, sub, prog.index), g.remap(inv)))
    for cut in cuts:
        qa = next(p.qubit_map[cut.side_a[1]] for p in progs if p.index == cut.side_a[0])
        qb = next(p.qubit_map[cut.side_b[1]] for p in progs if p.index == cut.side_b[0])
        events.append(((cut.gate_index, 1, -1), Gate("cz", (qa, qb))))
        events.append(((cut.gate_index, 2, -1), Gate("rz", (qa,), (HALF_PI,))))
        events.append(((cut.gate_index, 2, 0), Gate("rz", (qb,), (HALF_PI,))))
    events.sort(key=lambda e: e[0])
    return Circuit(num_qubits, [g for _, g in events])


def program_qasm(prog: SubcircuitProgram) -> str:
    """QASM text of one program with boundary slots as tagged comments."""
    from .qasm import emit_qasm

    base = emit_qasm(prog.circuit).splitlines()
    header_len = 3 + (1 if prog.circuit.measured_qubits else 0)
    by_pos: dict[int, list[Slot]] = {}
    for s in prog.slots:
        by_pos.setdefault(s.pos, []).append(s)
    lines = base[:header_len]
    for pos in range(len(prog.circuit.gates) + 1):
        for s in by_pos.get(pos, ()):
            lines.append(f"// CUT {s.cut_id} SIDE {s.side}")
        if pos < len(prog.circuit.gates):
            lines.append(base[header_len + pos])
    lines.extend(base[header_len + len(prog.circuit.gates):])
    return "\n".join(lines) + "\n"
