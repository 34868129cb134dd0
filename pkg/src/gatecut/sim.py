"""Exact statevector simulation: the verification oracle for the pipeline.

States are flat complex128 arrays of length ``2**n`` with qubit ``q`` stored
in bit ``q`` of the index. Projective measurements used for post-selection
leave the state *unnormalized* (the branch weight stays in the norm), which
is what the term-evaluation semantics require.

Boundary-slot ops are plain tuples shared with :mod:`gatecut.qpd`:
``("rz", angle)``, ``("z",)`` and ``("measure_z", alpha)`` with
``alpha in (+1, -1, None)`` (``None`` = outcome-signed sampling, only used by
the Monte-Carlo demo).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .circuit import Circuit
from .errors import TooLargeError

MAX_QUBITS = 14


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


_SQ = 1 / math.sqrt(2)
_FIXED_1Q = {
    "h": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "s": np.diag([1, 1j]).astype(np.complex128),
    "sdg": np.diag([1, -1j]).astype(np.complex128),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]).astype(np.complex128),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]).astype(np.complex128),
}


def gate_matrix_1q(kind: str, params=()) -> np.ndarray:
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind]
    if kind == "rx":
        return _u3(params[0], -math.pi / 2, math.pi / 2)
    if kind == "ry":
        return _u3(params[0], 0.0, 0.0)
    if kind == "rz":
        t = params[0]
        return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)]).astype(np.complex128)
    if kind == "u3":
        return _u3(*params)
    raise ValueError(f"not a 1-qubit gate kind: {kind}")


@dataclass
class State:
    """Amplitude vector over ``num_qubits`` qubits (norm may be < 1)."""

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def zero(cls, num_qubits: int) -> "State":
        if num_qubits > MAX_QUBITS:
            raise TooLargeError(f"{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
        amp = np.zeros(1 << num_qubits, dtype=np.complex128)
        amp[0] = 1.0
        return cls(amp, num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "State":
        return State(self.amplitudes.copy(), self.num_qubits)


def apply_gate(state: State, kind: str, qubits, params=()) -> None:
    """Apply one gate in place."""
    amp = state.amplitudes
    if kind == "cz":
        kern.apply_cz(amp, qubits[0], qubits[1])
    elif kind == "cx":
        kern.apply_cx(amp, qubits[0], qubits[1])
    elif kind == "rzz":
        kern.apply_rzz(amp, qubits[0], qubits[1], float(params[0]))
    elif kind == "swap":
        kern.apply_swap(amp, qubits[0], qubits[1])
    else:
        m = gate_matrix_1q(kind, params)
        kern.apply_1q(amp, qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def simulate(c: Circuit, initial: State | None = None) -> State:
    """Run a circuit on |0...0> (or the given state) and return the exact state."""
    if c.num_qubits > MAX_QUBITS:
        raise TooLargeError(f"{c.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
    state = State.zero(c.num_qubits) if initial is None else initial.copy()
    for g in c.gates:
        apply_gate(state, g.kind, g.qubits, g.params)
    return state


def apply_projector(state: State, qubit: int, alpha: int) -> State:
    """Project onto the Z=alpha branch of ``qubit`` without renormalizing."""
    out = state.copy()
    keep_bit = 0 if alpha == +1 else 1
    kern.project_z(out.amplitudes, qubit, keep_bit)
    return out


def expect_zstring(state: State, qubits) -> float:
    """Unnormalized <Z...Z> over the given qubits (empty set -> squared norm)."""
    mask = 0
    for q in qubits:
        mask |= 1 << q
    if mask == 0:
        return float(np.vdot(state.amplitudes, state.amplitudes).real)
    return kern.expect_z_mask(state.amplitudes, mask)


def marginal_probs(state: State, qubits) -> np.ndarray:
    """Outcome probabilities over ``qubits`` (index bit k = qubits[k])."""
    n = state.num_qubits
    probs = (state.amplitudes.real**2 + state.amplitudes.imag**2).reshape((2,) * n)
    qubits = list(qubits)
    rest = [q for q in range(n) if q not in set(qubits)]
    order = [n - 1 - q for q in reversed(qubits)] + [n - 1 - q for q in rest]
    return probs.transpose(order).reshape(1 << len(qubits), -1).sum(axis=1)


@dataclass
class TermOutcome:
    """Result of one term evaluation: a scalar expectation or a 2**m vector."""

    values: np.ndarray


def _slot_schedule(prog):
    """Map gate-stream position -> (slot index, slot) firing before that gate."""
    by_pos: dict[int, list] = {}
    for i, slot in enumerate(prog.slots):
        by_pos.setdefault(slot.pos, []).append((i, slot))
    return by_pos


def _apply_ops(state: State, qubit: int, ops, rng=None):
    """Apply slot ops on one local qubit; returns product of measured signs."""
    sign = 1
    for op in ops:
        if op[0] == "rz":
            apply_gate(state, "rz", (qubit,), (op[1],))
        elif op[0] == "z":
            apply_gate(state, "z", (qubit,))
        elif op[0] == "measure_z":
            alpha = op[1]
            if alpha is None:
                sign *= born_measure(state, qubit, rng)
            else:
                keep_bit = 0 if alpha == +1 else 1
                kern.project_z(state.amplitudes, qubit, keep_bit)
        else:
            raise ValueError(f"unknown slot op {op!r}")
    return sign


def evaluate_term(prog, assignment, observable) -> TermOutcome:
    """Evaluate a subcircuit program with its boundary slots instantiated.

    ``assignment`` maps slot index (position in ``prog.slots``) to an ops
    tuple. ``observable`` is ``("zstring", qubits)`` for an unnormalized
    Z-string expectation or ``("dist", qubits)`` for the subnormalized
    outcome vector over those local qubits.
    """
    n = prog.circuit.num_qubits
    if n > MAX_QUBITS:
        raise TooLargeError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    by_pos = _slot_schedule(prog)
    state = State.zero(n)
    gates = prog.circuit.gates
    for pos in range(len(gates) + 1):
        for slot_idx, slot in by_pos.get(pos, ()):
            _apply_ops(state, slot.local_qubit, assignment[slot_idx])
        if pos < len(gates):
            g = gates[pos]
            apply_gate(state, g.kind, g.qubits, g.params)
    mode, qubits = observable
    if mode == "zstring":
        return TermOutcome(np.asarray(expect_zstring(state, qubits)))
    if mode == "dist":
        return TermOutcome(marginal_probs(state, qubits))
    raise ValueError(f"unknown observable mode {mode!r}")


# ------------------------------------------------------------- MC demo path

def born_measure(state: State, qubit: int, rng) -> int:
    """Sample a Z measurement, collapse and renormalize; returns +1 or -1."""
    probs = marginal_probs(state, [qubit])
    p1 = probs[1] / max(probs.sum(), 1e-300)
    bit = 1 if rng.random() < p1 else 0
    kern.project_z(state.amplitudes, qubit, bit)
    nrm = np.linalg.norm(state.amplitudes)
    if nrm > 0:
        state.amplitudes /= nrm
    return +1 if bit == 0 else -1


def sample_zstring(state: State, qubits, rng) -> int:
    """Draw one basis sample and return its Z-string eigenvalue."""
    probs = state.amplitudes.real**2 + state.amplitudes.imag**2
    total = probs.sum()
    idx = int(rng.choice(probs.size, p=probs / total))
    parity = 0
    for q in qubits:
        parity ^= (idx >> q) & 1
    return -1 if parity else +1


@dataclass
class McEstimate:
    """Quasiprobability sampling estimate with its standard error."""

    value: float
    stderr: float
    weights: np.ndarray  # signed applied weight per shot (|w| = gamma**n_cuts)

    @property
    def mean_abs_weight(self) -> float:
        return float(np.mean(np.abs(self.weights)))

    @property
    def mean_sq_weight(self) -> float:
        return float(np.mean(self.weights**2))


def mc_sample(programs, cut_variants, shots, seed, observable_qubits) -> McEstimate:
    """Unbiased shot-based estimator of a reconstructed Z-string expectation.

    ``programs`` is the list of subcircuit programs sharing the cuts.
    ``cut_variants`` maps cut id -> list of ``(weight, ops_a, ops_b)``
    sampleable realizations (see :func:`gatecut.qpd.sampling_variants`);
    per shot one variant is drawn per cut with probability ``|w| / sum|w|``
    and the estimate is weighted by ``sign(w) * gamma`` per cut. Post-selected
    measurements are realized by signing with the sampled outcome.
    ``observable_qubits`` holds original qubit ids of the Z string.
    """
    if not isinstance(programs, (list, tuple)):
        programs = [programs]
    rng = np.random.default_rng(seed)
    cut_ids = sorted(cut_variants)
    gamma_total = 1.0
    probs_per_cut = {}
    for cid in cut_ids:
        ws = np.array([abs(v[0]) for v in cut_variants[cid]])
        gamma_total *= ws.sum()
        probs_per_cut[cid] = ws / ws.sum()

    local_obs = []
    for prog in programs:
        inv = {orig: loc for loc, orig in prog.qubit_map.items()}
        local_obs.append([inv[q] for q in observable_qubits if q in inv])

    values = np.empty(shots)
    weights = np.empty(shots)
    for s in range(shots):
        sign = 1.0
        chosen = {}
        for cid in cut_ids:
            k = int(rng.choice(len(probs_per_cut[cid]), p=probs_per_cut[cid]))
            w, ops_a, ops_b = cut_variants[cid][k]
            chosen[cid] = (ops_a, ops_b)
            sign *= 1.0 if w >= 0 else -1.0
        prod = 1.0
        for prog, obs in zip(programs, local_obs):
            state = State.zero(prog.circuit.num_qubits)
            by_pos = _slot_schedule(prog)
            gates = prog.circuit.gates
            shot_sign = 1
            for pos in range(len(gates) + 1):
                for _, slot in by_pos.get(pos, ()):
                    ops = chosen[slot.cut_id][0 if slot.side == "a" else 1]
                    shot_sign *= _apply_ops(state, slot.local_qubit, ops, rng)
                if pos < len(gates):
                    g = gates[pos]
                    apply_gate(state, g.kind, g.qubits, g.params)
            prod *= shot_sign * sample_zstring(state, obs, rng)
        weights[s] = sign * gamma_total
        values[s] = weights[s] * prod
    est = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(shots)) if shots > 1 else float("inf")
    return McEstimate(est, stderr, weights)
