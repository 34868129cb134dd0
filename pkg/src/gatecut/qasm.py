"""OpenQASM 2.0 parsing and emission for the supported gate subset.

The grammar covers what the benchmark generators produce: a single ``qreg``,
an optional single ``creg``, gate applications from the supported set, and
``measure`` statements. Angle expressions may use literals, ``pi`` and the
arithmetic operators ``+ - * /`` with parentheses. Anything else is rejected
with a position-annotated error; 3-qubit gates are deliberately unsupported
(callers must pre-decompose them).
"""

from __future__ import annotations

import ast
import math
import re

from .circuit import GATE_SIGNATURES, Circuit, Gate
from .errors import QasmSyntaxError, UnsupportedGateError

# qelib1 names accepted and mapped onto our kinds
_ALIASES = {
    "id": None,  # parsed and dropped (identity)
    "u1": "rz",  # u1(t) == rz(t) up to global phase
    "p": "rz",
    "cnot": "cx",
    "u": "u3",
}

_KNOWN_OTHER = {
    # recognized qelib1 gates we refuse, so the error names the gate
    "ccx", "cswap", "crz", "cu1", "cu3", "ch", "csx", "cy", "rxx", "ryy",
    "u2", "sx", "sxdg", "r",
}

_TOKEN_RE = re.compile(r"^([a-z][a-z0-9_]*)\s*(\(([^)]*)\))?\s*(.*)$", re.IGNORECASE)
_REG_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")


def _eval_angle(expr: str, line: int) -> float:
    """Evaluate a restricted arithmetic expression (floats, pi, + - * / and parens)."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError:
        raise QasmSyntaxError(f"bad angle expression {expr!r}", line) from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if b == 0:
                raise QasmSyntaxError(f"division by zero in {expr!r}", line)
            return a / b
        raise QasmSyntaxError(f"unsupported construct in angle {expr!r}", line)

    return ev(tree)


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a :class:`Circuit`.

    Raises :class:`QasmSyntaxError` on malformed input and
    :class:`UnsupportedGateError` when a statement applies a gate outside the
    supported subset.
    """
    if not isinstance(text, str):
        raise QasmSyntaxError("input must be text")

    qreg_name = None
    num_qubits = 0
    creg_name = None
    creg_size = 0
    gates: list[Gate] = []
    measured: list[int] = []

    # strip comments, keep line numbers for statements split across ';'
    statements: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if stmt:
                statements.append((lineno, stmt))

    def qubit_index(token: str, lineno: int) -> int:
        m = _REG_RE.match(token.strip())
        if not m:
            raise QasmSyntaxError(f"expected qubit reference, got {token!r}", lineno)
        name, idx = m.group(1), int(m.group(2))
        if name != qreg_name:
            raise QasmSyntaxError(f"unknown register {name!r}", lineno)
        if idx >= num_qubits:
            raise QasmSyntaxError(f"qubit index {idx} out of range", lineno)
        return idx

    for lineno, stmt in statements:
        if stmt.startswith("OPENQASM"):
            if not stmt.replace(" ", "").startswith("OPENQASM2"):
                raise QasmSyntaxError("only OPENQASM 2.0 is supported", lineno)
            continue
        if stmt.startswith("include"):
            continue
        if stmt.startswith("qreg"):
            m = _REG_RE.match(stmt[4:].strip())
            if not m:
                raise QasmSyntaxError(f"bad qreg declaration {stmt!r}", lineno)
            if qreg_name is not None:
                raise QasmSyntaxError("multiple quantum registers are not supported", lineno)
            qreg_name, num_qubits = m.group(1), int(m.group(2))
            if num_qubits < 1:
                raise QasmSyntaxError("qreg size must be >= 1", lineno)
            continue
        if stmt.startswith("creg"):
            m = _REG_RE.match(stmt[4:].strip())
            if not m:
                raise QasmSyntaxError(f"bad creg declaration {stmt!r}", lineno)
            if creg_name is not None:
                raise QasmSyntaxError("multiple classical registers are not supported", lineno)
            creg_name, creg_size = m.group(1), int(m.group(2))
            continue
        if qreg_name is None:
            raise QasmSyntaxError("statement before qreg declaration", lineno)
        if stmt.startswith("measure"):
            body = stmt[len("measure"):].strip()
            parts = body.split("->")
            if len(parts) != 2:
                raise QasmSyntaxError(f"bad measure statement {stmt!r}", lineno)
            q = qubit_index(parts[0], lineno)
            if creg_name is None:
                raise QasmSyntaxError("measure without creg", lineno)
            if q not in measured:
                measured.append(q)
            continue
        if stmt.startswith("barrier"):
            raise UnsupportedGateError("barrier")

        m = _TOKEN_RE.match(stmt)
        if not m:
            raise QasmSyntaxError(f"cannot parse statement {stmt!r}", lineno)
        name, _, params_src, args_src = m.groups()
        name = name.lower()
        if name in _ALIASES:
            mapped = _ALIASES[name]
            if mapped is None:
                continue
            name = mapped
        if name not in GATE_SIGNATURES:
            if name in _KNOWN_OTHER or re.fullmatch(r"[a-z][a-z0-9_]*", name):
                raise UnsupportedGateError(name)
            raise QasmSyntaxError(f"cannot parse statement {stmt!r}", lineno)

        nq, np_ = GATE_SIGNATURES[name]
        params: tuple[float, ...] = ()
        if params_src is not None:
            pieces = [p for p in params_src.split(",") if p.strip()]
            params = tuple(_eval_angle(p, lineno) for p in pieces)
        if len(params) != np_:
            raise QasmSyntaxError(f"{name} expects {np_} parameter(s)", lineno)
        args = [a for a in args_src.split(",") if a.strip()]
        if len(args) != nq:
            raise QasmSyntaxError(f"{name} expects {nq} qubit argument(s)", lineno)
        qubits = tuple(qubit_index(a, lineno) for a in args)
        if len(set(qubits)) != len(qubits):
            raise QasmSyntaxError(f"{name} qubits must be distinct", lineno)
        gates.append(Gate(name, qubits, params))

    if qreg_name is None:
        raise QasmSyntaxError("missing qreg declaration")
    return Circuit(num_qubits, gates, tuple(measured))


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_qasm(c: Circuit) -> str:
    """Serialize a circuit back to OpenQASM 2.0 with deterministic formatting."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    if c.measured_qubits:
        lines.append(f"creg c[{len(c.measured_qubits)}];")
    for g in c.gates:
        if g.params:
            head = f"{g.kind}({','.join(_fmt(p) for p in g.params)})"
        else:
            head = g.kind
        args = ",".join(f"q[{q}]" for q in g.qubits)
        lines.append(f"{head} {args};")
    for slot, q in enumerate(c.measured_qubits):
        lines.append(f"measure q[{q}] -> c[{slot}];")
    return "\n".join(lines) + "\n"
