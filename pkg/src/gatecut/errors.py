"""Exception hierarchy shared across the package."""


class GatecutError(Exception):
    """Base class for all errors raised by this package."""


class QasmSyntaxError(GatecutError):
    """Malformed OpenQASM input. Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedGateError(GatecutError):
    """A gate outside the supported subset appeared in the input."""


class UnknownTopologyError(GatecutError):
    """Requested hardware topology name is not recognized."""


class TooManyNodesError(GatecutError):
    """Subgraph has more nodes than the target topology has qubits."""


class EmptyCircuitError(GatecutError):
    """Operation requires a circuit with at least one gate."""


class InfeasibleError(GatecutError):
    """No partition can satisfy the subcircuit size bound."""


class UnsupportedCutGateError(GatecutError):
    """A crossing gate has no exact CZ-form lowering."""


class NotLoweredError(GatecutError):
    """split_circuit was called while a crossing gate is not a CZ."""


class TooLargeError(GatecutError):
    """State vector would exceed the simulator qubit cap."""


class TooManyQubitsError(GatecutError):
    """Circuit has more qubits than the routing target has physical qubits."""


class IncompleteOutcomesError(GatecutError):
    """Folding needs outcomes for every slot assignment of a subcircuit."""


class LegMismatchError(GatecutError):
    """Tensor legs do not pair up one-to-one with cut sides."""
