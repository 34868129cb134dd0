"""Hardware-aware gate cutting with exact knitting verification.

Pipeline: parse (qasm) -> interaction graph (topo) -> cost model (cost) ->
contraction search (cutter) -> CZ quasiprobability terms (qpd) -> routing
(router) -> exact term evaluation (sim) -> fold/contract/verify (knit).
Benchmark generators and experiment drivers live in bench; the CLI in cli.
"""

from .circuit import Circuit, Gate
from .cost import CostBreakdown, Partition, count_cuts, gate_density, ged_cost, total_cost
from .cutter import CutSolution, CutterConfig, auto_iterations, cut_circuit
from .knit import build_result_tensor, contract, pairing_matrix, reconstruct
from .qasm import emit_qasm, parse_qasm
from .qpd import enumerate_terms, lower_to_cz, sampling_overhead, split_circuit
from .router import route, sum_subcircuit_depth
from .sim import evaluate_term, simulate
from .topo import build_interaction_graph, contract_edge, topology

__all__ = [
    "Circuit",
    "Gate",
    "CostBreakdown",
    "Partition",
    "CutSolution",
    "CutterConfig",
    "auto_iterations",
    "build_interaction_graph",
    "build_result_tensor",
    "contract",
    "contract_edge",
    "count_cuts",
    "cut_circuit",
    "emit_qasm",
    "enumerate_terms",
    "evaluate_term",
    "gate_density",
    "ged_cost",
    "lower_to_cz",
    "pairing_matrix",
    "parse_qasm",
    "reconstruct",
    "route",
    "sampling_overhead",
    "simulate",
    "split_circuit",
    "sum_subcircuit_depth",
    "topology",
    "total_cost",
]

__version__ = "0.1.0"
