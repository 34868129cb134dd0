"""Command-line front end: cut, knit (verify) and the bench drivers.

Exit codes: 0 success, 1 input/usage error, 2 infeasible or over a hard cap,
3 verification failure (knit --verify with deviation above threshold).
File formats are documented in docs/formats.md; all artifacts are written
atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

from . import bench, knit, qpd
from .circuit import Circuit
from .cost import Partition, ged_cost
from .cutter import GED_SEED, CutterConfig, cut_circuit
from .errors import (
    GatecutError,
    InfeasibleError,
    QasmSyntaxError,
    TooLargeError,
    TooManyNodesError,
    TooManyQubitsError,
    UnknownTopologyError,
    UnsupportedGateError,
)
from .qasm import emit_qasm, parse_qasm
from .qpd import program_qasm, sampling_overhead, split_circuit
from .topo import build_interaction_graph, topology

PLAN_VERSION = 1
VERIFY_THRESHOLD = 1e-6

_INPUT_ERRORS = (QasmSyntaxError, UnsupportedGateError, UnknownTopologyError, FileNotFoundError, ValueError)
_CAP_ERRORS = (InfeasibleError, TooLargeError, TooManyQubitsError, TooManyNodesError)


@dataclass
class CutPlan:
    """Serializable cutting solution; self-consistent by construction."""

    version: int
    topology: str
    alpha: float
    alpha_spec: str
    seed: int
    iterations: int
    max_subcircuit_qubits: int
    ged_effort: int
    partition: list[int]
    cost: dict
    cut_points: list[dict]
    subcircuit_qasm: list[str]
    metrics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CutPlan":
        data = json.loads(text)
        if data.get("version") != PLAN_VERSION:
            raise ValueError(f"unsupported plan version {data.get('version')!r}")
        return cls(**data)

    def validate(self, deep: bool = False) -> None:
        """Check stored numbers against recomputation (1e-9 tolerance)."""
        cost = self.cost
        if len(self.cut_points) != cost["num_cuts"]:
            raise ValueError("cut point count does not match num_cuts")
        total = cost["num_cuts"] + self.alpha * sum(cost["ged_per_subcircuit"])
        if abs(total - cost["total"]) > 1e-9:
            raise ValueError("cost total does not match its breakdown")
        if self.metrics.get("sampling_overhead") != sampling_overhead(cost["num_cuts"]):
            raise ValueError("sampling overhead does not match num_cuts")
        if deep:
            t = topology(self.topology)
            for i, text in enumerate(self.subcircuit_qasm):
                sub = parse_qasm(text)
                g = build_interaction_graph(sub)
                val = ged_cost(g, t, self.ged_effort, GED_SEED)[0]
                if abs(val - cost["ged_per_subcircuit"][i]) > 1e-9:
                    raise ValueError(f"subcircuit {i} GED mismatch")


def build_plan(c: Circuit, topo_name: str, alpha_spec: str, args) -> CutPlan:
    t = topology(topo_name)
    alpha = bench.resolve_alpha(alpha_spec, c)
    g = build_interaction_graph(c)
    max_q = args.max_qubits if args.max_qubits else t.num_physical
    cfg = CutterConfig(alpha, max_q, args.iterations, args.seed, args.ged_effort)
    sol = cut_circuit(g, t, cfg, circuit=c)
    lowered = qpd.lower_to_cz(c, [i for i, _ in sol.cut_gates])
    progs, cuts = split_circuit(lowered, sol.partition)
    return CutPlan(
        version=PLAN_VERSION,
        topology=t.name,
        alpha=alpha,
        alpha_spec=str(alpha_spec),
        seed=args.seed,
        iterations=cfg.resolve_iterations(c.num_qubits),
        max_subcircuit_qubits=max_q,
        ged_effort=args.ged_effort,
        partition=[sol.partition.assignment[q] for q in range(c.num_qubits)],
        cost={
            "num_cuts": sol.cost.num_cuts,
            "ged_per_subcircuit": list(sol.cost.ged_per_subcircuit),
            "alpha": sol.cost.alpha,
            "total": sol.cost.total,
        },
        cut_points=[
            {"id": cp.id, "gate_index": cp.gate_index,
             "side_a": list(cp.side_a), "side_b": list(cp.side_b)}
            for cp in cuts
        ],
        subcircuit_qasm=[program_qasm(p) for p in progs],
        metrics={
            "num_cuts": sol.cost.num_cuts,
            "sampling_overhead": sampling_overhead(sol.cost.num_cuts),
            "ged_per_subcircuit": list(sol.cost.ged_per_subcircuit),
        },
    )


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_rows_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        _atomic_write(path, "\n")
        return
    fields = list(rows[0].keys())
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


def _load_circuit(path: str) -> Circuit:
    with open(path) as f:
        return parse_qasm(f.read())


# ------------------------------------------------------------- subcommands

def cmd_cut(args) -> int:
    c = _load_circuit(args.qasm)
    plan = build_plan(c, args.topology, args.alpha, args)
    plan.validate()
    _atomic_write(args.out, plan.to_json())
    print(f"wrote {args.out}: {plan.cost['num_cuts']} cuts, "
          f"{len(plan.subcircuit_qasm)} subcircuits, total cost {plan.cost['total']:.6g}")
    return 0


def cmd_knit(args) -> int:
    c = _load_circuit(args.qasm)
    if args.verify and c.num_qubits > 14:
        raise TooLargeError(f"--verify needs <= 14 qubits, got {c.num_qubits}")
    t = topology(args.topology)
    alpha = bench.resolve_alpha(args.alpha, c)
    max_q = args.max_qubits if args.max_qubits else t.num_physical
    cfg = CutterConfig(alpha, max_q, args.iterations, args.seed, args.ged_effort)
    if args.observable[0] == "dist":
        observable = "dist"
    elif args.observable[0] == "zstring":
        if len(args.observable) != 2:
            raise ValueError("zstring observable needs a pattern, e.g. zstring ZZIZ")
        spec = args.observable[1].upper()
        if len(spec) != c.num_qubits or any(ch not in "IZ" for ch in spec):
            raise ValueError("zstring pattern must have one I/Z per qubit")
        observable = ("zstring", [i for i, ch in enumerate(spec) if ch == "Z"])
    else:
        raise ValueError(f"unknown observable {args.observable!r}")
    report = knit.reconstruct(c, t, cfg, observable, verify=args.verify)
    text = json.dumps(report, indent=1)
    if args.out:
        _atomic_write(args.out, text)
    print(text)
    if args.verify and report["deviation"] > VERIFY_THRESHOLD:
        print(f"verification failed: deviation {report['deviation']:.3e}", file=sys.stderr)
        return 3
    return 0


def cmd_bench(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.driver == "correlate":
        rows, r = bench.run_correlation(args.samples, args.seed, ged_effort=args.ged_effort)
        _write_rows_csv(os.path.join(args.out, "correlation.csv"), rows)
        summary = {"samples": len(rows), "pearson_r": r}
        _atomic_write(os.path.join(args.out, "correlation.json"), json.dumps(summary, indent=1))
        print(json.dumps(summary))
    elif args.driver == "sweep":
        rows, medians = bench.run_alpha_sweep(
            args.family, args.qubits, args.topology,
            seeds=range(args.seeds), ged_effort=args.ged_effort, jobs=args.jobs,
        )
        _write_rows_csv(os.path.join(args.out, "sweep.csv"), rows)
        _atomic_write(os.path.join(args.out, "sweep.json"),
                      json.dumps({"rows": rows, "medians": medians}, indent=1))
        print(json.dumps(medians))
    elif args.driver == "queko":
        rows = bench.run_queko(chips=args.chips, seeds=range(args.seeds),
                               ged_effort=args.ged_effort, jobs=args.jobs)
        _write_rows_csv(os.path.join(args.out, "queko.csv"), rows)
        _atomic_write(os.path.join(args.out, "queko.json"), json.dumps(rows, indent=1))
        match = sum(1 for r in rows if r["found_cuts"] == r["planted_cuts"])
        print(json.dumps({"cells": len(rows), "optimal_found": match,
                          "zero_swap_layouts": sum(1 for r in rows if r["planted_layout_swaps"] == 0)}))
    elif args.driver == "scale":
        result = bench.run_scale(args.qubits, args.bench, args.topology, args.seed,
                                 ged_effort=args.ged_effort)
        _atomic_write(os.path.join(args.out, "scale.json"), json.dumps(result, indent=1))
        print(json.dumps(result))
    else:
        raise ValueError(f"unknown bench driver {args.driver!r}")
    return 0


class _Parser(argparse.ArgumentParser):
    # exit-code contract: usage problems are input errors (1), not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _iterations(value: str):
    return "auto" if value == "auto" else int(value)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gatecut", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--topology", required=True)
        sp.add_argument("--alpha", default="auto0.2",
                        help="auto0.2 / auto0.5 (gate-density scaled) or a float")
        sp.add_argument("--max-qubits", type=int, default=0,
                        help="subcircuit size bound (default: topology size)")
        sp.add_argument("--iterations", type=_iterations, default="auto")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--ged-effort", type=int, default=16)

    sp = sub.add_parser("cut", help="search a cutting solution and write a plan")
    sp.add_argument("--qasm", required=True)
    common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_cut)

    sp = sub.add_parser("knit", help="cut, evaluate terms exactly and reconstruct")
    sp.add_argument("--qasm", required=True)
    common(sp)
    sp.add_argument("--observable", nargs="+", default=["dist"],
                    help="'dist' or 'zstring PATTERN' (one I/Z per qubit)")
    sp.add_argument("--verify", action="store_true",
                    help="compare against the uncut statevector oracle")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_knit)

    sp = sub.add_parser("bench", help="experiment drivers")
    sp.add_argument("driver", choices=["correlate", "sweep", "queko", "scale"])
    sp.add_argument("--out", default="bench_out")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--family", default="aqft", choices=list(bench.FAMILIES))
    sp.add_argument("--bench", default="ising", choices=list(bench.FAMILIES))
    sp.add_argument("--qubits", type=int, default=16)
    sp.add_argument("--topology", default="lagos")
    sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--chips", type=int, nargs="+", default=[1, 2, 3])
    sp.add_argument("--ged-effort", type=int, default=16)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_bench)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _CAP_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GatecutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
