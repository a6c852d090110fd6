"""Command-line front end emitting plot-ready CSV/JSON tables."""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys
import tempfile

import numpy as np

from . import channels, classify, compiler, experiments
from .network import NetworkSpec, forward
from .sim import QuantumState, SimulationError

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_angle(text: str) -> float:
    """Float or arithmetic on numbers and ``pi``, e.g. ``7*pi/16``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite: {text!r}")
    return value


def angle_list(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()] if text.strip() else []


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def parse_eta(text: str):
    if text == "1":
        return 1
    if text in ("i", "j", "1j"):
        return 1j
    raise argparse.ArgumentTypeError(f"eta must be 1 or i, got {text!r}")


def single_qubit_input(text: str) -> QuantumState:
    """A label from ``0 1 + -`` or ``Z,X`` angles for ``exp(-iZ a) exp(-iX b)|0>``."""
    if text in ("0", "1", "+", "-"):
        return QuantumState.from_label(text)
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"input must be 0, 1, +, - or 'z_angle,x_angle', got {text!r}")
    return experiments.encoding_input(parse_angle(parts[0]), parse_angle(parts[1]))


def fmt(value) -> str:
    return format(float(value), ".12g")


def to_csv(columns: dict[str, np.ndarray]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in zip(*columns.values()):
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def to_json(doc) -> str:
    def default(o):
        if isinstance(o, complex):
            return {"re": o.real, "im": o.imag}
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        raise TypeError(type(o).__name__)

    return json.dumps(doc, indent=2, default=default) + "\n"


def columns_output(columns: dict[str, np.ndarray], fmt_: str) -> str:
    if fmt_ == "json":
        return to_json({k: np.asarray(v).tolist() for k, v in columns.items()})
    return to_csv(columns)


def write_output(text: str, path: str | None) -> None:
    """Write the whole output at once; a failed run leaves no file behind."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


DESCRIPTIONS = {
    "hysteresis": {
        "t": "time step",
        "zc_in": "voltage: <Z> of the incoming current qubit",
        "zc_out": "current: <Z (x) I> after the gate",
        "zr_out": "conductance: <I (x) Z> after the gate",
        "segment": "(--segments only) index of the re-run segment",
    },
    "plasticity": {
        "t": "time step",
        "zc_in": "<Z> of the incoming current qubit",
        "zr_in": "<Z> of the resistance qubit before the gate",
        "zr_out": "conductance <I (x) Z> after the gate",
        "x_r, y_r, z_r": "Bloch vector of the resistance qubit after the step",
    },
    "encode": {
        "t": "time step",
        "fidelity": "sqrt(Tr(rho_C rho_R)) after the step",
        "x_r, y_r, z_r": "Bloch vector of the resistance qubit after the step",
        "zc_in": "<Z> of the incoming current qubit",
    },
    "steady": {
        "steady_state": "fixed-point Bloch vector (x, y, z), or a particular point plus null-space basis",
        "residual": "|(I - E) v - k|",
    },
    "compile": {
        "program": "ordered connections (current, resistance, phi, theta) and logical interface",
        "verified": "simulation matches the target up to global phase within 1e-10",
        "resources": "currents, resistances, ancilla_resistances, connections",
    },
    "classify": {
        "best_objective": "sum of pairwise outcome-distribution trace distances",
        "trajectory": "best objective so far after each evaluation (CSV: improvements only)",
    },
    "network-eval": {
        "outcome": "hidden-layer bit string, qubit 1 first, 0 means Z = +1",
        "probability": "exact (or --shots sampled) probability",
    },
}


def _describe(command: str) -> str:
    return "".join(f"{k}: {v}\n" for k, v in DESCRIPTIONS[command].items())


def cmd_hysteresis(args) -> str:
    if args.delta_phi == 0:
        steps = args.steps or 100
        sched = experiments.oscillatory_schedule(args.theta, 0.0, args.eta, steps)
        loop = experiments.HysteresisLoop(args.theta, 0.0, args.eta, experiments.run_trace(sched))
    elif args.steps:
        sched = experiments.oscillatory_schedule(args.theta, args.delta_phi, args.eta, args.steps)
        loop = experiments.HysteresisLoop(args.theta, args.delta_phi, args.eta, experiments.run_trace(sched))
    else:
        loop = experiments.hysteresis_loop(args.theta, args.delta_phi, args.eta, args.periods)
    if args.segments:
        if args.delta_phi == 0:
            raise SimulationError("--segments needs a nonzero --delta-phi")
        segs = experiments.hysteresis_segments(loop)
        cols = {k: [] for k in ("segment", "t", "zc_in", "zc_out", "zr_out")}
        for s, seg in enumerate(segs):
            cols["segment"] += [s] * len(seg)
            cols["t"] += seg.t.tolist()
            for k in ("zc_in", "zc_out", "zr_out"):
                cols[k] += getattr(seg, k).tolist()
        return columns_output(cols, args.format)
    tr = loop.trace
    return columns_output({"t": tr.t, "zc_in": tr.zc_in, "zc_out": tr.zc_out, "zr_out": tr.zr_out}, args.format)


def _trace_columns(trace, keys) -> dict:
    cols = trace.columns()
    return {k: cols[k] for k in keys}


def cmd_plasticity(args) -> str:
    if args.input is None:
        sched = experiments.ltp_ltd_schedule(args.theta, args.steps or 100)
    else:
        sched = experiments.constant_schedule(args.theta, args.input, args.steps or 100, initial_resistance=args.initial)
    trace = experiments.run_trace(sched)
    return columns_output(_trace_columns(trace, ["t", "zc_in", "zr_in", "zr_out", "x_r", "y_r", "z_r"]), args.format)


def cmd_encode(args) -> str:
    rho_c = args.input if args.input is not None else experiments.encoding_input(7 * math.pi / 22, 3 * math.pi / 10)
    sched = experiments.constant_schedule(args.theta, rho_c, args.steps or 200, "encoding", args.initial)
    trace = experiments.run_trace(sched)
    return columns_output(_trace_columns(trace, ["t", "fidelity", "x_r", "y_r", "z_r", "zc_in"]), args.format)


def cmd_steady(args) -> str:
    rho_c = args.input if args.input is not None else QuantumState.from_label("1")
    build = channels.ptm_plasticity if args.mode == "plasticity" else channels.ptm_encoding
    ptm = build(args.theta, rho_c)
    sol = channels.steady_state(ptm)
    doc = {"theta": args.theta, "mode": args.mode, "input_bloch": rho_c.bloch()}
    if isinstance(sol, channels.BlochVector):
        v = sol.as_array()
        doc["steady_state"] = v
        doc["residual"] = float(np.linalg.norm((np.eye(3) - ptm.E) @ v - ptm.k))
    else:
        doc["steady_state"] = {"particular": sol.particular, "null_space": sol.null_space.T}
        doc["residual"] = sol.residual
    return to_json(doc)


def cmd_compile(args) -> str:
    builders = {
        "write": compiler.compile_write,
        "read": compiler.compile_read,
        "single": lambda: compiler.compile_single_qubit(args.phi, args.theta),
        "single-visit-once": lambda: compiler.compile_single_qubit(args.phi, args.theta, visit_once=True),
        "cnot": compiler.compile_cnot,
    }
    program = builders[args.gate]()
    res = compiler.resource_count(program)
    return to_json({
        "program": program.to_dict(),
        "verified": compiler.verify_program(program, seed=args.seed),
        "resources": {
            "currents": res.currents,
            "resistances": res.resistances,
            "ancilla_resistances": res.ancilla_resistances,
            "connections": res.connections,
        },
    })


def _classification_task(args) -> classify.ClassificationTask:
    if args.task == "bell":
        return classify.bell_task(args.frozen_phi)
    if args.task == "ghz-plus-2x1":
        return classify.ghz_plus_task(2, 1, args.frozen_phi)
    return classify.ghz_plus_task(args.m or 5, args.n or args.m or 5, args.frozen_phi)


def cmd_classify(args) -> str:
    task = _classification_task(args)
    result = classify.optimize(task, args.budget, args.restarts, args.seed)
    if args.format == "csv":
        return result.trajectory_csv()
    n_pairs = len(task.class_states) * (len(task.class_states) - 1) // 2
    doc = {"task": args.task, "m": task.network.m, "n": task.network.n, "frozen_phi": task.frozen_phi,
           "budget": args.budget, "restarts": args.restarts, "seed": args.seed,
           "mean_distance": result.best_objective / n_pairs}
    doc.update(result.to_dict())
    return to_json(doc)


def _network_input(kind: str, m: int) -> QuantumState:
    if kind == "mixed":
        return QuantumState(np.eye(2**m, dtype=complex) / 2**m)
    if kind == "zero":
        return QuantumState.from_label("0" * m)
    return classify.prepare_class_state(kind, m)


def cmd_network_eval(args) -> str:
    if args.network:
        with open(args.network) as fh:
            spec = NetworkSpec.from_json(fh.read())
    else:
        if not (args.m and args.n):
            raise SimulationError("give --network FILE or both --m and --n")
        phi = args.phi if args.phi is not None else [0.0] * ((args.m + 1) * args.n)
        theta = args.theta_list if args.theta_list is not None else [0.0] * (args.m * args.n)
        spec = NetworkSpec.fully_connected(args.m, args.n, phi, theta)
    dist = forward(spec, _network_input(args.input, spec.m))
    if args.shots:
        dist = dist.sample(args.shots, np.random.default_rng(args.seed))
    probs = dist.as_dict()
    if args.format == "json":
        return to_json({"network": spec.to_dict(), "input": args.input, "shots": args.shots, "distribution": probs})
    return to_csv({"outcome": list(probs), "probability": list(probs.values())})


COMMANDS = {
    "hysteresis": cmd_hysteresis,
    "plasticity": cmd_plasticity,
    "encode": cmd_encode,
    "steady": cmd_steady,
    "compile": cmd_compile,
    "classify": cmd_classify,
    "network-eval": cmd_network_eval,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memristorq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=default_format)
        p.add_argument("--describe", action="store_true", help="describe output columns and exit")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("hysteresis", help="current/conductance loops under oscillatory voltage")
    common(p, "csv")
    p.add_argument("--theta", type=parse_angle, default=7 * math.pi / 16)
    p.add_argument("--delta-phi", type=parse_angle, default=math.pi / 32)
    p.add_argument("--eta", type=parse_eta, default=1)
    p.add_argument("--periods", type=positive_int, default=10)
    p.add_argument("--steps", type=positive_int, help="override the step count")
    p.add_argument("--segments", action="store_true", help="re-run 3-step segments of the last cycle")

    for name, default_theta, default_format in (("plasticity", 7 * math.pi / 16, "csv"), ("encode", 7 * math.pi / 16, "csv")):
        p = sub.add_parser(name, help="long-term plasticity trace" if name == "plasticity" else "state-encoding trace")
        common(p, default_format)
        p.add_argument("--theta", type=parse_angle, default=default_theta)
        p.add_argument("--steps", type=positive_int,
                       help="segment length (plasticity) or trace length (encode)")
        p.add_argument("--input", type=single_qubit_input,
                       help="current-qubit state: 0, 1, +, - or 'z_angle,x_angle'")
        p.add_argument("--initial", type=single_qubit_input, default=QuantumState.from_label("+"),
                       help="initial resistance state")

    p = sub.add_parser("steady", help="fixed point of the resistance-qubit channel")
    common(p, "json")
    p.add_argument("--theta", type=parse_angle, default=7 * math.pi / 16)
    p.add_argument("--mode", choices=["plasticity", "encoding"], default="plasticity")
    p.add_argument("--input", type=single_qubit_input, help="current-qubit state (default 1)")

    p = sub.add_parser("compile", help="universal-gate construction and its verification")
    common(p, "json")
    p.add_argument("--gate", choices=["write", "read", "single", "single-visit-once", "cnot"], default="cnot")
    p.add_argument("--phi", type=parse_angle, default=0.0)
    p.add_argument("--theta", type=parse_angle, default=0.0)

    p = sub.add_parser("classify", help="optimise the network for state classification")
    common(p, "json")
    p.add_argument("--task", choices=["bell", "ghz-plus", "ghz-plus-2x1"], default="bell")
    p.add_argument("--m", type=positive_int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--frozen-phi", action="store_true")
    p.add_argument("--budget", type=positive_int, default=50000, help="evaluations per restart")
    p.add_argument("--restarts", type=positive_int, default=20)

    p = sub.add_parser("network-eval", help="outcome distribution of a network")
    common(p, "csv")
    p.add_argument("--network", help="NetworkSpec JSON file")
    p.add_argument("--m", type=positive_int)
    p.add_argument("--n", type=positive_int)
    p.add_argument("--phi", type=angle_list)
    p.add_argument("--theta", dest="theta_list", type=angle_list)
    p.add_argument("--input", choices=["ghz", "plus", "zero", "mixed", "bell1", "bell2", "bell3", "bell4"],
                   default="ghz")
    p.add_argument("--shots", type=positive_int, help="sample this many shots")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.describe:
        sys.stdout.write(_describe(args.command))
        return 0
    try:
        text = COMMANDS[args.command](args)
        write_output(text, args.out)
    except (SimulationError, ValueError, OSError) as exc:
        print(f"memristorq {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
