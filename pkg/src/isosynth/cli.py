"""Command-line front end.

Exit codes: 0 success, 2 malformed input or request, 3 the operation violates
its defining invariant (V^dag V = 1, Kraus or effect completeness), 4 the
compiled circuit misses the requested tolerance.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from .channels import (Channel, Instrument, Povm, channel_residual, compile_channel,
                       compile_instrument, compile_povm, instrument_residual, povm_residual)
from .circuit import (Circuit, CircuitError, circuit_from_dict, circuit_isometry, circuit_to_json,
                      rotation_count, two_qubit_count)
from .export import QasmParseError, to_latex, to_qasm
from .io import SchemaError, load_json, parse_operation
from .ion import cnot_to_xx_circuit, xx_to_cnot_circuit
from .numerics import ValidationError, check_isometry, isometry_defect
from .synthesis.dispatch import Method, synthesize
from .synthesis.isometry import isometry_dims
from .verify import phase_invariant_distance

EXIT_OK, EXIT_SCHEMA, EXIT_INVARIANT, EXIT_RESIDUAL = 0, 2, 3, 4

_KIND_ALIASES = {"iso": "iso", "isometry": "iso", "channel": "channel", "povm": "povm",
                 "instrument": "instrument"}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _build_operation(kind: str, payload: Any):
    """Validated operation object; invariant failures raise ValidationError."""
    if kind == "iso":
        return check_isometry(payload)
    if kind == "channel":
        return Channel(tuple(payload))
    if kind == "povm":
        return Povm(tuple(payload))
    return Instrument(tuple(tuple(b) for b in payload))


def _load(path: str, kind: str | None):
    try:
        obj = load_json(path)
        kind, payload = parse_operation(obj, kind)
    except OSError as exc:
        raise CliError(EXIT_SCHEMA, f"cannot read {path}: {exc.strerror}") from None
    except SchemaError as exc:
        raise CliError(EXIT_SCHEMA, str(exc)) from None
    try:
        return kind, _build_operation(kind, payload)
    except ValidationError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None


def _compile(kind: str, op, method: Method, simplify_output: bool) -> tuple[Circuit, Method]:
    if method is Method.STATEPREP and (kind != "iso" or isometry_dims(op)[0] != 0):
        raise CliError(EXIT_SCHEMA, "method STATEPREP needs a single-column isometry")
    if kind == "iso":
        circuit, report = synthesize(op, method, simplify_output)
        return circuit, report.method
    if kind == "channel":
        return compile_channel(op, method, simplify_output)
    if kind == "povm":
        return compile_povm(op, method, simplify_output)
    return compile_instrument(op, method, simplify_output)


def _residual(kind: str, op, circuit: Circuit) -> float:
    if kind == "iso":
        return phase_invariant_distance(circuit_isometry(circuit), op)
    if kind == "channel":
        return channel_residual(circuit, op)
    if kind == "povm":
        return povm_residual(circuit, op)
    return instrument_residual(circuit, op)


def _report(method: Method, circuit: Circuit, residual: float) -> dict:
    # on the ion gate set each XX stands in for one CNOT
    return {"method": method.name, "cnots": two_qubit_count(circuit),
            "rotations": rotation_count(circuit), "residual": residual}


def _render(circuit: Circuit, fmt: str, precision: int | None) -> str:
    if fmt == "qasm":
        return to_qasm(circuit).text
    if fmt == "latex":
        return to_latex(circuit, precision)
    return circuit_to_json(circuit, indent=1) + "\n"


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_compile(args) -> int:
    if args.target == "xx" and args.format == "qasm":
        raise CliError(EXIT_SCHEMA, "target xx cannot be written as QASM; use json or latex")
    kind, op = _load(args.input, _KIND_ALIASES[args.kind])
    method = Method[args.method.upper()]
    circuit, used = _compile(kind, op, method, not args.no_simplify)
    if args.target == "xx":
        circuit = cnot_to_xx_circuit(circuit)
    residual = _residual(kind, op, circuit)
    _write(_render(circuit, args.format, args.angle_precision), args.output)
    _emit_report(_report(used, circuit, residual))
    return EXIT_OK if residual <= args.tolerance else EXIT_RESIDUAL


def cmd_validate(args) -> int:
    kind = _KIND_ALIASES[args.kind] if args.kind else None
    try:
        kind, payload = parse_operation(load_json(args.input), kind)
    except OSError as exc:
        raise CliError(EXIT_SCHEMA, f"cannot read {args.input}: {exc.strerror}") from None
    except SchemaError as exc:
        raise CliError(EXIT_SCHEMA, str(exc)) from None
    report: dict[str, Any] = {"kind": kind}
    if kind == "iso":
        v = np.asarray(payload)
        report["defect"] = isometry_defect(v) if v.shape[1] <= v.shape[0] else float("inf")
    elif kind == "povm":
        report["defect"] = float(np.linalg.norm(sum(payload) - np.eye(payload[0].shape[0])))
    try:
        op = _build_operation(kind, payload)
    except ValidationError as exc:
        report.update(status="invalid", error=str(exc))
        _emit_report(report)
        return EXIT_INVARIANT
    if kind == "channel":
        report["kraus_rank"] = op.kraus_rank
    elif kind == "instrument":
        report["outcomes"] = op.outcomes
    report["status"] = "ok"
    _emit_report(report)
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    kind = _KIND_ALIASES[args.kind] if args.kind else None
    kind, op = _load(args.input, kind)
    method = Method[args.method.upper()]
    circuit, used = _compile(kind, op, method, not args.no_simplify)
    residual = _residual(kind, op, circuit)
    _emit_report(_report(used, circuit, residual))
    return EXIT_OK if residual <= args.tolerance else EXIT_RESIDUAL


def _load_circuit(path: str) -> Circuit:
    try:
        return circuit_from_dict(load_json(path))
    except OSError as exc:
        raise CliError(EXIT_SCHEMA, f"cannot read {path}: {exc.strerror}") from None
    except (SchemaError, CircuitError, KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_SCHEMA, f"bad circuit file: {exc}") from None


def cmd_convert(args) -> int:
    circuit = _load_circuit(args.input)
    try:
        out = cnot_to_xx_circuit(circuit) if args.direction == "to-xx" else xx_to_cnot_circuit(circuit)
    except CircuitError as exc:
        raise CliError(EXIT_SCHEMA, str(exc)) from None
    _write(circuit_to_json(out, indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_export(args) -> int:
    circuit = _load_circuit(args.input)
    try:
        text = _render(circuit, args.format, args.angle_precision)
    except CircuitError as exc:
        raise CliError(EXIT_SCHEMA, str(exc)) from None
    _write(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isosynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    methods = [m.value for m in Method]

    def synthesis_flags(q: argparse.ArgumentParser) -> None:
        q.add_argument("--method", choices=methods, default="auto")
        q.add_argument("--no-simplify", action="store_true")
        q.add_argument("--tolerance", type=float, default=1e-8)
        q.add_argument("--seed", type=int, default=0,
                       help="recorded for reproducibility; synthesis is deterministic")

    c = sub.add_parser("compile", help="synthesize a circuit for an operation file")
    c.add_argument("kind", choices=sorted(_KIND_ALIASES))
    c.add_argument("input")
    synthesis_flags(c)
    c.add_argument("--target", choices=["cnot", "xx"], default="cnot")
    c.add_argument("--format", choices=["json", "qasm", "latex"], default="json")
    c.add_argument("--angle-precision", type=int, default=None)
    c.add_argument("--output")
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("validate", help="check an operation file's invariants")
    v.add_argument("input")
    v.add_argument("--kind", choices=sorted(_KIND_ALIASES))
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("roundtrip", help="synthesize, simulate and print the residual")
    r.add_argument("input")
    r.add_argument("--kind", choices=sorted(_KIND_ALIASES))
    synthesis_flags(r)
    r.set_defaults(func=cmd_roundtrip)

    cv = sub.add_parser("convert", help="switch a circuit between CNOT and XX gate sets")
    cv.add_argument("direction", choices=["to-xx", "to-cnot"])
    cv.add_argument("input")
    cv.add_argument("--output")
    cv.set_defaults(func=cmd_convert)

    e = sub.add_parser("export", help="render a circuit JSON file")
    e.add_argument("format", choices=["qasm", "latex"])
    e.add_argument("input")
    e.add_argument("--angle-precision", type=int, default=None)
    e.add_argument("--output")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except QasmParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
