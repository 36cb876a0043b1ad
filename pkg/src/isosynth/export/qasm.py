"""OpenQASM 2.0 emitter and a parser for the subset it produces.

Rotations here are exp(+i theta sigma / 2) while qelib1 uses exp(-i theta sigma / 2),
so every angle changes sign on the way out and back in. Wire i maps to
register index n - 1 - i.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass

from ..circuit import (CNot, Circuit, CircuitError, Gate, Measure, RGate, Rotation, RotX, RotY,
                       RotZ, TraceOut, XXGate)

HEADER = ('OPENQASM 2.0;', 'include "qelib1.inc";')
GATE_SUBSET = frozenset({"rx", "ry", "rz", "cx", "measure", "barrier"})
_SYMBOLIC_TOL = 1e-12
_TRACE_MARK = "// trace out"


@dataclass(frozen=True)
class QasmDocument:
    text: str
    num_qubits: int

    def register_index(self, wire: int) -> int:
        return self.num_qubits - 1 - wire


class QasmParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def format_angle(x: float) -> str:
    """Symbolic for multiples of pi/4, otherwise 17 significant digits."""
    k = round(x / (math.pi / 4))
    if abs(x - k * math.pi / 4) <= _SYMBOLIC_TOL:
        if k == 0:
            return "0"
        g = math.gcd(abs(k), 4)
        num, den = k // g, 4 // g
        sign = "-" if num < 0 else ""
        num = abs(num)
        head = "pi" if num == 1 else f"{num}*pi"
        return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"
    return f"{x:.17g}"


def _emit(g: Gate, n: int) -> str:
    def q(w: int) -> str:
        return f"q[{n - 1 - w}]"

    if isinstance(g, Rotation):
        return f"r{g.axis}({format_angle(-g.angle)}) {q(g.target)};"
    if isinstance(g, CNot):
        return f"cx {q(g.control)},{q(g.target)};"
    if isinstance(g, Measure):
        return f"measure {q(g.target)} -> c[{g.classical_bit}];"
    if isinstance(g, TraceOut):
        # no QASM counterpart; a barrier keeps later tools from touching it
        return f"barrier {q(g.target)}; {_TRACE_MARK} {q(g.target)}"
    raise CircuitError(f"{type(g).__name__} has no QASM form")


def to_qasm(c: Circuit) -> QasmDocument:
    if any(isinstance(g, (RGate, XXGate)) for g in c.gates):
        raise CircuitError("circuit uses ion gates; convert gate set first")
    n = c.num_qubits
    bits = [g.classical_bit for g in c.gates if isinstance(g, Measure)]
    lines = list(HEADER)
    lines.append(f"qreg q[{n}];")
    if bits:
        lines.append(f"creg c[{max(bits) + 1}];")
    lines.extend(_emit(g, n) for g in c.gates)
    return QasmDocument("\n".join(lines) + "\n", n)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
          "ln": math.log, "sqrt": math.sqrt}


def _eval_expr(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1):
        return _FUNCS[node.func.id](_eval_expr(node.args[0]))
    raise ValueError("unsupported expression")


def parse_angle(text: str) -> float:
    return _eval_expr(ast.parse(text.replace("^", "**"), mode="eval"))


_QREG = re.compile(r"qreg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_CREG = re.compile(r"creg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_ARG = re.compile(r"(\w+)\s*\[\s*(\d+)\s*\]$")
_GATE = re.compile(r"(\w+)\s*(?:\((.*)\))?\s+(.+)$")
_MEASURE = re.compile(r"measure\s+(.+?)\s*->\s*(.+)$")


def _u3(theta: float, phi: float, lam: float, w: int) -> list[Gate]:
    # u3 = rz(phi) ry(theta) rz(lam) up to phase
    return [RotZ(-lam, w), RotY(-theta, w), RotZ(-phi, w)]


def from_qasm(text: str) -> Circuit:
    """Parse the OpenQASM 2.0 subset written by to_qasm (plus u1/u2/u3)."""
    qreg: tuple[str, int] | None = None
    creg: tuple[str, int] | None = None
    gates: list[Gate] = []
    saw_header = False

    def wire(token: str, line: int, col: int) -> int:
        m = _ARG.match(token.strip())
        if qreg is None:
            raise QasmParseError("gate before qreg declaration", line, col)
        if not m or m.group(1) != qreg[0]:
            raise QasmParseError(f"expected {qreg[0]}[k], got {token.strip()!r}", line, col)
        k = int(m.group(2))
        if k >= qreg[1]:
            raise QasmParseError(f"qubit index {k} out of range", line, col)
        return qreg[1] - 1 - k

    for lineno, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("//")
        stripped = code.strip()
        if not stripped:
            continue
        col = raw.index(stripped) + 1
        statements = [s.strip() for s in stripped.split(";")]
        if statements[-1]:
            raise QasmParseError("missing ';'", lineno, col + len(stripped))
        for stmt in statements[:-1]:
            if not saw_header:
                if not re.fullmatch(r"OPENQASM\s+2(\.0)?", stmt):
                    raise QasmParseError("expected 'OPENQASM 2.0;' header", lineno, col)
                saw_header = True
                continue
            if stmt.startswith("include"):
                continue
            if m := _QREG.match(stmt):
                if qreg is not None:
                    raise QasmParseError("only one qreg is supported", lineno, col)
                qreg = (m.group(1), int(m.group(2)))
                continue
            if m := _CREG.match(stmt):
                creg = (m.group(1), int(m.group(2)))
                continue
            if m := _MEASURE.match(stmt):
                target = wire(m.group(1), lineno, col)
                cm = _ARG.match(m.group(2).strip())
                if creg is None or not cm or cm.group(1) != creg[0]:
                    raise QasmParseError("measure must write into the declared creg", lineno, col)
                gates.append(Measure(target, int(cm.group(2))))
                continue
            if stmt.startswith("barrier"):
                targets = [wire(t, lineno, col) for t in stmt[len("barrier"):].split(",")]
                if comment.strip().startswith(_TRACE_MARK[3:]):
                    gates.extend(TraceOut(t) for t in targets)
                continue
            m = _GATE.match(stmt)
            if not m:
                raise QasmParseError(f"cannot parse {stmt!r}", lineno, col)
            name, params, args = m.group(1), m.group(2), m.group(3)
            try:
                values = [parse_angle(p) for p in params.split(",")] if params else []
            except (ValueError, SyntaxError, ZeroDivisionError):
                raise QasmParseError(f"bad parameter list {params!r}", lineno, col) from None
            wires = [wire(a, lineno, col) for a in args.split(",")]
            arity = {"rx": (1, 1), "ry": (1, 1), "rz": (1, 1), "u1": (1, 1),
                     "u2": (2, 1), "u3": (3, 1), "u": (3, 1), "cx": (0, 2)}
            if name not in arity:
                raise QasmParseError(f"unsupported gate {name!r}", lineno, col)
            if (len(values), len(wires)) != arity[name]:
                raise QasmParseError(f"wrong number of arguments for {name}", lineno, col)
            try:
                if name == "cx":
                    gates.append(CNot(wires[0], wires[1]))
                elif name in ("rx", "ry", "rz"):
                    cls = {"rx": RotX, "ry": RotY, "rz": RotZ}[name]
                    gates.append(cls(-values[0], wires[0]))
                elif name == "u1":
                    gates.append(RotZ(-values[0], wires[0]))
                elif name == "u2":
                    gates.extend(_u3(math.pi / 2, values[0], values[1], wires[0]))
                else:
                    gates.extend(_u3(*values, wires[0]))
            except CircuitError as exc:
                raise QasmParseError(str(exc), lineno, col) from None
    if not saw_header:
        raise QasmParseError("missing OPENQASM header", 1)
    if qreg is None:
        raise QasmParseError("missing qreg declaration", 1)
    try:
        return Circuit(qreg[1], tuple(gates))
    except CircuitError as exc:
        raise QasmParseError(str(exc), 1) from None
