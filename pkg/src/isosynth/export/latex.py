"""Qcircuit LaTeX rendering, one gate per column."""
from __future__ import annotations

import math

from ..circuit import CNot, Circuit, Gate, Measure, RGate, Rotation, TraceOut, XXGate

_SYMBOLIC_TOL = 1e-12


def latex_angle(x: float, precision: int) -> str:
    k = round(x / (math.pi / 4))
    if abs(x - k * math.pi / 4) <= _SYMBOLIC_TOL:
        if k == 0:
            return "0"
        g = math.gcd(abs(k), 4)
        num, den = abs(k) // g, 4 // g
        sign = "-" if k < 0 else ""
        top = "\\pi" if num == 1 else f"{num}\\pi"
        return f"{sign}{top}" if den == 1 else f"{sign}\\frac{{{top}}}{{{den}}}"
    return f"{x:.{precision}f}"


def _label(g: Gate, precision: int | None) -> str:
    if isinstance(g, Rotation):
        name = f"R_{g.axis}"
        return name if precision is None else f"{name}({latex_angle(g.angle, precision)})"
    if isinstance(g, RGate):
        if precision is None:
            return "R"
        return f"R({latex_angle(g.theta, precision)}, {latex_angle(g.phi, precision)})"
    assert isinstance(g, XXGate)
    return "XX" if precision is None else f"XX({latex_angle(g.phi, precision)})"


def to_latex(c: Circuit, angle_precision: int | None = None) -> str:
    """Qcircuit source; angles are omitted when angle_precision is None."""
    n = c.num_qubits
    rows: list[list[str]] = [[] for _ in range(n)]
    # wire state: quantum, classical after a measurement, or ended
    state = ["q"] * n
    idle = {"q": r"\qw", "c": r"\cw", "end": ""}
    for g in c.gates:
        cells = {}
        if isinstance(g, (Rotation, RGate)):
            cells[g.target] = rf"\gate{{{_label(g, angle_precision)}}}"
        elif isinstance(g, CNot):
            cells[g.control] = rf"\ctrl{{{g.target - g.control}}}"
            cells[g.target] = r"\targ"
        elif isinstance(g, XXGate):
            a, b = g.qubit_a, g.qubit_b
            cells[a] = rf"\gate{{{_label(g, angle_precision)}}} \qwx[{b - a}]"
            cells[b] = rf"\gate{{{_label(g, angle_precision)}}}"
        elif isinstance(g, (Measure, TraceOut)):
            cells[g.target] = r"\meter"
        for w in range(n):
            rows[w].append(cells.get(w, idle[state[w]]))
        if isinstance(g, Measure):
            state[g.target] = "c"
        elif isinstance(g, TraceOut):
            state[g.target] = "end"
    for w in range(n):
        rows[w].append(idle[state[w]])
    starts = [r"\lstick{\ket{0}}" if w in c.ancilla_qubits else "" for w in range(n)]
    body = " \\\\\n".join(" & ".join([s] + r) for s, r in zip(starts, rows))
    return "\\Qcircuit @C=1em @R=.7em {\n" + body + "\n}\n"
