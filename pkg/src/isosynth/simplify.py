"""Single right-to-left rewrite pass over rotation/CNOT circuits.

Rotations on each wire are buffered while walking from the end of the circuit.
At a CNOT the buffers are merged: three or more rotations are re-expanded as
ZYZ on a control wire and XYX on a target wire, so the earliest factor (Rz on
the control, Rx on the target) commutes through the CNOT and keeps merging
further left. Before that, the CNOT is checked for an identical partner to
its right that can be reached across commuting gates, in which case both go.
"""
from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .circuit import CNot, Circuit, Gate, Rotation, RotX, RotY, RotZ, gate_matrix
from .numerics import euler_angles

ZERO_TOL = 1e-10


class SideHint(enum.Enum):
    CONTROL = "control"
    TARGET = "target"
    NONE = "none"


_HINT_AXIS = {SideHint.CONTROL: "z", SideHint.TARGET: "x", SideHint.NONE: None}


def is_zero_rotation(g: Rotation, tol: float = ZERO_TOL) -> bool:
    """True when the rotation is the identity up to phase (angle = 0 mod 2pi)."""
    return abs(math.remainder(g.angle, 2 * math.pi)) <= tol


def _coalesce(gates: Sequence[Rotation]) -> list[Rotation]:
    out: list[Rotation] = []
    for g in gates:
        if out and out[-1].axis == g.axis:
            g = g.with_angle(out.pop().angle + g.angle)
        if not is_zero_rotation(g):
            out.append(g)
    return out


def merge_single_qubit_run(gates: Sequence[Rotation], side_hint: SideHint = SideHint.NONE
                           ) -> tuple[list[Rotation], bool]:
    """Merge a run of rotations on one wire.

    Returns the merged rotations in time order (at most three) and whether the
    first of them is on the hint axis and may be commuted past the adjacent
    CNOT.
    """
    run = _coalesce(gates)
    if len(run) >= 3:
        target = run[0].target
        u = np.eye(2, dtype=complex)
        for g in run:
            u = gate_matrix(g) @ u
        axes = "XYX" if side_hint is SideHint.TARGET else "ZYZ"
        _, beta, gamma, delta = euler_angles(u, axes)
        outer = RotX if axes == "XYX" else RotZ
        run = [r for r in (outer(delta, target), RotY(gamma, target), outer(beta, target))
               if not is_zero_rotation(r)]
    axis = _HINT_AXIS[side_hint]
    leading = bool(run) and axis is not None and run[0].axis == axis
    return run, leading


def _commutes_with_cnot(g: Gate, cx: CNot) -> bool:
    if isinstance(g, Rotation):
        if g.target == cx.control:
            return g.axis == "z"
        if g.target == cx.target:
            return g.axis == "x"
        return True
    if isinstance(g, CNot):
        return g.control != cx.target and g.target != cx.control
    return not set(g.qubits) & {cx.control, cx.target}


def simplify(c: Circuit) -> Circuit:
    """Merge rotations, commute them through CNOTs and cancel CNOT pairs."""
    n = c.num_qubits
    pending: list[list[Rotation]] = [[] for _ in range(n)]
    out: list[Gate] = []  # reverse time order

    def flush(wire: int, hint: SideHint) -> None:
        if not pending[wire]:
            return
        run, leading = merge_single_qubit_run(pending[wire], hint)
        keep = run[:1] if leading else []
        out.extend(reversed(run[1:] if leading else run))
        pending[wire] = keep

    def reclaim(wire: int) -> None:
        j = len(out) - 1
        taken: list[Rotation] = []
        while j >= 0:
            h = out[j]
            if wire in h.qubits:
                if not isinstance(h, Rotation):
                    break
                taken.append(h)
                del out[j]
            j -= 1
        pending[wire] = pending[wire] + taken

    for g in reversed(c.gates):
        if isinstance(g, Rotation):
            pending[g.target].insert(0, g)
            continue
        if isinstance(g, CNot):
            if (all(r.axis == "z" for r in pending[g.control])
                    and all(r.axis == "x" for r in pending[g.target])):
                partner = None
                for j in range(len(out) - 1, -1, -1):
                    if out[j] == g:
                        partner = j
                        break
                    if not _commutes_with_cnot(out[j], g):
                        break
                if partner is not None:
                    del out[partner]
                    # rotations on both sides of the removed pair are now
                    # adjacent; hand them back to the buffers to be merged
                    reclaim(g.control)
                    reclaim(g.target)
                    continue
            flush(g.control, SideHint.CONTROL)
            flush(g.target, SideHint.TARGET)
            out.append(g)
            continue
        # measurements, trace-outs and ion gates act as barriers on their wires
        for q in g.qubits:
            flush(q, SideHint.NONE)
        out.append(g)

    for q in range(n):
        flush(q, SideHint.NONE)
    return c.with_gates(reversed(out))
