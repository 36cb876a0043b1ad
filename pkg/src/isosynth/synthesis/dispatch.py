"""Method selection: best-of-all candidates, or a fixed choice by dimensions."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..circuit import Circuit, circuit_isometry, cnot_count, rotation_count
from ..numerics import check_isometry
from ..simplify import simplify
from ..verify import phase_invariant_distance
from .isometry import householder, isometry_dims, knill, qsd_isometry, state_prep_schmidt


class Method(enum.Enum):
    QSD = "qsd"
    KNILL = "knill"
    HOUSEHOLDER = "householder"
    STATEPREP = "stateprep"
    AUTO = "auto"
    GENERIC = "generic"


@dataclass(frozen=True)
class SynthesisReport:
    method: Method
    cnots: int
    rotations: int
    residual: float

    def to_dict(self) -> dict:
        return {"method": self.method.name, "cnots": self.cnots,
                "rotations": self.rotations, "residual": self.residual}


def _state_prep(v: np.ndarray) -> Circuit:
    return state_prep_schmidt(v)


BUILDERS: dict[Method, Callable[[np.ndarray], Circuit]] = {
    Method.QSD: qsd_isometry,
    Method.KNILL: knill,
    Method.HOUSEHOLDER: householder,
    Method.STATEPREP: _state_prep,
}

# tie-break order for equal CNOT counts
ORDER = (Method.QSD, Method.KNILL, Method.HOUSEHOLDER, Method.STATEPREP)


def report_for(circuit: Circuit, v: np.ndarray, method: Method) -> SynthesisReport:
    residual = phase_invariant_distance(circuit_isometry(circuit), v)
    return SynthesisReport(method, cnot_count(circuit), rotation_count(circuit), residual)


def _build(v: np.ndarray, method: Method, simplify_output: bool) -> Circuit:
    m, _ = isometry_dims(v)
    if method is Method.STATEPREP and m != 0:
        raise ValueError("state preparation needs a single-column input (m = 0)")
    circuit = BUILDERS[method](v)
    return simplify(circuit) if simplify_output else circuit


def run_method(v, method: Method, simplify_output: bool = True) -> tuple[Circuit, SynthesisReport]:
    """Synthesize with one named method."""
    v = check_isometry(v)
    circuit = _build(v, method, simplify_output)
    return circuit, report_for(circuit, v, method)


def candidate_methods(v: np.ndarray) -> list[Method]:
    m, _ = isometry_dims(v)
    return [meth for meth in ORDER if meth is not Method.STATEPREP or m == 0]


def dec_isometry(v, simplify_output: bool = True) -> tuple[Circuit, SynthesisReport]:
    """Run every applicable method and keep the circuit with fewest CNOTs."""
    v = check_isometry(v)
    best: tuple[Circuit, Method] | None = None
    errors = []
    for method in candidate_methods(v):
        try:
            circuit = _build(v, method, simplify_output)
        except ValueError as exc:
            errors.append(exc)
            continue
        if best is None or cnot_count(circuit) < cnot_count(best[0]):
            best = (circuit, method)
    if best is None:
        raise errors[0]
    return best[0], report_for(best[0], v, best[1])


def generic_method(m: int, n: int) -> Method:
    """Method that is cheapest for a generic isometry of the given shape."""
    if m == 0:
        return Method.STATEPREP
    if m >= n - 1:
        return Method.QSD
    return Method.HOUSEHOLDER


def dec_isometry_generic(v, simplify_output: bool = True) -> tuple[Circuit, SynthesisReport]:
    v = check_isometry(v)
    m, n = isometry_dims(v)
    return run_method(v, generic_method(m, n), simplify_output)


def synthesize(v, method: Method = Method.AUTO, simplify_output: bool = True
               ) -> tuple[Circuit, SynthesisReport]:
    """Single entry point covering the named methods and both selectors."""
    if method is Method.AUTO:
        return dec_isometry(v, simplify_output)
    if method is Method.GENERIC:
        return dec_isometry_generic(v, simplify_output)
    return run_method(v, method, simplify_output)
