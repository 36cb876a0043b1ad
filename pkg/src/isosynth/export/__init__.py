"""Text exporters: OpenQASM 2.0 and Qcircuit LaTeX."""
from .latex import to_latex
from .qasm import QasmDocument, QasmParseError, from_qasm, to_qasm

__all__ = ["QasmDocument", "QasmParseError", "from_qasm", "to_latex", "to_qasm"]
