"""Plain-text circuit dump format.

Grammar (one statement per line, ``#`` starts a comment, blank lines ignored)::

    file      := header gate*
    header    := "width" INT
    gate      := KIND [params] qubit+
    params    := FLOAT ("," FLOAT)*      # only for kinds that take parameters
    qubit     := INT

``KIND`` is one of the :class:`~hhlflow.circuit.gates.GateKind` values
(case-insensitive).  RX/RY/RZ/Phase/CPhase take one angle, U3 takes three.
``Unitary`` takes the row-major matrix as interleaved ``re,im`` pairs, so a
k-qubit unitary carries ``2 * 4^k`` numbers.  Qubits are listed in gate order
(``qubits[0]`` is the matrix MSB).  Example::

    width 2
    H 0
    CX 0 1
    RZ 0.25 1
"""
from __future__ import annotations

import numpy as np

from .core import Circuit
from .gates import N_PARAMS, Gate, GateKind

_KINDS = {k.value.lower(): k for k in GateKind}


class CircuitParseError(ValueError):
    pass


def dumps(circuit: Circuit) -> str:
    lines = [f"width {circuit.width}"]
    for g in circuit.gates:
        parts = [g.kind.value]
        if g.kind is GateKind.UNITARY:
            flat = np.column_stack([g.matrix.real.ravel(), g.matrix.imag.ravel()]).ravel()
            parts.append(",".join(repr(float(v)) for v in flat))
        elif g.params:
            parts.append(",".join(repr(p) for p in g.params))
        parts.extend(str(q) for q in g.qubits)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    circuit = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if circuit is None:
            if tok[0].lower() != "width" or len(tok) != 2:
                raise CircuitParseError(f"line {lineno}: expected 'width N' header")
            circuit = Circuit(int(tok[1]))
            continue
        kind = _KINDS.get(tok[0].lower())
        if kind is None:
            raise CircuitParseError(f"line {lineno}: unknown gate kind {tok[0]!r}")
        try:
            if kind is GateKind.UNITARY:
                vals = [float(v) for v in tok[1].split(",")]
                qubits = [int(q) for q in tok[2:]]
                dim = 1 << len(qubits)
                if len(vals) != 2 * dim * dim:
                    raise CircuitParseError(
                        f"line {lineno}: Unitary on {len(qubits)} qubits needs {2 * dim * dim} numbers")
                arr = np.array(vals).reshape(dim * dim, 2)
                gate = Gate(kind, qubits, (), (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim))
            elif kind in N_PARAMS:
                params = [float(v) for v in tok[1].split(",")]
                gate = Gate(kind, [int(q) for q in tok[2:]], params)
            else:
                gate = Gate(kind, [int(q) for q in tok[1:]])
            circuit.append(gate)
        except CircuitParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from exc
    if circuit is None:
        raise CircuitParseError("empty circuit file")
    return circuit


def load(path) -> Circuit:
    with open(path) as fh:
        return loads(fh.read())


def dump(circuit: Circuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(circuit))
