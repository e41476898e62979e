"""Time-ordered circuit model for preparation circuits and gadgets.

Qubits are integer-indexed with a role each: ``control``/``target`` for code
qubits (the two sides of the bipartite preparation graph) and
``flag_x``/``flag_z`` for gadget flags.  Operations appear in time order;
every qubit is initialized exactly once before its first gate, flags are
measured exactly once after their last gate, and code qubits are only read
by the final transversal measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


ROLE_CONTROL = "control"
ROLE_TARGET = "target"
ROLE_FLAG_X = "flag_x"
ROLE_FLAG_Z = "flag_z"


@dataclass(frozen=True)
class Init:
    qubit: int
    basis: str  # "0" or "+"


@dataclass(frozen=True)
class CXGate:
    control: int
    target: int


@dataclass(frozen=True)
class FlagMeasure:
    qubit: int
    basis: str  # "Z" or "X"
    outcome: int  # index into the circuit's flag-outcome vector


@dataclass(frozen=True)
class FinalMeasure:
    basis: str  # "Z" or "X"


Operation = Init | CXGate | FlagMeasure | FinalMeasure


@dataclass(frozen=True)
class Circuit:
    """An executable preparation circuit."""

    n_qubits: int
    roles: tuple[str, ...]
    names: tuple[str, ...]
    code_index: tuple[int | None, ...]  # circuit qubit -> code qubit, None for flags
    ops: tuple[Operation, ...]

    def __post_init__(self) -> None:
        if len(self.roles) != self.n_qubits or len(self.names) != self.n_qubits:
            raise ValueError("role/name lists must match the qubit count")

    @property
    def cx_count(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, CXGate))

    @property
    def flag_count(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, FlagMeasure))

    @property
    def code_qubits(self) -> list[int]:
        return [q for q in range(self.n_qubits) if self.code_index[q] is not None]

    @property
    def n_code(self) -> int:
        return sum(1 for c in self.code_index if c is not None)

    def cx_gates(self) -> list[CXGate]:
        return [op for op in self.ops if isinstance(op, CXGate)]

    def flag_measurements(self) -> list[FlagMeasure]:
        return [op for op in self.ops if isinstance(op, FlagMeasure)]

    def with_ops(self, ops: list[Operation]) -> Circuit:
        return replace(self, ops=tuple(ops))

    def code_mask(self, circuit_mask: int) -> int:
        """Project a circuit-qubit bitmask down to code-qubit bits."""
        out = 0
        for q in range(self.n_qubits):
            if (circuit_mask >> q) & 1:
                ci = self.code_index[q]
                if ci is not None:
                    out |= 1 << ci
        return out

    def validate(self) -> None:
        """Raise ValueError if the op sequence breaks the circuit invariants."""
        inited: set[int] = set()
        measured: set[int] = set()
        for op in self.ops:
            if isinstance(op, Init):
                if op.qubit in inited:
                    raise ValueError(f"qubit {op.qubit} initialized twice")
                inited.add(op.qubit)
            elif isinstance(op, CXGate):
                for q in (op.control, op.target):
                    if q not in inited:
                        raise ValueError(f"qubit {q} used before initialization")
                    if q in measured:
                        raise ValueError(f"qubit {q} used after measurement")
            elif isinstance(op, FlagMeasure):
                if op.qubit in measured:
                    raise ValueError(f"flag {op.qubit} measured twice")
                if self.code_index[op.qubit] is not None:
                    raise ValueError("code qubits may only be measured transversally")
                measured.add(op.qubit)
        for q in range(self.n_qubits):
            if q not in inited:
                raise ValueError(f"qubit {q} never initialized")
            if self.code_index[q] is None and q not in measured:
                raise ValueError(f"flag {q} never measured")


def make_circuit(
    roles: list[str],
    code_index: list[int | None],
    ops: list[Operation],
    names: list[str] | None = None,
) -> Circuit:
    """Assemble a Circuit, deriving role-prefixed names when not given."""
    if names is None:
        names = []
        counters = {ROLE_CONTROL: 0, ROLE_TARGET: 0, "flag": 0}
        for role, ci in zip(roles, code_index):
            if role in (ROLE_CONTROL, ROLE_TARGET):
                prefix = "c" if role == ROLE_CONTROL else "t"
                names.append(f"{prefix}{ci}")
            else:
                names.append(f"f{counters['flag']}")
                counters["flag"] += 1
    return Circuit(len(roles), tuple(roles), tuple(names), tuple(code_index), tuple(ops))
