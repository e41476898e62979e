"""Stabilizer tableau simulation, used as the noiseless oracle.

Standard destabilizer/stabilizer tableau with sign tracking.  This is the
slow-but-trusted reference against which the bit-level Pauli-frame machinery
is checked: it validates that synthesized circuits prepare their target
state, that flag measurements are deterministic, and (with injected Pauli
faults) that frame propagation predicts measurement flips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CXGate, FinalMeasure, FlagMeasure, Init
from .css import CssState
from .pauli import PauliOperator


class Tableau:
    """Aaronson-Gottesman tableau over ``n`` qubits, all starting in |0>."""

    def __init__(self, n: int) -> None:
        self.n = n
        self.x = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.z = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.r = np.zeros(2 * n + 1, dtype=np.uint8)
        for i in range(n):
            self.x[i, i] = 1  # destabilizers X_i
            self.z[n + i, i] = 1  # stabilizers Z_i

    # -- gates ---------------------------------------------------------------

    def h(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def cx(self, a: int, b: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1)
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def apply_pauli(self, x_mask: int, z_mask: int) -> None:
        """Apply a Pauli error: stabilizer signs flip on anticommutation."""
        for q in range(self.n):
            if (x_mask >> q) & 1:
                self.r ^= self.z[:, q]
            if (z_mask >> q) & 1:
                self.r ^= self.x[:, q]

    # -- internals -------------------------------------------------------------

    def _rowsum(self, h: int, i: int) -> None:
        x1, z1 = self.x[i], self.z[i]
        x2, z2 = self.x[h], self.z[h]
        g = np.zeros(self.n, dtype=np.int64)
        both = (x1 == 1) & (z1 == 1)
        xonly = (x1 == 1) & (z1 == 0)
        zonly = (x1 == 0) & (z1 == 1)
        g[both] = z2[both].astype(np.int64) - x2[both].astype(np.int64)
        g[xonly] = z2[xonly].astype(np.int64) * (2 * x2[xonly].astype(np.int64) - 1)
        g[zonly] = x2[zonly].astype(np.int64) * (1 - 2 * z2[zonly].astype(np.int64))
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g.sum())
        self.r[h] = (total % 4) // 2
        self.x[h] ^= x1
        self.z[h] ^= z1

    # -- measurements ----------------------------------------------------------

    def measure_z(self, q: int, rng: np.random.Generator | None = None) -> tuple[int, bool]:
        """Measure Z on qubit q.  Returns (outcome bit, deterministic)."""
        n = self.n
        p = -1
        for i in range(n, 2 * n):
            if self.x[i, q]:
                p = i
                break
        if p >= 0:
            for i in range(2 * n):
                if i != p and self.x[i, q]:
                    self._rowsum(i, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            outcome = int(rng.integers(0, 2)) if rng is not None else 0
            self.r[p] = outcome
            return outcome, False
        scratch = 2 * n
        self.x[scratch] = 0
        self.z[scratch] = 0
        self.r[scratch] = 0
        for i in range(n):
            if self.x[i, q]:
                self._rowsum(scratch, i + n)
        return int(self.r[scratch]), True

    def measure_x(self, q: int, rng: np.random.Generator | None = None) -> tuple[int, bool]:
        self.h(q)
        out = self.measure_z(q, rng)
        self.h(q)
        return out

    def stabilizer_sign(self, op: PauliOperator) -> int | None:
        """Sign with which ``op`` stabilizes the state: 0 for +, 1 for -, or
        None when ``op`` is not in the stabilizer group at all."""
        n = self.n
        scratch = 2 * n
        self.x[scratch] = 0
        self.z[scratch] = 0
        self.r[scratch] = 0
        for i in range(n):
            # op anticommutes with destabilizer i  <=>  stabilizer i appears.
            x_row, z_row = self.x[i], self.z[i]
            anti = 0
            for q in range(n):
                if x_row[q] and (op.z >> q) & 1:
                    anti ^= 1
                if z_row[q] and (op.x >> q) & 1:
                    anti ^= 1
            if anti:
                self._rowsum(scratch, i + n)
        for q in range(n):
            if self.x[scratch, q] != (op.x >> q) & 1 or self.z[scratch, q] != (op.z >> q) & 1:
                return None
        return int(self.r[scratch])


@dataclass(frozen=True)
class TableauMismatch:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


def run_tableau(
    circuit: Circuit,
    faults: list[tuple[int, int, int]] | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Tableau, list[int], list[bool]]:
    """Run a circuit on a tableau, optionally injecting Pauli faults.

    ``faults`` is a list of ``(op_position, x_mask, z_mask)`` triples: after
    executing the op at that position the Pauli is applied (position -1 means
    before the first op).  Returns the final tableau, flag outcomes, and
    per-flag determinism.
    """
    tab = Tableau(circuit.n_qubits)
    n_outcomes = circuit.flag_count
    outcomes = [0] * n_outcomes
    deterministic = [True] * n_outcomes
    by_pos: dict[int, list[tuple[int, int]]] = {}
    for pos, xm, zm in faults or []:
        by_pos.setdefault(pos, []).append((xm, zm))
    for xm, zm in by_pos.get(-1, []):
        tab.apply_pauli(xm, zm)
    for pos, op in enumerate(circuit.ops):
        if isinstance(op, Init):
            if op.basis == "+":
                tab.h(op.qubit)
        elif isinstance(op, CXGate):
            tab.cx(op.control, op.target)
        elif isinstance(op, FlagMeasure):
            if op.basis == "Z":
                out, det = tab.measure_z(op.qubit, rng)
            else:
                out, det = tab.measure_x(op.qubit, rng)
            outcomes[op.outcome] = out
            deterministic[op.outcome] = det
        elif isinstance(op, FinalMeasure):
            pass
        for xm, zm in by_pos.get(pos, []):
            tab.apply_pauli(xm, zm)
    return tab, outcomes, deterministic


def tableau_check_circuit(circuit: Circuit, state: CssState) -> TableauMismatch | None:
    """Noiseless oracle: the circuit must prepare ``state`` exactly.

    Checks that every flag measurement is deterministically +1 and that the
    post-measurement state is stabilized (with + sign) by every generator of
    the CSS state, including the state-stabilizing logicals.  Returns None
    when everything holds, otherwise the first mismatch.
    """
    tab, outcomes, deterministic = run_tableau(circuit)
    for meas in circuit.flag_measurements():
        if not deterministic[meas.outcome]:
            return TableauMismatch("nondeterministic-flag", f"flag outcome {meas.outcome}")
        if outcomes[meas.outcome] != 0:
            return TableauMismatch("flag-sign", f"flag outcome {meas.outcome} is -1")
    # Lift code-qubit operators to circuit qubits.
    lift = {}
    for q in range(circuit.n_qubits):
        ci = circuit.code_index[q]
        if ci is not None:
            lift[ci] = q
    generators = state.x_type_state_generators() + state.z_type_state_generators()
    for gen in generators:
        x_mask = z_mask = 0
        for ci, q in lift.items():
            if (gen.x >> ci) & 1:
                x_mask |= 1 << q
            if (gen.z >> ci) & 1:
                z_mask |= 1 << q
        sign = tab.stabilizer_sign(PauliOperator(circuit.n_qubits, x_mask, z_mask))
        if sign is None:
            return TableauMismatch("unsatisfied-stabilizer", gen.to_string())
        if sign != 0:
            return TableauMismatch("stabilizer-sign", gen.to_string())
    return None
