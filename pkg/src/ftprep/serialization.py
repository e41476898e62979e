"""Text formats for circuits and gadgets, plus LUT and outcome files.

Circuits and gadgets serialize to line-based text with one operation per
line in time order; parse(serialize(x)) reproduces x exactly.  Look-up
tables are JSON; outcome streams persist as compressed numpy archives with
a CSV export path.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .circuit import (
    ROLE_CONTROL,
    ROLE_FLAG_X,
    ROLE_FLAG_Z,
    ROLE_TARGET,
    Circuit,
    CXGate,
    FinalMeasure,
    FlagMeasure,
    Init,
)
from .decoder import MLTable, MWTable
from .gadgets import FlagGadget
from .noise import SampleSet


class ParseError(ValueError):
    """A circuit or gadget file is malformed."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# -- circuits ----------------------------------------------------------------


def serialize_circuit(circuit: Circuit, code: str = "?", state_label: str = "?") -> str:
    lines = [f"CIRCUIT code={code} state={state_label}"]
    for op in circuit.ops:
        if isinstance(op, Init):
            opcode = "INIT+" if op.basis == "+" else "INIT0"
            lines.append(f"{opcode} {circuit.names[op.qubit]}")
        elif isinstance(op, CXGate):
            lines.append(f"CX {circuit.names[op.control]} {circuit.names[op.target]}")
        elif isinstance(op, FlagMeasure):
            opcode = "MZ" if op.basis == "Z" else "MX"
            lines.append(f"{opcode} {circuit.names[op.qubit]} -> m{op.outcome}")
        elif isinstance(op, FinalMeasure):
            lines.append(f"FINAL_MEAS {op.basis}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> tuple[Circuit, str, str]:
    """Parse circuit text; returns (circuit, code name, state label)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("CIRCUIT"):
        raise ParseError(1, "expected a CIRCUIT header")
    header = dict(
        part.split("=", 1) for part in lines[0].split()[1:] if "=" in part
    )
    names: dict[str, int] = {}
    roles: list[str] = []
    code_index: list[int | None] = []
    ops = []

    def qubit(token: str, line_no: int) -> int:
        if token in names:
            return names[token]
        idx = len(roles)
        names[token] = idx
        if token.startswith("c"):
            roles.append(ROLE_CONTROL)
            code_index.append(int(token[1:]))
        elif token.startswith("t"):
            roles.append(ROLE_TARGET)
            code_index.append(int(token[1:]))
        elif token.startswith("f"):
            roles.append(ROLE_FLAG_X)  # refined when measured
            code_index.append(None)
        else:
            raise ParseError(line_no, f"unknown qubit name {token!r}")
        return idx

    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        opcode = parts[0]
        if opcode in ("INIT+", "INIT0"):
            if len(parts) != 2:
                raise ParseError(line_no, f"{opcode} takes one qubit")
            ops.append(Init(qubit(parts[1], line_no), "+" if opcode == "INIT+" else "0"))
        elif opcode == "CX":
            if len(parts) != 3:
                raise ParseError(line_no, "CX takes two qubits")
            ops.append(CXGate(qubit(parts[1], line_no), qubit(parts[2], line_no)))
        elif opcode in ("MZ", "MX"):
            if len(parts) != 4 or parts[2] != "->" or not parts[3].startswith("m"):
                raise ParseError(line_no, f"{opcode} syntax: {opcode} <q> -> m<i>")
            q = qubit(parts[1], line_no)
            outcome = int(parts[3][1:])
            basis = "Z" if opcode == "MZ" else "X"
            roles[q] = ROLE_FLAG_X if basis == "Z" else ROLE_FLAG_Z
            ops.append(FlagMeasure(q, basis, outcome))
        elif opcode == "FINAL_MEAS":
            if len(parts) != 2:
                raise ParseError(line_no, "FINAL_MEAS takes a basis")
            ops.append(FinalMeasure(parts[1]))
        else:
            raise ParseError(line_no, f"unknown opcode {opcode!r}")
    name_list = [None] * len(roles)
    for token, idx in names.items():
        name_list[idx] = token
    circuit = Circuit(len(roles), tuple(roles), tuple(name_list), tuple(code_index), tuple(ops))
    return circuit, header.get("code", "?"), header.get("state", "?")


# -- gadgets -----------------------------------------------------------------


def _gadget_qubit_name(label: int, r: int) -> str:
    if label == 0:
        return "c"
    if label <= r:
        return f"t{label}"
    return f"f{label - r}"


def serialize_gadget(gadget: FlagGadget, m_input: int | None = None) -> str:
    m = m_input if m_input is not None else gadget.m
    lines = [f"GADGET t={gadget.t} r={gadget.r} m={m} type={gadget.detect_type}"]
    basis = gadget.flag_init_basis
    for f in gadget.flag_labels:
        opcode = "INIT+" if basis == "+" else "INIT0"
        lines.append(f"{opcode} {_gadget_qubit_name(f, gadget.r)}")
    for a, b in gadget.gates:
        lines.append(f"CX {_gadget_qubit_name(a, gadget.r)} {_gadget_qubit_name(b, gadget.r)}")
    meas = "MZ" if gadget.flag_meas_basis == "Z" else "MX"
    for i, f in enumerate(gadget.flag_labels):
        lines.append(f"{meas} {_gadget_qubit_name(f, gadget.r)} -> m{i}")
    return "\n".join(lines) + "\n"


def parse_gadget(text: str) -> FlagGadget:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("GADGET"):
        raise ParseError(1, "expected a GADGET header")
    header = dict(part.split("=", 1) for part in lines[0].split()[1:] if "=" in part)
    t = int(header["t"])
    r = int(header["r"])
    m = int(header["m"])
    detect = header.get("type", "X")

    def label(token: str, line_no: int) -> int:
        if token == "c":
            return 0
        if token.startswith("t"):
            return int(token[1:])
        if token.startswith("f"):
            return r + int(token[1:])
        raise ParseError(line_no, f"unknown gadget qubit {token!r}")

    gates = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "CX":
            gates.append((label(parts[1], line_no), label(parts[2], line_no)))
        elif parts[0] in ("INIT+", "INIT0", "MZ", "MX"):
            continue  # implied by the gadget type
        else:
            raise ParseError(line_no, f"unknown opcode {parts[0]!r}")
    gadget = FlagGadget(t, r, m, detect, tuple(gates))
    gadget.validate()
    return gadget


# -- look-up tables ----------------------------------------------------------


def save_ml_table(table: MLTable, path: str | Path) -> None:
    payload = {
        "kind": "ml",
        "synd_bits": table.synd_bits,
        "class_bits": table.class_bits,
        "counts": {hex(s): {str(c): v for c, v in per.items()} for s, per in table.counts.items()},
        "weights": {hex(s): {str(c): v for c, v in per.items()} for s, per in table.weights.items()},
    }
    Path(path).write_text(json.dumps(payload))


def load_ml_table(path: str | Path) -> MLTable:
    raw = json.loads(Path(path).read_text())
    if raw.get("kind") != "ml":
        raise ValueError("not an ML table file")
    table = MLTable(raw["synd_bits"], raw["class_bits"])
    table.counts = {
        int(s, 16): {int(c): v for c, v in per.items()} for s, per in raw["counts"].items()
    }
    table.weights = {
        int(s, 16): {int(c): v for c, v in per.items()} for s, per in raw["weights"].items()
    }
    return table


def save_mw_table(table: MWTable, path: str | Path) -> None:
    payload = {
        "kind": "mw",
        "synd_bits": table.synd_bits,
        "class_bits": table.class_bits,
        "w_max": table.w_max,
        "entries": {hex(s): [c, w] for s, (c, w) in table.entries.items()},
    }
    Path(path).write_text(json.dumps(payload))


def load_mw_table(path: str | Path) -> MWTable:
    raw = json.loads(Path(path).read_text())
    if raw.get("kind") != "mw":
        raise ValueError("not a MW table file")
    table = MWTable(raw["synd_bits"], raw["class_bits"], raw["w_max"])
    table.entries = {int(s, 16): (c, w) for s, (c, w) in raw["entries"].items()}
    return table


# -- outcome streams ---------------------------------------------------------


def save_sample_set(samples: SampleSet, path: str | Path) -> None:
    """Persist aggregated outcomes as a compact binary archive."""
    keys = sorted(samples.counts)
    synd = np.array([k[0] for k in keys], dtype=np.uint64)
    cls = np.array([k[1] for k in keys], dtype=np.uint64)
    counts = np.array([samples.counts[k] for k in keys], dtype=np.float64)
    weights = np.array([samples.weights.get(k, 0.0) for k in keys], dtype=np.float64)
    np.savez_compressed(
        path,
        synd=synd,
        cls=cls,
        counts=counts,
        weights=weights,
        meta=np.array([samples.synd_bits, samples.class_bits], dtype=np.int64),
    )


def load_sample_set(path: str | Path) -> SampleSet:
    data = np.load(path)
    synd_bits, class_bits = (int(x) for x in data["meta"])
    out = SampleSet(synd_bits, class_bits)
    for s, c, cnt, w in zip(data["synd"], data["cls"], data["counts"], data["weights"]):
        out.add(int(s), int(c), float(cnt), float(w))
    return out


def sample_set_to_csv(samples: SampleSet, path: str | Path) -> None:
    lines = ["syndrome,class,count,weight"]
    for (s, c) in sorted(samples.counts):
        lines.append(
            f"{s:#x},{c},{samples.counts[(s, c)]:.6f},{samples.weights.get((s, c), 0.0):.10g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
