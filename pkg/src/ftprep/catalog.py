"""Built-in CSS code catalog and code-file parsing.

Entries are constructed programmatically (cyclic quadratic-residue codes,
rotated surface codes) and validated on first use.  ``get_state`` returns a
CssState for a chosen logical basis state; preparing ``|+..+>`` is handled
by swapping the roles of X and Z data, mirroring the Hadamard-conjugated
treatment used for transversal-T-friendly codes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .css import CssState, validate_css_state
from .pauli import PauliOperator


class ParseError(ValueError):
    """A code file is malformed."""


def _mask(bits: list[int]) -> int:
    out = 0
    for b in bits:
        out |= 1 << b
    return out


def _cyclic_shift(mask: int, n: int, k: int) -> int:
    return ((mask << k) | (mask >> (n - k))) & ((1 << n) - 1)


def _poly_mask(exponents: list[int]) -> int:
    return _mask(exponents)


def _cyclic_dual_containing(n: int, g_exponents: list[int], rows: int) -> list[int]:
    """Stabilizer rows of a dual-containing cyclic code: shifts of (x+1)g(x)."""
    g = _poly_mask(g_exponents)
    gp = g ^ (g << 1)  # multiply by (x + 1)
    return [_cyclic_shift(gp, n, k) for k in range(rows)]


def steane_data() -> dict:
    rows = [_mask([3, 4, 5, 6]), _mask([1, 2, 5, 6]), _mask([0, 2, 4, 6])]
    return {
        "name": "steane",
        "n": 7,
        "k": 1,
        "d": 3,
        "x_stabilizers": rows,
        "z_stabilizers": rows,
        "logical_x": [(1 << 7) - 1],
        "logical_z": [(1 << 7) - 1],
    }


def golay_data() -> dict:
    # [23, 12, 7] quadratic-residue (Golay) code; the even-weight subcode is
    # its dual, giving the self-dual [[23, 1, 7]] CSS code.
    g = [0, 2, 4, 5, 6, 10, 11]
    rows = _cyclic_dual_containing(23, g, 11)
    return {
        "name": "golay",
        "n": 23,
        "k": 1,
        "d": 7,
        "x_stabilizers": rows,
        "z_stabilizers": rows,
        "logical_x": [_poly_mask(g)],
        "logical_z": [_poly_mask(g)],
    }


def color17_data() -> dict:
    # Distance-5 CSS code on 17 qubits from the two quadratic-residue
    # factors of (x^17+1)/(x+1): X checks span <(x+1) f1>, Z checks span
    # <(x+1) f2>, and the weight-5 codeword f1 is a logical X representative.
    f1 = [0, 3, 4, 5, 8]
    f2 = [0, 1, 2, 4, 6, 7, 8]
    return {
        "name": "color17",
        "n": 17,
        "k": 1,
        "d": 5,
        "x_stabilizers": _cyclic_dual_containing(17, f1, 8),
        "z_stabilizers": _cyclic_dual_containing(17, f2, 8),
        "logical_x": [_poly_mask(f1)],
        "logical_z": [_poly_mask(f2)],
    }


def rotated_surface_data(d: int) -> dict:
    """Rotated surface code on a d x d grid."""
    if d % 2 == 0 or d < 3:
        raise ValueError("distance must be odd and >= 3")
    n = d * d

    def q(r: int, c: int) -> int:
        return r * d + c

    x_rows: list[int] = []
    z_rows: list[int] = []
    for r in range(d - 1):
        for c in range(d - 1):
            face = _mask([q(r, c), q(r, c + 1), q(r + 1, c), q(r + 1, c + 1)])
            if (r + c) % 2 == 1:
                x_rows.append(face)
            else:
                z_rows.append(face)
    # Two-body boundary checks, staggered so everything commutes: X pairs on
    # the top row (even columns) and bottom row (odd columns), Z pairs on the
    # left column (odd rows) and right column (even rows).
    for c in range(0, d - 1, 2):
        x_rows.append(_mask([q(0, c), q(0, c + 1)]))
    for c in range(1, d - 1, 2):
        x_rows.append(_mask([q(d - 1, c), q(d - 1, c + 1)]))
    for r in range(1, d - 1, 2):
        z_rows.append(_mask([q(r, 0), q(r + 1, 0)]))
    for r in range(0, d - 1, 2):
        z_rows.append(_mask([q(r, d - 1), q(r + 1, d - 1)]))
    logical_x = _mask([q(i, i) for i in range(d)])
    logical_z = _mask([q(i, d - 1 - i) for i in range(d)])
    return {
        "name": f"surface{d * d}",
        "n": n,
        "k": 1,
        "d": d,
        "x_stabilizers": x_rows,
        "z_stabilizers": z_rows,
        "logical_x": [logical_x],
        "logical_z": [logical_z],
    }


def selfdual20_data() -> dict:
    # [[20, 2, 6]] self-dual CSS code: a [20, 9] self-orthogonal seed built
    # by shortening the extended [24, 12, 8] code on four coordinates plus
    # one extension row; the dual-minus-code minimum weight is exactly 6
    # (verified by full enumeration in the tests).
    rows = [
        0x80C75, 0x818EA, 0x831D4, 0x863A8, 0x8C750,
        0x98EA0, 0xB1D40, 0xE3A80, 0xB674B,
    ]
    return {
        "name": "selfdual20",
        "n": 20,
        "k": 2,
        "d": 6,
        "x_stabilizers": rows,
        "z_stabilizers": rows,
        "logical_x": [0x46E, 0xCB004],
        "logical_z": [0xCB004, 0x46E],
    }


_BUILDERS = {
    "steane": steane_data,
    "golay": golay_data,
    "color17": color17_data,
    "surface9": lambda: rotated_surface_data(3),
    "surface25": lambda: rotated_surface_data(5),
    "selfdual20": selfdual20_data,
}

DEFAULT_STATES = {
    "steane": "|0>",
    "golay": "|0>",
    "color17": "|0>",
    "surface9": "|0>",
    "surface25": "|0>",
    "selfdual20": "|0>",
}


def catalog_names() -> list[str]:
    return sorted(_BUILDERS)


def _state_from_data(data: dict, state_label: str) -> CssState:
    n = data["n"]
    if state_label in ("|0>", "zero", "0"):
        basis, label = "Z", "|0>"
        x_rows, z_rows = data["x_stabilizers"], data["z_stabilizers"]
        lx, lz = data["logical_x"], data["logical_z"]
    elif state_label in ("|+>", "plus", "+"):
        # Prepare |+..+> as the |0..0> of the X<->Z swapped code.
        basis, label = "Z", "|+>"
        x_rows, z_rows = data["z_stabilizers"], data["x_stabilizers"]
        lx, lz = data["logical_z"], data["logical_x"]
    else:
        raise ParseError(f"unsupported state label {state_label!r}")
    state = CssState(
        name=data["name"],
        n=n,
        k=data["k"],
        d=data["d"],
        x_generators=tuple(PauliOperator(n, x=row) for row in x_rows),
        z_generators=tuple(PauliOperator(n, z=row) for row in z_rows),
        logical_x_reps=tuple(PauliOperator(n, x=row) for row in lx),
        logical_z_reps=tuple(PauliOperator(n, z=row) for row in lz),
        stabilizing_basis=basis,
        state_label=label,
    )
    report = validate_css_state(state)
    if not report.ok:
        raise ParseError(f"catalog entry {data['name']} is invalid: {report}")
    return state


def get_state(name: str, state_label: str | None = None) -> CssState:
    """A validated CssState for a catalog code (or a code-file path)."""
    if name in _BUILDERS:
        data = _BUILDERS[name]()
        return _state_from_data(data, state_label or DEFAULT_STATES[name])
    path = Path(name)
    if path.exists():
        return parse_code_file(path, state_label)
    raise KeyError(f"unknown code {name!r} (catalog: {', '.join(catalog_names())})")


def _parse_pauli_rows(rows: list[str], n: int, kind: str, allowed: str) -> list[int]:
    out = []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"{kind}[{i}] has length {len(row)}, expected {n}")
        mask = 0
        for j, ch in enumerate(row.upper()):
            if ch == allowed:
                mask |= 1 << j
            elif ch != "I":
                raise ParseError(f"{kind}[{i}] contains {ch!r}; only I/{allowed} allowed")
        out.append(mask)
    return out


def parse_code_file(path: str | Path, state_label: str | None = None) -> CssState:
    """Parse a JSON code file into a validated CssState.

    The format mirrors the catalog: name, n, k, d, ``x_stabilizers`` and
    ``z_stabilizers`` as strings over I/X and I/Z, logical representatives,
    and an optional ``default_state`` label.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    for field in ("name", "n", "k", "d", "x_stabilizers", "z_stabilizers", "logical_x", "logical_z"):
        if field not in raw:
            raise ParseError(f"{path}: missing field {field!r}")
    n = raw["n"]
    data = {
        "name": raw["name"],
        "n": n,
        "k": raw["k"],
        "d": raw["d"],
        "x_stabilizers": _parse_pauli_rows(raw["x_stabilizers"], n, "x_stabilizers", "X"),
        "z_stabilizers": _parse_pauli_rows(raw["z_stabilizers"], n, "z_stabilizers", "Z"),
        "logical_x": _parse_pauli_rows(raw["logical_x"], n, "logical_x", "X"),
        "logical_z": _parse_pauli_rows(raw["logical_z"], n, "logical_z", "Z"),
    }
    label = state_label or raw.get("default_state", "|0>")
    return _state_from_data(data, label)


def export_code_file(name: str, path: str | Path) -> None:
    """Write a catalog entry in the code-file format."""
    data = _BUILDERS[name]()
    n = data["n"]

    def rows_to_str(rows: list[int], ch: str) -> list[str]:
        return ["".join(ch if (row >> j) & 1 else "I" for j in range(n)) for row in rows]

    payload = {
        "name": data["name"],
        "n": n,
        "k": data["k"],
        "d": data["d"],
        "x_stabilizers": rows_to_str(data["x_stabilizers"], "X"),
        "z_stabilizers": rows_to_str(data["z_stabilizers"], "Z"),
        "logical_x": rows_to_str(data["logical_x"], "X"),
        "logical_z": rows_to_str(data["logical_z"], "Z"),
        "default_state": DEFAULT_STATES[data["name"]],
    }
    Path(path).write_text(json.dumps(payload, indent=1))
