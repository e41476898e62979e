"""CSS states: generator data, validation, syndromes and coset weights.

A *CSS state* is a stabilizer state generated by pure X-type and pure Z-type
operators: the code generators plus the logical representatives that
stabilize the chosen logical state (the Z logicals for ``|0..0>``-type
states, the X logicals for ``|+..+>``-type states).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import GF2Matrix, rank
from .pauli import PauliOperator, parity, popcount


class GroupTooLargeError(ValueError):
    """Enumerating the requested stabilizer subgroup would exceed the cap."""


MIN_WEIGHT_CAP = 20  # min_weight_modulo enumerates at most 2**20 products
COSET_CAP = 24  # max_coset_weight caps the opposite-type quotient at 2**24


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(str(i) for i in self.issues)


@dataclass(frozen=True)
class CssState:
    """A CSS code prepared in a fixed logical basis state.

    ``stabilizing_basis`` marks which logical representatives stabilize the
    prepared state: "Z" for logical zero states, "X" for logical plus states.
    """

    name: str
    n: int
    k: int
    d: int
    x_generators: tuple[PauliOperator, ...]
    z_generators: tuple[PauliOperator, ...]
    logical_x_reps: tuple[PauliOperator, ...]
    logical_z_reps: tuple[PauliOperator, ...]
    stabilizing_basis: str = "Z"
    state_label: str = "|0>"

    @property
    def t(self) -> int:
        return self.d // 2

    @property
    def state_stabilizing_logicals(self) -> tuple[PauliOperator, ...]:
        if self.stabilizing_basis == "Z":
            return self.logical_z_reps
        return self.logical_x_reps

    def x_type_state_generators(self) -> list[PauliOperator]:
        """All X-type generators of the state (code generators plus any
        X-type state-stabilizing logicals)."""
        gens = list(self.x_generators)
        if self.stabilizing_basis == "X":
            gens.extend(self.logical_x_reps)
        return gens

    def z_type_state_generators(self) -> list[PauliOperator]:
        gens = list(self.z_generators)
        if self.stabilizing_basis == "Z":
            gens.extend(self.logical_z_reps)
        return gens

    def reduction_group(self, error_type: str) -> list[PauliOperator]:
        """Same-type stabilizers of the state used for weight reduction."""
        if error_type == "X":
            return self.x_type_state_generators()
        if error_type == "Z":
            return self.z_type_state_generators()
        raise ValueError(f"error_type must be 'X' or 'Z', got {error_type!r}")

    def checking_generators(self, error_type: str) -> list[PauliOperator]:
        """Opposite-type code generators whose anticommutation gives the
        syndrome of an error of ``error_type``."""
        if error_type == "X":
            return list(self.z_generators)
        if error_type == "Z":
            return list(self.x_generators)
        raise ValueError(f"error_type must be 'X' or 'Z', got {error_type!r}")

    def class_logicals(self, error_type: str) -> list[PauliOperator]:
        """State-stabilizing logical representatives that grade errors of
        ``error_type`` into equivalence classes."""
        logicals = self.state_stabilizing_logicals
        # Only opposite-type logicals can anticommute with a pure-type error.
        if error_type == "X" and self.stabilizing_basis == "Z":
            return list(logicals)
        if error_type == "Z" and self.stabilizing_basis == "X":
            return list(logicals)
        return []


def _masks(ops: list[PauliOperator], error_type: str) -> list[int]:
    if error_type == "X":
        return [op.x for op in ops]
    return [op.z for op in ops]


def min_weight_modulo(error: PauliOperator, group_generators: list[PauliOperator]) -> int:
    """Exact minimum weight of ``error`` over products with the group.

    Enumerates all 2**g group elements in Gray-code order so each step is a
    single XOR; raises GroupTooLargeError beyond the 2**20 cap.
    """
    g = len(group_generators)
    if g > MIN_WEIGHT_CAP:
        raise GroupTooLargeError(f"{g} generators exceed the 2^{MIN_WEIGHT_CAP} cap")
    best_x, best_z = error.x, error.z
    best = popcount(best_x | best_z)
    cur_x, cur_z = error.x, error.z
    gx = [op.x for op in group_generators]
    gz = [op.z for op in group_generators]
    for i in range(1, 1 << g):
        j = (i & -i).bit_length() - 1  # Gray code: flip generator j
        cur_x ^= gx[j]
        cur_z ^= gz[j]
        w = popcount(cur_x | cur_z)
        if w < best:
            best = w
    return best


def coset_min_weights(masks: list[int]) -> np.ndarray:
    """All 2**g XOR-combinations of the masks as a uint64 array.

    Intended for repeated ``min(popcount(residual ^ combos))`` queries in the
    fault-tolerance verifier; masks must fit in 64 bits.
    """
    g = len(masks)
    if g > MIN_WEIGHT_CAP:
        raise GroupTooLargeError(f"{g} generators exceed the 2^{MIN_WEIGHT_CAP} cap")
    combos = np.zeros(1 << g, dtype=np.uint64)
    for j, mask in enumerate(masks):
        step = 1 << j
        combos[step : 2 * step] = combos[:step] ^ np.uint64(mask)
    return combos


def syndrome_and_class(
    error: PauliOperator, state: CssState, error_type: str
) -> tuple[int, int]:
    """Syndrome and equivalence-class bits of a pure-type error.

    Syndrome bit i is the anticommutation with the i-th opposite-type code
    generator; class bit j is the anticommutation with the j-th
    state-stabilizing logical representative.  Both are returned as packed
    integer masks.
    """
    err_mask = error.x | error.z
    checks = _masks(state.checking_generators(error_type), "X" if error_type == "Z" else "Z")
    synd = 0
    for i, c in enumerate(checks):
        if parity(err_mask & c):
            synd |= 1 << i
    cls = 0
    log_masks = [op.x | op.z for op in state.class_logicals(error_type)]
    for j, mask in enumerate(log_masks):
        if parity(err_mask & mask):
            cls |= 1 << j
    return synd, cls


def max_coset_weight(state: CssState, error_type: str) -> int:
    """Largest coset-minimum weight over all pure-type errors.

    The quotient is taken modulo the full same-type stabilizer group of the
    state (code generators plus state-stabilizing logicals), so cosets are
    indexed by the syndrome alone.  Found by enumerating errors in order of
    increasing weight until every syndrome has been reached.
    """
    group = state.reduction_group(error_type)
    comp = "X" if error_type == "Z" else "Z"
    checks = _masks(state.checking_generators(error_type), comp)
    # The quotient is finer than the syndrome when the same-type logicals are
    # not in the reduction group: the class logicals then grade the cosets.
    checks = checks + _masks(state.class_logicals(error_type), comp)
    n_cosets_log = state.n - len(group)
    if n_cosets_log > COSET_CAP or len(checks) > COSET_CAP:
        raise GroupTooLargeError(
            f"2^{n_cosets_log} cosets exceed the 2^{COSET_CAP} enumeration cap"
        )
    target = 1 << len(checks)
    seen = np.zeros(target, dtype=bool)
    seen[0] = True
    found = 1
    check_cols = np.zeros(state.n, dtype=np.int64)
    for q in range(state.n):
        s = 0
        for i, c in enumerate(checks):
            if (c >> q) & 1:
                s |= 1 << i
        check_cols[q] = s
    from itertools import combinations

    for w in range(1, state.n + 1):
        for combo in combinations(range(state.n), w):
            s = 0
            for q in combo:
                s ^= check_cols[q]
            if not seen[s]:
                seen[s] = True
                found += 1
                if found == target:
                    return w
    return 0  # only reachable for trivial codes


def validate_css_state(state: CssState) -> ValidationReport:
    """Check the structural invariants of a CSS state.

    Verifies type purity, pairwise commutation, full rank of each generator
    block, and that generators plus state-stabilizing logicals form n
    independent operators.
    """
    issues: list[ValidationIssue] = []
    for label, ops, comp in (
        ("x_generator", state.x_generators, "z"),
        ("z_generator", state.z_generators, "x"),
    ):
        for i, op in enumerate(ops):
            bad = op.z if comp == "z" else op.x
            if bad:
                issues.append(ValidationIssue("type-purity", f"{label}[{i}] has {comp.upper()} support"))
            if op.n != state.n:
                issues.append(ValidationIssue("length", f"{label}[{i}] acts on {op.n} != {state.n} qubits"))
    # X/Z generator pairs must have even overlap.
    for i, gx in enumerate(state.x_generators):
        for j, gz in enumerate(state.z_generators):
            if parity(gx.x & gz.z):
                issues.append(
                    ValidationIssue("commutation", f"x_generator[{i}] anticommutes with z_generator[{j}]")
                )
    for kind, logicals, opposite in (
        ("logical_x", state.logical_x_reps, state.z_generators),
        ("logical_z", state.logical_z_reps, state.x_generators),
    ):
        for i, rep in enumerate(logicals):
            mask = rep.x | rep.z
            for j, gen in enumerate(opposite):
                if parity(mask & (gen.x | gen.z)):
                    issues.append(
                        ValidationIssue("commutation", f"{kind}[{i}] anticommutes with a code generator ({j})")
                    )
    rx = rank(GF2Matrix.from_int_rows([op.x for op in state.x_generators], state.n)) if state.x_generators else 0
    if rx != len(state.x_generators):
        issues.append(ValidationIssue("rank", "x_generators are linearly dependent"))
    rz = rank(GF2Matrix.from_int_rows([op.z for op in state.z_generators], state.n)) if state.z_generators else 0
    if rz != len(state.z_generators):
        issues.append(ValidationIssue("rank", "z_generators are linearly dependent"))
    # Full state group must have n independent generators.
    full_x = [op.x for op in state.x_type_state_generators()]
    full_z = [op.z for op in state.z_type_state_generators()]
    total = 0
    if full_x:
        total += rank(GF2Matrix.from_int_rows(full_x, state.n))
    if full_z:
        total += rank(GF2Matrix.from_int_rows(full_z, state.n))
    if total != state.n:
        issues.append(
            ValidationIssue("rank", f"state group has rank {total}, expected {state.n}")
        )
    expected_counts = len(state.x_generators) + len(state.z_generators) + state.k
    if expected_counts != state.n:
        issues.append(
            ValidationIssue(
                "counts",
                f"{len(state.x_generators)}+{len(state.z_generators)} generators with k={state.k} "
                f"do not account for n={state.n}",
            )
        )
    if len(state.logical_x_reps) != state.k or len(state.logical_z_reps) != state.k:
        issues.append(ValidationIssue("counts", "logical representative count differs from k"))
    return ValidationReport(tuple(issues))
