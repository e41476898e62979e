"""Bipartite CX preparation circuits for CSS states.

Any CSS state can be prepared by initializing one qubit partition in |+>
(the controls) and the complement in |0> (the targets), then applying CX
gates along the edges of a bipartite graph.  The graph's adjacency is
X2 X1^-1 where X1 is an invertible row-submatrix of the stacked X-type
generator matrix; commutation forces the same matrix to equal
(Z1 Z2^-1)^T, which is asserted on every synthesis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .circuit import (
    ROLE_CONTROL,
    ROLE_TARGET,
    CXGate,
    FinalMeasure,
    Init,
    make_circuit,
)
from .css import CssState, validate_css_state


class RankDeficientError(ValueError):
    """No qubit subset yields an invertible X1 block (invalid state)."""


class AdjacencyAsymmetryError(AssertionError):
    """X2 X1^-1 != (Z1 Z2^-1)^T, indicating a generator-commutation bug."""


@dataclass(frozen=True)
class BipartiteCircuit:
    """A bipartite CX circuit preparing a CSS state.

    ``edges`` pair code-qubit indices (control, target); controls start in
    |+> and targets in |0>.
    """

    controls: tuple[int, ...]
    targets: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def control_degree(self, c: int) -> int:
        return sum(1 for a, _ in self.edges if a == c)

    def target_degree(self, t: int) -> int:
        return sum(1 for _, b in self.edges if b == t)

    @property
    def max_degree(self) -> int:
        degs = [self.control_degree(c) for c in self.controls]
        degs += [self.target_degree(t) for t in self.targets]
        return max(degs) if degs else 0

    def bare_circuit(self, n: int):
        """The induced plain circuit (no gadgets), edges in sorted order."""
        roles = []
        code_index: list[int | None] = []
        qubit_of = {}
        for q in sorted(self.controls) + sorted(self.targets):
            qubit_of[q] = len(roles)
            roles.append(ROLE_CONTROL if q in self.controls else ROLE_TARGET)
            code_index.append(q)
        ops = []
        for q in sorted(self.controls):
            ops.append(Init(qubit_of[q], "+"))
        for q in sorted(self.targets):
            ops.append(Init(qubit_of[q], "0"))
        for a, b in sorted(self.edges):
            ops.append(CXGate(qubit_of[a], qubit_of[b]))
        ops.append(FinalMeasure("Z"))
        return make_circuit(roles, code_index, ops)


def _generator_matrices(state: CssState) -> tuple[np.ndarray, np.ndarray]:
    """Dense (n x r) X and (n x (n-r)) Z generator matrices, qubits as rows."""
    x_gens = state.x_type_state_generators()
    z_gens = state.z_type_state_generators()
    n = state.n
    xmat = np.zeros((n, len(x_gens)), dtype=np.uint8)
    for j, op in enumerate(x_gens):
        for q in range(n):
            xmat[q, j] = (op.x >> q) & 1
    zmat = np.zeros((n, len(z_gens)), dtype=np.uint8)
    for j, op in enumerate(z_gens):
        for q in range(n):
            zmat[q, j] = (op.z >> q) & 1
    return xmat, zmat


def synthesize_bipartite(state: CssState, seed: int) -> BipartiteCircuit:
    """Construct one bipartite circuit for ``state``.

    The seed drives two randomizations: an invertible recombination of the
    generator basis and a shuffle of the qubit order used for greedy pivot
    selection.  Together they explore different control/target partitions.
    """
    report = validate_css_state(state)
    if not report.ok:
        raise ValueError(f"invalid CSS state: {report}")
    rng = np.random.default_rng(seed)
    xmat, zmat = _generator_matrices(state)
    n, r = xmat.shape
    if r:
        recomb = _random_invertible(r, rng)
        xmat = (xmat @ recomb) % 2
    if zmat.shape[1]:
        recomb_z = _random_invertible(zmat.shape[1], rng)
        zmat = (zmat @ recomb_z) % 2
    order = rng.permutation(n)

    # Greedy pivot selection: scan qubits in shuffled order, keep rows that
    # grow the rank of X1.
    controls: list[int] = []
    work = gf2.GF2Matrix.zeros(0, r)
    rows: list[int] = []
    cur_rank = 0
    for q in order:
        candidate = gf2.GF2Matrix.from_dense(
            np.vstack([xmat[rows + [q]]]) if rows else xmat[[q]]
        )
        rk = gf2.rank(candidate)
        if rk > cur_rank:
            rows.append(int(q))
            cur_rank = rk
            if cur_rank == r:
                break
    if cur_rank < r:
        raise RankDeficientError("X generator matrix is rank deficient")
    controls = sorted(rows)
    targets = sorted(set(range(n)) - set(controls))

    x1 = gf2.GF2Matrix.from_dense(xmat[controls]) if r else gf2.GF2Matrix.zeros(0, 0)
    x2 = gf2.GF2Matrix.from_dense(xmat[targets]) if r else gf2.GF2Matrix.zeros(len(targets), 0)
    adjacency = x2.matmul(gf2.invert(x1)) if r else gf2.GF2Matrix.zeros(len(targets), 0)

    nz = zmat.shape[1]
    if nz:
        z1 = gf2.GF2Matrix.from_dense(zmat[controls]) if controls else gf2.GF2Matrix.zeros(0, nz)
        z2 = gf2.GF2Matrix.from_dense(zmat[targets])
        alt = z1.matmul(gf2.invert(z2)).transpose()
        if alt.to_dense().shape == adjacency.to_dense().shape and alt != adjacency:
            raise AdjacencyAsymmetryError("Z1 Z2^-1 != (X2 X1^-1)^T")

    dense = adjacency.to_dense()
    edges = []
    for i, tq in enumerate(targets):
        for j, cq in enumerate(controls):
            if dense[i, j]:
                edges.append((cq, tq))
    return BipartiteCircuit(tuple(controls), tuple(targets), tuple(sorted(edges)))


def best_of_trials(state: CssState, trials: int, seed: int) -> BipartiteCircuit:
    """Best bipartite circuit over seeded trials.

    Minimizes edge count; ties break toward the lower maximum vertex degree,
    then toward the earlier trial, so the result is reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seq = np.random.SeedSequence(seed)
    best: BipartiteCircuit | None = None
    best_key: tuple[int, int] | None = None
    for child in seq.spawn(trials):
        trial_seed = int(child.generate_state(1)[0])
        bip = synthesize_bipartite(state, trial_seed)
        key = (bip.edge_count, bip.max_degree)
        if best_key is None or key < best_key:
            best, best_key = bip, key
    assert best is not None
    return best


def _random_invertible(n: int, rng: np.random.Generator) -> np.ndarray:
    """A uniformly-seeded invertible GF(2) matrix via rejection sampling."""
    while True:
        m = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if gf2.rank(gf2.GF2Matrix.from_dense(m)) == n:
            return m
