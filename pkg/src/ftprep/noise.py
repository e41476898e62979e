"""Circuit-level Pauli-frame Monte Carlo with subset sampling.

Noise model: one rate ``p`` drives a single-qubit depolarizing channel after
every initialization, a two-qubit depolarizing channel after every CX, and
an outcome flip with probability ``p`` on every flag measurement.  Memory
noise adds a depolarizing channel of rate ``p/100`` on every active qubit
for every CX time step.  The final transversal measurement is noiseless.

Frame propagation is linear, so every fault location's end-of-circuit
effect (flag flips, syndrome, class) is precomputed once in a backward
sweep; a Monte Carlo sample is then just an XOR of a few table entries.
Subset sampling draws the number of faults per sample from the nontrivial
part of the binomial distribution and adds the fault-free mass back
analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, CXGate, FlagMeasure, Init
from .css import CssState


class DegeneratePlanError(ValueError):
    """No nontrivial fault-count pair survives the subset-sampling cutoff."""


@dataclass(frozen=True)
class NoiseModel:
    p: float
    memory_divisor: float = 100.0
    final_measurement_noiseless: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.p < 1:
            raise ValueError("require 0 < p < 1")

    @property
    def q(self) -> float:
        return self.p / self.memory_divisor


def count_fault_locations(circuit: Circuit) -> tuple[int, int]:
    """(L_p, L_q): full-rate locations and idle locations.

    L_p counts initializations, CX gates and flag measurements.  L_q counts
    one idle location per active qubit per CX time step, participants
    included; a qubit is active from its initialization until its
    measurement.
    """
    l_p = 0
    l_q = 0
    active: set[int] = set()
    for op in circuit.ops:
        if isinstance(op, Init):
            l_p += 1
            active.add(op.qubit)
        elif isinstance(op, CXGate):
            l_p += 1
            l_q += len(active)
        elif isinstance(op, FlagMeasure):
            l_p += 1
            active.discard(op.qubit)
    return l_p, l_q


@dataclass(frozen=True)
class SubsetPlan:
    l_p: int
    l_q: int
    p: float
    q: float
    samples: int
    pairs: tuple[tuple[int, int], ...]  # retained (f_p, f_q)
    probabilities: tuple[float, ...]  # renormalized over retained pairs
    p_trivial: float  # P(0, 0)

    @property
    def trivial_addback(self) -> float:
        return self.samples * self.p_trivial / (1.0 - self.p_trivial)

    @property
    def effective_samples(self) -> float:
        return self.samples / (1.0 - self.p_trivial)


def _binom_pmf(n: int, p: float) -> np.ndarray:
    # log-space for numerical stability at large n
    ks = np.arange(n + 1)
    log_comb = np.array(
        [math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) for k in ks]
    )
    return np.exp(log_comb + ks * math.log(p) + (n - ks) * math.log1p(-p))


def build_subset_plan(l_p: int, l_q: int, p: float, q: float, samples: int) -> SubsetPlan:
    """Retain the (f_p, f_q) fault-count pairs worth sampling.

    P(f_p, f_q) is the product of the two binomials; pairs with
    P <= 1/samples^2 are dropped, the trivial pair is excluded and its mass
    added back analytically.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pmf_p = _binom_pmf(l_p, p) if l_p else np.array([1.0])
    pmf_q = _binom_pmf(l_q, q) if l_q else np.array([1.0])
    cutoff = 1.0 / samples**2
    pairs: list[tuple[int, int]] = []
    probs: list[float] = []
    for fp in range(len(pmf_p)):
        if pmf_p[fp] <= cutoff:
            if fp > np.argmax(pmf_p):
                break
            continue
        for fq in range(len(pmf_q)):
            prob = float(pmf_p[fp] * pmf_q[fq])
            if prob <= cutoff:
                if fq > np.argmax(pmf_q):
                    break
                continue
            if fp == 0 and fq == 0:
                continue
            pairs.append((fp, fq))
            probs.append(prob)
    if not pairs:
        raise DegeneratePlanError("P(0,0) leaves no nontrivial pair above the cutoff")
    p_trivial = float(pmf_p[0] * pmf_q[0])
    total = sum(probs)
    return SubsetPlan(
        l_p=l_p,
        l_q=l_q,
        p=p,
        q=q,
        samples=samples,
        pairs=tuple(pairs),
        probabilities=tuple(pr / total for pr in probs),
        p_trivial=p_trivial,
    )


@dataclass
class EffectTables:
    """Per-fault-location end-of-circuit effects for one circuit and state.

    Arrays are indexed by a flat variant id; locations map to contiguous
    variant slices.  ``flag_lo``/``flag_hi`` hold the flag-flip mask, ``sc``
    the packed (syndrome | class << synd_bits) of the X residual.
    """

    n_flags: int
    synd_bits: int
    class_bits: int
    # p-type locations
    p_offsets: np.ndarray
    p_counts: np.ndarray
    # q-type locations
    q_offsets: np.ndarray
    q_counts: np.ndarray
    flag_lo: np.ndarray
    flag_hi: np.ndarray
    sc: np.ndarray
    # replay info (op position and Pauli masks) for oracle cross-checks
    var_pos: list[int] = field(default_factory=list)
    var_x: list[int] = field(default_factory=list)
    var_z: list[int] = field(default_factory=list)

    @property
    def l_p(self) -> int:
        return len(self.p_offsets)

    @property
    def l_q(self) -> int:
        return len(self.q_offsets)


def build_effect_tables(circuit: Circuit, state: CssState, error_side: str = "X") -> EffectTables:
    """Backward sweep computing every fault variant's propagated effect.

    ``error_side`` selects which residual component the syndrome and class
    bits read: "X" checks the X residual against the Z-type generators (the
    logical-zero preparation analysis), "Z" the Z residual against the
    X-type generators (Steane-QEC decoding of joint Z errors).
    """
    n = circuit.n_qubits
    comp = "Z" if error_side == "X" else "X"
    checks = [getattr(op, comp.lower()) for op in state.checking_generators(error_side)]
    class_ops = [op.x | op.z for op in state.class_logicals(error_side)]
    synd_bits = len(checks)
    class_bits = len(class_ops)
    n_flags = circuit.flag_count

    def code_effect(ci: int) -> int:
        out = 0
        for i, cg in enumerate(checks):
            if (cg >> ci) & 1:
                out |= 1 << (n_flags + i)
        for j, lg in enumerate(class_ops):
            if (lg >> ci) & 1:
                out |= 1 << (n_flags + synd_bits + j)
        return out

    col_x = [0] * n
    col_z = [0] * n
    for q in range(n):
        ci = circuit.code_index[q]
        if ci is not None:
            if error_side == "X":
                col_x[q] = code_effect(ci)
            else:
                col_z[q] = code_effect(ci)

    # Forward pass: the active set per CX step for idle locations.
    active_at_step: list[list[int]] = []
    active: list[int] = []
    is_active = [False] * n
    for op in circuit.ops:
        if isinstance(op, Init):
            is_active[op.qubit] = True
            active.append(op.qubit)
        elif isinstance(op, CXGate):
            active_at_step.append([q for q in active if is_active[q]])
        elif isinstance(op, FlagMeasure):
            is_active[op.qubit] = False

    effects: dict[int, list[tuple[int, int, int]]] = {}  # op pos -> (x_eff, z_eff, qubit)
    idle_effects: list[list[tuple[int, int, int]]] = [[] for _ in active_at_step]
    step_pos: list[int] = [0] * len(active_at_step)
    cx_step = len(active_at_step)
    for pos in range(len(circuit.ops) - 1, -1, -1):
        op = circuit.ops[pos]
        if isinstance(op, FlagMeasure):
            bit = 1 << op.outcome
            col_x[op.qubit] = bit if op.basis == "Z" else 0
            col_z[op.qubit] = bit if op.basis == "X" else 0
        elif isinstance(op, CXGate):
            cx_step -= 1
            step_pos[cx_step] = pos
            a, b = op.control, op.target
            effects[pos] = [(col_x[a], col_z[a], a), (col_x[b], col_z[b], b)]
            idle_effects[cx_step] = [
                (q, col_x[q], col_z[q]) for q in active_at_step[cx_step]
            ]
            col_x[a] ^= col_x[b]
            col_z[b] ^= col_z[a]
        elif isinstance(op, Init):
            effects[pos] = [(col_x[op.qubit], col_z[op.qubit], op.qubit)]

    flag_mask = (1 << n_flags) - 1
    word = (1 << 64) - 1
    flag_lo: list[int] = []
    flag_hi: list[int] = []
    sc: list[int] = []
    var_pos: list[int] = []
    var_x: list[int] = []
    var_z: list[int] = []
    p_offsets: list[int] = []
    p_counts: list[int] = []
    q_offsets: list[int] = []
    q_counts: list[int] = []

    def emit(eff: int, pos: int, x_mask: int, z_mask: int) -> None:
        flags = eff & flag_mask
        flag_lo.append(flags & word)
        flag_hi.append(flags >> 64)
        sc.append(eff >> n_flags)
        var_pos.append(pos)
        var_x.append(x_mask)
        var_z.append(z_mask)

    # p locations in op order: inits (X, Y, Z), CX (15 Paulis), meas (flip).
    idle_pending: list[tuple[int, list[int]]] = []
    for pos, op in enumerate(circuit.ops):
        if isinstance(op, Init):
            (ex, ez, q) = effects[pos][0]
            p_offsets.append(len(flag_lo))
            p_counts.append(3)
            emit(ex, pos, 1 << q, 0)  # X
            emit(ex ^ ez, pos, 1 << q, 1 << q)  # Y
            emit(ez, pos, 0, 1 << q)  # Z
        elif isinstance(op, CXGate):
            (xa, za, a), (xb, zb, b) = effects[pos]
            p_offsets.append(len(flag_lo))
            p_counts.append(15)
            for bits in range(1, 16):
                eff = 0
                xm = zm = 0
                if bits & 1:
                    eff ^= xa
                    xm |= 1 << a
                if bits & 2:
                    eff ^= za
                    zm |= 1 << a
                if bits & 4:
                    eff ^= xb
                    xm |= 1 << b
                if bits & 8:
                    eff ^= zb
                    zm |= 1 << b
                emit(eff, pos, xm, zm)
        elif isinstance(op, FlagMeasure):
            p_offsets.append(len(flag_lo))
            p_counts.append(1)
            # Literal bit-flip channel: an X before the measurement flips a
            # Z-basis outcome and is inert for an X-basis one.
            emit((1 << op.outcome) if op.basis == "Z" else 0, pos, 0, 0)
    # q locations: step-by-step, every active qubit (participants included).
    for s in range(len(active_at_step)):
        pos = step_pos[s]
        for q, ex, ez in idle_effects[s]:
            q_offsets.append(len(flag_lo))
            q_counts.append(3)
            emit(ex, pos, 1 << q, 0)
            emit(ex ^ ez, pos, 1 << q, 1 << q)
            emit(ez, pos, 0, 1 << q)

    return EffectTables(
        n_flags=n_flags,
        synd_bits=synd_bits,
        class_bits=class_bits,
        p_offsets=np.array(p_offsets, dtype=np.int64),
        p_counts=np.array(p_counts, dtype=np.int64),
        q_offsets=np.array(q_offsets, dtype=np.int64),
        q_counts=np.array(q_counts, dtype=np.int64),
        flag_lo=np.array(flag_lo, dtype=np.uint64),
        flag_hi=np.array(flag_hi, dtype=np.uint64),
        sc=np.array(sc, dtype=np.uint64),
        var_pos=var_pos,
        var_x=var_x,
        var_z=var_z,
    )


@dataclass
class SampleSet:
    """Aggregated (syndrome, class) tallies of accepted samples.

    ``counts`` holds raw sample counts, ``weights`` importance-weighted mass
    (each sample carries its bucket's true probability over the number
    drawn there).  The trivial fault-free mass is included analytically.
    """

    synd_bits: int
    class_bits: int
    counts: dict[tuple[int, int], float] = field(default_factory=dict)
    weights: dict[tuple[int, int], float] = field(default_factory=dict)

    def add(self, synd: int, cls: int, count: float, weight: float) -> None:
        key = (synd, cls)
        self.counts[key] = self.counts.get(key, 0.0) + count
        self.weights[key] = self.weights.get(key, 0.0) + weight

    @property
    def total(self) -> float:
        return sum(self.counts.values())

    @property
    def total_weight(self) -> float:
        return sum(self.weights.values())


@dataclass
class MonteCarloResult:
    plan: SubsetPlan
    accepted: float  # including the trivial add-back
    acceptance_rate: float
    acceptance_ci: tuple[float, float]
    train: SampleSet
    test: SampleSet

    @property
    def effective_samples(self) -> float:
        return self.plan.effective_samples


def _draw_distinct(rng: np.random.Generator, n_rows: int, k: int, limit: int) -> np.ndarray:
    """n_rows x k integer matrix, entries < limit, distinct within each row."""
    out = rng.integers(0, limit, size=(n_rows, k), dtype=np.int64)
    if k == 1:
        return out
    while True:
        srt = np.sort(out, axis=1)
        dup = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
        n_bad = int(dup.sum())
        if not n_bad:
            return out
        out[dup] = rng.integers(0, limit, size=(n_bad, k), dtype=np.int64)


def run_monte_carlo(
    circuit: Circuit,
    state: CssState,
    model: NoiseModel,
    plan: SubsetPlan,
    seed: int,
    tables: EffectTables | None = None,
    chunk: int = 1 << 18,
) -> MonteCarloResult:
    """Draw the plan's samples, propagate, and tally (syndrome, class).

    Samples are split into equal train/test halves by a per-sample coin.
    A sample is accepted when no flag flips; accepted samples contribute
    their X-residual syndrome and class.  The trivial add-back mass is
    divided between the halves.  Deterministic for a fixed
    (seed, plan, circuit).
    """
    if tables is None:
        tables = build_effect_tables(circuit, state)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    counts = rng.multinomial(plan.samples, plan.probabilities)
    sc_mask = np.uint64((1 << tables.synd_bits) - 1)
    train = SampleSet(tables.synd_bits, tables.class_bits)
    test = SampleSet(tables.synd_bits, tables.class_bits)
    accepted_nontrivial = 0.0

    for (fp, fq), n_b, prob in zip(plan.pairs, counts, plan.probabilities):
        if n_b == 0:
            continue
        # weight of one sample = true mass of the bucket / samples drawn
        weight_each = prob * (1.0 - plan.p_trivial) / n_b
        done = 0
        while done < n_b:
            m = min(chunk, n_b - done)
            done += m
            acc_lo = np.zeros(m, dtype=np.uint64)
            acc_hi = np.zeros(m, dtype=np.uint64)
            acc_sc = np.zeros(m, dtype=np.uint64)
            if fp:
                locs = _draw_distinct(rng, m, fp, tables.l_p)
                for col in range(fp):
                    loc = locs[:, col]
                    off = tables.p_offsets[loc]
                    cnt = tables.p_counts[loc]
                    var = off + (rng.random(m) * cnt).astype(np.int64)
                    acc_lo ^= tables.flag_lo[var]
                    acc_hi ^= tables.flag_hi[var]
                    acc_sc ^= tables.sc[var]
            if fq:
                locs = _draw_distinct(rng, m, fq, tables.l_q)
                for col in range(fq):
                    loc = locs[:, col]
                    off = tables.q_offsets[loc]
                    cnt = tables.q_counts[loc]
                    var = off + (rng.random(m) * cnt).astype(np.int64)
                    acc_lo ^= tables.flag_lo[var]
                    acc_hi ^= tables.flag_hi[var]
                    acc_sc ^= tables.sc[var]
            ok = (acc_lo == 0) & (acc_hi == 0)
            accepted_nontrivial += float(ok.sum()) * 1.0
            is_train = rng.random(m) < 0.5
            for subset, mask in ((train, is_train & ok), (test, ~is_train & ok)):
                if not mask.any():
                    continue
                keys, kcounts = np.unique(acc_sc[mask], return_counts=True)
                for key, kc in zip(keys.tolist(), kcounts.tolist()):
                    synd = int(key) & int(sc_mask)
                    cls = int(key) >> tables.synd_bits
                    subset.add(synd, cls, kc, kc * weight_each)
        # track acceptance weight-correctly as well (counts suffice: the
        # estimator is the plain ratio over the effective sample count)
    addback = plan.trivial_addback
    train.add(0, 0, addback / 2.0, plan.p_trivial / 2.0)
    test.add(0, 0, addback / 2.0, plan.p_trivial / 2.0)
    accepted = accepted_nontrivial + addback
    effective = plan.effective_samples
    rate = accepted / effective
    ci = wilson_interval(accepted, effective)
    return MonteCarloResult(
        plan=plan,
        accepted=accepted,
        acceptance_rate=rate,
        acceptance_ci=ci,
        train=train,
        test=test,
    )


def wilson_interval(successes: float, trials: float, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    from scipy.stats import norm

    z = float(norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


def frame_replay_check(
    circuit: Circuit,
    state: CssState,
    tables: EffectTables,
    n_samples: int,
    seed: int,
    max_faults: int = 4,
) -> int:
    """Cross-check frame propagation against the stabilizer tableau.

    Draws random fault sets, predicts flag flips and the code-qubit
    stabilizer parities from the effect tables, then replays the same
    Paulis inside a tableau simulation and compares outcome by outcome.
    Returns the number of agreeing samples; raises on the first mismatch.
    """
    from .tableau import run_tableau

    rng = np.random.default_rng(seed)
    zgens = [op.z for op in state.checking_generators("X")]
    class_ops = [op.z for op in state.class_logicals("X")]
    lift = {}
    for qq in range(circuit.n_qubits):
        ci = circuit.code_index[qq]
        if ci is not None:
            lift[ci] = qq
    n_vars = len(tables.var_pos)
    for trial in range(n_samples):
        k = int(rng.integers(1, max_faults + 1))
        chosen = rng.integers(0, n_vars, size=k)
        eff_lo = eff_hi = eff_sc = 0
        faults = []
        flip_mask = 0
        for v in chosen:
            eff_lo ^= int(tables.flag_lo[v])
            eff_hi ^= int(tables.flag_hi[v])
            eff_sc ^= int(tables.sc[v])
            xm, zm = tables.var_x[v], tables.var_z[v]
            if xm == 0 and zm == 0:
                # Measurement-flip variant: flips the recorded outcome (a
                # no-op for X-basis flags under the literal bit-flip channel).
                flip_mask ^= int(tables.flag_lo[v]) | (int(tables.flag_hi[v]) << 64)
            else:
                faults.append((tables.var_pos[v], xm, zm))
        predicted_flags = eff_lo | (eff_hi << 64)
        tab, outcomes, _ = run_tableau(circuit, faults, rng=rng)
        observed_flags = flip_mask
        for meas in circuit.flag_measurements():
            if outcomes[meas.outcome]:
                observed_flags ^= 1 << meas.outcome
        if observed_flags != predicted_flags:
            raise AssertionError(
                f"sample {trial}: flag mismatch {observed_flags:#x} != {predicted_flags:#x}"
            )
        # Compare stabilizer parities of the final state: measure code
        # qubits in Z and check each Z-generator's parity.
        n_code = circuit.n_code
        bits = {}
        for ci, qq in lift.items():
            out, _ = tab.measure_z(qq, rng)
            bits[ci] = out
        synd_pred = eff_sc & ((1 << tables.synd_bits) - 1)
        cls_pred = eff_sc >> tables.synd_bits
        for i, zg in enumerate(zgens):
            par = 0
            for ci in bits:
                if (zg >> ci) & 1:
                    par ^= bits[ci]
            if par != (synd_pred >> i) & 1:
                raise AssertionError(f"sample {trial}: syndrome bit {i} mismatch")
        for j, lg in enumerate(class_ops):
            par = 0
            for ci in bits:
                if (lg >> ci) & 1:
                    par ^= bits[ci]
            if par != (cls_pred >> j) & 1:
                raise AssertionError(f"sample {trial}: class bit {j} mismatch")
    return n_samples
