"""Steane-QEC experiment: correcting a noisy block with a prepared ancilla.

A computational block starts noiselessly in the logical plus state and
suffers a single-qubit depolarizing round at rate 10p.  A logical-zero
resource block is prepared by the flag-at-origin circuit under the rate-p
model (rejected preparations restart), a noisy transversal CX couples
resource (control) to computational block (target), and the resource is
measured destructively in the X basis with rate-p readout flips.  The
X-generator parities of the readout give the joint Z-error syndrome;
decoding it yields the Z correction applied to the computational block.
After a second 10p round, the block's residual Z frame is judged by an
ideal minimum-weight decoder: a logical error is a residual that still
anticommutes with the logical X after that final correction.

Z errors on the resource never reach the computational block; they only
corrupt the syndrome, which is why the resource's Z-side fault tolerance
(Appendix-style ablation: ``ft_x_only``) shows up directly in the scaling
of the logical error rate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit
from .css import CssState
from .decoder import (
    DecodePolicy,
    MLTable,
    MWTable,
    build_ideal_class_table,
    build_mw_lut,
    decode,
)
from .noise import (
    EffectTables,
    NoiseModel,
    SubsetPlan,
    build_effect_tables,
    build_subset_plan,
    count_fault_locations,
    run_monte_carlo,
    wilson_interval,
)

FULL_FT = "full_ft"
FT_X_ONLY = "ft_x_only"
NO_QEC = "no_qec"


@dataclass(frozen=True)
class SteaneQecConfig:
    state: CssState
    p: float
    samples: int
    prep_mode: str = FULL_FT  # full_ft | ft_x_only | no_qec
    data_noise_multiplier: float = 10.0
    seed: int = 0


@dataclass
class SteaneQecResult:
    config: SteaneQecConfig
    logical_errors: int
    samples: int
    logical_error_rate: float
    logical_error_ci: tuple[float, float]
    prep_acceptance: float

    def __str__(self) -> str:
        lo, hi = self.logical_error_ci
        return (
            f"{self.config.prep_mode} p={self.config.p:g}: logical {self.logical_error_rate:.3g} "
            f"[{lo:.3g}, {hi:.3g}] (prep acceptance {self.prep_acceptance:.3f})"
        )


def _pack_frames(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    powers = (1 << np.arange(n, dtype=np.uint64)).astype(np.uint64)
    return (bits.astype(np.uint64) * powers[None, :]).sum(axis=1, dtype=np.uint64)


class _ZSyndromeMap:
    """Syndrome and class bits of packed Z frames on the code qubits."""

    def __init__(self, state: CssState) -> None:
        self.n = state.n
        self.xgens = [op.x for op in state.x_generators]
        logical_x = state.logical_x_reps[0].x if state.logical_x_reps else 0
        self.logical_x = logical_x
        self.cols = np.zeros(state.n, dtype=np.uint64)
        for q in range(state.n):
            s = 0
            for i, g in enumerate(self.xgens):
                if (g >> q) & 1:
                    s |= 1 << i
            self.cols[q] = s

    def syndrome(self, frames: np.ndarray) -> np.ndarray:
        out = np.zeros(frames.shape, dtype=np.uint64)
        for q in range(self.n):
            bit = (frames >> np.uint64(q)) & np.uint64(1)
            out ^= bit * self.cols[q]
        return out

    def logical_class(self, frames: np.ndarray) -> np.ndarray:
        overlap = frames & np.uint64(self.logical_x)
        return (np.bitwise_count(overlap) & np.uint64(1)).astype(np.uint64)


def _sample_prep_syndromes(
    tables: EffectTables,
    plan: SubsetPlan,
    n_needed: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Accepted-preparation Z-side syndromes, with the acceptance rate.

    Rejected preparations are redrawn (the experiment restarts them); the
    fault-free mass is represented by zero-syndrome entries in proportion.
    """
    from .noise import _draw_distinct

    pair_probs = np.array(plan.probabilities)
    collected: list[np.ndarray] = []
    total = 0
    attempts = 0.0
    accepted = 0.0
    trivial_rate = plan.p_trivial
    while total < n_needed:
        m = max(int((n_needed - total) * 1.6) + 1024, 2048)
        # How many of the drawn attempts are fault-free:
        n_trivial = int(rng.binomial(m, trivial_rate))
        n_noisy = m - n_trivial
        attempts += m
        accepted += n_trivial
        synds = [np.zeros(n_trivial, dtype=np.uint64)]
        if n_noisy:
            bucket = rng.choice(len(plan.pairs), size=n_noisy, p=pair_probs)
            acc_lo = np.zeros(n_noisy, dtype=np.uint64)
            acc_hi = np.zeros(n_noisy, dtype=np.uint64)
            acc_sc = np.zeros(n_noisy, dtype=np.uint64)
            for b, (fp, fq) in enumerate(plan.pairs):
                rows = np.nonzero(bucket == b)[0]
                if rows.size == 0:
                    continue
                for kind, k, offs, cnts, limit in (
                    ("p", fp, tables.p_offsets, tables.p_counts, tables.l_p),
                    ("q", fq, tables.q_offsets, tables.q_counts, tables.l_q),
                ):
                    if not k:
                        continue
                    locs = _draw_distinct(rng, rows.size, k, limit)
                    for col in range(k):
                        loc = locs[:, col]
                        var = offs[loc] + (rng.random(rows.size) * cnts[loc]).astype(np.int64)
                        acc_lo[rows] ^= tables.flag_lo[var]
                        acc_hi[rows] ^= tables.flag_hi[var]
                        acc_sc[rows] ^= tables.sc[var]
            ok = (acc_lo == 0) & (acc_hi == 0)
            accepted += float(ok.sum())
            synds.append(acc_sc[ok])
        chunk_synd = np.concatenate(synds)
        rng.shuffle(chunk_synd)
        collected.append(chunk_synd)
        total += len(chunk_synd)
    all_synd = np.concatenate(collected)[:n_needed]
    return all_synd, accepted / attempts


def run_steane_qec_experiment(cfg: SteaneQecConfig, circuit: Circuit | None = None) -> SteaneQecResult:
    """Monte Carlo estimate of the experiment's logical error rate.

    ``circuit`` is the resource-preparation circuit (required unless the
    mode is ``no_qec``); it should be assembled with Z gadgets stripped for
    the ``ft_x_only`` ablation.
    """
    state = cfg.state
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    n = state.n
    zmap = _ZSyndromeMap(state)
    p = cfg.p
    n_samples = cfg.samples
    strong = cfg.data_noise_multiplier * p
    if strong > 1:
        raise ValueError("data noise multiplier too large for this p")

    # Z errors on the computational block are graded by the logical X that
    # stabilizes its |+..+> state, so the decode tables are built on the
    # X-stabilized view of the code.
    state_plus = replace(state, stabilizing_basis="X", state_label="|+>")
    mw = build_mw_lut(state_plus, "Z", (state.d - 1) // 2) if state.d > 2 else None
    ideal = build_ideal_class_table(state_plus, "Z")

    def depolarizing_z(n_rows: int, rate: float) -> np.ndarray:
        # Z component of single-qubit depolarizing: Z or Y, 2/3 of faults.
        bits = rng.random((n_rows, n)) < (rate * 2.0 / 3.0)
        return _pack_frames(bits)

    if cfg.prep_mode == NO_QEC:
        frames = depolarizing_z(n_samples, strong) ^ depolarizing_z(n_samples, strong)
        synd_r = zmap.syndrome(frames)
        cls_r = zmap.logical_class(frames)
        errors = _ideal_decode_errors(synd_r, cls_r, ideal)
        rate = errors / n_samples
        return SteaneQecResult(cfg, errors, n_samples, rate, wilson_interval(errors, n_samples), 1.0)

    if circuit is None:
        raise ValueError("preparation circuit required for QEC modes")
    tables = build_effect_tables(circuit, state, error_side="Z")
    lp, lq = count_fault_locations(circuit)
    plan = build_subset_plan(lp, lq, p, p / 100.0, max(n_samples, 10000))
    prep_synd, prep_acc = _sample_prep_syndromes(tables, plan, n_samples, rng)

    # Computational block round 1 (copied into the syndrome via the
    # transversal CX) and round 2 (after the correction).
    r1 = depolarizing_z(n_samples, strong)
    synd = prep_synd ^ zmap.syndrome(r1)
    frames = r1.copy()

    # Transversal CX noise: two-qubit depolarizing per pair, resource as
    # control; a Z on the resource side corrupts the syndrome, a Z on the
    # computational side joins the residual frame.
    pauli_bits = [(b & 1, (b >> 1) & 1, (b >> 2) & 1, (b >> 3) & 1) for b in range(1, 16)]
    za_of = np.array([za for (_, za, _, _) in pauli_bits], dtype=np.uint64)
    zb_of = np.array([zb for (_, _, _, zb) in pauli_bits], dtype=np.uint64)
    for i in range(n):
        faulty = rng.random(n_samples) < p
        idx = np.nonzero(faulty)[0]
        if idx.size == 0:
            continue
        pat = rng.integers(0, 15, size=idx.size)
        synd[idx] ^= za_of[pat] * zmap.cols[i]
        frames[idx] ^= (zb_of[pat] << np.uint64(i)).astype(np.uint64)

    # Idle accounting during the gadget: one memory location per qubit of
    # both blocks for the transversal step, one per computational qubit
    # while the resource is measured.
    q_rate = p / 100.0
    synd ^= zmap.syndrome(depolarizing_z(n_samples, q_rate))  # resource idles
    frames ^= depolarizing_z(n_samples, q_rate) ^ depolarizing_z(n_samples, q_rate)

    # Destructive X-basis readout of the resource: the literal bit-flip
    # measurement channel (an X before the measurement) commutes with the
    # X-basis readout, so it contributes no outcome flips, matching the
    # treatment of X-basis flag measurements in the preparation circuit.

    # Train the ML layer on half the samples, evaluate on the other half.
    # The target class makes the corrected block benign for later ideal
    # decoding: the block's own class plus the ideal class of the syndrome
    # junk contributed by the resource, gate and readout noise.
    n_train = n_samples // 2
    junk = synd ^ zmap.syndrome(r1)
    junk_ideal = np.zeros(n_samples, dtype=np.uint64)
    for s in np.unique(junk).tolist():
        junk_ideal[junk == s] = ideal.get(int(s), 0)
    labels = zmap.logical_class(r1) ^ junk_ideal
    ml = MLTable(synd_bits=len(zmap.xgens), class_bits=1)
    for s, c in zip(synd[:n_train].tolist(), labels[:n_train].tolist()):
        ml.weights.setdefault(int(s), {})
        cls_map = ml.weights[int(s)]
        cls_map[int(c)] = cls_map.get(int(c), 0.0) + 1.0

    eval_slice = slice(n_train, n_samples)
    synd_eval = synd[eval_slice]
    frames_eval = frames[eval_slice] ^ depolarizing_z(n_samples - n_train, strong)

    corr_class = np.zeros(len(synd_eval), dtype=np.uint64)
    uniq = np.unique(synd_eval)
    policy = DecodePolicy()
    for s in uniq.tolist():
        verdict = decode(int(s), ml, mw, policy)
        cls = 0 if verdict == "discard" else int(verdict)
        corr_class[synd_eval == s] = cls

    synd_r = zmap.syndrome(frames_eval) ^ synd_eval
    cls_r = zmap.logical_class(frames_eval) ^ corr_class
    errors = _ideal_decode_errors(synd_r, cls_r, ideal)
    kept = len(synd_eval)
    rate = errors / kept
    return SteaneQecResult(cfg, errors, kept, rate, wilson_interval(errors, kept), prep_acc)


def _ideal_decode_errors(synd_r: np.ndarray, cls_r: np.ndarray, ideal: dict[int, int]) -> int:
    """Count samples whose residual is logically nontrivial after an ideal
    minimum-weight correction of its syndrome."""
    errors = 0
    uniq = np.unique(synd_r)
    for s in uniq.tolist():
        ideal_cls = ideal.get(int(s), 0)
        sel = synd_r == s
        errors += int((cls_r[sel] != ideal_cls).sum())
    return errors
