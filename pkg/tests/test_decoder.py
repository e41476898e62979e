import itertools

import numpy as np
import pytest

from ftprep.catalog import get_state
from ftprep.css import syndrome_and_class
from ftprep.decoder import (
    DISCARD,
    DecodePolicy,
    build_ideal_class_table,
    build_ml_lut,
    build_mw_lut,
    decode,
    evaluate_test_set,
)
from ftprep.noise import SampleSet
from ftprep.pauli import PauliOperator


def test_ml_majority_and_tie_break():
    samples = SampleSet(3, 1)
    samples.add(0b101, 0, 2, 2.0)
    samples.add(0b101, 1, 1, 1.0)
    ml = build_ml_lut(samples)
    assert ml.best_class(0b101) == 0
    tied = SampleSet(3, 1)
    tied.add(0b011, 0, 5, 5.0)
    tied.add(0b011, 1, 5, 5.0)
    assert build_ml_lut(tied).best_class(0b011) == 0  # lexicographically smallest


def test_trivial_stream_maps_zero_syndrome():
    samples = SampleSet(3, 1)
    samples.add(0, 0, 1000, 1.0)
    ml = build_ml_lut(samples)
    assert ml.best_class(0) == 0


def test_mw_steane_single_errors():
    steane = get_state("steane")
    mw = build_mw_lut(steane, "X", 1)
    assert len(mw) == 7
    assert all(w == 1 for _, w in mw.entries.values())


def test_mw_golay_perfect_coverage():
    golay = get_state("golay")
    mw = build_mw_lut(golay, "X", 3)
    assert len(mw) == 2047
    assert set(mw.entries) == set(range(1, 2048))


def test_mw_golay_code_capacity_exactness():
    golay = get_state("golay")
    mw = build_mw_lut(golay, "X", 3)
    for w in range(1, 4):
        for qubits in itertools.combinations(range(23), w):
            mask = 0
            for q in qubits:
                mask |= 1 << q
            synd, cls = syndrome_and_class(PauliOperator(23, x=mask), golay, "X")
            assert decode(synd, None, mw) == cls


def test_mw_empty_at_zero_weight():
    steane = get_state("steane")
    assert len(build_mw_lut(steane, "X", 0)) == 0


def test_decode_pipeline_order():
    samples = SampleSet(3, 1)
    samples.add(0b001, 1, 10, 10.0)
    ml = build_ml_lut(samples)
    steane = get_state("steane")
    mw = build_mw_lut(steane, "X", 1)
    # ML layer wins where trained, MW covers the rest, fallback is trivial.
    assert decode(0b001, ml, mw) == 1
    other = 0b010
    assert decode(other, ml, mw) == mw.entries[other][0]
    assert decode(0, None, None) == 0


def test_even_distance_discard():
    golay = get_state("golay")
    mw = build_mw_lut(golay, "X", 3)
    policy = DecodePolicy(even_distance_discard=True, t=3)
    weight3_synds = [s for s, (c, w) in mw.entries.items() if w == 3]
    weight1_synds = [s for s, (c, w) in mw.entries.items() if w == 1]
    assert decode(weight3_synds[0], None, mw, policy) == DISCARD
    assert decode(weight1_synds[0], None, mw, policy) != DISCARD


def test_evaluate_counts_fallback_errors():
    test = SampleSet(3, 1)
    test.add(0b111, 1, 4, 4.0)  # unseen syndrome, nontrivial class
    test.add(0, 0, 96, 96.0)
    report = evaluate_test_set(test, None, None)
    assert report.fallback == 100
    assert report.errors == 4
    assert report.logical_error_rate == pytest.approx(0.04)


def test_pipeline_dominance_on_simulated_steane():
    # ML plus MW never does worse than MW alone on the same test set.
    from ftprep.assemble import assemble_ft_circuit, schedule_circuit
    from ftprep.bipartite import best_of_trials
    from ftprep.library import GadgetLibrary
    from ftprep.noise import (
        NoiseModel,
        build_effect_tables,
        build_subset_plan,
        count_fault_locations,
        run_monte_carlo,
    )

    state = get_state("steane")
    lib = GadgetLibrary.bundled()
    bip = best_of_trials(state, 200, 7)
    asm = assemble_ft_circuit(state, bip, lib, seed=5)
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=50, seed=3)
    l_p, l_q = count_fault_locations(circ)
    plan = build_subset_plan(l_p, l_q, 2e-3, 2e-5, 400_000)
    res = run_monte_carlo(circ, state, NoiseModel(2e-3), plan, seed=8)
    ml = build_ml_lut(res.train)
    mw = build_mw_lut(state, "X", 1)
    with_ml = evaluate_test_set(res.test, ml, mw)
    without_ml = evaluate_test_set(res.test, None, mw)
    assert with_ml.logical_error_rate <= without_ml.logical_error_rate


def test_even_distance_policy_keeps_no_boundary_syndromes():
    golay = get_state("golay")
    mw = build_mw_lut(golay, "X", 3)
    policy = DecodePolicy(even_distance_discard=True, t=3)
    test = SampleSet(11, 1)
    for s, (c, w) in list(mw.entries.items())[:50]:
        test.add(s, c, 1, 1.0)
    report = evaluate_test_set(test, None, mw, policy)
    kept_weight3 = [
        s for s, (c, w) in mw.entries.items() if w == 3 and decode(s, None, mw, policy) != DISCARD
    ]
    assert not kept_weight3
    assert report.discarded == sum(1 for s, (c, w) in list(mw.entries.items())[:50] if w == 3)


def test_ideal_class_table_covers_all_syndromes():
    steane = get_state("steane")
    table = build_ideal_class_table(steane, "Z")
    assert len(table) == 8  # the Z side quotients to the syndrome space


def test_even_distance_code_discard_flow():
    # The [[20,2,6]] code: syndromes only explicable at weight t = 3 are
    # detectable but not correctable, so decoding discards them.
    import warnings

    state = get_state("selfdual20")
    assert state.d == 6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # weight-3 class collisions expected
        mw = build_mw_lut(state, "X", 3)
    policy = DecodePolicy(even_distance_discard=True, t=3)
    boundary = [s for s, (c, w) in mw.entries.items() if w == 3]
    correctable = [s for s, (c, w) in mw.entries.items() if w <= 2]
    assert boundary, "no weight-3 boundary syndromes found"
    assert all(decode(s, None, mw, policy) == DISCARD for s in boundary[:50])
    assert all(decode(s, None, mw, policy) != DISCARD for s in correctable[:50])


def test_color17_logical_ceiling_at_reference_rate():
    # Distance-5 preparation at p = 1e-3 stays below the 1e-5 ceiling with
    # 1e8 effective samples.
    from ftprep.library import GadgetLibrary
    from ftprep.noise import (
        NoiseModel,
        build_effect_tables,
        build_subset_plan,
        count_fault_locations,
        run_monte_carlo,
    )
    from ftprep.pipeline import build_preparation_circuit

    state = get_state("color17")
    lib = GadgetLibrary.bundled()
    prep = build_preparation_circuit(
        state, lib, bip_trials=150, assembly_candidates=4, shuffles=100,
        seed=9, use_trivial_gadgets=False,
    )
    circ = prep.circuit
    p = 1e-3
    l_p, l_q = count_fault_locations(circ)
    p_triv = (1 - p) ** l_p * (1 - p / 100) ** l_q
    plan = build_subset_plan(l_p, l_q, p, p / 100, int(1.01e8 * (1 - p_triv)))
    res = run_monte_carlo(circ, state, NoiseModel(p), plan, seed=42,
                          tables=build_effect_tables(circ, state))
    assert res.effective_samples >= 1e8
    rep = evaluate_test_set(res.test, build_ml_lut(res.train), build_mw_lut(state, "X", 2))
    assert rep.logical_error_rate < 1e-5
