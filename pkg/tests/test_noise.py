import math

import numpy as np
import pytest

from ftprep.assemble import assemble_ft_circuit, schedule_circuit
from ftprep.bipartite import best_of_trials, synthesize_bipartite
from ftprep.catalog import get_state
from ftprep.circuit import Circuit, CXGate, FinalMeasure, FlagMeasure, Init
from ftprep.library import GadgetLibrary
from ftprep.noise import (
    DegeneratePlanError,
    NoiseModel,
    build_effect_tables,
    build_subset_plan,
    count_fault_locations,
    frame_replay_check,
    run_monte_carlo,
    wilson_interval,
)


@pytest.fixture(scope="module")
def library():
    return GadgetLibrary.bundled()


@pytest.fixture(scope="module")
def steane_prepared(library):
    state = get_state("steane")
    bip = best_of_trials(state, 200, 7)
    asm = assemble_ft_circuit(state, bip, library, seed=5)
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=100, seed=3)
    return state, circ


def toy_circuit() -> Circuit:
    ops = (
        Init(0, "+"),
        Init(1, "0"),
        CXGate(0, 1),
        FlagMeasure(1, "Z", 0),
        FinalMeasure("Z"),
    )
    return Circuit(2, ("control", "flag_x"), ("c0", "f0"), (0, None), ops)


def test_count_locations_toy():
    assert count_fault_locations(toy_circuit()) == (4, 2)


def test_count_locations_empty():
    empty = Circuit(0, (), (), (), (FinalMeasure("Z"),))
    assert count_fault_locations(empty) == (0, 0)


def test_idle_counting_superadditive(library):
    # doubling the CX list more than doubles idle locations when lifetimes
    # overlap
    state = get_state("steane")
    bip = best_of_trials(state, 100, 7)
    asm = assemble_ft_circuit(state, bip, library, seed=5)
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=10, seed=3)
    _, l_q = count_fault_locations(circ)
    assert l_q > 2 * circ.cx_count  # several qubits live per step


def test_trivial_probability_matches_log_space_oracle(steane_prepared):
    _, circ = steane_prepared
    l_p, l_q = count_fault_locations(circ)
    p = 1e-3
    plan = build_subset_plan(l_p, l_q, p, p / 100, 10**6)
    oracle = math.exp(l_p * math.log1p(-p) + l_q * math.log1p(-p / 100))
    assert abs(plan.p_trivial - oracle) < 1e-12


def test_effective_count_low_rate_expansion(steane_prepared):
    _, circ = steane_prepared
    l_p, l_q = count_fault_locations(circ)
    p = 1e-6
    plan = build_subset_plan(l_p, l_q, p, p / 100, 10**4)
    first_order = plan.samples / (l_p * p + l_q * p / 100)
    assert abs(plan.effective_samples - first_order) / first_order < 0.01


def test_effective_count_grows_at_high_rate(steane_prepared):
    _, circ = steane_prepared
    l_p, l_q = count_fault_locations(circ)
    plan = build_subset_plan(l_p, l_q, 1e-2, 1e-4, 10**6)
    assert plan.effective_samples > 3.4 * plan.samples


def test_degenerate_plan():
    with pytest.raises(DegeneratePlanError):
        build_subset_plan(1, 0, 1e-9, 1e-11, 10)


def test_plan_forced_bucket():
    plan = build_subset_plan(3, 0, 1e-4, 1e-6, 1000)
    assert plan.pairs == ((1, 0),)


def test_wilson_interval_bounds():
    assert wilson_interval(0, 100)[0] == 0.0
    assert wilson_interval(100, 100)[1] == 1.0
    lo, hi = wilson_interval(2, 6140)
    assert abs(lo - 0.9e-4) < 0.05e-4
    assert abs(hi - 11.9e-4) < 0.05e-4


def test_monte_carlo_deterministic(steane_prepared):
    state, circ = steane_prepared
    l_p, l_q = count_fault_locations(circ)
    plan = build_subset_plan(l_p, l_q, 1e-3, 1e-5, 20000)
    tables = build_effect_tables(circ, state)
    a = run_monte_carlo(circ, state, NoiseModel(1e-3), plan, seed=5, tables=tables)
    b = run_monte_carlo(circ, state, NoiseModel(1e-3), plan, seed=5, tables=tables)
    assert a.accepted == b.accepted
    assert a.train.counts == b.train.counts
    assert a.test.counts == b.test.counts
    c = run_monte_carlo(circ, state, NoiseModel(1e-3), plan, seed=6, tables=tables)
    assert a.train.counts != c.train.counts


def test_acceptance_tends_to_one_at_low_rate(steane_prepared):
    state, circ = steane_prepared
    l_p, l_q = count_fault_locations(circ)
    plan = build_subset_plan(l_p, l_q, 1e-6, 1e-8, 1000)
    res = run_monte_carlo(circ, state, NoiseModel(1e-6), plan, seed=1)
    assert res.acceptance_rate > 0.999


def test_frame_agrees_with_tableau_oracle(steane_prepared):
    state, circ = steane_prepared
    tables = build_effect_tables(circ, state)
    assert frame_replay_check(circ, state, tables, 300, seed=11) == 300


def test_effect_linearity(steane_prepared):
    # the frame of a union of fault sets is the XOR of the individual frames
    state, circ = steane_prepared
    tables = build_effect_tables(circ, state)
    rng = np.random.default_rng(2)
    n = len(tables.var_pos)
    for _ in range(50):
        i, j = rng.integers(0, n, size=2)
        combined_lo = int(tables.flag_lo[i]) ^ int(tables.flag_lo[j])
        combined_sc = int(tables.sc[i]) ^ int(tables.sc[j])
        assert combined_lo == int(tables.flag_lo[i] ^ tables.flag_lo[j])
        assert combined_sc == int(tables.sc[i] ^ tables.sc[j])
