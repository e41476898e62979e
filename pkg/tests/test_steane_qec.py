import numpy as np
import pytest

from ftprep.assemble import assemble_ft_circuit, schedule_circuit
from ftprep.catalog import get_state
from ftprep.library import GadgetLibrary
from ftprep.pipeline import build_preparation_circuit
from ftprep.steane_qec import (
    FT_X_ONLY,
    FULL_FT,
    NO_QEC,
    SteaneQecConfig,
    _ZSyndromeMap,
    run_steane_qec_experiment,
)
from ftprep.verify import verify_fault_tolerance


@pytest.fixture(scope="module")
def library():
    return GadgetLibrary.bundled()


@pytest.fixture(scope="module")
def color17_prep(library):
    state = get_state("color17")
    prep = build_preparation_circuit(
        state, library, bip_trials=100, assembly_candidates=3, shuffles=50, seed=9,
        use_trivial_gadgets=False,
    )
    return state, prep


def test_negligible_noise_gives_zero_errors(color17_prep):
    state, prep = color17_prep
    cfg = SteaneQecConfig(state, 1e-9, samples=3000, prep_mode=FULL_FT, seed=1)
    res = run_steane_qec_experiment(cfg, prep.circuit)
    assert res.logical_errors == 0
    for mode in (NO_QEC,):
        cfg = SteaneQecConfig(state, 1e-9, samples=3000, prep_mode=mode, seed=1)
        assert run_steane_qec_experiment(cfg).logical_errors == 0


def test_transversal_propagation_reads_single_z_errors():
    # A Z on computational qubit i copies onto the resource block and shows
    # up as the X-generator syndrome column of qubit i.
    state = get_state("color17")
    zmap = _ZSyndromeMap(state)
    for i in range(state.n):
        frames = np.array([1 << i], dtype=np.uint64)
        synd = zmap.syndrome(frames)[0]
        expected = 0
        for j, g in enumerate(state.x_generators):
            if (g.x >> i) & 1:
                expected |= 1 << j
        assert int(synd) == expected


def test_ablated_circuit_keeps_x_ft_loses_z_ft(color17_prep, library):
    state, prep = color17_prep
    asm = assemble_ft_circuit(
        state, prep.bipartite, library,
        z_gadget_t_override=0, allow_uncertified_override=True, seed=5,
    )
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=30, seed=3)
    assert verify_fault_tolerance(circ, state, 2, "X") is None
    ce = verify_fault_tolerance(circ, state, 2, "Z")
    assert ce is not None
    assert len(ce.faults) <= 2


def test_qec_helps_at_moderate_rate(color17_prep):
    state, prep = color17_prep
    cfg_full = SteaneQecConfig(
        state, 2.5e-3, samples=400_000, prep_mode=FULL_FT,
        data_noise_multiplier=6.0, seed=77,
    )
    cfg_none = SteaneQecConfig(
        state, 2.5e-3, samples=400_000, prep_mode=NO_QEC,
        data_noise_multiplier=6.0, seed=77,
    )
    full = run_steane_qec_experiment(cfg_full, prep.circuit)
    none = run_steane_qec_experiment(cfg_none)
    assert full.logical_error_rate <= none.logical_error_rate
    assert 0 < full.prep_acceptance < 1


def test_no_qec_matches_ideal_decoding_prediction():
    # With a single-round Z channel the ideal decoder fixes every
    # single-qubit error, so errors need weight >= 3 across both rounds.
    state = get_state("color17")
    cfg = SteaneQecConfig(state, 1e-4, samples=200_000, prep_mode=NO_QEC, seed=5)
    res = run_steane_qec_experiment(cfg)
    # two rounds at z-rate 2/3*1e-3 each: triple coincidences are ~1e-8
    assert res.logical_error_rate < 1e-4
