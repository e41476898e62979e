import numpy as np

from ftprep.circuit import Circuit, CXGate, FinalMeasure, FlagMeasure, Init
from ftprep.css import CssState
from ftprep.pauli import PauliOperator
from ftprep.tableau import Tableau, run_tableau, tableau_check_circuit


def bell_state() -> CssState:
    return CssState(
        name="bell",
        n=2,
        k=0,
        d=2,
        x_generators=(PauliOperator(2, x=0b11),),
        z_generators=(PauliOperator(2, z=0b11),),
        logical_x_reps=(),
        logical_z_reps=(),
    )


def bell_circuit() -> Circuit:
    ops = (Init(0, "+"), Init(1, "0"), CXGate(0, 1), FinalMeasure("Z"))
    return Circuit(2, ("control", "target"), ("c0", "t0"), (0, 1), ops)


def test_bell_preparation_checks():
    assert tableau_check_circuit(bell_circuit(), bell_state()) is None


def test_missing_gate_is_detected():
    ops = (Init(0, "+"), Init(1, "0"), FinalMeasure("Z"))
    circ = Circuit(2, ("control", "target"), ("c0", "t0"), (0, 1), ops)
    mismatch = tableau_check_circuit(circ, bell_state())
    assert mismatch is not None
    assert mismatch.kind == "unsatisfied-stabilizer"


def test_deterministic_flag_requirement():
    # Measuring a flag that is still entangled must be reported.
    ops = (
        Init(0, "+"),
        Init(2, "0"),
        CXGate(0, 2),
        FlagMeasure(2, "Z", 0),
        Init(1, "0"),
        CXGate(0, 1),
        FinalMeasure("Z"),
    )
    circ = Circuit(
        3, ("control", "target", "flag_x"), ("c0", "t0", "f0"), (0, 1, None), ops
    )
    mismatch = tableau_check_circuit(circ, bell_state())
    assert mismatch is not None
    assert mismatch.kind == "nondeterministic-flag"


def test_pauli_fault_flips_flag():
    # A hook X on the control between bracket gates flips the flag.
    ops = (
        Init(0, "+"),
        Init(2, "0"),
        CXGate(0, 2),
        Init(1, "0"),
        CXGate(0, 1),
        CXGate(0, 2),
        FlagMeasure(2, "Z", 0),
        FinalMeasure("Z"),
    )
    circ = Circuit(
        3, ("control", "target", "flag_x"), ("c0", "t0", "f0"), (0, 1, None), ops
    )
    # fault after op 2 (the first bracket CX): X on the control
    _, outcomes, deterministic = run_tableau(circ, faults=[(2, 0b001, 0)])
    assert deterministic[0] and outcomes[0] == 1
    # the same fault after the closing bracket CX leaves the flag at +1
    _, outcomes, _ = run_tableau(circ, faults=[(5, 0b001, 0)])
    assert outcomes[0] == 0


def test_measurement_collapse_statistics():
    tab = Tableau(1)
    tab.h(0)
    rng = np.random.default_rng(1)
    out, det = tab.measure_z(0, rng)
    assert not det
    out2, det2 = tab.measure_z(0, rng)
    assert det2 and out2 == out


def test_assembled_circuit_mutation_detected():
    from ftprep.assemble import assemble_ft_circuit, schedule_circuit
    from ftprep.bipartite import best_of_trials
    from ftprep.catalog import get_state
    from ftprep.library import GadgetLibrary

    state = get_state("steane")
    bip = best_of_trials(state, 100, 7)
    asm = assemble_ft_circuit(state, bip, GadgetLibrary.bundled(), seed=5)
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=10, seed=3)
    assert tableau_check_circuit(circ, state) is None
    # deleting any single CX breaks the prepared state or a flag outcome
    cut = next(i for i, op in enumerate(circ.ops) if isinstance(op, CXGate))
    mutated = circ.with_ops([op for i, op in enumerate(circ.ops) if i != cut])
    assert tableau_check_circuit(mutated, state) is not None
