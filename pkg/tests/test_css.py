import itertools

import numpy as np
import pytest

from ftprep.catalog import get_state
from ftprep.css import (
    CssState,
    GroupTooLargeError,
    max_coset_weight,
    min_weight_modulo,
    syndrome_and_class,
    validate_css_state,
)
from ftprep.pauli import PauliOperator


def test_min_weight_of_group_element_is_zero():
    steane = get_state("steane")
    gen = steane.x_generators[0]
    assert min_weight_modulo(gen, list(steane.x_generators)) == 0


def test_min_weight_full_support_stabilizer_reduction():
    # A weight-4 error on the far targets reduces to weight 2 against the
    # full-support operator X_c X_t1..X_t5.
    n = 6  # c plus five targets
    err = PauliOperator(n, x=0b111100)  # t2..t5
    group = [PauliOperator(n, x=0b111111)]
    assert min_weight_modulo(err, group) == 2


def test_min_weight_matches_brute_force():
    steane = get_state("steane")
    gens = list(steane.x_generators)
    rng = np.random.default_rng(3)
    for _ in range(20):
        qubits = rng.choice(7, size=4, replace=False)
        mask = 0
        for q in qubits:
            mask |= 1 << int(q)
        err = PauliOperator(7, x=mask)
        # independent oracle: enumerate all 8 products directly
        best = 8
        for bits in range(8):
            acc = mask
            for j in range(3):
                if (bits >> j) & 1:
                    acc ^= gens[j].x
            best = min(best, bin(acc).count("1"))
        assert min_weight_modulo(err, gens) == best


def test_min_weight_group_cap():
    ops = [PauliOperator(30, x=1 << i) for i in range(25)]
    with pytest.raises(GroupTooLargeError):
        min_weight_modulo(PauliOperator(30, x=1), ops)


def test_syndrome_identity_error():
    steane = get_state("steane")
    synd, cls = syndrome_and_class(PauliOperator(7), steane, "X")
    assert synd == 0 and cls == 0


def test_syndrome_single_qubit_error():
    steane = get_state("steane")
    synd, cls = syndrome_and_class(PauliOperator(7, x=1), steane, "X")
    expected = 0
    for i, zg in enumerate(steane.z_generators):
        if zg.z & 1:
            expected |= 1 << i
    assert synd == expected
    assert cls == (steane.logical_z_reps[0].z & 1)


def test_syndrome_of_stabilizer_product_is_trivial():
    steane = get_state("steane")
    prod = steane.x_generators[0].compose(steane.x_generators[1])
    synd, cls = syndrome_and_class(prod, steane, "X")
    assert synd == 0 and cls == 0


def test_syndrome_linearity():
    state = get_state("color17")
    rng = np.random.default_rng(9)
    for _ in range(30):
        e = PauliOperator(17, x=int(rng.integers(0, 2**17)))
        f = PauliOperator(17, x=int(rng.integers(0, 2**17)))
        se, ce = syndrome_and_class(e, state, "X")
        sf, cf = syndrome_and_class(f, state, "X")
        sef, cef = syndrome_and_class(e.compose(f), state, "X")
        assert sef == se ^ sf
        assert cef == ce ^ cf


def test_validate_catalog_entries():
    for name in ("steane", "color17", "surface9", "surface25", "golay"):
        assert validate_css_state(get_state(name)).ok


def test_validate_flags_anticommuting_generator():
    steane = get_state("steane")
    bad = CssState(
        name="bad",
        n=7,
        k=1,
        d=3,
        x_generators=steane.x_generators,
        z_generators=(PauliOperator(7, z=0b0000001),) + steane.z_generators[1:],
        logical_x_reps=steane.logical_x_reps,
        logical_z_reps=steane.logical_z_reps,
    )
    report = validate_css_state(bad)
    assert not report.ok
    assert any(i.kind == "commutation" for i in report.issues)


def test_validate_flags_duplicate_generator():
    steane = get_state("steane")
    bad = CssState(
        name="dup",
        n=7,
        k=1,
        d=3,
        x_generators=(steane.x_generators[0],) * 2 + (steane.x_generators[2],),
        z_generators=steane.z_generators,
        logical_x_reps=steane.logical_x_reps,
        logical_z_reps=steane.logical_z_reps,
    )
    report = validate_css_state(bad)
    assert not report.ok
    assert any(i.kind == "rank" for i in report.issues)


def test_max_coset_weight_paper_values():
    assert max_coset_weight(get_state("steane"), "Z") == 1
    assert max_coset_weight(get_state("golay"), "Z") == 3


def test_max_coset_weight_x_side():
    # Without the logical in the reduction group, the logical coset keeps
    # its full distance-3 weight.
    assert max_coset_weight(get_state("steane"), "X") == 3


def test_distance_consistency_small_codes():
    # Distinct correctable errors with the same syndrome share a class.
    for name, wmax in (("steane", 1), ("color17", 2)):
        state = get_state(name)
        seen: dict[int, int] = {}
        for w in range(1, wmax + 1):
            for qubits in itertools.combinations(range(state.n), w):
                mask = 0
                for q in qubits:
                    mask |= 1 << q
                synd, cls = syndrome_and_class(PauliOperator(state.n, x=mask), state, "X")
                if synd in seen:
                    assert seen[synd] == cls
                else:
                    seen[synd] = cls


def test_min_weight_empty_group_is_weight():
    err = PauliOperator(5, x=0b10110)
    assert min_weight_modulo(err, []) == 3
