import pytest

from ftprep.assemble import assemble_ft_circuit, schedule_circuit
from ftprep.bipartite import best_of_trials
from ftprep.catalog import get_state
from ftprep.decoder import build_ml_lut, build_mw_lut
from ftprep.gadgets import discover_gadget, hadamard_conjugate_gadget
from ftprep.library import GadgetLibrary
from ftprep.noise import SampleSet
from ftprep.serialization import (
    ParseError,
    load_ml_table,
    load_mw_table,
    load_sample_set,
    parse_circuit,
    parse_gadget,
    sample_set_to_csv,
    save_ml_table,
    save_mw_table,
    save_sample_set,
    serialize_circuit,
    serialize_gadget,
)


def test_circuit_round_trip_byte_identical():
    state = get_state("steane")
    lib = GadgetLibrary.bundled()
    bip = best_of_trials(state, 100, 7)
    asm = assemble_ft_circuit(state, bip, lib, seed=5)
    circ = schedule_circuit(asm, "min_max_qubits", shuffles=20, seed=3)
    text = serialize_circuit(circ, "steane", "|0>")
    parsed, code, label = parse_circuit(text)
    assert code == "steane" and label == "|0>"
    # Internal qubit ids may renumber; the text form is the identity.
    assert serialize_circuit(parsed, code, label) == text
    parsed.validate()
    assert parsed.cx_count == circ.cx_count
    assert parsed.flag_count == circ.flag_count


def test_gadget_round_trip_and_line_counts():
    g = discover_gadget(2, 5, 2).gadget
    text = serialize_gadget(g)
    lines = text.strip().splitlines()
    assert sum(1 for l in lines if l.startswith("CX")) == 9
    assert sum(1 for l in lines if l.startswith("MZ")) == 2
    parsed = parse_gadget(text)
    assert parsed == g
    z = hadamard_conjugate_gadget(g)
    z_text = serialize_gadget(z)
    assert sum(1 for l in z_text.splitlines() if l.startswith("MX")) == 2
    assert parse_gadget(z_text) == z


def test_unknown_opcode_is_reported_with_line():
    with pytest.raises(ParseError) as err:
        parse_circuit("CIRCUIT code=x state=y\nBOGUS c0\n")
    assert err.value.line_no == 2


def test_lut_round_trips(tmp_path):
    state = get_state("steane")
    mw = build_mw_lut(state, "X", 1)
    mw_path = tmp_path / "mw.json"
    save_mw_table(mw, mw_path)
    assert load_mw_table(mw_path).entries == mw.entries

    samples = SampleSet(3, 1)
    samples.add(0b101, 1, 7, 0.5)
    samples.add(0, 0, 100, 99.0)
    ml = build_ml_lut(samples)
    ml_path = tmp_path / "ml.json"
    save_ml_table(ml, ml_path)
    loaded = load_ml_table(ml_path)
    assert loaded.weights == ml.weights
    assert loaded.counts == ml.counts


def test_sample_set_round_trip_and_csv(tmp_path):
    samples = SampleSet(4, 1)
    samples.add(3, 1, 17, 0.25)
    samples.add(0, 0, 5000, 0.97)
    path = tmp_path / "samples.npz"
    save_sample_set(samples, path)
    loaded = load_sample_set(path)
    assert loaded.counts == samples.counts
    assert loaded.weights == samples.weights
    csv_path = tmp_path / "samples.csv"
    sample_set_to_csv(samples, csv_path)
    text = csv_path.read_text()
    assert text.startswith("syndrome,class,count,weight")
    assert "0x3,1," in text
