import pytest

from ftprep.gadgets import gadget_ft_test
from ftprep.library import GadgetLibrary


@pytest.fixture(scope="module")
def bundled():
    return GadgetLibrary.bundled()


def test_bundled_entries_match_published_flag_counts(bundled):
    # Rows of the gadget-size table reproduced by the shipped library.
    expected = {
        (1, 4): 1,
        (1, 10): 1,
        (2, 4): 1,
        (2, 5): 2,
        (2, 6): 3,
        (2, 11): 3,
        (2, 12): 4,
        (2, 13): 4,
        (3, 5): 2,
        (3, 7): 4,
        (3, 8): 4,
        (3, 9): 5,
        (3, 11): 5,
        (3, 12): 6,
    }
    for (t, r), flags in expected.items():
        assert bundled.get(t, r).m == flags, (t, r)


def test_bundled_entries_pass_ft_test(bundled):
    for (t, r), entry in list(bundled.entries.items())[:12]:
        assert gadget_ft_test(entry.gadget)


def test_optimality_markers(bundled):
    assert bundled.is_optimal(2, 5)
    assert bundled.is_optimal(3, 7)
    # the deep exhausts were budget-capped during generation
    assert bundled.is_optimal(2, 12) is False


def test_on_miss_discovery_and_persistence(tmp_path):
    lib = GadgetLibrary()
    g = lib.get(2, 5)
    assert g.m == 2
    assert lib.is_optimal(2, 5)
    path = tmp_path / "lib.json"
    lib.save(path)
    loaded = GadgetLibrary.load(path)
    assert loaded.get(2, 5) == g
    assert loaded.is_optimal(2, 5)


def test_gate_count_rule(bundled):
    for (t, r), entry in bundled.entries.items():
        assert len(entry.gadget.gates) == r + 2 * entry.gadget.m
