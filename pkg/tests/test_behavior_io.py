"""Behavior file format: round trips, parse failures, validation on load."""

import numpy as np
import pytest

from nsbox.behavior_io import (
    dumps_behavior,
    load_behavior,
    loads_behavior,
    save_behavior,
)
from nsbox.boxes import make_pr_box, make_tsirelson_box
from nsbox.errors import BehaviorFormatError, NotNormalized

SAMPLE = """\
# a hand-written file
name: pr
alphabets: 2 2 2 2
table:
0.5 0 0 0.5
0.5 0 0 0.5   # trailing comment
0.5 0 0 0.5
0 0.5 0.5 0
"""


def test_parse_hand_written_file():
    b = loads_behavior(SAMPLE)
    assert b.name == "pr"
    np.testing.assert_allclose(b.table, make_pr_box().table)


def test_round_trip_is_exact():
    for b in (make_pr_box(), make_tsirelson_box()):
        again = loads_behavior(dumps_behavior(b))
        assert again.name == b.name
        assert np.array_equal(again.table, b.table)  # repr round-trips floats


def test_file_round_trip(tmp_path):
    path = tmp_path / "ts.behavior"
    save_behavior(make_tsirelson_box(), path)
    again = load_behavior(path)
    assert np.array_equal(again.table, make_tsirelson_box().table)


def test_whitespace_and_layout_are_free():
    mashed = "name: x\nalphabets: 2 2 2 2\ntable: " + " ".join(
        str(v) for v in make_pr_box().table.reshape(-1)
    )
    b = loads_behavior(mashed)
    np.testing.assert_allclose(b.table, make_pr_box().table)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("alphabets: 2 2 2\ntable:\n1", "expected 4 alphabet sizes"),
        ("alphabets: a b c d\ntable:\n1", "must be integers"),
        ("table:\n0.5", "missing 'alphabets:'"),
        ("alphabets: 2 2 2 2\n", "missing 'table:'"),
        ("alphabets: 2 2 2 2\ntable:\n0.5 0.5", "needs 16 entries"),
        ("alphabets: 2 2 2 2\ntable:\n" + "zap " * 16, "is not a number"),
        ("wat: 3\nalphabets: 2 2 2 2\ntable:\n" + "0 " * 16, "unknown key"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(BehaviorFormatError, match=fragment):
        loads_behavior(text)


def test_loaded_tables_are_validated():
    bad = "alphabets: 2 2 2 2\ntable:\n" + " ".join(["0.3"] * 16)
    with pytest.raises(NotNormalized):
        loads_behavior(bad)


def test_nameless_behavior_round_trips():
    text = "name:\nalphabets: 2 2 2 2\ntable:\n" + " ".join(["0.25"] * 16)
    b = loads_behavior(text)
    assert b.name == ""
    assert loads_behavior(dumps_behavior(b)).name == ""
