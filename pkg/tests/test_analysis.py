"""Bounds, conformance checks, the comparison table, gain, arrival order."""

import pytest

from ringcast.analysis import (
    EXACT,
    UPPER_BOUND,
    arrival_order,
    bounds_for,
    check_run,
    comparison_table,
    display_l,
    nc_gain,
)
from ringcast.engine import run
from ringcast.protocols import build_schedule
from ringcast.topology import build_cycle


def test_bounds_pinned_values():
    b = bounds_for("routing", 9)
    assert (b.t_lb, b.t_ub, b.l_kind, b.l_value) == (15, 18, EXACT, 34)
    b = bounds_for("nc-gaming", 7)
    assert (b.t_lb, b.t_ub, b.l_kind, b.l_value) == (10, 13, EXACT, 19)
    b = bounds_for("routing", 2)
    assert (b.t_lb, b.t_ub, b.l_kind, b.l_value) == (1, 4, EXACT, 3)
    b = bounds_for("circular", 8)
    assert (b.t_lb, b.t_ub, b.l_kind, b.l_value) == (24, 32, UPPER_BOUND, 3)
    b = bounds_for("nc-multicast", 7)
    assert (b.t_lb, b.t_ub, b.l_kind, b.l_value) == (12, 16, UPPER_BOUND, 2)


def test_bounds_input_validation():
    with pytest.raises(ValueError):
        bounds_for("bogus", 5)
    with pytest.raises(ValueError):
        bounds_for("routing", 1)


@pytest.mark.parametrize("n", range(2, 41))
def test_bounds_sane(n):
    for proto in ("circular", "nc-multicast", "routing", "nc-gaming"):
        b = bounds_for(proto, n)
        assert b.t_lb <= b.t_ub
        assert b.l_value > 0


class FakeResult:
    def __init__(self, T, L):
        self.T, self.L = T, L


def test_check_run_verdicts():
    b5 = bounds_for("routing", 5)  # [8, 11], L exactly 14
    assert check_run(FakeResult(8, 14), b5).passed
    assert check_run(FakeResult(11, 14), b5).passed  # at the upper bound
    assert not check_run(FakeResult(12, 14), b5).passed
    assert not check_run(FakeResult(7, 14), b5).passed
    assert not check_run(FakeResult(8, 13), b5).l_ok
    nc5 = bounds_for("nc-gaming", 5)
    assert check_run(FakeResult(7, 12), nc5).passed
    circ = bounds_for("circular", 8)  # coefficient 3
    assert check_run(FakeResult(24, 72), circ).passed
    assert not check_run(FakeResult(24, 73), circ).l_ok


TABLE_CELLS = {
    # (n, protocol) -> (t_lb, t_ub, l_column)
    (7, "circular"): (21, 28, 42), (7, "nc-multicast"): (12, 16, 24),
    (7, "routing"): (12, 15, 23), (7, "nc-gaming"): (10, 13, 19),
    (8, "circular"): (24, 32, 72), (8, "nc-multicast"): (12, 16, 36),
    (8, "routing"): (12, 15, 27), (8, "nc-gaming"): (10, 13, 23),
    (9, "circular"): (27, 36, 81), (9, "nc-multicast"): (15, 20, 60),
    (9, "routing"): (15, 18, 34), (9, "nc-gaming"): (13, 16, 30),
}


def test_comparison_table_reproduces_reference_cells():
    report = comparison_table([7, 8, 9])
    assert len(report.rows) == 12
    for row in report.rows:
        want = TABLE_CELLS[(row["n"], row["protocol"])]
        got = (row["t_lb"], row["t_ub"], row["l_formula_or_bound"])
        assert got == want, (row["n"], row["protocol"])
        assert row["t_measured"] >= 1 and row["l_measured"] >= 1
    assert any("t_ub" in note for note in report.footnotes)


def test_table_gain_only_on_coded_gaming_rows():
    report = comparison_table([8])
    gains = {row["protocol"]: row.get("gain") for row in report.rows}
    assert gains["nc-gaming"] == pytest.approx((14 - 12) / 14)
    assert gains["circular"] is None and gains["routing"] is None


def test_display_l_quotes_the_inconsistent_cell():
    assert display_l(bounds_for("nc-multicast", 9)) == 60  # 3 * t_ub
    assert display_l(bounds_for("nc-multicast", 8)) == 36  # 3 * t_lb
    assert display_l(bounds_for("routing", 9)) == 34  # exact


def test_nc_gain_values():
    assert nc_gain(5) == pytest.approx(0.125)
    assert nc_gain(2) == 0  # identical periods, coding changes nothing


def test_coding_never_hurts():
    for n in range(4, 41):
        top = build_cycle(n)
        plain = run(build_schedule("routing", top))
        coded = run(build_schedule("nc-gaming", top))
        assert coded.L < plain.L
        assert coded.T <= plain.T
        if top.long_rounds >= 1:
            assert coded.T < plain.T


@pytest.mark.parametrize("proto", ["routing", "nc-gaming"])
def test_arrival_order_small_n(proto):
    expect = {
        5: [(0, (1, 5)), (1, (2, 4)), (2, (3,))],
        4: [(0, (1, 4)), (1, (2, 3))],
        2: [(0, (1, 2))],
    }
    for n, want in expect.items():
        result = run(build_schedule(proto, build_cycle(n)))
        order, ok = arrival_order(result.trace, n)
        assert ok
        assert order == want


def test_arrival_order_flags_deviation():
    result = run(build_schedule("circular", build_cycle(6)))
    _, ok = arrival_order(result.trace, 6)
    assert not ok  # one-directional relay delivers in ring order instead
