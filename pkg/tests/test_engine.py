"""Slot execution, completion detection, and the frozen metric table.

The expected T/L values below were derived by hand-executing the schedules
(per-round delivery accounting) before the engine existed, then frozen;
the engine must reproduce them, not the other way round.
"""

import pytest

from ringcast.engine import (
    EmptyScheduleForObjective,
    IncompleteSchedule,
    NonDerivablePacket,
    Objective,
    objective_met,
    run,
    serialize_trace,
)
from ringcast.packets import CodedPacket
from ringcast.protocols import (
    Phase,
    Round,
    Rule,
    Schedule,
    TransmitIntent,
    build_schedule,
)
from ringcast.topology import build_cycle

# (protocol, n) -> (T, L), hand-derived
FROZEN = {
    ("routing", 2): (3, 3), ("routing", 3): (6, 6), ("routing", 4): (7, 9),
    ("routing", 5): (8, 14), ("routing", 6): (10, 17), ("routing", 7): (15, 23),
    ("routing", 8): (14, 27), ("routing", 9): (17, 34),
    ("nc-gaming", 2): (3, 3), ("nc-gaming", 3): (5, 5), ("nc-gaming", 4): (6, 7),
    ("nc-gaming", 5): (7, 12), ("nc-gaming", 6): (9, 15), ("nc-gaming", 7): (12, 19),
    ("nc-gaming", 8): (12, 23), ("nc-gaming", 9): (15, 30),
    ("circular", 2): (3, 3), ("circular", 3): (8, 8), ("circular", 4): (15, 15),
    ("circular", 5): (12, 24), ("circular", 6): (20, 35), ("circular", 7): (24, 48),
    ("circular", 8): (21, 63), ("circular", 9): (32, 80),
    ("nc-multicast", 2): (3, 3), ("nc-multicast", 3): (6, 6),
    ("nc-multicast", 4): (10, 10), ("nc-multicast", 5): (8, 16),
    ("nc-multicast", 6): (12, 21), ("nc-multicast", 7): (14, 28),
    ("nc-multicast", 8): (12, 36), ("nc-multicast", 9): (18, 46),
}


@pytest.mark.parametrize("proto,n", sorted(FROZEN))
def test_frozen_metrics(proto, n):
    result = run(build_schedule(proto, build_cycle(n)))
    assert (result.T, result.L) == FROZEN[(proto, n)]
    assert result.violations == []
    assert result.trace[-1].slot == result.T
    assert sum(len(ev.transmitters) for ev in result.trace) == result.L


def test_compaction_off_counts_silent_completion_slots():
    top = build_cycle(5)
    on = run(build_schedule("routing", top))
    off = run(build_schedule("routing", top), compaction=False)
    assert (on.T, off.T) == (8, 9)
    assert on.L == off.L == 14


def test_determinism():
    top = build_cycle(9)
    a = run(build_schedule("nc-gaming", top))
    b = run(build_schedule("nc-gaming", top))
    assert serialize_trace(a.trace) == serialize_trace(b.trace)
    assert (a.T, a.L) == (b.T, b.L)


def test_routing_n5_trace_follows_the_figures():
    result = run(build_schedule("routing", build_cycle(5)))
    tx = {ev.slot: {node: pkt.sorted_indices() for node, pkt in ev.transmitters}
          for ev in result.trace}
    assert tx[5] == {1: [2], 4: [3]}
    assert tx[6] == {2: [3], 5: [4]}
    assert tx[7] == {1: [0], 5: [0]}
    assert tx[8] == {1: [3], 4: [0]}  # the compacted final round
    # the only collision: the server while both its neighbors relay M_0
    coll = [(ev.slot, o.node) for ev in result.trace for o in ev.outcomes
            if o.kind == "collision"]
    assert coll == [(7, 0)]


def test_nc_gaming_n5_sends_coded_packets():
    result = run(build_schedule("nc-gaming", build_cycle(5)))
    tx = {ev.slot: {node: pkt.sorted_indices() for node, pkt in ev.transmitters}
          for ev in result.trace}
    assert tx[4] == {}  # round 1 subset-1 slot: counted, silent
    assert tx[5] == {1: [0, 2], 4: [3]}
    assert tx[6] == {2: [3], 5: [0, 4]}
    coll = [o for ev in result.trace for o in ev.outcomes if o.kind == "collision"]
    assert coll == []


def test_nc_multicast_xors_buffers():
    result = run(build_schedule("nc-multicast", build_cycle(5)))
    tx = {(ev.round, node): pkt.sorted_indices()
          for ev in result.trace for node, pkt in ev.transmitters}
    assert tx[(1, 2)] == [1, 3]
    assert tx[(1, 0)] == [1, 5]


def test_n2_multicast_completes_in_the_first_round():
    result = run(build_schedule("nc-multicast", build_cycle(2)))
    assert (result.T, result.completion_round) == (3, 0)


def test_routing_n4_completes_after_round_one():
    result = run(build_schedule("routing", build_cycle(4)))
    assert result.completion_round == 1
    assert (result.T, result.L) == (7, 9)


def test_circular_n8_completion_round():
    result = run(build_schedule("circular", build_cycle(8)))
    assert result.completion_round == 6
    assert result.T == 21


def test_overshoot_reports_unused_schedule():
    result = run(build_schedule("circular", build_cycle(5)))
    assert result.overshoot == 3  # one full unused 3-slot round
    done = run(build_schedule("routing", build_cycle(5)))
    assert done.overshoot == 0


def test_gaming_objective_unreachable_for_one_way_schedules():
    with pytest.raises(IncompleteSchedule):
        run(build_schedule("routing", build_cycle(6)), objective=Objective.MULTICAST)


def test_cross_objective_that_does_complete():
    result = run(build_schedule("circular", build_cycle(5)), objective=Objective.GAMING)
    assert result.objective is Objective.GAMING
    assert result.T <= 12


def test_empty_schedule_rejected():
    empty = Schedule(
        protocol="custom", n=2, objective_default="GAMING",
        labels={0: 1, 1: 2, 2: 3}, rounds=(), notes=(),
    )
    with pytest.raises(EmptyScheduleForObjective):
        run(empty)


def test_forward_without_reception_is_flagged():
    # node 1 told to relay before anything ever reached it
    bad = Schedule(
        protocol="custom", n=2, objective_default="GAMING",
        labels={0: 1, 1: 2, 2: 3},
        rounds=(Round(0, (Phase(1, (TransmitIntent(1, Rule.FORWARD_FROM_LEFT),)),)),),
        notes=(),
    )
    with pytest.raises(NonDerivablePacket):
        run(bad)


def test_collision_drops_even_identical_packets():
    # both neighbors of node 1 transmit; node 1 hears neither
    sched = Schedule(
        protocol="custom", n=2, objective_default="MULTICAST",
        labels={0: 1, 1: 2, 2: 3},
        rounds=(
            Round(0, (
                Phase(1, (TransmitIntent(0, Rule.OWN), TransmitIntent(2, Rule.OWN))),
                Phase(2, (TransmitIntent(1, Rule.OWN),)),
            )),
            Round(1, (
                Phase(1, (TransmitIntent(0, Rule.OWN),)),
                Phase(2, (TransmitIntent(2, Rule.OWN),)),
            )),
        ),
        notes=(),
    )
    result = run(sched)
    first = result.trace[0]
    kinds = {o.node: o.kind for o in first.outcomes}
    assert kinds == {0: "half_duplex_busy", 1: "collision", 2: "half_duplex_busy"}
    # the colliding slot contributed nothing; round 1 repeats both messages
    assert result.T == 4


def test_half_duplex_transmitters_never_receive():
    for proto in ("routing", "nc-gaming", "circular", "nc-multicast"):
        result = run(build_schedule(proto, build_cycle(7)))
        for ev in result.trace:
            senders = {node for node, _ in ev.transmitters}
            for o in ev.outcomes:
                if o.node in senders:
                    assert o.kind == "half_duplex_busy"
                else:
                    assert o.kind != "half_duplex_busy"


def test_objective_met_initially_false():
    from ringcast.engine import NodeState
    from ringcast.packets import KnowledgeBase

    states = {}
    for i in range(6):
        kb = KnowledgeBase()
        kb.insert(CodedPacket.source(i))
        states[i] = NodeState(i, kb)
    assert not objective_met(states, Objective.GAMING, 5)
    assert not objective_met(states, Objective.MULTICAST, 5)


def test_trace_slots_are_contiguous():
    for proto in ("routing", "nc-gaming", "circular", "nc-multicast"):
        result = run(build_schedule(proto, build_cycle(9)))
        assert [ev.slot for ev in result.trace] == list(range(1, result.T + 1))


def test_serialize_trace_round_trip_shape():
    import json

    result = run(build_schedule("nc-gaming", build_cycle(4)))
    lines = serialize_trace(result.trace).splitlines()
    assert len(lines) == result.T
    first = json.loads(lines[0])
    assert set(first) == {"slot", "round", "subset_slot", "transmitters", "outcomes"}
    assert [o["node"] for o in first["outcomes"]] == list(range(5))
