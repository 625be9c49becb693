"""Deterministic slot-synchronous execution of a schedule.

Transmission model, applied per slot:

- a broadcast is heard by both ring neighbours;
- a transmitting node hears nothing itself (half duplex);
- a listener with both neighbours transmitting receives neither packet,
  even if the packets are identical (collision).

Received packets update a node's knowledge span immediately, but relay
buffers are double-buffered per round: rules resolve against what arrived in
the previous round, and within a round the first delivery on each side wins.
Buffers are cleared at every round boundary, never stale.

The communication period T is the counted index of the first slot at which
the objective holds. Every round before the completing one contributes its
full slot count, silent slots included (they appear in the trace with no
transmitters). Inside the completing round, silent slots are compacted away
unless compaction is disabled. Scheduled slots never executed are summarised
as overshoot.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .packets import CodedPacket, KnowledgeBase
from .protocols import Rule, Schedule
from .topology import RingTopology

__all__ = [
    "Objective",
    "NodeState",
    "SlotEvent",
    "Outcome",
    "RunResult",
    "IncompleteSchedule",
    "NonDerivablePacket",
    "EmptyScheduleForObjective",
    "run",
    "objective_met",
    "serialize_trace",
]


class Objective(enum.Enum):
    GAMING = "GAMING"
    MULTICAST = "MULTICAST"


class IncompleteSchedule(Exception):
    """The schedule ran out of slots before the objective held."""


class NonDerivablePacket(Exception):
    """A rule asked a node to transmit something it cannot construct."""


class EmptyScheduleForObjective(Exception):
    """The schedule contains no slots at all."""


@dataclass
class NodeState:
    node: int
    kb: KnowledgeBase
    buf_left: CodedPacket | None = None
    buf_right: CodedPacket | None = None


@dataclass(frozen=True)
class Outcome:
    node: int
    kind: str  # delivered | collision | half_duplex_busy | silence
    from_node: int | None = None
    packet: CodedPacket | None = None

    def to_record(self):
        rec = {"node": self.node, "kind": self.kind}
        if self.kind == "delivered":
            rec["from"] = self.from_node
            rec["packet"] = self.packet.sorted_indices()
        return rec


@dataclass
class SlotEvent:
    slot: int  # 1-based counted index, assigned on commit
    round: int
    subset_slot: int
    transmitters: list[tuple[int, CodedPacket]]
    outcomes: list[Outcome]

    def to_record(self):
        return {
            "slot": self.slot,
            "round": self.round,
            "subset_slot": self.subset_slot,
            "transmitters": [
                {"node": node, "packet": pkt.sorted_indices()}
                for node, pkt in self.transmitters
            ],
            "outcomes": [o.to_record() for o in self.outcomes],
        }


@dataclass
class RunResult:
    protocol: str
    n: int
    objective: Objective
    compaction: bool
    T: int
    L: int
    overshoot: int
    completion_round: int
    trace: list[SlotEvent] = field(repr=False)
    # a returned result always reached its objective; kept for report symmetry
    violations: list = field(default_factory=list)


def objective_met(states: dict[int, NodeState], objective: Objective, n: int) -> bool:
    """GAMING: the server spans everything and every player decodes the
    server's message. MULTICAST: every node spans everything."""
    size = n + 1
    if objective is Objective.GAMING:
        if states[0].kb.rank() != size:
            return False
        return all(states[i].kb.can_decode(0) for i in range(1, size))
    return all(states[i].kb.rank() == size for i in range(size))


def _resolve(state: NodeState, rule: Rule) -> CodedPacket:
    node = state.node
    if rule is Rule.OWN:
        return CodedPacket.source(node)
    if rule is Rule.FORWARD_FROM_RIGHT:
        if state.buf_right is None:
            raise NonDerivablePacket(f"node {node}: no packet from the right")
        return state.buf_right
    if rule is Rule.FORWARD_FROM_LEFT:
        if state.buf_left is None:
            raise NonDerivablePacket(f"node {node}: no packet from the left")
        return state.buf_left
    if rule is Rule.XOR_BOTH:
        if state.buf_left is None or state.buf_right is None:
            raise NonDerivablePacket(f"node {node}: missing a side for xor")
        pkt = state.buf_left ^ state.buf_right
        if pkt.is_zero():
            raise NonDerivablePacket(f"node {node}: xor of equal packets")
        return pkt
    # Server-packet rules require the node to have decoded index 0.
    if not state.kb.can_decode(0):
        raise NonDerivablePacket(f"node {node}: server packet not decoded")
    server = CodedPacket.source(0)
    if rule is Rule.SEND_SERVER:
        return server
    if rule is Rule.XOR_SERVER_RIGHT:
        if state.buf_right is None:
            raise NonDerivablePacket(f"node {node}: no packet from the right")
        return server ^ state.buf_right
    if rule is Rule.XOR_SERVER_LEFT:
        if state.buf_left is None:
            raise NonDerivablePacket(f"node {node}: no packet from the left")
        return server ^ state.buf_left
    raise NonDerivablePacket(f"node {node}: unknown rule {rule}")


def run(
    schedule: Schedule,
    objective: Objective | None = None,
    compaction: bool = True,
) -> RunResult:
    if objective is None:
        objective = Objective(schedule.objective_default)
    top = RingTopology(schedule.n)
    size = top.size

    if schedule.slot_count() == 0:
        raise EmptyScheduleForObjective(
            f"{schedule.protocol}: schedule has no slots"
        )

    states: dict[int, NodeState] = {}
    for i in range(size):
        kb = KnowledgeBase()
        kb.insert(CodedPacket.source(i))
        states[i] = NodeState(i, kb)

    trace: list[SlotEvent] = []
    emissions = 0
    # (round, phase position) pairs remaining, for overshoot accounting.
    nonempty_phases = [
        sum(1 for ph in rnd.phases if ph.intents) for rnd in schedule.rounds
    ]

    for rnd in schedule.rounds:
        stage_left: dict[int, CodedPacket] = {}
        stage_right: dict[int, CodedPacket] = {}
        round_events: list[SlotEvent] = []
        executed_phases = 0

        for ph in rnd.phases:
            executed_phases += 1
            sending = {it.node: _resolve(states[it.node], it.rule) for it in ph.intents}
            outcomes: list[Outcome] = []
            dirty = False
            for i in range(size):
                if i in sending:
                    outcomes.append(Outcome(i, "half_duplex_busy"))
                    continue
                l, r = top.left(i), top.right(i)
                lt, rt = l in sending, r in sending
                if lt and rt:
                    outcomes.append(Outcome(i, "collision"))
                elif lt or rt:
                    src = l if lt else r
                    pkt = sending[src]
                    outcomes.append(Outcome(i, "delivered", src, pkt))
                    if states[i].kb.insert(pkt):
                        dirty = True
                    stage = stage_left if lt else stage_right
                    if i not in stage:
                        stage[i] = pkt
                else:
                    outcomes.append(Outcome(i, "silence"))
            transmitters = sorted(sending.items())
            emissions += len(transmitters)
            round_events.append(
                SlotEvent(0, rnd.index, ph.slot, transmitters, outcomes)
            )

            if dirty and objective_met(states, objective, schedule.n):
                if compaction:
                    kept = [ev for ev in round_events if ev.transmitters]
                else:
                    kept = round_events
                base = len(trace)
                for k, ev in enumerate(kept):
                    ev.slot = base + k + 1
                trace.extend(kept)
                later = sum(
                    nonempty_phases[j] for j in range(rnd.index + 1, len(nonempty_phases))
                )
                this_round = sum(
                    1 for ph2 in rnd.phases[executed_phases:] if ph2.intents
                )
                return RunResult(
                    protocol=schedule.protocol,
                    n=schedule.n,
                    objective=objective,
                    compaction=compaction,
                    T=trace[-1].slot,
                    L=emissions,
                    overshoot=later + this_round,
                    completion_round=rnd.index,
                    trace=trace,
                )

        base = len(trace)
        for k, ev in enumerate(round_events):
            ev.slot = base + k + 1
        trace.extend(round_events)
        for i in range(size):
            states[i].buf_left = stage_left.get(i)
            states[i].buf_right = stage_right.get(i)

    raise IncompleteSchedule(
        f"{schedule.protocol} n={schedule.n}: objective {objective.value} "
        f"not reached after {len(trace)} slots"
    )


def serialize_trace(trace: list[SlotEvent]) -> str:
    """JSON-lines trace: one slot record per line, key order fixed."""
    return "\n".join(
        json.dumps(ev.to_record(), sort_keys=True, separators=(",", ":"))
        for ev in trace
    ) + ("\n" if trace else "")
