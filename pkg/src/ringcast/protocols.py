"""Slot schedules for the four ring protocols.

A schedule is a pure description of who transmits when and under which rule;
resolving rules into concrete packets (and deciding what each listener hears)
is the engine's job. Rounds are built from the phase partition: subset k gets
the k-th slot of every round, and gaming rounds 1..long_rounds append a shared
extra slot for the two server-packet wave nodes.

Protocol ids used everywhere (CLI, service, analysis):

- "circular":     every node repeats its left neighbour, n rounds.
- "nc-multicast": every node relays the XOR of both neighbours, D+1 rounds.
- "routing":      store-and-forward toward the server, plus a server-packet
                  wave outward; D rounds.
- "nc-gaming":    same, but the wave nodes fold the server packet into their
                  data relay by XOR; D rounds, 2*floor((n+1)/4) fewer slots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .topology import (
    RingTopology,
    check_partition,
    multicast_partition,
    partition,
)

__all__ = [
    "Rule",
    "TransmitIntent",
    "Phase",
    "Round",
    "Schedule",
    "PROTOCOLS",
    "circular_schedule",
    "nc_multicast_schedule",
    "routing_schedule",
    "nc_gaming_schedule",
    "build_schedule",
]


class Rule(enum.Enum):
    """How a transmitting node derives its packet from local state."""

    OWN = "own"
    FORWARD_FROM_RIGHT = "forward_from_right"
    FORWARD_FROM_LEFT = "forward_from_left"
    XOR_BOTH = "xor_both"
    SEND_SERVER = "send_server"
    XOR_SERVER_RIGHT = "xor_server_right"
    XOR_SERVER_LEFT = "xor_server_left"


@dataclass(frozen=True)
class TransmitIntent:
    node: int
    rule: Rule


@dataclass(frozen=True)
class Phase:
    """One slot of a round: the subset slot number and who transmits in it."""

    slot: int
    intents: tuple[TransmitIntent, ...]


@dataclass(frozen=True)
class Round:
    index: int
    phases: tuple[Phase, ...]


@dataclass(frozen=True)
class Schedule:
    protocol: str
    n: int
    objective_default: str
    labels: dict[int, int]
    rounds: tuple[Round, ...]
    notes: tuple[str, ...] = ()

    def slot_count(self) -> int:
        return sum(len(r.phases) for r in self.rounds)


def _resolve_labels(top, labels, default_fn):
    if labels is None:
        return default_fn(top)
    issues = check_partition(labels, top)
    if issues:
        raise ValueError("invalid partition: " + "; ".join(issues))
    return labels


def _slot_map(intents: dict[int, Rule], labels, extra=()):
    """Group intents by subset slot; extra = (node, rule, slot) overrides."""
    per_slot: dict[int, list[TransmitIntent]] = {}
    for node, rule in intents.items():
        per_slot.setdefault(labels[node], []).append(TransmitIntent(node, rule))
    for node, rule, slot in extra:
        per_slot.setdefault(slot, []).append(TransmitIntent(node, rule))
    return per_slot


def _build_round(index, phase_count, per_slot):
    phases = []
    for s in range(1, phase_count + 1):
        intents = sorted(per_slot.get(s, []), key=lambda it: it.node)
        seen = [it.node for it in intents]
        if len(seen) != len(set(seen)):
            raise ValueError(f"round {index} slot {s}: node scheduled twice")
        phases.append(Phase(s, tuple(intents)))
    return Round(index, tuple(phases))


def _own_round(top, labels, phase_count):
    per_slot = _slot_map({i: Rule.OWN for i in range(top.size)}, labels)
    return _build_round(0, phase_count, per_slot)


def circular_schedule(top: RingTopology, labels=None) -> Schedule:
    """All nodes repeat their left neighbour's last packet, clockwise.

    Round 0 seeds with everyone's own message; rounds 1..n-1 forward. Every
    message circles the ring, so every node eventually holds all of them.
    """
    labels = _resolve_labels(top, labels, multicast_partition)
    phase_count = max(labels.values())
    rounds = [_own_round(top, labels, phase_count)]
    for t in range(1, top.n):
        per_slot = _slot_map(
            {i: Rule.FORWARD_FROM_LEFT for i in range(top.size)}, labels
        )
        rounds.append(_build_round(t, phase_count, per_slot))
    return Schedule("circular", top.n, "MULTICAST", labels, tuple(rounds))


def nc_multicast_schedule(top: RingTopology, labels=None) -> Schedule:
    """All nodes relay the XOR of their two neighbours' last packets.

    Knowledge spreads one hop per round in both directions at once, so
    D+1 scheduled rounds always cover completion with slack.
    """
    labels = _resolve_labels(top, labels, multicast_partition)
    phase_count = max(labels.values())
    rounds = [_own_round(top, labels, phase_count)]
    for t in range(1, top.max_hops + 1):
        per_slot = _slot_map({i: Rule.XOR_BOTH for i in range(top.size)}, labels)
        rounds.append(_build_round(t, phase_count, per_slot))
    return Schedule("nc-multicast", top.n, "MULTICAST", labels, tuple(rounds))


def _gaming_params(top):
    n, D, d, r = top.n, top.max_hops, top.long_rounds, top.residue
    odd = n % 2 == 1
    # The antipodal message's left-bound chain dies at round 0 when the
    # two subset-4 nodes are exactly the antipode pair (r=2, n odd): only
    # the right-bound copy survives, one hop shorter.
    l_max = D - 1 if (r == 2 and odd) else D
    return n, D, d, r, odd, l_max


def _left_set(t, D, l_max):
    return [i for i in range(1, D - t + 1) if i + t <= l_max]


def _right_set(t, n, D, right_min):
    return [j for j in range(n - D + t + 1, n + 1) if j - t >= right_min]


def _wave_slots(t, n, D, d, r, odd, labels, drop_borrow):
    """Server-packet emissions for a 3-slot round (t > long_rounds).

    Returns (node, rule, slot) triples. The right wave node always
    transmits in its subset slot. The left one is omitted at the final
    round for odd n with residue 0/1 (the right node covers the antipode
    from the other side); when it is a subset-4 node (r=2, n odd, final
    round) it borrows the lowest slot the right node does not use.
    """
    wl, wr = t, n + 1 - t
    out = [(wr, Rule.SEND_SERVER, labels[wr])]
    if odd and r in (0, 1) and t == D - 1:
        return out
    if labels[wl] == 4:
        if drop_borrow:
            return out
        slot = min({1, 2, 3} - {labels[wr]})
        out.append((wl, Rule.SEND_SERVER, slot))
    else:
        out.append((wl, Rule.SEND_SERVER, labels[wl]))
    return out


def routing_schedule(top: RingTopology, labels=None) -> Schedule:
    """Store-and-forward gaming schedule.

    Player messages hop toward the server along the shorter arc while the
    server's message rides an outward wave: at round t nodes t and n+1-t
    transmit it, sharing a 4th slot while they still carry data (t <= d)
    and folding into the 3 subset slots afterwards.
    """
    labels = _resolve_labels(top, labels, partition)
    n, D, d, r, odd, l_max = _gaming_params(top)
    notes = []

    def right_min(t):
        if r == 2 and odd:
            return D
        if not odd:
            return D + 1
        # Odd n, residue 0/1: round 1 keeps the duplicate antipodal relay
        # (both directions deliver the antipode on the same final slot),
        # later rounds carry the left copy only.
        return D if t <= 1 else D + 1

    rounds = [_own_round(top, labels, 3 if r == 0 else 4)]
    for t in range(1, D):
        data = {i: Rule.FORWARD_FROM_RIGHT for i in _left_set(t, D, l_max)}
        for j in _right_set(t, n, D, right_min(t)):
            data[j] = Rule.FORWARD_FROM_LEFT
        if t <= d:
            wl, wr = t, n + 1 - t
            if wr - wl == 2:
                # Only n=3: a shared slot would collide at the midpoint,
                # the one node still waiting on the server packet. Split:
                # the right node uses its subset slot, shedding its
                # redundant relay for the round.
                data.pop(wr, None)
                extra = [(wr, Rule.SEND_SERVER, labels[wr])]
                per_slot = _slot_map(data, labels, extra)
                per_slot.setdefault(4, []).append(
                    TransmitIntent(wl, Rule.SEND_SERVER)
                )
                notes.append(f"round {t}: shared server slot split for n={n}")
                rounds.append(_build_round(t, 4, per_slot))
                continue
            per_slot = _slot_map(data, labels)
            per_slot[4] = [
                TransmitIntent(wl, Rule.SEND_SERVER),
                TransmitIntent(wr, Rule.SEND_SERVER),
            ]
            rounds.append(_build_round(t, 4, per_slot))
        else:
            extra = _wave_slots(t, n, D, d, r, odd, labels, drop_borrow=False)
            rounds.append(_build_round(t, 3, _slot_map(data, labels, extra)))
    return Schedule("routing", n, "GAMING", labels, tuple(rounds), tuple(notes))


def nc_gaming_schedule(top: RingTopology, labels=None) -> Schedule:
    """Network-coded gaming schedule.

    Rounds 1..d lose the shared 4th slot: each wave node instead XORs the
    server packet onto the data packet it would have relayed anyway, and
    its neighbours can split the combination because the data component
    passed through them one round earlier. A wave node whose data chain
    has already run dry sends the server packet plain.
    """
    labels = _resolve_labels(top, labels, partition)
    n, D, d, r, odd, l_max = _gaming_params(top)

    def right_min(t):
        if r == 2 and odd:
            return D
        if not odd:
            return D + 1
        # The round-1 duplicate relay stays only when D is odd; dropping it
        # when D is even is one of the two emissions that square measured L
        # with the coded-schedule count (the other is the borrow below).
        return D if (t <= 1 and D % 2 == 1) else D + 1

    rounds = [_own_round(top, labels, 3 if r == 0 else 4)]
    for t in range(1, D):
        if t <= d:
            wl, wr = t, n + 1 - t
            data = {
                i: Rule.FORWARD_FROM_RIGHT
                for i in _left_set(t, D, l_max)
                if i != wl
            }
            for j in _right_set(t, n, D, right_min(t)):
                if j != wr:
                    data[j] = Rule.FORWARD_FROM_LEFT
            left_alive = 2 * t <= l_max
            right_alive = t == 1 or (D >= 2 * t and n + 1 - 2 * t >= right_min(t - 1))
            extra = [
                (wl, Rule.XOR_SERVER_RIGHT if left_alive else Rule.SEND_SERVER,
                 labels[wl]),
                (wr, Rule.XOR_SERVER_LEFT if right_alive else Rule.SEND_SERVER,
                 labels[wr]),
            ]
            rounds.append(_build_round(t, 3, _slot_map(data, labels, extra)))
        else:
            data = {i: Rule.FORWARD_FROM_RIGHT for i in _left_set(t, D, l_max)}
            for j in _right_set(t, n, D, right_min(t)):
                data[j] = Rule.FORWARD_FROM_LEFT
            extra = _wave_slots(
                t, n, D, d, r, odd, labels, drop_borrow=(D % 2 == 0)
            )
            rounds.append(_build_round(t, 3, _slot_map(data, labels, extra)))
    return Schedule("nc-gaming", n, "GAMING", labels, tuple(rounds))


PROTOCOLS = {
    "circular": (circular_schedule, "MULTICAST"),
    "nc-multicast": (nc_multicast_schedule, "MULTICAST"),
    "routing": (routing_schedule, "GAMING"),
    "nc-gaming": (nc_gaming_schedule, "GAMING"),
}


def build_schedule(protocol: str, top: RingTopology, labels=None) -> Schedule:
    try:
        builder, _ = PROTOCOLS[protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {protocol!r}") from None
    return builder(top, labels)
