"""Independent replay checker for serialized traces.

Reconstructs every node's knowledge from the trace alone and reports physics
or bookkeeping violations. Deliberately shares nothing with the engine except
the packet algebra, so an engine bug cannot hide itself here.

Checked per slot:
  * a transmitted packet must be derivable from the sender's span
  * a node hearing two transmitting neighbors must not report a delivery
  * a transmitting node must not report a delivery
  * a reported delivery must name the one transmitting neighbor and its packet
Checked at the end: objective satisfied, claimed T and L match the trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .packets import CodedPacket, KnowledgeBase

__all__ = [
    "Violation",
    "load_trace",
    "validate_trace",
    "harmful_collisions",
    "COLLISION_DELIVERED",
    "HALF_DUPLEX_RECEIVE",
    "NON_DERIVABLE_PACKET",
    "PHANTOM_RECEPTION",
    "OBJECTIVE_UNMET",
    "METRIC_MISMATCH",
]

COLLISION_DELIVERED = "COLLISION_DELIVERED"
HALF_DUPLEX_RECEIVE = "HALF_DUPLEX_RECEIVE"
NON_DERIVABLE_PACKET = "NON_DERIVABLE_PACKET"
PHANTOM_RECEPTION = "PHANTOM_RECEPTION"
OBJECTIVE_UNMET = "OBJECTIVE_UNMET"
METRIC_MISMATCH = "METRIC_MISMATCH"


@dataclass(frozen=True)
class Violation:
    slot: int
    nodes: tuple
    kind: str
    detail: str

    def to_record(self):
        return {
            "slot": self.slot,
            "nodes": list(self.nodes),
            "kind": self.kind,
            "detail": self.detail,
        }


def load_trace(text: str) -> list:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ValueError(f"trace line {lineno} is not valid JSON: {exc}")
    return records


def _neighbors(node: int, size: int):
    return (node - 1) % size, (node + 1) % size


def validate_trace(records, n, objective, claimed_t, claimed_l) -> list:
    size = n + 1
    spans = {i: KnowledgeBase() for i in range(size)}
    for i in range(size):
        spans[i].insert(CodedPacket.source(i))
    violations = []
    emissions = 0
    last_slot = 0

    for rec in records:
        slot = rec.get("slot", 0)
        last_slot = slot
        tx = {}
        for t in rec.get("transmitters", []):
            node = t["node"]
            pkt = CodedPacket(t["packet"])
            tx[node] = pkt
            emissions += 1
            if node not in spans:
                violations.append(Violation(
                    slot, (node,), PHANTOM_RECEPTION,
                    f"transmitter {node} is not a ring node",
                ))
                continue
            if pkt.is_zero() or not spans[node].derivable(pkt):
                violations.append(Violation(
                    slot, (node,), NON_DERIVABLE_PACKET,
                    f"node {node} cannot form {pkt!r} from its span",
                ))
        for o in rec.get("outcomes", []):
            node = o["node"]
            kind = o["kind"]
            if node not in spans:
                violations.append(Violation(
                    slot, (node,), PHANTOM_RECEPTION,
                    f"outcome names {node}, not a ring node",
                ))
                continue
            if kind != "delivered":
                continue
            if node in tx:
                violations.append(Violation(
                    slot, (node,), HALF_DUPLEX_RECEIVE,
                    f"node {node} claims a delivery while transmitting",
                ))
                continue
            left, right = _neighbors(node, size)
            talking = [v for v in (left, right) if v in tx]
            if len(talking) == 2:
                violations.append(Violation(
                    slot, (node, left, right), COLLISION_DELIVERED,
                    f"node {node} claims a delivery under a collision",
                ))
                continue
            if not talking:
                violations.append(Violation(
                    slot, (node,), PHANTOM_RECEPTION,
                    f"node {node} claims a delivery but no neighbor transmits",
                ))
                continue
            src = talking[0]
            pkt = CodedPacket(o.get("packet", []))
            if o.get("from") != src or pkt != tx[src]:
                violations.append(Violation(
                    slot, (node, src), PHANTOM_RECEPTION,
                    f"node {node} claims a delivery that does not match "
                    f"neighbor {src}'s transmission",
                ))
                continue
            spans[node].insert(pkt)

    if objective == "GAMING":
        met = spans[0].rank() == size and all(
            spans[i].can_decode(0) for i in range(1, size)
        )
    else:
        met = all(spans[i].rank() == size for i in range(size))
    if not met:
        violations.append(Violation(
            last_slot, tuple(), OBJECTIVE_UNMET,
            f"replayed spans do not satisfy {objective} after slot {last_slot}",
        ))
    if claimed_t != last_slot:
        violations.append(Violation(
            last_slot, tuple(), METRIC_MISMATCH,
            f"claimed T={claimed_t} but trace ends at slot {last_slot}",
        ))
    if claimed_l != emissions:
        violations.append(Violation(
            last_slot, tuple(), METRIC_MISMATCH,
            f"claimed L={claimed_l} but trace shows {emissions} emissions",
        ))
    return violations


def harmful_collisions(records, n) -> list:
    """Collisions that destroyed a packet the victim could not already derive.

    Assumes a trace that passed validate_trace; replays claimed deliveries
    and inspects each reported collision against the victim's span at that
    moment.
    """
    size = n + 1
    spans = {i: KnowledgeBase() for i in range(size)}
    for i in range(size):
        spans[i].insert(CodedPacket.source(i))
    harmful = []
    for rec in records:
        tx = {
            t["node"]: CodedPacket(t["packet"])
            for t in rec.get("transmitters", [])
        }
        for o in rec.get("outcomes", []):
            node = o["node"]
            if o["kind"] == "collision":
                lost = []
                for v in _neighbors(node, size):
                    pkt = tx.get(v)
                    if pkt is not None and not spans[node].derivable(pkt):
                        lost.append((v, pkt.sorted_indices()))
                if lost:
                    harmful.append({
                        "slot": rec.get("slot"),
                        "node": node,
                        "lost": lost,
                    })
        for o in rec.get("outcomes", []):
            if o["kind"] == "delivered":
                spans[o["node"]].insert(CodedPacket(o.get("packet", [])))
    return harmful
