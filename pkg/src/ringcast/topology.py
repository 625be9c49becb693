"""Single-cycle network topology and node partitions.

Nodes are numbered 0..n around a ring: node 0 is the server, nodes 1..n are
players. Every edge is bidirectional and every transmission is a local
broadcast heard by both neighbours, subject to half-duplex and collision
rules enforced by the engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "RingTopology",
    "build_cycle",
    "partition",
    "multicast_partition",
    "check_partition",
    "partition_notes",
]


@dataclass(frozen=True)
class RingTopology:
    """Ring of n+1 nodes (server plus n players).

    Args:
        n: number of player nodes, n >= 2.

    Attributes derived on construction:
        size: node count n+1.
        max_hops: eccentricity of any node, ceil(n/2).
        long_rounds: floor(max_hops/2), the rounds where the coded gaming
            schedule saves slots over plain routing.
        residue: (n+1) mod 3, selects the partition family.
    """

    n: int
    size: int = field(init=False)
    max_hops: int = field(init=False)
    long_rounds: int = field(init=False)
    residue: int = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 players, got n={self.n}")
        object.__setattr__(self, "size", self.n + 1)
        object.__setattr__(self, "max_hops", (self.n + 1) // 2)
        object.__setattr__(self, "long_rounds", self.max_hops // 2)
        object.__setattr__(self, "residue", (self.n + 1) % 3)

    def left(self, i: int) -> int:
        return (i - 1) % self.size

    def right(self, i: int) -> int:
        return (i + 1) % self.size

    def neighbors(self, i: int) -> tuple[int, int]:
        return self.left(i), self.right(i)

    def distance(self, i: int, j: int) -> int:
        d = abs(i - j)
        return min(d, self.size - d)


def build_cycle(n: int) -> RingTopology:
    """Construct the ring for n players (server included as node 0)."""
    return RingTopology(n)


def partition(top: RingTopology) -> dict[int, int]:
    """Subset label (1..4) for every node, for the gaming schedules.

    Nodes in the same subset transmit in the same phase of a round, so
    labels 1..3 keep same-subset nodes at ring distance >= 3. Label 4 marks
    the nodes whose transmissions a round must special-case:

    - residue 0: clean 3-colouring, no subset 4.
    - residue 1: subset 4 is the single antipode of the server.
    - residue 2: subset 4 is the adjacent pair around the antipode.
    """
    n, r = top.n, top.residue
    labels: dict[int, int] = {}
    if r == 0:
        for i in range(top.size):
            labels[i] = (i % 3) + 1
    elif r == 1:
        apex = top.max_hops
        for i in range(top.size):
            if i == apex:
                labels[i] = 4
            elif i <= n // 2:
                labels[i] = (i % 3) + 1
            else:
                labels[i] = ((i - 1) % 3) + 1
    else:
        a = n // 2
        for i in range(top.size):
            if i in (a, a + 1):
                labels[i] = 4
            elif i < a:
                labels[i] = (i % 3) + 1
            else:
                labels[i] = ((i - 2) % 3) + 1
    return labels


def multicast_partition(top: RingTopology) -> dict[int, int]:
    """Subset labels for the multicast schedules, where every node transmits
    every round and a severed edge (two adjacent nodes sharing a phase) would
    never heal. Residues 0 and 1 reuse the gaming partition; residue 2 uses a
    proper 4-colouring with the two subset-4 nodes at distance >= 3.

    n=4 (a 5-cycle) admits no such colouring at all, so every node gets its
    own phase there.
    """
    if top.residue != 2:
        return partition(top)
    if top.n == 4:
        return {i: i + 1 for i in range(top.size)}
    a = (top.n - 7) // 3
    pattern = [1, 2, 3] * a + [1, 2, 3, 4] + [1, 2, 3, 4]
    return {i: pattern[i] for i in range(top.size)}


def check_partition(labels: dict[int, int], top: RingTopology) -> list[str]:
    """Validate a partition; returns a list of violation strings (empty = ok).

    Checks coverage, label range (1..4, or all-distinct for the
    every-node-own-phase fallback), and pairwise distance >= 3 inside
    subsets 1..3.

    Subset-4 adjacency is deliberate (those nodes share a slot knowing their
    mutual transmissions are lost) and is surfaced by partition_notes, not
    here.
    """
    issues: list[str] = []
    # the every-node-own-phase fallback is only legitimate when labels are
    # genuinely all distinct; one stray big label must not unlock it
    distinct = len(set(labels.values())) == len(labels)
    limit = top.size if distinct else 4
    for i in range(top.size):
        if i not in labels:
            issues.append(f"node {i} unlabelled")
        elif not 1 <= labels[i] <= limit:
            issues.append(f"node {i} has label {labels[i]}")
    singles = distinct and max(labels.values(), default=0) > 4
    if not singles:
        for lab in (1, 2, 3):
            members = sorted(i for i, v in labels.items() if v == lab)
            for x in members:
                for y in members:
                    if x < y and top.distance(x, y) < 3:
                        issues.append(
                            f"subset {lab}: nodes {x},{y} at distance {top.distance(x, y)}"
                        )
    return issues


def partition_notes(labels: dict[int, int], top: RingTopology) -> list[str]:
    """Informational remarks about a valid partition (never violations).

    Currently: adjacent or identical-slot pairs inside subset 4, whose
    simultaneous transmissions are mutually unheard by design.
    """
    notes: list[str] = []
    members = sorted(i for i, v in labels.items() if v == 4)
    for x in members:
        for y in members:
            if x < y and top.distance(x, y) <= 2:
                notes.append(
                    f"subset 4: nodes {x},{y} at distance {top.distance(x, y)}; "
                    "their simultaneous transmissions are lost to each other"
                )
    return notes
