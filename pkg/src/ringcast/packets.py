"""GF(2) packet algebra: coded packets as index sets, knowledge as a linear span.

A source packet i is the unit vector e_i; a coded packet is an XOR of source
packets and is stored as the set of participating indices. Node knowledge is
the GF(2) span of everything received, kept in reduced row echelon form so
that decodability of a single source packet is an O(1) lookup.
"""

from __future__ import annotations

from typing import Iterable

__all__ = [
    "CodedPacket",
    "KnowledgeBase",
    "packet_xor",
]


class CodedPacket:
    """An XOR combination of source packets, identified by their indices.

    Internally a frozenset of ints; two packets are equal iff their index
    support is equal. XOR of packets is symmetric difference of supports.
    """

    __slots__ = ("indices",)

    def __init__(self, indices: Iterable[int]):
        idx = frozenset(indices)
        for i in idx:
            if i < 0:
                raise ValueError(f"negative source index {i}")
        self.indices = idx

    @classmethod
    def source(cls, i: int) -> "CodedPacket":
        return cls((i,))

    def __xor__(self, other: "CodedPacket") -> "CodedPacket":
        return CodedPacket(self.indices ^ other.indices)

    def is_zero(self) -> bool:
        return not self.indices

    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << i
        return m

    def __eq__(self, other) -> bool:
        return isinstance(other, CodedPacket) and self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    def __repr__(self) -> str:
        body = "^".join(f"M{i}" for i in sorted(self.indices)) or "0"
        return f"<{body}>"

    def sorted_indices(self) -> list[int]:
        return sorted(self.indices)


def packet_xor(a: CodedPacket, b: CodedPacket) -> CodedPacket:
    return a ^ b


class KnowledgeBase:
    """Span of received packets over GF(2), maintained in RREF.

    Rows are ints (bit i = source packet i), stored as {pivot: row} where
    pivot is the lowest set bit of the row. Back-elimination on insert keeps
    every pivot column clear in all other rows, so source packet i is
    decodable iff rows[i] == 1 << i.
    """

    __slots__ = ("_rows",)

    def __init__(self):
        self._rows: dict[int, int] = {}

    def _reduce(self, mask: int) -> int:
        # One pass suffices: RREF means each pivot bit occurs in exactly
        # one stored row, so elimination order does not matter.
        for pivot, row in self._rows.items():
            if mask & (1 << pivot):
                mask ^= row
        return mask

    def insert(self, packet: CodedPacket) -> bool:
        """Add a packet to the span. Returns True if it was innovative."""
        # Short-circuit the common case: every component already decoded.
        if all(self._rows.get(i) == 1 << i for i in packet.indices):
            return False
        mask = self._reduce(packet.mask())
        if mask == 0:
            return False
        pivot = (mask & -mask).bit_length() - 1
        # Back-eliminate the new pivot from existing rows to stay in RREF.
        for p, row in self._rows.items():
            if row & (1 << pivot):
                self._rows[p] = row ^ mask
        self._rows[pivot] = mask
        return True

    def can_decode(self, i: int) -> bool:
        """True iff the unit vector e_i lies in the span."""
        return self._rows.get(i) == 1 << i

    def derivable(self, packet: CodedPacket) -> bool:
        """True iff the packet is a GF(2) combination of known packets."""
        return self._reduce(packet.mask()) == 0

    def rank(self) -> int:
        return len(self._rows)

    def decoded_indices(self) -> set[int]:
        return {i for i, row in self._rows.items() if row == 1 << i}

    def copy(self) -> "KnowledgeBase":
        kb = KnowledgeBase()
        kb._rows = dict(self._rows)
        return kb
