"""Closed-form performance bounds and measured-vs-predicted reporting.

Communication period T counts slots until the objective holds; message count
L counts executed transmissions. For the two gaming schedules L has an exact
closed form; for the two multicast schedules only an upper bound of the form
floor((n+1)/3) * T is available, so bound rows carry the coefficient and the
check is L <= coefficient * measured T.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import run
from .protocols import PROTOCOLS, build_schedule
from .topology import build_cycle

__all__ = [
    "Bounds",
    "CheckReport",
    "bounds_for",
    "check_run",
    "comparison_table",
    "display_l",
    "nc_gain",
    "arrival_order",
    "TableReport",
]

EXACT = "EXACT"
UPPER_BOUND = "UPPER_BOUND"


@dataclass(frozen=True)
class Bounds:
    protocol: str
    n: int
    t_lb: int
    t_ub: int
    l_kind: str  # EXACT: l_value is the count; UPPER_BOUND: the coefficient
    l_value: int


def bounds_for(protocol: str, n: int) -> Bounds:
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    if n < 2:
        raise ValueError(f"need at least 2 players, got n={n}")
    hops = (n + 1) // 2
    long_rounds = hops // 2
    coeff = (n + 1) // 3
    if protocol == "circular":
        return Bounds(protocol, n, 3 * n, 4 * n, UPPER_BOUND, coeff)
    if protocol == "nc-multicast":
        return Bounds(protocol, n, 3 * hops, 4 * hops, UPPER_BOUND, coeff)
    routed = hops * (n // 2 + 3) - 1
    if protocol == "routing":
        return Bounds(
            protocol, n, 3 * hops + long_rounds - 2, 3 * hops + long_rounds + 1,
            EXACT, routed,
        )
    return Bounds(
        protocol, n, 3 * hops - 2, 3 * hops + 1, EXACT, routed - 2 * long_rounds
    )


@dataclass(frozen=True)
class CheckReport:
    protocol: str
    n: int
    t_measured: int
    l_measured: int
    t_ok: bool
    l_ok: bool

    @property
    def passed(self) -> bool:
        return self.t_ok and self.l_ok


def check_run(result, bounds: Bounds) -> CheckReport:
    """Compare a finished run against its protocol's predictions."""
    t_ok = bounds.t_lb <= result.T <= bounds.t_ub
    if bounds.l_kind == EXACT:
        l_ok = result.L == bounds.l_value
    else:
        l_ok = result.L <= bounds.l_value * result.T
    return CheckReport(bounds.protocol, bounds.n, result.T, result.L, t_ok, l_ok)


@dataclass
class TableReport:
    rows: list[dict]
    footnotes: list[str]


def display_l(bounds: Bounds) -> int:
    """The number quoted in the L column of reports.

    Exact formulas evaluate directly; bound-form rows show coefficient *
    t_lb, except nc-multicast at n=9 which is quoted against t_ub (the run
    lands above 3D there, and the reference table quotes the looser figure).
    """
    if bounds.l_kind == EXACT:
        return bounds.l_value
    if bounds.protocol == "nc-multicast" and bounds.n == 9:
        return bounds.l_value * bounds.t_ub
    return bounds.l_value * bounds.t_lb


CSV_COLUMNS = [
    "n",
    "protocol",
    "t_lb",
    "t_ub",
    "t_measured",
    "l_formula_or_bound",
    "l_measured",
]

_TABLE_ORDER = ["circular", "nc-multicast", "routing", "nc-gaming"]


def comparison_table(n_list, protocols=None) -> TableReport:
    """Measured T/L next to predicted intervals for each (n, protocol).

    The l_formula_or_bound column evaluates exact formulas directly and
    bound-form rows as coefficient * t_lb, except nc-multicast at n=9 which
    is quoted against t_ub (footnoted; the source table does the same).
    """
    protocols = list(protocols) if protocols else list(_TABLE_ORDER)
    rows = []
    footnotes = [
        "bound-form L cells are floor((n+1)/3) * t_lb, "
        "except nc-multicast n=9 which uses t_ub",
        "gain = (routing T - nc-gaming T) / routing T, measured",
    ]
    for n in n_list:
        top = build_cycle(n)
        t_routing = None
        by_proto = {}
        for proto in _TABLE_ORDER:
            if proto in protocols:
                by_proto[proto] = run(build_schedule(proto, top))
        if "routing" in by_proto:
            t_routing = by_proto["routing"].T
        for proto in protocols:
            result = by_proto[proto]
            b = bounds_for(proto, n)
            l_col = display_l(b)
            row = {
                "n": n,
                "protocol": proto,
                "t_lb": b.t_lb,
                "t_ub": b.t_ub,
                "t_measured": result.T,
                "l_formula_or_bound": l_col,
                "l_measured": result.L,
            }
            if proto == "nc-gaming" and t_routing:
                row["gain"] = round((t_routing - result.T) / t_routing, 6)
            rows.append(row)
    return TableReport(rows, footnotes)


def nc_gain(n: int) -> float:
    """Fraction of the routing communication period saved by coding."""
    top = build_cycle(n)
    plain = run(build_schedule("routing", top))
    coded = run(build_schedule("nc-gaming", top))
    return (plain.T - coded.T) / plain.T


def arrival_order(trace, n: int):
    """Per-round indices newly decoded by the server, with a conformance flag.

    For the gaming schedules the server should decode exactly indices
    {t+1, n-t} during round t (a single index when they coincide). Returns
    (ordered list of (round, sorted index tuple), flag).
    """
    from .packets import CodedPacket, KnowledgeBase

    kb = KnowledgeBase()
    kb.insert(CodedPacket.source(0))
    decoded = {0}
    out = []
    current_round = None
    ok = True

    def close_round(rnd):
        nonlocal ok
        fresh = kb.decoded_indices() - decoded
        decoded.update(fresh)
        out.append((rnd, tuple(sorted(fresh))))
        if fresh != {rnd + 1, n - rnd} - {0}:
            ok = False

    for ev in trace:
        if current_round is None:
            current_round = ev.round
        elif ev.round != current_round:
            close_round(current_round)
            current_round = ev.round
        for o in ev.outcomes:
            if o.node == 0 and o.kind == "delivered":
                kb.insert(o.packet)
    if current_round is not None:
        close_round(current_round)
    return out, ok
