"""Stage fusion: collapse a machine's per-function tables into fewer stages.

A machine runs one match-action stage per non-empty (member, function) table.
Cross-layer facts license merging adjacent stages without changing behaviour:

  * ``all-links-external:<net>``  -- every link of <net> rides a session, so a
    Transmit lookup in <net> always descends the seam and the underlay Send
    encoding can be inlined into the Transmit stage.
  * ``all-links-primitive:<net>`` -- every link of <net> is a wire, so a
    Forward decision in <net> resolves to a concrete egress without a separate
    Transmit stage, and arrivals can fold the Receive dispatch into Acquire.

`fuse` materializes the merged tables (rule cross-products, session keys
expanded into field constraints) and `check_equivalence` replays the fused
plan against the plain five-function pipeline for every header in the
enumerated universe at every entry point of the machine.  Both executions are
confined to the machine: a packet leaving on a wire is recorded as an
emission, not followed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from . import pipeline
from .model import Member, Topology, UnknownMachineError
from .pipeline import (
    SELF,
    AcquireForward,
    AcquireReceive,
    Drop,
    FieldMatch,
    MatchSpec,
    NoRuleError,
    Packet,
    PacketMeta,
    ReceivePrimitive,
    ReceiveToLink,
    Rule,
    TransmitPrimitive,
    TransmitToSession,
)
from .verify import PropertyResult, Witness

FUNCTION_ORDER = ("Transmit", "Send", "Forward", "Acquire", "Receive")

ASSUMPTION_KINDS = ("all-links-external", "all-links-primitive")


class InvalidAssumptionError(Exception):
    """An assumption handed to fuse() is contradicted by the topology."""


@dataclass(frozen=True)
class Assumption:
    kind: str  # one of ASSUMPTION_KINDS
    network_id: str

    def render(self) -> str:
        return f"{self.kind}:{self.network_id}"


def parse_assumption(text: str) -> Assumption:
    kind, sep, network_id = text.partition(":")
    if not sep or not network_id or kind not in ASSUMPTION_KINDS:
        raise ValueError(
            f"bad assumption {text!r}; expected <kind>:<network> with kind one of "
            + ", ".join(ASSUMPTION_KINDS)
        )
    return Assumption(kind=kind, network_id=network_id)


def check_assumption(topology: Topology, assumption: Assumption) -> None:
    """Raise InvalidAssumptionError if the topology contradicts the fact."""
    if assumption.network_id not in topology.networks:
        raise InvalidAssumptionError(
            f"{assumption.render()}: no network {assumption.network_id!r}"
        )
    for link in topology.network_links(assumption.network_id):
        if assumption.kind == "all-links-external" and link.impl is None:
            raise InvalidAssumptionError(
                f"{assumption.render()}: link {link.link_id} is Primitive"
            )
        if assumption.kind == "all-links-primitive" and link.impl is not None:
            raise InvalidAssumptionError(
                f"{assumption.render()}: link {link.link_id} rides session "
                f"{link.impl.session_id}"
            )


def derive_assumptions(topology: Topology, machine_id: str) -> tuple[str, ...]:
    """Facts that actually hold for the networks this machine participates in."""
    machine = topology.machines.get(machine_id)
    if machine is None:
        raise UnknownMachineError(machine_id)
    facts = []
    for network_id in sorted(machine.members):
        links = topology.network_links(network_id)
        if not links:
            continue
        if all(l.impl is not None for l in links):
            facts.append(f"all-links-external:{network_id}")
        elif all(l.impl is None for l in links):
            facts.append(f"all-links-primitive:{network_id}")
    return tuple(facts)


# -- materialized rows ---------------------------------------------------------


@dataclass
class RowEmit:
    """Put the packet on the wire of a local link."""

    local_id: str
    egress_port: str

    def __str__(self) -> str:
        return f"Emit({self.local_id}, port {self.egress_port})"


@dataclass
class RowDescend:
    """Hand the packet to an underlay session; its Send stage runs next."""

    network_id: str
    session_id: str

    def __str__(self) -> str:
        return f"ExternalSession({self.network_id}, {self.session_id})"


@dataclass
class RowEncap:
    """Inlined Send: wrap the packet in the session's outer header."""

    network_id: str
    member: str
    session_id: str
    encoding: dict[str, str]
    encrypting: bool

    def __str__(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.encoding.items()))
        return f"Encapsulate({self.network_id}/{self.session_id}: {inner})"


@dataclass
class RowGoTransmit:
    local_id: str

    def __str__(self) -> str:
        return f"OutLink({self.local_id})"


@dataclass
class RowGoForward:
    network_id: str
    member: str

    def __str__(self) -> str:
        return "Forward"


@dataclass
class RowBridge:
    port: str

    def __str__(self) -> str:
        return f"BridgePort({self.port})"


@dataclass
class RowReceiveDispatch:
    def __str__(self) -> str:
        return "Receive"


@dataclass
class RowDeliver:
    def __str__(self) -> str:
        return "Deliver"


@dataclass
class RowStrip:
    network_id: str
    link_id: str

    def __str__(self) -> str:
        return f"ExternalLink({self.network_id}, {self.link_id})"


@dataclass
class RowDrop:
    marker: str

    def __str__(self) -> str:
        return f"Drop({self.marker})"


@dataclass
class RowNoRule:
    """The constituent stage this row absorbed has no entry for the key."""

    function: str

    def __str__(self) -> str:
        return f"NoRule({self.function})"


@dataclass
class FusedRule:
    priority: str  # display only; rows are stored in evaluation order
    match: MatchSpec
    action: object


@dataclass
class StageTable:
    """One executable table: either keyed lookup or ordered rule scan."""

    network_id: str
    member: str
    function: str
    keyed: dict[str, object] = field(default_factory=dict)
    rules: list[FusedRule] = field(default_factory=list)

    @property
    def is_keyed(self) -> bool:
        return self.function in ("Transmit", "Send", "Receive")

    @property
    def no_match_marker(self) -> str:
        return f"no-rule:{self.function}"


@dataclass
class Stage:
    """One fused stage: the parts it merges and a table per part.

    tables[0] is the materialized fusion, executed when a packet enters the
    stage at its anchor function.  tables[i > 0] keep the plain constituent
    behaviour so a lookup addressed to an absorbed table still resolves.
    """

    parts: tuple[tuple[str, str, str], ...]  # (network, member, function)
    tables: tuple[StageTable, ...]

    @property
    def label(self) -> str:
        return "+".join(f"{fn}({member})" for _, member, fn in self.parts)


@dataclass
class StagePlan:
    machine_id: str
    assumptions: tuple[str, ...]
    stages: list[Stage]

    @property
    def stage_count(self) -> int:
        return len(self.stages)

    def locate(self, network_id: str, member: str, function: str):
        """(stage, part table) answering lookups for one original table."""
        for stage in self.stages:
            for i, part in enumerate(stage.parts):
                if part == (network_id, member, function):
                    return stage, stage.tables[i]
        return None, None

    def render(self) -> str:
        lines = [
            f"machine {self.machine_id}: {self.stage_count} stage(s)"
            + (f" under {', '.join(self.assumptions)}" if self.assumptions else ""),
        ]
        for i, stage in enumerate(self.stages, start=1):
            lines.append(f"  stage {i}: {stage.label}")
        return "\n".join(lines)


# -- match composition ---------------------------------------------------------


def _merge_field(a: FieldMatch, b: FieldMatch) -> FieldMatch | None:
    """The predicate matching exactly what both match, or None if nothing can."""
    if a.kind == "wildcard":
        return b
    if b.kind == "wildcard":
        return a
    if a.kind == "exact" and b.kind == "exact":
        return a if a.value == b.value else None
    if a.kind == "exact":
        return a if a.matches(a.value) and b.matches(a.value) else None
    if b.kind == "exact":
        return b if a.matches(b.value) else None
    # two prefixes: the longer one wins when one extends the other
    av, bv = a.value or "", b.value or ""
    if av.startswith(bv):
        return a
    if bv.startswith(av):
        return b
    return None


def conjoin(a: MatchSpec, b: MatchSpec) -> MatchSpec | None:
    """Both specs at once; None when statically unsatisfiable."""
    if a.in_link is not None and b.in_link is not None and a.in_link != b.in_link:
        return None
    fields: dict[str, FieldMatch] = {}
    for name, fm in (*a.fields, *b.fields):
        prev = fields.get(name)
        if prev is None:
            fields[name] = fm
            continue
        merged = _merge_field(prev, fm)
        if merged is None:
            return None
        fields[name] = merged
    return MatchSpec(
        in_link=a.in_link if a.in_link is not None else b.in_link,
        fields=tuple(sorted(fields.items())),
    )


def _ordered(rules: list[Rule]) -> list[Rule]:
    """Rules in scan order: highest priority first, authored order breaks ties."""
    return sorted(rules, key=lambda r: -r.priority)


# -- materialization -----------------------------------------------------------


def _forward_row_action(
    topology: Topology,
    member: Member,
    tables: pipeline.MemberTables,
    rule: Rule,
    absorb_transmit: bool,
):
    if isinstance(rule.action, Drop):
        return RowDrop("drop")
    local = rule.action.local_id
    if local in topology.bridge_ports(member.network_id, member):
        return RowBridge(local)
    if local not in member.local_links:
        return RowDrop("unknown-outlink")
    if not absorb_transmit:
        return RowGoTransmit(local)
    action = tables.transmit.get(local)
    if action is None:
        return RowNoRule("Transmit")
    if isinstance(action, TransmitPrimitive):
        return RowEmit(local, action.egress_port)
    return RowDescend(action.network_id, action.session_id)


def _plain_table(topology: Topology, member: Member, function: str) -> StageTable:
    tables = topology.tables_for(member.network_id, member.name)
    out = StageTable(member.network_id, member.name, function)
    if function == "Transmit":
        for local, action in sorted(tables.transmit.items()):
            if isinstance(action, TransmitPrimitive):
                out.keyed[local] = RowEmit(local, action.egress_port)
            else:
                out.keyed[local] = RowDescend(action.network_id, action.session_id)
    elif function == "Send":
        for ident, encoding in sorted(tables.send.items()):
            session = topology.visible_session(member.network_id, ident)
            encrypting = session is not None and "encrypting" in session.attrs
            out.keyed[ident] = RowEncap(
                member.network_id, member.name, ident, dict(encoding), encrypting
            )
    elif function == "Forward":
        for rule in _ordered(tables.forward):
            action = _forward_row_action(topology, member, tables, rule, False)
            out.rules.append(FusedRule(str(rule.priority), rule.match, action))
    elif function == "Acquire":
        for rule in _ordered(tables.acquire):
            if isinstance(rule.action, AcquireReceive):
                action: object = RowReceiveDispatch()
            else:
                action = RowGoForward(member.network_id, member.name)
            out.rules.append(FusedRule(str(rule.priority), rule.match, action))
    elif function == "Receive":
        for key, action in sorted(tables.receive.items()):
            if isinstance(action, ReceivePrimitive):
                out.keyed[key] = RowDeliver()
            else:
                out.keyed[key] = RowStrip(action.network_id, action.link_id)
    else:  # pragma: no cover - caller passes canonical names
        raise ValueError(f"unknown function {function!r}")
    return out


def _compose_transmit_send(
    topology: Topology, machine_id: str, member: Member
) -> tuple[StageTable, list[Member]] | None:
    """Inline underlay Send encodings into an all-external Transmit table.

    Returns None when some session target has no member on this machine; the
    stage then stays unmerged and the runtime descends the seam as usual.
    """
    tables = topology.tables_for(member.network_id, member.name)
    out = StageTable(member.network_id, member.name, "Transmit")
    absorbed: list[Member] = []
    for local, action in sorted(tables.transmit.items()):
        if isinstance(action, TransmitPrimitive):
            out.keyed[local] = RowEmit(local, action.egress_port)
            continue
        under = topology.machine_member_in(machine_id, action.network_id)
        if under is None:
            return None
        encoding = topology.tables_for(under.network_id, under.name).send.get(
            action.session_id
        )
        if encoding is None:
            out.keyed[local] = RowNoRule("Send")
        else:
            session = topology.visible_session(under.network_id, action.session_id)
            encrypting = session is not None and "encrypting" in session.attrs
            out.keyed[local] = RowEncap(
                under.network_id,
                under.name,
                action.session_id,
                dict(encoding),
                encrypting,
            )
        if all(m.name != under.name or m.network_id != under.network_id for m in absorbed):
            absorbed.append(under)
    return out, absorbed


def _compose_forward_transmit(topology: Topology, member: Member) -> StageTable:
    """One scan resolves the route and the egress when every link is a wire."""
    tables = topology.tables_for(member.network_id, member.name)
    out = StageTable(member.network_id, member.name, "Forward")
    for rule in _ordered(tables.forward):
        action = _forward_row_action(topology, member, tables, rule, True)
        out.rules.append(FusedRule(str(rule.priority), rule.match, action))
    return out


def _compose_acquire(topology: Topology, member: Member, absorb: str) -> StageTable:
    """Fold Receive dispatch (or the Forward scan) into the Acquire table.

    absorb == "receive": each session key expands into exact field constraints
    so one lookup decides deliver / strip / plain delivery.
    absorb == "forward": the Forward branch is crossed with the Forward rules;
    a per-rule floor row keeps the two-stage no-rule outcome.
    """
    tables = topology.tables_for(member.network_id, member.name)
    net = topology.networks[member.network_id]
    key_fields = net.session_key_fields()
    out = StageTable(member.network_id, member.name, "Acquire")
    for rule in _ordered(tables.acquire):
        prio = str(rule.priority)
        if isinstance(rule.action, AcquireForward):
            if absorb != "forward":
                out.rules.append(
                    FusedRule(prio, rule.match, RowGoForward(member.network_id, member.name))
                )
                continue
            for fwd in _ordered(tables.forward):
                match = conjoin(rule.match, fwd.match)
                if match is None:
                    continue
                action = _forward_row_action(topology, member, tables, fwd, False)
                out.rules.append(FusedRule(f"{prio}/{fwd.priority}", match, action))
            out.rules.append(FusedRule(f"{prio}/-", rule.match, RowNoRule("Forward")))
            continue
        # Receive branch
        if absorb != "receive":
            out.rules.append(FusedRule(prio, rule.match, RowReceiveDispatch()))
            continue
        for key in sorted(tables.receive):
            parts = key.split(":")
            if len(parts) != len(key_fields):
                continue
            constraint = MatchSpec(
                fields=tuple(
                    (name, FieldMatch("exact", value))
                    for name, value in zip(key_fields, parts)
                )
            )
            match = conjoin(rule.match, constraint)
            if match is None:
                continue
            action = tables.receive[key]
            if isinstance(action, ReceivePrimitive):
                row: object = RowDeliver()
            else:
                row = RowStrip(action.network_id, action.link_id)
            out.rules.append(FusedRule(f"{prio}/{key}", match, row))
        # unlisted session keys fall through to plain delivery
        out.rules.append(FusedRule(f"{prio}/-", rule.match, RowDeliver()))
    return out


# -- plan construction --------------------------------------------------------


def fuse(topology: Topology, machine_id: str, assumptions: tuple[str, ...] = ()) -> StagePlan:
    """Build the stage plan for one machine under the given facts.

    With no assumptions the plan is the identity: one stage per non-empty
    (member, function) table.  Each fact is checked against the topology
    first; a contradicted fact raises InvalidAssumptionError.
    """
    machine = topology.machines.get(machine_id)
    if machine is None:
        raise UnknownMachineError(machine_id)
    facts: dict[str, set[str]] = {}
    for text in assumptions:
        assumption = parse_assumption(text)
        check_assumption(topology, assumption)
        facts.setdefault(assumption.network_id, set()).add(assumption.kind)

    members = [
        topology.members[(net, name)] for net, name in sorted(machine.members.items())
    ]

    def has_fact(network_id: str, kind: str) -> bool:
        return kind in facts.get(network_id, ())

    # decide the merges first, then emit stages in member / function order
    anchors: dict[tuple[str, str, str], tuple] = {}
    consumed: set[tuple[str, str, str]] = set()
    for member in members:
        net, name = member.network_id, member.name
        tables = topology.tables_for(net, name)
        if tables.transmit and has_fact(net, "all-links-external"):
            composed = _compose_transmit_send(topology, machine_id, member)
            if composed is not None:
                table, absorbed = composed
                anchors[(net, name, "Transmit")] = ("TS", member, table, absorbed)
                for under in absorbed:
                    consumed.add((under.network_id, under.name, "Send"))
        if has_fact(net, "all-links-primitive"):
            if (
                tables.forward
                and tables.transmit
                and (net, name, "Transmit") not in anchors
            ):
                anchors[(net, name, "Forward")] = ("FT", member, None, None)
                consumed.add((net, name, "Transmit"))
            if tables.acquire and tables.receive:
                anchors[(net, name, "Acquire")] = ("AR", member, None, None)
                consumed.add((net, name, "Receive"))
        if (
            (net, name, "Acquire") not in anchors
            and (has_fact(net, "all-links-external") or has_fact(net, "all-links-primitive"))
            and tables.acquire
            and not tables.receive
            and tables.forward
            and (net, name, "Forward") not in anchors
            and (net, name, "Forward") not in consumed
        ):
            anchors[(net, name, "Acquire")] = ("AF", member, None, None)
            consumed.add((net, name, "Forward"))

    stages: list[Stage] = []
    for member in members:
        net, name = member.network_id, member.name
        tables = topology.tables_for(net, name)
        for function in FUNCTION_ORDER:
            ref = (net, name, function)
            if ref in consumed or function not in tables.present_functions():
                continue
            anchored = anchors.get(ref)
            if anchored is None:
                stages.append(Stage(parts=(ref,), tables=(_plain_table(topology, member, function),)))
                continue
            kind, _, ts_table, absorbed = anchored
            if kind == "TS":
                parts = [ref]
                part_tables = [ts_table]
                for under in absorbed:
                    parts.append((under.network_id, under.name, "Send"))
                    part_tables.append(_plain_table(topology, under, "Send"))
            elif kind == "FT":
                parts = [ref, (net, name, "Transmit")]
                part_tables = [
                    _compose_forward_transmit(topology, member),
                    _plain_table(topology, member, "Transmit"),
                ]
            elif kind == "AR":
                parts = [ref, (net, name, "Receive")]
                part_tables = [
                    _compose_acquire(topology, member, "receive"),
                    _plain_table(topology, member, "Receive"),
                ]
            else:  # AF
                parts = [ref, (net, name, "Forward")]
                part_tables = [
                    _compose_acquire(topology, member, "forward"),
                    _plain_table(topology, member, "Forward"),
                ]
            stages.append(Stage(parts=tuple(parts), tables=tuple(part_tables)))
    return StagePlan(machine_id=machine_id, assumptions=tuple(assumptions), stages=stages)


# -- machine-confined execution ------------------------------------------------


@dataclass(frozen=True)
class Entry:
    """One way a packet can enter the machine's pipeline."""

    kind: str  # "transmit" | "acquire"
    network_id: str
    member: str
    key: str  # local link chosen / arrival inLink
    packet: Packet

    def render(self) -> str:
        if self.kind == "transmit":
            return f"transmit {self.member}.{self.key}"
        return f"arrive {self.member} inLink {self.key}"


@dataclass(frozen=True)
class Emission:
    network_id: str
    member: str
    local_id: str
    egress_port: str
    packet: Packet


@dataclass
class RunResult:
    emissions: list[Emission] = field(default_factory=list)
    outcome: tuple = ()

    def describe(self) -> str:
        out = " + ".join(
            f"emit {e.member}.{e.local_id} {_render_header(e.packet)}" for e in self.emissions
        )
        kind = self.outcome[0] if self.outcome else "?"
        tail = " ".join(str(p) for p in self.outcome[1:3])
        return f"{out + ' -> ' if out else ''}{kind} {tail}".strip()


def _render_header(packet: Packet) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(packet.header.items()))


_STEP_BUDGET = 64


def _cross_bridge(topology: Topology, member: Member, packet: Packet, bridge):
    """Rewrite and hand over at a bridge; None when the far member is missing."""
    if bridge.net_a == member.network_id:
        to_net, to_port = bridge.net_b, bridge.port_b
    else:
        to_net, to_port = bridge.net_a, bridge.port_a
    to_member = topology.machine_member_in(member.machine_id, to_net, bridged=False)
    if to_member is None:
        return None
    header = dict(packet.header)
    for field_name, frm, to in bridge.rewrites:
        if header.get(field_name) == frm:
            header[field_name] = to
    crossed = replace(packet, network_id=to_net, header=header, meta=PacketMeta(in_link=to_port))
    return to_member, crossed


def machine_run(topology: Topology, machine_id: str, entry: Entry) -> RunResult:
    """Reference semantics: the plain five-function pipeline, machine-confined."""
    machine = topology.machines.get(machine_id)
    if machine is None:
        raise UnknownMachineError(machine_id)
    result = RunResult()

    def member_of(network_id: str, name: str) -> Member:
        return topology.members[(network_id, name)]

    member = member_of(entry.network_id, entry.member)
    if entry.kind == "transmit":
        state: tuple | None = ("transmit", member, entry.packet, entry.key)
    else:
        state = ("acquire", member, entry.packet.with_meta(in_link=entry.key))

    for _ in range(_STEP_BUDGET):
        if state is None:
            return result
        fn, member, packet = state[0], state[1], state[2]
        if fn == "transmit":
            try:
                step = pipeline.fn_transmit(topology, member, packet, state[3])
            except NoRuleError:
                result.outcome = ("Dropped", member.network_id, member.name, "no-rule:Transmit")
                return result
            if isinstance(step, pipeline.Emit):
                result.emissions.append(
                    Emission(
                        member.network_id,
                        member.name,
                        step.local_id,
                        step.egress_port,
                        step.packet.bare(),
                    )
                )
                result.outcome = ("Emitted", member.network_id, member.name, step.local_id)
                return result
            under = topology.machine_member_in(machine_id, step.network_id)
            if under is None:
                result.outcome = ("Dropped", member.network_id, member.name, "no-underlay-member")
                return result
            state = ("send", under, step.packet)
        elif fn == "send":
            try:
                step = pipeline.fn_send(topology, member, packet)
            except NoRuleError:
                result.outcome = ("Dropped", member.network_id, member.name, "no-rule:Send")
                return result
            state = ("forward", member, step.packet)
        elif fn == "forward":
            step = pipeline.fn_forward(topology, member, packet)
            if isinstance(step, pipeline.Dropped):
                result.outcome = ("Dropped", member.network_id, member.name, step.marker)
                return result
            bridge = topology.bridge_at(member.network_id, member, step.local_id)
            if bridge is not None:
                crossed = _cross_bridge(topology, member, packet, bridge)
                if crossed is None:
                    result.outcome = ("Dropped", member.network_id, member.name, "bridge-member-missing")
                    return result
                state = ("acquire", crossed[0], crossed[1])
            elif step.local_id not in member.local_links:
                result.outcome = ("Dropped", member.network_id, member.name, "unknown-outlink")
                return result
            else:
                state = ("transmit", member, packet, step.local_id)
        elif fn == "acquire":
            step = pipeline.fn_acquire(topology, member, packet)
            if isinstance(step, pipeline.Dropped):
                result.outcome = ("Dropped", member.network_id, member.name, step.marker)
                return result
            if isinstance(step, pipeline.ToForward):
                state = ("forward", member, packet)
                continue
            net = topology.networks[member.network_id]
            session_key = net.session_key(packet.header)
            tables = topology.tables_for(member.network_id, member.name)
            if session_key is not None and session_key in tables.receive:
                state = ("receive", member, packet)
            else:
                result.outcome = ("Delivered", member.network_id, member.name, packet.bare())
                return result
        elif fn == "receive":
            try:
                step = pipeline.fn_receive(topology, member, packet)
            except ValueError:
                result.outcome = ("Dropped", member.network_id, member.name, "malformed-strip")
                return result
            if isinstance(step, pipeline.Deliver):
                result.outcome = ("Delivered", member.network_id, member.name, step.packet.bare())
                return result
            over = topology.machine_member_in(member.machine_id, step.network_id)
            if over is None:
                result.outcome = ("Dropped", member.network_id, member.name, "no-overlay-member")
                return result
            link = topology.links.get((step.network_id, step.link_id))
            local = link.local_at(over.name) if link is not None else None
            if local is None:
                result.outcome = ("Dropped", member.network_id, member.name, "no-local-link")
                return result
            state = ("acquire", over, step.packet.with_meta(in_link=local))
    result.outcome = ("Budget",)
    return result


def run_plan(topology: Topology, plan: StagePlan, entry: Entry) -> RunResult:
    """Execute the fused plan's materialized tables over one entering packet."""
    result = RunResult()

    def locate(network_id: str, member: str, function: str) -> StageTable | None:
        _, table = plan.locate(network_id, member, function)
        return table

    def drop(network_id: str, member: str, marker: str) -> RunResult:
        result.outcome = ("Dropped", network_id, member, marker)
        return result

    member = topology.members[(entry.network_id, entry.member)]
    if entry.kind == "transmit":
        state: tuple = ("Transmit", member, entry.packet, entry.key)
    else:
        state = ("Acquire", member, entry.packet.with_meta(in_link=entry.key))

    for _ in range(_STEP_BUDGET):
        function, member, packet = state[0], state[1], state[2]
        net, name = member.network_id, member.name
        table = locate(net, name, function)
        if function in ("Transmit", "Send", "Receive"):
            if function == "Transmit":
                key = state[3]
            elif function == "Send":
                key = packet.meta.sess_ident or ""
            else:
                key = topology.networks[net].session_key(packet.header) or ""
            row = table.keyed.get(key) if table is not None else None
            if row is None:
                return drop(net, name, f"no-rule:{function}")
        else:
            rows = table.rules if table is not None else []
            row = None
            for candidate in rows:
                if candidate.match.matches(packet.meta.in_link, packet.header):
                    row = candidate.action
                    break
            if row is None:
                return drop(net, name, f"no-rule:{function}")

        if isinstance(row, RowEmit):
            result.emissions.append(
                Emission(net, name, row.local_id, row.egress_port, packet.bare())
            )
            result.outcome = ("Emitted", net, name, row.local_id)
            return result
        if isinstance(row, RowDescend):
            under = topology.machine_member_in(plan.machine_id, row.network_id)
            if under is None:
                return drop(net, name, "no-underlay-member")
            tagged = replace(
                packet, meta=PacketMeta(in_link=packet.meta.in_link, sess_ident=row.session_id)
            )
            state = ("Send", under, tagged)
        elif isinstance(row, RowEncap):
            owner = topology.members[(row.network_id, row.member)]
            outer = Packet(
                network_id=row.network_id,
                header=dict(row.encoding),
                payload=packet.bare(),
                payload_encrypted=row.encrypting,
                meta=PacketMeta(in_link=SELF, sess_ident=row.session_id),
            )
            state = ("Forward", owner, outer)
        elif isinstance(row, RowGoForward):
            state = ("Forward", topology.members[(row.network_id, row.member)], packet)
        elif isinstance(row, RowGoTransmit):
            state = ("Transmit", member, packet, row.local_id)
        elif isinstance(row, RowBridge):
            bridge = topology.bridge_at(net, member, row.port)
            if bridge is None:
                return drop(net, name, "unknown-outlink")
            crossed = _cross_bridge(topology, member, packet, bridge)
            if crossed is None:
                return drop(net, name, "bridge-member-missing")
            state = ("Acquire", crossed[0], crossed[1])
        elif isinstance(row, RowReceiveDispatch):
            session_key = topology.networks[net].session_key(packet.header)
            receive = locate(net, name, "Receive")
            if receive is not None and session_key is not None and session_key in receive.keyed:
                state = ("Receive", member, packet)
            else:
                result.outcome = ("Delivered", net, name, packet.bare())
                return result
        elif isinstance(row, RowDeliver):
            result.outcome = ("Delivered", net, name, packet.bare())
            return result
        elif isinstance(row, RowStrip):
            inner = packet.payload
            if not isinstance(inner, Packet):
                return drop(net, name, "malformed-strip")
            over = topology.machine_member_in(member.machine_id, row.network_id)
            if over is None:
                return drop(net, name, "no-overlay-member")
            link = topology.links.get((row.network_id, row.link_id))
            local = link.local_at(over.name) if link is not None else None
            if local is None:
                return drop(net, name, "no-local-link")
            state = ("Acquire", over, inner.with_meta(in_link=local))
        elif isinstance(row, RowDrop):
            return drop(net, name, row.marker)
        elif isinstance(row, RowNoRule):
            return drop(net, name, f"no-rule:{row.function}")
        else:  # pragma: no cover - materializer emits only the rows above
            raise AssertionError(f"unknown row {row!r}")
    result.outcome = ("Budget",)
    return result


# -- equivalence ---------------------------------------------------------------


def machine_entries(topology: Topology, machine_id: str):
    """Every entry point times every universe header (nested where strippable).

    Arrivals cover wire links and bridge ports; when an arrival's session key
    is listed with a strip action, the payload additionally ranges over the
    overlay network's universe so the post-strip stages are exercised.
    """
    machine = topology.machines.get(machine_id)
    if machine is None:
        raise UnknownMachineError(machine_id)
    for network_id, name in sorted(machine.members.items()):
        member = topology.members[(network_id, name)]
        tables = topology.tables_for(network_id, name)
        net = topology.networks[network_id]
        universe = [dict(h) for h in topology.header_universe(network_id)]
        for local in sorted(tables.transmit):
            for header in universe:
                yield Entry("transmit", network_id, name, local, Packet(network_id, dict(header)))
        arrivals = sorted(
            local
            for local, link_id in member.local_links.items()
            if (link := topology.links.get((network_id, link_id))) is not None
            and link.impl is None
        )
        arrivals.extend(sorted(topology.bridge_ports(network_id, member)))
        for local in arrivals:
            for header in universe:
                yield Entry("acquire", network_id, name, local, Packet(network_id, dict(header)))
                key = net.session_key(header)
                action = tables.receive.get(key) if key is not None else None
                if isinstance(action, ReceiveToLink):
                    for inner in topology.header_universe(action.network_id):
                        yield Entry(
                            "acquire",
                            network_id,
                            name,
                            local,
                            Packet(
                                network_id,
                                dict(header),
                                payload=Packet(action.network_id, dict(inner)),
                            ),
                        )


def check_equivalence(
    topology: Topology, machine_id: str, plan: StagePlan, max_witnesses: int = 5
) -> PropertyResult:
    """Replay every entry against both pipelines and compare outcomes.

    Holds iff emissions and final outcome agree for every packet in the
    header universe at every entry point of the machine.
    """
    witnesses: list[Witness] = []
    checked = 0
    for entry in machine_entries(topology, machine_id):
        checked += 1
        reference = machine_run(topology, machine_id, entry)
        fused = run_plan(topology, plan, entry)
        if reference == fused:
            continue
        witnesses.append(
            Witness(
                subject=entry.render(),
                note=f"unfused: {reference.describe()} / fused: {fused.describe()}",
                header=dict(entry.packet.header),
            )
        )
        if len(witnesses) >= max_witnesses:
            break
    name = f"fusion-equivalence({machine_id}, {checked} runs)"
    return PropertyResult(
        name=name,
        kind="stage-fusion",
        network_id=machine_id,
        holds=not witnesses,
        witnesses=witnesses,
    )


# -- statistics ----------------------------------------------------------------


@dataclass
class MachineStats:
    machine_id: str
    member_rules: dict[tuple[str, str], int]
    unfused_stages: int
    fused_stages: int
    assumptions: tuple[str, ...]

    @property
    def flattened_rules(self) -> int:
        """Single-table estimate: layers sharing the machine multiply out.

        Each member contributes max(1, rules) factors, so the estimate is
        never below any one layer's count.
        """
        total = 1
        for count in self.member_rules.values():
            total *= max(1, count)
        return total


@dataclass
class RuleStats:
    network_rules: dict[str, int]
    machines: dict[str, MachineStats]

    def render(self) -> str:
        lines = ["rules per network:"]
        for network_id, count in sorted(self.network_rules.items()):
            lines.append(f"  {network_id}: {count}")
        lines.append("stages per machine (unfused -> fused / flattened-table estimate):")
        for machine_id, stats in sorted(self.machines.items()):
            lines.append(
                f"  {machine_id}: {stats.unfused_stages} -> {stats.fused_stages}"
                f" / {stats.flattened_rules} rules if flattened"
            )
        return "\n".join(lines)


def rule_stats(topology: Topology) -> RuleStats:
    """Exact per-layer rule counts plus per-machine stage arithmetic.

    Fused counts use only facts that actually hold for each machine's
    networks, so they are realizable, not aspirational.
    """
    network_rules: dict[str, int] = {network_id: 0 for network_id in topology.networks}
    for (network_id, _), tables in sorted(topology.tables.items()):
        network_rules[network_id] = network_rules.get(network_id, 0) + tables.rule_count()
    machines: dict[str, MachineStats] = {}
    for machine_id, machine in sorted(topology.machines.items()):
        member_rules: dict[tuple[str, str], int] = {}
        unfused = 0
        for network_id, name in sorted(machine.members.items()):
            tables = topology.tables_for(network_id, name)
            member_rules[(network_id, name)] = tables.rule_count()
            unfused += len(tables.present_functions())
        assumptions = derive_assumptions(topology, machine_id)
        fused = fuse(topology, machine_id, assumptions).stage_count
        machines[machine_id] = MachineStats(
            machine_id=machine_id,
            member_rules=member_rules,
            unfused_stages=unfused,
            fused_stages=fused,
            assumptions=assumptions,
        )
    return RuleStats(network_rules=network_rules, machines=machines)


# -- export --------------------------------------------------------------------


def _export_rows(table_kind: str, tables: pipeline.MemberTables) -> list[str]:
    rows = []
    if table_kind == "Transmit":
        for local, action in sorted(tables.transmit.items()):
            rows.append(f"- | {local} | {action}")
    elif table_kind == "Send":
        for ident, encoding in sorted(tables.send.items()):
            body = ",".join(f"{k}={v}" for k, v in sorted(encoding.items()))
            rows.append(f"- | {ident} | encapsulate {body}")
    elif table_kind == "Forward":
        for rule in _ordered(tables.forward):
            rows.append(f"{rule.priority} | {rule.match.render()} | {rule.action}")
    elif table_kind == "Acquire":
        for rule in _ordered(tables.acquire):
            rows.append(f"{rule.priority} | {rule.match.render()} | {rule.action}")
    elif table_kind == "Receive":
        for key, action in sorted(tables.receive.items()):
            rows.append(f"- | {key} | {action}")
    return rows


def export_tables(topology: Topology, machine_id: str, format: str = "text") -> str:
    """Deterministic dump of every member's five tables plus the stage plan."""
    if format != "text":
        raise ValueError(f"unknown export format {format!r}")
    machine = topology.machines.get(machine_id)
    if machine is None:
        raise UnknownMachineError(machine_id)
    lines = [f"machine {machine_id}"]
    for network_id, name in sorted(machine.members.items()):
        tables = topology.tables_for(network_id, name)
        for function in FUNCTION_ORDER:
            rows = _export_rows(function, tables)
            if not rows:
                continue
            lines.append("")
            lines.append(f"[{network_id}.{name} {function}]")
            lines.append("priority | match | action")
            lines.extend(rows)
    assumptions = derive_assumptions(topology, machine_id)
    plan = fuse(topology, machine_id, assumptions)
    lines.append("")
    lines.append(plan.render())
    for stage in plan.stages:
        if len(stage.parts) < 2:
            continue
        lines.append("")
        lines.append(f"[fused {stage.label}]")
        lines.append("priority | match | action")
        table = stage.tables[0]
        if table.is_keyed:
            for key, row in sorted(table.keyed.items()):
                lines.append(f"- | {key} | {row}")
        else:
            for rule in table.rules:
                lines.append(f"{rule.priority} | {rule.match.render()} | {rule.action}")
    return "\n".join(lines) + "\n"
