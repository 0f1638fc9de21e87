"""The five match-action functions and the tables that drive them.

Every data-plane decision a member makes is one of five pure functions over
immutable tables and a packet value:

* Transmit: local link -> send on the wire, or hand to an underlay session
* Send:     session id -> encapsulate under the session's header encoding
* Forward:  (inLink, header fields) -> drop or pick an outgoing local link
* Acquire:  (inLink, header fields) -> receive here or keep forwarding
* Receive:  session id in the header -> deliver, or strip to an overlay link

Forward and Acquire are rule lists matched highest priority first; ties are
broken by authored order.  A missing Forward/Acquire match degrades to a drop
with a distinct marker, while Transmit/Send/Receive raise NoRuleError.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Union

from .model import SELF

if TYPE_CHECKING:
    from .model import Member, Topology


class NoRuleError(Exception):
    """A keyed table has no entry for the packet (configuration hole)."""

    def __init__(self, function: str, member: str, key: object):
        super().__init__(f"{function} at {member}: no rule for key {key!r}")
        self.function = function
        self.member = member
        self.key = key


@dataclass(frozen=True)
class PacketMeta:
    """Transient per-hop metadata; never serialized onto the wire."""

    in_link: str | None = None
    sess_ident: str | None = None


EMPTY_META = PacketMeta()


@dataclass(frozen=True)
class Packet:
    """One packet of one network: a header map plus an opaque or nested payload."""

    network_id: str
    header: dict[str, str]
    payload: Union["Packet", str] = ""
    payload_encrypted: bool = False
    meta: PacketMeta = EMPTY_META

    def with_meta(self, in_link: str | None = None, sess_ident: str | None = None) -> "Packet":
        return replace(self, meta=PacketMeta(in_link=in_link, sess_ident=sess_ident))

    def bare(self) -> "Packet":
        """The packet without transient metadata (wire form)."""
        return replace(self, meta=EMPTY_META)

    def layers(self) -> list["Packet"]:
        """Outermost-first encapsulation stack."""
        out: list[Packet] = [self]
        inner = self.payload
        while isinstance(inner, Packet):
            out.append(inner)
            inner = inner.payload
        return out


# -- match predicates -------------------------------------------------------


@dataclass(frozen=True)
class FieldMatch:
    """Per-field predicate: exact token, any token, or a token prefix."""

    kind: str  # "exact" | "wildcard" | "prefix"
    value: str | None = None

    def matches(self, actual: str | None) -> bool:
        if self.kind == "wildcard":
            return True
        if actual is None:
            return False
        if self.kind == "exact":
            return actual == self.value
        if self.kind == "prefix":
            return actual.startswith(self.value or "")
        raise ValueError(f"unknown match kind {self.kind!r}")

    def render(self) -> str:
        if self.kind == "wildcard":
            return "*"
        if self.kind == "prefix":
            return f"~{self.value}"
        return str(self.value)


@dataclass(frozen=True)
class MatchSpec:
    """The key of a Forward/Acquire rule: an inLink pattern plus field predicates."""

    in_link: str | None = None  # None matches any inLink, including Self
    fields: tuple[tuple[str, FieldMatch], ...] = ()

    def matches(self, in_link: str | None, header: dict[str, str]) -> bool:
        if self.in_link is not None and in_link != self.in_link:
            return False
        return all(fm.matches(header.get(name)) for name, fm in self.fields)

    def render(self) -> str:
        parts = []
        if self.in_link is not None:
            parts.append(f"inLink={self.in_link}")
        parts.extend(f"{name}={fm.render()}" for name, fm in self.fields)
        return ", ".join(parts) if parts else "*"


# -- table actions ----------------------------------------------------------


@dataclass(frozen=True)
class TransmitPrimitive:
    egress_port: str

    def __str__(self) -> str:
        return f"Primitive(egress {self.egress_port})"


@dataclass(frozen=True)
class TransmitToSession:
    network_id: str
    session_id: str

    def __str__(self) -> str:
        return f"ExternalSession({self.network_id}, {self.session_id})"


@dataclass(frozen=True)
class Drop:
    def __str__(self) -> str:
        return "Drop"


@dataclass(frozen=True)
class OutLink:
    local_id: str

    def __str__(self) -> str:
        return f"OutLink({self.local_id})"


@dataclass(frozen=True)
class AcquireReceive:
    def __str__(self) -> str:
        return "Receive"


@dataclass(frozen=True)
class AcquireForward:
    def __str__(self) -> str:
        return "Forward"


@dataclass(frozen=True)
class ReceivePrimitive:
    def __str__(self) -> str:
        return "Primitive"


@dataclass(frozen=True)
class ReceiveToLink:
    network_id: str
    link_id: str

    def __str__(self) -> str:
        return f"ExternalLink({self.network_id}, {self.link_id})"


TransmitAction = Union[TransmitPrimitive, TransmitToSession]
ForwardAction = Union[Drop, OutLink]
AcquireAction = Union[AcquireReceive, AcquireForward]
ReceiveAction = Union[ReceivePrimitive, ReceiveToLink]


@dataclass(frozen=True)
class Rule:
    priority: int
    match: MatchSpec
    action: Union[ForwardAction, AcquireAction]


@dataclass
class MemberTables:
    """All five tables of one member.  Missing tables are just empty."""

    transmit: dict[str, TransmitAction] = field(default_factory=dict)
    send: dict[str, dict[str, str]] = field(default_factory=dict)
    forward: list[Rule] = field(default_factory=list)
    acquire: list[Rule] = field(default_factory=list)
    receive: dict[str, ReceiveAction] = field(default_factory=dict)

    def rule_count(self) -> int:
        return (
            len(self.transmit)
            + len(self.send)
            + len(self.forward)
            + len(self.acquire)
            + len(self.receive)
        )

    def present_functions(self) -> list[str]:
        """Non-empty tables in canonical stage order."""
        out = []
        for name, table in (
            ("Transmit", self.transmit),
            ("Send", self.send),
            ("Forward", self.forward),
            ("Acquire", self.acquire),
            ("Receive", self.receive),
        ):
            if table:
                out.append(name)
        return out


def matching_rules(rules: list[Rule], in_link: str | None, header: dict[str, str]) -> list[Rule]:
    """All matching rules of maximal priority, in authored order.

    More than one entry means the table is ambiguous for this packet; the
    executable pipeline tie-breaks on authored order, the path-uniqueness
    check branches over all of them.
    """
    hits = [r for r in rules if r.match.matches(in_link, header)]
    if not hits:
        return []
    top = max(r.priority for r in hits)
    return [r for r in hits if r.priority == top]


def first_match(rules: list[Rule], in_link: str | None, header: dict[str, str]) -> Rule | None:
    hits = matching_rules(rules, in_link, header)
    return hits[0] if hits else None


# -- step results -------------------------------------------------------------


@dataclass(frozen=True)
class Emit:
    """Transmit chose a Primitive link: the packet goes out on the wire."""

    packet: Packet
    local_id: str
    egress_port: str


@dataclass(frozen=True)
class Descend:
    """Transmit handed the packet to an underlay session; Send runs next."""

    network_id: str
    session_id: str
    packet: Packet


@dataclass(frozen=True)
class ToForward:
    packet: Packet
    rule: Rule | None = None


@dataclass(frozen=True)
class ToTransmit:
    packet: Packet
    local_id: str
    rule: Rule | None = None


@dataclass(frozen=True)
class ToReceive:
    packet: Packet
    rule: Rule | None = None


@dataclass(frozen=True)
class Deliver:
    packet: Packet


@dataclass(frozen=True)
class StripToLink:
    """Receive found a link-implementing session: continue one layer up."""

    network_id: str
    link_id: str
    packet: Packet  # the encapsulated overlay packet


@dataclass(frozen=True)
class Dropped:
    packet: Packet
    marker: str
    rule: Rule | None = None


# -- the five functions -------------------------------------------------------


def fn_transmit(topology: "Topology", member: "Member", packet: Packet, local_link: str) -> Union[Emit, Descend]:
    """A member puts a packet on one of its links."""
    if packet.network_id != member.network_id:
        raise ValueError(f"packet of {packet.network_id} at member of {member.network_id}")
    tables = topology.tables_for(member.network_id, member.name)
    action = tables.transmit.get(local_link)
    if action is None:
        raise NoRuleError("Transmit", member.name, local_link)
    if isinstance(action, TransmitPrimitive):
        return Emit(packet=packet, local_id=local_link, egress_port=action.egress_port)
    tagged = replace(packet, meta=PacketMeta(in_link=packet.meta.in_link, sess_ident=action.session_id))
    return Descend(network_id=action.network_id, session_id=action.session_id, packet=tagged)


def fn_send(topology: "Topology", member: "Member", packet: Packet) -> ToForward:
    """Encapsulate under the session named by meta.sessIdent; inLink becomes Self."""
    ident = packet.meta.sess_ident
    if ident is None:
        raise ValueError(f"Send at {member.name}: packet carries no sessIdent")
    tables = topology.tables_for(member.network_id, member.name)
    encoding = tables.send.get(ident)
    if encoding is None:
        raise NoRuleError("Send", member.name, ident)
    session = topology.visible_session(member.network_id, ident)
    encrypting = session is not None and "encrypting" in session.attrs
    outer = Packet(
        network_id=member.network_id,
        header=dict(encoding),
        payload=packet.bare(),
        payload_encrypted=encrypting,
        meta=PacketMeta(in_link=SELF, sess_ident=ident),
    )
    return ToForward(packet=outer)


def fn_forward(topology: "Topology", member: "Member", packet: Packet) -> Union[ToTransmit, Dropped]:
    """Routing decision: first match over (inLink, header fields)."""
    tables = topology.tables_for(member.network_id, member.name)
    rule = first_match(tables.forward, packet.meta.in_link, packet.header)
    if rule is None:
        return Dropped(packet=packet, marker="no-rule:Forward")
    if isinstance(rule.action, Drop):
        return Dropped(packet=packet, marker="drop", rule=rule)
    return ToTransmit(packet=packet, local_id=rule.action.local_id, rule=rule)


def fn_acquire(topology: "Topology", member: "Member", packet: Packet) -> Union[ToReceive, ToForward, Dropped]:
    """Arrival decision: receive here, or keep forwarding."""
    tables = topology.tables_for(member.network_id, member.name)
    rule = first_match(tables.acquire, packet.meta.in_link, packet.header)
    if rule is None:
        return Dropped(packet=packet, marker="no-rule:Acquire")
    if isinstance(rule.action, AcquireReceive):
        return ToReceive(packet=packet, rule=rule)
    return ToForward(packet=packet, rule=rule)


def fn_receive(topology: "Topology", member: "Member", packet: Packet) -> Union[Deliver, StripToLink]:
    """Act on the session identifier carried in the packet header."""
    net = topology.networks[member.network_id]
    key = net.session_key(packet.header)
    tables = topology.tables_for(member.network_id, member.name)
    action = tables.receive.get(key) if key is not None else None
    if action is None:
        raise NoRuleError("Receive", member.name, key)
    if isinstance(action, ReceivePrimitive):
        return Deliver(packet=packet)
    inner = packet.payload
    if not isinstance(inner, Packet):
        raise ValueError(f"Receive at {member.name}: nothing encapsulated to strip")
    return StripToLink(network_id=action.network_id, link_id=action.link_id, packet=inner)
