"""Trace engine: drive one packet through the layered data plane.

`inject` starts at Transmit on a chosen link of the origin member and follows
the five functions across machines (WireHop), bridges (BridgeRewrite) and
layer seams (session encapsulation and strip) until the packet is delivered,
dropped, or the hop budget runs out.  Every decision becomes one TraceEvent;
WireHop and BridgeRewrite are plumbing events so wire and bridge traversal
stay visible between the function steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

from . import pipeline
from .model import Member, Topology
from .pipeline import NoRuleError, Packet, PacketMeta

DEFAULT_MAX_HOPS = 64

FUNCTION_EVENTS = ("Transmit", "Send", "Forward", "Acquire", "Receive")
PLUMBING_EVENTS = ("WireHop", "BridgeRewrite")


@dataclass(frozen=True)
class TraceEvent:
    step: int
    machine: str
    network: str
    member: str
    function: str
    key: str
    action: str
    # outermost-first header stack; None means opaque to this observer
    layers: tuple[tuple[str, Union[dict[str, str], None]], ...]

    @property
    def header(self) -> dict[str, str] | None:
        return self.layers[0][1] if self.layers else None

    def render(self) -> str:
        header = self.header or {}
        header_txt = ",".join(f"{k}={v}" for k, v in header.items())
        return (
            f"{self.step} {self.machine} {self.network} {self.member} "
            f"{self.function} {self.key} -> {self.action} | header={header_txt}"
        )


@dataclass(frozen=True)
class Outcome:
    kind: str  # "Delivered" | "Dropped" | "LoopDetected"
    member: str | None = None
    network: str | None = None
    marker: str | None = None
    packet: Packet | None = None

    def render(self) -> str:
        if self.kind == "Delivered":
            return f"outcome Delivered({self.member})"
        if self.kind == "Dropped":
            return f"outcome Dropped({self.member}, {self.marker})"
        return "outcome LoopDetected"


class SeamCrossing(tuple):
    """(network, link, session) recorded when a packet descends a seam."""

    __slots__ = ()

    def __new__(cls, network_id: str, link_id: str, session_id: str):
        return super().__new__(cls, (network_id, link_id, session_id))

    @property
    def network_id(self) -> str:
        return self[0]

    @property
    def link_id(self) -> str:
        return self[1]

    @property
    def session_id(self) -> str:
        return self[2]


@dataclass
class Trace:
    origin_network: str
    origin_member: str
    origin_link: str
    injected: Packet
    events: list[TraceEvent] = field(default_factory=list)
    outcome: Outcome | None = None
    seam_crossings: list[SeamCrossing] = field(default_factory=list)

    def function_events(self) -> list[TraceEvent]:
        """The five-function steps, with plumbing events filtered out."""
        return [e for e in self.events if e.function in FUNCTION_EVENTS]

    def to_text(self) -> str:
        lines = [e.render() for e in self.events]
        if self.outcome is not None:
            lines.append(self.outcome.render())
        return "\n".join(lines)

    def to_dict(self) -> dict:
        def layer_dict(layers):
            return [
                {"network": net, "header": dict(header) if header is not None else "encrypted"}
                for net, header in layers
            ]

        out = {
            "origin": {
                "network": self.origin_network,
                "member": self.origin_member,
                "link": self.origin_link,
            },
            "events": [
                {
                    "step": e.step,
                    "machine": e.machine,
                    "network": e.network,
                    "member": e.member,
                    "function": e.function,
                    "key": e.key,
                    "action": e.action,
                    "layers": layer_dict(e.layers),
                }
                for e in self.events
            ],
        }
        if self.outcome is not None:
            out["outcome"] = {
                "kind": self.outcome.kind,
                "member": self.outcome.member,
                "network": self.outcome.network,
                "marker": self.outcome.marker,
            }
        return out


def provenance(trace: Trace) -> list[SeamCrossing]:
    """The (network, link, session) seam crossings, outermost origin first.

    Only meaningful for delivered traces: this is the chain a service observer
    can recover from session identifiers alone.
    """
    if trace.outcome is None or trace.outcome.kind != "Delivered":
        raise ValueError("provenance requires a delivered trace")
    return list(trace.seam_crossings)


def snapshot_layers(
    topology: Topology, packet: Packet, observer: str
) -> tuple[tuple[str, Union[dict[str, str], None]], ...]:
    """Render the encapsulation stack as seen by one member.

    An encrypting session hides everything beneath its header from all
    members except the session endpoints.
    """
    out: list[tuple[str, Union[dict[str, str], None]]] = []
    current: Union[Packet, str] = packet
    while isinstance(current, Packet):
        out.append((current.network_id, _ordered_header(topology, current)))
        if isinstance(current.payload, Packet) and current.payload_encrypted:
            net = topology.networks.get(current.network_id)
            key = net.session_key(current.header) if net is not None else None
            session = topology.visible_session(current.network_id, key) if key else None
            endpoints = {session.initiator, session.responder} if session else set()
            if observer not in endpoints:
                out.append((current.payload.network_id, None))
                break
        current = current.payload
    return tuple(out)


def _ordered_header(topology: Topology, packet: Packet) -> dict[str, str]:
    net = topology.networks.get(packet.network_id)
    if net is None:
        return dict(packet.header)
    ordered = {f.name: packet.header[f.name] for f in net.fields if f.name in packet.header}
    for k, v in packet.header.items():
        if k not in ordered:
            ordered[k] = v
    return ordered


def inject(
    topology: Topology,
    origin: str,
    network_id: str,
    packet: Packet,
    local_link: str,
    max_hops: int = DEFAULT_MAX_HOPS,
) -> Trace:
    """Trace one packet from a Transmit at the origin member."""
    member = topology.members.get((network_id, origin))
    if member is None:
        raise LookupError(f"no member {origin!r} in network {network_id!r}")
    if local_link not in member.local_links:
        raise ValueError(f"{origin} has no local link {local_link!r}")
    if packet.network_id != network_id:
        raise ValueError(f"packet belongs to {packet.network_id!r}, not {network_id!r}")

    trace = Trace(
        origin_network=network_id,
        origin_member=origin,
        origin_link=local_link,
        injected=packet.bare(),
    )
    engine = _Engine(topology, trace, max_hops)
    engine.run(member, packet.bare(), local_link)
    return trace


class _Engine:
    def __init__(self, topology: Topology, trace: Trace, max_hops: int):
        self.topology = topology
        self.trace = trace
        self.max_hops = max_hops
        self.hops = 0

    # -- event plumbing -----------------------------------------------------

    def event(self, member: Member, function: str, key: str, action: str, packet: Packet) -> None:
        self.trace.events.append(
            TraceEvent(
                step=len(self.trace.events) + 1,
                machine=member.machine_id,
                network=member.network_id,
                member=member.name,
                function=function,
                key=key,
                action=action,
                layers=snapshot_layers(self.topology, packet, member.name),
            )
        )

    def finish(self, kind: str, member: Member | None = None, marker: str | None = None, packet: Packet | None = None) -> None:
        self.trace.outcome = Outcome(
            kind=kind,
            member=member.name if member else None,
            network=member.network_id if member else None,
            marker=marker,
            packet=packet.bare() if packet is not None else None,
        )

    def hop(self) -> bool:
        """Count a wire/bridge/seam traversal; False when the budget is spent."""
        self.hops += 1
        if self.hops > self.max_hops:
            self.trace.outcome = Outcome(kind="LoopDetected")
            return False
        return True

    # -- main loop ------------------------------------------------------------

    def run(self, member: Member, packet: Packet, local_link: str) -> None:
        state: tuple = ("transmit", member, packet, local_link)
        while state is not None:
            kind = state[0]
            if kind == "transmit":
                state = self.step_transmit(state[1], state[2], state[3])
            elif kind == "send":
                state = self.step_send(state[1], state[2])
            elif kind == "forward":
                state = self.step_forward(state[1], state[2])
            elif kind == "acquire":
                state = self.step_acquire(state[1], state[2])
            elif kind == "receive":
                state = self.step_receive(state[1], state[2])
            else:  # pragma: no cover - engine bug guard
                raise AssertionError(f"unknown engine state {kind!r}")

    def step_transmit(self, member: Member, packet: Packet, local_link: str):
        try:
            result = pipeline.fn_transmit(self.topology, member, packet, local_link)
        except NoRuleError:
            self.event(member, "Transmit", local_link, "NoRule", packet)
            self.finish("Dropped", member, "no-rule:Transmit")
            return None
        if isinstance(result, pipeline.Emit):
            self.event(member, "Transmit", local_link, str(pipeline.TransmitPrimitive(result.egress_port)), packet)
            return self.wire_hop(member, result.packet, result.local_id)
        # descend the seam into the underlay session
        self.event(member, "Transmit", local_link, f"ExternalSession({result.network_id}, {result.session_id})", result.packet)
        link_id = member.local_links[local_link]
        self.trace.seam_crossings.append(SeamCrossing(member.network_id, link_id, result.session_id))
        if not self.hop():
            return None
        under = self.topology.machine_member_in(member.machine_id, result.network_id)
        if under is None:
            self.finish("Dropped", member, "no-underlay-member")
            return None
        return ("send", under, result.packet)

    def step_send(self, member: Member, packet: Packet):
        try:
            result = pipeline.fn_send(self.topology, member, packet)
        except NoRuleError:
            self.event(member, "Send", str(packet.meta.sess_ident), "NoRule", packet)
            self.finish("Dropped", member, "no-rule:Send")
            return None
        self.event(member, "Send", str(packet.meta.sess_ident), "Encapsulate", result.packet)
        return ("forward", member, result.packet)

    def step_forward(self, member: Member, packet: Packet):
        result = pipeline.fn_forward(self.topology, member, packet)
        key = result.rule.match.render() if result.rule is not None else "-"
        if isinstance(result, pipeline.Dropped):
            self.event(member, "Forward", key, "Drop" if result.marker == "drop" else "NoRule", packet)
            self.finish("Dropped", member, result.marker)
            return None
        self.event(member, "Forward", key, str(pipeline.OutLink(result.local_id)), packet)
        bridge = self.topology.bridge_at(member.network_id, member, result.local_id)
        if bridge is not None:
            return self.bridge_cross(member, packet, bridge)
        if result.local_id not in member.local_links:
            self.finish("Dropped", member, "unknown-outlink")
            return None
        return ("transmit", member, packet, result.local_id)

    def step_acquire(self, member: Member, packet: Packet):
        result = pipeline.fn_acquire(self.topology, member, packet)
        key = f"inLink={packet.meta.in_link}"
        if isinstance(result, pipeline.Dropped):
            self.event(member, "Acquire", key, "NoRule", packet)
            self.finish("Dropped", member, result.marker)
            return None
        if isinstance(result, pipeline.ToForward):
            self.event(member, "Acquire", key, "Forward", packet)
            return ("forward", member, packet)
        self.event(member, "Acquire", key, "Receive", packet)
        net = self.topology.networks[member.network_id]
        session_key = net.session_key(packet.header)
        tables = self.topology.tables_for(member.network_id, member.name)
        if session_key is not None and session_key in tables.receive:
            return ("receive", member, packet)
        # no listed session: ordinary delivery to the machine's software
        self.finish("Delivered", member, packet=packet)
        return None

    def step_receive(self, member: Member, packet: Packet):
        net = self.topology.networks[member.network_id]
        session_key = net.session_key(packet.header) or "-"
        try:
            result = pipeline.fn_receive(self.topology, member, packet)
        except ValueError:
            self.event(member, "Receive", session_key, "MalformedPayload", packet)
            self.finish("Dropped", member, "malformed-strip")
            return None
        if isinstance(result, pipeline.Deliver):
            self.event(member, "Receive", session_key, "Primitive", packet)
            self.finish("Delivered", member, packet=result.packet)
            return None
        # strip the outer header and continue one layer up
        inner = result.packet
        self.event(member, "Receive", session_key, f"ExternalLink({result.network_id}, {result.link_id})", inner)
        if not self.hop():
            return None
        over = self.topology.machine_member_in(member.machine_id, result.network_id)
        if over is None:
            self.finish("Dropped", member, "no-overlay-member")
            return None
        link = self.topology.links.get((result.network_id, result.link_id))
        local = link.local_at(over.name) if link is not None else None
        if local is None:
            self.finish("Dropped", member, "no-local-link")
            return None
        risen = inner.with_meta(in_link=local)
        return ("acquire", over, risen)

    def wire_hop(self, member: Member, packet: Packet, local_id: str):
        link_id = member.local_links[local_id]
        link = self.topology.links.get((member.network_id, link_id))
        if link is None:
            self.finish("Dropped", member, "dangling-local-link")
            return None
        if not self.hop():
            return None
        far = link.far_end(member.name)
        far_member = self.topology.members.get((member.network_id, far.member))
        if far_member is None:
            self.finish("Dropped", member, "dangling-link-end")
            return None
        wire_packet = packet.bare().with_meta(in_link=far.local_id)
        self.event(member, "WireHop", local_id, f"{far.member} inLink {far.local_id}", wire_packet)
        return ("acquire", far_member, wire_packet)

    def bridge_cross(self, member: Member, packet: Packet, bridge):
        if bridge.net_a == member.network_id:
            to_net, to_port = bridge.net_b, bridge.port_b
        else:
            to_net, to_port = bridge.net_a, bridge.port_a
        if not self.hop():
            return None
        to_member = self.topology.machine_member_in(member.machine_id, to_net, bridged=False)
        if to_member is None:
            self.finish("Dropped", member, "bridge-member-missing")
            return None
        header = dict(packet.header)
        applied = []
        for field_name, frm, to in bridge.rewrites:
            if header.get(field_name) == frm:
                header[field_name] = to
                applied.append(f"{field_name}: {frm} -> {to}")
        crossed = replace(
            packet,
            network_id=to_net,
            header=header,
            meta=PacketMeta(in_link=to_port),
        )
        action = "; ".join(applied) if applied else "no-op"
        self.event(to_member, "BridgeRewrite", bridge.bridge_id, action, crossed)
        return ("acquire", to_member, crossed)
