"""Core topology model: networks, machines, members, links, sessions, bridges.

A topology describes one or more networks that share machines.  A link of an
overlay network is either Primitive (a wire) or implemented by a uniquely
identified session of a different network (the underlay).  The link<->session
pairing is the seam between layers and must be a bijection; `validate_topology`
checks that along with every other structural rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, TYPE_CHECKING

if TYPE_CHECKING:
    from .pipeline import MemberTables

# Reserved inLink token for packets a member originates itself.
SELF = "Self"

FIELD_KINDS = ("address", "port", "protocol", "sessionId", "opaque")
ROLES = ("host", "forwarder", "middlebox")


class UnknownLinkError(LookupError):
    """Raised when a (network, link) pair names no link in the topology."""


class UnknownMachineError(LookupError):
    """Raised when a machine id names no machine in the topology."""


class SessionRef(NamedTuple):
    network_id: str
    session_id: str


@dataclass
class FieldSpec:
    """One header field: a name, a kind, and its finite symbolic domain."""

    name: str
    kind: str
    domain: tuple[str, ...]


@dataclass
class Network:
    network_id: str
    fields: tuple[FieldSpec, ...]

    def field_map(self) -> dict[str, FieldSpec]:
        return {f.name: f for f in self.fields}

    def session_key_fields(self) -> tuple[str, ...]:
        """Fields whose values identify the session a packet belongs to.

        Explicit sessionId-kind fields win; otherwise the first address and
        first port field compose the identity.
        """
        explicit = tuple(f.name for f in self.fields if f.kind == "sessionId")
        if explicit:
            return explicit
        addr = next((f.name for f in self.fields if f.kind == "address"), None)
        port = next((f.name for f in self.fields if f.kind == "port"), None)
        if addr is not None and port is not None:
            return (addr, port)
        return ()

    def session_key(self, header: dict[str, str]) -> str | None:
        parts = [header.get(name) for name in self.session_key_fields()]
        if not parts or any(p is None for p in parts):
            return None
        return ":".join(parts)  # type: ignore[arg-type]


@dataclass
class Machine:
    machine_id: str
    # network id -> member name hosted on this machine
    members: dict[str, str] = field(default_factory=dict)


@dataclass
class Member:
    name: str
    network_id: str
    machine_id: str
    role: str
    middlebox_kind: str | None = None
    # local link id -> link id, unique per member
    local_links: dict[str, str] = field(default_factory=dict)


class LinkEnd(NamedTuple):
    member: str
    local_id: str


@dataclass
class Link:
    link_id: str
    network_id: str
    end_a: LinkEnd
    end_b: LinkEnd
    # None means Primitive; otherwise the implementing underlay session
    impl: SessionRef | None = None
    tags: frozenset[str] = frozenset()

    def far_end(self, member_name: str) -> LinkEnd:
        return self.end_b if self.end_a.member == member_name else self.end_a

    def local_at(self, member_name: str) -> str | None:
        if self.end_a.member == member_name:
            return self.end_a.local_id
        if self.end_b.member == member_name:
            return self.end_b.local_id
        return None


@dataclass
class Session:
    ident: str
    network_id: str
    initiator: str
    responder: str
    attrs: frozenset[str] = frozenset()
    # (overlay network id, link id) this session carries, if any
    implements: tuple[str, str] | None = None
    header_template: dict[str, str] | None = None


@dataclass
class Bridge:
    """Two networks joined on one machine, with optional outer-header rewrite.

    A Forward action naming the crossover port moves the packet to the
    machine's member in the peer network.  Rewrite entries are one-way token
    substitutions applied on any crossing; list both directions for NAT.
    """

    bridge_id: str
    machine_id: str
    net_a: str
    port_a: str
    net_b: str
    port_b: str
    rewrites: tuple[tuple[str, str, str], ...] = ()  # (field, from, to)


@dataclass
class PropertyCheck:
    """A named property declaration carried in the topology file."""

    name: str
    kind: str
    network_id: str
    params: dict[str, object] = field(default_factory=dict)


@dataclass
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


@dataclass
class Topology:
    networks: dict[str, Network] = field(default_factory=dict)
    machines: dict[str, Machine] = field(default_factory=dict)
    members: dict[tuple[str, str], Member] = field(default_factory=dict)
    links: dict[tuple[str, str], Link] = field(default_factory=dict)
    sessions: dict[tuple[str, str], Session] = field(default_factory=dict)
    bridges: list[Bridge] = field(default_factory=list)
    tables: dict[tuple[str, str], "MemberTables"] = field(default_factory=dict)
    session_axioms: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    properties: list[PropertyCheck] = field(default_factory=list)

    # -- lookups ---------------------------------------------------------

    def member(self, network_id: str, name: str) -> Member:
        return self.members[(network_id, name)]

    def link(self, network_id: str, link_id: str) -> Link:
        try:
            return self.links[(network_id, link_id)]
        except KeyError:
            raise UnknownLinkError(f"no link {link_id!r} in network {network_id!r}") from None

    def session(self, network_id: str, ident: str) -> Session:
        return self.sessions[(network_id, ident)]

    def session_for_link(self, network_id: str, link_id: str) -> SessionRef | None:
        """The underlay session implementing a link, or None for Primitive."""
        return self.link(network_id, link_id).impl

    def link_for_session(self, network_id: str, ident: str) -> tuple[str, str] | None:
        session = self.sessions.get((network_id, ident))
        if session is None:
            return None
        return session.implements

    def network_members(self, network_id: str) -> list[Member]:
        return [m for (net, _), m in sorted(self.members.items()) if net == network_id]

    def network_links(self, network_id: str) -> list[Link]:
        return [l for (net, _), l in sorted(self.links.items()) if net == network_id]

    def tables_for(self, network_id: str, member_name: str) -> "MemberTables":
        from .pipeline import MemberTables

        return self.tables.get((network_id, member_name)) or MemberTables()

    def tables_view(self, network_id: str) -> dict[str, "MemberTables"]:
        """All tables of one network.  The verifier reads tables only here."""
        return {
            name: tables
            for (net, name), tables in sorted(self.tables.items())
            if net == network_id
        }

    # -- bridged composites ----------------------------------------------

    def bridged_with(self, network_id: str) -> set[str]:
        """Networks reachable from network_id through bridges (exclusive)."""
        seen = {network_id}
        frontier = [network_id]
        while frontier:
            net = frontier.pop()
            for b in self.bridges:
                if b.net_a == net and b.net_b not in seen:
                    seen.add(b.net_b)
                    frontier.append(b.net_b)
                if b.net_b == net and b.net_a not in seen:
                    seen.add(b.net_a)
                    frontier.append(b.net_a)
        seen.discard(network_id)
        return seen

    def machine_member_in(self, machine_id: str, network_id: str, bridged: bool = True) -> Member | None:
        """The machine's member in a network, falling back to bridged peers."""
        machine = self.machines.get(machine_id)
        if machine is None:
            return None
        name = machine.members.get(network_id)
        if name is not None:
            return self.members.get((network_id, name))
        if bridged:
            for net in sorted(self.bridged_with(network_id)):
                name = machine.members.get(net)
                if name is not None:
                    return self.members.get((net, name))
        return None

    def resolve_session_member(self, session: Session, endpoint: str) -> Member | None:
        """Resolve a session endpoint in its home network or a bridged one."""
        m = self.members.get((session.network_id, endpoint))
        if m is not None:
            return m
        for net in sorted(self.bridged_with(session.network_id)):
            m = self.members.get((net, endpoint))
            if m is not None:
                return m
        return None

    def visible_session(self, network_id: str, ident: str) -> Session | None:
        """A session usable from a network: its own or a bridged neighbour's."""
        session = self.sessions.get((network_id, ident))
        if session is not None:
            return session
        for net in sorted(self.bridged_with(network_id)):
            session = self.sessions.get((net, ident))
            if session is not None:
                return session
        return None

    def bridge_at(self, network_id: str, member: Member, port: str) -> Bridge | None:
        """The bridge whose crossover port this is, if any."""
        for b in self.bridges:
            if b.machine_id != member.machine_id:
                continue
            if b.net_a == network_id and b.port_a == port:
                return b
            if b.net_b == network_id and b.port_b == port:
                return b
        return None

    def bridge_ports(self, network_id: str, member: Member) -> set[str]:
        ports = set()
        for b in self.bridges:
            if b.machine_id != member.machine_id:
                continue
            if b.net_a == network_id:
                ports.add(b.port_a)
            if b.net_b == network_id:
                ports.add(b.port_b)
        return ports

    # -- header universe ---------------------------------------------------

    def header_universe(self, network_id: str) -> Iterator[dict[str, str]]:
        """Every concrete header over the network's declared field domains."""
        net = self.networks[network_id]
        names = [f.name for f in net.fields]
        for values in itertools.product(*(f.domain for f in net.fields)):
            yield dict(zip(names, values))


def validate_topology(topology: Topology) -> ValidationReport:
    """Check every structural rule; returns a report listing all violations."""
    from . import pipeline

    report = ValidationReport()

    def flag(code: str, subject: str, message: str) -> None:
        report.violations.append(Violation(code, subject, message))

    # networks: field hygiene and session-identity rule
    for net_id, net in sorted(topology.networks.items()):
        seen_fields: set[str] = set()
        kinds: list[str] = []
        for f in net.fields:
            if f.name in seen_fields:
                flag("schema-duplicate-field", f"network {net_id}", f"field {f.name} declared twice")
            seen_fields.add(f.name)
            if f.kind not in FIELD_KINDS:
                flag("schema-unknown-kind", f"network {net_id}", f"field {f.name} has kind {f.kind}")
            if not f.domain:
                flag("schema-empty-domain", f"network {net_id}", f"field {f.name} has no domain values")
            kinds.append(f.kind)
        carries_sessions = any(n == net_id for (n, _) in topology.sessions)
        if carries_sessions and not net.session_key_fields():
            flag(
                "schema-no-session-identity",
                f"network {net_id}",
                "carries sessions but has no sessionId field nor an address plus a port field",
            )

    # members: placement and role
    hosted: dict[tuple[str, str], list[str]] = {}
    for (net_id, name), member in sorted(topology.members.items()):
        if net_id not in topology.networks:
            flag("member-unknown-network", f"member {name}", f"network {net_id} not declared")
        if member.machine_id not in topology.machines:
            flag("member-unknown-machine", f"member {name}", f"machine {member.machine_id} not declared")
        else:
            hosted.setdefault((member.machine_id, net_id), []).append(name)
        if member.role not in ROLES:
            flag("member-role", f"member {name}", f"unknown role {member.role}")
        if member.role == "middlebox" and not member.middlebox_kind:
            flag("member-role", f"member {name}", "middlebox without a kind")
        for local_id, link_id in sorted(member.local_links.items()):
            link = topology.links.get((net_id, link_id))
            if link is None:
                flag(
                    "dangling-local-link",
                    f"member {name}",
                    f"local link {local_id} names unknown link {link_id}",
                )
            elif link.local_at(name) != local_id:
                flag(
                    "local-link-mismatch",
                    f"member {name}",
                    f"local link {local_id} -> {link_id} but the link does not end here as {local_id}",
                )
    for (machine_id, net_id), names in sorted(hosted.items()):
        if len(names) > 1:
            flag(
                "machine-member-clash",
                f"machine {machine_id}",
                f"hosts {len(names)} members of network {net_id}: {', '.join(sorted(names))}",
            )

    # links: ends, local ids, implementation
    impl_users: dict[SessionRef, list[tuple[str, str]]] = {}
    for (net_id, link_id), link in sorted(topology.links.items()):
        subject = f"link {net_id}/{link_id}"
        for end in (link.end_a, link.end_b):
            member = topology.members.get((net_id, end.member))
            if member is None:
                wrong_net = [n for (n, nm) in topology.members if nm == end.member and n != net_id]
                if wrong_net:
                    flag(
                        "link-end",
                        subject,
                        f"end {end.member} is a member of {sorted(wrong_net)[0]}, not {net_id}",
                    )
                else:
                    flag("link-end", subject, f"end {end.member} is not a member of {net_id}")
            elif member.local_links.get(end.local_id) != link_id:
                flag(
                    "link-end",
                    subject,
                    f"member {end.member} does not map local id {end.local_id} to this link",
                )
        if link.impl is not None:
            impl_users.setdefault(link.impl, []).append((net_id, link_id))
            if link.impl.network_id == net_id:
                flag("seam-self-implementation", subject, "a link cannot ride a session of its own network")
            session = topology.sessions.get(tuple(link.impl))
            if session is None:
                flag(
                    "seam-dangling-session",
                    subject,
                    f"implementing session {link.impl.network_id}/{link.impl.session_id} does not exist",
                )
            elif session.implements != (net_id, link_id):
                flag(
                    "seam-mismatch",
                    subject,
                    f"session {session.ident} implements {session.implements}, not this link",
                )
            else:
                _check_seam_endpoints(topology, link, session, flag)
    for ref, users in sorted(impl_users.items()):
        if len(users) > 1:
            flag(
                "seam-shared-session",
                f"session {ref.network_id}/{ref.session_id}",
                "implements more than one link: " + ", ".join(f"{n}/{l}" for n, l in sorted(users)),
            )

    # sessions: endpoints and reverse seam direction
    for (net_id, ident), session in sorted(topology.sessions.items()):
        subject = f"session {net_id}/{ident}"
        if net_id not in topology.networks:
            flag("session-unknown-network", subject, f"network {net_id} not declared")
        for endpoint in (session.initiator, session.responder):
            if topology.resolve_session_member(session, endpoint) is None:
                flag("session-endpoint-unknown", subject, f"endpoint {endpoint} is not a reachable member")
        if session.implements is not None:
            target = topology.links.get(session.implements)
            if target is None:
                flag("seam-dangling-link", subject, f"implements unknown link {session.implements}")
            elif target.impl != SessionRef(net_id, ident):
                flag(
                    "seam-mismatch",
                    subject,
                    f"implements {session.implements} but that link is not riding this session",
                )

    # bridges
    for bridge in topology.bridges:
        subject = f"bridge {bridge.bridge_id}"
        if bridge.machine_id not in topology.machines:
            flag("bridge-unknown-machine", subject, f"machine {bridge.machine_id} not declared")
            continue
        machine = topology.machines[bridge.machine_id]
        schemas = []
        for net_id, port in ((bridge.net_a, bridge.port_a), (bridge.net_b, bridge.port_b)):
            name = machine.members.get(net_id)
            if name is None:
                flag("bridge-member-missing", subject, f"machine hosts no member of {net_id}")
                continue
            member = topology.members[(net_id, name)]
            if port in member.local_links:
                flag("bridge-port-collision", subject, f"port {port} is already a local link of {name}")
            net = topology.networks.get(net_id)
            if net is not None:
                schemas.append((net_id, [(f.name, f.kind) for f in net.fields]))
        if len(schemas) == 2 and schemas[0][1] != schemas[1][1]:
            flag(
                "bridge-schema-mismatch",
                subject,
                f"{schemas[0][0]} and {schemas[1][0]} do not share header fields",
            )
        known_fields = {f.name for s in schemas for f in topology.networks[s[0]].fields}
        for field_name, _, _ in bridge.rewrites:
            if schemas and field_name not in known_fields:
                flag("bridge-unknown-field", subject, f"rewrite names unknown field {field_name}")

    # tables
    for (net_id, member_name), tables in sorted(topology.tables.items()):
        subject = f"tables {net_id}/{member_name}"
        member = topology.members.get((net_id, member_name))
        if member is None:
            flag("tables-unknown-member", subject, "no such member")
            continue
        ports = topology.bridge_ports(net_id, member)
        field_names = {f.name for f in topology.networks[net_id].fields} if net_id in topology.networks else set()

        for local_id, action in sorted(tables.transmit.items()):
            if local_id not in member.local_links:
                flag("transmit-unknown-link", subject, f"transmit key {local_id} is not a local link")
            if isinstance(action, pipeline.TransmitToSession):
                if (action.network_id, action.session_id) not in topology.sessions:
                    flag(
                        "transmit-unknown-session",
                        subject,
                        f"transmit {local_id} names unknown session {action.network_id}/{action.session_id}",
                    )
                elif topology.machine_member_in(member.machine_id, action.network_id) is None:
                    flag(
                        "transmit-unreachable-underlay",
                        subject,
                        f"machine {member.machine_id} has no member in or bridged to {action.network_id}",
                    )

        for ident in sorted(tables.send):
            if topology.visible_session(net_id, ident) is None:
                flag("send-unknown-session", subject, f"send key {ident} names no session here")

        for ident, action in sorted(tables.receive.items()):
            session = topology.visible_session(net_id, ident)
            if session is None:
                flag("receive-unknown-session", subject, f"receive key {ident} names no session here")
                continue
            if isinstance(action, pipeline.ReceiveToLink):
                if (action.network_id, action.link_id) not in topology.links:
                    flag(
                        "receive-unknown-link",
                        subject,
                        f"receive {ident} names unknown link {action.network_id}/{action.link_id}",
                    )
                if session.implements != (action.network_id, action.link_id):
                    flag(
                        "receive-implements-mismatch",
                        subject,
                        f"receive {ident} strips to {action.network_id}/{action.link_id} "
                        f"but the session implements {session.implements}",
                    )

        for label, rules in (("forward", tables.forward), ("acquire", tables.acquire)):
            for rule in rules:
                for field_name, _ in rule.match.fields:
                    if field_names and field_name not in field_names:
                        flag(
                            "match-unknown-field",
                            subject,
                            f"{label} rule at priority {rule.priority} matches unknown field {field_name}",
                        )
                action = rule.action
                if isinstance(action, pipeline.OutLink):
                    if action.local_id not in member.local_links and action.local_id not in ports:
                        flag(
                            "forward-unknown-outlink",
                            subject,
                            f"rule at priority {rule.priority} sends to unknown local link {action.local_id}",
                        )

    # axioms and property declarations
    for (net_id, ident) in sorted(topology.session_axioms):
        if (net_id, ident) not in topology.sessions:
            flag("axiom-unknown-session", f"axiom {net_id}/{ident}", "no such session")
    for check in topology.properties:
        if check.network_id not in topology.networks:
            flag("property-unknown-network", f"check {check.name}", f"network {check.network_id} not declared")

    return report


def _check_seam_endpoints(topology: Topology, link: Link, session: Session, flag) -> None:
    """Endpoint machines of a virtual link must host the session endpoints."""
    subject = f"link {link.network_id}/{link.link_id}"
    link_machines = set()
    for end in (link.end_a, link.end_b):
        member = topology.members.get((link.network_id, end.member))
        if member is not None:
            link_machines.add(member.machine_id)
    session_machines = set()
    for endpoint in (session.initiator, session.responder):
        member = topology.resolve_session_member(session, endpoint)
        if member is not None:
            session_machines.add(member.machine_id)
    if link_machines and session_machines and link_machines != session_machines:
        flag(
            "seam-endpoint-mismatch",
            subject,
            f"link machines {sorted(link_machines)} != session machines {sorted(session_machines)}",
        )
