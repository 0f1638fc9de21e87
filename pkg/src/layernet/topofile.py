"""Topology file format: a small sectioned text language.

Sections are keyword-led blocks (`network`, `machine`, `member`, `link`,
`session`, `bridge`, `tables`, `axioms`, `properties`); layout is free-form
and `#` starts a comment.  `parse` returns a fully cross-referenced
`model.Topology`; `serialize` emits canonical text that reparses to an equal
topology.  The grammar is written out in docs/topology-format.md.

Names used in a declaration must be defined somewhere in the document
(UnresolvedReferenceError); placement rules such as "link ends live in the
link's own network" are the business of `model.validate_topology`, which
reports them as violations rather than refusing to parse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import pipeline
from .model import (
    Bridge,
    FieldSpec,
    Link,
    LinkEnd,
    Machine,
    Member,
    Network,
    PropertyCheck,
    Session,
    SessionRef,
    Topology,
)

PROPERTY_KINDS = (
    "waypoint",
    "path-uniqueness",
    "header-immutability",
    "all-links-secure",
    "source-authenticity",
    "reachable",
)

# params a check may carry, in canonical serialization order
_LIST_PARAMS = ("dst", "kinds", "fields", "block", "via")
_NAME_PARAMS = ("from", "to")


class TopologyParseError(Exception):
    """Base for all file-format errors; carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col
        self.bare_message = message


class TopologySyntaxError(TopologyParseError):
    pass


class DuplicateNameError(TopologyParseError):
    pass


class UnresolvedReferenceError(TopologyParseError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "punct" | "arrow" | "eof"
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<nl>\n)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[{}.,:;=~*])"
    r"|(?P<name>[A-Za-z0-9_]+(?:-[A-Za-z0-9_]+)*)"
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TopologySyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            tokens.append(_Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.topology = Topology()
        # deferred cross-reference checks: (kind, name, line, col)
        self.refs: list[tuple[str, str, int, int]] = []

    # -- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        return self.peek().value == value and self.peek().kind != "eof"

    def skip(self, value: str) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    def expect(self, value: str) -> _Token:
        tok = self.next()
        if tok.value != value or tok.kind == "eof":
            raise TopologySyntaxError(f"expected {value!r}, found {tok.value!r}", tok.line, tok.col)
        return tok

    def expect_name(self, what: str = "name") -> _Token:
        tok = self.next()
        if tok.kind != "name":
            raise TopologySyntaxError(f"expected {what}, found {tok.value!r}", tok.line, tok.col)
        return tok

    def expect_int(self, what: str = "priority") -> int:
        tok = self.expect_name(what)
        try:
            return int(tok.value)
        except ValueError:
            raise TopologySyntaxError(f"expected {what} number, found {tok.value!r}", tok.line, tok.col) from None

    def name_list(self) -> list[str]:
        """`{ a b c }` with optional separators."""
        self.expect("{")
        names = []
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            names.append(self.expect_name().value)
        self.expect("}")
        return names

    def assign_block(self, what: str) -> dict[str, str]:
        """`{ field = value ; ... }`"""
        self.expect("{")
        out: dict[str, str] = {}
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            key = self.expect_name(f"{what} field")
            self.expect("=")
            value = self.expect_name(f"{what} value")
            if key.value in out:
                raise DuplicateNameError(f"{what} sets field {key.value} twice", key.line, key.col)
            out[key.value] = value.value
        self.expect("}")
        return out

    def ref(self, kind: str, tok: _Token) -> str:
        self.refs.append((kind, tok.value, tok.line, tok.col))
        return tok.value

    # -- sections ----------------------------------------------------------

    def parse(self) -> Topology:
        while self.peek().kind != "eof":
            if self.skip(";"):
                continue
            tok = self.expect_name("section keyword")
            handler = {
                "network": self.parse_network,
                "machine": self.parse_machine,
                "member": self.parse_member,
                "link": self.parse_link,
                "session": self.parse_session,
                "bridge": self.parse_bridge,
                "tables": self.parse_tables,
                "axioms": self.parse_axioms,
                "properties": self.parse_properties,
            }.get(tok.value)
            if handler is None:
                raise TopologySyntaxError(f"unknown section {tok.value!r}", tok.line, tok.col)
            handler()
        # machine membership is derived, so declaration order never matters
        for (net, name) in sorted(self.topology.members):
            member = self.topology.members[(net, name)]
            machine = self.topology.machines.get(member.machine_id)
            if machine is not None:
                machine.members.setdefault(net, name)
        self.resolve_refs()
        return self.topology

    def parse_network(self) -> None:
        name = self.expect_name("network id")
        if name.value in self.topology.networks:
            raise DuplicateNameError(f"network {name.value} declared twice", name.line, name.col)
        fields: list[FieldSpec] = []
        self.expect("{")
        while not self.at("}"):
            if self.skip(";"):
                continue
            self.expect("field")
            fname = self.expect_name("field name")
            if any(f.name == fname.value for f in fields):
                raise DuplicateNameError(f"field {fname.value} declared twice", fname.line, fname.col)
            self.expect("kind")
            kind = self.expect_name("field kind").value
            self.expect("domain")
            domain = tuple(self.name_list())
            fields.append(FieldSpec(name=fname.value, kind=kind, domain=domain))
        self.expect("}")
        self.topology.networks[name.value] = Network(network_id=name.value, fields=tuple(fields))

    def parse_machine(self) -> None:
        name = self.expect_name("machine id")
        if name.value in self.topology.machines:
            raise DuplicateNameError(f"machine {name.value} declared twice", name.line, name.col)
        self.topology.machines[name.value] = Machine(machine_id=name.value)

    def parse_member(self) -> None:
        name = self.expect_name("member name")
        self.expect("network")
        net = self.ref("network", self.expect_name("network id"))
        self.expect("machine")
        machine = self.ref("machine", self.expect_name("machine id"))
        self.expect("role")
        role = self.expect_name("role").value
        middlebox_kind = None
        if role == "middlebox":
            middlebox_kind = self.expect_name("middlebox kind").value
        local_links: dict[str, str] = {}
        if self.skip("links"):
            self.expect("{")
            while not self.at("}"):
                if self.skip(";") or self.skip(","):
                    continue
                local = self.expect_name("local link id")
                self.expect("->")
                link_id = self.ref("link", self.expect_name("link id"))
                if local.value in local_links:
                    raise DuplicateNameError(f"local link {local.value} mapped twice", local.line, local.col)
                local_links[local.value] = link_id
            self.expect("}")
        key = (net, name.value)
        if key in self.topology.members:
            raise DuplicateNameError(f"member {name.value} declared twice in {net}", name.line, name.col)
        self.topology.members[key] = Member(
            name=name.value,
            network_id=net,
            machine_id=machine,
            role=role,
            middlebox_kind=middlebox_kind,
            local_links=local_links,
        )

    def end_ref(self) -> LinkEnd:
        member = self.ref("member", self.expect_name("member name"))
        self.expect(".")
        local = self.expect_name("local link id").value
        return LinkEnd(member=member, local_id=local)

    def parse_link(self) -> None:
        name = self.expect_name("link id")
        self.expect("network")
        net = self.ref("network", self.expect_name("network id"))
        self.expect("ends")
        end_a = self.end_ref()
        end_b = self.end_ref()
        self.expect("impl")
        impl: SessionRef | None = None
        if self.skip("primitive"):
            impl = None
        else:
            self.expect("session")
            s_net = self.ref("network", self.expect_name("underlay network id"))
            s_id = self.ref("session", self.expect_name("session id"))
            impl = SessionRef(s_net, s_id)
        tags: frozenset[str] = frozenset()
        if self.skip("tags"):
            tags = frozenset(self.name_list())
        key = (net, name.value)
        if key in self.topology.links:
            raise DuplicateNameError(f"link {name.value} declared twice in {net}", name.line, name.col)
        self.topology.links[key] = Link(
            link_id=name.value, network_id=net, end_a=end_a, end_b=end_b, impl=impl, tags=tags
        )

    def parse_session(self) -> None:
        name = self.expect_name("session id")
        self.expect("network")
        net = self.ref("network", self.expect_name("network id"))
        self.expect("ends")
        initiator = self.ref("member", self.expect_name("initiator"))
        responder = self.ref("member", self.expect_name("responder"))
        attrs: frozenset[str] = frozenset()
        implements = None
        template = None
        while True:
            if self.skip("attrs"):
                attrs = frozenset(self.name_list())
            elif self.skip("implements"):
                i_net = self.ref("network", self.expect_name("overlay network id"))
                i_link = self.ref("link", self.expect_name("link id"))
                implements = (i_net, i_link)
            elif self.skip("header"):
                template = self.assign_block("header template")
            else:
                break
        key = (net, name.value)
        if key in self.topology.sessions:
            raise DuplicateNameError(f"session {name.value} declared twice in {net}", name.line, name.col)
        self.topology.sessions[key] = Session(
            ident=name.value,
            network_id=net,
            initiator=initiator,
            responder=responder,
            attrs=attrs,
            implements=implements,
            header_template=template,
        )

    def parse_bridge(self) -> None:
        name = self.expect_name("bridge id")
        self.expect("machine")
        machine = self.ref("machine", self.expect_name("machine id"))
        self.expect("between")
        net_a = self.ref("network", self.expect_name("network id"))
        port_a = self.expect_name("crossover port").value
        self.expect("and")
        net_b = self.ref("network", self.expect_name("network id"))
        port_b = self.expect_name("crossover port").value
        rewrites: list[tuple[str, str, str]] = []
        if self.skip("rewrite"):
            self.expect("{")
            while not self.at("}"):
                if self.skip(";") or self.skip(","):
                    continue
                fname = self.expect_name("field name").value
                frm = self.expect_name("from value").value
                self.expect("->")
                to = self.expect_name("to value").value
                rewrites.append((fname, frm, to))
            self.expect("}")
        if any(b.bridge_id == name.value for b in self.topology.bridges):
            raise DuplicateNameError(f"bridge {name.value} declared twice", name.line, name.col)
        self.topology.bridges.append(
            Bridge(
                bridge_id=name.value,
                machine_id=machine,
                net_a=net_a,
                port_a=port_a,
                net_b=net_b,
                port_b=port_b,
                rewrites=tuple(rewrites),
            )
        )

    # -- tables --------------------------------------------------------------

    def parse_tables(self) -> None:
        member = self.ref("member", self.expect_name("member name"))
        self.expect("network")
        net = self.ref("network", self.expect_name("network id"))
        key = (net, member)
        if key in self.topology.tables:
            raise DuplicateNameError(f"tables for {member} in {net} declared twice", self.peek().line, self.peek().col)
        tables = pipeline.MemberTables()
        self.expect("{")
        while not self.at("}"):
            if self.skip(";"):
                continue
            block = self.expect_name("table name")
            if block.value == "transmit":
                self.parse_transmit(tables)
            elif block.value == "send":
                self.parse_send(tables)
            elif block.value == "forward":
                tables.forward = self.parse_rules("forward")
            elif block.value == "acquire":
                tables.acquire = self.parse_rules("acquire")
            elif block.value == "receive":
                self.parse_receive(tables)
            else:
                raise TopologySyntaxError(f"unknown table {block.value!r}", block.line, block.col)
        self.expect("}")
        self.topology.tables[key] = tables

    def parse_transmit(self, tables: pipeline.MemberTables) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            local = self.expect_name("local link id")
            self.expect("->")
            if local.value in tables.transmit:
                raise DuplicateNameError(f"transmit entry {local.value} declared twice", local.line, local.col)
            if self.skip("primitive"):
                egress = local.value
                if self.skip("port"):
                    egress = self.expect_name("egress port").value
                tables.transmit[local.value] = pipeline.TransmitPrimitive(egress_port=egress)
            else:
                self.expect("session")
                s_net = self.ref("network", self.expect_name("underlay network id"))
                s_id = self.ref("session", self.expect_name("session id"))
                tables.transmit[local.value] = pipeline.TransmitToSession(network_id=s_net, session_id=s_id)
        self.expect("}")

    def parse_send(self, tables: pipeline.MemberTables) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            ident = self.ref("session", self.expect_name("session id"))
            tok = self.tokens[self.pos - 1]
            self.expect("->")
            if ident in tables.send:
                raise DuplicateNameError(f"send entry {ident} declared twice", tok.line, tok.col)
            tables.send[ident] = self.assign_block("send encoding")
        self.expect("}")

    def parse_receive(self, tables: pipeline.MemberTables) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            ident = self.ref("session", self.expect_name("session id"))
            tok = self.tokens[self.pos - 1]
            self.expect("->")
            if ident in tables.receive:
                raise DuplicateNameError(f"receive entry {ident} declared twice", tok.line, tok.col)
            if self.skip("primitive"):
                tables.receive[ident] = pipeline.ReceivePrimitive()
            else:
                self.expect("link")
                l_net = self.ref("network", self.expect_name("overlay network id"))
                l_id = self.ref("link", self.expect_name("link id"))
                tables.receive[ident] = pipeline.ReceiveToLink(network_id=l_net, link_id=l_id)
        self.expect("}")

    def parse_rules(self, which: str) -> list[pipeline.Rule]:
        self.expect("{")
        rules: list[pipeline.Rule] = []
        while not self.at("}"):
            if self.skip(";") or self.skip(","):
                continue
            priority = self.expect_int()
            self.expect(":")
            match = self.parse_match()
            self.expect("->")
            action = self.parse_rule_action(which)
            rules.append(pipeline.Rule(priority=priority, match=match, action=action))
        self.expect("}")
        return rules

    def parse_match(self) -> pipeline.MatchSpec:
        if self.skip("*"):
            return pipeline.MatchSpec()
        in_link: str | None = None
        fields: list[tuple[str, pipeline.FieldMatch]] = []
        while True:
            name = self.expect_name("match field")
            if name.value == "inLink":
                self.expect("=")
                in_link = self.expect_name("inLink value").value
            elif self.skip("~"):
                prefix = self.expect_name("prefix").value
                fields.append((name.value, pipeline.FieldMatch(kind="prefix", value=prefix)))
            else:
                self.expect("=")
                if self.skip("*"):
                    fields.append((name.value, pipeline.FieldMatch(kind="wildcard")))
                else:
                    value = self.expect_name("match value").value
                    fields.append((name.value, pipeline.FieldMatch(kind="exact", value=value)))
            if not self.skip(","):
                break
        return pipeline.MatchSpec(in_link=in_link, fields=tuple(fields))

    def parse_rule_action(self, which: str):
        tok = self.expect_name("action")
        if which == "forward":
            if tok.value == "drop":
                return pipeline.Drop()
            if tok.value == "out":
                return pipeline.OutLink(local_id=self.expect_name("local link id").value)
        else:
            if tok.value == "receive":
                return pipeline.AcquireReceive()
            if tok.value == "forward":
                return pipeline.AcquireForward()
        raise TopologySyntaxError(f"unknown {which} action {tok.value!r}", tok.line, tok.col)

    # -- axioms and properties ------------------------------------------------

    def parse_axioms(self) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.skip(";"):
                continue
            self.expect("session")
            net = self.ref("network", self.expect_name("network id"))
            ident = self.ref("session", self.expect_name("session id"))
            tok = self.tokens[self.pos - 1]
            self.expect("tags")
            tags = frozenset(self.name_list())
            if (net, ident) in self.topology.session_axioms:
                raise DuplicateNameError(f"axioms for session {ident} declared twice", tok.line, tok.col)
            self.topology.session_axioms[(net, ident)] = tags
        self.expect("}")

    def parse_properties(self) -> None:
        self.expect("{")
        while not self.at("}"):
            if self.skip(";"):
                continue
            self.expect("check")
            name = self.expect_name("check name")
            if any(p.name == name.value for p in self.topology.properties):
                raise DuplicateNameError(f"check {name.value} declared twice", name.line, name.col)
            kind = self.expect_name("property kind")
            if kind.value not in PROPERTY_KINDS:
                raise TopologySyntaxError(f"unknown property kind {kind.value!r}", kind.line, kind.col)
            self.expect("net")
            net = self.ref("network", self.expect_name("network id"))
            params: dict[str, object] = {}
            while True:
                tok = self.peek()
                if tok.kind == "name" and tok.value in _LIST_PARAMS:
                    self.next()
                    params[tok.value] = self.name_list()
                elif tok.kind == "name" and tok.value in _NAME_PARAMS:
                    self.next()
                    params[tok.value] = self.expect_name(f"{tok.value} member").value
                else:
                    break
            self.topology.properties.append(
                PropertyCheck(name=name.value, kind=kind.value, network_id=net, params=params)
            )
        self.expect("}")

    # -- reference resolution ---------------------------------------------------

    def resolve_refs(self) -> None:
        defined = {
            "network": set(self.topology.networks),
            "machine": set(self.topology.machines),
            "member": {name for (_, name) in self.topology.members},
            "link": {link_id for (_, link_id) in self.topology.links},
            "session": {ident for (_, ident) in self.topology.sessions},
        }
        for kind, name, line, col in self.refs:
            if name not in defined[kind]:
                raise UnresolvedReferenceError(f"undefined {kind} {name!r}", line, col)


def parse(text: str) -> Topology:
    """Parse topology text; raises TopologyParseError subclasses on bad input."""
    return _Parser(text).parse()


# -- serialization --------------------------------------------------------------


def serialize(topology: Topology) -> str:
    """Canonical text for a topology; `parse(serialize(t))` equals `t`."""
    out: list[str] = []

    for net_id in sorted(topology.networks):
        net = topology.networks[net_id]
        out.append(f"network {net_id} {{")
        for f in net.fields:
            domain = " ".join(f.domain)
            out.append(f"  field {f.name} kind {f.kind} domain {{ {domain} }} ;")
        out.append("}")
        out.append("")

    for machine_id in sorted(topology.machines):
        out.append(f"machine {machine_id}")
    if topology.machines:
        out.append("")

    for (net, name) in sorted(topology.members):
        m = topology.members[(net, name)]
        role = m.role if m.role != "middlebox" else f"middlebox {m.middlebox_kind}"
        line = f"member {name} network {net} machine {m.machine_id} role {role}"
        if m.local_links:
            entries = " ".join(f"{local} -> {link} ;" for local, link in sorted(m.local_links.items()))
            line += f" links {{ {entries} }}"
        out.append(line)
    if topology.members:
        out.append("")

    for (net, link_id) in sorted(topology.links):
        l = topology.links[(net, link_id)]
        impl = "primitive" if l.impl is None else f"session {l.impl.network_id} {l.impl.session_id}"
        line = (
            f"link {link_id} network {net} ends {l.end_a.member}.{l.end_a.local_id} "
            f"{l.end_b.member}.{l.end_b.local_id} impl {impl}"
        )
        if l.tags:
            line += f" tags {{ {' '.join(sorted(l.tags))} }}"
        out.append(line)
    if topology.links:
        out.append("")

    for (net, ident) in sorted(topology.sessions):
        s = topology.sessions[(net, ident)]
        line = f"session {ident} network {net} ends {s.initiator} {s.responder}"
        if s.attrs:
            line += f" attrs {{ {' '.join(sorted(s.attrs))} }}"
        if s.implements is not None:
            line += f" implements {s.implements[0]} {s.implements[1]}"
        if s.header_template:
            body = " ".join(f"{k} = {v} ;" for k, v in s.header_template.items())
            line += f" header {{ {body} }}"
        out.append(line)
    if topology.sessions:
        out.append("")

    for b in topology.bridges:
        line = f"bridge {b.bridge_id} machine {b.machine_id} between {b.net_a} {b.port_a} and {b.net_b} {b.port_b}"
        if b.rewrites:
            body = " ".join(f"{f} {frm} -> {to} ;" for f, frm, to in b.rewrites)
            line += f" rewrite {{ {body} }}"
        out.append(line)
    if topology.bridges:
        out.append("")

    for (net, member) in sorted(topology.tables):
        t = topology.tables[(net, member)]
        out.append(f"tables {member} network {net} {{")
        if t.transmit:
            out.append("  transmit {")
            for local in sorted(t.transmit):
                action = t.transmit[local]
                if isinstance(action, pipeline.TransmitPrimitive):
                    rhs = "primitive" if action.egress_port == local else f"primitive port {action.egress_port}"
                else:
                    rhs = f"session {action.network_id} {action.session_id}"
                out.append(f"    {local} -> {rhs} ;")
            out.append("  }")
        if t.send:
            out.append("  send {")
            for ident in sorted(t.send):
                body = " ".join(f"{k} = {v} ;" for k, v in t.send[ident].items())
                out.append(f"    {ident} -> {{ {body} }} ;")
            out.append("  }")
        for label, rules in (("forward", t.forward), ("acquire", t.acquire)):
            if rules:
                out.append(f"  {label} {{")
                for rule in rules:
                    out.append(f"    {rule.priority} : {_render_match(rule.match)} -> {_render_action(rule.action)} ;")
                out.append("  }")
        if t.receive:
            out.append("  receive {")
            for ident in sorted(t.receive):
                action = t.receive[ident]
                if isinstance(action, pipeline.ReceivePrimitive):
                    rhs = "primitive"
                else:
                    rhs = f"link {action.network_id} {action.link_id}"
                out.append(f"    {ident} -> {rhs} ;")
            out.append("  }")
        out.append("}")
        out.append("")

    if topology.session_axioms:
        out.append("axioms {")
        for (net, ident) in sorted(topology.session_axioms):
            tags = " ".join(sorted(topology.session_axioms[(net, ident)]))
            out.append(f"  session {net} {ident} tags {{ {tags} }} ;")
        out.append("}")
        out.append("")

    if topology.properties:
        out.append("properties {")
        for p in topology.properties:
            line = f"  check {p.name} {p.kind} net {p.network_id}"
            for key in _LIST_PARAMS:
                if key in p.params:
                    line += f" {key} {{ {' '.join(p.params[key])} }}"
            for key in _NAME_PARAMS:
                if key in p.params:
                    line += f" {key} {p.params[key]}"
            out.append(line + " ;")
        out.append("}")
        out.append("")

    return "\n".join(out).rstrip() + "\n"


def _render_match(match: pipeline.MatchSpec) -> str:
    parts = []
    if match.in_link is not None:
        parts.append(f"inLink = {match.in_link}")
    for name, fm in match.fields:
        if fm.kind == "wildcard":
            parts.append(f"{name} = *")
        elif fm.kind == "prefix":
            parts.append(f"{name} ~ {fm.value}")
        else:
            parts.append(f"{name} = {fm.value}")
    return " , ".join(parts) if parts else "*"


def _render_action(action) -> str:
    if isinstance(action, pipeline.Drop):
        return "drop"
    if isinstance(action, pipeline.OutLink):
        return f"out {action.local_id}"
    if isinstance(action, pipeline.AcquireReceive):
        return "receive"
    if isinstance(action, pipeline.AcquireForward):
        return "forward"
    raise ValueError(f"cannot render action {action!r}")
