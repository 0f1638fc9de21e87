"""Match semantics and the five data-plane functions."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from layernet.model import SELF
from layernet.pipeline import (
    Deliver,
    Descend,
    Drop,
    Dropped,
    Emit,
    FieldMatch,
    MatchSpec,
    NoRuleError,
    OutLink,
    Packet,
    PacketMeta,
    Rule,
    StripToLink,
    ToForward,
    ToReceive,
    ToTransmit,
    first_match,
    fn_acquire,
    fn_forward,
    fn_receive,
    fn_send,
    fn_transmit,
    matching_rules,
)


def test_field_match_kinds():
    assert FieldMatch("wildcard").matches("x")
    assert FieldMatch("wildcard").matches(None)
    assert FieldMatch("exact", "ab").matches("ab")
    assert not FieldMatch("exact", "ab").matches("abc")
    assert not FieldMatch("exact", "ab").matches(None)
    assert FieldMatch("prefix", "ab").matches("abc")
    assert not FieldMatch("prefix", "ab").matches("a")
    assert not FieldMatch("prefix", "ab").matches(None)


def test_match_spec_conjunction():
    spec = MatchSpec(in_link="3", fields=(("dst", FieldMatch("exact", "p4")),))
    assert spec.matches("3", {"dst": "p4"})
    assert not spec.matches("5", {"dst": "p4"})
    assert not spec.matches("3", {"dst": "p2"})
    # None inLink constraint matches any inLink, including Self
    free = MatchSpec(fields=(("dst", FieldMatch("exact", "p4")),))
    assert free.matches(SELF, {"dst": "p4"})


@given(st.text(min_size=1, max_size=6), st.integers(min_value=0, max_value=5))
def test_prefix_match_agrees_with_startswith(value, cut):
    prefix = value[:cut] or value[0]
    assert FieldMatch("prefix", prefix).matches(value) == value.startswith(prefix)


RULES = [
    Rule(30, MatchSpec(fields=(("dst", FieldMatch("exact", "a")),)), OutLink("1")),
    Rule(30, MatchSpec(fields=(("dst", FieldMatch("exact", "a")),)), OutLink("2")),
    Rule(10, MatchSpec(), Drop()),
]


def test_matching_rules_returns_top_priority_ties_in_authored_order():
    hits = matching_rules(RULES, None, {"dst": "a"})
    assert [(r.priority, r.action) for r in hits] == [
        (30, OutLink("1")),
        (30, OutLink("2")),
    ]
    # lower-priority matches surface only once nothing above them matches
    assert [r.action for r in matching_rules(RULES, None, {"dst": "b"})] == [Drop()]


def test_first_match_takes_highest_priority_earliest_authored():
    assert first_match(RULES, None, {"dst": "a"}).action == OutLink("1")
    assert first_match(RULES, None, {"dst": "b"}).action == Drop()
    assert first_match([], None, {}) is None


@given(
    st.lists(
        st.tuples(st.sampled_from([0, 10, 20, 30]), st.sampled_from(["a", "b", None])),
        max_size=6,
    ),
    st.sampled_from(["a", "b"]),
)
def test_first_match_is_head_of_matching_rules(spec, dst):
    rules = [
        Rule(p, MatchSpec() if v is None else MatchSpec(fields=(("dst", FieldMatch("exact", v)),)), Drop())
        for p, v in spec
    ]
    hits = matching_rules(rules, None, {"dst": dst})
    head = first_match(rules, None, {"dst": dst})
    assert head == (hits[0] if hits else None)


# -- the five functions, on the delivery scenario -------------------------------


def test_transmit_descends_into_session(service_customer):
    d = service_customer.member("custA", "d")
    pkt = Packet("custA", {"src": "d", "dst": "e"})
    step = fn_transmit(service_customer, d, pkt, "4")
    assert isinstance(step, Descend)
    assert (step.network_id, step.session_id) == ("service", "PCd4e1")
    assert step.packet.meta.sess_ident == "PCd4e1"


def test_transmit_emits_on_wire(service_customer):
    p2 = service_customer.member("service", "p2")
    pkt = Packet("service", {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"})
    step = fn_transmit(service_customer, p2, pkt, "5")
    assert isinstance(step, Emit)
    assert step.egress_port == "5"


def test_transmit_without_rule_raises(service_customer):
    d = service_customer.member("custA", "d")
    with pytest.raises(NoRuleError) as exc:
        fn_transmit(service_customer, d, Packet("custA", {}), "9")
    assert "Transmit" in str(exc.value)


def test_transmit_rejects_foreign_packet(service_customer):
    d = service_customer.member("custA", "d")
    with pytest.raises(ValueError):
        fn_transmit(service_customer, d, Packet("service", {}), "4")


def test_send_encapsulates(service_customer):
    p2 = service_customer.member("service", "p2")
    inner = Packet(
        "custA",
        {"src": "d", "dst": "e"},
        meta=PacketMeta(in_link="4", sess_ident="PCd4e1"),
    )
    step = fn_send(service_customer, p2, inner)
    assert isinstance(step, ToForward)
    outer = step.packet
    assert outer.network_id == "service"
    assert outer.header == {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"}
    assert outer.meta.in_link == SELF
    # encapsulated payload is the bare overlay packet, metadata stripped
    assert outer.payload == Packet("custA", {"src": "d", "dst": "e"})
    assert outer.payload.meta.in_link is None


def test_send_without_ident_raises(service_customer):
    p2 = service_customer.member("service", "p2")
    with pytest.raises(ValueError):
        fn_send(service_customer, p2, Packet("custA", {"src": "d", "dst": "e"}))


def test_send_unknown_session_raises(service_customer):
    p2 = service_customer.member("service", "p2")
    bad = Packet("custA", {}, meta=PacketMeta(sess_ident="ghost"))
    with pytest.raises(NoRuleError):
        fn_send(service_customer, p2, bad)


def test_send_marks_encryption(enterprise_vpn):
    x = enterprise_vpn.member("coffeeIP", "X")
    inner = Packet("enterprise", {"src": "E", "dst": "D"}, meta=PacketMeta(sess_ident="ipsecXS"))
    outer = fn_send(enterprise_vpn, x, inner).packet
    assert outer.payload_encrypted


def test_forward_first_match(service_customer):
    p3 = service_customer.member("service", "p3")
    pkt = Packet(
        "service",
        {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"},
        meta=PacketMeta(in_link="3"),
    )
    step = fn_forward(service_customer, p3, pkt)
    assert isinstance(step, ToTransmit)
    assert step.local_id == "6"


def test_forward_degrades_to_drop_without_rule(enterprise_basic):
    e = enterprise_basic.member("enterprise", "E")
    # E's only forward rule is the floor drop
    step = fn_forward(enterprise_basic, e, Packet("enterprise", {"src": "E", "dst": "E", "app": "web"}))
    assert isinstance(step, Dropped)
    assert step.marker == "drop"


def test_forward_no_rule_marker():
    from layernet.model import FieldSpec, Machine, Member, Network, Topology
    from layernet.pipeline import MemberTables

    topo = Topology()
    topo.networks["n"] = Network("n", (FieldSpec("dst", "opaque", ("a",)),))
    topo.machines["m"] = Machine("m", {"n": "a"})
    topo.members[("n", "a")] = Member("a", "n", "m", "host")
    topo.tables[("n", "a")] = MemberTables()
    step = fn_forward(topo, topo.member("n", "a"), Packet("n", {"dst": "a"}))
    assert isinstance(step, Dropped) and step.marker == "no-rule:Forward"
    step = fn_acquire(topo, topo.member("n", "a"), Packet("n", {"dst": "a"}))
    assert isinstance(step, Dropped) and step.marker == "no-rule:Acquire"


def test_acquire_receive_versus_forward(service_customer):
    p4 = service_customer.member("service", "p4")
    pkt = Packet(
        "service",
        {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"},
        meta=PacketMeta(in_link="7"),
    )
    assert isinstance(fn_acquire(service_customer, p4, pkt), ToReceive)
    p3 = service_customer.member("service", "p3")
    pkt3 = Packet("service", dict(pkt.header), meta=PacketMeta(in_link="3"))
    assert isinstance(fn_acquire(service_customer, p3, pkt3), ToForward)


def test_receive_strips_to_link(service_customer):
    p4 = service_customer.member("service", "p4")
    inner = Packet("custA", {"src": "d", "dst": "e"})
    outer = Packet(
        "service",
        {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"},
        payload=inner,
        meta=PacketMeta(in_link="7"),
    )
    step = fn_receive(service_customer, p4, outer)
    assert isinstance(step, StripToLink)
    assert (step.network_id, step.link_id) == ("custA", "de")
    assert step.packet == inner


def test_receive_plain_session_delivers(service_customer):
    # the provider's own ops session terminates here instead of stripping
    p4 = service_customer.member("service", "p4")
    pkt = Packet("service", {"src": "p2", "dst": "p4", "srcPort": "PSops", "dstPort": "ops"})
    step = fn_receive(service_customer, p4, pkt)
    assert isinstance(step, Deliver)
    assert step.packet is pkt


def test_receive_unlisted_key_raises(service_customer):
    p4 = service_customer.member("service", "p4")
    outer = Packet(
        "service",
        {"src": "p2", "dst": "p4", "srcPort": "zzz", "dstPort": "custA"},
        payload=Packet("custA", {}),
    )
    with pytest.raises(NoRuleError) as exc:
        fn_receive(service_customer, p4, outer)
    assert "Receive" in str(exc.value)


def test_receive_strip_without_payload_raises(service_customer):
    p4 = service_customer.member("service", "p4")
    outer = Packet(
        "service",
        {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"},
    )
    with pytest.raises(ValueError):
        fn_receive(service_customer, p4, outer)


def test_packet_bare_drops_meta_keeps_payload():
    inner = Packet("n", {"a": "1"})
    outer = Packet("m", {"b": "2"}, payload=inner, meta=PacketMeta(in_link="1", sess_ident="s"))
    bare = outer.bare()
    assert bare.meta == PacketMeta()
    assert bare.payload == inner
    assert bare.header == {"b": "2"}
