"""End-to-end traces: the layered delivery walkthrough, opacity, loops."""

from __future__ import annotations

import pytest

from layernet import topofile
from layernet.pipeline import Packet
from layernet.trace import inject, provenance

# The canonical delivery: customer host d sends to e over the provider session.
# Frozen event skeleton (function, network, member, key, action).
WALKTHROUGH = [
    ("Transmit", "custA", "d", "4", "ExternalSession(service, PCd4e1)"),
    ("Send", "service", "p2", "PCd4e1", "Encapsulate"),
    ("Forward", "service", "p2", "dst=p4", "OutLink(5)"),
    ("Transmit", "service", "p2", "5", "Primitive(egress 5)"),
    ("WireHop", "service", "p2", "5", "p3 inLink 3"),
    ("Acquire", "service", "p3", "inLink=3", "Forward"),
    ("Forward", "service", "p3", "inLink=3, dst=p4", "OutLink(6)"),
    ("Transmit", "service", "p3", "6", "Primitive(egress 6)"),
    ("WireHop", "service", "p3", "6", "p4 inLink 7"),
    ("Acquire", "service", "p4", "inLink=7", "Receive"),
    ("Receive", "service", "p4", "PCd4e1", "ExternalLink(custA, de)"),
    ("Acquire", "custA", "e", "inLink=4", "Receive"),
]


def _deliver(topology):
    pkt = Packet("custA", {"src": "d", "dst": "e"})
    return inject(topology, "d", "custA", pkt, "4")


def test_walkthrough_event_sequence(service_customer):
    trace = _deliver(service_customer)
    got = [(e.function, e.network, e.member, e.key, e.action) for e in trace.events]
    assert got == WALKTHROUGH


def test_walkthrough_delivers_original_packet(service_customer):
    trace = _deliver(service_customer)
    assert trace.outcome.kind == "Delivered"
    assert (trace.outcome.network, trace.outcome.member) == ("custA", "e")
    assert trace.outcome.packet.header == {"src": "d", "dst": "e"}
    assert trace.outcome.packet.payload == ""


def test_walkthrough_function_steps(service_customer):
    trace = _deliver(service_customer)
    fns = [e.function for e in trace.function_events()]
    # nine data-plane steps carry the packet to the provider edge ...
    assert fns[:9] == [
        "Transmit",
        "Send",
        "Forward",
        "Transmit",
        "Acquire",
        "Forward",
        "Transmit",
        "Acquire",
        "Receive",
    ]
    # ... and the customer-side Acquire completes delivery
    assert fns[9:] == ["Acquire"]


def test_walkthrough_provenance(service_customer):
    trace = _deliver(service_customer)
    assert provenance(trace) == [("custA", "de", "PCd4e1")]


def test_walkthrough_encapsulated_headers(service_customer):
    trace = _deliver(service_customer)
    by_step = {e.step: e for e in trace.events}
    # mid-carry the provider header is outermost, customer header nested
    mid = by_step[7]
    assert mid.layers[0][0] == "service"
    assert mid.layers[0][1] == {"src": "p2", "dst": "p4", "srcPort": "PCd4e1", "dstPort": "custA"}
    assert mid.layers[1] == ("custA", {"src": "d", "dst": "e"})
    # after the strip only the customer header remains
    assert by_step[12].layers == (("custA", {"src": "d", "dst": "e"}),)


def test_provenance_requires_delivery(service_customer):
    pkt = Packet("custA", {"src": "d", "dst": "d"})
    trace = inject(service_customer, "d", "custA", pkt, "4")
    assert trace.outcome.kind == "Dropped"
    with pytest.raises(ValueError):
        provenance(trace)


def test_to_text_stable(service_customer):
    a = _deliver(service_customer).to_text()
    b = _deliver(service_customer).to_text()
    assert a == b
    assert a.splitlines()[-1] == "outcome Delivered(e)"
    assert len(a.splitlines()) == 13


TRIVIAL = """
network lan {
  field dst kind address domain { a b } ;
}
machine boxA
machine boxB
member a network lan machine boxA role host links { 1 -> ab ; }
member b network lan machine boxB role host links { 1 -> ab ; }
link ab network lan ends a.1 b.1 impl primitive
tables a network lan {
  transmit { 1 -> primitive ; }
  forward { 0 : * -> drop ; }
  acquire { 10 : dst = a -> receive ; 0 : * -> forward ; }
}
tables b network lan {
  transmit { 1 -> primitive ; }
  forward { 0 : * -> drop ; }
  acquire { 10 : dst = b -> receive ; 0 : * -> forward ; }
}
"""


def test_trivial_wire_delivery():
    topo = topofile.parse(TRIVIAL)
    trace = inject(topo, "a", "lan", Packet("lan", {"dst": "b"}), "1")
    assert [e.function for e in trace.events] == ["Transmit", "WireHop", "Acquire"]
    assert trace.outcome.kind == "Delivered" and trace.outcome.member == "b"
    # a plain wire crosses no seam
    assert provenance(trace) == []


def test_encrypted_payload_opaque_in_transit(enterprise_vpn):
    pkt = Packet("enterprise", {"src": "E", "dst": "D", "app": "web"})
    trace = inject(enterprise_vpn, "E", "enterprise", pkt, "1")
    assert trace.outcome.kind == "Delivered" and trace.outcome.member == "D"
    send = next(e for e in trace.events if e.function == "Send")
    forwardings = [e for e in trace.events if e.member == "W"]
    assert forwardings, "the firewall saw the packet"
    # the vpn endpoint composing the packet sees the inner header ...
    assert ("enterprise", {"src": "E", "dst": "D", "app": "web"}) in send.layers
    # ... an on-path forwarder sees that a payload exists but not its content
    for event in forwardings:
        assert ("enterprise", None) in event.layers


def test_nat_rewrite_recorded(enterprise_vpn):
    pkt = Packet("enterprise", {"src": "E", "dst": "D", "app": "web"})
    trace = inject(enterprise_vpn, "E", "enterprise", pkt, "1")
    rewrites = [e for e in trace.events if e.function == "BridgeRewrite"]
    assert len(rewrites) == 1
    assert rewrites[0].action == "src: X -> N"
    # and the outer header actually changed
    assert rewrites[0].layers[0][1]["src"] == "N"


def test_vpn_provenance(enterprise_vpn):
    pkt = Packet("enterprise", {"src": "E", "dst": "D", "app": "web"})
    trace = inject(enterprise_vpn, "E", "enterprise", pkt, "1")
    assert provenance(trace) == [("enterprise", "ev", "ipsecXS")]


LOOP = """
network ring {
  field dst kind address domain { a b c } ;
}
machine boxA
machine boxB
machine boxC
member a network ring machine boxA role host links { 1 -> ab ; 2 -> ca ; }
member b network ring machine boxB role host links { 1 -> ab ; 2 -> bc ; }
member c network ring machine boxC role host links { 1 -> bc ; 2 -> ca ; }
link ab network ring ends a.1 b.1 impl primitive
link bc network ring ends b.2 c.1 impl primitive
link ca network ring ends c.2 a.2 impl primitive
tables a network ring {
  transmit { 1 -> primitive ; 2 -> primitive ; }
  forward { 10 : * -> out 1 ; }
  acquire { 0 : * -> forward ; }
}
tables b network ring {
  transmit { 1 -> primitive ; 2 -> primitive ; }
  forward { 10 : * -> out 2 ; }
  acquire { 0 : * -> forward ; }
}
tables c network ring {
  transmit { 1 -> primitive ; 2 -> primitive ; }
  forward { 10 : * -> out 2 ; }
  acquire { 0 : * -> forward ; }
}
"""


def test_loop_detected_at_hop_budget():
    topo = topofile.parse(LOOP)
    trace = inject(topo, "a", "ring", Packet("ring", {"dst": "c"}), "1", max_hops=12)
    assert trace.outcome.kind == "LoopDetected"


def test_dropped_packet_reports_floor_rule(enterprise_basic):
    # R's floor rule drops traffic for unknown destinations
    pkt = Packet("enterprise", {"src": "E", "dst": "R", "app": "mail"})
    trace = inject(enterprise_basic, "E", "enterprise", pkt, "1")
    assert trace.outcome.kind == "Dropped"
    assert trace.outcome.marker == "drop"
    assert trace.outcome.member == "R"
