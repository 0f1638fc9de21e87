"""Bundled scenarios: inventory, validity, declared checks."""

from __future__ import annotations

import pytest

from layernet import scenarios
from layernet.model import validate_topology
from layernet.scenarios import UnknownScenarioError

EXPECTED = (
    "enterprise-basic",
    "enterprise-vpn",
    "service-customer",
    "service-hipaa",
)


def test_scenario_inventory():
    assert tuple(scenarios.SCENARIOS) == EXPECTED


@pytest.mark.parametrize("scenario_id", EXPECTED)
def test_every_scenario_validates(scenario_id):
    report = validate_topology(scenarios.scenario(scenario_id))
    assert report.ok, [f"{v.code} {v.subject}: {v.message}" for v in report.violations]


def test_unknown_scenario_raises():
    with pytest.raises(UnknownScenarioError):
        scenarios.scenario("no-such-thing")
    with pytest.raises(UnknownScenarioError):
        scenarios.scenario_text("no-such-thing")


def test_scenario_text_is_source(service_customer):
    text = scenarios.scenario_text("service-customer")
    from layernet import topofile

    assert topofile.parse(text) == service_customer


def test_service_customer_contents(service_customer):
    assert set(service_customer.networks) == {"custA", "service"}
    assert {n for (_, n) in service_customer.members} == {"d", "e", "p2", "p3", "p4"}
    link = service_customer.link("custA", "de")
    assert link.impl is not None and link.impl.session_id == "PCd4e1"
    session = service_customer.session("service", "PCd4e1")
    assert session.implements == ("custA", "de")
    assert {s for (_, s) in service_customer.sessions} == {"PCd4e1", "PSops"}


def test_enterprise_basic_contents(enterprise_basic):
    assert set(enterprise_basic.networks) == {"enterprise"}
    f = enterprise_basic.member("enterprise", "F")
    assert f.role == "middlebox" and f.middlebox_kind == "filter"
    assert all(l.impl is None for l in enterprise_basic.network_links("enterprise"))
    names = [c.name for c in enterprise_basic.properties]
    assert "filter-waypoint" in names and "path-determinism" in names


def test_enterprise_vpn_contents(enterprise_vpn):
    assert set(enterprise_vpn.networks) == {"enterprise", "coffeeIP", "publicIP"}
    session = enterprise_vpn.session("publicIP", "ipsecXS")
    assert "encrypting" in session.attrs
    assert session.implements == ("enterprise", "ev")
    assert enterprise_vpn.session_axioms[("publicIP", "ipsecXS")] == frozenset({"secure"})
    assert len(enterprise_vpn.bridges) == 1
    nat = enterprise_vpn.bridges[0]
    assert ("src", "X", "N") in nat.rewrites and ("dst", "N", "X") in nat.rewrites
    v = enterprise_vpn.member("enterprise", "V")
    assert v.middlebox_kind == "vpn-authenticator"


def test_service_hipaa_contents(service_hipaa):
    tagged = service_hipaa.link("custH", "dp")
    plain = service_hipaa.link("custH", "dn")
    assert "patient-record" in tagged.tags
    assert "patient-record" not in plain.tags
    assert service_hipaa.session("service", "PH1").implements == ("custH", "dn")
    assert service_hipaa.session("service", "PH2").implements == ("custH", "dp")


def test_scenarios_declare_runnable_checks():
    total = 0
    from layernet import verify

    for scenario_id in EXPECTED:
        topo = scenarios.scenario(scenario_id)
        results = verify.run_checks(topo)
        assert len(results) == len(topo.properties)
        assert all(r.holds for r in results), [r.render() for r in results if not r.holds]
        total += len(results)
    assert total == 18
