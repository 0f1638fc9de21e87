"""Built-in example topologies, shipped as data files.

The files are reconstructions of small reference layouts: a plain enterprise
chain, the same chain with its first hop tunneled over public networks, a
customer overlay riding a provider session, and a record-handling variant
with a tagged dedicated link.
"""

from __future__ import annotations

from importlib import resources

from . import topofile
from .model import Topology

SCENARIOS = (
    "enterprise-basic",
    "enterprise-vpn",
    "service-customer",
    "service-hipaa",
)


class UnknownScenarioError(LookupError):
    def __init__(self, scenario_id: str):
        known = ", ".join(SCENARIOS)
        super().__init__(f"unknown scenario {scenario_id!r} (known: {known})")
        self.scenario_id = scenario_id


def scenario_text(scenario_id: str) -> str:
    """The raw topology file for a built-in scenario."""
    if scenario_id not in SCENARIOS:
        raise UnknownScenarioError(scenario_id)
    path = resources.files(__package__) / "data" / f"{scenario_id}.topo"
    return path.read_text(encoding="utf-8")


def scenario(scenario_id: str) -> Topology:
    """Parse a built-in scenario into a topology."""
    return topofile.parse(scenario_text(scenario_id))
