"""Simulator and verifier for layered (composed) network architectures.

Networks are namespaces of members joined by links; a virtual link rides a
uniquely identified session of an underlay network, and every machine runs
the same five-function match-action pipeline (Transmit, Send, Forward,
Acquire, Receive).  The package parses a topology description, traces
packets across layers, checks per-network properties with replayable
counterexamples, and plans/validates pipeline stage fusion per machine.
"""

from .fusion import (
    Assumption,
    InvalidAssumptionError,
    RuleStats,
    StagePlan,
    check_equivalence,
    derive_assumptions,
    export_tables,
    fuse,
    machine_entries,
    machine_run,
    parse_assumption,
    rule_stats,
    run_plan,
)
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
    UnknownLinkError,
    UnknownMachineError,
    ValidationReport,
    Violation,
    validate_topology,
)
from .pipeline import (
    FieldMatch,
    MatchSpec,
    MemberTables,
    NoRuleError,
    Packet,
    PacketMeta,
    Rule,
)
from .scenarios import SCENARIOS, UnknownScenarioError, scenario, scenario_text
from .topofile import (
    DuplicateNameError,
    TopologyParseError,
    TopologySyntaxError,
    UnresolvedReferenceError,
    parse,
    serialize,
)
from .trace import Outcome, Trace, TraceEvent, inject, provenance, snapshot_layers
from .verify import (
    Path,
    PathSet,
    PropertyResult,
    Witness,
    all_links_secure,
    header_immutability,
    path_uniqueness,
    propagate,
    reachability,
    replay,
    run_check,
    run_checks,
    source_authenticity,
    waypoint,
)

__all__ = [
    "Assumption",
    "Bridge",
    "DuplicateNameError",
    "FieldMatch",
    "FieldSpec",
    "InvalidAssumptionError",
    "Link",
    "LinkEnd",
    "Machine",
    "MatchSpec",
    "Member",
    "MemberTables",
    "Network",
    "NoRuleError",
    "Outcome",
    "Packet",
    "PacketMeta",
    "Path",
    "PathSet",
    "PropertyCheck",
    "PropertyResult",
    "Rule",
    "RuleStats",
    "SCENARIOS",
    "Session",
    "SessionRef",
    "StagePlan",
    "Topology",
    "TopologyParseError",
    "TopologySyntaxError",
    "Trace",
    "TraceEvent",
    "UnknownLinkError",
    "UnknownMachineError",
    "UnknownScenarioError",
    "UnresolvedReferenceError",
    "ValidationReport",
    "Violation",
    "Witness",
    "all_links_secure",
    "check_equivalence",
    "derive_assumptions",
    "export_tables",
    "fuse",
    "header_immutability",
    "inject",
    "machine_entries",
    "machine_run",
    "parse",
    "parse_assumption",
    "path_uniqueness",
    "propagate",
    "provenance",
    "reachability",
    "replay",
    "rule_stats",
    "run_check",
    "run_checks",
    "run_plan",
    "scenario",
    "scenario_text",
    "serialize",
    "snapshot_layers",
    "source_authenticity",
    "validate_topology",
    "waypoint",
]

__version__ = "0.1.0"
