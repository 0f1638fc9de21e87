"""Command-line front end.

Topology arguments accept a file path or ``scenario:<id>`` for a built-in.
Exit codes: 0 when the command succeeds and every checked property holds,
1 when a check fails or the topology is invalid (details on stdout),
2 on usage errors, unparseable input, or unknown names (details on stderr).
Output contains no timestamps; a rerun with the same input is byte-identical.
"""

from __future__ import annotations

import argparse
import sys

from . import fusion, model, report, scenarios, topofile, trace, verify
from .model import Topology, UnknownMachineError
from .pipeline import Packet

SCENARIO_PREFIX = "scenario:"


class UsageError(Exception):
    pass


def load_topology(source: str) -> Topology:
    """Path or scenario:<id>; raises UsageError with a diagnostic."""
    if source.startswith(SCENARIO_PREFIX):
        scenario_id = source[len(SCENARIO_PREFIX) :]
        try:
            return scenarios.scenario(scenario_id)
        except scenarios.UnknownScenarioError:
            known = ", ".join(scenarios.SCENARIOS)
            raise UsageError(f"unknown scenario {scenario_id!r}; known: {known}")
    try:
        with open(source) as handle:
            text = handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc}")
    try:
        return topofile.parse(text)
    except topofile.TopologyParseError as exc:
        raise UsageError(f"{source}: {exc}")


def parse_header_overrides(text: str) -> dict[str, str]:
    header = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise UsageError(f"bad --header entry {item!r}; expected field=value")
        header[name.strip()] = value.strip()
    return header


def default_header(topology: Topology, network_id: str, origin: str, local_link: str) -> dict[str, str]:
    """Walkthrough convention: source <- origin, dest <- link far end.

    The first address field names the origin member, the second the member at
    the far end of the injection link; every other field takes the first
    value of its domain.
    """
    net = topology.networks[network_id]
    member = topology.members[(network_id, origin)]
    link = topology.links[(network_id, member.local_links[local_link])]
    far = link.far_end(origin).member
    header: dict[str, str] = {}
    addresses = 0
    for spec in net.fields:
        if spec.kind == "address" and addresses == 0:
            header[spec.name] = origin
            addresses = 1
        elif spec.kind == "address" and addresses == 1:
            header[spec.name] = far
            addresses = 2
        else:
            header[spec.name] = spec.domain[0]
    return header


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    topology = load_topology(args.topology)
    result = model.validate_topology(topology)
    if result.ok:
        print(
            f"ok: {len(topology.networks)} network(s), {len(topology.members)} member(s), "
            f"{len(topology.links)} link(s), {len(topology.sessions)} session(s)"
        )
        return 0
    for violation in result.violations:
        print(f"{violation.code} {violation.subject}: {violation.message}")
    return 1


def cmd_trace(args) -> int:
    topology = load_topology(args.topology)
    network_id, origin, local_link = args.net, getattr(args, "from"), args.link
    if (network_id, origin) not in topology.members:
        raise UsageError(f"no member {origin!r} in network {network_id!r}")
    member = topology.members[(network_id, origin)]
    if local_link not in member.local_links:
        raise UsageError(f"member {origin!r} has no local link {local_link!r}")
    header = default_header(topology, network_id, origin, local_link)
    if args.header:
        overrides = parse_header_overrides(args.header)
        known = {spec.name for spec in topology.networks[network_id].fields}
        for name in overrides:
            if name not in known:
                raise UsageError(f"network {network_id!r} has no field {name!r}")
        header.update(overrides)
    packet = Packet(network_id=network_id, header=header)
    result = trace.inject(topology, origin, network_id, packet, local_link, max_hops=args.max_hops)
    print(result.to_text())
    if result.outcome is not None and result.outcome.kind == "Delivered":
        chain = trace.provenance(result)
        if chain:
            rendered = "; ".join(f"{c.network_id}/{c.link_id} via {c.session_id}" for c in chain)
            print(f"provenance {rendered}")
        return 0
    return 1


def cmd_verify(args) -> int:
    topology = load_topology(args.topology)
    try:
        results = verify.run_checks(topology, only=args.property)
    except LookupError as exc:
        raise UsageError(str(exc))
    for result in results:
        print(result.render())
    return 0 if all(r.holds for r in results) else 1


def cmd_fuse(args) -> int:
    topology = load_topology(args.topology)
    try:
        assumptions = tuple(args.assume or ())
        for text in assumptions:
            fusion.parse_assumption(text)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        plan = fusion.fuse(topology, args.machine, assumptions)
    except UnknownMachineError as exc:
        raise UsageError(f"unknown machine {exc}")
    except fusion.InvalidAssumptionError as exc:
        print(f"invalid assumption: {exc}")
        return 1
    unfused = fusion.fuse(topology, args.machine).stage_count
    print(plan.render())
    print(f"unfused stages: {unfused}")
    if args.no_check:
        return 0
    result = fusion.check_equivalence(topology, args.machine, plan)
    print(result.render())
    return 0 if result.holds else 1


def cmd_export(args) -> int:
    topology = load_topology(args.topology)
    try:
        sys.stdout.write(fusion.export_tables(topology, args.machine))
    except UnknownMachineError as exc:
        raise UsageError(f"unknown machine {exc}")
    return 0


def cmd_scenario(args) -> int:
    try:
        topology = scenarios.scenario(args.id)
    except scenarios.UnknownScenarioError:
        known = ", ".join(scenarios.SCENARIOS)
        raise UsageError(f"unknown scenario {args.id!r}; known: {known}")
    if args.emit:
        sys.stdout.write(topofile.serialize(topology))
        return 0
    result = model.validate_topology(topology)
    print(
        f"{args.id}: {len(topology.networks)} network(s), {len(topology.members)} member(s), "
        f"{len(topology.links)} link(s), {len(topology.sessions)} session(s), "
        f"{len(topology.properties)} check(s); {'valid' if result.ok else 'INVALID'}"
    )
    return 0 if result.ok else 1


def cmd_report(args) -> int:
    topology = load_topology(args.topology)
    for name in report.write_report(topology, args.out):
        print(f"{args.out}/{name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layernet",
        description="Simulate and verify layered network topologies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural checks on a topology")
    p.add_argument("topology")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("trace", help="follow one packet through the data plane")
    p.add_argument("topology")
    p.add_argument("--from", required=True, help="origin member name")
    p.add_argument("--net", required=True, help="network of the origin member")
    p.add_argument("--link", required=True, help="origin's local link id")
    p.add_argument("--header", help="comma-separated field=value overrides")
    p.add_argument("--max-hops", type=int, default=32)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="run declared property checks")
    p.add_argument("topology")
    p.add_argument("--property", help="run only the named check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuse", help="plan pipeline stages for one machine")
    p.add_argument("topology")
    p.add_argument("--machine", required=True)
    p.add_argument("--assume", action="append", metavar="FACT", help="e.g. all-links-primitive:service")
    p.add_argument("--no-check", action="store_true", help="skip the equivalence replay")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("export", help="dump match-action tables for one machine")
    p.add_argument("topology")
    p.add_argument("--machine", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("scenario", help="inspect a built-in scenario")
    p.add_argument("id")
    p.add_argument("--emit", action="store_true", help="print the scenario file")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("report", help="write csv tables and charts to a directory")
    p.add_argument("topology")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
