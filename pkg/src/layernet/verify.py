"""Per-network property checks over match-action tables.

Every check here reasons about exactly one network: tables come from
`Topology.tables_view(network_id)` and exploration never follows a link into
another layer.  What a virtual link is implemented by is invisible at this
level; the seam map only enters through `propagate`, which copies session
axioms onto the links they implement.

Path exploration is exhaustive over the network's declared header universe,
grouped into equivalence classes: two headers that satisfy exactly the same
field predicates across all Forward/Acquire rules take identical paths, so
one representative per class is walked.  `reachability` follows the pipeline's
own first-match semantics; `path_uniqueness` instead branches over every
equal-priority match to surface routing ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import pipeline
from .model import Topology

_EMPTY_TABLES = pipeline.MemberTables()


@dataclass(frozen=True)
class Path:
    """One delivered member sequence, realizable by the stored witness header."""

    members: tuple[str, ...]
    links: tuple[str, ...]
    origin_link: str  # local link id the source transmitted on ("" if trivial)
    witness: dict[str, str]

    def render(self) -> str:
        return " -> ".join(self.members)


@dataclass
class PathSet:
    network_id: str
    src: str
    dst: str
    paths: list[Path] = field(default_factory=list)

    @property
    def reachable(self) -> bool:
        return bool(self.paths)


@dataclass
class Witness:
    """One counterexample: where, optionally with what header and path."""

    subject: str
    note: str
    header: dict[str, str] | None = None
    path: Path | None = None

    def render(self) -> str:
        parts = [f"{self.subject}: {self.note}"]
        if self.path is not None:
            parts.append(f"path {self.path.render()}")
        if self.header is not None:
            parts.append("header " + ",".join(f"{k}={v}" for k, v in self.header.items()))
        return " | ".join(parts)


@dataclass
class PropertyResult:
    name: str
    kind: str
    network_id: str
    holds: bool
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def render(self) -> str:
        head = f"{self.name} [{self.kind} @ {self.network_id}]: {self.verdict}"
        if self.holds:
            return head
        lines = [head]
        lines.extend(f"  - {w.render()}" for w in self.witnesses)
        return "\n".join(lines)


# -- header classes ------------------------------------------------------------


def _header_classes(topology: Topology, network_id: str, tables) -> list[dict[str, str]]:
    """One representative header per behavioural equivalence class.

    The signature records, for every field predicate of every Forward/Acquire
    rule in the network, whether the header satisfies it.  inLink predicates
    are path state, not header state, so they do not split classes.
    """
    predicates: list[tuple[str, pipeline.FieldMatch]] = []
    for name in sorted(tables):
        for rules in (tables[name].forward, tables[name].acquire):
            for rule in rules:
                predicates.extend(rule.match.fields)

    reps: dict[tuple[bool, ...], dict[str, str]] = {}
    for header in topology.header_universe(network_id):
        sig = tuple(fm.matches(header.get(fname)) for fname, fm in predicates)
        reps.setdefault(sig, header)
    return list(reps.values())


# -- walkers --------------------------------------------------------------------


def _origin_links(tables, src: str) -> list[str]:
    """Links a member can originate on: the keys of its Transmit table."""
    return sorted(tables.get(src, _EMPTY_TABLES).transmit)


def _walk_first(topology, network_id, tables, src_member, origin_local, header) -> Path | None:
    """Deterministic first-match walk; the path delivered somewhere, if any.

    A repeated (member, inLink) arrival state is a sure loop because the walk
    is deterministic per header, so that is the pruning rule; merely visiting
    a member twice on different links is a legitimate delivering path.
    """
    link_id = src_member.local_links.get(origin_local)
    if link_id is None:
        return None
    members = [src_member.name]
    links: list[str] = []
    seen: set[tuple[str, str]] = set()
    current = src_member
    while True:
        link = topology.links.get((network_id, link_id))
        if link is None:
            return None
        far = link.far_end(current.name)
        nxt = topology.members.get((network_id, far.member))
        if nxt is None or (far.member, far.local_id) in seen:
            return None
        seen.add((far.member, far.local_id))
        members.append(nxt.name)
        links.append(link_id)
        t = tables.get(nxt.name, _EMPTY_TABLES)
        rule = pipeline.first_match(t.acquire, far.local_id, header)
        if rule is None:
            return None
        if isinstance(rule.action, pipeline.AcquireReceive):
            return Path(tuple(members), tuple(links), origin_local, dict(header))
        frule = pipeline.first_match(t.forward, far.local_id, header)
        if frule is None or isinstance(frule.action, pipeline.Drop):
            return None
        link_id = nxt.local_links.get(frule.action.local_id)
        if link_id is None:
            # a bridge port or an unknown id: the packet leaves this network
            return None
        current = nxt


def _walk_all(topology, network_id, tables, src_member, origin_local, header) -> list[Path]:
    """Branching walk over every equal-priority match; all delivered paths."""
    link_id = src_member.local_links.get(origin_local)
    if link_id is None:
        return []
    out: list[Path] = []

    def arrive(
        current_name: str,
        link_id: str,
        members: list[str],
        links: list[str],
        seen: frozenset[tuple[str, str]],
    ) -> None:
        link = topology.links.get((network_id, link_id))
        if link is None:
            return
        far = link.far_end(current_name)
        nxt = topology.members.get((network_id, far.member))
        if nxt is None or (far.member, far.local_id) in seen:
            return
        seen = seen | {(far.member, far.local_id)}
        members = members + [nxt.name]
        links = links + [link_id]
        t = tables.get(nxt.name, _EMPTY_TABLES)
        for rule in pipeline.matching_rules(t.acquire, far.local_id, header):
            if isinstance(rule.action, pipeline.AcquireReceive):
                out.append(Path(tuple(members), tuple(links), origin_local, dict(header)))
                continue
            for frule in pipeline.matching_rules(t.forward, far.local_id, header):
                if isinstance(frule.action, pipeline.Drop):
                    continue
                next_link = nxt.local_links.get(frule.action.local_id)
                if next_link is not None:
                    arrive(nxt.name, next_link, members, links, seen)

    arrive(src_member.name, link_id, [src_member.name], [], frozenset())
    return out


# -- checks ---------------------------------------------------------------------


def reachability(topology: Topology, network_id: str, src: str, dst: str) -> PathSet:
    """All loop-free member paths src -> dst permitted for some header."""
    src_member = topology.member(network_id, src)
    if src == dst:
        return PathSet(network_id, src, dst, [Path((src,), (), "", {})])
    tables = topology.tables_view(network_id)
    found: dict[tuple, Path] = {}
    for origin_local in _origin_links(tables, src):
        for header in _header_classes(topology, network_id, tables):
            path = _walk_first(topology, network_id, tables, src_member, origin_local, header)
            if path is not None and path.members[-1] == dst:
                found.setdefault((path.members, path.links, path.origin_link), path)
    return PathSet(network_id, src, dst, [found[k] for k in sorted(found)])


def waypoint(
    topology: Topology,
    network_id: str,
    dst_members,
    middlebox_kinds,
    name: str = "waypoint",
) -> PropertyResult:
    """Every path ending at a listed destination crosses a listed middlebox."""
    kinds = set(middlebox_kinds)
    guards = {
        m.name
        for m in topology.network_members(network_id)
        if m.role == "middlebox" and m.middlebox_kind in kinds
    }
    witnesses = []
    for dst in sorted(dst_members):
        for m in topology.network_members(network_id):
            if m.name == dst:
                continue
            for path in reachability(topology, network_id, m.name, dst).paths:
                if not set(path.members) & guards:
                    witnesses.append(
                        Witness(
                            subject=f"{m.name} -> {dst}",
                            note="path crosses no " + "/".join(sorted(kinds)) + " middlebox",
                            header=path.witness,
                            path=path,
                        )
                    )
    return PropertyResult(name, "waypoint", network_id, not witnesses, witnesses)


def path_uniqueness(
    topology: Topology, network_id: str, dst_members, name: str = "path-uniqueness"
) -> PropertyResult:
    """For each (src, dst, header, origin link), at most one permitted path.

    Unlike `reachability`, this branches over every equal-priority match, so
    two rules that tie for the same packet surface as two distinct paths.
    """
    dsts = set(dst_members)
    tables = topology.tables_view(network_id)
    witnesses = []
    for m in topology.network_members(network_id):
        for origin_local in _origin_links(tables, m.name):
            for header in _header_classes(topology, network_id, tables):
                paths = _walk_all(topology, network_id, tables, m, origin_local, header)
                for dst in sorted(dsts):
                    if dst == m.name:
                        continue
                    distinct = []
                    for p in paths:
                        if p.members[-1] == dst and p not in distinct:
                            distinct.append(p)
                    if len(distinct) > 1:
                        witnesses.append(
                            Witness(
                                subject=f"{m.name} -> {dst}",
                                note=f"{len(distinct)} distinct paths for one header: "
                                + " / ".join(p.render() for p in distinct),
                                header=dict(header),
                                path=distinct[0],
                            )
                        )
    return PropertyResult(name, "path-uniqueness", network_id, not witnesses, witnesses)


def header_immutability(
    topology: Topology, network_id: str, field_names, name: str = "header-immutability"
) -> PropertyResult:
    """No forwarding action or bridge crossing rewrites a listed field.

    Table actions cannot rewrite headers by construction, so the check scans
    them defensively and otherwise looks for bridges touching this network
    whose rewrite entries name a listed field.  Rewrites of another network's
    outer headers never touch packets of this network: encapsulated headers
    ride through bridges untouched.
    """
    fields_wanted = set(field_names)
    witnesses = []
    if fields_wanted:
        for bridge in topology.bridges:
            if network_id in (bridge.net_a, bridge.net_b):
                for fname, frm, to in bridge.rewrites:
                    if fname in fields_wanted:
                        witnesses.append(
                            Witness(
                                subject=f"bridge {bridge.bridge_id}",
                                note=f"rewrites {fname}: {frm} -> {to}",
                            )
                        )
        allowed = (pipeline.Drop, pipeline.OutLink, pipeline.AcquireReceive, pipeline.AcquireForward)
        tables = topology.tables_view(network_id)
        for member_name in sorted(tables):
            for rules in (tables[member_name].forward, tables[member_name].acquire):
                for rule in rules:
                    if not isinstance(rule.action, allowed):
                        witnesses.append(
                            Witness(
                                subject=f"tables {member_name}",
                                note=f"unrecognized action {rule.action!r} at priority {rule.priority}",
                            )
                        )
    return PropertyResult(name, "header-immutability", network_id, not witnesses, witnesses)


def propagate(topology: Topology, session_axioms=None) -> dict[tuple[str, str], frozenset[str]]:
    """Tags per link: declared tags plus the implementing session's axioms.

    This is the one place layer-boundary data enters verification: a property
    known of a session holds of the link it implements.  Primitive links keep
    their declared tags only.
    """
    axioms = topology.session_axioms if session_axioms is None else session_axioms
    out: dict[tuple[str, str], frozenset[str]] = {}
    for (net, link_id), link in sorted(topology.links.items()):
        tags = set(link.tags)
        if link.impl is not None:
            tags |= set(axioms.get((link.impl.network_id, link.impl.session_id), ()))
        out[(net, link_id)] = frozenset(tags)
    return out


def all_links_secure(
    topology: Topology, network_id: str, propagated=None, name: str = "all-links-secure"
) -> PropertyResult:
    """Every link of the network carries the tag `secure` after propagation."""
    if propagated is None:
        propagated = propagate(topology)
    witnesses = [
        Witness(subject=f"link {link.link_id}", note="carries no tag secure")
        for link in topology.network_links(network_id)
        if "secure" not in propagated[(network_id, link.link_id)]
    ]
    return PropertyResult(name, "all-links-secure", network_id, not witnesses, witnesses)


def source_authenticity(
    topology: Topology,
    network_id: str,
    name_block,
    authenticator_kinds,
    name: str = "source-authenticity",
) -> PropertyResult:
    """Members joined over virtual links sit behind an authenticating middlebox.

    Wires can be secured physically, so members reached only over Primitive
    links count as interior and trusted.  A virtual link touching a member of
    the audited name block is a remote attachment: one of its two ends must be
    an authenticating middlebox, or anyone along the underlay could claim a
    blocked source name.
    """
    block = set(name_block)
    kinds = set(authenticator_kinds)
    witnesses = []
    for link in topology.network_links(network_id):
        if link.impl is None:
            continue
        ends = (link.end_a.member, link.end_b.member)
        if not block & set(ends):
            continue
        guarded = any(
            (m := topology.members.get((network_id, e))) is not None
            and m.role == "middlebox"
            and m.middlebox_kind in kinds
            for e in ends
        )
        if not guarded:
            witnesses.append(
                Witness(
                    subject=f"link {link.link_id}",
                    note=f"virtual link {ends[0]}-{ends[1]} has no "
                    + "/".join(sorted(kinds))
                    + " end",
                )
            )
    return PropertyResult(name, "source-authenticity", network_id, not witnesses, witnesses)


# -- declared checks ---------------------------------------------------------------


def run_check(topology: Topology, check) -> PropertyResult:
    """Evaluate one PropertyCheck declaration from the topology file."""
    params = check.params
    if check.kind == "reachable":
        try:
            src, dst = params["from"], params["to"]
        except KeyError:
            raise ValueError(f"check {check.name}: reachable needs `from` and `to`") from None
        pathset = reachability(topology, check.network_id, src, dst)
        witnesses = []
        if not pathset.reachable:
            witnesses.append(Witness(subject=f"{src} -> {dst}", note="no delivered path for any header"))
        return PropertyResult(check.name, check.kind, check.network_id, pathset.reachable, witnesses)
    if check.kind == "waypoint":
        return waypoint(
            topology, check.network_id, params.get("dst", []), params.get("kinds", []), name=check.name
        )
    if check.kind == "path-uniqueness":
        return path_uniqueness(topology, check.network_id, params.get("dst", []), name=check.name)
    if check.kind == "header-immutability":
        return header_immutability(topology, check.network_id, params.get("fields", []), name=check.name)
    if check.kind == "all-links-secure":
        return all_links_secure(topology, check.network_id, name=check.name)
    if check.kind == "source-authenticity":
        return source_authenticity(
            topology, check.network_id, params.get("block", []), params.get("kinds", []), name=check.name
        )
    raise ValueError(f"check {check.name}: unknown property kind {check.kind!r}")


def run_checks(topology: Topology, only: str | None = None) -> list[PropertyResult]:
    """Evaluate declared checks, optionally a single one by name."""
    checks = topology.properties
    if only is not None:
        checks = [c for c in checks if c.name == only]
        if not checks:
            known = ", ".join(c.name for c in topology.properties) or "none declared"
            raise LookupError(f"no check named {only!r} (known: {known})")
    return [run_check(topology, c) for c in checks]


# -- witness replay ------------------------------------------------------------------


def replay(topology: Topology, network_id: str, path: Path):
    """Re-inject a path's witness header through the full trace engine.

    The returned trace crosses layers and bridges for real; compare it with
    `visited_members` to confirm the path the static walk predicted.
    """
    from .pipeline import Packet
    from .trace import inject

    if len(path.members) < 2 or not path.origin_link:
        raise ValueError("a trivial path has nothing to replay")
    packet = Packet(network_id, dict(path.witness))
    return inject(topology, path.members[0], network_id, packet, path.origin_link)


def visited_members(trace, network_id: str) -> tuple[str, ...]:
    """Member sequence of one network visited by a trace (origin included)."""
    names: list[str] = []
    if trace.origin_network == network_id:
        names.append(trace.origin_member)
    for event in trace.events:
        if event.network == network_id and event.function == "Acquire":
            if not names or names[-1] != event.member:
                names.append(event.member)
    return tuple(names)
