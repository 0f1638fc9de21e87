"""Seeded random single-network topologies for oracle comparison.

Kept within bounds where brute force is cheap: at most 5 members, at most 3
fields with domains of at most 4 values.  Links are all wires, every local
link can transmit, forward targets are always real locals, so the generated
topologies validate cleanly and the static walkers cover exactly the same
behaviour the engine would execute.
"""

from __future__ import annotations

import random

from layernet.model import FieldSpec, Link, LinkEnd, Machine, Member, Network, Topology
from layernet.pipeline import (
    AcquireForward,
    AcquireReceive,
    Drop,
    FieldMatch,
    MatchSpec,
    MemberTables,
    OutLink,
    Rule,
    TransmitPrimitive,
)

NET = "net"
PRIORITIES = (0, 10, 20, 30)


def _random_match(rng: random.Random, fields, locals_) -> MatchSpec:
    in_link = rng.choice(sorted(locals_)) if locals_ and rng.random() < 0.25 else None
    atoms = []
    for spec in fields:
        roll = rng.random()
        if roll < 0.45:
            continue  # field left unconstrained
        value = rng.choice(spec.domain)
        if roll < 0.75:
            atoms.append((spec.name, FieldMatch("exact", value)))
        elif roll < 0.9:
            atoms.append((spec.name, FieldMatch("prefix", value[: rng.randint(1, len(value))])))
        else:
            atoms.append((spec.name, FieldMatch("wildcard")))
    return MatchSpec(in_link=in_link, fields=tuple(atoms))


def random_topology(seed: int) -> Topology:
    rng = random.Random(seed)
    topo = Topology()

    n_members = rng.randint(2, 5)
    names = [f"m{i}" for i in range(n_members)]
    n_fields = rng.randint(1, 3)
    fields = tuple(
        FieldSpec(f"f{i}", "opaque", tuple(f"v{j}" for j in range(rng.randint(2, 4))))
        for i in range(n_fields)
    )
    topo.networks[NET] = Network(NET, fields)
    for i, name in enumerate(names):
        machine_id = f"box{i}"
        topo.machines[machine_id] = Machine(machine_id, {NET: name})
        topo.members[(NET, name)] = Member(name, NET, machine_id, "host")

    # spanning tree first so every member is attached, then a few extras
    edges = [(names[i], names[rng.randrange(i)]) for i in range(1, n_members)]
    for _ in range(rng.randint(0, 3)):
        edges.append(tuple(rng.sample(names, 2)))
    counters = dict.fromkeys(names, 0)
    for idx, (a, b) in enumerate(edges):
        counters[a] += 1
        counters[b] += 1
        la, lb = str(counters[a]), str(counters[b])
        link_id = f"l{idx}"
        topo.links[(NET, link_id)] = Link(link_id, NET, LinkEnd(a, la), LinkEnd(b, lb))
        topo.members[(NET, a)].local_links[la] = link_id
        topo.members[(NET, b)].local_links[lb] = link_id

    for name in names:
        locals_ = topo.members[(NET, name)].local_links
        tables = MemberTables()
        for local_id in locals_:
            tables.transmit[local_id] = TransmitPrimitive(egress_port=local_id)
        for _ in range(rng.randint(1, 4)):
            action = AcquireReceive() if rng.random() < 0.45 else AcquireForward()
            tables.acquire.append(
                Rule(rng.choice(PRIORITIES), _random_match(rng, fields, locals_), action)
            )
        for _ in range(rng.randint(1, 4)):
            if locals_ and rng.random() < 0.7:
                action = OutLink(rng.choice(sorted(locals_)))
            else:
                action = Drop()
            tables.forward.append(
                Rule(rng.choice(PRIORITIES), _random_match(rng, fields, locals_), action)
            )
        topo.tables[(NET, name)] = tables

    return topo
