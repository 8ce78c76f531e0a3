"""Shared fixtures: the three-attribute demo pair and an independent oracle.

The demo nets reproduce a fully hand-checkable negotiation (5 iterations,
two final agreements); every frozen constant in the protocol tests was
re-derived from them.  The flip-closure oracle builds the improving-flip
digraph straight from the CPT rows and lets networkx do the reachability,
so it shares no code path with the package's own dominance machinery.
"""

from __future__ import annotations

import networkx as nx
import pytest

from negotree import CPNet, OutcomeSpace, PrefRelation


@pytest.fixture(scope="session")
def demo_space() -> OutcomeSpace:
    return OutcomeSpace(
        ("A", "B", "C"),
        {"A": ("a", "~a"), "B": ("b", "~b"), "C": ("c", "~c")},
    )


@pytest.fixture(scope="session")
def demo_net1(demo_space) -> CPNet:
    """Agent 1: C is unconditional, A depends on C, B on both."""
    return CPNet(
        demo_space,
        parents={"A": ("C",), "B": ("A", "C")},
        cpt={
            "C": [({}, ("c", "~c"))],
            "A": [({"C": "c"}, ("a", "~a")), ({"C": "~c"}, ("~a", "a"))],
            "B": [
                ({"A": "a", "C": "c"}, ("b", "~b")),
                ({"A": "~a", "C": "c"}, ("~b", "b")),
                ({"A": "a", "C": "~c"}, ("b", "~b")),
                ({"A": "~a", "C": "~c"}, ("~b", "b")),
            ],
        },
    ).require_valid()


@pytest.fixture(scope="session")
def demo_net2(demo_space) -> CPNet:
    """Agent 2: chain B -> C -> A, mostly opposed to agent 1."""
    return CPNet(
        demo_space,
        parents={"C": ("B",), "A": ("C",)},
        cpt={
            "B": [({}, ("~b", "b"))],
            "C": [({"B": "~b"}, ("~c", "c")), ({"B": "b"}, ("c", "~c"))],
            "A": [({"C": "~c"}, ("a", "~a")), ({"C": "c"}, ("~a", "a"))],
        },
    ).require_valid()


@pytest.fixture(scope="session")
def demo_nets(demo_net1, demo_net2):
    return (demo_net1, demo_net2)


# --- independent dominance oracle ---

def flip_better_sets(net: CPNet) -> dict:
    """outcome -> set of strictly better outcomes, via networkx reachability.

    Edges are read off the raw CPT rows, not the engine's indexed tables.
    """
    space = net.space
    g = nx.DiGraph()
    outcomes = list(space.outcomes())
    g.add_nodes_from(outcomes)
    for o in outcomes:
        for attr in space.attributes:
            ctx = {p: o[p] for p in net.parents[attr]}
            order = None
            for given, row in net.cpt[attr]:
                if dict(given) == ctx:
                    order = row
                    break
            assert order is not None, f"no row for {attr} under {ctx}"
            pos = order.index(o[attr])
            for better in order[:pos]:
                vals = o.as_dict()
                vals[attr] = better
                g.add_edge(o, space.outcome(vals))
    return {o: nx.descendants(g, o) for o in outcomes}


def closure_relation(better_sets: dict, o1, o2) -> PrefRelation:
    if o1 == o2:
        return PrefRelation.SAME
    if o1 in better_sets[o2]:
        return PrefRelation.BETTER
    if o2 in better_sets[o1]:
        return PrefRelation.WORSE
    return PrefRelation.INCOMPARABLE
