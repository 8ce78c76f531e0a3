"""Pareto oracles checked against definition-direct recomputation."""

import pytest

from negotree import (
    CPNet,
    Frontier,
    GenConfig,
    OutcomeSpace,
    PrefRelation,
    frontier,
    is_po,
    is_wpo,
    random_nets,
)
from negotree.errors import ConfigError, ExactModeExceeded


def po_by_definition(nets):
    """o is PO iff no o' is better for someone and worse for no one."""
    space = nets[0].space
    outs = list(space.outcomes())
    po = set()
    for o in outs:
        blocked = False
        for alt in outs:
            if alt == o:
                continue
            rels = [net.compare(alt, o) for net in nets]
            if (
                any(r is PrefRelation.BETTER for r in rels)
                and not any(r is PrefRelation.WORSE for r in rels)
            ):
                blocked = True
                break
        if not blocked:
            po.add(o)
    return po


def wpo_by_definition(nets):
    """o is WPO iff no o' is strictly better for every agent."""
    space = nets[0].space
    outs = list(space.outcomes())
    wpo = set()
    for o in outs:
        if not any(
            all(net.compare(alt, o) is PrefRelation.BETTER for net in nets)
            for alt in outs
            if alt != o
        ):
            wpo.add(o)
    return wpo


def test_demo_frontier_frozen(demo_space, demo_nets):
    o = demo_space.outcome
    want = frozenset(
        {
            o({"A": "a", "B": "b", "C": "c"}),
            o({"A": "a", "B": "~b", "C": "c"}),
            o({"A": "a", "B": "~b", "C": "~c"}),
            o({"A": "~a", "B": "~b", "C": "c"}),
            o({"A": "~a", "B": "~b", "C": "~c"}),
        }
    )
    f = frontier(demo_nets)
    assert f.po == want
    assert f.wpo == want


def test_frontier_matches_definitions_on_random_pairs():
    for seed in range(8):
        cfg = GenConfig(attrs=3 + seed % 3, domain_max=2 + seed % 2, seed=seed)
        nets = random_nets(cfg, 2)
        f = frontier(nets)
        assert f.po == po_by_definition(nets)
        assert f.wpo == wpo_by_definition(nets)
        assert f.po <= f.wpo


def test_membership_helpers_agree_with_frontier(demo_space, demo_nets):
    f = frontier(demo_nets)
    for o in demo_space.outcomes():
        assert is_po(o, demo_nets) == (o in f.po)
        assert is_wpo(o, demo_nets) == (o in f.wpo)


def test_identical_nets_collapse_po_and_wpo(demo_net1):
    f = frontier((demo_net1, demo_net1))
    assert f.po == f.wpo
    # a single total... partial order: only the undominated outcomes survive
    top = demo_net1.optimal_completion(demo_net1.space.assignment({}))
    assert top in f.po
    assert all(demo_net1.strictly_better(o) == [] for o in f.po)


def test_single_net_frontier(demo_net2):
    f = frontier((demo_net2,))
    assert f.po == f.wpo
    assert f.po == {
        o for o in demo_net2.space.outcomes() if demo_net2.strictly_better(o) == []
    }


def test_fully_opposed_single_attribute():
    space = OutcomeSpace(("A",), {"A": ("x", "y")})
    n1 = CPNet(space, {}, {"A": [({}, ("x", "y"))]}).require_valid()
    n2 = CPNet(space, {}, {"A": [({}, ("y", "x"))]}).require_valid()
    f = frontier((n1, n2))
    assert f.po == f.wpo == set(space.outcomes())


def test_frontier_is_never_empty():
    # any agent's global optimum is WPO and, for two strict orders, PO
    for seed in range(6):
        nets = random_nets(GenConfig(attrs=4, seed=40 + seed), 2)
        f = frontier(nets)
        assert f.po
        tops = [net.optimal_completion(net.space.assignment({})) for net in nets]
        assert all(t in f.wpo for t in tops)


def test_rejects_empty_and_mismatched():
    with pytest.raises(ConfigError):
        frontier(())
    s1 = OutcomeSpace(("A",), {"A": ("x", "y")})
    s2 = OutcomeSpace(("B",), {"B": ("x", "y")})
    n1 = CPNet(s1, {}, {"A": [({}, ("x", "y"))]}).require_valid()
    n2 = CPNet(s2, {}, {"B": [({}, ("x", "y"))]}).require_valid()
    with pytest.raises(ConfigError):
        frontier((n1, n2))
    with pytest.raises(ConfigError):
        is_po(s1.outcome({"A": "x"}), (n1, n2))


def test_respects_bound(demo_nets, demo_space):
    with pytest.raises(ExactModeExceeded):
        frontier(demo_nets, bound=7)
    with pytest.raises(ExactModeExceeded):
        is_wpo(demo_space.outcome({"A": "a", "B": "b", "C": "c"}), demo_nets, bound=7)


def test_frontier_type(demo_nets):
    f = frontier(demo_nets)
    assert isinstance(f, Frontier)
    assert isinstance(f.po, frozenset) and isinstance(f.wpo, frozenset)
