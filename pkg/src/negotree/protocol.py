"""Two-phase bilateral negotiation over a shared combinatorial domain.

Phase 1 grows a negotiation tree: a root, one level per attribute of a
drawn order, children labelled with domain values.  Each iteration both
agents simultaneously propose the head of their private fringe (nodes
ordered by the best possible agreement, BPA, reachable under that node).
A node proposed by both agents opens; open internal nodes are expanded,
an open full-depth node is an agreement and ends the phase.  A short
disclosure step then assembles the initial agreements I, Phase 2 lets
each agent offer fringe BPAs it considers no worse than an agreement so
the other may swap in one it does not find worse, and a closing
improvement exchange walks every candidate up to a Pareto-optimal
outcome.  The final agreement is drawn uniformly from the resulting set
F with the run's seeded RNG.

Privacy: nothing of one agent's net, fringe or BPA cache ever reaches the
other agent's decisions.  The only cross-agent flows are proposal flags on
tree nodes, the single Step-3 disclosure, the Phase-2 offer sets, and the
improvement sets of the closing exchange.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cpnet import DEFAULT_EXACT_BOUND, CPNet, DominanceCache, PrefRelation
from .domain import Outcome, OutcomeSpace, PartialAssignment
from .errors import (
    ConfigError,
    DeadlockError,
    InternalInvariantViolation,
)


@dataclass
class TreeNode:
    id: int
    depth: int
    parent: int | None
    branch_value: str | None  # value of the depth-th order attribute
    path: PartialAssignment   # bindings of the first `depth` order attributes
    proposals: set[int] = field(default_factory=set)
    children: list[int] = field(default_factory=list)
    expanded: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.expanded


class NegotiationTree:
    """Shared k-ary tree over an attribute order; one level per attribute."""

    def __init__(self, space: OutcomeSpace, order: Sequence[str]):
        if sorted(order) != sorted(space.attributes):
            raise ConfigError(
                f"order {list(order)} is not a permutation of the attributes"
            )
        self.space = space
        self.order = tuple(order)
        self.depth_max = len(self.order)
        root = TreeNode(id=0, depth=0, parent=None, branch_value=None,
                        path=PartialAssignment())
        self.nodes: list[TreeNode] = [root]
        self.expand(0)  # depth-1 children exist from the start

    def node(self, nid: int) -> TreeNode:
        return self.nodes[nid]

    def expand(self, nid: int) -> list[int]:
        """Create one child per value of the next order attribute."""
        parent = self.nodes[nid]
        if parent.expanded:
            raise InternalInvariantViolation(f"node {nid} expanded twice")
        if parent.depth >= self.depth_max:
            raise InternalInvariantViolation("full-depth nodes are never expanded")
        attr = self.order[parent.depth]
        created = []
        for value in self.space.domains[attr]:
            child = TreeNode(
                id=len(self.nodes),
                depth=parent.depth + 1,
                parent=nid,
                branch_value=value,
                path=parent.path.combine(PartialAssignment({attr: value})),
            )
            self.nodes.append(child)
            parent.children.append(child.id)
            created.append(child.id)
        parent.expanded = True
        return created

    def max_nodes(self) -> int:
        """Node count of the fully expanded tree (iteration sanity bound)."""
        total, level = 1, 1
        for attr in self.order:
            level *= len(self.space.domains[attr])
            total += level
        return total


@dataclass
class TraceEvent:
    """One protocol step; field set is fixed by the trace file format."""

    iteration: int
    agent: int | None
    event: str  # propose | pass | open | expand | reveal | include | replace | final
    node: int | None = None
    outcome: Outcome | None = None


class AgentSession:
    """One agent's private negotiation state.

    The fringe holds leaf node ids the agent has not proposed yet, kept as
    a linear extension of the BPA preference (nothing later in the list is
    strictly better than anything earlier), so the head is never dominated.
    """

    def __init__(self, agent: int, net: CPNet, cache: DominanceCache | None = None,
                 exact_bound: int = DEFAULT_EXACT_BOUND):
        self.agent = agent
        self.net = net.require_valid()
        self.cache = cache if cache is not None else DominanceCache(net, exact_bound)
        self.fringe: list[int] = []
        self.proposed: set[int] = set()
        self.bpa_seen: set[Outcome] = set()
        self._bpa: dict[int, Outcome] = {}

    def bpa(self, tree: NegotiationTree, nid: int) -> Outcome:
        """Best possible agreement under a node: the optimal completion of
        its path.  Counted once per distinct outcome in `bpa_seen`."""
        got = self._bpa.get(nid)
        if got is None:
            got = self.net.optimal_completion(tree.node(nid).path)
            self._bpa[nid] = got
        self.bpa_seen.add(got)
        return got

    def improvement_set(self, outcome: Outcome) -> list[Outcome]:
        """Everything this agent strictly prefers to `outcome`, disclosed
        in canonical order during the improvement exchange.  Enumerating
        own preferences is not a dominance query, so no count is charged."""
        return self.net.strictly_better(outcome, self.cache.exact_bound)

    def fringe_insert(self, tree: NegotiationTree, nid: int) -> None:
        """Place a new leaf directly after the last fringe member strictly
        better than it, ahead of members it is incomparable or equal to.

        A linear extension admits any position after the strictly-better
        members and before the strictly-worse ones; taking the earliest
        slot keeps a freshly created child of the active branch at the
        head, so the descent is not stalled behind stale incomparable
        leaves accumulated at earlier depths.
        """
        if nid in self.proposed or nid in self.fringe:
            raise InternalInvariantViolation(f"node {nid} inserted twice")
        if not tree.node(nid).is_leaf:
            raise InternalInvariantViolation(f"node {nid} is not a leaf")
        new_bpa = self.bpa(tree, nid)
        pos = 0
        for idx in range(len(self.fringe) - 1, -1, -1):
            member_bpa = self.bpa(tree, self.fringe[idx])
            if self.cache.compare(member_bpa, new_bpa) is PrefRelation.BETTER:
                pos = idx + 1
                break
        self.fringe.insert(pos, nid)

    def select_proposal(self, tree: NegotiationTree) -> int | None:
        """Pop and flag the fringe head; None means Pass (fringe empty)."""
        if not self.fringe:
            return None
        head = self.fringe.pop(0)
        self.proposed.add(head)
        tree.node(head).proposals.add(self.agent)
        return head

    def check_invariants(self, tree: NegotiationTree) -> None:
        """Test hook: fringe members are unique unproposed leaves and the
        head is not strictly dominated.  Uses the raw net so invariant
        checking never pollutes the query counter."""
        if len(set(self.fringe)) != len(self.fringe):
            raise InternalInvariantViolation("fringe repeats a node")
        for nid in self.fringe:
            if nid in self.proposed:
                raise InternalInvariantViolation("fringe holds a proposed node")
            if not tree.node(nid).is_leaf:
                raise InternalInvariantViolation("fringe holds a non-leaf")
        if self.fringe:
            head_bpa = self.bpa(tree, self.fringe[0])
            for nid in self.fringe[1:]:
                rel = self.net.compare(self.bpa(tree, nid), head_bpa,
                                       self.cache.exact_bound)
                if rel is PrefRelation.BETTER:
                    raise InternalInvariantViolation("fringe head is dominated")


@dataclass
class Phase1Result:
    tree: NegotiationTree
    open_ids: list[int]            # Q of the final iteration
    agreement_ids: list[int]       # A: full-depth members of Q
    iterations: int
    final_proposals: list[int | None]  # per agent, last iteration's proposal
    fringes: list[list[int]]       # per agent, residual fringe after Phase 1
    initial_agreements: list[Outcome] | None = None  # I, filled by step3


@dataclass
class RunStats:
    """Per-run metrics; the per-agent pairs are reported as averages."""

    s_attr: int
    s_os: int
    s_out: tuple[int, ...]
    s_dq: tuple[int, ...]
    s_iter: int
    s_time_sec: float

    @property
    def s_out_mean(self) -> float:
        return sum(self.s_out) / len(self.s_out)

    @property
    def s_dq_mean(self) -> float:
        return sum(self.s_dq) / len(self.s_dq)


@dataclass
class FinalResult:
    final_set: list[Outcome]   # F
    chosen: Outcome
    stats: RunStats
    trace: list[TraceEvent]
    phase1: Phase1Result


def _trace(trace: list[TraceEvent] | None, **kw) -> None:
    if trace is not None:
        trace.append(TraceEvent(**kw))


def phase1(
    tree: NegotiationTree,
    agents: Sequence[AgentSession],
    trace: list[TraceEvent] | None = None,
    observer: Callable[[int, NegotiationTree, Sequence[AgentSession]], None] | None = None,
) -> Phase1Result:
    """Run simultaneous proposal iterations until an agreement node opens.

    Proposal selection only reads the selecting agent's own fringe, so
    evaluating the two selections in agent order is indistinguishable from
    a simultaneous move against the start-of-iteration state.
    """
    iteration = 0
    hard_stop = 2 * tree.max_nodes() + 2
    while True:
        iteration += 1
        if iteration > hard_stop:
            raise InternalInvariantViolation(
                f"no agreement after {hard_stop} iterations"
            )
        proposals = []
        for agent in agents:
            nid = agent.select_proposal(tree)
            proposals.append(nid)
            if nid is None:
                _trace(trace, iteration=iteration, agent=agent.agent, event="pass")
            else:
                _trace(trace, iteration=iteration, agent=agent.agent,
                       event="propose", node=nid)

        # Q: leaves now proposed by everyone.  Earlier opens cannot linger
        # (internal ones were expanded, a full-depth one ended the phase).
        q_ids = [
            n.id for n in tree.nodes
            if n.is_leaf and len(n.proposals) == len(agents)
        ]
        if len(q_ids) > 2:
            raise InternalInvariantViolation(f"open set {q_ids} exceeds 2")
        for nid in q_ids:
            _trace(trace, iteration=iteration, agent=None, event="open", node=nid)

        agreement_ids = [
            nid for nid in q_ids if tree.node(nid).depth == tree.depth_max
        ]
        if agreement_ids:
            if observer is not None:
                observer(iteration, tree, agents)
            return Phase1Result(
                tree=tree,
                open_ids=q_ids,
                agreement_ids=agreement_ids,
                iterations=iteration,
                final_proposals=proposals,
                fringes=[list(a.fringe) for a in agents],
            )

        if q_ids:
            for nid in q_ids:
                children = tree.expand(nid)
                _trace(trace, iteration=iteration, agent=None, event="expand", node=nid)
                for agent in agents:
                    for child in children:
                        agent.fringe_insert(tree, child)
        elif all(p is None for p in proposals):
            # nothing proposable anywhere and nothing opened: cannot progress
            raise DeadlockError("all agents passed with no open node")

        if observer is not None:
            observer(iteration, tree, agents)


def step3(
    p1: Phase1Result,
    agents: Sequence[AgentSession],
    trace: list[TraceEvent] | None = None,
) -> list[Outcome]:
    """Assemble the initial agreements I from the final open set.

    When the open set held a non-full-depth node as well, its last-iteration
    proposer discloses that node's BPA and the other agent includes it
    unless the agreement is at least as good for them.
    """
    tree = p1.tree
    agreements = [tree.node(nid).path for nid in p1.agreement_ids]
    initial = [tree.space.outcome(o.as_dict()) for o in agreements]

    extra = [nid for nid in p1.open_ids if nid not in p1.agreement_ids]
    if not extra:
        return initial
    if len(extra) != 1 or len(initial) != 1:
        raise InternalInvariantViolation(
            f"unexpected final open set {p1.open_ids} / agreements {p1.agreement_ids}"
        )
    revealed_node = extra[0]
    proposers = [
        agent.agent for agent in agents
        if p1.final_proposals[agent.agent] == revealed_node
    ]
    if len(proposers) != 1:
        raise InternalInvariantViolation(
            f"node {revealed_node} lacks a unique final-iteration proposer"
        )
    j = proposers[0]
    revealed = agents[j].bpa(tree, revealed_node)
    _trace(trace, iteration=p1.iterations, agent=j, event="reveal",
           node=revealed_node, outcome=revealed)

    o_star = initial[0]
    for agent in agents:
        if agent.agent == j:
            continue
        rel = agent.cache.compare(o_star, revealed)
        if rel in (PrefRelation.WORSE, PrefRelation.INCOMPARABLE):
            initial.append(revealed)
            _trace(trace, iteration=p1.iterations, agent=agent.agent,
                   event="include", outcome=revealed)
    return initial


def phase2(
    p1: Phase1Result,
    agents: Sequence[AgentSession],
    initial: Sequence[Outcome],
    trace: list[TraceEvent] | None = None,
) -> list[Outcome]:
    """Improve each initial agreement through mutual disclosure.

    For each agreement o*, each agent offers the BPAs of residual fringe
    nodes it finds equal or incomparable to o*; the other agent takes the
    best offer among those it does not find worse than o*, ties among
    mutually incomparable offers broken by canonical outcome order.  Any
    takes replace o*, otherwise o* survives.

    This exchange alone does not reach Pareto optimality: the taker may
    accept an offer it merely finds incomparable, and the offer pool is
    capped at whatever the residual fringes happen to hold.  The
    improvement exchange that follows closes both gaps.
    """
    tree = p1.tree
    space = tree.space
    final: list[Outcome] = []
    for o_star in initial:
        replacements: list[Outcome] = []
        for giver in agents:
            offers = []
            for nid in giver.fringe:
                rel = giver.cache.compare(giver.bpa(tree, nid), o_star)
                if rel in (PrefRelation.SAME, PrefRelation.INCOMPARABLE):
                    offers.append(giver.bpa(tree, nid))
            offers = sorted(set(offers), key=space.outcome_key)
            if not offers:
                continue
            for taker in agents:
                if taker.agent == giver.agent:
                    continue
                candidates = [
                    o for o in offers
                    if taker.cache.compare(o_star, o)
                    in (PrefRelation.WORSE, PrefRelation.INCOMPARABLE)
                ]
                picked = None
                for cand in candidates:
                    dominated = any(
                        taker.cache.compare(other, cand) is PrefRelation.BETTER
                        for other in candidates
                        if other is not cand
                    )
                    if not dominated:
                        picked = cand  # first undominated in canonical order
                        break
                if picked is not None:
                    replacements.append(picked)
                    _trace(trace, iteration=p1.iterations, agent=taker.agent,
                           event="replace", outcome=picked)
        final.extend(replacements if replacements else [o_star])
    deduped: list[Outcome] = []
    for o in final:
        if o not in deduped:
            deduped.append(o)
    return deduped


def improvement_exchange(
    p1: Phase1Result,
    agents: Sequence[AgentSession],
    outcomes: Sequence[Outcome],
    trace: list[TraceEvent] | None = None,
) -> list[Outcome]:
    """Walk each candidate agreement up to a Pareto-optimal one.

    An outcome fails Pareto optimality exactly when some agent strictly
    prefers an alternative that no agent finds worse.  So for a candidate o
    each agent in turn discloses its improvement set over o, the other
    screens out what it finds worse, and o is replaced by the canonical
    smallest survivor; repeat until no survivor remains.  At that point no
    blocking alternative exists and o is Pareto-optimal by definition.

    Each step strictly improves the disclosing agent without hurting the
    other, and a visited set forbids revisits, so the walk terminates.
    Unlike the fringe-capped exchange above, disclosure here spans the full
    improvement set; that is the price of turning "we found nothing better"
    into "nothing better exists".
    """
    final: list[Outcome] = []
    for o_star in outcomes:
        current = o_star
        visited = {current}
        while True:
            survivors: list[Outcome] = []
            for giver in agents:
                offers = giver.improvement_set(current)
                for taker in agents:
                    if taker.agent == giver.agent:
                        continue
                    # offers come canonically sorted; the first one the
                    # taker does not reject is the giver's best survivor
                    for o in offers:
                        if o in visited:
                            continue
                        if taker.cache.screen(o, current) is not PrefRelation.WORSE:
                            survivors.append(o)
                            break
            if not survivors:
                break
            current = min(survivors, key=p1.tree.space.outcome_key)
            visited.add(current)
            _trace(trace, iteration=p1.iterations, agent=None,
                   event="replace", outcome=current)
        final.append(current)
    deduped: list[Outcome] = []
    for o in final:
        if o not in deduped:
            deduped.append(o)
    return deduped


def negotiate(
    nets: Sequence[CPNet],
    seed: int,
    order: Sequence[str] | None = None,
    exact_bound: int = DEFAULT_EXACT_BOUND,
    improvement_bound: int = DEFAULT_EXACT_BOUND,
    observer: Callable[[int, NegotiationTree, Sequence[AgentSession]], None] | None = None,
) -> FinalResult:
    """Full protocol run for two agents over a shared space.

    Deterministic given (nets, seed, order): the seeded RNG draws the
    attribute order (unless one is supplied) and the final pick from F.
    `s_time_sec` is the only nondeterministic field.

    The closing improvement exchange enumerates improvement sets, which
    only pays off at exact-oracle scale; spaces larger than
    `improvement_bound` skip it and return the fringe-exchange result.
    """
    if len(nets) != 2:
        raise ConfigError("the protocol is bilateral: exactly two nets")
    space = nets[0].space
    if nets[1].space != space:
        raise ConfigError("both nets must share one outcome space")
    for net in nets:
        net.require_valid()

    rng = random.Random(seed)
    drawn = tuple(rng.sample(space.attributes, len(space.attributes)))
    if order is not None:
        if sorted(order) != sorted(space.attributes):
            raise ConfigError("explicit order must permute the attributes")
        drawn = tuple(order)

    t0 = time.perf_counter()
    tree = NegotiationTree(space, drawn)
    agents = [
        AgentSession(i, net, exact_bound=exact_bound) for i, net in enumerate(nets)
    ]
    trace: list[TraceEvent] = []
    for agent in agents:
        for child in tree.node(0).children:
            agent.fringe_insert(tree, child)

    p1 = phase1(tree, agents, trace, observer)
    initial = step3(p1, agents, trace)
    p1.initial_agreements = initial
    enhanced = phase2(p1, agents, initial, trace)
    if space.size <= improvement_bound:
        final_set = improvement_exchange(p1, agents, enhanced, trace)
    else:
        final_set = enhanced
    chosen = final_set[0] if len(final_set) == 1 else rng.choice(final_set)
    elapsed = time.perf_counter() - t0

    _trace(trace, iteration=p1.iterations, agent=None, event="final", outcome=chosen)
    stats = RunStats(
        s_attr=len(space.attributes),
        s_os=space.size,
        s_out=tuple(len(a.bpa_seen) for a in agents),
        s_dq=tuple(a.cache.queries for a in agents),
        s_iter=p1.iterations,
        s_time_sec=elapsed,
    )
    return FinalResult(final_set=final_set, chosen=chosen, stats=stats,
                       trace=trace, phase1=p1)
