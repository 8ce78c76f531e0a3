"""Seeded random CP-net instances for experiments.

The structural rule matches the evaluation setup: a random topological
order, candidate edges proposed with a fixed probability in a random scan
order, accepted only while the in-degree cap holds and the DAG stays
directed-path singly connected (at most one directed path between any
ordered pair).  CPT rows are independent uniform random permutations.
Everything is deterministic per seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Sequence

from .cpnet import CPNet
from .domain import OutcomeSpace
from .errors import ConfigError, InternalInvariantViolation


@dataclass(frozen=True)
class GenConfig:
    """Knobs for one instance family.

    domain_max = 2 means binary domains; above 2 each attribute draws its
    size uniformly from 2..domain_max.  Caps of 5 on domain size and
    in-degree keep exact dominance tractable and match the evaluated regime.
    """

    attrs: int
    domain_max: int = 2
    max_in_degree: int = 5
    edge_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.attrs < 1:
            raise ConfigError("attrs must be at least 1")
        if not 2 <= self.domain_max <= 5:
            raise ConfigError("domain_max must be in 2..5")
        if not 0 <= self.max_in_degree <= 5:
            raise ConfigError("max_in_degree must be in 0..5")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ConfigError("edge_prob must be a probability")


def _random_space(cfg: GenConfig, rng: random.Random) -> OutcomeSpace:
    width = max(2, len(str(cfg.attrs)))
    names = [f"X{i:0{width}d}" for i in range(1, cfg.attrs + 1)]
    domains = {}
    for name in names:
        k = 2 if cfg.domain_max == 2 else rng.randint(2, cfg.domain_max)
        domains[name] = tuple(f"v{j}" for j in range(1, k + 1))
    return OutcomeSpace(names, domains)


def random_cpnet(
    cfg: GenConfig,
    space: OutcomeSpace | None = None,
    topo: Sequence[str] | None = None,
) -> CPNet:
    """One random valid net; `space` lets several nets share a domain.

    `topo` pins the topological order edges respect instead of drawing
    one, letting several nets share a common ancestry direction.
    """
    rng = random.Random(cfg.seed)
    if space is None:
        space = _random_space(cfg, rng)
    elif len(space.attributes) != cfg.attrs:
        raise ConfigError("supplied space does not match cfg.attrs")

    if topo is None:
        topo = list(space.attributes)
        rng.shuffle(topo)
    elif sorted(topo) != sorted(space.attributes):
        raise ConfigError("topo is not a permutation of the attributes")
    else:
        topo = list(topo)
    pairs = [(u, topo[j]) for i, u in enumerate(topo) for j in range(i + 1, len(topo))]
    rng.shuffle(pairs)

    # paths[a][b]: number of directed paths a -> b, kept in {0, 1}
    paths: dict[str, dict[str, int]] = {a: {} for a in space.attributes}
    indeg = {a: 0 for a in space.attributes}
    parents: dict[str, list[str]] = {a: [] for a in space.attributes}
    for u, v in pairs:
        if rng.random() >= cfg.edge_prob:
            continue
        if indeg[v] >= cfg.max_in_degree:
            continue
        sources = [a for a in space.attributes if paths[a].get(u)] + [u]
        sinks = [b for b in space.attributes if paths[v].get(b)] + [v]
        if any(paths[a].get(b) for a in sources for b in sinks):
            continue  # the new edge would create a second a -> b path
        for a in sources:
            for b in sinks:
                paths[a][b] = 1
        indeg[v] += 1
        parents[v].append(u)

    cpt = {}
    for attr in space.attributes:
        ps = sorted(parents[attr], key=space.index)
        dom = list(space.domains[attr])
        rows = []
        for combo in itertools.product(*(space.domains[p] for p in ps)):
            rows.append((dict(zip(ps, combo)), tuple(rng.sample(dom, len(dom)))))
        cpt[attr] = rows

    net = CPNet(space, parents, cpt).require_valid()
    _check_singly_connected(parents, space)
    return net


def _check_singly_connected(parents, space) -> None:
    """Re-derive path counts with an independent DP; defensive only."""
    children: dict[str, list[str]] = {a: [] for a in space.attributes}
    for a, ps in parents.items():
        for p in ps:
            children[p].append(a)
    memo: dict[str, dict[str, int]] = {}

    def counts_from(u: str) -> dict[str, int]:
        got = memo.get(u)
        if got is None:
            got = {}
            for w in children[u]:
                got[w] = got.get(w, 0) + 1
                for b, n in counts_from(w).items():
                    got[b] = got.get(b, 0) + n
            memo[u] = got
        return got

    for a in space.attributes:
        for b, n in counts_from(a).items():
            if n > 1:
                raise InternalInvariantViolation(
                    f"generator produced {n} directed paths {a} -> {b}"
                )


def random_nets(cfg: GenConfig, count: int) -> list[CPNet]:
    """`count` independent nets over one shared space drawn from cfg.seed.

    All nets of one call respect a single random topological order, so a
    joint ancestors-first attribute ordering always exists for the pair
    (see compatible_order).  CPT contents stay independent across nets.
    """
    if count < 1:
        raise ConfigError("count must be at least 1")
    rng = random.Random(cfg.seed)
    space = _random_space(cfg, rng)
    topo = list(space.attributes)
    rng.shuffle(topo)
    nets = []
    for _ in range(count):
        sub = rng.getrandbits(48)
        nets.append(random_cpnet(replace(cfg, seed=sub), space, topo))
    return nets


def random_instance(cfg: GenConfig) -> tuple[CPNet, CPNet]:
    """A bilateral instance: two nets over one shared space."""
    a, b = random_nets(cfg, 2)
    return a, b


def compatible_order(nets: Sequence[CPNet]) -> tuple[str, ...]:
    """Ancestors-first attribute order respecting every net's parent DAG.

    Negotiating along such an order keeps every agent's best completion
    of a deeper node consistent with the parent node's, which is what
    keeps the tree search narrow.  Raises ConfigError when the union of
    the parent graphs is cyclic, i.e. no joint order exists.
    """
    if not nets:
        raise ConfigError("no nets given")
    space = nets[0].space
    succ: dict[str, set[str]] = {a: set() for a in space.attributes}
    indeg = {a: 0 for a in space.attributes}
    for net in nets:
        if net.space is not space and net.space != space:
            raise ConfigError("nets do not share an outcome space")
        for child, ps in net.parents.items():
            for p in ps:
                if child not in succ[p]:
                    succ[p].add(child)
                    indeg[child] += 1
    order: list[str] = []
    ready = [a for a in space.attributes if indeg[a] == 0]
    while ready:
        ready.sort(key=space.index)
        a = ready.pop(0)
        order.append(a)
        for b in sorted(succ[a], key=space.index):
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
    if len(order) != len(space.attributes):
        raise ConfigError("agent networks admit no joint ancestors-first order")
    return tuple(order)
