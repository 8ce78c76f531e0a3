"""Brute-force Pareto oracles over a shared outcome space.

Weak Pareto optimality: no alternative is strictly better for every agent.
Pareto optimality: no alternative is strictly better for at least one agent
while no agent strictly prefers the original.  Under strict-CPT nets
indifference collapses to equality, so the blocking condition for PO is
"not strictly worse for anyone, strictly better for someone".

Everything here scans the full outcome space through `InducedOrder`
bitsets; the protocol never calls into this module, it exists to check the
protocol's output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cpnet import DEFAULT_EXACT_BOUND, CPNet, InducedOrder
from .domain import Outcome, PartialAssignment
from .errors import ConfigError


@dataclass(frozen=True)
class Frontier:
    """The two optimality sets; po is always a subset of wpo."""

    po: frozenset[Outcome]
    wpo: frozenset[Outcome]


def _oracles(nets: Sequence[CPNet], bound: int) -> list[InducedOrder]:
    if not nets:
        raise ConfigError("need at least one net")
    space = nets[0].space
    for net in nets[1:]:
        if net.space != space:
            raise ConfigError("all nets must share one outcome space")
    return [InducedOrder(net, bound) for net in nets]


def _wpo_bits(oracles: Sequence[InducedOrder], i: int) -> bool:
    # strictly better for everyone = intersection of up-sets minus the point
    common = oracles[0].reach[i]
    for orc in oracles[1:]:
        common &= orc.reach[i]
    return common == (1 << i)


def _po_bits(oracles: Sequence[InducedOrder], i: int) -> bool:
    self_bit = 1 << i
    better_any = 0
    worse_any = 0
    for orc in oracles:
        better_any |= orc.reach[i]
        worse_any |= orc.coreach[i]
    blockers = better_any & ~worse_any & ~self_bit
    return blockers == 0


def is_wpo(
    o: PartialAssignment, nets: Sequence[CPNet], bound: int = DEFAULT_EXACT_BOUND
) -> bool:
    oracles = _oracles(nets, bound)
    return _wpo_bits(oracles, oracles[0].index(o))


def is_po(
    o: PartialAssignment, nets: Sequence[CPNet], bound: int = DEFAULT_EXACT_BOUND
) -> bool:
    oracles = _oracles(nets, bound)
    return _po_bits(oracles, oracles[0].index(o))


def frontier(nets: Sequence[CPNet], bound: int = DEFAULT_EXACT_BOUND) -> Frontier:
    """Exhaustive scan of the whole space; quadratic work hidden in bitsets."""
    oracles = _oracles(nets, bound)
    po = []
    wpo = []
    for i in range(oracles[0].n):
        if _wpo_bits(oracles, i):
            o = oracles[0].outcome_at(i)
            wpo.append(o)
            if _po_bits(oracles, i):
                po.append(o)
        # po implies wpo, so nothing to check when wpo already failed
    return Frontier(po=frozenset(po), wpo=frozenset(wpo))
