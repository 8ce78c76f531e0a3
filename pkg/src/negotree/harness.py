"""Experiment harness: single runs, seeded batches, optimality verification.

Batches derive one sub-seed pair per round from a master RNG, so a whole
campaign is reproducible from a single seed.  `verify` replays rounds with
the brute-force Pareto oracles, which caps it at exact-mode sizes; it
refuses oversized configurations up front instead of approximating.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .cpnet import DEFAULT_EXACT_BOUND, CPNet
from .errors import BatchError, ExactModeExceeded
from .generator import GenConfig, compatible_order, random_instance
from .netio import (
    CSV_HEADER,
    csv_row,
    event_record,
    net_to_doc,
    outcome_record,
    read_net,
)
from .pareto import frontier
from .protocol import FinalResult, RunStats, negotiate


def run_files(path1, path2, seed: int,
              exact_bound: int = DEFAULT_EXACT_BOUND) -> FinalResult:
    """Load two net files, validate, negotiate."""
    net1 = read_net(path1).require_valid()
    net2 = read_net(path2).require_valid()
    return negotiate([net1, net2], seed, exact_bound=exact_bound)


def _round_seeds(master: random.Random) -> tuple[int, int]:
    return master.getrandbits(48), master.getrandbits(48)


@dataclass
class BatchResult:
    config: GenConfig
    rounds: int
    stats: list[RunStats] = field(default_factory=list)

    @property
    def mean_s_os(self) -> float:
        return sum(s.s_os for s in self.stats) / len(self.stats)

    @property
    def mean_s_out(self) -> float:
        return sum(s.s_out_mean for s in self.stats) / len(self.stats)

    @property
    def mean_s_dq(self) -> float:
        return sum(s.s_dq_mean for s in self.stats) / len(self.stats)

    @property
    def mean_s_iter(self) -> float:
        return sum(s.s_iter for s in self.stats) / len(self.stats)

    @property
    def mean_s_time(self) -> float:
        return sum(s.s_time_sec for s in self.stats) / len(self.stats)

    def csv(self) -> str:
        """Header plus one aggregate row for this configuration."""
        row = csv_row(self.config.attrs, self.mean_s_os, self.mean_s_out,
                      self.mean_s_dq, self.mean_s_iter, self.mean_s_time)
        return CSV_HEADER + "\n" + row + "\n"


def batch(cfg: GenConfig, rounds: int, seed: int,
          exact_bound: int = DEFAULT_EXACT_BOUND) -> BatchResult:
    """`rounds` independent instances of one configuration, aggregated.

    Rounds negotiate along the pair's joint ancestors-first order; with
    an order drawn blind to both networks the tree search degenerates
    into a broad crawl and the aggregate counts stop being comparable
    across configurations.  Any protocol error aborts the batch; the
    exception names the failing sub-seed so the round can be replayed
    in isolation.
    """
    master = random.Random(seed)
    result = BatchResult(config=cfg, rounds=rounds)
    for index in range(rounds):
        pair_seed, run_seed = _round_seeds(master)
        try:
            nets = random_instance(replace(cfg, seed=pair_seed))
            order = compatible_order(nets)
            outcome = negotiate(nets, run_seed, order=order,
                                exact_bound=exact_bound)
        except Exception as exc:
            raise BatchError(index, pair_seed, run_seed, exc) from exc
        result.stats.append(outcome.stats)
    return result


@dataclass
class Counterexample:
    round_index: int
    pair_seed: int
    run_seed: int
    reason: str
    nets: list[dict]
    chosen: dict[str, str]
    trace: list[dict]


@dataclass
class VerifyReport:
    rounds: int
    po_passes: int = 0
    wpo_passes: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify(cfg: GenConfig, rounds: int, seed: int,
           exact_bound: int = DEFAULT_EXACT_BOUND) -> VerifyReport:
    """Machine-check the optimality guarantees on random instances.

    Per round: the chosen agreement must sit on the Pareto frontier and
    every full-depth initial agreement must be weakly Pareto optimal.
    Rounds follow the same joint-order policy as batch().
    """
    master = random.Random(seed)
    report = VerifyReport(rounds=rounds)
    for index in range(rounds):
        pair_seed, run_seed = _round_seeds(master)
        nets = random_instance(replace(cfg, seed=pair_seed))
        space = nets[0].space
        if space.size > exact_bound:
            raise ExactModeExceeded(
                f"round {index}: |O| = {space.size} exceeds the oracle bound "
                f"{exact_bound}; lower --attrs/--domain-max or raise --oracle-bound"
            )
        outcome = negotiate(nets, run_seed, order=compatible_order(nets),
                            exact_bound=exact_bound)
        front = frontier(nets, exact_bound)

        def flag(reason: str) -> None:
            report.counterexamples.append(Counterexample(
                round_index=index,
                pair_seed=pair_seed,
                run_seed=run_seed,
                reason=reason,
                nets=[net_to_doc(n) for n in nets],
                chosen=outcome_record(outcome.chosen, space),
                trace=[event_record(e, space) for e in outcome.trace],
            ))

        if outcome.chosen in front.po:
            report.po_passes += 1
        else:
            flag(f"chosen agreement {outcome.chosen!r} is not Pareto optimal")

        tree = outcome.phase1.tree
        agreement_paths = [
            space.outcome(tree.node(nid).path.as_dict())
            for nid in outcome.phase1.agreement_ids
        ]
        if all(o in front.wpo for o in agreement_paths):
            report.wpo_passes += 1
        else:
            flag("a full-depth initial agreement is not weakly Pareto optimal")
    return report


def generate_nets(cfg: GenConfig, count: int) -> list[CPNet]:
    """The `gen` operation: `count` validated nets over one shared space."""
    from .generator import random_nets

    return random_nets(cfg, count)
