"""Negotiation-tree engine over CP-net preferences.

Core pieces: combinatorial outcome spaces (`domain`), CP-nets with exact
dominance (`cpnet`), the two-phase protocol (`protocol`), brute-force
Pareto oracles (`pareto`), a seeded instance generator (`generator`), file
formats (`netio`) and the experiment harness (`harness`).  A FastAPI
service (`negotree.service.app`) and a thin-client CLI (`negotree.cli`)
sit on top.
"""

__version__ = "0.1.0"

from .cpnet import DEFAULT_EXACT_BOUND, CPNet, DominanceCache, InducedOrder, PrefRelation
from .domain import Outcome, OutcomeSpace, PartialAssignment, combine, completions, project
from .generator import (
    GenConfig,
    compatible_order,
    random_cpnet,
    random_instance,
    random_nets,
)
from .pareto import Frontier, frontier, is_po, is_wpo
from .protocol import (
    AgentSession,
    FinalResult,
    NegotiationTree,
    Phase1Result,
    RunStats,
    TraceEvent,
    TreeNode,
    improvement_exchange,
    negotiate,
    phase1,
    phase2,
    step3,
)

__all__ = [
    "DEFAULT_EXACT_BOUND",
    "CPNet",
    "DominanceCache",
    "InducedOrder",
    "PrefRelation",
    "Outcome",
    "OutcomeSpace",
    "PartialAssignment",
    "combine",
    "completions",
    "project",
    "GenConfig",
    "compatible_order",
    "random_cpnet",
    "random_instance",
    "random_nets",
    "Frontier",
    "frontier",
    "is_po",
    "is_wpo",
    "AgentSession",
    "FinalResult",
    "NegotiationTree",
    "Phase1Result",
    "RunStats",
    "TraceEvent",
    "TreeNode",
    "improvement_exchange",
    "negotiate",
    "phase1",
    "phase2",
    "step3",
    "__version__",
]
