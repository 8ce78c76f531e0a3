"""Acyclic CP-nets: conditional preference tables, sweeps and dominance.

A CP-net attaches to each attribute a strict total order over its domain for
every combination of parent values.  The induced preference over complete
outcomes is the transitive closure of single improving flips: changing one
attribute to a value ranked better under the current parent context.

Dominance here is exact.  `CPNet.compare` searches the improving-flip
digraph on demand (bounded by the exact-mode bound), `InducedOrder`
materializes the whole relation with bit-parallel reachability.  The two
routes are kept separate on purpose so they can check each other.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from typing import Iterable, Mapping, Sequence

from .domain import Outcome, OutcomeSpace, PartialAssignment
from .errors import ExactModeExceeded, InvalidAssignment, ValidationError

# Hard ceiling for exact dominance work, overridable per call.  Exceeding it
# raises; there is no approximate fallback.
DEFAULT_EXACT_BOUND = 2 ** 14


class PrefRelation(enum.Enum):
    """How one outcome relates to another under a single agent's net."""

    BETTER = "better"
    WORSE = "worse"
    SAME = "same"
    INCOMPARABLE = "incomparable"

    def inverse(self) -> "PrefRelation":
        if self is PrefRelation.BETTER:
            return PrefRelation.WORSE
        if self is PrefRelation.WORSE:
            return PrefRelation.BETTER
        return self


# A CPT row as supplied by callers: (parent context, value order best-first).
CptRow = tuple[Mapping[str, str], Sequence[str]]


class CPNet:
    """Structural part (parent DAG) plus one CPT row per parent context.

    `cpt` maps each attribute to rows of (given, order) pairs, mirroring the
    file format: `given` binds every parent of the attribute, `order` lists
    the attribute's domain best value first.  Construction is permissive;
    `validate` reports all problems, `require_valid` gates the query API.
    """

    def __init__(
        self,
        space: OutcomeSpace,
        parents: Mapping[str, Iterable[str]],
        cpt: Mapping[str, Iterable[CptRow]],
    ):
        self.space = space
        self.parents: dict[str, tuple[str, ...]] = {}
        for a in space.attributes:
            ps = tuple(parents.get(a, ()))
            # keep canonical attribute order for deterministic context keys
            known = sorted(
                (p for p in ps if p in space.domains),
                key=space.index,
            )
            unknown = tuple(p for p in ps if p not in space.domains)
            self.parents[a] = tuple(known) + unknown
        self._extra_parent_keys = tuple(k for k in parents if k not in space.domains)
        self.cpt: dict[str, tuple[tuple[dict[str, str], tuple[str, ...]], ...]] = {}
        for a, rows in cpt.items():
            self.cpt[a] = tuple((dict(g), tuple(o)) for g, o in rows)
        self._validated = False
        self._topo: tuple[str, ...] | None = None
        self._indexed = None
        self._fixed_attrs: list[int] | None = None

    # --- validation ---

    def validate(self) -> list[str]:
        """All structural violations, empty when the net is well formed."""
        v: list[str] = []
        space = self.space
        for k in self._extra_parent_keys:
            v.append(f"parents given for unknown attribute {k!r}")
        for a, ps in self.parents.items():
            for p in ps:
                if p not in space.domains:
                    v.append(f"{a!r} lists unknown parent {p!r}")
            if a in ps:
                v.append(f"{a!r} lists itself as a parent")
            if len(set(ps)) != len(ps):
                v.append(f"{a!r} lists a parent twice")
        for k in self.cpt:
            if k not in space.domains:
                v.append(f"CPT given for unknown attribute {k!r}")
        if self._find_cycle():
            v.append("parent graph has a cycle: " + " -> ".join(self._find_cycle()))
        for a in space.attributes:
            v.extend(self._validate_table(a))
        return v

    def _find_cycle(self) -> list[str] | None:
        # plain DFS, good enough for the dozens of attributes we see
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {a: WHITE for a in self.space.attributes}
        children: dict[str, list[str]] = {a: [] for a in self.space.attributes}
        for a, ps in self.parents.items():
            for p in ps:
                if p in children:
                    children[p].append(a)
        stack_path: list[str] = []

        def dfs(u: str) -> list[str] | None:
            color[u] = GRAY
            stack_path.append(u)
            for w in children[u]:
                if color[w] == GRAY:
                    return stack_path[stack_path.index(w):] + [w]
                if color[w] == WHITE:
                    found = dfs(w)
                    if found:
                        return found
            color[u] = BLACK
            stack_path.pop()
            return None

        for a in self.space.attributes:
            if color[a] == WHITE:
                found = dfs(a)
                if found:
                    return found
        return None

    def _validate_table(self, attr: str) -> list[str]:
        v: list[str] = []
        space = self.space
        dom = space.domains[attr]
        ps = tuple(p for p in self.parents[attr] if p in space.domains)
        rows = self.cpt.get(attr)
        if rows is None:
            v.append(f"no CPT rows for {attr!r}")
            return v
        seen: dict[tuple[str, ...], int] = {}
        for given, order in rows:
            if set(given) != set(ps):
                v.append(
                    f"CPT row for {attr!r} conditions on {sorted(given)} "
                    f"but parents are {sorted(ps)}"
                )
                continue
            bad = [p for p in ps if given[p] not in space.domains[p]]
            if bad:
                v.append(f"CPT row for {attr!r} has out-of-domain parent values for {bad}")
                continue
            key = tuple(given[p] for p in ps)
            seen[key] = seen.get(key, 0) + 1
            if sorted(order) != sorted(dom):
                v.append(
                    f"CPT row for {attr!r} given {dict(given)} is not a "
                    f"permutation of the domain {list(dom)}"
                )
        for key, n in seen.items():
            if n > 1:
                v.append(f"CPT for {attr!r} repeats context {key}")
        want = 1
        for p in ps:
            want *= len(space.domains[p])
        if len(seen) < want:
            v.append(
                f"CPT for {attr!r} covers {len(seen)} of {want} parent contexts"
            )
        return v

    def require_valid(self) -> "CPNet":
        if not self._validated:
            violations = self.validate()
            if violations:
                raise ValidationError(violations)
            self._validated = True
        return self

    # --- sweeps ---

    @property
    def topo_order(self) -> tuple[str, ...]:
        """Ancestors-first order; ties broken by canonical attribute order."""
        if self._topo is None:
            self.require_valid()
            remaining = dict(self.parents)
            done: set[str] = set()
            order: list[str] = []
            while remaining:
                ready = [a for a, ps in remaining.items() if all(p in done for p in ps)]
                nxt = min(ready, key=self.space.index)
                order.append(nxt)
                done.add(nxt)
                del remaining[nxt]
            self._topo = tuple(order)
        return self._topo

    def row(self, attr: str, context: Mapping[str, str]) -> tuple[str, ...]:
        """The value order (best first) for attr under a full parent context."""
        self.require_valid()
        key = tuple(context[p] for p in self.parents[attr])
        for given, order in self.cpt[attr]:
            if tuple(given[p] for p in self.parents[attr]) == key:
                return order
        raise InvalidAssignment(f"no CPT row for {attr!r} under {dict(context)}")

    def optimal_completion(self, x: PartialAssignment) -> Outcome:
        """Best completion of x: sweep ancestors to descendants, taking the
        top table value for every unbound attribute given the bound context."""
        self.require_valid()
        self.space.check(x)
        values = x.as_dict()
        for a in self.topo_order:
            if a not in values:
                ctx = {p: values[p] for p in self.parents[a]}
                values[a] = self.row(a, ctx)[0]
        return self.space.outcome(values)

    # --- indexed form used by the dominance search ---

    def _indexed_tables(self):
        if self._indexed is None:
            self.require_valid()
            space = self.space
            attrs = space.attributes
            sizes = [len(space.domains[a]) for a in attrs]
            parent_idx = []
            strides = []
            row_best: list[list[tuple[int, ...]]] = []  # per attr, per ctx code
            rank: list[list[tuple[int, ...]]] = []      # rank[attr][ctx][value]
            for ai, a in enumerate(attrs):
                ps = self.parents[a]
                pidx = tuple(space.index(p) for p in ps)
                st = []
                mult = 1
                for p in reversed(ps):
                    st.append(mult)
                    mult *= len(space.domains[p])
                st.reverse()
                n_ctx = mult
                ordered: list[tuple[int, ...] | None] = [None] * n_ctx
                for given, order in self.cpt[a]:
                    code = 0
                    for p, s in zip(ps, st):
                        code += space.value_index(p, given[p]) * s
                    ordered[code] = tuple(space.value_index(a, v) for v in order)
                ranks = []
                for code in range(n_ctx):
                    row = ordered[code]
                    r = [0] * sizes[ai]
                    for pos, vi in enumerate(row):
                        r[vi] = pos
                    ranks.append(tuple(r))
                parent_idx.append(pidx)
                strides.append(tuple(st))
                row_best.append([tuple(row) for row in ordered])
                rank.append(ranks)
            self._indexed = (tuple(sizes), parent_idx, strides, row_best, rank)
        return self._indexed

    def _enc(self, o: PartialAssignment) -> tuple[int, ...]:
        return self.space.outcome_key(o)

    def _dec(self, enc: Sequence[int]) -> Outcome:
        space = self.space
        return PartialAssignment(
            (a, space.domains[a][vi]) for a, vi in zip(space.attributes, enc)
        )

    def _ctx_code(self, enc, ai, parent_idx, strides) -> int:
        code = 0
        for pi, s in zip(parent_idx[ai], strides[ai]):
            code += enc[pi] * s
        return code

    def _improving_flips(self, enc):
        """Every outcome reachable from enc by one improving flip."""
        sizes, parent_idx, strides, row_best, rank = self._indexed_tables()
        out = []
        for ai in range(len(sizes)):
            code = self._ctx_code(enc, ai, parent_idx, strides)
            r = rank[ai][code][enc[ai]]
            if r:
                row = row_best[ai][code]
                for better in row[:r]:
                    nxt = list(enc)
                    nxt[ai] = better
                    out.append(tuple(nxt))
        return out

    def _fixed_rank_attrs(self):
        """Attribute indices whose rows all rank values identically.

        For these the value's rank never increases along an improving
        sequence, which gives a cheap necessary condition for reachability.
        Root attributes always qualify.
        """
        sizes, _, _, row_best, _ = self._indexed_tables()
        fixed = []
        for ai in range(len(sizes)):
            rows = row_best[ai]
            if all(row == rows[0] for row in rows[1:]):
                fixed.append(ai)
        return fixed

    def _reachable(self, src, dst) -> bool:
        """Is dst reachable from src by improving flips (i.e. dst better)?"""
        rank = self._indexed_tables()[4]
        if self._fixed_attrs is None:
            self._fixed_attrs = self._fixed_rank_attrs()
        for ai in self._fixed_attrs:
            r = rank[ai][0]
            if r[dst[ai]] > r[src[ai]]:
                return False  # a never-worsening coordinate would have to worsen
        seen = {src}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            for nxt in self._improving_flips(cur):
                if nxt == dst:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def compare(
        self, o: PartialAssignment, other: PartialAssignment, exact_bound: int = DEFAULT_EXACT_BOUND
    ) -> PrefRelation:
        """Exact relation of o to other: Better means o is preferred."""
        self.require_valid()
        if self.space.size > exact_bound:
            raise ExactModeExceeded(
                f"outcome space has {self.space.size} outcomes, exact-mode "
                f"bound is {exact_bound}; shrink the instance or raise the bound"
            )
        a = self._enc(self.space.outcome(o.as_dict()))
        b = self._enc(self.space.outcome(other.as_dict()))
        if a == b:
            return PrefRelation.SAME
        if self._reachable(b, a):
            return PrefRelation.BETTER
        if self._reachable(a, b):
            return PrefRelation.WORSE
        return PrefRelation.INCOMPARABLE

    def strictly_better(
        self, o: PartialAssignment, exact_bound: int = DEFAULT_EXACT_BOUND
    ) -> list[Outcome]:
        """All outcomes strictly preferred to o, in canonical outcome order.

        Walks the improving-flip digraph upward from o; everything reached
        is better and nothing better is missed, since a dominance witness is
        exactly such a flip sequence.  Name and result match the
        `InducedOrder` method so the two routes can check each other.
        """
        self.require_valid()
        if self.space.size > exact_bound:
            raise ExactModeExceeded(
                f"outcome space has {self.space.size} outcomes, exact-mode "
                f"bound is {exact_bound}; shrink the instance or raise the bound"
            )
        src = self._enc(self.space.outcome(o.as_dict()))
        seen = {src}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            for nxt in self._improving_flips(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        seen.discard(src)
        return [self._dec(enc) for enc in sorted(seen)]


class DominanceCache:
    """Per-run memo around `CPNet.compare` with a cache-miss counter.

    One instance belongs to one agent in one negotiation, which keeps the
    dominance-query tally `queries` (misses only; hits are free) isolated
    from any other run over the same net.
    """

    def __init__(self, net: CPNet, exact_bound: int = DEFAULT_EXACT_BOUND):
        self.net = net.require_valid()
        self.exact_bound = exact_bound
        if net.space.size > exact_bound:
            raise ExactModeExceeded(
                f"outcome space has {net.space.size} outcomes, exact-mode "
                f"bound is {exact_bound}; shrink the instance or raise the bound"
            )
        self.queries = 0
        self.screens = 0
        self._memo: dict[tuple[PartialAssignment, PartialAssignment], PrefRelation] = {}

    def compare(self, o: PartialAssignment, other: PartialAssignment) -> PrefRelation:
        key = (o, other)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.queries += 1
        rel = self.net.compare(o, other, self.exact_bound)
        self._memo[key] = rel
        self._memo[(other, o)] = rel.inverse()
        return rel

    def screen(self, o: PartialAssignment, other: PartialAssignment) -> PrefRelation:
        """Same relation as `compare`, tallied under `screens` instead.

        `queries` is the cost model of the tree search and the fringe-based
        exchanges; offer screening in the closing improvement exchange sits
        outside it, so it keeps its own meter.  The memo is shared.
        """
        key = (o, other)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.screens += 1
        rel = self.net.compare(o, other, self.exact_bound)
        self._memo[key] = rel
        self._memo[(other, o)] = rel.inverse()
        return rel


class InducedOrder:
    """The full induced preference relation, materialized.

    Builds the improving-flip digraph over every outcome and computes
    reachability both ways with bitset dynamic programming.  This is the
    brute-force route the search-based `compare` is checked against, and
    the engine room of the Pareto oracles.
    """

    def __init__(self, net: CPNet, bound: int = DEFAULT_EXACT_BOUND):
        net.require_valid()
        self.net = net
        self.space = net.space
        n = self.space.size
        if n > bound:
            raise ExactModeExceeded(
                f"outcome space has {n} outcomes, oracle bound is {bound}"
            )
        self.n = n
        sizes = [len(self.space.domains[a]) for a in self.space.attributes]
        strides = [0] * len(sizes)
        mult = 1
        for i in reversed(range(len(sizes))):
            strides[i] = mult
            mult *= sizes[i]
        self._strides = strides

        encs = list(itertools.product(*(range(s) for s in sizes)))
        succ: list[list[int]] = [[] for _ in range(n)]
        pred: list[list[int]] = [[] for _ in range(n)]
        for i, enc in enumerate(encs):
            for nxt in net._improving_flips(enc):
                j = self._code(nxt)
                succ[i].append(j)
                pred[j].append(i)

        # reach[i]: bitset of outcomes at least as good as i (its up-set).
        # Processed better-first via Kahn over successor counts.
        reach = [0] * n
        pending = [len(s) for s in succ]
        stack = [i for i in range(n) if pending[i] == 0]
        seen_cnt = 0
        while stack:
            i = stack.pop()
            seen_cnt += 1
            bits = 1 << i
            for j in succ[i]:
                bits |= reach[j]
            reach[i] = bits
            for p in pred[i]:
                pending[p] -= 1
                if pending[p] == 0:
                    stack.append(p)
        if seen_cnt != n:
            # the flip digraph of an acyclic net is a DAG; anything else is a bug
            raise ValidationError(["improving-flip digraph contains a cycle"])

        # coreach[i]: bitset of outcomes at most as good as i (its down-set)
        coreach = [0] * n
        pending = [len(p) for p in pred]
        stack = [i for i in range(n) if pending[i] == 0]
        while stack:
            i = stack.pop()
            bits = 1 << i
            for p in pred[i]:
                bits |= coreach[p]
            coreach[i] = bits
            for j in succ[i]:
                pending[j] -= 1
                if pending[j] == 0:
                    stack.append(j)

        self._encs = encs
        self.reach = reach
        self.coreach = coreach

    def _code(self, enc) -> int:
        return sum(v * s for v, s in zip(enc, self._strides))

    def index(self, o: PartialAssignment) -> int:
        return self._code(self.space.outcome_key(self.space.outcome(o.as_dict())))

    def outcome_at(self, i: int) -> Outcome:
        return self.net._dec(self._encs[i])

    def relation(self, o: PartialAssignment, other: PartialAssignment) -> PrefRelation:
        i, j = self.index(o), self.index(other)
        if i == j:
            return PrefRelation.SAME
        if self.reach[j] >> i & 1:
            return PrefRelation.BETTER
        if self.reach[i] >> j & 1:
            return PrefRelation.WORSE
        return PrefRelation.INCOMPARABLE

    def strictly_better(self, o: PartialAssignment) -> list[Outcome]:
        i = self.index(o)
        bits = self.reach[i] & ~(1 << i)
        return [self.outcome_at(j) for j in _iter_bits(bits)]

    def strictly_worse(self, o: PartialAssignment) -> list[Outcome]:
        i = self.index(o)
        bits = self.coreach[i] & ~(1 << i)
        return [self.outcome_at(j) for j in _iter_bits(bits)]


def _iter_bits(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low
