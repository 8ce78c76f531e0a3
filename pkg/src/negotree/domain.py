"""Combinatorial outcome spaces and (partial) assignments over them.

An outcome space is an ordered set of attributes, each with a finite domain
of at least two distinct values.  A partial assignment binds a subset of the
attributes; an outcome binds all of them.  Assignments are immutable and
hashable, so they can live in sets and serve as dict keys throughout the
engine.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping

from .errors import DisjointnessViolation, InvalidAssignment, ScopeViolation


class PartialAssignment:
    """An immutable binding of values to a subset of attributes.

    The assignment carries no reference to a space; validity against a
    particular space is checked by the space-aware helpers.  Bindings are
    normalized to a tuple sorted by attribute id, which gives stable
    equality, hashing and repr regardless of construction order.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        if isinstance(bindings, Mapping):
            items = bindings.items()
        else:
            items = tuple(bindings)
        normalized = tuple(sorted((str(a), str(v)) for a, v in items))
        for (a1, _), (a2, _) in zip(normalized, normalized[1:]):
            if a1 == a2:
                raise InvalidAssignment(f"attribute {a1!r} bound more than once")
        object.__setattr__(self, "_bindings", normalized)

    # --- mapping-ish surface ---

    @property
    def bindings(self) -> tuple[tuple[str, str], ...]:
        return self._bindings

    @property
    def scope(self) -> frozenset[str]:
        return frozenset(a for a, _ in self._bindings)

    def as_dict(self) -> dict[str, str]:
        return dict(self._bindings)

    def items(self) -> tuple[tuple[str, str], ...]:
        return self._bindings

    def get(self, attr: str, default: str | None = None) -> str | None:
        for a, v in self._bindings:
            if a == attr:
                return v
        return default

    def __getitem__(self, attr: str) -> str:
        v = self.get(attr)
        if v is None:
            raise KeyError(attr)
        return v

    def __contains__(self, attr: str) -> bool:
        return self.get(attr) is not None

    def __len__(self) -> int:
        return len(self._bindings)

    def __setattr__(self, name, value):
        raise AttributeError("PartialAssignment is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialAssignment):
            return NotImplemented
        return self._bindings == other._bindings

    def __hash__(self) -> int:
        return hash(self._bindings)

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}={v}" for a, v in self._bindings)
        return f"{{{inner}}}"

    # --- algebra ---

    def combine(self, other: "PartialAssignment") -> "PartialAssignment":
        """Union of two assignments with disjoint scopes.

        Overlap raises DisjointnessViolation even when the overlapping
        attribute agrees on its value: the operation is defined only for
        disjoint scopes.
        """
        overlap = self.scope & other.scope
        if overlap:
            raise DisjointnessViolation(
                "scopes overlap on " + ", ".join(sorted(overlap))
            )
        return PartialAssignment(self._bindings + other._bindings)

    def project(self, attrs: Iterable[str]) -> "PartialAssignment":
        """Restriction to `attrs`, which must all be bound here."""
        wanted = set(attrs)
        missing = wanted - self.scope
        if missing:
            raise ScopeViolation(
                "projection outside scope: " + ", ".join(sorted(missing))
            )
        return PartialAssignment((a, v) for a, v in self._bindings if a in wanted)


# A complete assignment (scope = all attributes of its space).  Completeness
# is a property relative to a space, so this stays a plain alias; the
# space-aware constructors below are the places that enforce it.
Outcome = PartialAssignment


class OutcomeSpace:
    """Ordered attributes with finite domains; the Cartesian product is O.

    The attribute tuple order is the canonical order used everywhere a
    deterministic tie-break is needed (sweep order ties, outcome sort keys,
    file layout).
    """

    def __init__(self, attributes: Iterable[str], domains: Mapping[str, Iterable[str]]):
        self.attributes: tuple[str, ...] = tuple(str(a) for a in attributes)
        if len(set(self.attributes)) != len(self.attributes):
            raise InvalidAssignment("duplicate attribute ids")
        if not self.attributes:
            raise InvalidAssignment("an outcome space needs at least one attribute")
        doms = {}
        for a in self.attributes:
            if a not in domains:
                raise InvalidAssignment(f"no domain given for attribute {a!r}")
            vals = tuple(str(v) for v in domains[a])
            if len(vals) < 2:
                raise InvalidAssignment(f"domain of {a!r} needs at least 2 values")
            if len(set(vals)) != len(vals):
                raise InvalidAssignment(f"domain of {a!r} has duplicate values")
            doms[a] = vals
        extra = set(domains) - set(self.attributes)
        if extra:
            raise InvalidAssignment(
                "domains given for unknown attributes: " + ", ".join(sorted(extra))
            )
        self.domains: dict[str, tuple[str, ...]] = doms
        self._index = {a: i for i, a in enumerate(self.attributes)}
        size = 1
        for a in self.attributes:
            size *= len(doms[a])
        self.size: int = size  # |O|, exact

    def __eq__(self, other) -> bool:
        if not isinstance(other, OutcomeSpace):
            return NotImplemented
        return self.attributes == other.attributes and self.domains == other.domains

    def __repr__(self) -> str:
        return f"OutcomeSpace({list(self.attributes)!r})"

    def index(self, attr: str) -> int:
        try:
            return self._index[attr]
        except KeyError:
            raise InvalidAssignment(f"unknown attribute {attr!r}") from None

    def value_index(self, attr: str, value: str) -> int:
        try:
            return self.domains[attr].index(value)
        except (KeyError, ValueError):
            raise InvalidAssignment(f"value {value!r} not in domain of {attr!r}") from None

    def check(self, x: PartialAssignment) -> PartialAssignment:
        """Validate an assignment against this space and hand it back."""
        for a, v in x.items():
            self.value_index(a, v)  # raises on unknown attribute or value
        return x

    def assignment(self, bindings) -> PartialAssignment:
        return self.check(PartialAssignment(bindings))

    def outcome(self, bindings) -> Outcome:
        """A validated complete assignment."""
        x = self.assignment(bindings)
        if len(x) != len(self.attributes):
            missing = set(self.attributes) - x.scope
            raise InvalidAssignment(
                "outcome leaves attributes unbound: " + ", ".join(sorted(missing))
            )
        return x

    def outcomes(self) -> Iterator[Outcome]:
        """All outcomes, in canonical (value-index lexicographic) order."""
        for combo in itertools.product(*(self.domains[a] for a in self.attributes)):
            yield PartialAssignment(zip(self.attributes, combo))

    def outcome_key(self, o: PartialAssignment) -> tuple[int, ...]:
        """Canonical sort key: the value-index vector in attribute order."""
        return tuple(self.value_index(a, o[a]) for a in self.attributes)

    def is_complete(self, x: PartialAssignment) -> bool:
        return x.scope == set(self.attributes)


def combine(x: PartialAssignment, y: PartialAssignment) -> PartialAssignment:
    return x.combine(y)


def project(x: PartialAssignment, attrs: Iterable[str]) -> PartialAssignment:
    return x.project(attrs)


def completions(x: PartialAssignment, space: OutcomeSpace) -> set[Outcome]:
    """Comp(x): every outcome extending x.  For complete x this is {x}."""
    space.check(x)
    free = [a for a in space.attributes if a not in x]
    out = set()
    for combo in itertools.product(*(space.domains[a] for a in free)):
        out.add(x.combine(PartialAssignment(zip(free, combo))))
    return out
