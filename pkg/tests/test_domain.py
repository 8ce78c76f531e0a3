"""Assignments, spaces and the small algebra over them."""

import pytest

from negotree import OutcomeSpace, PartialAssignment, combine, completions, project
from negotree.errors import DisjointnessViolation, InvalidAssignment, ScopeViolation


class TestPartialAssignment:
    def test_bindings_normalized_by_attribute(self):
        x = PartialAssignment([("B", "b"), ("A", "a")])
        assert x.bindings == (("A", "a"), ("B", "b"))
        assert x == PartialAssignment({"A": "a", "B": "b"})
        assert hash(x) == hash(PartialAssignment([("A", "a"), ("B", "b")]))

    def test_empty(self):
        x = PartialAssignment()
        assert len(x) == 0
        assert x.scope == frozenset()
        assert x.as_dict() == {}

    def test_duplicate_binding_rejected(self):
        with pytest.raises(InvalidAssignment):
            PartialAssignment([("A", "a"), ("A", "a")])
        with pytest.raises(InvalidAssignment):
            PartialAssignment([("A", "a"), ("A", "b")])

    def test_immutable(self):
        x = PartialAssignment({"A": "a"})
        with pytest.raises(AttributeError):
            x.extra = 1

    def test_mapping_surface(self):
        x = PartialAssignment({"A": "a", "C": "c"})
        assert x["A"] == "a"
        assert x.get("C") == "c"
        assert x.get("B") is None
        assert x.get("B", "fallback") == "fallback"
        assert "A" in x and "B" not in x
        with pytest.raises(KeyError):
            x["B"]
        assert x.items() == (("A", "a"), ("C", "c"))
        assert repr(x) == "{A=a, C=c}"

    def test_eq_other_types(self):
        assert PartialAssignment({"A": "a"}) != {"A": "a"}
        assert (PartialAssignment({"A": "a"}) == 3) is False

    def test_combine_disjoint(self):
        x = PartialAssignment({"A": "a"})
        y = PartialAssignment({"B": "b"})
        assert x.combine(y) == PartialAssignment({"A": "a", "B": "b"})
        assert combine(y, x) == x.combine(y)

    def test_combine_overlap_raises_even_when_agreeing(self):
        x = PartialAssignment({"A": "a", "B": "b"})
        same = PartialAssignment({"A": "a"})
        with pytest.raises(DisjointnessViolation):
            x.combine(same)
        with pytest.raises(DisjointnessViolation):
            x.combine(PartialAssignment({"A": "other"}))

    def test_project(self):
        x = PartialAssignment({"A": "a", "B": "b", "C": "c"})
        assert x.project(["B"]) == PartialAssignment({"B": "b"})
        assert project(x, ("A", "C")) == PartialAssignment({"A": "a", "C": "c"})
        assert x.project([]) == PartialAssignment()

    def test_project_outside_scope_raises(self):
        x = PartialAssignment({"A": "a"})
        with pytest.raises(ScopeViolation):
            x.project(["A", "B"])


class TestOutcomeSpace:
    def test_size_and_indexing(self):
        space = OutcomeSpace(
            ("X", "Y"), {"X": ("x1", "x2", "x3"), "Y": ("y1", "y2")}
        )
        assert space.size == 6
        assert space.index("Y") == 1
        assert space.value_index("X", "x3") == 2

    def test_needs_at_least_one_attribute(self):
        with pytest.raises(InvalidAssignment):
            OutcomeSpace((), {})

    def test_duplicate_attribute_rejected(self):
        with pytest.raises(InvalidAssignment):
            OutcomeSpace(("A", "A"), {"A": ("a", "b")})

    def test_domain_requirements(self):
        with pytest.raises(InvalidAssignment):
            OutcomeSpace(("A",), {})
        with pytest.raises(InvalidAssignment):
            OutcomeSpace(("A",), {"A": ("a",)})
        with pytest.raises(InvalidAssignment):
            OutcomeSpace(("A",), {"A": ("a", "a")})

    def test_extra_domains_rejected(self):
        with pytest.raises(InvalidAssignment):
            OutcomeSpace(("A",), {"A": ("a", "b"), "B": ("x", "y")})

    def test_unknown_attribute_and_value(self):
        space = OutcomeSpace(("A",), {"A": ("a", "b")})
        with pytest.raises(InvalidAssignment):
            space.index("Z")
        with pytest.raises(InvalidAssignment):
            space.value_index("A", "nope")
        with pytest.raises(InvalidAssignment):
            space.check(PartialAssignment({"Z": "a"}))
        with pytest.raises(InvalidAssignment):
            space.assignment({"A": "zzz"})

    def test_outcome_requires_completeness(self):
        space = OutcomeSpace(("A", "B"), {"A": ("a", "b"), "B": ("x", "y")})
        o = space.outcome({"A": "a", "B": "x"})
        assert space.is_complete(o)
        with pytest.raises(InvalidAssignment):
            space.outcome({"A": "a"})
        assert not space.is_complete(space.assignment({"A": "a"}))

    def test_outcomes_canonical_order(self):
        space = OutcomeSpace(
            ("X", "Y"), {"X": ("x1", "x2"), "Y": ("y1", "y2", "y3")}
        )
        outs = list(space.outcomes())
        assert len(outs) == space.size == 6
        assert outs[0] == space.outcome({"X": "x1", "Y": "y1"})
        assert outs[-1] == space.outcome({"X": "x2", "Y": "y3"})
        # canonical order is exactly the sort by outcome_key
        assert outs == sorted(outs, key=space.outcome_key)
        assert [space.outcome_key(o) for o in outs[:3]] == [
            (0, 0), (0, 1), (0, 2)
        ]

    def test_equality(self):
        a = OutcomeSpace(("A",), {"A": ("a", "b")})
        b = OutcomeSpace(("A",), {"A": ("a", "b")})
        c = OutcomeSpace(("A",), {"A": ("b", "a")})
        assert a == b
        assert a != c
        assert (a == "not a space") is False


class TestCompletions:
    def test_partial(self):
        space = OutcomeSpace(
            ("A", "B", "C"),
            {"A": ("a", "~a"), "B": ("b", "~b"), "C": ("c", "~c")},
        )
        comp = completions(space.assignment({"A": "a"}), space)
        assert len(comp) == 4
        assert all(space.is_complete(o) and o["A"] == "a" for o in comp)

    def test_complete_is_singleton(self):
        space = OutcomeSpace(("A",), {"A": ("a", "b")})
        o = space.outcome({"A": "b"})
        assert completions(o, space) == {o}

    def test_empty_assignment_is_whole_space(self):
        space = OutcomeSpace(("A", "B"), {"A": ("a", "b"), "B": ("x", "y")})
        assert completions(PartialAssignment(), space) == set(space.outcomes())

    def test_validates_against_space(self):
        space = OutcomeSpace(("A",), {"A": ("a", "b")})
        with pytest.raises(InvalidAssignment):
            completions(PartialAssignment({"Z": "1"}), space)
