"""reasoner: axiom compilation, materialization, proofs and diagnosis."""
from __future__ import annotations

import pytest

from conftest import checked_materialize
from naive_oracle import naive_closure
from proof_check import assert_valid_proof
from randgen import random_case

from qvl.errors import BuiltinTypeError, NotDerived
from qvl.model import (
    BuiltinAtom,
    ClassAtom,
    DataAtom,
    DataValue,
    Declaration,
    Domain,
    HornRule,
    Individual,
    InverseProperties,
    KnowledgeBase,
    Name,
    Range,
    RoleAtom,
    SubClassOf,
    SubPropertyChain,
    SubPropertyOf,
    Symmetric,
    Transitive,
    Variable,
)
from qvl.reasoner import (
    compile_axioms,
    diagnose,
    entails,
    explain,
    herbrand_bound,
    materialize,
)


def nm(local: str, ns: str = "t") -> Name:
    return Name(ns, local)


def ind(local: str, ns: str = "cad") -> Individual:
    return Individual(Name(ns, local))


def _kb(axioms, rules=(), declares=()):
    return KnowledgeBase(name=nm("m"), declares=tuple(declares),
                         axioms=tuple(axioms), rules=tuple(rules))


x, y, z = Variable("x"), Variable("y"), Variable("z")


class TestCompileAxioms:
    def test_subclass(self):
        (rule,) = compile_axioms(_kb([SubClassOf(nm("Part"), nm("PhysicalObject"))]))
        assert rule.body == (ClassAtom(nm("Part"), x),)
        assert rule.head == ClassAtom(nm("PhysicalObject"), x)
        assert rule.id == nm("ax1")

    def test_subproperty(self):
        (rule,) = compile_axioms(_kb([SubPropertyOf(nm("p"), nm("q"))]))
        assert rule.body == (RoleAtom(nm("p"), x, y),)
        assert rule.head == RoleAtom(nm("q"), x, y)

    def test_chain_variables_are_consecutive_hops(self):
        axiom = SubPropertyChain((nm("hasAxis"), nm("isParallelWith"), nm("isAxisOf")),
                                 nm("isParallelWith"))
        (rule,) = compile_axioms(_kb([axiom]))
        hops = [Variable(f"x{i}") for i in range(4)]
        assert rule.body == (RoleAtom(nm("hasAxis"), hops[0], hops[1]),
                             RoleAtom(nm("isParallelWith"), hops[1], hops[2]),
                             RoleAtom(nm("isAxisOf"), hops[2], hops[3]))
        assert rule.head == RoleAtom(nm("isParallelWith"), hops[0], hops[3])

    def test_inverse_generates_both_directions(self):
        rules = compile_axioms(_kb([InverseProperties(nm("p"), nm("q"))]))
        assert [r.id.local for r in rules] == ["ax1", "ax2"]
        assert rules[0].head == RoleAtom(nm("q"), y, x)
        assert rules[1].head == RoleAtom(nm("p"), y, x)

    def test_symmetric_and_transitive(self):
        sym, trans = compile_axioms(_kb([Symmetric(nm("p")), Transitive(nm("p"))]))
        assert sym.head == RoleAtom(nm("p"), y, x)
        assert trans.body == (RoleAtom(nm("p"), x, y), RoleAtom(nm("p"), y, z))
        assert trans.head == RoleAtom(nm("p"), x, z)

    def test_domain_range(self):
        dom, rng = compile_axioms(_kb([Domain(nm("p"), nm("C")), Range(nm("p"), nm("C"))]))
        assert dom.body == (RoleAtom(nm("p"), x, y),)
        assert dom.head == ClassAtom(nm("C"), x)
        assert rng.head == ClassAtom(nm("C"), y)

    def test_domain_on_data_property_uses_data_atom(self):
        kb = _kb([Domain(nm("d"), nm("C"))], declares=[Declaration("data", nm("d"))])
        (rule,) = compile_axioms(kb)
        assert rule.body == (DataAtom(nm("d"), x, y),)

    def test_empty_axiom_list_returns_rules_unchanged(self):
        rule = HornRule(nm("r"), (ClassAtom(nm("C"), x),), ClassAtom(nm("D"), x))
        assert compile_axioms(_kb([], rules=[rule])) == (rule,)

    def test_user_rules_come_first_and_ax_ids_skip_taken(self):
        taken = HornRule(nm("ax1", "m"), (ClassAtom(nm("C"), x),), ClassAtom(nm("D"), x))
        kb = KnowledgeBase(name=Name("m", "m"), rules=(taken,),
                           axioms=(SubClassOf(nm("C"), nm("D")),))
        rules = compile_axioms(kb)
        assert rules[0] is taken
        assert rules[1].id == Name("m", "ax2")


class TestMaterialize:
    def test_no_rules_store_is_input(self):
        fact = ClassAtom(nm("Part"), ind("leg1"))
        store = checked_materialize([], [fact])
        assert set(store) == {fact}
        assert store.justification(fact).is_asserted

    def test_crane_fixture_derives_parallel_legs(self, background, crane_abox):
        rules = compile_axioms(background)
        store = checked_materialize(rules, list(crane_abox) + list(background.assertions))
        goal = RoleAtom(Name("geom", "isParallelWith"), ind("leg1"), ind("leg2"))
        assert entails(store, goal)
        # absence confirmed against the naive oracle
        closure = naive_closure(list(rules), list(crane_abox))
        assert set(store) == closure
        absent = RoleAtom(Name("geom", "isParallelWith"), ind("leg1"), ind("frameBase"))
        assert absent not in closure
        assert not entails(store, absent)

    def test_duplicate_inputs_collapse(self):
        fact = ClassAtom(nm("C"), ind("a"))
        store = checked_materialize([], [fact, fact])
        assert len(store) == 1

    def test_builtin_type_error_on_mixed_comparison(self):
        rule = HornRule(nm("r"),
                        (DataAtom(nm("d"), x, Variable("v")),
                         BuiltinAtom("eq", Variable("v"), DataValue("text"))),
                        ClassAtom(nm("C"), x))
        fact = DataAtom(nm("d"), ind("a"), DataValue(1.0))
        with pytest.raises(BuiltinTypeError):
            materialize([rule], [fact])

    def test_string_equality_allowed_ordering_rejected(self):
        def rule_with(op):
            return HornRule(nm("r"),
                            (DataAtom(nm("d"), x, Variable("v")),
                             BuiltinAtom(op, Variable("v"), DataValue("abc"))),
                            ClassAtom(nm("C"), x))
        fact = DataAtom(nm("d"), ind("a"), DataValue("abc"))
        store = materialize([rule_with("eq")], [fact])
        assert ClassAtom(nm("C"), ind("a")) in store
        with pytest.raises(BuiltinTypeError):
            materialize([rule_with("lt")], [fact])

    def test_rule_without_positive_body_rejected(self):
        rule = HornRule(nm("r"), (BuiltinAtom("eq", DataValue(1), DataValue(1)),),
                        ClassAtom(nm("C"), ind("a")))
        with pytest.raises(ValueError):
            materialize([rule], [])

    def test_non_ground_fact_rejected(self):
        with pytest.raises(ValueError):
            materialize([], [ClassAtom(nm("C"), x)])

    def test_recursive_transitive_closure(self):
        edge = nm("edge")
        rules = compile_axioms(_kb([Transitive(edge)]))
        facts = [RoleAtom(edge, ind(f"n{i}"), ind(f"n{i+1}")) for i in range(6)]
        store = checked_materialize(rules, facts)
        assert RoleAtom(edge, ind("n0"), ind("n6")) in store
        assert len(store) == 6 * 7 // 2

    def test_first_found_justification_is_deterministic(self, background, crane_abox):
        rules = compile_axioms(background)
        facts = list(crane_abox) + list(background.assertions)
        first = materialize(rules, facts)
        second = materialize(rules, facts)
        assert list(first) == list(second)
        for fact in first:
            assert first.justification(fact) == second.justification(fact)

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_naive_oracle(self, seed):
        rules, facts = random_case(seed)
        store = checked_materialize(rules, facts)
        assert set(store) == naive_closure(rules, facts)

    @pytest.mark.parametrize("seed", range(200, 215))
    def test_matches_naive_oracle_with_builtins(self, seed):
        rules, facts = random_case(seed, with_builtins=True, max_facts=80)
        store = checked_materialize(rules, facts)
        assert set(store) == naive_closure(rules, facts)

    @pytest.mark.parametrize("seed", range(400, 412))
    def test_monotonicity(self, seed):
        rules, facts = random_case(seed, max_facts=60)
        base = set(checked_materialize(rules, facts))
        extra = ClassAtom(nm("C0"), Individual(nm("i0")))
        grown = set(checked_materialize(rules, facts + [extra]))
        assert base <= grown


class TestExplain:
    def test_asserted_fact_is_single_leaf(self):
        fact = ClassAtom(nm("C"), ind("a"))
        store = checked_materialize([], [fact])
        tree = explain(store, fact)
        assert tree.is_asserted and not tree.children and tree.depth() == 0

    def test_crane_proof_combines_angle_rule_and_chain_rule(self, background, crane_abox):
        rules = compile_axioms(background)
        store = checked_materialize(rules, list(crane_abox) + list(background.assertions))
        goal = RoleAtom(Name("geom", "isParallelWith"), ind("leg1"), ind("leg2"))
        tree = explain(store, goal)
        by_id = {r.id: r for r in rules}
        assert_valid_proof(tree, by_id, set(crane_abox))
        # root fires the part-level chain rule
        root_rule = by_id[tree.rule_id]
        assert len(root_rule.body) == 3
        used = {node.rule_id for node in tree.nodes() if node.rule_id is not None}
        assert Name("rules", "parallel_axes") in used
        assert tree.depth() == 2

    def test_not_derived(self, background, crane_abox):
        rules = compile_axioms(background)
        store = checked_materialize(rules, list(crane_abox))
        with pytest.raises(NotDerived):
            explain(store, RoleAtom(Name("geom", "isParallelWith"),
                                    ind("leg1"), ind("frameBase")))


class TestDiagnose:
    def _crane_bad(self, background, crane_bad_abox):
        rules = compile_axioms(background)
        store = checked_materialize(rules, list(crane_bad_abox) + list(background.assertions))
        return rules, store

    def test_mutated_crane_names_broken_axis_parallelism(self, background, crane_bad_abox):
        rules, store = self._crane_bad(background, crane_bad_abox)
        goal = RoleAtom(Name("geom", "isParallelWith"), ind("leg1"), ind("leg2"))
        report = diagnose(rules, store, goal)
        assert report.goal == goal
        missing = {atom for c in report.candidates for atom in c.missing}
        assert RoleAtom(Name("geom", "isParallelWith"), ind("a1"), ind("a2")) in missing
        for candidate in report.candidates:
            assert candidate.missing  # never empty

    def test_axis_goal_blames_angle_join(self, background, crane_bad_abox):
        rules, store = self._crane_bad(background, crane_bad_abox)
        goal = RoleAtom(Name("geom", "isParallelWith"), ind("a1"), ind("a2"))
        report = diagnose(rules, store, goal)
        best = max(len(c.satisfied) for c in report.candidates)
        blaming = [c for c in report.candidates
                   if c.rule_id == Name("rules", "parallel_axes")
                   and c.missing == (BuiltinAtom("eq", DataValue(90), DataValue(80)),)]
        assert blaming, "the broken angle join must surface as a candidate"
        assert len(blaming[0].satisfied) == best

    def test_goal_with_no_matching_rule_head_is_empty(self, background, crane_bad_abox):
        rules, store = self._crane_bad(background, crane_bad_abox)
        goal = RoleAtom(Name("feat", "angle"), ind("nope"), ind("zilch"))
        # feat:angle appears as a chain superproperty, so drop those rules too
        rules = [r for r in rules
                 if not (isinstance(r.head, RoleAtom) and r.head.role == Name("feat", "angle"))]
        report = diagnose(rules, store, goal)
        assert report.candidates == ()

    def test_entailed_goal_rejected(self):
        fact = ClassAtom(nm("C"), ind("a"))
        store = checked_materialize([], [fact])
        with pytest.raises(ValueError):
            diagnose([], store, fact)

    def test_fully_satisfied_body_contradicts_precondition(self):
        # store built without the rule, so the goal is absent but derivable
        fact = ClassAtom(nm("C"), ind("a"))
        store = checked_materialize([], [fact])
        rule = HornRule(nm("r"), (ClassAtom(nm("C"), x),), ClassAtom(nm("D"), x))
        with pytest.raises(ValueError):
            diagnose([rule], store, ClassAtom(nm("D"), ind("a")))


class TestHerbrandBound:
    def test_bound_counts_symbol_universe(self):
        rules, facts = random_case(7)
        bound = herbrand_bound(rules, facts)
        store = materialize(rules, facts)
        assert len(store) <= bound

    def test_transitive_closure_depth_bound(self):
        tree = explain(
            checked_materialize(
                compile_axioms(_kb([Transitive(nm("edge"))])),
                [RoleAtom(nm("edge"), ind(f"n{i}"), ind(f"n{i+1}")) for i in range(30)]),
            RoleAtom(nm("edge"), ind("n0"), ind("n30")))
        assert tree.depth() <= 31
