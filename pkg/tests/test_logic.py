import math
import random

import pytest
from hypothesis import given, strategies as st

import _oracle
from _gen import ATOMS, formula, from_seed, general_program, horn_program, modelsets, penalty_kb
from semenc import gallery
from semenc.formula import And, Atom, Not, Or
from semenc.kbtext import format_kb, parse_kb
from semenc.logic import (
    Clause,
    LogicProgram,
    PenaltyKB,
    Rule,
    clause,
    fixed_points,
    ground,
    is_acyclic,
    models_of,
    penalty,
    penalty_models,
    tp_fixpoint,
    tp_step,
)
from semenc.modelset import ModelSet, modelset_algebra

AB = ("A", "B")


def interps(*sets):
    return {frozenset(s) for s in sets}


# models ---------------------------------------------------------------------


def test_equivalence_models():
    got = models_of(gallery.equivalence_kb(), AB)
    assert _oracle.expand(got) == interps((), ("A", "B"))


def test_empty_kb_has_all_models():
    assert models_of([], ["A"]).count() == 2


def test_exactly_one_models():
    a, b = Atom("A"), Atom("B")
    got = models_of([Or((a, b)), Not(And((a, b)))], AB)
    assert _oracle.expand(got) == interps(("A",), ("B",))


@given(from_seed(lambda r: [formula(r, ATOMS[:5]) for _ in range(r.randint(0, 3))]))
def test_models_match_truth_table_oracle(kb):
    universe = ATOMS[:5]
    assert _oracle.expand(models_of(kb, universe)) == _oracle.models(kb, universe)


# T_P ------------------------------------------------------------------------


def test_tp_or_program_trace():
    p = gallery.or_program()
    assert tp_step(p, set()) == {"A"}
    assert tp_step(p, {"A"}) == {"A", "C"}
    assert tp_step(p, {"A", "C"}) == {"A", "C"}
    assert tp_fixpoint(p).fixed_point == {"A", "C"}


def test_tp_empty_program():
    assert tp_step(LogicProgram((), ("A",)), {"A"}) == frozenset()


def test_tp_first_order_single_rule():
    p = LogicProgram((clause("A(c)", "B1(c)"),))
    assert tp_step(p, {"B1(c)"}) == {"A(c)"}


def test_tp_self_negation_cycles():
    result = tp_fixpoint(LogicProgram((Clause("A", (("A", False),)),)))
    assert result.status == "cycle"
    assert set(result.cycle) == {frozenset(), frozenset({"A"})}
    assert result.fixed_point is None


def test_acyclicity():
    assert not is_acyclic(LogicProgram((clause("A", "B"), clause("B", "A"))))
    assert is_acyclic(LogicProgram((clause("C", "A", "B"), clause("A"))))
    assert is_acyclic(gallery.or_program())


def test_grounding():
    rule = Rule(Atom("A", ("X",)), ((Atom("B1", ("X",)), True),))
    p = ground([rule], ["c", "d"])
    assert {str(c) for c in p.clauses} == {"A(c) <- B1(c).", "A(d) <- B1(d)."}
    assert ground([clause("A", "B")], ["c"]).clauses == (clause("A", "B"),)
    r2 = Rule(Atom("R2", ("X",)), ((Atom("R1", ("X",)), True),))
    assert len(ground([r2], gallery.CONSTANTS).clauses) == 4


@given(from_seed(horn_program, max_atoms=10, acyclic=False), st.data())
def test_tp_monotone_on_horn_programs(p, data):
    n = len(p.atoms)
    small = {a for a in p.atoms if data.draw(st.booleans())}
    big = small | {a for a in p.atoms if data.draw(st.booleans())}
    assert tp_step(p, small) <= tp_step(p, big)
    assert tp_step(p, big) == _oracle.tp(p, big)
    assert n == len(p.atoms)


@given(from_seed(horn_program), st.data())
def test_acyclic_fixpoint_fast_and_start_independent(p, data):
    m0 = {a for a in p.atoms if data.draw(st.booleans())}
    from_empty = tp_fixpoint(p)
    from_m0 = tp_fixpoint(p, m0)
    assert from_empty.converged and from_m0.converged
    assert len(from_m0.trace) - 1 <= len(p.atoms) + 1
    assert from_m0.fixed_point == from_empty.fixed_point == _oracle.tp_fixpoint(p)


@given(from_seed(general_program))
def test_fixed_points_are_supported_models(p):
    assert _oracle.expand(fixed_points(p)) == _oracle.supported_models(p)


# penalties ------------------------------------------------------------------


@pytest.mark.parametrize("c1, c2", [(1.0, 1.0), (3.0, 2.0)])
def test_penalty_table(c1, c2):
    kb = gallery.two_sentence_penalty_kb(c1, c2)
    assert penalty(kb, ()) == c1
    assert penalty(kb, ("A",)) == 0.0
    assert penalty(kb, ("A", "B")) == c2
    assert penalty(kb, ("B",)) == c2
    assert _oracle.expand(penalty_models(kb, AB)) == interps(("A",))


def test_penalty_small_cases():
    assert penalty(PenaltyKB(()), {"A"}) == 0.0
    kb = PenaltyKB(((2.0, Atom("A")), (3.0, Not(Atom("A")))))
    assert penalty(kb, {"A"}) == 3.0 and penalty(kb, ()) == 2.0
    assert penalty_models(PenaltyKB(()), ["A"]).count() == 2
    tie = PenaltyKB(((1.0, Atom("A")), (1.0, Not(Atom("A")))))
    assert penalty_models(tie, ["A"]).count() == 2


def test_infinite_confidence_saturates():
    kb = PenaltyKB(((math.inf, Atom("A")), (1.0, Not(Atom("A")))))
    assert penalty(kb, ()) == math.inf
    assert _oracle.expand(penalty_models(kb, ["A"])) == interps(("A",))


@given(from_seed(penalty_kb), st.sampled_from([0.5, 2.0, 7.0]))
def test_penalty_models_invariant_under_scaling(kb, factor):
    universe = sorted(kb.atoms())
    base = penalty_models(kb, universe)
    assert base.equals(penalty_models(kb.scaled(factor), universe))
    assert _oracle.expand(base) == _oracle.penalty_minima(kb, universe)


@given(from_seed(penalty_kb))
def test_penalty_matches_oracle(kb):
    universe = sorted(kb.atoms())
    for m in _oracle.interpretations(universe):
        assert penalty(kb, m) == pytest.approx(_oracle.penalty(kb, m), abs=1e-12)


# model-set algebra ------------------------------------------------------------


def test_algebra_examples():
    u = AB
    both = ModelSet.from_interpretations(u, [("A", "B")])
    neither = ModelSet.from_interpretations(u, [()])
    assert both.union(neither).equals(models_of(gallery.equivalence_kb(), u))
    empty = ModelSet.empty(u)
    assert both.intersect(empty).is_empty() and both.union(empty).equals(both)


def test_relational_cubes_intersect_to_one_model():
    enc = gallery.relational_or_encoding()
    net = gallery.relational_or_network()
    from semenc.network import compute_x_inf

    cubes = [enc.interpret(s) for s in compute_x_inf(net).x_inf]
    out = cubes[0]
    for c in cubes[1:]:
        out = out.intersect(c)
    assert out.count() == 1


UNIVERSE = tuple(f"p{i}" for i in range(12))


@given(modelsets(UNIVERSE), modelsets(UNIVERSE))
def test_algebra_matches_expansion(a, b):
    ea, eb = _oracle.expand(a), _oracle.expand(b)
    assert _oracle.expand(modelset_algebra("union", a, b)) == ea | eb
    assert _oracle.expand(modelset_algebra("intersect", a, b)) == ea & eb
    assert _oracle.expand(a.difference(b)) == ea - eb
    assert modelset_algebra("subset", a, b) == (ea <= eb)
    assert modelset_algebra("equal", a, b) == (ea == eb)
    assert modelset_algebra("empty", a, b) == (not (ea & eb))
    assert a.count() == len(ea)


@given(modelsets(UNIVERSE[:6]))
def test_lift_and_project(a):
    lifted = a.lift(UNIVERSE[:8])
    assert lifted.count() == 4 * a.count()
    assert lifted.project(UNIVERSE[:6]).equals(a)


# text format ------------------------------------------------------------------


def test_kb_round_trip_all_kinds():
    for kb in (
        gallery.equivalence_kb(),
        gallery.relational_kb(),
        gallery.or_program(),
        gallery.two_sentence_penalty_kb(3.0, 2.0),
        gallery.oscillator_fuzzy_kb(),
    ):
        text = format_kb(kb)
        again = parse_kb(text).value()
        assert format_kb(again) == text


def test_kb_grounding_directive():
    doc = parse_kb("%semenc kb 1\n%constants c d\nA(X) <- B1(X).\n")
    assert {str(c) for c in doc.value().clauses} == {"A(c) <- B1(c).", "A(d) <- B1(d)."}


@given(from_seed(lambda r: [formula(r, ATOMS[:4]) for _ in range(3)]))
def test_formula_text_round_trip(kb):
    again = parse_kb(format_kb(kb)).value()
    assert _oracle.models(again, ATOMS[:4]) == _oracle.models(kb, ATOMS[:4])
    assert [str(f) for f in again] == [str(f) for f in kb]


def test_random_generators_are_reproducible():
    assert str(general_program(random.Random(5))) == str(general_program(random.Random(5)))
