import itertools
import math

import numpy as np
import pytest
from hypothesis import given

import _oracle
from _gen import ATOMS, formula, from_seed, general_program, hopfield_net, horn_program, penalty_kb
from semenc import gallery
from semenc.encoding import EncodingNAT, check_semantic_encoding
from semenc.errors import CompileError
from semenc.formula import And, Atom, Not, Or
from semenc.logic import Clause, LogicProgram, PenaltyKB, clause, tp_fixpoint
from semenc.network import CandidateNetwork, compute_x_inf, energy_batch, enumerate_states, step
from semenc.translate import (
    cilp_compile,
    hopfield_to_penalty,
    horn_extract,
    kbann_compile,
    penalty_to_hopfield,
    violation_polynomial,
)


def _restrict(m, atoms):
    return frozenset(a for a in m if a in atoms)


# KBANN ------------------------------------------------------------------------


def test_kbann_or_program():
    result = kbann_compile(gallery.or_program())
    assert result.certificate.passed
    report = compute_x_inf(result.net)
    fixed = [s for s in report.x_inf if step(result.net, s) == s]
    assert len(fixed) == len(report.x_inf) == 1
    assert _oracle.expand(result.enc.interpret(fixed[0])) == {frozenset({"A", "C"})}


def test_hand_built_or_net_is_an_accepted_equivalent():
    net = gallery.or_program_network()
    enc = EncodingNAT({"A": 0, "B": 1, "C": 3})
    assert check_semantic_encoding(net, enc, "union", gallery.or_program()).is_semantic_encoding


def test_kbann_single_fact():
    result = kbann_compile(LogicProgram((clause("A"),)))
    assert result.net.n == 1 and result.net.biases[0] > 0
    assert compute_x_inf(result.net).x_inf == ((1.0,),)


def test_kbann_conjunction_gate():
    result = kbann_compile(LogicProgram((clause("C", "A", "B"),)))
    net = result.net
    c = net.index_of("C")
    assert net.weights[net.index_of("A"), c] == 1.0 and net.weights[net.index_of("B"), c] == 1.0
    assert net.biases[c] == -1.5
    for a, b in itertools.product((0.0, 1.0), repeat=2):
        s = [0.0] * net.n
        s[net.index_of("A")], s[net.index_of("B")] = a, b
        assert step(net, s)[c] == (1.0 if a == b == 1.0 else 0.0)


def test_kbann_rejects_cycles_and_negation():
    with pytest.raises(CompileError):
        kbann_compile(LogicProgram((clause("A", "B"), clause("B", "A"))))
    with pytest.raises(CompileError):
        kbann_compile(LogicProgram((Clause("A", (("B", False),)),)))


def test_extract_conjunction_round_trip():
    program = LogicProgram((clause("C", "A", "B"),))
    extracted = horn_extract(kbann_compile(program).net)
    assert extracted.certificate.passed
    for m in _oracle.interpretations(program.atoms):
        assert _oracle.tp(extracted.program, m) == _oracle.tp(program, m)


def test_extract_zero_net_with_negative_biases():
    net = CandidateNetwork.build(["a", "b"], biases={"a": -1.0, "b": -0.5})
    assert horn_extract(net).program.clauses == ()


def test_extract_chain_with_hidden_neuron():
    net = CandidateNetwork.build(["A", "h", "C"], [("A", "h", 1.0), ("h", "C", 1.0)], {"A": -0.5, "h": -0.5, "C": -0.5})
    program = horn_extract(net).program
    assert {str(c) for c in program.clauses} == {"h <- A.", "C <- h."}


@given(from_seed(horn_program))
def test_kbann_roundtrip_small(program):
    result = kbann_compile(program)
    assert result.certificate.passed
    extracted = horn_extract(result.net)
    assert extracted.certificate.passed
    for m0 in _oracle.interpretations(program.atoms):
        want = _oracle.tp_fixpoint(program, m0)
        got = tp_fixpoint(extracted.program, m0).fixed_point
        assert _restrict(got, program.atoms) == want


# CILP -------------------------------------------------------------------------


def test_cilp_or_program():
    result = cilp_compile(gallery.or_program())
    assert result.certificate.passed
    report = check_semantic_encoding(result.net, result.enc, "union", gallery.or_program())
    assert _oracle.expand(report.m_n) == {frozenset({"A", "C"})}


def test_cilp_negation_as_failure():
    program = LogicProgram((Clause("A", (("B", False),)),), ("A", "B"))
    result = cilp_compile(program)
    assert tp_fixpoint(program).fixed_point == {"A"}
    assert result.certificate.passed


def test_cilp_withholds_claim_on_oscillating_program():
    result = cilp_compile(LogicProgram((Clause("A", (("A", False),)),)))
    cert = result.certificate
    assert cert["tp_identity"] and not cert["tp_converges"] and not cert.passed
    assert any("withheld" in n for n in cert.notes)


@given(from_seed(general_program, max_atoms=4, max_clauses=5))
def test_cilp_tp_identity_small(program):
    result = cilp_compile(program)
    assert result.certificate["tp_identity"]
    net, enc = result.net, result.enc
    for s in enumerate_states(net)[:: max(1, 2**net.n // 64)]:
        before = _oracle.expand(enc.interpret(s))
        after = _oracle.expand(enc.interpret(_oracle.update(net, s)))
        assert len(before) == 1
        assert after == {_oracle.tp(program, next(iter(before)))}


# Hopfield <-> penalty -------------------------------------------------------------


def _pair_net(w12, b1=0.0, b2=0.0):
    return CandidateNetwork.build(["X1", "X2"], [("X1", "X2", w12), ("X2", "X1", w12)], {"X1": b1, "X2": b2})


def test_hopfield_to_penalty_positive_weight():
    result = hopfield_to_penalty(_pair_net(1.0))
    assert [(c, str(f)) for c, f in result.kb.sentences] == [(1.0, "X1 & X2")]
    assert result.offset == 1.0 and result.certificate.passed
    for m in _oracle.interpretations(["X1", "X2"]):
        assert _oracle.penalty(result.kb, m) == (0.0 if len(m) == 2 else 1.0)


def test_hopfield_to_penalty_zero_net():
    result = hopfield_to_penalty(CandidateNetwork.build(["X1", "X2"]))
    assert result.kb.sentences == () and result.offset == 0.0


def test_hopfield_to_penalty_negative_weight_and_bias():
    result = hopfield_to_penalty(_pair_net(-2.0, b1=1.0))
    assert sorted((c, str(f)) for c, f in result.kb.sentences) == [(1.0, "X1"), (2.0, "~(X1 & X2)")]
    assert result.certificate["minima"]


def test_penalty_to_hopfield_two_sentences():
    result = penalty_to_hopfield(gallery.two_sentence_penalty_kb(1.0, 1.0))
    assert result.certificate.passed
    net = result.net
    states = enumerate_states(net)
    energy = energy_batch(net, states)
    best = states[np.isclose(energy, energy.min())]
    assert {tuple(s[: 2]) for s in best} == {(1.0, 0.0)}


def test_penalty_to_hopfield_conjunction():
    result = penalty_to_hopfield(PenaltyKB(((1.0, And((Atom("X1"), Atom("X2")))),)))
    net = result.net
    assert net.n == 2 and net.weights[0, 1] > 0
    energy = energy_batch(net, enumerate_states(net))
    assert int(np.argmin(energy)) == 3


def test_penalty_to_hopfield_empty_kb():
    result = penalty_to_hopfield(PenaltyKB(()), universe=["A", "B"])
    assert np.all(result.net.weights == 0) and np.all(result.net.biases == 0)
    assert np.all(energy_batch(result.net, enumerate_states(result.net)) == 0)


def test_penalty_to_hopfield_rejects_hard_and_wide_sentences():
    with pytest.raises(CompileError):
        penalty_to_hopfield(PenaltyKB(((math.inf, Atom("A")),)))
    wide = And(tuple(Atom(a) for a in ATOMS[:7]))
    with pytest.raises(CompileError):
        penalty_to_hopfield(PenaltyKB(((1.0, wide),)))


def test_high_degree_sentences_quadratize():
    kb = PenaltyKB(((1.0, Or(tuple(Atom(a) for a in ATOMS[:5]))), (2.0, Not(And(tuple(Atom(a) for a in ATOMS[:6]))))))
    result = penalty_to_hopfield(kb)
    assert result.certificate.passed
    assert any(label.startswith("aux") for label in result.net.labels)


@given(from_seed(lambda r: formula(r, ATOMS[:4], 3)))
def test_violation_polynomial_interpolates(f):
    atoms = ATOMS[:4]
    poly = violation_polynomial(f, atoms)
    for m in _oracle.interpretations(atoms):
        value = sum(c for s, c in poly.items() if all(atoms[j] in m for j in s))
        assert value == pytest.approx(0.0 if _oracle.holds(f, m) else 1.0, abs=1e-12)


@given(from_seed(hopfield_net, max_neurons=6))
def test_hopfield_penalty_affine_small(net):
    result = hopfield_to_penalty(net)
    assert result.certificate.passed
    states = enumerate_states(net)
    for s in states[:16]:
        m = {net.labels[i] for i in range(net.n) if s[i] == 1.0}
        assert _oracle.penalty(result.kb, m) - _oracle.energy(net, s) == pytest.approx(result.offset, abs=1e-9)


@given(from_seed(penalty_kb, max_atoms=4, max_sentence_atoms=3, max_sentences=3))
def test_penalty_hopfield_minima_small(kb):
    result = penalty_to_hopfield(kb)
    assert result.certificate.passed
