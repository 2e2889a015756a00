import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

import _oracle
from _gen import binary_net, formula, from_seed, permuted, seeds
from semenc import gallery
from semenc.encoding import (
    Agg,
    DatTriple,
    EncodingDAT,
    EncodingNAT,
    TableEncoding,
    check_logical_classifier,
    check_neural_model,
    check_semantic_encoding,
    models_of_network,
    transport_encoding,
    validate_encoding,
)
from semenc.errors import TransportError, UniverseMismatch
from semenc.formula import And, Atom, Const, Not, Or
from semenc.modelset import ModelSet
from semenc.network import CandidateNetwork, TransferFn, compute_x_inf, enumerate_states

AB = ("A", "B")


def test_nat_interprets_state():
    cube = gallery.equivalence_encoding().interpret((0, 1))
    assert _oracle.expand(cube) == {frozenset({"B"})}


def test_dat_interprets_state():
    cube = gallery.relational_or_encoding().interpret((1, 1, 0, 0))
    atoms = gallery.relational_atoms()
    want = {frozenset(m) | set() for m in _oracle.interpretations(atoms) if "R1(a)" not in m and "R2(a)" not in m}
    assert _oracle.expand(cube) == want


def test_no_housed_atoms_is_unconstrained():
    enc = EncodingNAT((), universe=("A", "B"))
    assert enc.interpret((1,)).count() == 4


def test_union_on_oscillator():
    net, enc = gallery.equivalence_oscillator(), gallery.equivalence_encoding()
    assert models_of_network(net, enc, Agg.UNION).equals(ModelSet.from_interpretations(AB, [(), AB]))


def test_intersection_on_relational_net():
    m_n = models_of_network(gallery.relational_or_network(), gallery.relational_or_encoding(), Agg.INTERSECTION)
    want = {frozenset(a for a in gallery.relational_atoms() if not a.endswith("(d)"))}
    assert _oracle.expand(m_n) == want


def test_intersection_of_contradictory_cubes_is_empty():
    m_n = models_of_network(gallery.equivalence_oscillator(), gallery.equivalence_encoding(), Agg.INTERSECTION)
    assert m_n.is_empty()


def test_oscillator_is_semantic_encoding():
    report = check_semantic_encoding(
        gallery.equivalence_oscillator(), gallery.equivalence_encoding(), "union", gallery.equivalence_kb()
    )
    assert report.is_neural_model and report.is_semantic_encoding and report.witness is None


def test_relational_is_semantic_encoding():
    report = check_semantic_encoding(
        gallery.relational_or_network(), gallery.relational_or_encoding(), "intersection", gallery.relational_kb()
    )
    assert report.is_semantic_encoding


def test_neural_model_failure_has_a_cycle_state_witness():
    kb = [And((Atom("A"), Not(Atom("B"))))]
    report = check_neural_model(gallery.equivalence_oscillator(), gallery.equivalence_encoding(), "union", kb)
    assert not report.is_neural_model
    # both cycle states map outside the models; either is a valid witness
    assert report.witness.kind == "state" and report.witness.state in {(0.0, 0.0), (1.0, 1.0)}


def test_empty_kb_accepts_any_believing_net():
    report = check_neural_model(gallery.equivalence_oscillator(), gallery.equivalence_encoding(), "union", [])
    assert report.is_neural_model


def test_proper_subset_is_neural_model_only():
    net = CandidateNetwork.build(AB, biases={"A": 1.0, "B": 1.0})
    report = check_semantic_encoding(net, EncodingNAT({"A": 0, "B": 1}), "union", gallery.equivalence_kb())
    assert report.is_neural_model and not report.is_semantic_encoding
    assert report.witness.kind == "missing" and report.witness.interpretation == frozenset()


def test_unhoused_kb_atom_is_an_error():
    with pytest.raises(UniverseMismatch):
        check_neural_model(gallery.equivalence_oscillator(), gallery.equivalence_encoding(), "union", [Atom("C")])


def test_validate_relational_tables():
    assert validate_encoding(gallery.relational_or_encoding(), gallery.relational_or_network()).ok


def test_nat_two_atoms_on_one_neuron():
    diag = validate_encoding(EncodingNAT((("A", 0), ("B", 0))), gallery.equivalence_oscillator())
    assert not diag.ok and any("share neuron" in v for v in diag.violations)


def test_dat_colliding_atoms():
    triple = DatTriple(
        [("P", (0,)), ("Q", (0,))],
        [("P", (1.0,)), ("Q", (1.0,))],
        [("P", 1), ("Q", 1)],
    )
    net = CandidateNetwork.build(["s", "v"])
    diag = validate_encoding(EncodingDAT(1, (triple,)), net)
    assert any("share pattern and value neuron" in v for v in diag.violations)


def _nat_on_visible(net):
    return EncodingNAT(tuple((f"a{k}", i) for k, i in enumerate(net.visible)))


@given(from_seed(binary_net))
def test_visible_equivalent_states_share_images(net):
    enc = _nat_on_visible(net)
    assert validate_encoding(enc, net).ok
    images = {}
    for s in enumerate_states(net):
        key = tuple(s[list(net.visible)])
        images.setdefault(key, set()).add(frozenset(_oracle.expand(enc.interpret(s))))
    assert all(len(v) == 1 for v in images.values())


@given(from_seed(binary_net))
def test_aggregation_matches_expansion(net):
    enc = _nat_on_visible(net)
    cubes = [_oracle.expand(enc.interpret(s)) for s in _oracle.x_inf(net)]
    union = set().union(*cubes)
    inter = set(cubes[0]).intersection(*cubes[1:])
    assert _oracle.expand(models_of_network(net, enc, "union")) == union
    assert _oracle.expand(models_of_network(net, enc, "intersection")) == inter


@given(from_seed(binary_net), seeds, st.sampled_from(["union", "intersection"]))
def test_semantic_encoding_implies_neural_model(net, seed, agg):
    enc = _nat_on_visible(net)
    rng = random.Random(seed)
    kb = [formula(rng, enc.universe, 2)]
    report = check_semantic_encoding(net, enc, agg, kb)
    assert (not report.is_semantic_encoding) or report.is_neural_model
    m_n = _oracle.expand(report.m_n)
    m_l = _oracle.models(kb, enc.universe)
    assert report.is_neural_model == (bool(m_n) and m_n <= m_l)
    # an unsatisfiable kb is matched by a net with no beliefs, but that net is no neural model
    assert report.is_semantic_encoding == (bool(m_n) and m_n == m_l)


# classifiers ----------------------------------------------------------------


def _or_classifier():
    return CandidateNetwork.build(["x1", "x2", "y"], [("x1", "y", 1.0), ("x2", "y", 1.0)], {"y": -0.5})


def _g_in(s):
    return {a for a, v in zip(AB, s) if v == 1.0}


def test_or_net_classifies_disjunction():
    check = check_logical_classifier(_or_classifier(), ["x1", "x2"], "y", _g_in, Or((Atom("A"), Atom("B"))))
    assert check.implements and check.semantic_encoding.is_semantic_encoding


def test_or_net_is_not_a_conjunction():
    check = check_logical_classifier(_or_classifier(), ["x1", "x2"], "y", _g_in, And((Atom("A"), Atom("B"))))
    assert not check.implements
    assert check.counterexample in {(1.0, 0.0), (0.0, 1.0)}


def test_constant_output_classifies_top():
    net = CandidateNetwork.build(["x1", "y"], biases={"y": 1.0})
    check = check_logical_classifier(net, ["x1"], "y", lambda s: {"A"} if s[0] else set(), Const(True), universe=["A"])
    assert check.implements


# transport ------------------------------------------------------------------


KB_BATTERY = [
    [],
    [Atom("a0")],
    [Not(Atom("a0"))],
    [Or((Atom("a0"), Not(Atom("a0"))))],
]


@given(from_seed(binary_net, max_neurons=5), seeds)
def test_permutation_transport_preserves_reports(net, seed):
    rng = random.Random(seed)
    perm = list(range(net.n))
    rng.shuffle(perm)
    net2 = permuted(net, perm)
    enc2 = EncodingNAT(tuple((f"a{k}", perm[i]) for k, i in enumerate(net.visible)))

    def f(s):
        out = [0.0] * net.n
        for i, p in enumerate(perm):
            out[p] = s[i]
        return tuple(out)

    enc1 = transport_encoding(net, net2, f, enc2)
    for kb in KB_BATTERY:
        for agg in ("union", "intersection"):
            r1 = check_semantic_encoding(net, enc1, agg, kb)
            r2 = check_semantic_encoding(net2, enc2, agg, kb)
            assert (r1.is_neural_model, r1.is_semantic_encoding) == (r2.is_neural_model, r2.is_semantic_encoding)
            assert r1.m_n.equals(r2.m_n)


def _swap_net():
    return CandidateNetwork.build(AB, [("A", "B", 1.0), ("B", "A", 1.0)], {"A": -0.5, "B": -0.5})


def _packed_net(table):
    return CandidateNetwork.build(
        ["v"], [("v", "v", 1.0)], transfer=TransferFn.lookup(table), domains=[(0.0, 1.0, 2.0, 3.0)]
    )


def _packed_encoding():
    table = {
        (float(v),): ModelSet.from_interpretations(AB, [{a for a, bit in zip(AB, (v >> 1, v & 1)) if bit}])
        for v in range(4)
    }
    return TableEncoding(AB, table)


def _pack(s):
    return (2 * s[0] + s[1],)


def test_packed_transport_matches():
    net1 = _swap_net()
    net2 = _packed_net({0: 0, 1: 2, 2: 1, 3: 3})
    enc1 = transport_encoding(net1, net2, _pack, _packed_encoding())
    for kb in ([], gallery.equivalence_kb(), [Atom("A")], [Or((Atom("A"), Atom("B")))]):
        r1 = check_semantic_encoding(net1, enc1, "union", kb)
        r2 = check_semantic_encoding(net2, _packed_encoding(), "union", kb)
        assert r1.m_n.equals(r2.m_n) and r1.is_semantic_encoding == r2.is_semantic_encoding


def test_non_conjugate_map_rejected_with_witness():
    with pytest.raises(TransportError) as info:
        transport_encoding(_swap_net(), _packed_net({0: 0, 1: 2, 2: 1, 3: 0}), _pack, _packed_encoding())
    assert info.value.witness == (1.0, 1.0)


def test_non_injective_map_rejected():
    with pytest.raises(TransportError):
        transport_encoding(_swap_net(), _packed_net({0: 0, 1: 2, 2: 1, 3: 3}), lambda s: (0.0,), _packed_encoding())


def test_transported_table_covers_every_state():
    net1 = _swap_net()
    enc1 = transport_encoding(net1, _packed_net({0: 0, 1: 2, 2: 1, 3: 3}), _pack, _packed_encoding())
    assert validate_encoding(enc1, net1).ok
    assert np.array_equal(compute_x_inf(net1).x_inf_index, np.arange(4))
