"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line (shown in the terminal summary)
before asserting.  Library results are checked against the brute-force
oracles in ``_oracle`` wherever a second route exists.
"""
import itertools
import math
import random
import time
import warnings

import pytest

import _oracle
from _gen import (
    ATOMS,
    binary_net,
    formula,
    general_program,
    hopfield_net,
    horn_program,
    layered_net,
    penalty_kb,
    permuted,
)
from semenc import gallery
from semenc.encoding import EncodingNAT, check_semantic_encoding, models_of_network, transport_encoding, validate_encoding
from semenc.formula import Atom, Not, Or
from semenc.fuzzy import fid_fuzzy_network
from semenc.logic import models_of, penalty, penalty_models, tp_fixpoint
from semenc.network import compute_x_inf, enumerate_states, trajectory, update
from semenc.stochastic import (
    SemanticLossWarning,
    embed_deterministic,
    expected_satisfaction,
    fid_prob,
    limiting_distribution,
    semantic_loss,
)
from semenc.translate import cilp_compile, hopfield_to_penalty, horn_extract, kbann_compile, penalty_to_hopfield

LINES: dict[int, str] = {}

EXACT = 1e-12
AFFINE_TOL = 1e-9
LOSS_TOL = 1e-12
AVERAGE_TOL = 1e-9
TRAJECTORY_BUDGET_S = 1e-3
KBANN_BUDGET_S = 30.0
CILP_BUDGET_S = 60.0


def record(n: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}  {title}" + (f"  [{detail}]" if detail else "")
    LINES[n] = line
    print(line)
    assert ok, line


def _ints(states):
    return {tuple(int(v) for v in s) for s in states}


def _restrict(m, atoms):
    return frozenset(a for a in m if a in atoms)


# worked examples ----------------------------------------------------------------


def test_criterion_01_or_program_trajectory():
    net = gallery.or_program_network()
    start = (0, 1, 0, 1)
    want = [(1, 0, 1, 0), (1, 0, 1, 1), (1, 0, 1, 1)]
    got = [tuple(int(v) for v in s) for s in trajectory(net, start, 3)[1:]]
    s, oracle = start, []
    for _ in range(3):
        s = _oracle.update(net, s)
        oracle.append(tuple(int(v) for v in s))
    best = math.inf
    for _ in range(50):
        t0 = time.perf_counter()
        trajectory(net, start, 3)
        best = min(best, time.perf_counter() - t0)
    ok = got == want == oracle and got[-1] == got[-2] and best < TRAJECTORY_BUDGET_S
    record(1, "or-program trajectory reaches its fixed point", ok, f"{got}, {best * 1e3:.3f} ms")


def test_criterion_02_rotation():
    identity = gallery.rotation_network(3)
    shift = gallery.rotation_network(1)
    states = [tuple(map(float, s)) for s in itertools.product((0, 1), repeat=3)]
    ok_id = all(update(identity, s) == s == _oracle.update(identity, s) for s in states)
    ok_shift = all(update(shift, s) == (s[2], s[0], s[1]) == _oracle.update(shift, s) for s in states)
    record(2, "rotation net: t_c=3 identity, t_c=1 shift", ok_id and ok_shift, f"{len(states)} states")


def test_criterion_03_oscillator_encodes_equivalence():
    net, enc, kb = gallery.equivalence_oscillator(), gallery.equivalence_encoding(), gallery.equivalence_kb()
    report = compute_x_inf(net)
    x_inf = _ints(report.x_inf)
    m_n = models_of_network(net, enc, "union", report)
    verdict = check_semantic_encoding(net, enc, "union", kb, report)
    ok = (
        x_inf == {(0, 0), (1, 1)} == _ints(_oracle.x_inf(net))
        and len(report.cycles) == 1
        and len(report.cycles[0]) == 2
        and m_n.equals(models_of(kb, ("A", "B")))
        and _oracle.expand(m_n) == _oracle.models(kb, ("A", "B"))
        and verdict.is_semantic_encoding
    )
    record(3, "oscillator x_inf is one 2-cycle and encodes A <-> B", ok, f"x_inf={sorted(x_inf)}")


def test_criterion_04_distributed_encoding():
    net, enc, kb = gallery.relational_or_network(), gallery.relational_or_encoding(), gallery.relational_kb()
    report = compute_x_inf(net)
    x_inf = _ints(report.x_inf)
    want_states = {(0, 0, 0, 0), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, 1)}
    m_n = models_of_network(net, enc, "intersection", report)
    want_model = frozenset(a for a in gallery.relational_atoms() if not a.endswith("(d)"))
    ok = (
        x_inf == want_states == _ints(_oracle.x_inf(net))
        and _oracle.expand(m_n) == {want_model}
        and _oracle.models(kb, gallery.relational_atoms()) == {want_model}
        and validate_encoding(enc, net).ok
        and check_semantic_encoding(net, enc, "intersection", kb, report).is_semantic_encoding
    )
    record(4, "distributed encoding, intersection gives the unique model", ok, f"{len(x_inf)} x_inf states")


def test_criterion_05_fuzzy_fidelity():
    net, enc, kb = gallery.equivalence_oscillator(), gallery.equivalence_encoding(), gallery.oscillator_fuzzy_kb()
    value = fid_fuzzy_network(net, enc, kb, "union", "min").value
    oracle = min(
        min(1.0 - _oracle.distance(_oracle.fuzzy_value(s.formula, v), s.lower, s.upper) for s in kb)
        for v in ({"A": 0.0, "B": 0.0}, {"A": 1.0, "B": 1.0})
    )
    ok = abs(value - 0.25) <= EXACT and abs(oracle - 0.25) <= EXACT
    record(5, "fuzzy fidelity with min aggregation", ok, f"{value:.12g}")


@pytest.mark.xfail(
    strict=True,
    reason="the stated target is the mass of the two violating states (0.16 + 0.21); "
    "the satisfying mass is 0.63",
)
def test_criterion_06_probabilistic_fidelity():
    snet, enc, kb = gallery.bernoulli_pair_net(), gallery.bernoulli_pair_encoding(), gallery.exactly_one_kb()
    dist = limiting_distribution(snet)
    both_on = sum(dist.mass((x, 1, 1)) for x in (0, 1))
    both_off = sum(dist.mass((x, 0, 0)) for x in (0, 1))
    value = fid_prob(dist, enc, kb).value
    joint = _oracle.layered_joint(snet)
    oracle = sum(float(p) for s, p in joint.items() if s[1] != s[2])
    masses_ok = abs(both_on - 0.16) <= EXACT and abs(both_off - 0.21) <= EXACT
    routes_agree = abs(value - oracle) <= EXACT
    ok = masses_ok and routes_agree and abs(value - 0.37) <= EXACT
    record(
        6,
        "probabilistic fidelity equals 0.37",
        ok,
        f"value={value:.12g}, masses 0.16/0.21 {'ok' if masses_ok else 'off'}, oracle={oracle:.12g}",
    )


def test_criterion_07_penalty_table():
    ok = True
    rows = []
    for c1, c2 in ((1.0, 1.0), (3.0, 2.0)):
        kb = gallery.two_sentence_penalty_kb(c1, c2)
        table = [penalty(kb, m) for m in ((), ("A",), ("A", "B"), ("B",))]
        oracle = [_oracle.penalty(kb, set(m)) for m in ((), ("A",), ("A", "B"), ("B",))]
        ok &= table == oracle == [c1, 0.0, c2, c2]
        ok &= _oracle.expand(penalty_models(kb, ("A", "B"))) == {frozenset({"A"})} == _oracle.penalty_minima(kb, ("A", "B"))
        rows.append(f"({c1:g},{c2:g}) -> {table}")
    record(7, "penalty table and penalty models", ok, "; ".join(rows))


# property suites ---------------------------------------------------------------------


def test_criterion_08_kbann_suite():
    t0 = time.perf_counter()
    failures = []
    for seed in range(200):
        program = horn_program(random.Random(seed), max_atoms=8)
        result = kbann_compile(program)
        extracted = horn_extract(result.net)
        ok = result.certificate.passed and extracted.certificate.passed
        for m0 in _oracle.interpretations(program.atoms):
            if not ok:
                break
            got = tp_fixpoint(extracted.program, m0).fixed_point
            ok = got is not None and _restrict(got, program.atoms) == _oracle.tp_fixpoint(program, m0)
        if not ok:
            failures.append(seed)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < KBANN_BUDGET_S
    record(8, "200 acyclic Horn programs: compile and extract", ok, f"failing seeds {failures[:5]}, {elapsed:.1f} s")


def _tp_cycle_models(program):
    """Interpretations lying on a cycle of T_P, by direct iteration."""
    on_cycle = set()
    for m in _oracle.interpretations(program.atoms):
        seen = []
        while m not in seen:
            seen.append(m)
            m = _oracle.tp(program, m)
        on_cycle.update(seen[seen.index(m):])
    return on_cycle


def test_criterion_09_cilp_suite():
    t0 = time.perf_counter()
    failures = []
    compared = 0
    for seed in range(200):
        rng = random.Random(seed)
        program = general_program(rng, max_atoms=6)
        result = cilp_compile(program)
        net, cert = result.net, result.certificate
        n_atoms = len(program.atoms)
        ok = cert["tp_identity"]
        # second route: oracle updates from every atom assignment, hidden units all-off and random
        for bits in itertools.product((0.0, 1.0), repeat=n_atoms):
            m = frozenset(a for a, b in zip(program.atoms, bits) if b)
            for hidden in ((0.0,) * (net.n - n_atoms), tuple(float(rng.random() < 0.5) for _ in range(net.n - n_atoms))):
                after = _oracle.update(net, bits + hidden)
                ok &= frozenset(a for a, v in zip(program.atoms, after) if v) == _oracle.tp(program, m)
        cycles = _tp_cycle_models(program)
        converges = cycles == _oracle.supported_models(program)
        ok &= cert["tp_converges"] == converges
        if converges:
            compared += 1
            brute = bool(cycles) and cycles == _oracle.supported_models(program)
            ok &= cert["semantic_encoding"] == brute
        if not ok:
            failures.append(seed)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < CILP_BUDGET_S
    record(
        9,
        "200 general programs: one update is T_P; verdicts match brute force",
        ok,
        f"{compared} convergent, failing seeds {failures[:5]}, {elapsed:.1f} s",
    )


def _hopfield_to_penalty_ok(net) -> bool:
    result = hopfield_to_penalty(net)
    states = enumerate_states(net)
    labels = net.labels
    gaps, energies, scores = [], [], {}
    for s in states:
        m = frozenset(labels[i] for i in range(net.n) if s[i] == 1.0)
        e = _oracle.energy(net, tuple(s))
        p = _oracle.penalty(result.kb, m)
        gaps.append(p - e)
        energies.append((e, m))
        scores[m] = p
    affine = max(gaps) - min(gaps) <= AFFINE_TOL and abs(gaps[0] - result.offset) <= AFFINE_TOL
    low = min(e for e, _ in energies)
    energy_minima = {m for e, m in energies if e - low <= AFFINE_TOL}
    library_minima = _oracle.expand(penalty_models(result.kb, labels))
    return result.certificate.passed and affine and energy_minima == library_minima == _oracle.penalty_minima(result.kb, labels)


def _penalty_to_hopfield_ok(kb) -> bool:
    result = penalty_to_hopfield(kb)
    net, enc = result.net, result.enc
    universe = enc.universe
    cols = [i for _, i in enc.atom_neuron]
    best: dict[frozenset, float] = {}
    for s in _oracle.all_states(net):
        m = frozenset(a for a, i in zip(universe, cols) if s[i] == 1.0)
        e = _oracle.energy(net, s)
        best[m] = min(best.get(m, math.inf), e)
    gaps = [best[m] - _oracle.penalty(kb, m) for m in best]
    affine = max(gaps) - min(gaps) <= AFFINE_TOL and abs(gaps[0] - result.offset) <= AFFINE_TOL
    low = min(best.values())
    minima = {m for m, e in best.items() if e - low <= AFFINE_TOL}
    library = _oracle.expand(penalty_models(kb, universe))
    return result.certificate.passed and affine and minima == library == _oracle.penalty_minima(kb, universe)


def test_criterion_10_hopfield_penalty_suite():
    forward = [s for s in range(100) if not _hopfield_to_penalty_ok(hopfield_net(random.Random(s), max_neurons=10))]
    reverse = [
        s
        for s in range(100)
        if not _penalty_to_hopfield_ok(penalty_kb(random.Random(s), max_atoms=5, max_sentence_atoms=4))
    ]
    record(
        10,
        "100 Hopfield nets and 100 penalty KBs: energy affine to penalty, same minima",
        not forward and not reverse,
        f"failing seeds {forward[:5]} / {reverse[:5]}",
    )


def test_criterion_11_semantic_loss_identity():
    bad_loss, bad_avg = [], []
    for seed in range(100):
        rng = random.Random(seed)
        atoms = ATOMS[: rng.randint(1, 6)]
        kb = [formula(rng, atoms, 2) for _ in range(rng.randint(1, 3))]
        p = [rng.choice((0.0, 1.0, round(rng.random(), 4), rng.random())) for _ in atoms]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SemanticLossWarning)
            loss = semantic_loss(kb, p, atoms).loss
        if abs(math.exp(-loss) - _oracle.satisfaction_probability(kb, atoms, p)) > LOSS_TOL:
            bad_loss.append(seed)

        snet = layered_net(rng)
        outputs = [a.upper() for a in snet.output_labels]
        out_kb = [formula(rng, outputs, 2)]
        enc = EncodingNAT({a: len(snet.input_labels) + j for j, a in enumerate(outputs)}, universe=tuple(outputs))
        averaged = 0.0
        for (x, px), (_, probs) in zip(snet.input_distribution, snet.output_probabilities):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SemanticLossWarning)
                averaged += px * math.exp(-semantic_loss(out_kb, list(probs), outputs).loss)
        fid = fid_prob(snet, enc, out_kb).value
        if abs(averaged - fid) > AVERAGE_TOL or abs(expected_satisfaction(snet, out_kb, outputs) - fid) > AVERAGE_TOL:
            bad_avg.append(seed)
    record(
        11,
        "semantic loss is minus log satisfaction probability; its average is fid_prob",
        not bad_loss and not bad_avg,
        f"failing seeds {bad_loss[:5]} / {bad_avg[:5]}",
    )


KB_BATTERY = [
    [],
    [Atom("a0")],
    [Not(Atom("a0"))],
    [Or((Atom("a0"), Not(Atom("a0"))))],
    [Or((Atom("a0"), Atom("a1")))],
]


def test_criterion_12_transport():
    failures = []
    for seed in range(50):
        rng = random.Random(seed)
        net = binary_net(rng, max_neurons=6)
        while len(net.visible) < 2:
            net = binary_net(rng, max_neurons=6)
        perm = list(range(net.n))
        rng.shuffle(perm)
        net2 = permuted(net, perm)
        enc2 = EncodingNAT(tuple((f"a{k}", perm[i]) for k, i in enumerate(net.visible)))

        def f(s, perm=perm, n=net.n):
            out = [0.0] * n
            for i, p in enumerate(perm):
                out[p] = s[i]
            return tuple(out)

        enc1 = transport_encoding(net, net2, f, enc2)
        same = True
        for kb in KB_BATTERY:
            for agg in ("union", "intersection"):
                r1 = check_semantic_encoding(net, enc1, agg, kb)
                r2 = check_semantic_encoding(net2, enc2, agg, kb)
                same &= (r1.is_neural_model, r1.is_semantic_encoding) == (r2.is_neural_model, r2.is_semantic_encoding)
                same &= r1.m_n.equals(r2.m_n)
        if not same:
            failures.append(seed)
    record(12, "50 permuted nets: transported encodings give identical verdicts", not failures, f"failing seeds {failures[:5]}")


def _corpus():
    yield "oscillator", gallery.equivalence_oscillator()
    yield "or program", gallery.or_program_network()
    yield "rotation t_c=3", gallery.rotation_network(3)
    yield "rotation t_c=1", gallery.rotation_network(1)
    yield "relational", gallery.relational_or_network()
    for seed in range(100):
        yield f"random {seed}", binary_net(random.Random(seed))


def test_criterion_13_deterministic_embedding():
    failures = []
    count = 0
    for name, net in _corpus():
        count += 1
        support = set(limiting_distribution(embed_deterministic(net)).x_p_inf)
        if not (support == set(compute_x_inf(net).x_inf) == _oracle.x_inf(net)):
            failures.append(name)
    record(13, "embedded chain support equals x_inf on the corpus", not failures, f"{count} nets, failing {failures[:5]}")
