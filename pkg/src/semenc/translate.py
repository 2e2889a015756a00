"""Compilers between knowledge bases and networks, each with a checked certificate.

Every compiler returns the network together with a :class:`Certificate`
recording the exhaustive checks run on that particular instance.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .encoding import Agg, EncodingNAT, check_semantic_encoding
from .errors import CompileError
from .formula import And, Atom, Formula, Not
from .logic import (
    Clause,
    LogicProgram,
    PenaltyKB,
    is_acyclic,
    penalty_batch,
    penalty_models,
    tp_fixpoint,
    tp_step_batch,
)
from .modelset import ModelSet
from .network import (
    CandidateNetwork,
    UpdateMode,
    check_hopfield,
    compute_x_inf,
    energy_batch,
    enumerate_states,
    is_feedforward,
    step_batch,
    update_batch,
)

AFFINE_TOL = 1e-9
MAX_SENTENCE_ATOMS = 6


@dataclass(frozen=True)
class Certificate:
    """Named pass/fail checks plus free-text witnesses and notes."""

    checks: tuple[tuple[str, bool], ...] = ()
    witnesses: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def __getitem__(self, name: str) -> bool:
        for key, ok in self.checks:
            if key == name:
                return ok
        raise KeyError(name)


class _CertificateBuilder:
    def __init__(self):
        self.checks: list[tuple[str, bool]] = []
        self.witnesses: list[str] = []
        self.notes: list[str] = []

    def check(self, name: str, ok: bool, witness: str | None = None) -> bool:
        self.checks.append((name, bool(ok)))
        if not ok and witness:
            self.witnesses.append(f"{name}: {witness}")
        return bool(ok)

    def build(self) -> Certificate:
        return Certificate(tuple(self.checks), tuple(self.witnesses), tuple(self.notes))


@dataclass(frozen=True, eq=False)
class CompilationResult:
    net: CandidateNetwork
    enc: EncodingNAT
    certificate: Certificate
    offset: float = 0.0
    kb: PenaltyKB | None = None


def _fresh(prefix: str, taken: set[str]) -> str:
    k = 1
    while f"{prefix}{k}" in taken:
        k += 1
    name = f"{prefix}{k}"
    taken.add(name)
    return name


def _bits(n: int) -> np.ndarray:
    """All 2**n boolean rows, first column most significant."""
    if n == 0:
        return np.zeros((1, 0), dtype=bool)
    return np.array(list(product((False, True), repeat=n)), dtype=bool)


def _fmt_atoms(row, atoms) -> str:
    return "{" + ", ".join(a for a, v in zip(atoms, row) if v) + "}"


# ---------------------------------------------------------------------------
# KBANN


def kbann_compile(program: LogicProgram) -> CompilationResult:
    """Compile an acyclic Horn program into a feed-forward threshold network.

    One neuron per atom.  A head with a single clause of ``k`` body atoms is an
    AND gate (weights 1, bias ``-(k - 0.5)``); a head with several clauses gets
    one hidden AND neuron per clause feeding an OR gate (bias ``-0.5``).  Facts
    set the head's bias to ``+0.5``.  Atoms without clauses have bias ``-0.5``.

    The hidden OR layer delays multi-clause heads by one step, so the
    certificate checks ``i(N(x)) = T_P(i(x))`` on the states whose hidden
    neurons agree with their clause bodies (one per assignment to the atoms),
    and separately checks that the unique fixed point maps to the program's
    unique model.
    """
    if not program.is_horn:
        raise CompileError("KBANN needs a Horn program (no negated body literals)")
    if not is_acyclic(program):
        raise CompileError("KBANN needs an acyclic program")
    atoms = list(program.atoms)
    taken = set(atoms)
    labels = list(atoms)
    connections: list[tuple[str, str, float]] = []
    biases: dict[str, float] = {}
    gates: list[tuple[str, tuple[str, ...]]] = []  # hidden neuron, its body atoms
    for a in atoms:
        clauses = program.clauses_for(a)
        if any(c.is_fact for c in clauses):
            biases[a] = 0.5
        elif not clauses:
            biases[a] = -0.5
        elif len(clauses) == 1:
            body = sorted({b for b, _ in clauses[0].body})
            connections += [(b, a, 1.0) for b in body]
            biases[a] = -(len(body) - 0.5)
        else:
            biases[a] = -0.5
            for c in clauses:
                h = _fresh(f"{a}_clause", taken)
                labels.append(h)
                body = sorted({b for b, _ in c.body})
                connections += [(b, h, 1.0) for b in body]
                connections.append((h, a, 1.0))
                biases[h] = -(len(body) - 0.5)
                gates.append((h, tuple(body)))
    net = CandidateNetwork.build(labels, connections, biases, visible=atoms)
    enc = EncodingNAT.for_network(net, {a: a for a in atoms})

    cert = _CertificateBuilder()
    if gates:
        cert.notes.append("T_P identity checked on states with a settled hidden clause layer")
    col = {a: i for i, a in enumerate(atoms)}
    vis = _bits(len(atoms))
    states = np.zeros((len(vis), net.n))
    states[:, : len(atoms)] = vis
    for h, body in gates:
        states[:, net.index_of(h)] = np.all(vis[:, [col[b] for b in body]], axis=1) if body else True
    nxt = step_batch(net, states)[:, : len(atoms)].astype(bool)
    expected = tp_step_batch(program, vis, atoms)
    bad = np.nonzero(np.any(nxt != expected, axis=1))[0]
    cert.check("tp_identity", len(bad) == 0, bad.size and f"at i(x) = {_fmt_atoms(vis[bad[0]], atoms)}")

    model = tp_fixpoint(program, (), max_iters=len(atoms) + 2)
    cert.check("tp_converges", model.converged)
    report = compute_x_inf(net)
    unique = len(report.x_inf) == 1 and len(report.cycles[0]) == 1
    cert.check("unique_fixed_point", unique, f"x_inf has {len(report.x_inf)} states")
    if unique and model.converged:
        image = enc.interpret(report.x_inf[0])
        cert.check(
            "fixed_point_is_model",
            image.equals(ModelSet.from_interpretations(atoms, [model.fixed_point])),
        )
    se = check_semantic_encoding(net, enc, Agg.UNION, program, report)
    cert.check("semantic_encoding", se.is_semantic_encoding, se.witness and se.witness.describe())
    return CompilationResult(net, enc, cert.build())


# ---------------------------------------------------------------------------
# Horn extraction


@dataclass(frozen=True, eq=False)
class Extraction:
    program: LogicProgram
    certificate: Certificate


def horn_extract(net: CandidateNetwork) -> Extraction:
    """Read a Horn program off a positive-weight feed-forward threshold network.

    For every neuron ``l`` and every assignment to its inputs under which it
    fires, emit ``l <- (inputs that are on)``.  Only the neuron's fan-in is
    enumerated, which yields the same clauses as enumerating whole states.
    Clauses whose body strictly contains another clause's body for the same
    head are dropped; they never change T_P.  Atoms are the neuron labels.
    """
    if np.any(net.weights < 0):
        raise CompileError("Horn extraction needs non-negative weights")
    if not net.is_binary() or any(t.kind != "heaviside" for t in net.transfer):
        raise CompileError("Horn extraction needs binary heaviside neurons")
    if not is_feedforward(net):
        raise CompileError("Horn extraction needs a feed-forward (acyclic) network")
    labels = net.labels
    clauses: list[Clause] = []
    for l in range(net.n):
        fan_in = [j for j in range(net.n) if net.weights[j, l] > 0]
        bodies = []
        for row in _bits(len(fan_in)):
            v = float(np.dot(row, net.weights[fan_in, l])) + net.biases[l]
            if net.transfer[l](v) == 1.0:
                bodies.append(frozenset(labels[j] for j, on in zip(fan_in, row) if on))
        minimal = [b for b in set(bodies) if not any(o < b for o in bodies)]
        for body in sorted(minimal, key=lambda b: (len(b), sorted(b))):
            clauses.append(Clause(labels[l], tuple((a, True) for a in sorted(body))))
    program = LogicProgram(tuple(clauses), labels)

    cert = _CertificateBuilder()
    states = enumerate_states(net)
    expected = step_batch(net.replace(update_mode=UpdateMode()), states).astype(bool)
    got = tp_step_batch(program, states.astype(bool), labels)
    bad = np.nonzero(np.any(got != expected, axis=1))[0]
    cert.check("tp_identity", len(bad) == 0, bad.size and f"at x = {_fmt_atoms(states[bad[0]], labels)}")
    return Extraction(program, cert.build())


# ---------------------------------------------------------------------------
# CILP


def cilp_compile(program: LogicProgram) -> CompilationResult:
    """Compile a general program into a recurrent input/hidden/output network.

    Every atom gets a visible input neuron.  Each clause gets a hidden neuron
    with weight +1 from positive and -1 from negated body atoms and bias
    ``-(p - 0.5)`` for ``p`` positive literals, so it fires exactly when the
    body holds.  Each head gets an output neuron (OR gate, bias -0.5) wired
    back to the head's input neuron.  Output neurons are hidden, so the
    encoding reads the input layer only.  One update is three steps: input
    to hidden, hidden to output, output back to input.
    """
    atoms = list(program.atoms)
    taken = set(atoms)
    labels = list(atoms)
    connections: list[tuple[str, str, float]] = []
    biases: dict[str, float] = {a: -0.5 for a in atoms}
    outputs: dict[str, str] = {}
    for a in sorted(program.heads()):
        outputs[a] = _fresh(f"{a}_out", taken)
    for c in program.clauses:
        h = _fresh("clause", taken)
        labels.append(h)
        positives = 0
        for b, positive in c.body:
            connections.append((b, h, 1.0 if positive else -1.0))
            positives += positive
        biases[h] = -(positives - 0.5)
        connections.append((h, outputs[c.head], 1.0))
    for a, out in outputs.items():
        labels.append(out)
        biases[out] = -0.5
        connections.append((out, a, 1.0))
    net = CandidateNetwork.build(labels, connections, biases, visible=atoms, t_c=3)
    enc = EncodingNAT.for_network(net, {a: a for a in atoms})

    cert = _CertificateBuilder()
    states = enumerate_states(net)
    after = update_batch(net, states)[:, : len(atoms)].astype(bool)
    expected = tp_step_batch(program, states[:, : len(atoms)].astype(bool), atoms)
    bad = np.nonzero(np.any(after != expected, axis=1))[0]
    cert.check("tp_identity", len(bad) == 0, bad.size and f"at i(x) = {_fmt_atoms(states[bad[0], :len(atoms)], atoms)}")

    stuck = None
    for row in _bits(len(atoms)):
        m0 = {a for a, v in zip(atoms, row) if v}
        result = tp_fixpoint(program, m0, max_iters=2 ** len(atoms) + 1)
        if not result.converged:
            stuck = (m0, result)
            break
    if stuck is None:
        cert.check("tp_converges", True)
        se = check_semantic_encoding(net, enc, Agg.UNION, program)
        cert.check("semantic_encoding", se.is_semantic_encoding, se.witness and se.witness.describe())
    else:
        m0, result = stuck
        cycle = " -> ".join(_fmt_atoms([a in m for a in atoms], atoms) for m in result.cycle)
        cert.check("tp_converges", False, f"from {_fmt_atoms([a in m0 for a in atoms], atoms)} T_P cycles {cycle}")
        cert.notes.append("semantic-encoding claim withheld: T_P does not always converge")
    return CompilationResult(net, enc, cert.build())


# ---------------------------------------------------------------------------
# penalty logic and Hopfield energy


def _energy_minima(values: np.ndarray, tol: float = AFFINE_TOL) -> np.ndarray:
    best = values.min()
    return values <= best + tol * max(1.0, abs(best))


def _states_to_table(states: np.ndarray) -> np.ndarray:
    """Map rows (first column most significant) to model-set indices (bit i = column i)."""
    weights = 1 << np.arange(states.shape[1], dtype=np.int64)
    return states.astype(np.int64) @ weights


def hopfield_to_penalty(net: CandidateNetwork) -> CompilationResult:
    """Penalty KB whose penalty equals the Hopfield energy plus a constant.

    Positive weights become ``(w : Xi & Xj)``, negative ones
    ``(-w : ~(Xi & Xj))``; biases likewise become ``(b : Xi)`` or
    ``(-b : ~Xi)``.  ``offset`` is the sum of the positive weights and
    biases, so ``penalty(x) = E(x) + offset`` on every state.
    """
    check_hopfield(net)
    labels = net.labels
    sentences: list[tuple[float, Formula]] = []
    offset = 0.0
    for i, j in combinations(range(net.n), 2):
        w = float(net.weights[i, j])
        pair = And((Atom(labels[i]), Atom(labels[j])))
        if w > 0:
            sentences.append((w, pair))
            offset += w
        elif w < 0:
            sentences.append((-w, Not(pair)))
    for i in range(net.n):
        b = float(net.biases[i])
        if b > 0:
            sentences.append((b, Atom(labels[i])))
            offset += b
        elif b < 0:
            sentences.append((-b, Not(Atom(labels[i]))))
    kb = PenaltyKB(tuple(sentences))
    enc = EncodingNAT(tuple((labels[i], i) for i in range(net.n)))

    cert = _CertificateBuilder()
    states = enumerate_states(net)
    energy = energy_batch(net, states)
    columns = {labels[i]: states[:, i].astype(bool) for i in range(net.n)}
    pen, _ = penalty_batch(kb, columns, len(states))
    gap = pen - energy - offset
    worst = int(np.argmax(np.abs(gap)))
    cert.check("offset", abs(gap[worst]) <= AFFINE_TOL, f"p - E - offset = {gap[worst]:.3g} at state {worst}")
    table = np.zeros(2**net.n, dtype=bool)
    table[_states_to_table(states[_energy_minima(energy)])] = True
    minima = ModelSet.from_truth_table(labels, table)
    cert.check("minima", minima.equals(penalty_models(kb, labels)))
    return CompilationResult(net, enc, cert.build(), offset, kb)


def violation_polynomial(formula: Formula, atoms: Sequence[str]) -> dict[frozenset[int], float]:
    """Multilinear coefficients of ``1 - [formula]`` over the given atoms (by index).

    Obtained from the truth table by Moebius inversion over subsets.
    """
    k = len(atoms)
    idx = np.arange(2**k)
    columns = {a: (idx >> i & 1).astype(bool) for i, a in enumerate(atoms)}
    from .logic import evaluate_columns

    values = (~evaluate_columns(formula.ground(), columns, 2**k)).astype(float)
    coef = values.copy()
    for i in range(k):
        bit = 1 << i
        upper = (idx & bit) != 0
        coef[upper] -= coef[idx[upper] ^ bit]
    return {frozenset(j for j in range(k) if s >> j & 1): float(coef[s]) for s in range(2**k) if coef[s] != 0.0}


def _pairs(vars_: Sequence[int]):
    return combinations(sorted(vars_), 2)


def penalty_to_hopfield(kb: PenaltyKB, universe: Sequence[str] | None = None) -> CompilationResult:
    """Hopfield network whose hidden-minimised energy is the penalty minus a constant.

    The total violation penalty is built as a multilinear polynomial.
    Monomials of degree three or more are reduced to quadratic form with
    auxiliary units: a negative monomial ``a x1...xk`` uses
    ``min_h a h (sum x - k + 1)``; a positive one uses the symmetric
    reduction ``sum_{i<j} xi xj + min_h sum_m h_m (c_m (2m - sum x) - 1)``,
    which needs one auxiliary unit up to degree 4 and two for degrees 5 and 6.
    The net's ``offset`` is ``min_hidden E(x) - penalty(x)``.
    """
    for c, _ in kb.sentences:
        if math.isinf(c):
            raise CompileError("hard (infinite-confidence) sentences cannot be compiled to energy")
    universe = tuple(sorted(kb.atoms())) if universe is None else tuple(universe)
    col = {a: i for i, a in enumerate(universe)}
    poly: dict[frozenset[int], float] = {}
    for c, f in kb.sentences:
        atoms = sorted(f.atoms(), key=col.__getitem__)
        if len(atoms) > MAX_SENTENCE_ATOMS:
            raise CompileError(f"sentence {f} mentions {len(atoms)} atoms; the cap is {MAX_SENTENCE_ATOMS}")
        for subset, a in violation_polynomial(f, atoms).items():
            key = frozenset(col[atoms[j]] for j in subset)
            poly[key] = poly.get(key, 0.0) + c * a

    n = len(universe)
    constant = 0.0
    linear: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}
    aux = 0

    def add_lin(i, v):
        linear[i] = linear.get(i, 0.0) + v

    def add_quad(i, j, v):
        key = (min(i, j), max(i, j))
        quad[key] = quad.get(key, 0.0) + v

    for mono, a in sorted(poly.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        if abs(a) < 1e-15:
            continue
        vars_ = sorted(mono)
        d = len(vars_)
        if d == 0:
            constant += a
        elif d == 1:
            add_lin(vars_[0], a)
        elif d == 2:
            add_quad(vars_[0], vars_[1], a)
        elif a < 0:
            h = n + aux
            aux += 1
            add_lin(h, -a * (d - 1))
            for i in vars_:
                add_quad(i, h, a)
        else:
            for i, j in _pairs(vars_):
                add_quad(i, j, a)
            units = (d - 1) // 2
            for m in range(1, units + 1):
                c_m = 1 if (d % 2 == 1 and m == units) else 2
                h = n + aux
                aux += 1
                add_lin(h, a * (2 * m * c_m - 1))
                for i in vars_:
                    add_quad(i, h, -a * c_m)

    size = n + aux
    weights = np.zeros((size, size))
    biases = np.zeros(size)
    for i, v in linear.items():
        biases[i] = -v
    for (i, j), v in quad.items():
        weights[i, j] = weights[j, i] = -v
    labels = list(universe)
    taken = set(labels)
    labels += [_fresh("aux", taken) for _ in range(aux)]
    net = CandidateNetwork(
        weights=weights,
        biases=biases,
        transfer="heaviside",
        domains=None,
        visible=tuple(range(n)) if n else (0,),
        update_mode=UpdateMode.sweep(),
        labels=tuple(labels),
    )
    enc = EncodingNAT(tuple((a, i) for i, a in enumerate(universe)))

    cert = _CertificateBuilder()
    vis = _bits(n).astype(float)
    energy = _min_over_hidden(net, vis, n)
    columns = {a: vis[:, i].astype(bool) for i, a in enumerate(universe)}
    pen, _ = penalty_batch(kb, columns, len(vis))
    gap = energy - pen
    offset = float(gap[0]) if len(gap) else 0.0
    spread = float(np.max(np.abs(gap - offset))) if len(gap) else 0.0
    cert.check("affine", spread <= AFFINE_TOL, f"min-over-hidden energy minus penalty varies by {spread:.3g}")
    table = np.zeros(2**n, dtype=bool)
    table[_states_to_table(vis[_energy_minima(energy)])] = True
    minima = ModelSet.from_truth_table(universe, table)
    cert.check("minima", minima.equals(penalty_models(kb, universe)))
    if aux:
        cert.notes.append(f"{aux} auxiliary unit(s) for monomials of degree >= 3")
    return CompilationResult(net, enc, cert.build(), offset)


def _min_over_hidden(net: CandidateNetwork, visible_states: np.ndarray, n: int) -> np.ndarray:
    """Energy of each visible state minimised over the auxiliary units."""
    hidden = list(range(n, net.n))
    w, b = net.weights, net.biases
    vis = visible_states
    base = -0.5 * np.einsum("mi,ij,mj->m", vis, w[:n, :n], vis) - vis @ b[:n]
    if not hidden:
        return base
    if not np.any(w[np.ix_(hidden, hidden)]):
        # uncoupled auxiliaries: each contributes min(0, -(b_h + sum_i w_ih x_i))
        field_ = vis @ w[:n, hidden] + b[hidden]
        return base + np.minimum(0.0, -field_).sum(axis=1)
    best = np.full(len(vis), np.inf)
    for row in _bits(len(hidden)).astype(float):
        full = np.hstack([vis, np.tile(row, (len(vis), 1))])
        best = np.minimum(best, energy_batch(net, full))
    return best


__all__ = [
    "Certificate",
    "CompilationResult",
    "Extraction",
    "kbann_compile",
    "horn_extract",
    "cilp_compile",
    "hopfield_to_penalty",
    "penalty_to_hopfield",
    "violation_polynomial",
]
