"""Random instance generators shared by the property tests and the acceptance suite.

Every generator takes a ``random.Random`` so a seed reproduces the instance.
"""
from __future__ import annotations

import itertools
import random

import numpy as np
from hypothesis import strategies as st

from semenc.formula import And, Atom, Iff, Implies, Not, Or
from semenc.logic import Clause, LogicProgram, PenaltyKB
from semenc.modelset import ModelSet
from semenc.network import CandidateNetwork, TransferFn, UpdateMode
from semenc.stochastic import LayeredStochasticNet

ATOMS = tuple("ABCDEFGHIJKL")


def formula(rng: random.Random, atoms, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        a = Atom(rng.choice(atoms))
        return Not(a) if rng.random() < 0.3 else a
    kind = rng.choice(("and", "or", "not", "implies", "iff"))
    if kind == "not":
        return Not(formula(rng, atoms, depth - 1))
    if kind in ("implies", "iff"):
        cls = Implies if kind == "implies" else Iff
        return cls(formula(rng, atoms, depth - 1), formula(rng, atoms, depth - 1))
    parts = tuple(formula(rng, atoms, depth - 1) for _ in range(rng.randint(2, 3)))
    return And(parts) if kind == "and" else Or(parts)


def horn_program(rng: random.Random, max_atoms: int = 8, max_clauses: int = 10, acyclic: bool = True) -> LogicProgram:
    n = rng.randint(1, max_atoms)
    atoms = ATOMS[:n]
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        h = rng.randrange(n)
        pool = list(range(h)) if acyclic else list(range(n))
        k = rng.randint(0, min(3, len(pool)))
        body = rng.sample(pool, k)
        clauses.append(Clause(atoms[h], tuple((atoms[j], True) for j in body)))
    return LogicProgram(tuple(clauses), atoms)


def general_program(rng: random.Random, max_atoms: int = 6, max_clauses: int = 8) -> LogicProgram:
    n = rng.randint(1, max_atoms)
    atoms = ATOMS[:n]
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        h = rng.randrange(n)
        k = rng.randint(0, min(3, n))
        body = rng.sample(range(n), k)
        clauses.append(Clause(atoms[h], tuple((atoms[j], rng.random() < 0.6) for j in body)))
    return LogicProgram(tuple(clauses), atoms)


def binary_net(rng: random.Random, max_neurons: int = 6, mode: str | None = None) -> CandidateNetwork:
    n = rng.randint(1, max_neurons)
    w = np.array([[rng.choice((-2, -1, -0.5, 0, 0, 0.5, 1, 2)) for _ in range(n)] for _ in range(n)], dtype=float)
    b = np.array([rng.choice((-1.5, -1, -0.5, 0, 0.5, 1)) for _ in range(n)], dtype=float)
    mode = mode or rng.choice(("synchronous", "sweep", "random"))
    update = {"synchronous": UpdateMode.synchronous(), "sweep": UpdateMode.sweep(), "random": UpdateMode.random(rng.randrange(1000))}[mode]
    visible = sorted(rng.sample(range(n), rng.randint(1, n)))
    return CandidateNetwork(
        weights=w,
        biases=b,
        transfer=TransferFn("heaviside"),
        domains=None,
        visible=tuple(visible),
        t_c=rng.randint(1, 2),
        update_mode=update,
    )


def hopfield_net(rng: random.Random, max_neurons: int = 10) -> CandidateNetwork:
    n = rng.randint(1, max_neurons)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.6:
                w[i, j] = w[j, i] = rng.choice((-3, -2, -1, -0.5, 0.5, 1, 2, 3))
    b = np.array([rng.choice((-2, -1, -0.5, 0, 0.5, 1, 2)) for _ in range(n)], dtype=float)
    return CandidateNetwork(w, b, TransferFn("heaviside"), None, tuple(range(n)), 1, UpdateMode.sweep())


def penalty_kb(rng: random.Random, max_atoms: int = 5, max_sentence_atoms: int = 4, max_sentences: int = 4) -> PenaltyKB:
    n = rng.randint(1, max_atoms)
    atoms = ATOMS[:n]
    sentences = []
    for _ in range(rng.randint(1, max_sentences)):
        pool = rng.sample(atoms, rng.randint(1, min(max_sentence_atoms, n)))
        f = formula(rng, pool, depth=2)
        sentences.append((rng.choice((0.5, 1.0, 1.5, 2.0, 3.0)), f))
    return PenaltyKB(tuple(sentences))


def permuted(net: CandidateNetwork, perm) -> CandidateNetwork:
    """Relabel neurons: neuron i of ``net`` becomes neuron perm[i]."""
    n = net.n
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    w = np.array(net.weights)[np.ix_(inv, inv)]
    b = np.array(net.biases)[inv]
    mode = net.update_mode
    if mode.kind != "synchronous":
        mode = UpdateMode.sweep(tuple(perm[i] for i in net.visit_order))
    return CandidateNetwork(
        w,
        b,
        tuple(net.transfer[i] for i in inv),
        tuple(net.domains[i] for i in inv),
        tuple(sorted(perm[i] for i in net.visible)),
        net.t_c,
        mode,
        tuple(net.labels[i] for i in inv),
    )


def layered_net(rng: random.Random, max_inputs: int = 2, max_outputs: int = 3) -> LayeredStochasticNet:
    k = rng.randint(1, max_inputs)
    m = rng.randint(1, max_outputs)
    xs = list(itertools.product((0.0, 1.0), repeat=k))
    weights = [rng.random() + 0.05 for _ in xs]
    total = sum(weights)
    inputs = tuple((x, w / total) for x, w in zip(xs, weights))
    cpt = tuple((x, tuple(round(rng.random(), 3) for _ in range(m))) for x in xs)
    return LayeredStochasticNet(
        tuple(f"x{i + 1}" for i in range(k)), tuple(f"y{i + 1}" for i in range(m)), inputs, cpt
    )


# hypothesis strategies ----------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def modelsets(draw, universe):
    n = len(universe)
    cubes = []
    for _ in range(draw(st.integers(0, 4))):
        mask = draw(st.integers(0, 2**n - 1))
        value = draw(st.integers(0, 2**n - 1)) & mask
        cubes.append((mask, value))
    return ModelSet(universe, cubes)


@st.composite
def probabilities(draw, k):
    return [draw(st.floats(0.0, 1.0, allow_nan=False)) for _ in range(k)]


def from_seed(make, **kwargs):
    return seeds.map(lambda s: make(random.Random(s), **kwargs))
