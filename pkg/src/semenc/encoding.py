"""Encoding functions from network states to model sets, and the checks built on them.

Three encoding families are supported, all finite lookup tables:

``EncodingNAT``
    each housed atom lives in one visible neuron; a value table maps the
    neuron's value to a truth value.
``EncodingDAT``
    the first ``k`` visible neurons act as selectors.  For each triple
    ``(o, h, r)`` and atom ``Q``, when the selector neurons ``o[Q]`` hold the
    pattern ``h[Q]``, the truth of ``Q`` is read from neuron ``r[Q]``.
``TableEncoding``
    an explicit state -> cube table (produced by :func:`transport_encoding`).
"""
from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from .errors import EncodingError, TransportError, UniverseMismatch
from .formula import Atom, Formula, Iff
from .logic import kb_atoms, kb_models
from .modelset import ModelSet
from .network import (
    VALUE_TOL,
    CandidateNetwork,
    TransitionReport,
    compute_x_inf,
    enumerate_states,
    format_state,
    update,
    update_batch,
    state_indices,
)

DEFAULT_TRUTH = ((0.0, False), (1.0, True))


class Agg(str, Enum):
    UNION = "union"
    INTERSECTION = "intersection"


def _agg(agg) -> Agg:
    try:
        return Agg(agg)
    except ValueError:
        raise ValueError(f"aggregation must be 'union' or 'intersection', got {agg!r}") from None


def _truth_lookup(truth: tuple[tuple[float, bool], ...], value: float, where: str) -> bool:
    for v, t in truth:
        if abs(v - value) <= VALUE_TOL:
            return t
    raise EncodingError(f"{where}: value {value:g} has no truth value")


def _neuron_ref(ref, net: CandidateNetwork | None) -> int:
    if isinstance(ref, str):
        if net is None:
            raise EncodingError(f"neuron label {ref!r} needs a network to resolve")
        return net.index_of(ref)
    return int(ref)


@dataclass(frozen=True)
class EncodingNAT:
    """Atom -> neuron map plus a value -> truth table.

    ``universe`` is the full atom universe of the interpretations produced;
    it defaults to the housed atoms in the order given.
    """

    atom_neuron: tuple[tuple[str, int], ...]
    truth: tuple[tuple[float, bool], ...] = DEFAULT_TRUTH
    universe: tuple[str, ...] = ()

    def __post_init__(self):
        pairs = self.atom_neuron.items() if isinstance(self.atom_neuron, Mapping) else self.atom_neuron
        pairs = tuple((str(a), int(i)) for a, i in pairs)
        object.__setattr__(self, "atom_neuron", pairs)
        truth = self.truth.items() if isinstance(self.truth, Mapping) else self.truth
        object.__setattr__(self, "truth", tuple((float(v), bool(t)) for v, t in truth))
        housed = [a for a, _ in pairs]
        universe = tuple(self.universe) if self.universe else tuple(housed)
        missing = [a for a in housed if a not in universe]
        if missing:
            raise UniverseMismatch(f"housed atoms {missing} are missing from the universe")
        object.__setattr__(self, "universe", universe)

    @classmethod
    def for_network(cls, net: CandidateNetwork, atoms: Mapping[str, str | int] | None = None, **kw) -> EncodingNAT:
        """NAT encoding by neuron label; by default each visible neuron houses the atom of its label."""
        if atoms is None:
            atoms = {net.labels[i]: i for i in net.visible}
        return cls(tuple((a, _neuron_ref(r, net)) for a, r in atoms.items()), **kw)

    @property
    def housed(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.atom_neuron)

    def interpret(self, s) -> ModelSet:
        assignment = {
            a: _truth_lookup(self.truth, float(s[i]), f"atom {a}") for a, i in self.atom_neuron
        }
        return ModelSet.cube(self.universe, assignment)

    def with_universe(self, universe: Sequence[str]) -> EncodingNAT:
        return EncodingNAT(self.atom_neuron, self.truth, tuple(universe))


@dataclass(frozen=True)
class DatTriple:
    """One (o, h, r) triple: selectors, selector pattern and value neuron per atom."""

    selectors: tuple[tuple[str, tuple[int, ...]], ...]
    pattern: tuple[tuple[str, tuple[float, ...]], ...]
    target: tuple[tuple[str, int], ...]

    def __post_init__(self):
        def norm(items, conv):
            items = items.items() if isinstance(items, Mapping) else items
            return tuple(sorted((str(a), conv(v)) for a, v in items))

        object.__setattr__(self, "selectors", norm(self.selectors, lambda v: tuple(int(i) for i in v)))
        object.__setattr__(self, "pattern", norm(self.pattern, lambda v: tuple(float(x) for x in v)))
        object.__setattr__(self, "target", norm(self.target, int))
        keys = [a for a, _ in self.target]
        if [a for a, _ in self.selectors] != keys or [a for a, _ in self.pattern] != keys:
            raise EncodingError("selector, pattern and target tables must cover the same atoms")
        for (a, o), (_, h) in zip(self.selectors, self.pattern):
            if len(o) != len(h):
                raise EncodingError(f"atom {a}: pattern length {len(h)} differs from {len(o)} selectors")

    def atoms(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.target)

    def rows(self):
        """(atom, selector neurons, pattern, value neuron) for each atom."""
        for (a, o), (_, h), (_, r) in zip(self.selectors, self.pattern, self.target):
            yield a, o, h, r


@dataclass(frozen=True)
class EncodingDAT:
    """Distributed encoding with ``k`` selector neurons and a list of triples.

    ``truth=None`` reads neuron values directly as degrees in [0, 1]; that form
    is only meaningful for fuzzy groundings (see :mod:`semenc.fuzzy`).
    """

    k: int
    triples: tuple[DatTriple, ...]
    truth: tuple[tuple[float, bool], ...] | None = DEFAULT_TRUTH
    universe: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        if self.truth is not None:
            truth = self.truth.items() if isinstance(self.truth, Mapping) else self.truth
            object.__setattr__(self, "truth", tuple((float(v), bool(t)) for v, t in truth))
        housed = []
        for t in self.triples:
            housed.extend(a for a in t.atoms() if a not in housed)
        universe = tuple(self.universe) if self.universe else tuple(housed)
        missing = [a for a in housed if a not in universe]
        if missing:
            raise UniverseMismatch(f"housed atoms {missing} are missing from the universe")
        object.__setattr__(self, "universe", universe)

    @classmethod
    def from_nat(cls, nat: EncodingNAT) -> EncodingDAT:
        """The k = 0, single-triple form equivalent to a NAT encoding."""
        triple = DatTriple(
            {a: () for a, _ in nat.atom_neuron},
            {a: () for a, _ in nat.atom_neuron},
            dict(nat.atom_neuron),
        )
        return cls(0, (triple,), nat.truth, nat.universe)

    @property
    def housed(self) -> tuple[str, ...]:
        out = []
        for t in self.triples:
            out.extend(a for a in t.atoms() if a not in out)
        return tuple(out)

    def readings(self, s) -> list[tuple[str, float]]:
        """(atom, raw value) pairs selected by the state's selector pattern."""
        out = []
        for t in self.triples:
            for a, o, h, r in t.rows():
                if all(abs(float(s[i]) - v) <= VALUE_TOL for i, v in zip(o, h)):
                    out.append((a, float(s[r])))
        return out

    def interpret(self, s) -> ModelSet:
        if self.truth is None:
            raise EncodingError("a degree-valued DAT encoding has no classical reading")
        fixed: dict[str, bool] = {}
        for a, value in self.readings(s):
            truth = _truth_lookup(self.truth, value, f"atom {a}")
            if fixed.setdefault(a, truth) != truth:
                return ModelSet.empty(self.universe)
        return ModelSet.cube(self.universe, fixed)


@dataclass(frozen=True, eq=False)
class TableEncoding:
    """Explicit state -> model-set table."""

    universe: tuple[str, ...]
    table: Mapping[tuple, ModelSet]

    def interpret(self, s) -> ModelSet:
        key = tuple(float(v) for v in s)
        try:
            return self.table[key]
        except KeyError:
            raise EncodingError(f"state {format_state(key)} is not in the encoding table") from None


Encoding = EncodingNAT | EncodingDAT | TableEncoding


def interpret_state(enc: Encoding, s) -> ModelSet:
    """The cube of interpretations the encoding assigns to state ``s``."""
    return enc.interpret(s)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostics:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _visible_invariance(enc: Encoding, net: CandidateNetwork) -> list[str]:
    states = enumerate_states(net)
    seen: dict[tuple, tuple[tuple, ModelSet]] = {}
    for row in states:
        key = tuple(row[list(net.visible)])
        try:
            image = enc.interpret(row)
        except EncodingError as exc:
            return [f"state {format_state(row)} cannot be interpreted: {exc}"]
        if key in seen:
            other, other_image = seen[key]
            if not image.equals(other_image):
                return [f"states {format_state(other)} and {format_state(row)} agree on visible neurons "
                        "but are mapped to different interpretation sets"]
        else:
            seen[key] = (tuple(row), image)
    return []


def validate_encoding(enc: Encoding, net: CandidateNetwork) -> Diagnostics:
    """List every structural condition the encoding violates on this network."""
    problems: list[str] = []
    visible = list(net.visible)
    vis_set = set(visible)

    def in_range(i: int, what: str) -> bool:
        if not 0 <= i < net.n:
            problems.append(f"{what}: neuron index {i} is out of range")
            return False
        return True

    def truth_total(i: int, truth, what: str):
        if truth is None:
            if any(not 0.0 <= v <= 1.0 for v in net.domains[i]):
                problems.append(f"{what}: neuron {net.labels[i]} has values outside [0, 1]")
            return
        for v in net.domains[i]:
            if not any(abs(v - tv) <= VALUE_TOL for tv, _ in truth):
                problems.append(f"{what}: no truth value for value {v:g} of neuron {net.labels[i]}")

    if isinstance(enc, EncodingNAT):
        owners: dict[int, list[str]] = {}
        for a, i in enc.atom_neuron:
            if not in_range(i, f"atom {a}"):
                continue
            owners.setdefault(i, []).append(a)
            if i not in vis_set:
                problems.append(f"atom {a} is housed in hidden neuron {net.labels[i]}")
            truth_total(i, enc.truth, f"atom {a}")
        for i, atoms in sorted(owners.items()):
            if len(atoms) > 1:
                problems.append(f"not bijective: atoms {atoms} share neuron {net.labels[i]}")
        for i in visible:
            if i not in owners:
                problems.append(f"not bijective: visible neuron {net.labels[i]} houses no atom")
        dup = [a for a in set(enc.housed) if enc.housed.count(a) > 1]
        if dup:
            problems.append(f"not bijective: atoms {sorted(dup)} are housed twice")
    elif isinstance(enc, EncodingDAT):
        if not 0 <= enc.k <= len(visible):
            problems.append(f"k = {enc.k} is not between 0 and the {len(visible)} visible neurons")
        selectors = set(visible[: enc.k])
        values = [i for i in visible[enc.k :]]
        hit: set[int] = set()
        for j, t in enumerate(enc.triples, start=1):
            seen: dict[tuple, str] = {}
            for a, o, h, r in t.rows():
                where = f"triple {j}, atom {a}"
                for i, v in zip(o, h):
                    if not in_range(i, where):
                        continue
                    if i not in selectors:
                        problems.append(f"{where}: selector {net.labels[i]} is not among the first k visible neurons")
                    elif not any(abs(v - d) <= VALUE_TOL for d in net.domains[i]):
                        problems.append(f"{where}: pattern value {v:g} is outside the domain of {net.labels[i]}")
                if in_range(r, where):
                    if r not in values:
                        problems.append(f"{where}: value neuron {net.labels[r]} is not a non-selector visible neuron")
                    else:
                        hit.add(r)
                    truth_total(r, enc.truth, where)
                key = (h, r)
                if key in seen:
                    problems.append(f"triple {j}: atoms {seen[key]} and {a} share pattern and value neuron")
                else:
                    seen[key] = a
        for i in values:
            if i not in hit:
                problems.append(f"value neuron {net.labels[i]} is not read by any triple")
    # a degree-valued DAT has no classical image to compare
    if isinstance(enc, TableEncoding) or (not problems and getattr(enc, "truth", None) is not None):
        problems.extend(_visible_invariance(enc, net))
    return Diagnostics(tuple(problems))


# ---------------------------------------------------------------------------
# neural models and semantic encodings


def models_of_network(net: CandidateNetwork, enc: Encoding, agg="union", report: TransitionReport | None = None) -> ModelSet:
    """Aggregate the interpretations of every state in x_inf."""
    agg = _agg(agg)
    report = report or compute_x_inf(net)
    images = [enc.interpret(s) for s in report.x_inf]
    out = images[0]
    for image in images[1:]:
        out = out.union(image) if agg is Agg.UNION else out.intersect(image)
    return out


@dataclass(frozen=True)
class Witness:
    """Why a check failed.

    ``kind`` is one of ``empty`` (the network has no beliefs), ``state``
    (a state of x_inf maps outside the knowledge base's models),
    ``outside`` (an interpretation believed by the network is not a model)
    or ``missing`` (a model not believed by the network).
    """

    kind: str
    state: tuple | None = None
    interpretation: frozenset[str] | None = None

    def describe(self) -> str:
        if self.kind == "empty":
            return "the aggregated model set is empty"
        if self.kind == "state":
            return f"state {format_state(self.state)} maps outside the models of the knowledge base"
        atoms = "{" + ", ".join(sorted(self.interpretation)) + "}"
        if self.kind == "outside":
            return f"interpretation {atoms} is believed by the network but is not a model"
        return f"model {atoms} is not believed by the network"


@dataclass(frozen=True, eq=False)
class EncodingReport:
    agg: Agg
    m_n: ModelSet
    m_l: ModelSet
    is_neural_model: bool
    is_semantic_encoding: bool
    neural_model_witness: Witness | None = None
    semantic_encoding_witness: Witness | None = None

    @property
    def witness(self) -> Witness | None:
        return self.neural_model_witness or self.semantic_encoding_witness


def _report(net, enc, agg, kb, report=None) -> EncodingReport:
    agg = _agg(agg)
    universe = enc.universe
    missing = sorted(kb_atoms(kb) - set(universe))
    if missing:
        raise UniverseMismatch(f"knowledge-base atoms {missing} are not in the encoding's universe")
    report = report or compute_x_inf(net)
    m_n = models_of_network(net, enc, agg, report)
    m_l = kb_models(kb, universe)

    nm_witness = None
    if m_n.is_empty():
        nm_witness = Witness("empty")
    elif not m_n.issubset(m_l):
        if agg is Agg.UNION:
            for s in report.x_inf:
                if not enc.interpret(s).issubset(m_l):
                    nm_witness = Witness("state", state=s)
                    break
        else:
            nm_witness = Witness("outside", interpretation=m_n.difference(m_l).pick())
    is_nm = nm_witness is None

    se_witness = None
    if not is_nm:
        se_witness = nm_witness
    elif not m_l.issubset(m_n):
        se_witness = Witness("missing", interpretation=m_l.difference(m_n).pick())
    is_se = se_witness is None
    assert not is_se or is_nm, "semantic encoding must imply neural model"
    return EncodingReport(agg, m_n, m_l, is_nm, is_se, nm_witness, se_witness)


def check_neural_model(net, enc, agg, kb, report: TransitionReport | None = None) -> EncodingReport:
    """Decide whether the aggregated model set is non-empty and contained in the KB's models."""
    return _report(net, enc, agg, kb, report)


def check_semantic_encoding(net, enc, agg, kb, report: TransitionReport | None = None) -> EncodingReport:
    """Decide whether the aggregated model set equals the KB's models.

    Equality implies the network determines every entailment of the KB; the
    report carries both verdicts.
    """
    return _report(net, enc, agg, kb, report)


# ---------------------------------------------------------------------------
# logical classifiers


@dataclass(frozen=True, eq=False)
class ClassifierCheck:
    implements: bool
    counterexample: tuple | None
    semantic_encoding: EncodingReport

    def __bool__(self) -> bool:
        return self.implements


def _lookup(table, key):
    if callable(table) and not isinstance(table, Mapping):
        return table(key)
    try:
        return table[key]
    except KeyError:
        raise EncodingError(f"no entry for {key!r}") from None


def clamp_inputs(net: CandidateNetwork, inputs: Sequence[int]) -> CandidateNetwork:
    """Copy of ``net`` whose input neurons hold their value forever."""
    w = np.array(net.weights)
    b = np.array(net.biases)
    transfer = list(net.transfer)
    for i in inputs:
        w[:, i] = 0.0
        w[i, i] = 1.0
        b[i] = 0.0
        transfer[i] = "identity"
    return net.replace(weights=w, biases=b, transfer=tuple(transfer))


def check_logical_classifier(
    net: CandidateNetwork,
    inputs: Sequence[int | str],
    output: int | str,
    g_in: Mapping[tuple, Iterable[str]] | Callable,
    phi: Formula,
    g_out: Mapping[float, bool] | Callable | None = None,
    universe: Sequence[str] | None = None,
    output_atom: str = "alpha",
) -> ClassifierCheck:
    """Decide whether the net classifies exactly the models of ``phi``.

    Two routes are computed and must agree: direct propagation of every
    input pattern, and the semantic-encoding check of ``output_atom <-> phi``
    on the input-clamped network.
    """
    inputs = [_neuron_ref(i, net) for i in inputs]
    output = _neuron_ref(output, net)
    g_out = g_out if g_out is not None else {0.0: False, 1.0: True}
    universe = tuple(sorted(phi.atoms())) if universe is None else tuple(universe)
    if output_atom in universe:
        raise ValueError(f"output atom {output_atom!r} clashes with the input universe")
    input_states = list(product(*[net.domains[i] for i in inputs]))
    images = {s: frozenset(_lookup(g_in, s)) for s in input_states}
    space = ModelSet.from_interpretations(universe, images.values())
    if not space.equals(ModelSet.full(universe)):
        raise EncodingError("input map is not surjective onto the interpretations of the universe")
    clamped = clamp_inputs(net, inputs)

    # route one: propagate each input pattern to its fixed point
    implements, counterexample = True, None
    for s in input_states:
        x = np.array([d[0] for d in net.domains])
        x[inputs] = s
        state = tuple(x)
        for _ in range(net.n + 1):
            nxt = update(clamped, state)
            if nxt == state:
                break
            state = nxt
        else:
            raise EncodingError("network does not settle under clamped inputs; is it feed-forward?")
        out = bool(_lookup(g_out, state[output]))
        if out != phi.holds(images[s]):
            implements, counterexample = False, s
            break

    # route two: semantic encoding of output_atom <-> phi
    full_universe = universe + (output_atom,)
    report = compute_x_inf(clamped)
    table = {}
    for row in report.x_inf:
        assignment = {a: a in images[tuple(row[i] for i in inputs)] for a in universe}
        assignment[output_atom] = bool(_lookup(g_out, row[output]))
        table[row] = ModelSet.cube(full_universe, assignment)
    enc = TableEncoding(full_universe, table)
    se = check_semantic_encoding(clamped, enc, Agg.UNION, [Iff(Atom(output_atom), phi)], report)
    if se.is_semantic_encoding != implements:
        raise AssertionError("propagation and semantic-encoding routes disagree")
    return ClassifierCheck(implements, counterexample, se)


# ---------------------------------------------------------------------------
# transport


def transport_encoding(net1: CandidateNetwork, net2: CandidateNetwork, f: Mapping | Callable, enc2: Encoding) -> TableEncoding:
    """Pull ``enc2`` back along a conjugacy ``f`` from net1's states to net2's.

    Raises TransportError (with the offending state as witness) when ``f`` is
    not a bijection or does not commute with the two update maps.
    """
    states1 = enumerate_states(net1)
    states2 = enumerate_states(net2)
    if len(states1) != len(states2):
        raise TransportError("state spaces differ in size; no bijection exists")
    keys = [tuple(float(v) for v in row) for row in states1]
    try:
        images = np.array([_lookup(f, k) for k in keys], dtype=float, ndmin=2)
        idx = state_indices(net2, images)
    except Exception as exc:
        raise TransportError(f"state map does not produce valid states: {exc}") from None
    if len(np.unique(idx)) != len(idx):
        counts = np.bincount(idx, minlength=len(states2))
        dup = int(np.nonzero(counts[idx] > 1)[0][0])
        raise TransportError(f"state map is not injective at {format_state(keys[dup])}", witness=keys[dup])
    succ1 = state_indices(net1, update_batch(net1, states1))
    succ2 = state_indices(net2, update_batch(net2, states2))
    # f(N1(x)) must equal N2(f(x))
    bad = np.nonzero(idx[succ1] != succ2[idx])[0]
    if len(bad):
        w = keys[int(bad[0])]
        raise TransportError(f"state map does not commute with the dynamics at {format_state(w)}", witness=w)
    table = {k: enc2.interpret(states2[j]) for k, j in zip(keys, idx)}
    return TableEncoding(enc2.universe, table)
