"""Interval-labelled fuzzy logic and the fuzzy fidelity measure.

A fuzzy sentence ``[a, b] : phi`` is satisfied by a valuation when the value
of ``phi`` lies in ``[a, b]``.  Negation is ``1 - x`` and disjunction ``max``;
conjunction and implication default to ``min`` and ``max(1 - x, y)``.  Other
connective families can be passed explicitly.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .encoding import Agg, EncodingDAT, _agg, models_of_network
from .errors import DomainError, EncodingError, UniverseMismatch
from .formula import And, Atom, Const, Exists, Forall, Formula, Iff, Implies, Not, Or
from .measures import FidelityReport, FidelityRow
from .modelset import ModelSet
from .network import CandidateNetwork, TransitionReport, compute_x_inf


@dataclass(frozen=True)
class Connectives:
    name: str
    conj: Callable[[float, float], float]
    disj: Callable[[float, float], float]
    implies: Callable[[float, float], float]

    @staticmethod
    def negate(x: float) -> float:
        return 1.0 - x


GODEL = Connectives("godel", min, max, lambda x, y: max(1.0 - x, y))
PRODUCT = Connectives("product", lambda x, y: x * y, lambda x, y: x + y - x * y, lambda x, y: 1.0 - x + x * y)
LUKASIEWICZ = Connectives(
    "lukasiewicz",
    lambda x, y: max(0.0, x + y - 1.0),
    lambda x, y: min(1.0, x + y),
    lambda x, y: min(1.0, 1.0 - x + y),
)
CONNECTIVES = {c.name: c for c in (GODEL, PRODUCT, LUKASIEWICZ)}


@dataclass(frozen=True)
class FuzzySentence:
    """``[lower, upper] : formula``; an unlabelled sentence is ``[1, 1]``."""

    formula: Formula
    lower: float = 1.0
    upper: float = 1.0

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError(f"interval [{lo:g}, {hi:g}] is not a sub-interval of [0, 1]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def __str__(self):
        return f"[{self.lower:.9g}, {self.upper:.9g}] : {self.formula}"


def fuzzy_kb(items: Iterable[FuzzySentence | Formula]) -> tuple[FuzzySentence, ...]:
    """Normalise a mix of labelled sentences and bare formulas."""
    return tuple(s if isinstance(s, FuzzySentence) else FuzzySentence(s) for s in items)


def fuzzy_atoms(kb: Iterable[FuzzySentence | Formula]) -> frozenset[str]:
    out: set[str] = set()
    for s in fuzzy_kb(kb):
        out |= s.formula.atoms()
    return frozenset(out)


@dataclass(frozen=True)
class PartialGrounding:
    """Real-valued groundings of constants plus predicate degree tables.

    ``constants`` maps a constant name to its feature vector and
    ``predicates`` maps a predicate name to a table from argument vectors
    (concatenated) to degrees.  Only ground atoms whose arguments are all
    grounded and listed in the table have a degree.
    """

    constants: Mapping[str, tuple[float, ...]] = field(default_factory=dict)
    predicates: Mapping[str, Mapping[tuple[float, ...], float]] = field(default_factory=dict)

    def degree(self, a: Atom) -> float:
        if a.pred not in self.predicates:
            raise UniverseMismatch(f"predicate {a.pred} is not grounded")
        key: tuple[float, ...] = ()
        for arg in a.args:
            if arg not in self.constants:
                raise UniverseMismatch(f"constant {arg} is not grounded")
            key += tuple(float(v) for v in self.constants[arg])
        try:
            return float(self.predicates[a.pred][key])
        except KeyError:
            raise UniverseMismatch(f"no degree for {a.name} at {key}") from None


Valuation = Mapping[str, float] | PartialGrounding


def _degree(v: Valuation, a: Atom) -> float:
    if isinstance(v, PartialGrounding):
        x = v.degree(a)
    else:
        try:
            x = float(v[a.name])
        except KeyError:
            raise UniverseMismatch(f"atom {a.name} has no value") from None
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise DomainError(f"value {x:g} of atom {a.name} is outside [0, 1]")
    return x


def eval_formula(v: Valuation, f: Formula, connectives: Connectives = GODEL) -> float:
    """Degree of truth of ``f``; quantifiers over finite domains fold the connectives."""
    c = connectives
    match f:
        case Atom():
            return _degree(v, f)
        case Const(value=value):
            return 1.0 if value else 0.0
        case Not(arg=arg):
            return c.negate(eval_formula(v, arg, c))
        case And(args=args):
            return reduce(c.conj, (eval_formula(v, g, c) for g in args), 1.0)
        case Or(args=args):
            return reduce(c.disj, (eval_formula(v, g, c) for g in args), 0.0)
        case Implies(lhs=left, rhs=right):
            return c.implies(eval_formula(v, left, c), eval_formula(v, right, c))
        case Iff(lhs=left, rhs=right):
            x, y = eval_formula(v, left, c), eval_formula(v, right, c)
            return c.conj(c.implies(x, y), c.implies(y, x))
        case Forall() | Exists():
            return eval_formula(v, f.ground(), c)
    raise TypeError(f"cannot evaluate {f!r}")


def interval_distance(x: float, lower: float, upper: float) -> float:
    """Distance from ``x`` to the interval ``[lower, upper]``."""
    return max(lower - x, 0.0, x - upper)


def satisfies(v: Valuation, kb: Iterable[FuzzySentence | Formula], connectives: Connectives = GODEL) -> bool:
    return all(
        interval_distance(eval_formula(v, s.formula, connectives), s.lower, s.upper) == 0.0 for s in fuzzy_kb(kb)
    )


def _sat_min(values: Sequence[float]) -> float:
    return min(values)


def _sat_mean(values: Sequence[float]) -> float:
    return float(np.mean(values))


SAT_AGGREGATORS: dict[str, Callable[[Sequence[float]], float]] = {"min": _sat_min, "mean": _sat_mean}


def _satagg(satagg) -> Callable[[Sequence[float]], float]:
    if callable(satagg):
        return satagg
    try:
        return SAT_AGGREGATORS[satagg]
    except KeyError:
        raise ValueError(f"unknown satisfaction aggregator {satagg!r}; expected one of {sorted(SAT_AGGREGATORS)}") from None


def _valuations_of_models(models: ModelSet, atoms: Sequence[str]) -> list[dict[str, float]]:
    missing = sorted(set(atoms) - set(models.universe))
    if missing:
        raise UniverseMismatch(f"knowledge-base atoms {missing} are not in the model set's universe")
    projected = models.project(atoms)
    return [{a: float(a in m) for a in atoms} for m in projected.interpretations()]


def _row_key(v: Valuation) -> tuple:
    if isinstance(v, PartialGrounding):
        return tuple(sorted((p, tuple(sorted(t.items()))) for p, t in v.predicates.items()))
    return tuple(sorted((a, float(x)) for a, x in v.items()))


def fid_fuzzy(
    m_n: ModelSet | Iterable[Valuation],
    kb: Iterable[FuzzySentence | Formula],
    satagg="min",
    connectives: Connectives = GODEL,
) -> FidelityReport:
    """Infimum over valuations of the aggregated interval satisfaction.

    ``m_n`` is either a classical model set (projected onto the kb's atoms,
    each model read as a 0/1 valuation) or an iterable of valuations.
    """
    kb = fuzzy_kb(kb)
    if not kb:
        raise ValueError("fuzzy knowledge base is empty")
    agg = _satagg(satagg)
    if isinstance(m_n, ModelSet):
        valuations = _valuations_of_models(m_n, sorted(fuzzy_atoms(kb)))
    else:
        valuations = list(m_n)
    if not valuations:
        raise ValueError("the set of valuations is empty")
    rows = []
    for v in valuations:
        scores = tuple(
            1.0 - interval_distance(eval_formula(v, s.formula, connectives), s.lower, s.upper) for s in kb
        )
        value = float(agg(scores))
        rows.append(FidelityRow(_row_key(v), value, all(x == 1.0 for x in scores), scores))
    best = min(r.value for r in rows)
    return FidelityReport("fuzzy", min(max(best, 0.0), 1.0), tuple(rows))


def network_valuations(
    net: CandidateNetwork, enc: EncodingDAT, agg=Agg.INTERSECTION, report: TransitionReport | None = None
) -> list[dict[str, float]]:
    """Valuations read from x_inf through a degree-valued DAT encoding.

    Each state reads the atoms its selector pattern grounds.  Under
    intersection the readings of all states combine into one partial
    valuation (conflicting readings are an error); under union every state
    must read every atom it is asked about and yields its own valuation.
    """
    if enc.truth is not None:
        raise EncodingError("network_valuations needs a degree-valued DAT encoding (truth=None)")
    agg = _agg(agg)
    report = report or compute_x_inf(net)
    per_state = []
    for s in report.x_inf:
        reading: dict[str, float] = {}
        for a, x in enc.readings(s):
            if a in reading and abs(reading[a] - x) > 1e-12:
                raise EncodingError(f"state reads two degrees for atom {a}")
            reading[a] = x
        per_state.append(reading)
    if agg is Agg.UNION:
        return per_state
    merged: dict[str, float] = {}
    for reading in per_state:
        for a, x in reading.items():
            if a in merged and abs(merged[a] - x) > 1e-12:
                raise EncodingError(f"x_inf states disagree on the degree of {a}; the intersection is empty")
            merged[a] = x
    return [merged]


def fid_fuzzy_network(
    net: CandidateNetwork,
    enc,
    kb: Iterable[FuzzySentence | Formula],
    agg=Agg.UNION,
    satagg="min",
    connectives: Connectives = GODEL,
) -> FidelityReport:
    """Fuzzy fidelity of a network under an encoding and aggregation.

    Classical encodings go through the aggregated model set; a degree-valued
    DAT encoding yields fuzzy valuations directly.
    """
    if isinstance(enc, EncodingDAT) and enc.truth is None:
        return fid_fuzzy(network_valuations(net, enc, agg), kb, satagg, connectives)
    return fid_fuzzy(models_of_network(net, enc, agg), kb, satagg, connectives)


__all__ = [
    "Connectives",
    "GODEL",
    "PRODUCT",
    "LUKASIEWICZ",
    "CONNECTIVES",
    "FuzzySentence",
    "PartialGrounding",
    "fuzzy_kb",
    "fuzzy_atoms",
    "eval_formula",
    "interval_distance",
    "satisfies",
    "fid_fuzzy",
    "fid_fuzzy_network",
    "network_valuations",
    "SAT_AGGREGATORS",
]
