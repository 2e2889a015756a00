"""Model enumeration, logic programs and penalty knowledge bases."""
from __future__ import annotations

import graphlib
import math
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import singledispatch
from itertools import product

import numpy as np

from .errors import CompileError, UniverseMismatch
from .formula import And, Atom, Const, Formula, Iff, Implies, Not, Or, atoms_of
from .modelset import EXPANSION_CAP, ModelSet, _all_indices

UNIVERSE_CAP = EXPANSION_CAP


class HardConstraintWarning(UserWarning):
    """No interpretation satisfies every infinite-confidence sentence."""


# ---------------------------------------------------------------------------
# truth tables


def truth_columns(universe: Sequence[str]) -> dict[str, np.ndarray]:
    """One boolean column per atom over all 2**n interpretations (bit i = atom i)."""
    n = len(universe)
    if n > UNIVERSE_CAP:
        raise ValueError(f"universe of {n} atoms exceeds the cap of {UNIVERSE_CAP}")
    idx = _all_indices(n)
    return {a: (idx >> i & 1).astype(bool) for i, a in enumerate(universe)}


def evaluate_columns(f: Formula, columns: Mapping[str, np.ndarray], size: int | None = None) -> np.ndarray:
    """Vectorised classical evaluation of a ground formula."""
    if size is None:
        size = len(next(iter(columns.values()))) if columns else 1
    match f:
        case Atom():
            try:
                return columns[f.name]
            except KeyError:
                raise UniverseMismatch(f"atom {f.name!r} is not in the universe") from None
        case Const(value=v):
            return np.full(size, v, dtype=bool)
        case Not(arg=a):
            return ~evaluate_columns(a, columns, size)
        case And(args=args):
            out = np.ones(size, dtype=bool)
            for a in args:
                out = out & evaluate_columns(a, columns, size)
            return out
        case Or(args=args):
            out = np.zeros(size, dtype=bool)
            for a in args:
                out = out | evaluate_columns(a, columns, size)
            return out
        case Implies(lhs=l, rhs=r):
            return ~evaluate_columns(l, columns, size) | evaluate_columns(r, columns, size)
        case Iff(lhs=l, rhs=r):
            return evaluate_columns(l, columns, size) == evaluate_columns(r, columns, size)
    return evaluate_columns(f.ground(), columns, size)


def _as_formulas(kb) -> list[Formula]:
    if isinstance(kb, Formula):
        return [kb]
    return list(kb)


def models_of(kb, universe: Sequence[str]) -> ModelSet:
    """All interpretations over ``universe`` satisfying every formula of ``kb``."""
    universe = tuple(universe)
    formulas = [f.ground() for f in _as_formulas(kb)]
    extra = atoms_of(formulas) - set(universe)
    if extra:
        raise UniverseMismatch(f"atoms {sorted(extra)} are not in the universe")
    columns = truth_columns(universe)
    size = 2 ** len(universe)
    table = np.ones(size, dtype=bool)
    for f in formulas:
        table &= evaluate_columns(f, columns, size)
    return ModelSet.from_truth_table(universe, table)


# ---------------------------------------------------------------------------
# logic programs


Literal = tuple[str, bool]


@dataclass(frozen=True)
class Clause:
    """``head <- body``; each body literal is (atom, positive)."""

    head: str
    body: tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple((str(a), bool(p)) for a, p in self.body))

    @property
    def is_fact(self) -> bool:
        return not self.body

    @property
    def is_horn(self) -> bool:
        return all(p for _, p in self.body)

    def atoms(self) -> frozenset[str]:
        return frozenset([self.head, *(a for a, _ in self.body)])

    def body_formula(self) -> Formula:
        lits = [Atom(a) if p else Not(Atom(a)) for a, p in self.body]
        if not lits:
            return Const(True)
        return lits[0] if len(lits) == 1 else And(tuple(lits))

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        lits = " & ".join(a if p else f"~{a}" for a, p in self.body)
        return f"{self.head} <- {lits}."


def clause(head: str, *body: str) -> Clause:
    """Shorthand: ``clause("C", "A", "~B")`` is ``C <- A & ~B``."""
    lits = tuple((b[1:], False) if b.startswith("~") else (b, True) for b in body)
    return Clause(head, lits)


@dataclass(frozen=True)
class LogicProgram:
    """A finite set of ground clauses over a declared atom universe.

    ``atoms`` defaults to every atom mentioned, sorted.  Duplicate clauses are
    removed; clause order is otherwise preserved.
    """

    clauses: tuple[Clause, ...] = ()
    atoms: tuple[str, ...] = ()

    def __post_init__(self):
        seen = []
        for c in self.clauses:
            if c not in seen:
                seen.append(c)
        object.__setattr__(self, "clauses", tuple(seen))
        mentioned = set()
        for c in seen:
            mentioned |= c.atoms()
        declared = tuple(self.atoms)
        if declared:
            missing = mentioned - set(declared)
            if missing:
                raise UniverseMismatch(f"clauses mention undeclared atoms {sorted(missing)}")
            atoms = declared
        else:
            atoms = tuple(sorted(mentioned))
        object.__setattr__(self, "atoms", atoms)

    @property
    def is_horn(self) -> bool:
        return all(c.is_horn for c in self.clauses)

    def heads(self) -> frozenset[str]:
        return frozenset(c.head for c in self.clauses)

    def clauses_for(self, head: str) -> tuple[Clause, ...]:
        return tuple(c for c in self.clauses if c.head == head)

    def completion(self) -> list[Formula]:
        """One ``A <-> (body_1 | ... | body_k)`` per atom; models are T_P fixed points."""
        out = []
        for a in self.atoms:
            bodies = [c.body_formula() for c in self.clauses_for(a)]
            if not bodies:
                rhs: Formula = Const(False)
            elif len(bodies) == 1:
                rhs = bodies[0]
            else:
                rhs = Or(tuple(bodies))
            out.append(Iff(Atom(a), rhs))
        return out

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)


def tp_step(program: LogicProgram, m: Iterable[str]) -> frozenset[str]:
    """Immediate consequences: heads of clauses whose body is true in ``m``."""
    m = frozenset(m)
    return frozenset(
        c.head for c in program.clauses if all((a in m) == positive for a, positive in c.body)
    )


def tp_step_batch(program: LogicProgram, values: np.ndarray, atoms: Sequence[str] | None = None) -> np.ndarray:
    """T_P applied to each row of a boolean matrix whose columns follow ``atoms``."""
    atoms = tuple(program.atoms if atoms is None else atoms)
    x = np.asarray(values, dtype=bool)
    col = {a: i for i, a in enumerate(atoms)}
    out = np.zeros_like(x)
    for c in program.clauses:
        fire = np.ones(x.shape[0], dtype=bool)
        for a, positive in c.body:
            fire &= x[:, col[a]] if positive else ~x[:, col[a]]
        out[:, col[c.head]] |= fire
    return out


@dataclass(frozen=True)
class FixpointResult:
    """Outcome of iterating T_P.

    ``status`` is ``fixed`` (``fixed_point`` set), ``cycle`` (``cycle`` holds
    the repeating interpretations in order) or ``exhausted``.
    """

    status: str
    trace: tuple[frozenset[str], ...]
    fixed_point: frozenset[str] | None = None
    cycle: tuple[frozenset[str], ...] = ()

    @property
    def converged(self) -> bool:
        return self.status == "fixed"


def tp_fixpoint(program: LogicProgram, m0: Iterable[str] = (), max_iters: int = 10_000) -> FixpointResult:
    """Iterate T_P from ``m0`` until some interpretation repeats."""
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    current = frozenset(m0)
    trace = [current]
    seen = {current: 0}
    for _ in range(max_iters):
        current = tp_step(program, current)
        if current in seen:
            start = seen[current]
            cycle = tuple(trace[start:])
            if len(cycle) == 1:
                return FixpointResult("fixed", tuple(trace), fixed_point=current)
            return FixpointResult("cycle", tuple(trace), cycle=cycle)
        seen[current] = len(trace)
        trace.append(current)
    return FixpointResult("exhausted", tuple(trace))


def tp_always_converges(program: LogicProgram) -> bool:
    """True when T_P reaches a fixed point from every interpretation."""
    for bits in product((False, True), repeat=len(program.atoms)):
        m0 = {a for a, b in zip(program.atoms, bits) if b}
        if not tp_fixpoint(program, m0, max_iters=2 ** len(program.atoms) + 1).converged:
            return False
    return True


def fixed_points(program: LogicProgram) -> ModelSet:
    """All interpretations M with T_P(M) = M, found by enumeration."""
    columns = truth_columns(program.atoms)
    x = np.column_stack([columns[a] for a in program.atoms]) if program.atoms else np.zeros((1, 0), bool)
    fixed = np.all(tp_step_batch(program, x) == x, axis=1)
    return ModelSet.from_truth_table(program.atoms, fixed)


def dependency_graph(program: LogicProgram) -> dict[str, set[str]]:
    """Map each head to the atoms its clause bodies depend on."""
    graph: dict[str, set[str]] = {a: set() for a in program.atoms}
    for c in program.clauses:
        graph[c.head].update(a for a, _ in c.body)
    return graph


def is_acyclic(program: LogicProgram) -> bool:
    """True when the body-atom -> head-atom dependency graph has no cycle."""
    graph = dependency_graph(program)
    if any(a in deps for a, deps in graph.items()):
        return False
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError:
        return False
    return True


def topological_atoms(program: LogicProgram) -> tuple[str, ...]:
    """Atoms ordered so that every body atom precedes the heads it supports."""
    return tuple(graphlib.TopologicalSorter(dependency_graph(program)).static_order())


# first-order rules ---------------------------------------------------------


def is_variable(term: str) -> bool:
    """Terms starting with an uppercase letter or underscore are variables."""
    return term[:1].isupper() or term[:1] == "_"


@dataclass(frozen=True)
class Rule:
    """A possibly non-ground clause over predicate atoms."""

    head: Atom
    body: tuple[tuple[Atom, bool], ...] = ()

    def variables(self) -> list[str]:
        out: list[str] = []
        for a in (self.head, *(b for b, _ in self.body)):
            for t in a.args:
                if is_variable(t) and t not in out:
                    out.append(t)
        return out

    def constants(self) -> set[str]:
        return {t for a in (self.head, *(b for b, _ in self.body)) for t in a.args if not is_variable(t)}


def ground(rules: Iterable[Rule | Clause], constants: Sequence[str]) -> LogicProgram:
    """Every substitution of variables by the given constants, deduplicated."""
    constants = tuple(constants)
    allowed = set(constants)
    out: list[Clause] = []
    for r in rules:
        if isinstance(r, Clause):
            out.append(r)
            continue
        unknown = r.constants() - allowed
        if unknown:
            raise CompileError(f"rule mentions constants {sorted(unknown)} outside {list(constants)}")
        variables = r.variables()
        for values in product(constants, repeat=len(variables)):
            sub = dict(zip(variables, values))

            def bind(a: Atom) -> str:
                return Atom(a.pred, tuple(sub.get(t, t) for t in a.args)).name

            out.append(Clause(bind(r.head), tuple((bind(b), p) for b, p in r.body)))
    return LogicProgram(tuple(out))


# ---------------------------------------------------------------------------
# penalty logic


@dataclass(frozen=True)
class PenaltyKB:
    """Weighted sentences ``(confidence, formula)``; ``math.inf`` marks a hard constraint."""

    sentences: tuple[tuple[float, Formula], ...] = ()

    def __post_init__(self):
        rows = tuple((float(c), f) for c, f in self.sentences)
        for c, _ in rows:
            if math.isnan(c) or c < 0:
                raise ValueError(f"confidences must be non-negative, got {c}")
        object.__setattr__(self, "sentences", rows)

    def atoms(self) -> frozenset[str]:
        return atoms_of(f for _, f in self.sentences)

    def scaled(self, factor: float) -> PenaltyKB:
        return PenaltyKB(tuple((c * factor, f) for c, f in self.sentences))


def penalty(kb: PenaltyKB, m: Iterable[str]) -> float:
    """Sum of the confidences of the sentences false in ``m`` (true atoms given)."""
    m = frozenset(m)
    total = 0.0
    for c, f in kb.sentences:
        if not f.holds(m):
            total += c  # float inf saturates
    return total


def penalty_batch(kb: PenaltyKB, columns: Mapping[str, np.ndarray], size: int) -> tuple[np.ndarray, np.ndarray]:
    """Finite penalty and count of violated hard sentences for each row."""
    soft = np.zeros(size)
    hard = np.zeros(size, dtype=np.int64)
    for c, f in kb.sentences:
        violated = ~evaluate_columns(f.ground(), columns, size)
        if math.isinf(c):
            hard += violated
        else:
            soft += c * violated
    return soft, hard


def penalty_table(kb: PenaltyKB, universe: Sequence[str]) -> np.ndarray:
    """Penalty of every interpretation (bit i = atom i), with inf for hard violations."""
    universe = tuple(universe)
    extra = kb.atoms() - set(universe)
    if extra:
        raise UniverseMismatch(f"atoms {sorted(extra)} are not in the universe")
    size = 2 ** len(universe)
    soft, hard = penalty_batch(kb, truth_columns(universe), size)
    return np.where(hard > 0, math.inf, soft)


def penalty_models(kb: PenaltyKB, universe: Sequence[str], tol: float = 1e-9) -> ModelSet:
    """Interpretations of minimum penalty; ties are all kept.

    When every interpretation violates a hard sentence, the minimum is taken
    lexicographically (fewest hard violations, then least finite penalty) and
    a HardConstraintWarning is issued.
    """
    universe = tuple(universe)
    extra = kb.atoms() - set(universe)
    if extra:
        raise UniverseMismatch(f"atoms {sorted(extra)} are not in the universe")
    size = 2 ** len(universe)
    soft, hard = penalty_batch(kb, truth_columns(universe), size)
    least_hard = hard.min()
    if least_hard > 0:
        warnings.warn("hard constraints are jointly unsatisfiable", HardConstraintWarning, stacklevel=2)
    candidates = hard == least_hard
    best = soft[candidates].min()
    scale = max(1.0, abs(best))
    return ModelSet.from_truth_table(universe, candidates & (soft <= best + tol * scale))


# ---------------------------------------------------------------------------
# knowledge bases as model sets


@singledispatch
def kb_models(kb, universe: Sequence[str]) -> ModelSet:
    """Model set of any supported knowledge base over ``universe``.

    Accepts formulas (one or an iterable), a LogicProgram (its supported
    models), a PenaltyKB (its minimum-penalty models) or a ModelSet.
    """
    return models_of(kb, universe)


@kb_models.register
def _(kb: ModelSet, universe):
    return kb.lift(universe)


@kb_models.register
def _(kb: LogicProgram, universe):
    return models_of(kb.completion(), universe)


@kb_models.register
def _(kb: PenaltyKB, universe):
    return penalty_models(kb, universe)


def kb_atoms(kb) -> frozenset[str]:
    if isinstance(kb, ModelSet):
        return frozenset(kb.universe)
    if isinstance(kb, LogicProgram):
        return frozenset(kb.atoms)
    if isinstance(kb, PenaltyKB):
        return kb.atoms()
    return atoms_of(_as_formulas(kb))
