"""Stochastic networks as finite Markov chains.

Two representations are supported.  :class:`MarkovChain` is an explicit
row-stochastic transition matrix over enumerated states.
:class:`LayeredStochasticNet` draws an input from a fixed distribution at
every step and then samples conditionally independent binary outputs whose
probabilities depend on the previous input; its limiting distribution has a
closed form.

Chains are analysed exactly: closed communicating classes, absorption mass
from the initial distribution, and a stationary solve per class.  For a
periodic class the returned distribution is the time average (the Cesàro
limit) and the result is flagged ``periodic``.
"""
from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .encoding import Agg, _agg
from .errors import EncodingError, NonConvergenceError, UniverseMismatch
from .logic import kb_atoms, kb_models
from .measures import FidelityReport, FidelityRow
from .network import CandidateNetwork, compute_x_inf, format_state

ROW_TOL = 1e-12
DEFAULT_EPSILON = 1e-9


class SemanticLossWarning(UserWarning):
    """The knowledge base has zero probability under the given outputs."""


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Explicit finite chain; ``transition[i, j]`` is P(next = j | now = i)."""

    states: tuple[tuple[float, ...], ...]
    transition: sparse.csr_matrix
    initial: np.ndarray | None = None
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        states = tuple(tuple(float(v) for v in s) for s in self.states)
        n = len(states)
        if n == 0:
            raise ValueError("a chain needs at least one state")
        t = sparse.csr_matrix(self.transition, dtype=float)
        if t.shape != (n, n):
            raise ValueError(f"transition matrix has shape {t.shape}, expected ({n}, {n})")
        t.eliminate_zeros()
        if t.nnz and (t.data.min() < 0 or t.data.max() > 1 + ROW_TOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        sums = np.asarray(t.sum(axis=1)).reshape(-1)
        bad = np.nonzero(np.abs(sums - 1) > ROW_TOL)[0]
        if len(bad):
            raise ValueError(f"row {bad[0]} of the transition matrix sums to {sums[bad[0]]:.17g}")
        init = np.full(n, 1.0 / n) if self.initial is None else np.asarray(self.initial, dtype=float)
        if init.shape != (n,) or np.any(init < 0) or abs(init.sum() - 1) > ROW_TOL:
            raise ValueError("initial distribution must be a probability vector over the states")
        width = len(states[0])
        labels = tuple(self.labels) if self.labels else tuple(f"x{i + 1}" for i in range(width))
        if len(labels) != width:
            raise ValueError("one label per state component is required")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.states)

    @classmethod
    def from_dense(cls, states, matrix, initial=None, labels=()) -> MarkovChain:
        return cls(tuple(states), sparse.csr_matrix(np.asarray(matrix, dtype=float)), initial, labels)


def embed_deterministic(net: CandidateNetwork, initial: np.ndarray | None = None) -> MarkovChain:
    """The chain that moves each state to its update with probability one."""
    report = compute_x_inf(net)
    n = len(report.successor)
    matrix = sparse.csr_matrix((np.ones(n), (np.arange(n), report.successor)), shape=(n, n))
    return MarkovChain(tuple(map(tuple, report.states)), matrix, initial, net.labels)


@dataclass(frozen=True, eq=False)
class LayeredStochasticNet:
    """Inputs drawn afresh each step; outputs are Bernoulli in the previous input.

    ``input_distribution`` maps input tuples to probabilities and
    ``output_probabilities`` maps each input tuple to the firing probability of
    every output unit.
    """

    input_labels: tuple[str, ...]
    output_labels: tuple[str, ...]
    input_distribution: tuple[tuple[tuple[float, ...], float], ...]
    output_probabilities: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]

    def __post_init__(self):
        dist = self.input_distribution
        dist = dist.items() if isinstance(dist, Mapping) else dist
        dist = tuple((tuple(float(v) for v in x), float(p)) for x, p in dist)
        cpt = self.output_probabilities
        cpt = cpt.items() if isinstance(cpt, Mapping) else cpt
        cpt = tuple((tuple(float(v) for v in x), tuple(float(q) for q in ps)) for x, ps in cpt)
        n_in, n_out = len(self.input_labels), len(self.output_labels)
        if not dist:
            raise ValueError("input distribution is empty")
        if any(len(x) != n_in for x, _ in dist) or any(len(x) != n_in for x, _ in cpt):
            raise ValueError(f"every input tuple needs {n_in} values")
        if any(p < 0 or p > 1 for _, p in dist) or abs(sum(p for _, p in dist) - 1) > ROW_TOL:
            raise ValueError("input distribution must be a probability vector")
        table = dict(cpt)
        for x, _ in dist:
            if x not in table:
                raise ValueError(f"no output probabilities for input {format_state(x)}")
        for x, ps in cpt:
            if len(ps) != n_out or any(q < 0 or q > 1 for q in ps):
                raise ValueError(f"output probabilities for input {format_state(x)} must be {n_out} values in [0, 1]")
        object.__setattr__(self, "input_labels", tuple(self.input_labels))
        object.__setattr__(self, "output_labels", tuple(self.output_labels))
        object.__setattr__(self, "input_distribution", dist)
        object.__setattr__(self, "output_probabilities", cpt)

    @classmethod
    def from_function(
        cls,
        input_labels: Sequence[str],
        output_labels: Sequence[str],
        input_distribution: Mapping[tuple, float],
        probabilities: Callable[[tuple], Sequence[float]],
    ) -> LayeredStochasticNet:
        """Tabulate an arbitrary input -> output-probability map on the input support."""
        cpt = {tuple(x): tuple(probabilities(tuple(x))) for x in input_distribution}
        return cls(tuple(input_labels), tuple(output_labels), tuple(input_distribution.items()), tuple(cpt.items()))

    @property
    def labels(self) -> tuple[str, ...]:
        return self.input_labels + self.output_labels

    def probabilities_for(self, x: Sequence[float]) -> tuple[float, ...]:
        return dict(self.output_probabilities)[tuple(float(v) for v in x)]

    def states(self) -> list[tuple[float, ...]]:
        outs = list(product((0.0, 1.0), repeat=len(self.output_labels)))
        return [x + y for x, _ in self.input_distribution for y in outs]

    def output_distribution(self) -> dict[tuple[float, ...], float]:
        """Limiting probability of each output pattern, marginalised over the input."""
        out = {}
        for y in product((0.0, 1.0), repeat=len(self.output_labels)):
            out[y] = sum(p * _bernoulli(self.probabilities_for(x), y) for x, p in self.input_distribution)
        return out

    def to_chain(self) -> MarkovChain:
        """The full transition matrix over (input, output) states."""
        states = self.states()
        n_in = len(self.input_labels)
        matrix = np.zeros((len(states), len(states)))
        for i, s in enumerate(states):
            ps = self.probabilities_for(s[:n_in])
            for j, t in enumerate(states):
                matrix[i, j] = dict(self.input_distribution)[t[:n_in]] * _bernoulli(ps, t[n_in:])
        return MarkovChain.from_dense(states, matrix, labels=self.labels)


def _bernoulli(ps: Sequence[float], ys: Sequence[float]) -> float:
    out = 1.0
    for q, y in zip(ps, ys):
        out *= q if y == 1.0 else 1.0 - q
    return out


StochasticNetwork = MarkovChain | LayeredStochasticNet


@dataclass(frozen=True, eq=False)
class LimitingDistribution:
    """Limiting (or, for periodic chains, time-averaged) mass of every state.

    ``x_p_inf`` holds the states whose mass exceeds ``epsilon``;
    ``support_stable`` records that halving ``epsilon`` leaves it unchanged.
    """

    labels: tuple[str, ...]
    states: tuple[tuple[float, ...], ...]
    probabilities: np.ndarray
    epsilon: float
    x_p_inf: tuple[tuple[float, ...], ...]
    support_stable: bool
    residual: float
    periodic: bool = False
    period: int = 1
    method: str = "exact"

    def mass(self, state: Sequence[float]) -> float:
        key = tuple(float(v) for v in state)
        return float(self.probabilities[self.states.index(key)])

    def as_dict(self) -> dict[tuple[float, ...], float]:
        return {s: float(p) for s, p in zip(self.states, self.probabilities)}


def _support(probs: np.ndarray, epsilon: float) -> np.ndarray:
    return probs > epsilon * probs.sum()


def _package(labels, states, probs, epsilon, residual, period, method) -> LimitingDistribution:
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    probs.setflags(write=False)
    keep = _support(probs, epsilon)
    stable = bool(np.array_equal(keep, _support(probs, epsilon / 2)))
    x_p_inf = tuple(s for s, k in zip(states, keep) if k)
    if not x_p_inf:
        raise NonConvergenceError("no state carries limiting mass above epsilon")
    return LimitingDistribution(
        tuple(labels), tuple(states), probs, epsilon, x_p_inf, stable, float(residual), period > 1, period, method
    )


def _class_period(sub: sparse.csr_matrix) -> int:
    """Period of an irreducible class: gcd of level differences along its edges."""
    size = sub.shape[0]
    level = np.full(size, -1, dtype=np.int64)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sub.indices[sub.indptr[u] : sub.indptr[u + 1]]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    coo = sub.tocoo()
    return int(np.gcd.reduce(np.abs(level[coo.row] + 1 - level[coo.col])))


def _stationary(sub: sparse.csr_matrix) -> np.ndarray:
    size = sub.shape[0]
    if size == 1:
        return np.ones(1)
    system = (sub.T - sparse.identity(size, format="csr")).tolil()
    system[size - 1, :] = np.ones(size)
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    pi = spsolve(system.tocsc(), rhs)
    return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()


@dataclass(frozen=True)
class ChainStructure:
    """Closed classes (as state-index arrays) with their periods."""

    classes: tuple[np.ndarray, ...]
    periods: tuple[int, ...]
    transient: np.ndarray


def chain_structure(chain: MarkovChain) -> ChainStructure:
    t = chain.transition
    _, comp = connected_components(t, directed=True, connection="strong")
    rows, cols = t.nonzero()
    leaving = comp[rows] != comp[cols]
    is_open = np.zeros(comp.max() + 1, dtype=bool)
    is_open[comp[rows[leaving]]] = True
    classes, periods = [], []
    for c in np.nonzero(~is_open)[0]:
        idx = np.nonzero(comp == c)[0]
        classes.append(idx)
        periods.append(1 if len(idx) == 1 else _class_period(t[idx][:, idx]))
    transient = np.nonzero(is_open[comp])[0]
    return ChainStructure(tuple(classes), tuple(periods), transient)


def _exact_chain(chain: MarkovChain) -> tuple[np.ndarray, int]:
    t = chain.transition
    n = chain.n
    structure = chain_structure(chain)
    weight = np.array([chain.initial[idx].sum() for idx in structure.classes])
    tr = structure.transient
    if len(tr):
        # mass eventually absorbed into each class: mu_T (I - Q)^-1 R 1_class
        q = t[tr][:, tr]
        carried = spsolve((sparse.identity(len(tr), format="csc") - q).T.tocsc(), chain.initial[tr])
        carried = np.atleast_1d(carried)
        for k, idx in enumerate(structure.classes):
            into = np.asarray(t[tr][:, idx].sum(axis=1)).reshape(-1)
            weight[k] += float(carried @ into)
    probs = np.zeros(n)
    period = 1
    for idx, per, w in zip(structure.classes, structure.periods, weight):
        if w <= 0:
            continue
        probs[idx] = w * _stationary(t[idx][:, idx])
        period = math.lcm(period, per)
    return probs / probs.sum(), period


def _residual(chain: MarkovChain, probs: np.ndarray) -> float:
    return float(np.abs(chain.transition.T @ probs - probs).sum())


def power_iteration(
    chain: MarkovChain, tol: float = 1e-12, max_iter: int = 100_000, epsilon: float = DEFAULT_EPSILON
) -> LimitingDistribution:
    """Iterate the initial distribution until ``||mu T - mu||_1 <= tol``.

    Raises NonConvergenceError when the budget runs out; the error carries the
    chain's period when it is periodic.
    """
    mu = chain.initial.copy()
    t_transpose = chain.transition.T.tocsr()
    for _ in range(max_iter):
        nxt = t_transpose @ mu
        if np.abs(nxt - mu).sum() <= tol:
            return _package(chain.labels, chain.states, nxt, epsilon, _residual(chain, nxt), 1, "power")
        mu = nxt
    _, period = _exact_chain(chain)
    if period > 1:
        raise NonConvergenceError(f"chain is periodic with period {period}; no limiting distribution", period)
    raise NonConvergenceError(f"power iteration did not converge within {max_iter} iterations")


def limiting_distribution(
    snet: StochasticNetwork,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    epsilon: float = DEFAULT_EPSILON,
    method: str = "exact",
    allow_periodic: bool = True,
) -> LimitingDistribution:
    """Limiting distribution of a stochastic network.

    ``method`` is ``exact`` (closed form for layered nets, class
    decomposition for chains) or ``power``.  With ``allow_periodic=False`` a
    periodic chain raises NonConvergenceError instead of returning its time
    average.
    """
    if method not in ("exact", "power"):
        raise ValueError(f"unknown method {method!r}")
    if isinstance(snet, LayeredStochasticNet) and method == "exact":
        outputs = snet.output_distribution()
        states, probs = [], []
        for x, p in snet.input_distribution:
            for y, q in outputs.items():
                states.append(x + y)
                probs.append(p * q)
        return _package(snet.labels, states, probs, epsilon, 0.0, 1, "closed-form")
    chain = snet.to_chain() if isinstance(snet, LayeredStochasticNet) else snet
    if method == "power":
        return power_iteration(chain, tol, max_iter, epsilon)
    probs, period = _exact_chain(chain)
    if period > 1 and not allow_periodic:
        raise NonConvergenceError(f"chain is periodic with period {period}; no limiting distribution", period)
    residual = _residual(chain, probs)
    if residual > max(tol, 1e-9):
        raise NonConvergenceError(f"stationarity residual {residual:.3g} exceeds tolerance")
    return _package(chain.labels, chain.states, probs, epsilon, residual, period, "exact")


def fid_prob(
    snet: StochasticNetwork | LimitingDistribution,
    enc,
    kb,
    agg=Agg.UNION,
    epsilon: float = DEFAULT_EPSILON,
) -> FidelityReport:
    """Limiting probability that the current state's interpretations all model ``kb``.

    Only union aggregation is defined for this measure.
    """
    if _agg(agg) is not Agg.UNION:
        raise EncodingError("the probabilistic fidelity measure is defined for union aggregation only")
    missing = sorted(kb_atoms(kb) - set(enc.universe))
    if missing:
        raise UniverseMismatch(f"knowledge-base atoms {missing} are not housed by the encoding")
    dist = snet if isinstance(snet, LimitingDistribution) else limiting_distribution(snet, epsilon=epsilon)
    m_l = kb_models(kb, enc.universe)
    rows = []
    total = 0.0
    for s, p in zip(dist.states, dist.probabilities):
        if p <= 0.0:
            continue
        ok = enc.interpret(s).issubset(m_l)
        rows.append(FidelityRow(s, float(p), ok))
        if ok:
            total += float(p)
    notes = ("periodic chain: masses are time averages",) if dist.periodic else ()
    return FidelityReport("prob", min(total, 1.0), tuple(rows), notes)


class SemanticLoss(NamedTuple):
    loss: float
    probability: float


def _satisfaction_probability(kb, p: Sequence[float], atoms: Sequence[str] | None) -> tuple[float, tuple[str, ...]]:
    atoms = tuple(sorted(kb_atoms(kb))) if atoms is None else tuple(atoms)
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape != (len(atoms),):
        raise ValueError(f"expected {len(atoms)} probabilities, got {p.shape[0]}")
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ValueError("probabilities must lie in [0, 1]")
    missing = sorted(kb_atoms(kb) - set(atoms))
    if missing:
        raise UniverseMismatch(f"knowledge-base atoms {missing} have no probability")
    total = 0.0
    for mask, value in kb_models(kb, atoms).disjoint_cubes():
        term = 1.0
        for i in range(len(atoms)):
            if mask >> i & 1:
                term *= p[i] if value >> i & 1 else 1.0 - p[i]
        total += term
    return min(float(total), 1.0), atoms


def semantic_loss(kb, p: Sequence[float], atoms: Sequence[str] | None = None) -> SemanticLoss:
    """Negative log probability that independent Bernoulli(p) atoms satisfy ``kb``.

    ``atoms`` orders ``p``; it defaults to the kb's atoms sorted.  The
    probability is summed over a disjoint cube cover of the models, which is
    exact.
    """
    total, _ = _satisfaction_probability(kb, p, atoms)
    if total <= 0.0:
        warnings.warn("knowledge base has probability zero; loss is infinite", SemanticLossWarning, stacklevel=2)
        return SemanticLoss(math.inf, 0.0)
    return SemanticLoss(-math.log(total), total)


def expected_satisfaction(snet: LayeredStochasticNet, kb, atoms: Sequence[str] | None = None) -> float:
    """Average of exp(-loss) over the input distribution.

    ``atoms`` names the output units in order (default: their labels).
    """
    atoms = snet.output_labels if atoms is None else tuple(atoms)
    total = 0.0
    for x, weight in snet.input_distribution:
        total += weight * _satisfaction_probability(kb, snet.probabilities_for(x), atoms)[0]
    return total


__all__ = [
    "MarkovChain",
    "LayeredStochasticNet",
    "LimitingDistribution",
    "ChainStructure",
    "SemanticLoss",
    "SemanticLossWarning",
    "chain_structure",
    "embed_deterministic",
    "limiting_distribution",
    "power_iteration",
    "fid_prob",
    "semantic_loss",
    "expected_satisfaction",
]
