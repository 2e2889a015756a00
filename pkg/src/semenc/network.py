"""Candidate networks as finite dynamical systems.

A network holds a weight matrix with ``weights[j, i]`` the weight of the
connection from neuron ``j`` to neuron ``i``, so the net input of neuron ``i``
is ``sum_j weights[j, i] * x[j] + biases[i]``.  Every neuron has a finite value
domain; stepping a state always lands back inside the product of domains.

The heaviside unit is inclusive at zero: ``heaviside(0) == 1``.  Many libraries
use the opposite convention, so the behaviour at exactly zero is configurable
per transfer function through ``at_zero``.
"""
from __future__ import annotations

import graphlib
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import DomainError, NotHopfieldError, StateSpaceTooLarge

DEFAULT_STATE_CAP = 2**20
# tolerance for matching computed values against domain or table entries
VALUE_TOL = 1e-9
# inputs within this distance of zero count as exactly zero for threshold units
THRESHOLD_TOL = 1e-12
# fan-in enumeration budget for the construction-time closure check
_CLOSURE_BUDGET = 2**16

State = tuple


def state_cap() -> int:
    """Current enumeration cap; ``SEMENC_STATE_CAP`` overrides the default."""
    raw = os.environ.get("SEMENC_STATE_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_STATE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"SEMENC_STATE_CAP must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"SEMENC_STATE_CAP must be a positive integer, got {raw!r}")
    return cap


def _snap_positions(values: np.ndarray, domain: np.ndarray, what: str) -> np.ndarray:
    """Index of each value in a sorted domain; raises if any value is absent."""
    top = len(domain) - 1
    pos = np.minimum(np.searchsorted(domain, values), top)
    lower = np.maximum(pos - 1, 0)
    closer = np.abs(domain[lower] - values) < np.abs(domain[pos] - values)
    pos = np.where(closer, lower, pos)
    bad = np.abs(domain[pos] - values) > VALUE_TOL
    if np.any(bad):
        culprit = float(np.asarray(values)[bad].flat[0])
        raise DomainError(f"{what}: value {culprit:g} is not in domain {tuple(domain.tolist())}")
    return pos


@dataclass(frozen=True)
class TransferFn:
    """Activation of a single neuron.

    ``kind`` is one of ``heaviside``, ``identity``, ``sign`` or ``lookup``.
    A lookup transfer maps a finite set of net inputs to outputs; any other
    input is an error.
    """

    kind: str = "heaviside"
    table: tuple[tuple[float, float], ...] = ()
    at_zero: float = 1.0

    KINDS: ClassVar[tuple[str, ...]] = ("heaviside", "identity", "sign", "lookup")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown transfer kind {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "lookup":
            if not self.table:
                raise ValueError("lookup transfer needs a non-empty table")
            rows = tuple(sorted((float(a), float(b)) for a, b in self.table))
            keys = [a for a, _ in rows]
            if any(b - a <= VALUE_TOL for a, b in zip(keys, keys[1:])):
                raise ValueError("lookup table has duplicate inputs")
            object.__setattr__(self, "table", rows)
        elif self.table:
            raise ValueError(f"{self.kind} transfer takes no table")
        if self.kind == "heaviside" and self.at_zero not in (0.0, 1.0):
            raise ValueError("heaviside at_zero must be 0 or 1")

    @classmethod
    def lookup(cls, mapping: Mapping[float, float]) -> TransferFn:
        return cls("lookup", tuple(mapping.items()))

    def codomain(self) -> frozenset[float] | None:
        """Every value this transfer can output, or None if unbounded."""
        if self.kind == "heaviside":
            return frozenset({0.0, 1.0})
        if self.kind == "sign":
            return frozenset({-1.0, 1.0})
        if self.kind == "lookup":
            return frozenset(b for _, b in self.table)
        return None

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.kind == "heaviside":
            return np.where(v > THRESHOLD_TOL, 1.0, np.where(v < -THRESHOLD_TOL, 0.0, self.at_zero))
        if self.kind == "sign":
            return np.where(v < -THRESHOLD_TOL, -1.0, 1.0)
        if self.kind == "identity":
            return v.copy()
        keys = np.array([a for a, _ in self.table])
        outs = np.array([b for _, b in self.table])
        try:
            pos = _snap_positions(v, keys, "lookup transfer")
        except DomainError as exc:
            raise DomainError(f"unmapped lookup input ({exc})") from None
        return outs[pos]


HEAVISIDE = TransferFn("heaviside")
IDENTITY = TransferFn("identity")
SIGN = TransferFn("sign")


@dataclass(frozen=True)
class UpdateMode:
    """How one step visits the neurons.

    ``synchronous`` updates every neuron from the previous state at once.
    ``sweep`` updates neurons one at a time in ``order`` (ascending by default).
    ``random`` draws a single visiting order from ``seed`` and reuses it for
    every sweep, so the step stays a deterministic function of the state.
    """

    kind: str = "synchronous"
    order: tuple[int, ...] | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("synchronous", "sweep", "random"):
            raise ValueError(f"unknown update mode {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random update mode needs a seed")
        if self.order is not None:
            object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    @classmethod
    def synchronous(cls) -> UpdateMode:
        return cls("synchronous")

    @classmethod
    def sweep(cls, order: Sequence[int] | None = None) -> UpdateMode:
        return cls("sweep", None if order is None else tuple(order))

    @classmethod
    def random(cls, seed: int) -> UpdateMode:
        return cls("random", seed=int(seed))

    def visit_order(self, n: int) -> tuple[int, ...]:
        if self.kind == "random":
            return tuple(int(i) for i in np.random.default_rng(self.seed).permutation(n))
        if self.order is not None:
            return self.order
        return tuple(range(n))


def _as_transfer(spec) -> TransferFn:
    if isinstance(spec, TransferFn):
        return spec
    if isinstance(spec, str):
        return TransferFn(spec)
    if isinstance(spec, Mapping):
        return TransferFn.lookup(spec)
    raise TypeError(f"cannot interpret {spec!r} as a transfer function")


@dataclass(frozen=True, eq=False)
class CandidateNetwork:
    """A network with a visible/hidden partition and a computation time.

    One application of :func:`update` runs ``t_c`` steps.
    """

    weights: np.ndarray
    biases: np.ndarray
    transfer: tuple[TransferFn, ...]
    domains: tuple[tuple[float, ...], ...]
    visible: tuple[int, ...]
    t_c: int = 1
    update_mode: UpdateMode = field(default_factory=UpdateMode)
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be a square matrix, got shape {w.shape}")
        n = w.shape[0]
        if n == 0:
            raise ValueError("a network needs at least one neuron")
        b = np.array(self.biases, dtype=float).reshape(-1)
        if b.shape != (n,):
            raise ValueError(f"expected {n} biases, got {b.shape[0]}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

        transfer = self.transfer
        if isinstance(transfer, (TransferFn, str)):
            transfer = [transfer] * n
        transfer = tuple(_as_transfer(t) for t in transfer)
        if len(transfer) != n:
            raise ValueError(f"expected {n} transfer functions, got {len(transfer)}")
        object.__setattr__(self, "transfer", transfer)

        domains = self.domains
        if domains is None:
            domains = [(0.0, 1.0)] * n
        elif len(domains) > 0 and not isinstance(domains[0], Iterable):
            domains = [domains] * n
        domains = tuple(tuple(sorted({float(v) for v in d})) for d in domains)
        if len(domains) != n or any(len(d) == 0 for d in domains):
            raise ValueError("every neuron needs a non-empty finite domain")
        object.__setattr__(self, "domains", domains)

        visible = tuple(sorted({int(i) for i in self.visible}))
        if not visible:
            raise ValueError("the visible set must be non-empty")
        if visible[0] < 0 or visible[-1] >= n:
            raise ValueError("visible neuron index out of range")
        object.__setattr__(self, "visible", visible)

        if int(self.t_c) < 1:
            raise ValueError("t_c must be a positive integer")
        object.__setattr__(self, "t_c", int(self.t_c))

        labels = tuple(self.labels) if self.labels else tuple(f"x{i + 1}" for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise ValueError("labels must be unique, one per neuron")
        object.__setattr__(self, "labels", labels)

        order = self.update_mode.visit_order(n)
        if sorted(order) != list(range(n)):
            raise ValueError("sweep order must be a permutation of the neurons")
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_domain_arrays", tuple(np.array(d) for d in domains))
        self._check_closure()

    @classmethod
    def build(
        cls,
        labels: Sequence[str],
        connections: Iterable[tuple[str, str, float]] = (),
        biases: Mapping[str, float] | Sequence[float] | None = None,
        transfer="heaviside",
        domains=None,
        visible: Iterable[str] | None = None,
        t_c: int = 1,
        update_mode: UpdateMode | None = None,
    ) -> CandidateNetwork:
        """Construct a network from labelled (source, target, weight) connections."""
        labels = tuple(labels)
        index = {name: i for i, name in enumerate(labels)}
        n = len(labels)
        w = np.zeros((n, n))
        for src, dst, weight in connections:
            w[index[src], index[dst]] += weight
        if biases is None:
            b = np.zeros(n)
        elif isinstance(biases, Mapping):
            b = np.array([float(biases.get(name, 0.0)) for name in labels])
        else:
            b = np.array(biases, dtype=float)
        if isinstance(transfer, Mapping) and set(transfer) <= set(labels) and transfer:
            transfer = tuple(_as_transfer(transfer.get(name, "heaviside")) for name in labels)
        if isinstance(domains, Mapping):
            domains = tuple(domains.get(name, (0.0, 1.0)) for name in labels)
        vis = range(n) if visible is None else [index[name] for name in visible]
        return cls(
            weights=w,
            biases=b,
            transfer=transfer,
            domains=domains,
            visible=tuple(vis),
            t_c=t_c,
            update_mode=update_mode or UpdateMode(),
            labels=labels,
        )

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def hidden(self) -> tuple[int, ...]:
        vis = set(self.visible)
        return tuple(i for i in range(self.n) if i not in vis)

    @property
    def visit_order(self) -> tuple[int, ...]:
        return self._order

    @property
    def state_space_size(self) -> int:
        size = 1
        for d in self.domains:
            size *= len(d)
        return size

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no neuron labelled {label!r}") from None

    def is_binary(self) -> bool:
        return all(d == (0.0, 1.0) for d in self.domains)

    def replace(self, **changes) -> CandidateNetwork:
        fields = dict(
            weights=self.weights,
            biases=self.biases,
            transfer=self.transfer,
            domains=self.domains,
            visible=self.visible,
            t_c=self.t_c,
            update_mode=self.update_mode,
            labels=self.labels,
        )
        fields.update(changes)
        return CandidateNetwork(**fields)

    def validate_state(self, s) -> np.ndarray:
        x = np.asarray(s, dtype=float).reshape(-1)
        if x.shape != (self.n,):
            raise DomainError(f"state has {x.shape[0]} values, network has {self.n} neurons")
        out = np.empty(self.n)
        for i, dom in enumerate(self._domain_arrays):
            out[i] = dom[_snap_positions(x[i : i + 1], dom, f"neuron {self.labels[i]}")][0]
        return out

    def _check_closure(self):
        for i, fn in enumerate(self.transfer):
            image = fn.codomain()
            dom = set(self.domains[i])
            if image is not None and fn.kind != "lookup" and image <= dom:
                continue
            fan_in = [j for j in range(self.n) if self.weights[j, i] != 0.0]
            combos = 1
            for j in fan_in:
                combos *= len(self.domains[j])
            if combos > _CLOSURE_BUDGET:
                continue  # checked lazily on every step instead
            grids = np.meshgrid(*[self._domain_arrays[j] for j in fan_in], indexing="ij")
            if fan_in:
                inputs = sum(g.reshape(-1) * self.weights[j, i] for g, j in zip(grids, fan_in))
            else:
                inputs = np.zeros(1)
            out = fn(inputs + self.biases[i])
            _snap_positions(out, self._domain_arrays[i], f"closure of neuron {self.labels[i]}")


def _apply(net: CandidateNetwork, i: int, pre: np.ndarray) -> np.ndarray:
    out = net.transfer[i](pre)
    dom = net._domain_arrays[i]
    return dom[_snap_positions(out, dom, f"neuron {net.labels[i]}")]


def step_batch(net: CandidateNetwork, states) -> np.ndarray:
    """One step applied to every row of an (m, n) array of states."""
    x = np.array(states, dtype=float, ndmin=2)
    if net.update_mode.kind == "synchronous":
        pre = x @ net.weights + net.biases
        for i in range(net.n):
            x[:, i] = _apply(net, i, pre[:, i])
        return x
    for i in net.visit_order:
        x[:, i] = _apply(net, i, x @ net.weights[:, i] + net.biases[i])
    return x


def update_batch(net: CandidateNetwork, states) -> np.ndarray:
    x = np.array(states, dtype=float, ndmin=2)
    for _ in range(net.t_c):
        x = step_batch(net, x)
    return x


def step(net: CandidateNetwork, s) -> State:
    """Apply the update rule once (a full sweep for asynchronous modes)."""
    x = net.validate_state(s)
    return tuple(float(v) for v in step_batch(net, x)[0])


def update(net: CandidateNetwork, s) -> State:
    """Apply ``step`` ``t_c`` times."""
    x = net.validate_state(s)
    return tuple(float(v) for v in update_batch(net, x)[0])


def trajectory(net: CandidateNetwork, s, updates: int) -> list[State]:
    """The start state followed by ``updates`` successive updates."""
    x = net.validate_state(s)[None, :]
    out = [tuple(float(v) for v in x[0])]
    for _ in range(updates):
        x = update_batch(net, x)
        out.append(tuple(float(v) for v in x[0]))
    return out


def _strides(net: CandidateNetwork) -> np.ndarray:
    radices = [len(d) for d in net.domains]
    strides = np.ones(net.n, dtype=np.int64)
    for i in range(net.n - 2, -1, -1):
        strides[i] = strides[i + 1] * radices[i + 1]
    return strides


def enumerate_states(net: CandidateNetwork, cap: int | None = None) -> np.ndarray:
    """All states in mixed-radix order, the first neuron most significant."""
    size = net.state_space_size
    cap = state_cap() if cap is None else cap
    if size > cap:
        raise StateSpaceTooLarge(f"state space has {size} states, cap is {cap} (set SEMENC_STATE_CAP to raise it)")
    idx = np.arange(size, dtype=np.int64)
    strides = _strides(net)
    out = np.empty((size, net.n))
    for i, dom in enumerate(net._domain_arrays):
        out[:, i] = dom[(idx // strides[i]) % len(dom)]
    return out


def state_indices(net: CandidateNetwork, states) -> np.ndarray:
    x = np.array(states, dtype=float, ndmin=2)
    strides = _strides(net)
    idx = np.zeros(x.shape[0], dtype=np.int64)
    for i, dom in enumerate(net._domain_arrays):
        idx += _snap_positions(x[:, i], dom, f"neuron {net.labels[i]}") * strides[i]
    return idx


@dataclass(frozen=True, eq=False)
class TransitionReport:
    """The full successor graph of one network under ``update``.

    ``x_inf_index`` lists (sorted) the states that lie on a cycle; ``cycles``
    holds each cycle as a tuple of state indices starting at its smallest.
    """

    net: CandidateNetwork
    states: np.ndarray
    successor: np.ndarray
    x_inf_index: np.ndarray
    cycles: tuple[tuple[int, ...], ...]

    def state(self, index: int) -> State:
        return tuple(float(v) for v in self.states[index])

    def index_of(self, s) -> int:
        return int(state_indices(self.net, [s])[0])

    @property
    def x_inf(self) -> tuple[State, ...]:
        return tuple(self.state(i) for i in self.x_inf_index)

    @property
    def fixed_points(self) -> tuple[State, ...]:
        return tuple(self.state(c[0]) for c in self.cycles if len(c) == 1)

    def cycle_states(self) -> list[tuple[State, ...]]:
        return [tuple(self.state(i) for i in c) for c in self.cycles]

    def successor_of(self, s) -> State:
        return self.state(self.successor[self.index_of(s)])


def compute_x_inf(net: CandidateNetwork, cap: int | None = None) -> TransitionReport:
    """Enumerate the state space and decompose the successor graph into cycles."""
    states = enumerate_states(net, cap)
    succ = state_indices(net, update_batch(net, states))
    size = len(succ)
    # f^(2^k) with 2^k >= size sends every state onto its cycle; its image is
    # exactly the set of cyclic states
    power = succ.copy()
    reach = 1
    while reach < size:
        power = power[power]
        reach *= 2
    cyclic = np.unique(power)
    seen = np.zeros(size, dtype=bool)
    cycles = []
    for start in cyclic:
        if seen[start]:
            continue
        cycle = [int(start)]
        seen[start] = True
        nxt = succ[start]
        while nxt != start:
            cycle.append(int(nxt))
            seen[nxt] = True
            nxt = succ[nxt]
        cycles.append(tuple(cycle))
    states.setflags(write=False)
    succ.setflags(write=False)
    return TransitionReport(net, states, succ, cyclic, tuple(cycles))


def is_feedforward(net: CandidateNetwork) -> bool:
    """True when the nonzero connections (self-loops included) form a DAG."""
    sorter = graphlib.TopologicalSorter()
    for i in range(net.n):
        sorter.add(i)
    for j, i in zip(*np.nonzero(net.weights)):
        if i == j:
            return False
        sorter.add(int(i), int(j))
    try:
        sorter.prepare()
    except graphlib.CycleError:
        return False
    return True


def check_hopfield(net: CandidateNetwork) -> None:
    """Raise NotHopfieldError unless the net is symmetric, zero-diagonal and binary."""
    w = net.weights
    if not np.array_equal(w, w.T):
        raise NotHopfieldError("weights are not symmetric")
    if np.any(np.diag(w) != 0.0):
        raise NotHopfieldError("weights have a nonzero diagonal")
    if not net.is_binary() or any(t.kind != "heaviside" for t in net.transfer):
        raise NotHopfieldError("units must be binary heaviside neurons")


def energy_batch(net: CandidateNetwork, states) -> np.ndarray:
    x = np.array(states, dtype=float, ndmin=2)
    return -0.5 * np.einsum("mi,ij,mj->m", x, net.weights, x) - x @ net.biases


def hopfield_energy(net: CandidateNetwork, s) -> float:
    """E(s) = -sum_{i<j} w_ij s_i s_j - sum_i b_i s_i."""
    check_hopfield(net)
    return float(energy_batch(net, net.validate_state(s))[0])


def permute(net: CandidateNetwork, order: Sequence[int]) -> CandidateNetwork:
    """The same network with neuron ``k`` of the result being neuron ``order[k]``."""
    order = [int(i) for i in order]
    if sorted(order) != list(range(net.n)):
        raise ValueError("order must be a permutation of the neurons")
    where = {old: new for new, old in enumerate(order)}
    mode = net.update_mode
    if mode.kind != "synchronous":
        mode = UpdateMode.sweep([where[i] for i in net.visit_order])
    return CandidateNetwork(
        weights=net.weights[np.ix_(order, order)],
        biases=net.biases[order],
        transfer=tuple(net.transfer[i] for i in order),
        domains=tuple(net.domains[i] for i in order),
        visible=tuple(where[i] for i in net.visible),
        t_c=net.t_c,
        update_mode=mode,
        labels=tuple(net.labels[i] for i in order),
    )


def format_state(s) -> str:
    return "(" + ",".join(f"{float(v):.9g}" for v in s) + ")"
