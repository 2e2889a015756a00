"""Sets of interpretations represented as unions of cubes.

A cube is a partial assignment; it denotes every total interpretation that
extends it.  Internally a cube over a universe of ``n`` atoms is a pair of
integers ``(mask, value)``: bit ``i`` of ``mask`` says atom ``i`` is fixed and
bit ``i`` of ``value`` gives its truth value.  An interpretation is the integer
whose bit ``i`` is the truth value of atom ``i``.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from functools import lru_cache

import numpy as np

from .errors import UniverseMismatch

EXPANSION_CAP = 20

Cube = tuple[int, int]


def _cube_meet(c: Cube, d: Cube) -> Cube | None:
    shared = c[0] & d[0]
    if (c[1] ^ d[1]) & shared:
        return None
    return (c[0] | d[0], c[1] | d[1])


def _cube_within(c: Cube, d: Cube) -> bool:
    """True when cube c denotes a subset of cube d."""
    return (d[0] & ~c[0]) == 0 and (c[1] & d[0]) == d[1]


def _cube_minus(c: Cube, d: Cube) -> list[Cube]:
    """Disjoint cubes covering c minus d."""
    if _cube_meet(c, d) is None:
        return [c]
    pieces = []
    mask, value = c
    free = d[0] & ~mask
    while free:
        bit = free & -free
        free ^= bit
        pieces.append((mask | bit, value | (~d[1] & bit)))
        mask |= bit
        value |= d[1] & bit
    return pieces


@lru_cache(maxsize=8)
def _all_indices(n: int) -> np.ndarray:
    out = np.arange(2**n, dtype=np.int64)
    out.setflags(write=False)
    return out


class ModelSet:
    """An immutable set of interpretations over a fixed, ordered atom universe.

    ``==`` compares the denoted sets, not the cube lists.
    """

    __slots__ = ("universe", "cubes", "_index")

    def __init__(self, universe: Sequence[str], cubes: Iterable[Cube] = ()):
        universe = tuple(universe)
        if len(set(universe)) != len(universe):
            raise ValueError("atom names in a universe must be unique")
        full = (1 << len(universe)) - 1
        normal = {(m & full, v & m & full) for m, v in cubes}
        kept = [c for c in normal if not any(d != c and _cube_within(c, d) for d in normal)]
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "cubes", tuple(sorted(kept)))
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(universe)})

    def __setattr__(self, name, value):
        raise AttributeError("ModelSet is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def full(cls, universe: Sequence[str]) -> ModelSet:
        return cls(universe, [(0, 0)])

    @classmethod
    def empty(cls, universe: Sequence[str]) -> ModelSet:
        return cls(universe, [])

    @classmethod
    def from_assignments(cls, universe: Sequence[str], assignments: Iterable[Mapping[str, bool]]) -> ModelSet:
        """Union of cubes given as partial atom -> bool maps."""
        universe = tuple(universe)
        index = {a: i for i, a in enumerate(universe)}
        cubes = []
        for assignment in assignments:
            mask = value = 0
            for name, truth in assignment.items():
                if name not in index:
                    raise UniverseMismatch(f"atom {name!r} is not in the universe")
                mask |= 1 << index[name]
                value |= int(bool(truth)) << index[name]
            cubes.append((mask, value))
        return cls(universe, cubes)

    @classmethod
    def cube(cls, universe: Sequence[str], assignment: Mapping[str, bool]) -> ModelSet:
        return cls.from_assignments(universe, [assignment])

    @classmethod
    def from_interpretations(cls, universe: Sequence[str], interpretations: Iterable[Iterable[str]]) -> ModelSet:
        """Each interpretation is given as the set of its true atoms."""
        universe = tuple(universe)
        full = (1 << len(universe)) - 1
        index = {a: i for i, a in enumerate(universe)}
        cubes = []
        for true_atoms in interpretations:
            value = 0
            for name in true_atoms:
                if name not in index:
                    raise UniverseMismatch(f"atom {name!r} is not in the universe")
                value |= 1 << index[name]
            cubes.append((full, value))
        return cls(universe, cubes)

    @classmethod
    def from_truth_table(cls, universe: Sequence[str], table: np.ndarray) -> ModelSet:
        """Compress a boolean array indexed by interpretation into disjoint cubes.

        Uses Shannon splitting on the highest atom first, so the cubes returned
        never overlap.
        """
        universe = tuple(universe)
        table = np.asarray(table, dtype=bool)
        if table.shape != (2 ** len(universe),):
            raise ValueError("truth table length must be 2**len(universe)")
        cubes: list[Cube] = []

        def split(lo: int, hi: int, var: int, mask: int, value: int):
            block = table[lo:hi]
            if block.all():
                cubes.append((mask, value))
                return
            if not block.any():
                return
            mid = (lo + hi) // 2
            bit = 1 << var
            split(lo, mid, var - 1, mask | bit, value)
            split(mid, hi, var - 1, mask | bit, value | bit)

        split(0, len(table), len(universe) - 1, 0, 0)
        return cls(universe, cubes)

    # queries ------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.universe)

    def is_empty(self) -> bool:
        return not self.cubes

    def __bool__(self) -> bool:
        return not self.is_empty()

    def _check(self, other: ModelSet):
        if not isinstance(other, ModelSet):
            raise TypeError(f"expected a ModelSet, got {type(other).__name__}")
        if other.universe != self.universe:
            raise UniverseMismatch(f"universes differ: {self.universe} vs {other.universe}")

    def to_truth_table(self) -> np.ndarray:
        if self.n > EXPANSION_CAP:
            raise ValueError(f"expansion is limited to {EXPANSION_CAP} atoms")
        idx = _all_indices(self.n)
        out = np.zeros(len(idx), dtype=bool)
        for mask, value in self.cubes:
            out |= (idx & mask) == value
        return out

    def disjoint_cubes(self) -> tuple[Cube, ...]:
        """An equivalent cover in which no two cubes overlap."""
        out: list[Cube] = []
        for c in self.cubes:
            pieces = [c]
            for d in out:
                pieces = [p for q in pieces for p in _cube_minus(q, d)]
            out.extend(pieces)
        return tuple(out)

    def count(self) -> int:
        return sum(2 ** (self.n - bin(m).count("1")) for m, _ in self.disjoint_cubes())

    def contains(self, true_atoms: Iterable[str]) -> bool:
        value = self._encode(true_atoms)
        return any((value & m) == v for m, v in self.cubes)

    def __contains__(self, true_atoms) -> bool:
        return self.contains(true_atoms)

    def _encode(self, true_atoms: Iterable[str]) -> int:
        value = 0
        for name in true_atoms:
            if name not in self._index:
                raise UniverseMismatch(f"atom {name!r} is not in the universe")
            value |= 1 << self._index[name]
        return value

    def _decode(self, value: int) -> frozenset[str]:
        return frozenset(a for i, a in enumerate(self.universe) if value >> i & 1)

    def interpretations(self) -> list[frozenset[str]]:
        """Every member, as its set of true atoms, in increasing integer order."""
        return [self._decode(int(v)) for v in np.nonzero(self.to_truth_table())[0]]

    def pick(self) -> frozenset[str] | None:
        """Some member (unconstrained atoms false), or None when empty."""
        if not self.cubes:
            return None
        return self._decode(self.cubes[0][1])

    def assignments(self) -> list[dict[str, bool]]:
        """The cubes as partial atom -> bool maps."""
        return [
            {a: bool(v >> i & 1) for i, a in enumerate(self.universe) if m >> i & 1}
            for m, v in self.cubes
        ]

    # algebra ------------------------------------------------------------
    def union(self, other: ModelSet) -> ModelSet:
        self._check(other)
        return ModelSet(self.universe, self.cubes + other.cubes)

    def intersect(self, other: ModelSet) -> ModelSet:
        self._check(other)
        cubes = [m for c in self.cubes for d in other.cubes if (m := _cube_meet(c, d)) is not None]
        return ModelSet(self.universe, cubes)

    def difference(self, other: ModelSet) -> ModelSet:
        self._check(other)
        cubes = list(self.cubes)
        for d in other.cubes:
            cubes = [p for c in cubes for p in _cube_minus(c, d)]
        return ModelSet(self.universe, cubes)

    def issubset(self, other: ModelSet) -> bool:
        self._check(other)
        if self.n <= EXPANSION_CAP:
            return not np.any(self.to_truth_table() & ~other.to_truth_table())
        return self.difference(other).is_empty()

    def equals(self, other: ModelSet) -> bool:
        self._check(other)
        if self.n <= EXPANSION_CAP:
            return bool(np.array_equal(self.to_truth_table(), other.to_truth_table()))
        return self.difference(other).is_empty() and other.difference(self).is_empty()

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, ModelSet):
            return NotImplemented
        return self.universe == other.universe and self.equals(other)

    __hash__ = None

    # universes ----------------------------------------------------------
    def lift(self, universe: Sequence[str]) -> ModelSet:
        """The same constraints over a larger (or reordered) universe."""
        universe = tuple(universe)
        if universe == self.universe:
            return self
        index = {a: i for i, a in enumerate(universe)}
        missing = [a for a in self.universe if a not in index]
        if missing:
            raise UniverseMismatch(f"atoms {missing} are missing from the target universe")
        moves = [(i, index[a]) for i, a in enumerate(self.universe)]
        cubes = []
        for m, v in self.cubes:
            nm = nv = 0
            for old, new in moves:
                if m >> old & 1:
                    nm |= 1 << new
                    nv |= (v >> old & 1) << new
            cubes.append((nm, nv))
        return ModelSet(universe, cubes)

    def project(self, atoms: Sequence[str]) -> ModelSet:
        """Existential projection onto a subset of the atoms."""
        atoms = tuple(atoms)
        missing = [a for a in atoms if a not in self._index]
        if missing:
            raise UniverseMismatch(f"atoms {missing} are not in the universe")
        moves = [(self._index[a], i) for i, a in enumerate(atoms)]
        cubes = []
        for m, v in self.cubes:
            nm = nv = 0
            for old, new in moves:
                if m >> old & 1:
                    nm |= 1 << new
                    nv |= (v >> old & 1) << new
            cubes.append((nm, nv))
        return ModelSet(atoms, cubes)

    def __repr__(self):
        return f"ModelSet({self.universe!r}, {format_cubes(self)})"


def format_cubes(ms: ModelSet) -> str:
    if ms.is_empty():
        return "{}"
    parts = []
    for assignment in ms.assignments():
        inner = ", ".join(f"{a}={'T' if t else 'F'}" for a, t in assignment.items())
        parts.append("{" + inner + "}")
    return " | ".join(parts)


def modelset_algebra(op: str, a: ModelSet, b: ModelSet):
    """Dispatch ``union``, ``intersect``, ``subset``, ``equal`` or ``empty``.

    ``empty`` reports whether the intersection of ``a`` and ``b`` is empty.
    """
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "subset":
        return a.issubset(b)
    if op == "equal":
        return a.equals(b)
    if op == "empty":
        return a.intersect(b).is_empty()
    raise ValueError(f"unknown model-set operation {op!r}")
