"""Propositional formulas with finite-domain quantifiers.

Atoms are either plain names (``A``) or a predicate applied to terms
(``R1(a)``).  Quantifiers range over an explicit finite list of constants and
are eliminated by :meth:`Formula.ground` before any evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce


class Formula:
    """Base class; concrete nodes are frozen dataclasses below."""

    precedence = 9

    def __and__(self, other: Formula) -> Formula:
        return And((self, other))

    def __or__(self, other: Formula) -> Formula:
        return Or((self, other))

    def __invert__(self) -> Formula:
        return Not(self)

    def implies(self, other: Formula) -> Formula:
        return Implies(self, other)

    def iff(self, other: Formula) -> Formula:
        return Iff(self, other)

    def children(self) -> tuple[Formula, ...]:
        return ()

    def substitute(self, var: str, const: str) -> Formula:
        raise NotImplementedError

    def ground(self) -> Formula:
        """Expand every quantifier into a finite conjunction or disjunction."""
        raise NotImplementedError

    def atoms(self) -> frozenset[str]:
        """Names of the ground atoms after quantifier expansion."""
        g = self.ground()
        out: set[str] = set()
        stack = [g]
        while stack:
            node = stack.pop()
            if isinstance(node, Atom):
                out.add(node.name)
            stack.extend(node.children())
        return frozenset(out)

    def holds(self, true_atoms) -> bool:
        """Classical truth under the interpretation whose true atoms are given."""
        return _holds(self.ground(), frozenset(true_atoms))

    def _wrap(self, child: Formula, strict: bool = False) -> str:
        text = str(child)
        if child.precedence < self.precedence or (strict and child.precedence == self.precedence):
            return f"({text})"
        return text


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[str, ...] = ()

    precedence = 9

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def name(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(self.args)})"

    def substitute(self, var, const):
        if var not in self.args:
            return self
        return Atom(self.pred, tuple(const if a == var else a for a in self.args))

    def ground(self):
        return self

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    precedence = 9

    def substitute(self, var, const):
        return self

    def ground(self):
        return self

    def __str__(self):
        return "true" if self.value else "false"


TOP = Const(True)
BOTTOM = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    precedence = 8

    def children(self):
        return (self.arg,)

    def substitute(self, var, const):
        return Not(self.arg.substitute(var, const))

    def ground(self):
        return Not(self.arg.ground())

    def __str__(self):
        return "~" + self._wrap(self.arg)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    precedence = 7

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def children(self):
        return self.args

    def substitute(self, var, const):
        return And(tuple(a.substitute(var, const) for a in self.args))

    def ground(self):
        return And(tuple(a.ground() for a in self.args))

    def __str__(self):
        if not self.args:
            return "true"
        return " & ".join(self._wrap(a, strict=True) for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    precedence = 6

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def children(self):
        return self.args

    def substitute(self, var, const):
        return Or(tuple(a.substitute(var, const) for a in self.args))

    def ground(self):
        return Or(tuple(a.ground() for a in self.args))

    def __str__(self):
        if not self.args:
            return "false"
        return " | ".join(self._wrap(a, strict=True) for a in self.args)


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    precedence = 5

    def children(self):
        return (self.lhs, self.rhs)

    def substitute(self, var, const):
        return Implies(self.lhs.substitute(var, const), self.rhs.substitute(var, const))

    def ground(self):
        return Implies(self.lhs.ground(), self.rhs.ground())

    def __str__(self):
        return f"{self._wrap(self.lhs, strict=True)} -> {self._wrap(self.rhs)}"


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    precedence = 4

    def children(self):
        return (self.lhs, self.rhs)

    def substitute(self, var, const):
        return Iff(self.lhs.substitute(var, const), self.rhs.substitute(var, const))

    def ground(self):
        return Iff(self.lhs.ground(), self.rhs.ground())

    def __str__(self):
        return f"{self._wrap(self.lhs, strict=True)} <-> {self._wrap(self.rhs, strict=True)}"


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    domain: tuple[str, ...]
    body: Formula

    precedence = 0

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))

    def children(self):
        return (self.body,)

    def substitute(self, var, const):
        if var == self.var:
            return self
        return Forall(self.var, self.domain, self.body.substitute(var, const))

    def ground(self):
        return And(tuple(self.body.substitute(self.var, c).ground() for c in self.domain))

    def __str__(self):
        return f"forall {self.var} in {{{', '.join(self.domain)}}}: {self.body}"


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    domain: tuple[str, ...]
    body: Formula

    precedence = 0

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))

    def children(self):
        return (self.body,)

    def substitute(self, var, const):
        if var == self.var:
            return self
        return Exists(self.var, self.domain, self.body.substitute(var, const))

    def ground(self):
        return Or(tuple(self.body.substitute(self.var, c).ground() for c in self.domain))

    def __str__(self):
        return f"exists {self.var} in {{{', '.join(self.domain)}}}: {self.body}"


def _holds(f: Formula, true_atoms: frozenset[str]) -> bool:
    match f:
        case Atom():
            return f.name in true_atoms
        case Const(value=v):
            return v
        case Not(arg=a):
            return not _holds(a, true_atoms)
        case And(args=args):
            return all(_holds(a, true_atoms) for a in args)
        case Or(args=args):
            return any(_holds(a, true_atoms) for a in args)
        case Implies(lhs=l, rhs=r):
            return (not _holds(l, true_atoms)) or _holds(r, true_atoms)
        case Iff(lhs=l, rhs=r):
            return _holds(l, true_atoms) == _holds(r, true_atoms)
    raise TypeError(f"cannot evaluate {f!r}")


def atom(name: str, *args: str) -> Atom:
    return Atom(name, tuple(args))


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(parts)


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(parts)


def atoms_of(formulas) -> frozenset[str]:
    return reduce(frozenset.union, (f.atoms() for f in formulas), frozenset())
