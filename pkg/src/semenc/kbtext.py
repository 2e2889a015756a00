"""Line-oriented text format for knowledge bases.

A document starts with the header ``%semenc kb 1``.  Every other non-blank
line is one sentence; ``#`` starts a comment.  Four sentence shapes exist and
one document may use only one of them:

* ``formula`` -- a classical sentence
* ``c : formula`` -- a penalty sentence with confidence ``c`` (``inf`` allowed)
* ``[a, b] : formula`` -- a fuzzy sentence labelled with an interval
* ``head <- l1 & l2 & ~l3.`` or ``head.`` -- a program clause

Directives: ``%universe A B C`` declares extra atoms; ``%constants a b``
grounds rules whose arguments contain variables (terms starting with an
uppercase letter or ``_``).

Formula grammar, loosest binding first::

    formula := quant | iff
    quant   := ("forall" | "exists") NAME "in" "{" NAME ("," NAME)* "}" ":" formula
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := ("~" | "!" | "not") unary | quant | primary
    primary := "true" | "false" | atom | "(" formula ")"
    atom    := NAME ("(" NAME ("," NAME)* ")")?

Unicode connectives (¬ ∧ ∨ → ↔ ←) are accepted as synonyms.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import ParseError
from .formula import Atom, Const, Exists, Forall, Formula, Iff, Implies, Not, And, Or
from .logic import Clause, LogicProgram, PenaltyKB, Rule, ground

HEADER = "%semenc kb 1"

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<iff><->|↔)
  | (?P<larrow><-|←)
  | (?P<arrow>->|→)
  | (?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[()\[\]{},:.&|~!¬∧∨])
    """,
    re.VERBOSE,
)
_SYNONYM = {"¬": "~", "!": "~", "∧": "&", "∨": "|"}


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "sym":
                tok = _SYNONYM.get(tok, tok)
            elif kind == "name" and tok == "not":
                kind, tok = "sym", "~"
            out.append(Token(kind, tok, pos + 1))
        pos = m.end()
    out.append(Token("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.i = 0
        self.line = line

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of line"
        raise ParseError(f"{message}, found {found!r}", self.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("sym", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            self.error(f"expected {text!r}")
        return tok

    def name(self) -> str:
        tok = self.tok
        if tok.kind != "name":
            self.error("expected a name")
        self.i += 1
        return tok.text

    def number(self) -> float:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return float(tok.text)
        if tok.kind == "name" and tok.text in ("inf", "infinity"):
            self.i += 1
            return math.inf
        self.error("expected a number")

    # formulas -----------------------------------------------------------
    def formula(self) -> Formula:
        if self.tok.kind == "name" and self.tok.text in ("forall", "exists"):
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        kind = self.name()
        var = self.name()
        self.expect("in")
        self.expect("{")
        domain = [self.name()]
        while self.accept(","):
            domain.append(self.name())
        self.expect("}")
        self.expect(":")
        body = self.formula()
        cls = Forall if kind == "forall" else Exists
        return cls(var, tuple(domain), body)

    def iff(self) -> Formula:
        left = self.imp()
        while self.tok.kind == "iff":
            self.i += 1
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "arrow":
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.accept("|"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("~"):
            return Not(self.unary())
        if self.tok.kind == "name" and self.tok.text in ("forall", "exists"):
            return self.quant()
        return self.primary()

    def primary(self) -> Formula:
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        if self.tok.kind == "name":
            if self.tok.text == "true":
                self.i += 1
                return Const(True)
            if self.tok.text == "false":
                self.i += 1
                return Const(False)
            return self.atom()
        self.error("expected a formula")

    def atom(self) -> Atom:
        pred = self.name()
        args = []
        if self.accept("("):
            args.append(self.name())
            while self.accept(","):
                args.append(self.name())
            self.expect(")")
        return Atom(pred, tuple(args))

    def done(self):
        if self.tok.kind != "end":
            self.error("unexpected trailing input")


def parse_formula(text: str) -> Formula:
    p = _Parser(tokenize(text), 1)
    f = p.formula()
    p.done()
    return f


@dataclass
class KBDocument:
    """A parsed knowledge-base file.

    ``kind`` is ``formulas``, ``penalty``, ``fuzzy`` or ``program`` (``None``
    for a document with no sentences).
    """

    kind: str | None = None
    formulas: list[Formula] = field(default_factory=list)
    penalty: list[tuple[float, Formula]] = field(default_factory=list)
    fuzzy: list[tuple[float, float, Formula]] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)
    universe: list[str] = field(default_factory=list)
    constants: list[str] = field(default_factory=list)

    def atoms(self) -> list[str]:
        """Declared universe followed by every other mentioned atom, sorted."""
        value = self.value()
        if isinstance(value, LogicProgram):
            mentioned = set(value.atoms)
        elif isinstance(value, PenaltyKB):
            mentioned = set(value.atoms())
        elif self.kind == "fuzzy":
            mentioned = set().union(*(s.formula.atoms() for s in value)) if value else set()
        else:
            mentioned = set().union(*(f.atoms() for f in value)) if value else set()
        extra = sorted(mentioned - set(self.universe))
        return list(self.universe) + extra

    def value(self):
        """The typed knowledge base this document describes."""
        if self.kind == "penalty":
            return PenaltyKB(tuple(self.penalty))
        if self.kind == "fuzzy":
            from .fuzzy import FuzzySentence

            return [FuzzySentence(f, lo, hi) for lo, hi, f in self.fuzzy]
        if self.kind == "program":
            needs_grounding = any(r.variables() or r.constants() for r in self.rules)
            if needs_grounding and self.constants:
                prog = ground(self.rules, self.constants)
            elif any(r.variables() for r in self.rules):
                raise ParseError("rules contain variables but no %constants directive")
            else:
                prog = LogicProgram(
                    tuple(Clause(r.head.name, tuple((b.name, p) for b, p in r.body)) for r in self.rules)
                )
            extra = [a for a in self.universe if a not in prog.atoms]
            if extra:
                prog = LogicProgram(prog.clauses, tuple(sorted(set(prog.atoms) | set(extra))))
            return prog
        return list(self.formulas)


def _classify(tokens: list[Token]) -> str:
    if tokens[0].text == "[":
        return "fuzzy"
    if (tokens[0].kind == "num" or tokens[0].text in ("inf", "infinity")) and tokens[1].text == ":":
        return "penalty"
    depth = 0
    for t in tokens:
        if t.text in "([{" and t.kind == "sym":
            depth += 1
        elif t.text in ")]}" and t.kind == "sym":
            depth -= 1
        elif t.kind == "larrow" and depth == 0:
            return "program"
    if len(tokens) >= 2 and tokens[-2].text == "." and tokens[-2].kind == "sym":
        return "program"
    return "formulas"


def parse_kb(text: str, require_header: bool = True) -> KBDocument:
    doc = KBDocument()
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("%"):
            words = line[1:].split()
            if not words:
                raise ParseError("empty directive", lineno, 1)
            if words[0] == "semenc":
                if saw_header or doc.kind is not None:
                    raise ParseError("header must appear once, before any sentence", lineno, 1)
                if words[1:] != ["kb", "1"]:
                    raise ParseError(f"unsupported header {line!r}; expected {HEADER!r}", lineno, 1)
                saw_header = True
            elif words[0] == "universe":
                doc.universe.extend(w.strip(",") for w in words[1:] if w.strip(","))
            elif words[0] == "constants":
                doc.constants.extend(w.strip(",") for w in words[1:] if w.strip(","))
            else:
                raise ParseError(f"unknown directive %{words[0]}", lineno, 1)
            continue
        if require_header and not saw_header:
            raise ParseError(f"missing header {HEADER!r}", lineno, 1)
        tokens = tokenize(raw.split("#", 1)[0], lineno)
        kind = _classify(tokens)
        if doc.kind is None:
            doc.kind = kind
        elif doc.kind != kind:
            raise ParseError(f"{kind} sentence in a {doc.kind} document", lineno, tokens[0].col)
        p = _Parser(tokens, lineno)
        if kind == "penalty":
            c = p.number()
            if c < 0:
                raise ParseError("confidence must be non-negative", lineno, tokens[0].col)
            p.expect(":")
            doc.penalty.append((c, p.formula()))
        elif kind == "fuzzy":
            p.expect("[")
            lo = p.number()
            p.expect(",")
            hi = p.number()
            close = p.expect("]")
            if not 0.0 <= lo <= hi <= 1.0:
                raise ParseError(f"interval [{lo:g}, {hi:g}] must satisfy 0 <= a <= b <= 1", lineno, close.col)
            p.expect(":")
            doc.fuzzy.append((lo, hi, p.formula()))
        elif kind == "program":
            head = p.atom()
            body: list[tuple[Atom, bool]] = []
            if p.tok.kind == "larrow":
                p.i += 1
                if p.tok.text != ".":
                    while True:
                        positive = not p.accept("~")
                        body.append((p.atom(), positive))
                        if not p.accept("&"):
                            break
            p.expect(".")
            doc.rules.append(Rule(head, tuple(body)))
        else:
            doc.formulas.append(p.formula())
        p.done()
    if require_header and not saw_header:
        raise ParseError(f"missing header {HEADER!r}", 1, 1)
    return doc


def _fmt(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def format_kb(kb, universe=()) -> str:
    """Inverse of :func:`parse_kb` for formulas, penalty KBs, fuzzy KBs and programs."""
    lines = [HEADER]
    if universe:
        lines.append("%universe " + " ".join(universe))
    if isinstance(kb, LogicProgram):
        lines.extend(str(c) for c in kb.clauses)
    elif isinstance(kb, PenaltyKB):
        lines.extend(f"{_fmt(c)} : {f}" for c, f in kb.sentences)
    else:
        for item in kb:
            if isinstance(item, Formula):
                lines.append(str(item))
            else:
                lines.append(f"[{_fmt(item.lower)}, {_fmt(item.upper)}] : {item.formula}")
    return "\n".join(lines) + "\n"

