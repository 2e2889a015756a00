"""Small reference networks and knowledge bases used by the demo, the CLI and the tests."""
from __future__ import annotations

from .encoding import DatTriple, EncodingDAT, EncodingNAT
from .formula import Atom, Forall, Formula, Iff, Not, Or, And
from .fuzzy import FuzzySentence
from .logic import LogicProgram, PenaltyKB, clause
from .network import CandidateNetwork, TransferFn
from .stochastic import LayeredStochasticNet

CONSTANTS = ("a", "b", "c", "d")
# selector pattern (x1, x2) -> constant
SELECTOR_CONSTANT = {(1.0, 1.0): "a", (1.0, 0.0): "b", (0.0, 1.0): "c", (0.0, 0.0): "d"}


def or_program() -> LogicProgram:
    """``C <- A``, ``C <- B`` and the fact ``A``."""
    return LogicProgram((clause("C", "A"), clause("C", "B"), clause("A")), ("A", "B", "C"))


def or_program_network(heaviside_at_zero: float = 1.0) -> CandidateNetwork:
    """Feed-forward net (A, B, h, C) computing ``C = A or B`` through a hidden OR unit."""
    step = TransferFn("heaviside", at_zero=heaviside_at_zero)
    return CandidateNetwork.build(
        ["A", "B", "h", "C"],
        [("A", "h", 1.0), ("B", "h", 1.0), ("h", "C", 1.0)],
        {"A": 1.0, "B": -1.0, "h": -1.0, "C": -1.0},
        transfer=step,
        visible=["A", "B", "C"],
    )


def rotation_network(t_c: int = 3) -> CandidateNetwork:
    """Three-neuron ring; one step rotates the state, so three steps are the identity."""
    return CandidateNetwork.build(
        ["x1", "x2", "x3"],
        [("x1", "x2", 1.0), ("x2", "x3", 1.0), ("x3", "x1", 1.0)],
        {"x1": -0.5, "x2": -0.5, "x3": -0.5},
        visible=["x1"],
        t_c=t_c,
    )


def equivalence_oscillator() -> CandidateNetwork:
    """Two mutually inhibiting neurons that oscillate between (0,0) and (1,1)."""
    return CandidateNetwork.build(
        ["A", "B"],
        [("A", "A", -1.0), ("B", "B", -1.0), ("A", "B", -1.5), ("B", "A", -1.5)],
        {"A": 2.0, "B": 2.0},
    )


def equivalence_encoding() -> EncodingNAT:
    return EncodingNAT({"A": 0, "B": 1})


def equivalence_kb() -> list[Formula]:
    a, b = Atom("A"), Atom("B")
    return [Or((And((a, b)), And((Not(a), Not(b)))))]


def relational_or_network() -> CandidateNetwork:
    """Inputs x1, x2 hold themselves; outputs y1 = y2 = x1 or x2."""
    return CandidateNetwork.build(
        ["x1", "x2", "y1", "y2"],
        [
            ("x1", "x1", 1.0),
            ("x2", "x2", 1.0),
            ("x1", "y1", 1.0),
            ("x1", "y2", 1.0),
            ("x2", "y1", 1.0),
            ("x2", "y2", 1.0),
        ],
        {"y1": -0.5, "y2": -0.5},
        transfer={"x1": "identity", "x2": "identity"},
    )


def relational_atoms() -> tuple[str, ...]:
    return tuple(f"{p}({c})" for p in ("R1", "R2") for c in CONSTANTS)


def relational_or_encoding() -> EncodingDAT:
    """Selectors (x1, x2) pick a constant; y1 carries R1 of it and y2 carries R2."""
    selectors, pattern, target = [], [], []
    for h, c in SELECTOR_CONSTANT.items():
        for pred, neuron in (("R1", 2), ("R2", 3)):
            atom = f"{pred}({c})"
            selectors.append((atom, (0, 1)))
            pattern.append((atom, h))
            target.append((atom, neuron))
    return EncodingDAT(2, (DatTriple(selectors, pattern, target),), universe=relational_atoms())


def relational_kb() -> list[Formula]:
    x_is = Iff(Atom("R1", ("x",)), Atom("R2", ("x",)))
    return [
        Forall("x", CONSTANTS, x_is),
        Atom("R1", ("a",)),
        Atom("R1", ("b",)),
        Atom("R1", ("c",)),
        Not(Atom("R1", ("d",))),
    ]


def interval_example_kb() -> list[FuzzySentence]:
    """``[0, 0.1] : A`` and ``[0.4, 0.5] : A | B``."""
    return [FuzzySentence(Atom("A"), 0.0, 0.1), FuzzySentence(Or((Atom("A"), Atom("B"))), 0.4, 0.5)]


def oscillator_fuzzy_kb() -> list[FuzzySentence]:
    """``[0.75, 1] : A | B`` and ``[0.5, 1] : ~A | ~B``."""
    a, b = Atom("A"), Atom("B")
    return [FuzzySentence(Or((a, b)), 0.75, 1.0), FuzzySentence(Or((Not(a), Not(b))), 0.5, 1.0)]


def bernoulli_pair_net() -> LayeredStochasticNet:
    """One fair binary input; two outputs that fire independently given the previous input."""
    return LayeredStochasticNet(
        ("x",),
        ("y1", "y2"),
        (((0.0,), 0.5), ((1.0,), 0.5)),
        (((0.0,), (1.0, 0.2)), ((1.0,), (0.4, 0.3))),
    )


def bernoulli_pair_encoding() -> EncodingNAT:
    return EncodingNAT({"X": 0, "Y1": 1, "Y2": 2})


def exactly_one_kb() -> list[Formula]:
    y1, y2 = Atom("Y1"), Atom("Y2")
    return [Or((y1, y2)), Not(And((y1, y2)))]


def two_sentence_penalty_kb(c1: float = 1.0, c2: float = 1.0) -> PenaltyKB:
    """``c1 : A | B`` and ``c2 : ~B``."""
    return PenaltyKB(((c1, Or((Atom("A"), Atom("B")))), (c2, Not(Atom("B")))))


__all__ = [
    "or_program",
    "or_program_network",
    "rotation_network",
    "equivalence_oscillator",
    "equivalence_encoding",
    "equivalence_kb",
    "relational_or_network",
    "relational_atoms",
    "relational_or_encoding",
    "relational_kb",
    "interval_example_kb",
    "oscillator_fuzzy_kb",
    "bernoulli_pair_net",
    "bernoulli_pair_encoding",
    "exactly_one_kb",
    "two_sentence_penalty_kb",
]
