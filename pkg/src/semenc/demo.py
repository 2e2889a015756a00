"""Regression suite over the reference examples, printed as a pass/fail matrix."""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from . import gallery
from .encoding import Agg, check_semantic_encoding, validate_encoding
from .fuzzy import eval_formula, fid_fuzzy, satisfies, FuzzySentence
from .formula import Atom, Not
from .logic import penalty, penalty_models, tp_fixpoint
from .modelset import ModelSet
from .network import compute_x_inf, enumerate_states, trajectory, update
from .report import fmt_number
from .stochastic import fid_prob, limiting_distribution

TOL = 1e-12


@dataclass(frozen=True)
class DemoCase:
    name: str
    passed: bool
    detail: str


def _or_program_dynamics(heaviside_at_zero: float) -> DemoCase:
    net = gallery.or_program_network(heaviside_at_zero)
    got = trajectory(net, (0, 1, 0, 1), 3)
    want = [(0, 1, 0, 1), (1, 0, 1, 0), (1, 0, 1, 1), (1, 0, 1, 1)]
    ok = [tuple(map(int, s)) for s in got] == want
    lfp = tp_fixpoint(gallery.or_program())
    ok = ok and lfp.fixed_point == frozenset({"A", "C"})
    return DemoCase("or-program trajectory", ok, " -> ".join("".join(str(int(v)) for v in s) for s in got))


def _rotation_identity(rotation_tc: int) -> DemoCase:
    net = gallery.rotation_network(rotation_tc)
    states = enumerate_states(net)
    ok = all(update(net, s) == tuple(s) for s in states)
    return DemoCase("rotation with t_c=3 is the identity", ok, f"t_c={rotation_tc}")


def _rotation_single_step() -> DemoCase:
    net = gallery.rotation_network(1)
    ok = all(update(net, s) == (s[2], s[0], s[1]) for s in enumerate_states(net))
    return DemoCase("rotation with t_c=1 shifts right", ok, "(x1,x2,x3) -> (x3,x1,x2)")


def _oscillator() -> DemoCase:
    net = gallery.equivalence_oscillator()
    report = compute_x_inf(net)
    enc = gallery.equivalence_encoding()
    verdict = check_semantic_encoding(net, enc, Agg.UNION, gallery.equivalence_kb(), report)
    ok = (
        report.x_inf == ((0.0, 0.0), (1.0, 1.0))
        and len(report.cycles) == 1
        and len(report.cycles[0]) == 2
        and verdict.is_semantic_encoding
    )
    return DemoCase("oscillator encodes A <-> B", ok, f"x_inf={len(report.x_inf)} states, semantic={verdict.is_semantic_encoding}")


def _relational() -> DemoCase:
    net = gallery.relational_or_network()
    enc = gallery.relational_or_encoding()
    report = compute_x_inf(net)
    want_x_inf = {(0, 0, 0, 0), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, 1)}
    verdict = check_semantic_encoding(net, enc, Agg.INTERSECTION, gallery.relational_kb(), report)
    model = ModelSet.from_interpretations(
        gallery.relational_atoms(), [{"R1(a)", "R1(b)", "R1(c)", "R2(a)", "R2(b)", "R2(c)"}]
    )
    ok = (
        {tuple(map(int, s)) for s in report.x_inf} == want_x_inf
        and validate_encoding(enc, net).ok
        and verdict.m_n.equals(model)
        and verdict.is_semantic_encoding
    )
    return DemoCase("distributed encoding, intersection", ok, f"models={verdict.m_n.count()}")


def _interval_logic() -> DemoCase:
    v = {"A": 0.05, "B": 0.45}
    a_or_b = eval_formula(v, gallery.interval_example_kb()[1].formula)
    entails = satisfies(v, gallery.interval_example_kb()) and satisfies(v, [FuzzySentence(Atom("B"), 0.4, 0.5)])
    negation = eval_formula({"A": 0.3}, Not(Atom("A")))
    ok = abs(a_or_b - 0.45) <= TOL and entails and abs(negation - 0.7) <= TOL
    return DemoCase("interval fuzzy logic", ok, f"A|B={fmt_number(a_or_b)}, ~A={fmt_number(negation)}")


def _fuzzy_fidelity() -> DemoCase:
    models = ModelSet.from_interpretations(["A", "B"], [(), ("A", "B")])
    low = fid_fuzzy(models, gallery.oscillator_fuzzy_kb(), "min").value
    mean = fid_fuzzy(models, gallery.oscillator_fuzzy_kb(), "mean").value
    ok = abs(low - 0.25) <= TOL and abs(mean - 0.625) <= TOL
    return DemoCase("fuzzy fidelity", ok, f"min={fmt_number(low)}, mean={fmt_number(mean)}")


def _probabilistic_fidelity() -> DemoCase:
    snet = gallery.bernoulli_pair_net()
    dist = limiting_distribution(snet)
    both_on = sum(dist.mass((x, 1, 1)) for x in (0, 1))
    both_off = sum(dist.mass((x, 0, 0)) for x in (0, 1))
    value = fid_prob(dist, gallery.bernoulli_pair_encoding(), gallery.exactly_one_kb()).value
    # the two named masses are the violating states; the satisfying mass is the rest
    ok = abs(both_on - 0.16) <= TOL and abs(both_off - 0.21) <= TOL and abs(value - (1 - 0.16 - 0.21)) <= TOL
    detail = f"P(y1=y2=1)={fmt_number(both_on)}, P(y1=y2=0)={fmt_number(both_off)}, fid_prob={fmt_number(value)}"
    return DemoCase("probabilistic fidelity", ok, detail)


def _penalty_table() -> DemoCase:
    ok = True
    rows = []
    for c1, c2 in ((1.0, 1.0), (3.0, 2.0)):
        kb = gallery.two_sentence_penalty_kb(c1, c2)
        got = [penalty(kb, m) for m in ((), ("B",), ("A",), ("A", "B"))]
        ok = ok and got == [c1, c2, 0.0, c2]
        ok = ok and penalty_models(kb, ["A", "B"]).equals(ModelSet.from_interpretations(["A", "B"], [("A",)]))
        rows.append("/".join(fmt_number(x) for x in got))
    return DemoCase("penalty table", ok, "; ".join(rows))


def demo_cases(heaviside_at_zero: float = 1.0, rotation_tc: int = 3) -> list[tuple[str, Callable[[], DemoCase]]]:
    return [
        ("or-program trajectory", lambda: _or_program_dynamics(heaviside_at_zero)),
        ("rotation with t_c=3 is the identity", lambda: _rotation_identity(rotation_tc)),
        ("rotation with t_c=1 shifts right", _rotation_single_step),
        ("oscillator encodes A <-> B", _oscillator),
        ("distributed encoding, intersection", _relational),
        ("interval fuzzy logic", _interval_logic),
        ("fuzzy fidelity", _fuzzy_fidelity),
        ("probabilistic fidelity", _probabilistic_fidelity),
        ("penalty table", _penalty_table),
    ]


def run_demo(heaviside_at_zero: float = 1.0, rotation_tc: int = 3) -> list[DemoCase]:
    """Run every case; a case that raises counts as a failure."""
    out = []
    for name, case in demo_cases(heaviside_at_zero, rotation_tc):
        try:
            out.append(case())
        except Exception as exc:  # a crash is reported as a failed case
            out.append(DemoCase(name, False, f"error: {exc}"))
    return out


def demo_dict(cases: list[DemoCase]) -> dict:
    return {
        "passed": all(c.passed for c in cases),
        "cases": [{"name": c.name, "result": "PASS" if c.passed else "FAIL", "detail": c.detail} for c in cases],
    }


def format_matrix(cases: list[DemoCase]) -> str:
    width = max(len(c.name) for c in cases)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name.ljust(width)}  {c.detail}" for c in cases]
    lines.append(f"{sum(c.passed for c in cases)}/{len(cases)} passed")
    return "\n".join(lines) + "\n"


__all__ = ["DemoCase", "run_demo", "demo_dict", "format_matrix"]
