"""Graphviz DOT export of state-transition diagrams.

States on a cycle (x_inf) are filled yellow.  When an encoding is given each
state is labelled with the interpretations it stands for.  Nodes and edges are
emitted in state-index order, so output is deterministic.
"""
from __future__ import annotations

from .modelset import format_cubes
from .network import CandidateNetwork, TransitionReport, compute_x_inf, format_state


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _quote(*lines: str) -> str:
    # DOT renders a literal backslash-n as a line break
    return '"' + "\\n".join(_escape(t) for t in lines) + '"'


def transition_dot(net: CandidateNetwork, enc=None, report: TransitionReport | None = None, name: str = "transitions") -> str:
    report = report or compute_x_inf(net)
    cyclic = set(int(i) for i in report.x_inf_index)
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  node [shape=box, fontname="Helvetica"];']
    lines.append(f"  // neurons: {' '.join(net.labels)}")
    for i in range(len(report.states)):
        state = report.state(i)
        label = [format_state(state)]
        if enc is not None:
            label.append(format_cubes(enc.interpret(state)))
        style = ', style=filled, fillcolor="yellow"' if i in cyclic else ""
        lines.append(f"  s{i} [label={_quote(*label)}{style}];")
    for i, j in enumerate(report.successor):
        lines.append(f"  s{i} -> s{int(j)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = ["transition_dot"]
