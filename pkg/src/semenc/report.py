"""Structured reports shared by the CLI and the library.

A report is a plain ordered dict of strings, numbers, booleans, lists and
nested dicts.  Floats are rendered with nine significant digits in both the
text and the JSON form so output is byte-stable.
"""
from __future__ import annotations

import json
import math
from typing import Any

from .encoding import EncodingReport
from .logic import FixpointResult
from .measures import FidelityReport
from .modelset import ModelSet, format_cubes
from .network import CandidateNetwork, TransitionReport, format_state
from .stochastic import LimitingDistribution
from .translate import Certificate


def fmt_number(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return f"{x:.9g}"


def fmt_atoms(atoms) -> str:
    return "{" + ", ".join(sorted(atoms)) + "}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return fmt_number(value)
        return float(fmt_number(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return str(value)


def render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, ensure_ascii=False) + "\n"


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return fmt_number(value)
    if hasattr(value, "item") and not isinstance(value, (list, tuple, dict, str)):
        return _scalar(value.item())
    return str(value)


def _text(value: Any, indent: int, out: list[str]):
    pad = "  " * indent
    for key, item in value.items():
        if isinstance(item, dict):
            out.append(f"{pad}{key}:")
            _text(item, indent + 1, out)
        elif isinstance(item, (list, tuple)):
            out.append(f"{pad}{key}:" + ("" if item else " (none)"))
            for entry in item:
                if isinstance(entry, dict):
                    out.append(f"{pad}  -")
                    _text(entry, indent + 2, out)
                else:
                    out.append(f"{pad}  - {_scalar(entry)}")
        else:
            out.append(f"{pad}{key}: {_scalar(item)}")


def render_text(report: dict) -> str:
    out: list[str] = []
    _text(report, 0, out)
    return "\n".join(out) + "\n"


def render(report: dict, as_json: bool = False) -> str:
    return render_json(report) if as_json else render_text(report)


# ---------------------------------------------------------------------------
# builders


def modelset_text(ms: ModelSet) -> str:
    return format_cubes(ms)


def x_inf_dict(report: TransitionReport) -> dict:
    return {
        "states": len(report.states),
        "x_inf": [format_state(s) for s in report.x_inf],
        "cycles": [" -> ".join(format_state(report.state(i)) for i in c) for c in report.cycles],
    }


def trajectory_dict(net: CandidateNetwork, states: list[tuple]) -> dict:
    return {
        "neurons": " ".join(net.labels),
        "t_c": net.t_c,
        "trajectory": [format_state(s) for s in states],
        "fixed": len(states) > 1 and states[-1] == states[-2],
    }


def encoding_report_dict(report: EncodingReport) -> dict:
    out = {
        "aggregation": report.agg.value,
        "network models": modelset_text(report.m_n),
        "knowledge-base models": modelset_text(report.m_l),
        "neural model": report.is_neural_model,
        "semantic encoding": report.is_semantic_encoding,
    }
    if report.witness is not None:
        out["witness"] = report.witness.describe()
    return out


def certificate_dict(cert: Certificate) -> dict:
    out: dict[str, Any] = {"passed": cert.passed, "checks": {name: ok for name, ok in cert.checks}}
    if cert.witnesses:
        out["witnesses"] = list(cert.witnesses)
    if cert.notes:
        out["notes"] = list(cert.notes)
    return out


def fixpoint_dict(result: FixpointResult) -> dict:
    out: dict[str, Any] = {"status": result.status, "trace": [fmt_atoms(m) for m in result.trace]}
    if result.fixed_point is not None:
        out["fixed point"] = fmt_atoms(result.fixed_point)
    if result.cycle:
        out["cycle"] = [fmt_atoms(m) for m in result.cycle]
    return out


def fidelity_dict(report: FidelityReport) -> dict:
    rows = []
    for row in report.rows:
        if report.measure == "prob":
            entry = {"state": format_state(row.item), "mass": row.value, "satisfies": row.ok}
        else:
            entry = {
                "valuation": ", ".join(f"{a}={fmt_number(v)}" for a, v in row.item),
                "satisfaction": row.value,
                "per sentence": [float(x) for x in row.detail],
            }
        rows.append(entry)
    out: dict[str, Any] = {"measure": report.measure, "value": report.value, "neural model": report.is_neural_model}
    out["breakdown"] = rows
    if report.notes:
        out["notes"] = list(report.notes)
    return out


def limiting_dict(dist: LimitingDistribution) -> dict:
    return {
        "method": dist.method,
        "periodic": dist.periodic,
        "period": dist.period,
        "residual": dist.residual,
        "epsilon": dist.epsilon,
        "support stable": dist.support_stable,
        "x_p_inf": [format_state(s) for s in dist.x_p_inf],
        "masses": [{"state": format_state(s), "mass": float(p)} for s, p in zip(dist.states, dist.probabilities)],
    }


__all__ = [
    "fmt_number",
    "render",
    "render_json",
    "render_text",
    "x_inf_dict",
    "trajectory_dict",
    "encoding_report_dict",
    "certificate_dict",
    "fixpoint_dict",
    "fidelity_dict",
    "limiting_dict",
]
