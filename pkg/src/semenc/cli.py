"""Command-line front end.

Exit status is 0 when a check passes, 1 when a verification fails and 2 on
bad input (unreadable or malformed files, unknown atoms, state-space cap).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .demo import demo_dict, format_matrix, run_demo
from .diagram import transition_dot
from .encoding import check_neural_model, check_semantic_encoding, validate_encoding
from .errors import SemencError
from .fuzzy import fid_fuzzy_network
from .io import format_encoding, format_network, load_encoding, load_network, load_stochastic
from .kbtext import format_kb, parse_kb
from .logic import LogicProgram, PenaltyKB, tp_fixpoint
from .network import UpdateMode, compute_x_inf, trajectory
from .report import (
    certificate_dict,
    encoding_report_dict,
    fidelity_dict,
    fixpoint_dict,
    fmt_number,
    render,
    trajectory_dict,
    x_inf_dict,
)
from .stochastic import fid_prob, limiting_distribution
from .translate import cilp_compile, hopfield_to_penalty, horn_extract, kbann_compile, penalty_to_hopfield

PASS, FAIL, INPUT_ERROR = 0, 1, 2

GRAMMAR_NOTE = "File grammars are described in docs/FORMATS.md. SEMENC_STATE_CAP overrides the state-space cap."


class InputError(Exception):
    pass


def _read_kb(path: str):
    doc = parse_kb(Path(path).read_text(encoding="utf-8"))
    return doc, doc.value()


def _network(args):
    net = load_network(args.net)
    changes = {}
    if getattr(args, "tc", None) is not None:
        changes["t_c"] = args.tc
    if getattr(args, "seed", None) is not None:
        changes["update_mode"] = UpdateMode.random(args.seed)
    return net.replace(**changes) if changes else net


def _parse_state(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise InputError(f"cannot read state {text!r}; expected comma-separated values") from None


def _emit(args, report: dict) -> None:
    sys.stdout.write(render(report, getattr(args, "json", False)))


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    net = _network(args)
    start = _parse_state(args.start) if args.start else tuple(min(d) if 0.0 not in d else 0.0 for d in net.domains)
    states = trajectory(net, start, args.updates)
    report = trajectory_dict(net, states)
    if args.x_inf:
        report["analysis"] = x_inf_dict(compute_x_inf(net))
    _emit(args, report)
    return PASS


def cmd_diagram(args) -> int:
    net = _network(args)
    enc = load_encoding(args.enc, net) if args.enc else None
    dot = transition_dot(net, enc)
    if args.output:
        _write(args.output, dot)
    else:
        sys.stdout.write(dot)
    return PASS


def cmd_verify(args) -> int:
    net = _network(args)
    enc = load_encoding(args.enc, net)
    doc, kb = _read_kb(args.kb)
    if doc.kind == "fuzzy":
        raise InputError(f"{args.kb} holds a fuzzy knowledge base; use 'fidelity fuzzy'")
    diagnostics = validate_encoding(enc, net)
    report = compute_x_inf(net)
    check = check_neural_model if args.check == "neural-model" else check_semantic_encoding
    verdict = check(net, enc, args.agg, kb, report)
    out = {"encoding valid": diagnostics.ok}
    if not diagnostics.ok:
        out["encoding problems"] = list(diagnostics.violations)
    out.update(x_inf_dict(report))
    out.update(encoding_report_dict(verdict))
    passed = verdict.is_neural_model if args.check == "neural-model" else verdict.is_semantic_encoding
    out["result"] = "pass" if passed and diagnostics.ok else "fail"
    _emit(args, out)
    return PASS if passed and diagnostics.ok else FAIL


def _program(path: str) -> LogicProgram:
    _, kb = _read_kb(path)
    if not isinstance(kb, LogicProgram):
        raise InputError(f"{path} does not contain a logic program")
    return kb


def cmd_compile(args) -> int:
    target = args.target
    out: dict = {"compiler": target}
    if target in ("kbann", "cilp"):
        compiler = kbann_compile if target == "kbann" else cilp_compile
        result = compiler(_program(args.program))
        _write(args.output, format_network(result.net))
        _write(args.enc_output, format_encoding(result.enc, result.net))
        out["neurons"] = " ".join(result.net.labels)
        out["t_c"] = result.net.t_c
        cert = result.certificate
    elif target == "extract":
        result = horn_extract(load_network(args.net))
        text = format_kb(result.program)
        _write(args.output, text)
        out["program"] = [str(c) for c in result.program.clauses]
        cert = result.certificate
    elif target == "hopfield-to-penalty":
        result = hopfield_to_penalty(load_network(args.net))
        kb = result.kb
        _write(args.output, format_kb(kb))
        out["sentences"] = [f"{fmt_number(c)} : {f}" for c, f in kb.sentences]
        out["offset"] = result.offset
        cert = result.certificate
    else:
        _, kb = _read_kb(args.kb)
        if not isinstance(kb, PenaltyKB):
            raise InputError(f"{args.kb} does not contain a penalty knowledge base")
        result = penalty_to_hopfield(kb)
        _write(args.output, format_network(result.net))
        _write(args.enc_output, format_encoding(result.enc, result.net))
        out["neurons"] = " ".join(result.net.labels)
        out["offset"] = result.offset
        cert = result.certificate
    out["certificate"] = certificate_dict(cert)
    _emit(args, out)
    return PASS if cert.passed else FAIL


def cmd_fidelity(args) -> int:
    doc, kb = _read_kb(args.kb)
    if args.measure == "fuzzy":
        if doc.kind != "fuzzy":
            raise InputError(f"{args.kb} is not a fuzzy knowledge base")
        net = _network(args)
        enc = load_encoding(args.enc, net)
        report = fid_fuzzy_network(net, enc, kb, args.agg, args.satagg)
        _emit(args, fidelity_dict(report))
        return PASS
    snet = load_stochastic(args.snet)
    enc = load_encoding(args.enc)
    dist = limiting_distribution(snet, tol=args.tol, epsilon=args.epsilon)
    report = fid_prob(dist, enc, kb, args.agg)
    _emit(args, fidelity_dict(report))
    return PASS


def cmd_tp(args) -> int:
    program = _program(args.program)
    start = [a for a in args.start.split(",") if a] if args.start else []
    unknown = sorted(set(start) - set(program.atoms))
    if unknown:
        raise InputError(f"unknown atoms in --start: {unknown}")
    result = tp_fixpoint(program, start, args.max_iters)
    _emit(args, fixpoint_dict(result))
    return PASS if result.converged else FAIL


def cmd_demo(args) -> int:
    cases = run_demo()
    if args.json:
        _emit(args, demo_dict(cases))
    else:
        sys.stdout.write(format_matrix(cases))
    return PASS if all(c.passed for c in cases) else FAIL


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, net: bool = True) -> None:
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    if net:
        p.add_argument("--tc", type=int, help="override the computation time t_c")
        p.add_argument("--seed", type=int, help="switch to random-order updates with this seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semenc", description="Check semantic encodings of knowledge bases in networks.", epilog=GRAMMAR_NOTE)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="print a trajectory")
    p.add_argument("--net", required=True)
    p.add_argument("--start", help="comma-separated initial state (default: all zeros)")
    p.add_argument("--updates", type=int, default=5)
    p.add_argument("--x-inf", action="store_true", help="also report x_inf and its cycles")
    _common(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("diagram", help="write the state-transition diagram as DOT")
    p.add_argument("--net", required=True)
    p.add_argument("--enc")
    p.add_argument("--output", "-o")
    _common(p)
    p.set_defaults(handler=cmd_diagram)

    p = sub.add_parser("verify", help="decide neural model / semantic encoding")
    p.add_argument("--net", required=True)
    p.add_argument("--enc", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--agg", choices=["union", "intersection"], default="union")
    p.add_argument("--check", choices=["semantic-encoding", "neural-model"], default="semantic-encoding")
    _common(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("compile", help="run a knowledge/network compiler")
    p.add_argument("target", choices=["kbann", "cilp", "extract", "hopfield-to-penalty", "penalty-to-hopfield"])
    p.add_argument("--program", help="logic program (kbann, cilp)")
    p.add_argument("--net", help="network (extract, hopfield-to-penalty)")
    p.add_argument("--kb", help="penalty knowledge base (penalty-to-hopfield)")
    p.add_argument("--output", "-o", help="write the compiled network or knowledge base here")
    p.add_argument("--enc-output", help="write the compiled encoding here")
    _common(p, net=False)
    p.set_defaults(handler=cmd_compile)

    p = sub.add_parser("fidelity", help="fuzzy or probabilistic fidelity")
    p.add_argument("measure", choices=["fuzzy", "prob"])
    p.add_argument("--kb", required=True)
    p.add_argument("--enc", required=True)
    p.add_argument("--net", help="network (fuzzy)")
    p.add_argument("--snet", help="stochastic network (prob)")
    p.add_argument("--agg", choices=["union", "intersection"], default="union")
    p.add_argument("--satagg", choices=["min", "mean"], default="min")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--epsilon", type=float, default=1e-9)
    _common(p)
    p.set_defaults(handler=cmd_fidelity)

    p = sub.add_parser("tp", help="iterate the immediate-consequence operator")
    p.add_argument("--program", required=True)
    p.add_argument("--start", help="comma-separated atoms true initially")
    p.add_argument("--max-iters", type=int, default=10_000)
    _common(p, net=False)
    p.set_defaults(handler=cmd_tp)

    p = sub.add_parser("demo", help="run the reference regression suite")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_demo)
    return parser


def _required(args) -> None:
    needs = {
        ("compile", "kbann"): "program",
        ("compile", "cilp"): "program",
        ("compile", "extract"): "net",
        ("compile", "hopfield-to-penalty"): "net",
        ("compile", "penalty-to-hopfield"): "kb",
        ("fidelity", "fuzzy"): "net",
        ("fidelity", "prob"): "snet",
    }
    key = (args.command, getattr(args, "target", None) or getattr(args, "measure", None))
    option = needs.get(key)
    if option and not getattr(args, option):
        raise InputError(f"{' '.join(key)} needs --{option}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else PASS
    try:
        _required(args)
        return args.handler(args)
    except (InputError, SemencError, ValueError, OSError) as exc:
        print(f"semenc: error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
