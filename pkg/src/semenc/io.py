"""Line-oriented text formats for networks, encodings and stochastic networks.

Each file starts with a versioned header and has one directive per line;
``#`` starts a comment.  See ``docs/FORMATS.md`` for the full grammar.

Network (``%semenc net 1``)::

    neurons A B h C
    visible A B C
    tc 1
    update synchronous | sweep [LABEL ...] | random SEED
    transfer LABEL|* heaviside|identity|sign [at_zero=0|1]
    transfer LABEL|* lookup IN:OUT ...
    domain LABEL|* VALUE ...
    bias LABEL VALUE
    weight SOURCE TARGET VALUE

Encoding (``%semenc enc 1``)::

    kind nat|dat
    universe ATOM ...
    truth VALUE:T|F ... | truth degrees
    atom ATOM NEURON                               (nat)
    k COUNT                                        (dat)
    entry TRIPLE ATOM SEL ... / VALUE ... -> NEURON  (dat)

Stochastic network (``%semenc stochastic 1``)::

    kind layered
    inputs LABEL ...
    outputs LABEL ...
    input VALUE ... : PROB
    cpt VALUE ... : PROB ...

    kind chain
    labels LABEL ...
    state NAME VALUE ...
    initial NAME PROB
    edge NAME NAME PROB
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterator
from pathlib import Path

import numpy as np
from scipy import sparse

from .encoding import DatTriple, EncodingDAT, EncodingNAT
from .errors import ParseError
from .network import CandidateNetwork, TransferFn, UpdateMode
from .stochastic import LayeredStochasticNet, MarkovChain

NET_HEADER = "%semenc net 1"
ENC_HEADER = "%semenc enc 1"
STOCHASTIC_HEADER = "%semenc stochastic 1"

_TOKEN = re.compile(r"\S+")


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]

    @property
    def words(self) -> list[str]:
        return [t for t, _ in self.tokens]

    def error(self, message: str, token: int | None = None) -> ParseError:
        column = None
        if token is not None and token < len(self.tokens):
            column = self.tokens[token][1]
        elif token is not None and self.tokens:
            last, col = self.tokens[-1]
            column = col + len(last)
        return ParseError(message, self.number, column)

    def number_at(self, i: int) -> float:
        if i >= len(self.tokens):
            raise self.error("expected a number", i)
        try:
            value = float(self.tokens[i][0])
        except ValueError:
            raise self.error(f"expected a number, got {self.tokens[i][0]!r}", i) from None
        if not math.isfinite(value):
            raise self.error("numbers must be finite", i)
        return value

    def need(self, count: int, usage: str):
        if len(self.tokens) < count:
            raise self.error(f"usage: {usage}", len(self.tokens))


def _lines(text: str, header: str) -> Iterator[_Line]:
    rows = text.splitlines()
    first = next((i for i, r in enumerate(rows) if r.split("#", 1)[0].strip()), None)
    if first is None or rows[first].strip() != header:
        raise ParseError(f"missing header {header!r}", (first or 0) + 1, 1)
    for i in range(first + 1, len(rows)):
        body = rows[i].split("#", 1)[0]
        if body.strip():
            yield _Line(i + 1, body)


def _fmt(x: float) -> str:
    # shortest text that reads back to the same float
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


# ---------------------------------------------------------------------------
# networks


def parse_network(text: str) -> CandidateNetwork:
    labels: list[str] | None = None
    visible = None
    t_c = 1
    mode = UpdateMode()
    transfers: dict[str, TransferFn] = {}
    default_transfer = TransferFn()
    domains: dict[str, tuple[float, ...]] = {}
    default_domain = (0.0, 1.0)
    biases: dict[str, float] = {}
    weights: list[tuple[str, str, float, _Line]] = []

    def label(line: _Line, i: int) -> str:
        name = line.tokens[i][0]
        if name not in index:
            raise line.error(f"unknown neuron {name!r}", i)
        return name

    index: dict[str, int] = {}
    for line in _lines(text, NET_HEADER):
        key = line.words[0]
        if key == "neurons":
            line.need(2, "neurons LABEL ...")
            if labels is not None:
                raise line.error("neurons declared twice", 0)
            labels = line.words[1:]
            if len(set(labels)) != len(labels):
                raise line.error("duplicate neuron label", 1)
            index = {name: i for i, name in enumerate(labels)}
            continue
        if labels is None:
            raise line.error("the first directive must be 'neurons'", 0)
        if key == "visible":
            line.need(2, "visible LABEL ...")
            visible = [label(line, i) for i in range(1, len(line.tokens))]
        elif key == "tc":
            line.need(2, "tc COUNT")
            value = line.number_at(1)
            if value != int(value) or value < 1:
                raise line.error("tc must be a positive integer", 1)
            t_c = int(value)
        elif key == "update":
            line.need(2, "update synchronous | sweep [LABEL ...] | random SEED")
            kind = line.words[1]
            if kind == "synchronous":
                mode = UpdateMode()
            elif kind == "sweep":
                order = [index[label(line, i)] for i in range(2, len(line.tokens))]
                if order and sorted(order) != list(range(len(labels))):
                    raise line.error("sweep order must list every neuron once", 2)
                mode = UpdateMode.sweep(order or None)
            elif kind == "random":
                line.need(3, "update random SEED")
                mode = UpdateMode.random(int(line.number_at(2)))
            else:
                raise line.error(f"unknown update mode {kind!r}", 1)
        elif key == "transfer":
            line.need(3, "transfer LABEL|* KIND [options]")
            fn = _parse_transfer(line)
            if line.words[1] == "*":
                default_transfer = fn
            else:
                transfers[label(line, 1)] = fn
        elif key == "domain":
            line.need(3, "domain LABEL|* VALUE ...")
            values = tuple(line.number_at(i) for i in range(2, len(line.tokens)))
            if line.words[1] == "*":
                default_domain = values
            else:
                domains[label(line, 1)] = values
        elif key == "bias":
            line.need(3, "bias LABEL VALUE")
            biases[label(line, 1)] = line.number_at(2)
        elif key == "weight":
            line.need(4, "weight SOURCE TARGET VALUE")
            weights.append((label(line, 1), label(line, 2), line.number_at(3), line))
        else:
            raise line.error(f"unknown directive {key!r}", 0)
    if labels is None:
        raise ParseError("no 'neurons' directive", None, None)
    seen = set()
    for src, dst, _, line in weights:
        if (src, dst) in seen:
            raise line.error(f"weight {src} -> {dst} given twice", 1)
        seen.add((src, dst))
    return CandidateNetwork.build(
        labels,
        [(s, d, w) for s, d, w, _ in weights],
        biases,
        transfer=tuple(transfers.get(name, default_transfer) for name in labels),
        domains=tuple(domains.get(name, default_domain) for name in labels),
        visible=visible,
        t_c=t_c,
        update_mode=mode,
    )


def _parse_transfer(line: _Line) -> TransferFn:
    kind = line.words[2]
    options = line.words[3:]
    if kind == "lookup":
        table = {}
        if not options:
            raise line.error("lookup needs IN:OUT pairs", 3)
        for i, item in enumerate(options, start=3):
            try:
                a, b = item.split(":")
                table[float(a)] = float(b)
            except ValueError:
                raise line.error(f"expected IN:OUT, got {item!r}", i) from None
        return TransferFn.lookup(table)
    if kind not in ("heaviside", "identity", "sign"):
        raise line.error(f"unknown transfer {kind!r}", 2)
    at_zero = 1.0
    for i, item in enumerate(options, start=3):
        if kind == "heaviside" and item in ("at_zero=0", "at_zero=1"):
            at_zero = float(item[-1])
        else:
            raise line.error(f"unexpected option {item!r}", i)
    return TransferFn(kind, at_zero=at_zero)


def format_network(net: CandidateNetwork) -> str:
    labels = net.labels
    lines = [NET_HEADER, "neurons " + " ".join(labels)]
    if net.visible != tuple(range(net.n)):
        lines.append("visible " + " ".join(labels[i] for i in net.visible))
    if net.t_c != 1:
        lines.append(f"tc {net.t_c}")
    mode = net.update_mode
    if mode.kind == "sweep":
        order = "" if mode.order is None else " " + " ".join(labels[i] for i in mode.order)
        lines.append("update sweep" + order)
    elif mode.kind == "random":
        lines.append(f"update random {mode.seed}")
    for name, fn in zip(labels, net.transfer):
        if fn == TransferFn():
            continue
        if fn.kind == "lookup":
            lines.append(f"transfer {name} lookup " + " ".join(f"{_fmt(a)}:{_fmt(b)}" for a, b in fn.table))
        else:
            extra = " at_zero=0" if fn.kind == "heaviside" and fn.at_zero == 0.0 else ""
            lines.append(f"transfer {name} {fn.kind}{extra}")
    for name, dom in zip(labels, net.domains):
        if dom != (0.0, 1.0):
            lines.append(f"domain {name} " + " ".join(_fmt(v) for v in dom))
    for name, b in zip(labels, net.biases):
        if b != 0.0:
            lines.append(f"bias {name} {_fmt(b)}")
    for j, i in zip(*np.nonzero(net.weights)):
        lines.append(f"weight {labels[j]} {labels[i]} {_fmt(net.weights[j, i])}")
    return "\n".join(lines) + "\n"


def load_network(path: str | Path) -> CandidateNetwork:
    return parse_network(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# encodings


def _truth_table(line: _Line) -> tuple[tuple[float, bool], ...] | None:
    if line.words[1:] == ["degrees"]:
        return None
    rows = []
    for i, item in enumerate(line.words[1:], start=1):
        value, _, flag = item.partition(":")
        if flag not in ("T", "F"):
            raise line.error(f"expected VALUE:T or VALUE:F, got {item!r}", i)
        try:
            rows.append((float(value), flag == "T"))
        except ValueError:
            raise line.error(f"expected a number before ':', got {value!r}", i) from None
    return tuple(rows)


def parse_encoding(text: str, net: CandidateNetwork | None = None) -> EncodingNAT | EncodingDAT:
    """Parse an encoding; neuron references are labels of ``net`` or 0-based indices."""
    kind = None
    universe: tuple[str, ...] = ()
    truth: tuple | None = ((0.0, False), (1.0, True))
    atoms: list[tuple[str, int]] = []
    k = 0
    entries: dict[int, list[tuple[str, tuple[int, ...], tuple[float, ...], int]]] = {}

    def neuron(line: _Line, i: int) -> int:
        ref = line.tokens[i][0]
        if net is not None and ref in net.labels:
            return net.labels.index(ref)
        if re.fullmatch(r"\d+", ref):
            idx = int(ref)
            if net is not None and idx >= net.n:
                raise line.error(f"neuron index {idx} out of range", i)
            return idx
        raise line.error(f"unknown neuron {ref!r}", i)

    for line in _lines(text, ENC_HEADER):
        key = line.words[0]
        if key == "kind":
            line.need(2, "kind nat|dat")
            if line.words[1] not in ("nat", "dat"):
                raise line.error(f"unknown encoding kind {line.words[1]!r}", 1)
            kind = line.words[1]
        elif key == "universe":
            universe = tuple(line.words[1:])
        elif key == "truth":
            line.need(2, "truth VALUE:T|F ... | truth degrees")
            truth = _truth_table(line)
        elif key == "atom":
            line.need(3, "atom ATOM NEURON")
            atoms.append((line.words[1], neuron(line, 2)))
        elif key == "k":
            line.need(2, "k COUNT")
            k = int(line.number_at(1))
        elif key == "entry":
            words = line.words
            try:
                slash = words.index("/")
                arrow = words.index("->")
            except ValueError:
                raise line.error("usage: entry TRIPLE ATOM SEL ... / VALUE ... -> NEURON", len(words)) from None
            if slash < 3 or arrow < slash or arrow != len(words) - 2:
                raise line.error("usage: entry TRIPLE ATOM SEL ... / VALUE ... -> NEURON", 0)
            triple = int(line.number_at(1))
            sel = tuple(neuron(line, i) for i in range(3, slash))
            pattern = tuple(line.number_at(i) for i in range(slash + 1, arrow))
            if len(sel) != len(pattern):
                raise line.error("selector and pattern lengths differ", slash)
            entries.setdefault(triple, []).append((words[2], sel, pattern, neuron(line, arrow + 1)))
        else:
            raise line.error(f"unknown directive {key!r}", 0)
    if kind is None:
        kind = "dat" if entries else "nat"
    if kind == "nat":
        if entries:
            raise ParseError("'entry' lines need kind dat", None, None)
        if truth is None:
            raise ParseError("a NAT encoding needs a truth table", None, None)
        return EncodingNAT(tuple(atoms), truth, universe)
    if atoms:
        raise ParseError("'atom' lines need kind nat", None, None)
    triples = []
    for t in sorted(entries):
        rows = entries[t]
        triples.append(
            DatTriple(
                tuple((a, o) for a, o, _, _ in rows),
                tuple((a, h) for a, _, h, _ in rows),
                tuple((a, r) for a, _, _, r in rows),
            )
        )
    return EncodingDAT(k, tuple(triples), truth, universe)


def format_encoding(enc: EncodingNAT | EncodingDAT, net: CandidateNetwork | None = None) -> str:
    def ref(i: int) -> str:
        return net.labels[i] if net is not None else str(i)

    lines = [ENC_HEADER]
    if isinstance(enc, EncodingNAT):
        lines.append("kind nat")
    else:
        lines += ["kind dat", f"k {enc.k}"]
    lines.append("universe " + " ".join(enc.universe))
    if enc.truth is None:
        lines.append("truth degrees")
    else:
        lines.append("truth " + " ".join(f"{_fmt(v)}:{'T' if t else 'F'}" for v, t in enc.truth))
    if isinstance(enc, EncodingNAT):
        lines += [f"atom {a} {ref(i)}" for a, i in enc.atom_neuron]
    else:
        for t, triple in enumerate(enc.triples, start=1):
            for a, o, h, r in triple.rows():
                sel = " ".join(ref(i) for i in o)
                pat = " ".join(_fmt(v) for v in h)
                lines.append(f"entry {t} {a} {sel} / {pat} -> {ref(r)}".replace("  ", " "))
    return "\n".join(lines) + "\n"


def load_encoding(path: str | Path, net: CandidateNetwork | None = None):
    return parse_encoding(Path(path).read_text(encoding="utf-8"), net)


# ---------------------------------------------------------------------------
# stochastic networks


def _split_colon(line: _Line) -> int:
    try:
        return line.words.index(":")
    except ValueError:
        raise line.error("expected ' : '", len(line.tokens)) from None


def parse_stochastic(text: str) -> LayeredStochasticNet | MarkovChain:
    kind = None
    inputs: list[str] = []
    outputs: list[str] = []
    dist: list[tuple[tuple[float, ...], float]] = []
    cpt: list[tuple[tuple[float, ...], tuple[float, ...]]] = []
    labels: list[str] = []
    states: dict[str, tuple[float, ...]] = {}
    initial: dict[str, float] = {}
    edges: list[tuple[str, str, float]] = []

    def state_name(line: _Line, i: int) -> str:
        name = line.words[i]
        if name not in states:
            raise line.error(f"unknown state {name!r}", i)
        return name

    for line in _lines(text, STOCHASTIC_HEADER):
        key = line.words[0]
        if key == "kind":
            line.need(2, "kind layered|chain")
            if line.words[1] not in ("layered", "chain"):
                raise line.error(f"unknown kind {line.words[1]!r}", 1)
            kind = line.words[1]
        elif key == "inputs":
            inputs = line.words[1:]
        elif key == "outputs":
            outputs = line.words[1:]
        elif key in ("input", "cpt"):
            colon = _split_colon(line)
            x = tuple(line.number_at(i) for i in range(1, colon))
            values = tuple(line.number_at(i) for i in range(colon + 1, len(line.tokens)))
            if key == "input":
                if len(values) != 1:
                    raise line.error("an input line carries exactly one probability", colon + 1)
                dist.append((x, values[0]))
            else:
                cpt.append((x, values))
        elif key == "labels":
            labels = line.words[1:]
        elif key == "state":
            line.need(2, "state NAME VALUE ...")
            if line.words[1] in states:
                raise line.error(f"state {line.words[1]!r} declared twice", 1)
            states[line.words[1]] = tuple(line.number_at(i) for i in range(2, len(line.tokens)))
        elif key == "initial":
            line.need(3, "initial NAME PROB")
            initial[state_name(line, 1)] = line.number_at(2)
        elif key == "edge":
            line.need(4, "edge FROM TO PROB")
            edges.append((state_name(line, 1), state_name(line, 2), line.number_at(3)))
        else:
            raise line.error(f"unknown directive {key!r}", 0)
    try:
        if kind == "layered":
            return LayeredStochasticNet(tuple(inputs), tuple(outputs), tuple(dist), tuple(cpt))
        if kind == "chain":
            names = list(states)
            pos = {s: i for i, s in enumerate(names)}
            n = len(names)
            matrix = sparse.csr_matrix(
                ([p for _, _, p in edges], ([pos[a] for a, _, _ in edges], [pos[b] for _, b, _ in edges])), shape=(n, n)
            )
            init = None
            if initial:
                init = np.array([initial.get(s, 0.0) for s in names])
            return MarkovChain(tuple(states[s] for s in names), matrix, init, tuple(labels))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError("missing 'kind layered' or 'kind chain'", None, None)


def format_stochastic(snet: LayeredStochasticNet | MarkovChain) -> str:
    lines = [STOCHASTIC_HEADER]
    if isinstance(snet, LayeredStochasticNet):
        lines += ["kind layered", "inputs " + " ".join(snet.input_labels), "outputs " + " ".join(snet.output_labels)]
        lines += [f"input {' '.join(_fmt(v) for v in x)} : {_fmt(p)}" for x, p in snet.input_distribution]
        lines += [
            f"cpt {' '.join(_fmt(v) for v in x)} : {' '.join(_fmt(q) for q in ps)}" for x, ps in snet.output_probabilities
        ]
    else:
        lines += ["kind chain", "labels " + " ".join(snet.labels)]
        names = [f"s{i}" for i in range(snet.n)]
        lines += [f"state {name} {' '.join(_fmt(v) for v in s)}" for name, s in zip(names, snet.states)]
        lines += [f"initial {name} {_fmt(p)}" for name, p in zip(names, snet.initial) if p]
        coo = snet.transition.tocoo()
        for i, j, p in sorted(zip(coo.row, coo.col, coo.data)):
            lines.append(f"edge {names[i]} {names[j]} {_fmt(p)}")
    return "\n".join(lines) + "\n"


def load_stochastic(path: str | Path):
    return parse_stochastic(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "NET_HEADER",
    "ENC_HEADER",
    "STOCHASTIC_HEADER",
    "parse_network",
    "format_network",
    "load_network",
    "parse_encoding",
    "format_encoding",
    "load_encoding",
    "parse_stochastic",
    "format_stochastic",
    "load_stochastic",
]
