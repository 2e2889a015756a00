"""Regenerate the sample input files from the reference gallery."""
from pathlib import Path

from semenc import gallery as g
from semenc.io import format_encoding, format_network, format_stochastic
from semenc.kbtext import format_kb
from semenc.translate import penalty_to_hopfield

HERE = Path(__file__).parent

EXTRA_PROGRAMS = {
    "choice.lp": "%semenc kb 1\nA <- ~B.\nB <- ~A.\n",
    "layered.lp": "%semenc kb 1\nA.\nB <- A.\nC <- A & B.\nC <- D.\nD <- B & E.\n",
}


def fixtures() -> dict[str, str]:
    files = {
        "oscillator.net": format_network(g.equivalence_oscillator()),
        "oscillator.enc": format_encoding(g.equivalence_encoding(), g.equivalence_oscillator()),
        "equivalence.kb": format_kb(g.equivalence_kb()),
        "oscillator_fuzzy.kb": format_kb(g.oscillator_fuzzy_kb()),
        "or_program.lp": format_kb(g.or_program()),
        "or_program.net": format_network(g.or_program_network()),
        "rotation.net": format_network(g.rotation_network()),
        "relational.net": format_network(g.relational_or_network()),
        "relational.enc": format_encoding(g.relational_or_encoding(), g.relational_or_network()),
        "relational.kb": format_kb(g.relational_kb()),
        "bernoulli_pair.snet": format_stochastic(g.bernoulli_pair_net()),
        "bernoulli_pair.enc": format_encoding(g.bernoulli_pair_encoding()),
        "exactly_one.kb": format_kb(g.exactly_one_kb()),
        "two_sentence.pkb": format_kb(g.two_sentence_penalty_kb(3.0, 2.0)),
        "hopfield.net": format_network(penalty_to_hopfield(g.two_sentence_penalty_kb(3.0, 2.0)).net),
    }
    files.update(EXTRA_PROGRAMS)
    return files


if __name__ == "__main__":
    for name, text in fixtures().items():
        (HERE / name).write_text(text, encoding="utf-8")
