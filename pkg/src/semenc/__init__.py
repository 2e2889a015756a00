"""Semantic encodings of knowledge bases in finite-state networks."""
from .encoding import (
    Agg,
    DatTriple,
    EncodingDAT,
    EncodingNAT,
    EncodingReport,
    TableEncoding,
    check_logical_classifier,
    check_neural_model,
    check_semantic_encoding,
    clamp_inputs,
    models_of_network,
    transport_encoding,
    validate_encoding,
)
from .errors import (
    CompileError,
    DomainError,
    EncodingError,
    NonConvergenceError,
    NotHopfieldError,
    ParseError,
    SemencError,
    StateSpaceTooLarge,
    TransportError,
    UniverseMismatch,
)
from .formula import And, Atom, Exists, Forall, Formula, Iff, Implies, Not, Or
from .fuzzy import (
    GODEL,
    LUKASIEWICZ,
    PRODUCT,
    FuzzySentence,
    PartialGrounding,
    eval_formula,
    fid_fuzzy,
    fid_fuzzy_network,
    interval_distance,
    satisfies,
)
from .kbtext import format_kb, parse_formula, parse_kb
from .logic import (
    Clause,
    LogicProgram,
    PenaltyKB,
    clause,
    fixed_points,
    ground,
    kb_models,
    models_of,
    penalty,
    penalty_models,
    tp_fixpoint,
    tp_step,
)
from .measures import FidelityReport
from .modelset import ModelSet
from .network import (
    HEAVISIDE,
    IDENTITY,
    SIGN,
    CandidateNetwork,
    TransferFn,
    TransitionReport,
    UpdateMode,
    compute_x_inf,
    hopfield_energy,
    step,
    trajectory,
    update,
)
from .stochastic import (
    LayeredStochasticNet,
    LimitingDistribution,
    MarkovChain,
    embed_deterministic,
    expected_satisfaction,
    fid_prob,
    limiting_distribution,
    semantic_loss,
)
from .translate import (
    Certificate,
    CompilationResult,
    cilp_compile,
    hopfield_to_penalty,
    horn_extract,
    kbann_compile,
    penalty_to_hopfield,
)

__version__ = "0.1.0"

__all__ = [
    "Agg",
    "DatTriple",
    "EncodingDAT",
    "EncodingNAT",
    "EncodingReport",
    "TableEncoding",
    "check_logical_classifier",
    "check_neural_model",
    "check_semantic_encoding",
    "clamp_inputs",
    "models_of_network",
    "transport_encoding",
    "validate_encoding",
    "CompileError",
    "DomainError",
    "EncodingError",
    "NonConvergenceError",
    "NotHopfieldError",
    "ParseError",
    "SemencError",
    "StateSpaceTooLarge",
    "TransportError",
    "UniverseMismatch",
    "And",
    "Atom",
    "Exists",
    "Forall",
    "Formula",
    "Iff",
    "Implies",
    "Not",
    "Or",
    "GODEL",
    "LUKASIEWICZ",
    "PRODUCT",
    "FuzzySentence",
    "PartialGrounding",
    "eval_formula",
    "fid_fuzzy",
    "fid_fuzzy_network",
    "interval_distance",
    "satisfies",
    "format_kb",
    "parse_formula",
    "parse_kb",
    "Clause",
    "LogicProgram",
    "PenaltyKB",
    "clause",
    "fixed_points",
    "ground",
    "kb_models",
    "models_of",
    "penalty",
    "penalty_models",
    "tp_fixpoint",
    "tp_step",
    "FidelityReport",
    "ModelSet",
    "HEAVISIDE",
    "IDENTITY",
    "SIGN",
    "CandidateNetwork",
    "TransferFn",
    "TransitionReport",
    "UpdateMode",
    "compute_x_inf",
    "hopfield_energy",
    "step",
    "trajectory",
    "update",
    "LayeredStochasticNet",
    "LimitingDistribution",
    "MarkovChain",
    "embed_deterministic",
    "expected_satisfaction",
    "fid_prob",
    "limiting_distribution",
    "semantic_loss",
    "Certificate",
    "CompilationResult",
    "cilp_compile",
    "hopfield_to_penalty",
    "horn_extract",
    "kbann_compile",
    "penalty_to_hopfield",
]
