"""Knowledge after broadcasts: models, formulas, engines, executable laws.

The usual entry points:

    >>> from knowcast import builtin, holds, parse
    >>> model, state = builtin("ex4")
    >>> holds(model, state, parse(model, "K{i} K{k} p"))
    True
"""

from .builtin_models import BUILTIN_NAMES, builtin
from .core import (
    InteractionModel,
    Knowledge,
    KnowcastError,
    Message,
    Mode,
    State,
    Violation,
    build_model,
    completion,
    complete_hypergraph,
    find_explanation,
    known_set,
    make_arc,
    make_state,
    message_universe,
    messages_to_word,
    restrict,
    validate_state,
)
from .formula import (
    CK,
    And,
    Atom,
    Formula,
    K,
    Not,
    Or,
    classify,
    cnf,
    expand_word,
    facts_of,
    parse,
    render,
    subformulas,
)
from .laws import (
    DEFAULT_RANDOM_BUDGET,
    LAW_IDS,
    LawReport,
    SuiteResult,
    check_law,
    generate_formulas,
    generate_models,
    replay_witness,
    run_suite,
)
from .modelfile import (
    ModelFile,
    ModelFileError,
    parse_message_text,
    parse_model_file,
    parse_model_text,
    write_model_text,
)
from .semantics import (
    DEFAULT_CAP,
    CapExceededError,
    Evaluator,
    StateSpace,
    Verdict3,
    enumerate_states,
    enumerate_states_bounded,
    get_evaluator,
    holds,
    holds_bounded,
    holds_positive_fast,
    indist,
    reachable,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES", "builtin",
    "InteractionModel", "Knowledge", "KnowcastError", "Message", "Mode",
    "State", "Violation", "build_model", "completion", "complete_hypergraph",
    "find_explanation", "known_set", "make_arc", "make_state",
    "message_universe", "messages_to_word", "restrict", "validate_state",
    "CK", "And", "Atom", "Formula", "K", "Not", "Or", "classify", "cnf",
    "expand_word", "facts_of", "parse", "render", "subformulas",
    "DEFAULT_RANDOM_BUDGET", "LAW_IDS", "LawReport", "SuiteResult",
    "check_law", "generate_formulas", "generate_models", "replay_witness",
    "run_suite",
    "ModelFile", "ModelFileError", "parse_message_text", "parse_model_file",
    "parse_model_text", "write_model_text",
    "DEFAULT_CAP", "CapExceededError", "Evaluator", "StateSpace", "Verdict3",
    "enumerate_states", "enumerate_states_bounded", "get_evaluator", "holds",
    "holds_bounded", "holds_positive_fast", "indist", "reachable",
    "__version__",
]
