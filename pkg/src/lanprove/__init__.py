"""lanprove: a prover for properties of operational-semantics language
definitions, with checkable Hoare-style derivations {P} L {Q}."""

from .assertions import (
    And,
    AtomA,
    Contravariant,
    ContraResp,
    Ctx,
    CtxCompliant,
    Effectful,
    ErrorHandler,
    NoDupliEf,
    Not,
    NotFlat,
    TRUE,
    TrueA,
    atoms_of,
    conjoin,
    entails,
    parse_assertion,
    render_assertion,
    render_atom,
)
from .grammar import (
    CategoryIndex,
    UnresolvedMetaVar,
    derivable_from_any,
    derives,
    get_args_positions,
    inductive_positions,
    resolve_metavar,
)
from .lanfile import (
    ParseError,
    ValidationError,
    parse_document,
    parse_language,
    render_language,
)
from .prover import (
    DerivationTree,
    FailureReport,
    ProofNode,
    ProverConfig,
    Statement,
    Subject,
    check_derivation,
    node_from_json,
    node_to_json,
    order_rules,
    prove,
    render_tree,
    saturate,
)
from .rules import (
    Derived,
    Justification,
    NotApplicable,
    try_contra_respecting,
    try_contravariant,
    try_ctx_compliant,
    try_effectful,
    try_effectual_args,
    try_error_handler,
    try_inductive,
)
from .syntax import (
    Binder,
    ConApp,
    Config,
    Formula,
    GrammarRule,
    Hole,
    InferenceRule,
    LanguageDef,
    MetaVarOcc,
    RuleKind,
    StrLit,
    Subst,
    classify_rule,
    contains_subst_involving,
    count_occurrences,
    term_equal,
    top_constructor,
    validate_language,
)

__all__ = [name for name in dir() if not name.startswith("_")]
