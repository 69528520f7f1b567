"""Abstract syntax for language definitions.

A language definition is a grammar (ordered grammar rules) plus an
inference system (ordered named inference rules), together with the set
of metavariables declared ineffectual by the definition file.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class MetaVarOcc:
    """Occurrence of a grammar metavariable, e.g. ``E1`` or ``T'``."""

    name: str


@dataclass(frozen=True)
class ConApp:
    """Constructor application ``(c t1 ... tn)``; arity may be zero."""

    constructor: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Binder:
    """Unary binding ``(x)t``."""

    bound_var: str
    body: "Term"


@dataclass(frozen=True)
class Subst:
    """Substitution notation ``t[t'/x]``."""

    body: "Term"
    replacement: "Term"
    var: str


@dataclass(frozen=True)
class Hole:
    """The context hole ``[]``."""


@dataclass(frozen=True)
class StrLit:
    """Atomic string constant, e.g. the newline literal in a print rule."""

    value: str


Term = Union[MetaVarOcc, ConApp, Binder, Subst, Hole, StrLit]

HOLE = Hole()


# ------------------------------------------------------------- formulae

#: Reserved predicate names.  Everything else is user-defined and opaque.
PRED_TYPING = "typing"
PRED_SUBTYPE = "subtype"
PRED_STEP = "step"


@dataclass(frozen=True)
class Config:
    """One side of a reduction formula: a subject plus state terms."""

    subject: Term
    state: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "state", tuple(self.state))


@dataclass(frozen=True)
class Formula:
    """Predicate applied to arguments.

    For the reserved ``step`` predicate the two arguments are Config
    values; for every other predicate they are terms.
    """

    pred_name: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class GrammarRule:
    """``cname X ::= t1 | ... | tn``"""

    cat_name: str
    metavar: str
    productions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))


@dataclass(frozen=True)
class InferenceRule:
    name: str
    premises: tuple
    conclusion: Formula

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))


@dataclass(frozen=True)
class LanguageDef:
    grammar: tuple = ()
    inf_system: tuple = ()
    ineffectual: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "grammar", tuple(self.grammar))
        object.__setattr__(self, "inf_system", tuple(self.inf_system))
        object.__setattr__(self, "ineffectual", frozenset(self.ineffectual))


class RuleKind(enum.Enum):
    TYPING = "typing"
    SUBTYPING = "subtyping"
    REDUCTION = "reduction"
    OTHER = "other"


def classify_rule(rule: InferenceRule) -> RuleKind:
    """Classify an inference rule by its conclusion's predicate name."""
    pred = rule.conclusion.pred_name
    if pred == PRED_TYPING:
        return RuleKind.TYPING
    if pred == PRED_SUBTYPE:
        return RuleKind.SUBTYPING
    if pred == PRED_STEP:
        return RuleKind.REDUCTION
    return RuleKind.OTHER


# --------------------------------------------------------- term walking

class NotAConApp(Exception):
    pass


def term_equal(a: Term, b: Term) -> bool:
    """Structural equality; binder-bound variable names compare literally."""
    return a == b


def subterms(t: Term):
    """Yield every subterm position of ``t``, including ``t`` itself.

    Both the body and the replacement of a substitution count as
    positions; binder bodies do too.
    """
    yield t
    if isinstance(t, ConApp):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, Binder):
        yield from subterms(t.body)
    elif isinstance(t, Subst):
        yield from subterms(t.body)
        yield from subterms(t.replacement)


def count_occurrences(haystack: Term, needle: Term) -> int:
    """Number of subterm positions of ``haystack`` equal to ``needle``."""
    return sum(1 for s in subterms(haystack) if s == needle)


def contains_subst_involving(haystack: Term, needle: Term) -> bool:
    """True iff some substitution node in ``haystack`` has a replacement
    containing ``needle`` as a subterm."""
    for s in subterms(haystack):
        if isinstance(s, Subst) and count_occurrences(s.replacement, needle) >= 1:
            return True
    return False


def top_constructor(t: Term) -> Optional[str]:
    """Top-level constructor of a constructor application, else None."""
    if isinstance(t, ConApp):
        return t.constructor
    return None


def formula_terms(f: Formula):
    """Yield the terms of a formula, flattening step configs."""
    for arg in f.args:
        if isinstance(arg, Config):
            yield arg.subject
            yield from arg.state
        else:
            yield arg


def language_terms(lang: LanguageDef):
    """Yield every term of a language definition, in document order."""
    for g in lang.grammar:
        yield from g.productions
    for r in lang.inf_system:
        for f in r.premises:
            yield from formula_terms(f)
        yield from formula_terms(r.conclusion)


def language_constructors(lang: LanguageDef):
    """All constructor names of a definition, in first-appearance order."""
    seen = {}
    for t in language_terms(lang):
        for s in subterms(t):
            if isinstance(s, ConApp) and s.constructor not in seen:
                seen[s.constructor] = None
    return list(seen)


def step_configs(rule: InferenceRule):
    """The (source, target) configs of a reduction rule's conclusion."""
    if classify_rule(rule) is not RuleKind.REDUCTION:
        raise ValueError(f"not a reduction rule: {rule.name}")
    src, tgt = rule.conclusion.args
    return src, tgt


# ------------------------------------------------------------ validation

@dataclass(frozen=True)
class Finding:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    def add(self, code: str, message: str):
        self.findings.append(Finding(code, message))

    @property
    def ok(self) -> bool:
        return not self.findings

    def __iter__(self):
        return iter(self.findings)

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.findings)


def validate_language(lang: LanguageDef) -> ValidationReport:
    """Check the structural invariants of a language definition.

    The report is empty iff metavariables, category names and rule names
    are unique, constructor arities are consistent, the state arity of
    reduction formulae is uniform, every metavariable occurrence
    resolves, and every ineffectual name is a declared metavariable.
    """
    from .grammar import CategoryIndex, UnresolvedMetaVar, resolve_metavar

    report = ValidationReport()

    seen_mv, seen_cat = set(), set()
    for g in lang.grammar:
        if g.metavar in seen_mv:
            report.add("duplicate-metavariable",
                       f"metavariable {g.metavar} declared by more than one grammar rule")
        seen_mv.add(g.metavar)
        if g.cat_name in seen_cat:
            report.add("duplicate-category",
                       f"category {g.cat_name} declared more than once")
        seen_cat.add(g.cat_name)
        if not g.productions:
            report.add("empty-grammar-rule",
                       f"grammar rule {g.cat_name} has no productions")

    seen_rule = set()
    for r in lang.inf_system:
        if r.name in seen_rule:
            report.add("duplicate-rule-name",
                       f"inference rule [{r.name}] declared more than once")
        seen_rule.add(r.name)
        for f in (*r.premises, r.conclusion):
            if not f.args:
                report.add("empty-formula",
                           f"formula {f.pred_name} in [{r.name}] has no arguments")

    idx = CategoryIndex(lang)

    arities = {}
    for t in language_terms(lang):
        for s in subterms(t):
            if isinstance(s, ConApp):
                prev = arities.setdefault(s.constructor, len(s.args))
                if prev != len(s.args):
                    report.add("arity-mismatch",
                               f"constructor {s.constructor} used with arities "
                               f"{prev} and {len(s.args)}")
            elif isinstance(s, MetaVarOcc):
                try:
                    resolve_metavar(idx, s.name)
                except UnresolvedMetaVar:
                    report.add("unknown-metavariable",
                               f"metavariable occurrence {s.name} does not resolve "
                               f"to a declared category")

    state_arity = None
    for r in lang.inf_system:
        for f in (*r.premises, r.conclusion):
            if f.pred_name == PRED_TYPING and len(f.args) != 3:
                report.add("malformed-typing",
                           f"typing formula in [{r.name}] needs an environment, "
                           f"a subject, and a type")
            elif f.pred_name == PRED_SUBTYPE and len(f.args) != 2:
                report.add("malformed-subtype",
                           f"subtype formula in [{r.name}] needs two terms")
            if f.pred_name != PRED_STEP:
                if any(isinstance(a, Config) for a in f.args):
                    report.add("malformed-formula",
                               f"only step formulae take configs, in [{r.name}]")
                continue
            if len(f.args) != 2:
                report.add("malformed-step",
                           f"step formula in [{r.name}] needs two configs")
            for cfg in f.args:
                if not isinstance(cfg, Config):
                    report.add("malformed-step",
                               f"step formula in [{r.name}] has a non-config argument")
                    continue
                if state_arity is None:
                    state_arity = len(cfg.state)
                elif state_arity != len(cfg.state):
                    report.add("state-arity-mismatch",
                               f"[{r.name}] uses state arity {len(cfg.state)}, "
                               f"expected {state_arity}")

    for name in sorted(lang.ineffectual):
        if name not in idx.by_metavar:
            report.add("unknown-metavariable",
                       f"ineffectual name {name} is not a declared metavariable")

    # deduplicate repeated identical findings (e.g. one arity clash seen
    # at many occurrences) while keeping first-seen order
    unique = list(dict.fromkeys(report.findings))
    report.findings = unique
    return report
