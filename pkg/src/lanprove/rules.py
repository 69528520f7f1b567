"""The seven base checks, one per derivable atom kind.

Each check is total: it either derives a new atom together with the
premise instances it discharged, or reports non-applicability with a
structured reason naming the failed premise and the offending subterm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .assertions import (
    Assertion,
    Atom,
    Contravariant,
    ContraResp,
    Ctx,
    CtxCompliant,
    Effectful,
    ErrorHandler,
    NoDupliEf,
    atoms_of,
    render_atom,
)
from .grammar import (
    CategoryIndex,
    derivable_from_any,
    derives,
    get_args_positions,
    inductive_positions,
)
from .lanfile import render_term
from .syntax import (
    PRED_SUBTYPE,
    PRED_TYPING,
    ConApp,
    GrammarRule,
    InferenceRule,
    RuleKind,
    classify_rule,
    contains_subst_involving,
    count_occurrences,
    step_configs,
    term_equal,
)

#: Base-rule names in the order they are attempted per inference rule.
BASE_RULE_ORDER = ("ctx-compliant", "error-handler", "effectful",
                   "effectual-args", "contravariant", "contra-respecting")


@dataclass(frozen=True)
class Justification:
    proof_rule: str
    discharged: tuple

    def __post_init__(self):
        object.__setattr__(self, "discharged", tuple(self.discharged))


@dataclass(frozen=True)
class Derived:
    atom: Atom
    justification: Justification


@dataclass(frozen=True)
class NotApplicable:
    check: str
    reason: str   # not-applicable | missing-precondition | premise-fails |
                  # no-error-argument | state-preserved
    detail: str


RuleOutcome = Union[Derived, NotApplicable]


def _positions_str(positions) -> str:
    return "{" + ",".join(str(n) for n in sorted(positions)) + "}"


def _lookup_ctx_atom(p: Assertion, metavar: str, constructor: str) -> Optional[Ctx]:
    matches = [atom for negated, atom in atoms_of(p)
               if (not negated and isinstance(atom, Ctx)
                   and atom.metavar == metavar
                   and atom.constructor == constructor)]
    if not matches:
        return None
    # several ctx atoms for one pair can coexist (a strengthened
    # precondition); pick deterministically
    return min(matches, key=lambda a: tuple(sorted(a.positions)))


def source_op(rule: InferenceRule) -> Optional[str]:
    """Top constructor of a reduction rule's source subject, if any."""
    if classify_rule(rule) is not RuleKind.REDUCTION:
        return None
    source, _ = step_configs(rule)
    if isinstance(source.subject, ConApp):
        return source.subject.constructor
    return None


def _reduction_shape(rule: InferenceRule, check: str):
    """Source/target configs of a reduction over a constructor subject,
    or the NotApplicable explaining why the check does not fire."""
    if classify_rule(rule) is not RuleKind.REDUCTION:
        return None, NotApplicable(check, "not-applicable",
                                   f"[{rule.name}] is not a reduction rule")
    source, target = step_configs(rule)
    if not isinstance(source.subject, ConApp):
        return None, NotApplicable(
            check, "not-applicable",
            f"the source of [{rule.name}] is not a constructor application")
    return (source, target), None


# ------------------------------------------------------------- inductive

def try_inductive(idx: CategoryIndex, g: GrammarRule, c: str) -> RuleOutcome:
    """Derive ctx(X, c, I') from a grammar rule; always applicable, the
    union over zero selected productions being empty."""
    selected = [p for p in g.productions
                if isinstance(p, ConApp) and p.constructor == c]
    positions = inductive_positions(idx, g, c)
    if selected:
        discharged = tuple(
            f"{render_term(p, idx)}.getArgs({g.metavar}) = "
            f"{_positions_str(get_args_positions(idx, p, g.metavar))}"
            for p in selected
        ) + (f"I' = {_positions_str(positions)}",)
    else:
        discharged = (f"no production of {g.metavar} has top constructor {c}; "
                      f"I' = {{}}",)
    atom = Ctx(g.metavar, c, positions)
    return Derived(atom, Justification("inductive", discharged))


# -------------------------------------------------------- ctx-compliant

def try_ctx_compliant(p: Assertion, rule: InferenceRule,
                      idx: CategoryIndex) -> RuleOutcome:
    shape, na = _reduction_shape(rule, "ctx-compliant")
    if na:
        return na
    source, _ = shape
    op = source.subject.constructor

    eval_rule = idx.eval_ctx_rule
    if eval_rule is None:
        return NotApplicable("ctx-compliant", "missing-precondition",
                             "no evaluation-context category is declared")
    ctx_atom = _lookup_ctx_atom(p, eval_rule.metavar, op)
    if ctx_atom is None:
        return NotApplicable(
            "ctx-compliant", "missing-precondition",
            f"no ctx({eval_rule.metavar}, {op}, _) atom in the precondition")

    positions = ctx_atom.positions
    discharged = [f"{render_atom(ctx_atom)} ∈ P"]
    for i, arg in enumerate(source.subject.args, start=1):
        witness = _value_or_error_witness(idx, arg)
        if witness is None:
            discharged.append(
                f"argument {i} ({render_term(arg, idx)}) need not be a value "
                f"or an error")
            continue
        if i not in positions:
            return NotApplicable(
                "ctx-compliant", "premise-fails",
                f"{witness} ⇒* {render_term(arg, idx)} but "
                f"{i} ∉ {_positions_str(positions)}")
        discharged.append(
            f"{witness} ⇒* {render_term(arg, idx)} implies "
            f"{i} ∈ {_positions_str(positions)}")
    atom = CtxCompliant(rule.name)
    return Derived(atom, Justification("ctx-compliant", tuple(discharged)))


def _value_or_error_witness(idx: CategoryIndex, term) -> Optional[str]:
    """Metavariable of the error or value category deriving the term."""
    for rule in (idx.error_rule, idx.value_rule):
        if rule is not None and derives(idx, rule.metavar, term):
            return rule.metavar
    return None


# -------------------------------------------------------- error-handler

def try_error_handler(p: Assertion, rule: InferenceRule,
                      idx: CategoryIndex) -> RuleOutcome:
    shape, na = _reduction_shape(rule, "error-handler")
    if na:
        return na
    source, _ = shape
    op = source.subject.constructor

    if (False, CtxCompliant(rule.name)) not in atoms_of(p):
        return NotApplicable(
            "error-handler", "missing-precondition",
            f"ctx-compliant([{rule.name}]) is not in the precondition")
    err_ctx = idx.err_ctx_rule
    if err_ctx is None:
        return NotApplicable("error-handler", "missing-precondition",
                             "no error-context category is declared")
    ctx_atom = _lookup_ctx_atom(p, err_ctx.metavar, op)
    if ctx_atom is None:
        return NotApplicable(
            "error-handler", "missing-precondition",
            f"no ctx({err_ctx.metavar}, {op}, _) atom in the precondition")

    error_rule = idx.error_rule
    candidates = []
    if error_rule is not None:
        for i, arg in enumerate(source.subject.args, start=1):
            if derives(idx, error_rule.metavar, arg):
                candidates.append((i, arg))
    if not candidates:
        return NotApplicable(
            "error-handler", "no-error-argument",
            f"no argument of {op} is derivable from the error category")

    positions = ctx_atom.positions
    for i, arg in candidates:
        if i not in positions:
            atom = ErrorHandler(op, i)
            discharged = (
                f"ctx-compliant([{rule.name}]) ∈ P",
                f"{render_atom(ctx_atom)} ∈ P",
                f"{error_rule.metavar} ⇒* {render_term(arg, idx)}",
                f"{i} ∉ {_positions_str(positions)}",
            )
            return Derived(atom, Justification("error-handler", discharged))
    i, arg = candidates[0]
    return NotApplicable(
        "error-handler", "premise-fails",
        f"the error at argument {i} ({render_term(arg, idx)}) is stolen by "
        f"an error context: {i} ∈ {_positions_str(positions)}")


# ------------------------------------------------------------- effectful

def try_effectful(rule: InferenceRule) -> RuleOutcome:
    if classify_rule(rule) is not RuleKind.REDUCTION:
        return NotApplicable("effectful", "not-applicable",
                             f"[{rule.name}] is not a reduction rule")
    source, target = step_configs(rule)
    if not source.state:
        return NotApplicable("effectful", "state-preserved",
                             f"[{rule.name}] is stateless")
    for i, (before, after) in enumerate(zip(source.state, target.state), start=1):
        if not term_equal(before, after):
            atom = Effectful(i)
            discharged = (f"state component {i}: {render_term(before)} ≠ "
                          f"{render_term(after)}",)
            return Derived(atom, Justification("effectful", discharged))
    return NotApplicable("effectful", "state-preserved",
                         f"[{rule.name}] preserves every state component")


# -------------------------------------------------------- effectual-args

def try_effectual_args(p: Assertion, rule: InferenceRule, idx: CategoryIndex,
                       ineffectual: frozenset) -> RuleOutcome:
    shape, na = _reduction_shape(rule, "effectual-args")
    if na:
        return na
    source, target = shape

    effectful = [a for neg, a in atoms_of(p)
                 if not neg and isinstance(a, Effectful)]
    if not effectful:
        return NotApplicable("effectual-args", "missing-precondition",
                             "no effectful(i) atom in the precondition")
    discharged = [f"{render_atom(min(effectful, key=lambda a: a.state_pos))} ∈ P"]

    ineff_str = "{" + ", ".join(sorted(ineffectual)) + "}"
    for arg in source.subject.args:
        if ineffectual and derivable_from_any(idx, ineffectual, arg):
            discharged.append(
                f"{render_term(arg, idx)} is derivable from ineffectual "
                f"{ineff_str}: vacuously satisfied")
            continue
        occurrences = count_occurrences(target.subject, arg)
        if occurrences >= 2:
            return NotApplicable(
                "effectual-args", "premise-fails",
                f"the target {render_term(target.subject, idx)} duplicates "
                f"argument {render_term(arg, idx)} ({occurrences} occurrences)")
        if contains_subst_involving(target.subject, arg):
            return NotApplicable(
                "effectual-args", "premise-fails",
                f"the target {render_term(target.subject, idx)} uses argument "
                f"{render_term(arg, idx)} in a substitution")
        discharged.append(
            f"{render_term(arg, idx)} occurs at most once in the target and "
            f"in no substitution")
    atom = NoDupliEf(rule.name)
    return Derived(atom, Justification("effectual-args", tuple(discharged)))


# -------------------------------------------------------- contravariant

def try_contravariant(rule: InferenceRule) -> RuleOutcome:
    if classify_rule(rule) is not RuleKind.SUBTYPING:
        return NotApplicable("contravariant", "not-applicable",
                             f"[{rule.name}] is not a subtyping rule")
    left, right = rule.conclusion.args
    if (not isinstance(left, ConApp) or not isinstance(right, ConApp)
            or left.constructor != right.constructor
            or len(left.args) != len(right.args)):
        return NotApplicable(
            "contravariant", "not-applicable",
            f"the conclusion of [{rule.name}] does not relate two "
            f"applications of one constructor")
    c = left.constructor
    positions = set()
    discharged = []
    for i, (a_i, b_i) in enumerate(zip(left.args, right.args), start=1):
        for premise in rule.premises:
            if premise.pred_name != PRED_SUBTYPE or len(premise.args) != 2:
                continue
            if term_equal(premise.args[0], b_i) and term_equal(premise.args[1], a_i):
                positions.add(i)
                discharged.append(
                    f"premise {render_term(b_i)} <: {render_term(a_i)} flips "
                    f"argument {i}")
                break
    if not discharged:
        discharged.append("no subtyping premise is flipped; positions = {}")
    atom = Contravariant(c, frozenset(positions))
    return Derived(atom, Justification("contravariant", tuple(discharged)))


# ---------------------------------------------------- contra-respecting

def try_contra_respecting(p: Assertion, rule: InferenceRule,
                          constructor: str) -> RuleOutcome:
    """Check one typing rule against the contravariant positions of one
    constructor; the engine calls once per constructor with a nonempty
    position set."""
    if classify_rule(rule) is not RuleKind.TYPING:
        return NotApplicable("contra-respecting", "not-applicable",
                             f"[{rule.name}] is not a typing rule")
    positions = set()
    for neg, atom in atoms_of(p):
        if (not neg and isinstance(atom, Contravariant)
                and atom.constructor == constructor):
            positions |= atom.positions
    if not positions:
        return NotApplicable(
            "contra-respecting", "missing-precondition",
            f"no contravariant({constructor}, ...) atom with nonempty "
            f"positions in the precondition")

    discharged = [f"contravariant({constructor}, {_positions_str(positions)}) ∈ P"]
    relevant = False
    for premise in rule.premises:
        if premise.pred_name != PRED_TYPING or len(premise.args) != 3:
            continue
        out_type = premise.args[2]
        if not isinstance(out_type, ConApp) or out_type.constructor != constructor:
            continue
        relevant = True
        for i in sorted(positions):
            if i > len(out_type.args):
                continue
            t_i = out_type.args[i - 1]
            for other in rule.premises:
                if (other.pred_name == PRED_SUBTYPE and len(other.args) == 2
                        and term_equal(other.args[0], t_i)):
                    return NotApplicable(
                        "contra-respecting", "premise-fails",
                        f"premise {render_term(other.args[0])} <: "
                        f"{render_term(other.args[1])} places the contravariant "
                        f"argument {render_term(t_i)} on the left of <:")
            discharged.append(
                f"no premise places {render_term(t_i)} (contravariant "
                f"position {i}) on the left of <:")
    if not relevant:
        discharged.append(
            f"no premise types its subject with {constructor}: vacuously "
            f"satisfied")
    atom = ContraResp(rule.name, constructor)
    return Derived(atom, Justification("contra-respecting", tuple(discharged)))
