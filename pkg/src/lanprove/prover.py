"""Forward-reasoning engine.

Saturation walks the grammar once deriving every context atom, then
repeats passes over the (reordered) inference rules applying the base
checks until a pass adds nothing.  A proof for a goal is assembled by
projecting the goal out of the saturated postcondition with one
consequence step at the root; failures report the missing atoms and the
nearest-miss reasons recorded during saturation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .assertions import (
    Assertion,
    Contravariant,
    ContraResp,
    Ctx,
    CtxCompliant,
    Effectful,
    ErrorHandler,
    NoDupliEf,
    assertion_from_json,
    assertion_to_json,
    atom_key,
    atom_to_json,
    atoms_of,
    conjoin,
    entails,
    render_atom,
    render_assertion,
)
from .grammar import CategoryIndex
from .rules import (
    BASE_RULE_ORDER,
    Derived,
    NotApplicable,
    source_op,
    try_contra_respecting,
    try_contravariant,
    try_ctx_compliant,
    try_effectful,
    try_effectual_args,
    try_error_handler,
    try_inductive,
)
from .syntax import (
    LanguageDef,
    RuleKind,
    classify_rule,
    language_constructors,
    top_constructor,
)

STRUCTURAL_RULES = ("lang", "grammar", "inf", "perm-g", "perm-r",
                    "X-neutral", "iterate", "consequence")


# ------------------------------------------------------------ statements

@dataclass(frozen=True)
class Subject:
    kind: str  # language | grammar | inference-system | grammar-rule | inference-rule
    ref: str = ""


SUBJ_LANG = Subject("language")
SUBJ_GRAMMAR = Subject("grammar")
SUBJ_INF = Subject("inference-system")


def grammar_subject(cat_name: str) -> Subject:
    return Subject("grammar-rule", cat_name)


def rule_subject(rule_name: str) -> Subject:
    return Subject("inference-rule", rule_name)


@dataclass(frozen=True)
class Statement:
    pre: Assertion
    subject: Subject
    post: Assertion


@dataclass(frozen=True)
class ProofNode:
    rule: str
    statement: Statement
    side_conditions: tuple = ()
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "side_conditions", tuple(self.side_conditions))
        object.__setattr__(self, "children", tuple(self.children))

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


DerivationTree = ProofNode


@dataclass(frozen=True)
class FailureReport:
    missing: tuple   # signed atoms of the goal absent from the saturation
    nearest_misses: tuple  # (at, reason) pairs

    def __post_init__(self):
        object.__setattr__(self, "missing", tuple(self.missing))
        object.__setattr__(self, "nearest_misses", tuple(self.nearest_misses))


@dataclass(frozen=True)
class ProverConfig:
    max_passes: Optional[int] = None
    ineffectual_override: Optional[frozenset] = None

    def passes_for(self, lang: LanguageDef) -> int:
        if self.max_passes is not None:
            if self.max_passes < 1:
                raise ValueError("max_passes must be at least 1")
            return self.max_passes
        return len(lang.inf_system) + 1

    def ineffectual_for(self, lang: LanguageDef) -> frozenset:
        if self.ineffectual_override is not None:
            return frozenset(self.ineffectual_override)
        return lang.ineffectual


@dataclass(frozen=True)
class TraceEntry:
    subject: Subject
    check: str
    target: str  # constructor under analysis, where the check has one
    outcome: Union[Derived, NotApplicable]


# ------------------------------------------------------------- ordering

def order_rules(inf_system) -> list:
    """Stable reordering placing subtyping rules first."""
    subtyping = [r for r in inf_system
                 if classify_rule(r) is RuleKind.SUBTYPING]
    rest = [r for r in inf_system if classify_rule(r) is not RuleKind.SUBTYPING]
    return subtyping + rest


# ------------------------------------------------------------ saturation

@dataclass
class SaturationResult:
    final: Assertion
    trace: list
    grammar_events: list      # per grammar rule: [(check, atom, justification)]
    passes: list              # productive passes; each aligned with sorted_rules
    sorted_rules: list
    idx: CategoryIndex
    ineffectual: frozenset
    after_grammar: Assertion = None


def _grammar_targets(lang: LanguageDef, idx: CategoryIndex, g):
    """Constructors to analyze for one grammar rule: the rule's own top
    constructors, and for the context categories every constructor of
    the whole definition."""
    targets, seen = [], set()
    for p in g.productions:
        c = top_constructor(p)
        if c is not None and c not in seen:
            seen.add(c)
            targets.append(c)
    if g is idx.eval_ctx_rule or g is idx.err_ctx_rule:
        for c in language_constructors(lang):
            if c not in seen:
                seen.add(c)
                targets.append(c)
    return targets


def _saturate(lang: LanguageDef, pre: Assertion,
              cfg: ProverConfig) -> SaturationResult:
    idx = CategoryIndex(lang)
    ineffectual = cfg.ineffectual_for(lang)
    current = pre
    have = set(atoms_of(pre))
    trace = []

    def record(subject, check, target, outcome):
        nonlocal current
        trace.append(TraceEntry(subject, check, target, outcome))
        if isinstance(outcome, Derived) and (False, outcome.atom) not in have:
            have.add((False, outcome.atom))
            current = conjoin(current, outcome.atom)
            return (check, outcome.atom, outcome.justification)
        return None

    grammar_events = []
    for g in lang.grammar:
        events = []
        for c in _grammar_targets(lang, idx, g):
            ev = record(grammar_subject(g.cat_name), "inductive", c,
                        try_inductive(idx, g, c))
            if ev:
                events.append(ev)
        grammar_events.append(events)
    after_grammar = current

    sorted_rules = order_rules(lang.inf_system)
    passes = []
    for _ in range(cfg.passes_for(lang)):
        pass_events = []
        for r in sorted_rules:
            events = []

            def run(check, target, outcome):
                ev = record(rule_subject(r.name), check, target, outcome)
                if ev:
                    events.append(ev)

            for check in BASE_RULE_ORDER:
                if check == "ctx-compliant":
                    run(check, "", try_ctx_compliant(current, r, idx))
                elif check == "error-handler":
                    run(check, "", try_error_handler(current, r, idx))
                elif check == "effectful":
                    run(check, "", try_effectful(r))
                elif check == "effectual-args":
                    run(check, "", try_effectual_args(current, r, idx, ineffectual))
                elif check == "contravariant":
                    run(check, "", try_contravariant(r))
                else:  # contra-respecting, once per relevant constructor
                    constructors = sorted({
                        a.constructor for neg, a in have
                        if not neg and isinstance(a, Contravariant) and a.positions})
                    for c in constructors:
                        run(check, c, try_contra_respecting(current, r, c))
            pass_events.append(events)
        if not any(pass_events):
            break
        passes.append(pass_events)

    return SaturationResult(current, trace, grammar_events, passes,
                            sorted_rules, idx, ineffectual, after_grammar)


def saturate(lang: LanguageDef, pre: Assertion,
             cfg: ProverConfig = ProverConfig()):
    """Run the full analysis; returns the saturated assertion and the
    trace of every check outcome."""
    result = _saturate(lang, pre, cfg)
    return result.final, result.trace


# ---------------------------------------------------------- tree builder

def _chain(subject: Subject, pre: Assertion, events):
    """Leaf for zero events, a single base-rule node for one, or a
    left-nested iterate chain threading the assertions through."""
    if not events:
        node = ProofNode("X-neutral", Statement(pre, subject, pre))
        return node, pre
    current = pre
    leaves = []
    for check, atom, justification in events:
        post = conjoin(current, atom)
        leaves.append(ProofNode(check, Statement(current, subject, post),
                                justification.discharged))
        current = post
    node = leaves[0]
    for leaf in leaves[1:]:
        node = ProofNode("iterate",
                         Statement(node.statement.pre, subject,
                                   leaf.statement.post),
                         (), (node, leaf))
    return node, current


def _build_tree(lang: LanguageDef, pre: Assertion, goal: Assertion,
                sat: SaturationResult) -> ProofNode:
    current = pre
    g_children = []
    for g, events in zip(lang.grammar, sat.grammar_events):
        node, current = _chain(grammar_subject(g.cat_name), current, events)
        g_children.append(node)
    grammar_node = ProofNode("grammar", Statement(pre, SUBJ_GRAMMAR, current),
                             (), tuple(g_children))
    perm_g = ProofNode("perm-g", Statement(pre, SUBJ_GRAMMAR, current),
                       ("identity permutation of the grammar rules",),
                       (grammar_node,))
    after_grammar = current

    passes = sat.passes if sat.passes else [[[] for _ in sat.sorted_rules]]
    pass_nodes = []
    for pass_events in passes:
        pass_pre = current
        children = []
        for r, events in zip(sat.sorted_rules, pass_events):
            node, current = _chain(rule_subject(r.name), current, events)
            children.append(node)
        pass_nodes.append(ProofNode("inf", Statement(pass_pre, SUBJ_INF, current),
                                    (), tuple(children)))
    inf_inner = pass_nodes[0]
    for nxt in pass_nodes[1:]:
        inf_inner = ProofNode("iterate",
                              Statement(inf_inner.statement.pre, SUBJ_INF,
                                        nxt.statement.post),
                              (), (inf_inner, nxt))
    order_note = "subtyping rules first: " + " ".join(
        f"[{r.name}]" for r in sat.sorted_rules)
    perm_r = ProofNode("perm-r", Statement(after_grammar, SUBJ_INF, current),
                       (order_note,), (inf_inner,))

    lang_node = ProofNode("lang", Statement(pre, SUBJ_LANG, current),
                          (), (perm_g, perm_r))
    side = (f"{render_assertion(pre)} ⇒ {render_assertion(pre)}",
            f"saturated postcondition ⇒ {render_assertion(goal)}")
    return ProofNode("consequence", Statement(pre, SUBJ_LANG, goal),
                     side, (lang_node,))


def _trivial_tree(pre: Assertion, goal: Assertion) -> ProofNode:
    neutral_g = ProofNode("X-neutral", Statement(pre, SUBJ_GRAMMAR, pre))
    neutral_i = ProofNode("X-neutral", Statement(pre, SUBJ_INF, pre))
    lang_node = ProofNode("lang", Statement(pre, SUBJ_LANG, pre),
                          (), (neutral_g, neutral_i))
    side = (f"{render_assertion(pre)} ⇒ {render_assertion(pre)}",
            f"{render_assertion(pre)} ⇒ {render_assertion(goal)}")
    return ProofNode("consequence", Statement(pre, SUBJ_LANG, goal),
                     side, (lang_node,))


# ------------------------------------------------------- failure reports

_ATOM_CHECKS = {
    CtxCompliant: "ctx-compliant",
    NoDupliEf: "effectual-args",
    ContraResp: "contra-respecting",
    ErrorHandler: "error-handler",
    Effectful: "effectful",
}


def _nearest_misses(missing, sat: SaturationResult, lang: LanguageDef):
    last_na = {}
    for entry in sat.trace:
        if isinstance(entry.outcome, NotApplicable):
            last_na[(entry.subject.ref, entry.check, entry.target)] = entry.outcome
    final_atoms = atoms_of(sat.final)

    misses = []

    def add(at, reason):
        if (at, reason) not in misses:
            misses.append((at, reason))

    for negated, atom in sorted(missing, key=lambda sa: (atom_key(sa[1]), sa[0])):
        if negated:
            add("goal", f"no proof rule derives ~{render_atom(atom)}; negated "
                        f"atoms hold only when already in the precondition")
            continue
        if isinstance(atom, (CtxCompliant, NoDupliEf)):
            na = last_na.get((atom.rule_name, _ATOM_CHECKS[type(atom)], ""))
            if na:
                add(f"[{atom.rule_name}]", na.detail)
            else:
                add(f"[{atom.rule_name}]", f"no such inference rule was analyzed")
        elif isinstance(atom, ContraResp):
            na = last_na.get((atom.rule_name, "contra-respecting", atom.constructor))
            if na is None:
                na = last_na.get((atom.rule_name, "contra-respecting", ""))
            if na:
                add(f"[{atom.rule_name}]", na.detail)
            else:
                add(f"[{atom.rule_name}]",
                    f"contra-respecting was never attempted for "
                    f"{atom.constructor} on [{atom.rule_name}]")
        elif isinstance(atom, ErrorHandler):
            found = False
            for r in sat.sorted_rules:
                if source_op(r) == atom.constructor:
                    na = last_na.get((r.name, "error-handler", ""))
                    if na:
                        add(f"[{r.name}]", na.detail)
                        found = True
            if not found:
                add("goal", f"no reduction rule of {atom.constructor} could "
                            f"derive {render_atom(atom)}")
        elif isinstance(atom, Effectful):
            found = False
            for r in sat.sorted_rules:
                na = last_na.get((r.name, "effectful", ""))
                if na and na.reason == "state-preserved":
                    add(f"[{r.name}]", na.detail)
                    found = True
            if not found:
                add("goal", f"{render_atom(atom)} is not derivable")
        elif isinstance(atom, Ctx):
            alternatives = sorted(
                (a for neg, a in final_atoms
                 if not neg and isinstance(a, Ctx)
                 and a.metavar == atom.metavar
                 and a.constructor == atom.constructor),
                key=atom_key)
            rule = sat.idx.by_metavar.get(atom.metavar)
            at = rule.cat_name if rule else atom.metavar
            if alternatives:
                add(at, f"derived {render_atom(alternatives[0])} instead of "
                        f"{render_atom(atom)}")
            else:
                add(at, f"no ctx atom was derived for "
                        f"({atom.metavar}, {atom.constructor})")
        elif isinstance(atom, Contravariant):
            alternatives = sorted(
                (a for neg, a in final_atoms
                 if not neg and isinstance(a, Contravariant)
                 and a.constructor == atom.constructor),
                key=atom_key)
            if alternatives:
                add("goal", f"derived {render_atom(alternatives[0])} instead "
                            f"of {render_atom(atom)}")
            else:
                add("goal", f"no subtyping rule derives a contravariant atom "
                            f"for {atom.constructor}")
    return misses


# ------------------------------------------------------------------ prove

def prove(lang: LanguageDef, pre: Assertion, goal: Assertion,
          cfg: ProverConfig = ProverConfig()):
    """Prove {pre} L {goal}: a derivation tree, or a failure report."""
    if entails(pre, goal):
        return _trivial_tree(pre, goal)
    sat = _saturate(lang, pre, cfg)
    if entails(sat.final, goal):
        return _build_tree(lang, pre, goal, sat)
    missing = tuple(sorted(atoms_of(goal) - atoms_of(sat.final),
                           key=lambda sa: (atom_key(sa[1]), sa[0])))
    return FailureReport(missing, tuple(_nearest_misses(missing, sat, lang)))


# ------------------------------------------------------------ re-checking

def _same_atoms(a: Assertion, b: Assertion) -> bool:
    return atoms_of(a) == atoms_of(b)


def check_derivation(lang: LanguageDef, tree: ProofNode,
                     cfg: ProverConfig = ProverConfig()) -> bool:
    """Recompute every side condition of an emitted tree from scratch;
    false on any violation."""
    try:
        return _check_node(lang, tree, CategoryIndex(lang),
                           cfg.ineffectual_for(lang))
    except Exception:
        return False


def _single_new_atom(st: Statement):
    pre, post = atoms_of(st.pre), atoms_of(st.post)
    new = post - pre
    if len(new) != 1 or post != pre | new:
        return None
    ((negated, atom),) = new
    if negated:
        return None
    return atom


def _check_node(lang, node: ProofNode, idx, ineffectual) -> bool:
    st = node.statement
    kids = node.children
    rule_name = node.rule

    if rule_name == "X-neutral":
        return not kids and _same_atoms(st.pre, st.post)

    if rule_name == "consequence":
        if len(kids) != 1:
            return False
        inner = kids[0].statement
        return (inner.subject == st.subject
                and atoms_of(inner.pre) <= atoms_of(st.pre)
                and atoms_of(st.post) <= atoms_of(inner.post)
                and _check_node(lang, kids[0], idx, ineffectual))

    if rule_name == "lang":
        if st.subject.kind != "language" or len(kids) != 2:
            return False
        g, i = kids
        return (g.statement.subject.kind == "grammar"
                and i.statement.subject.kind == "inference-system"
                and _same_atoms(g.statement.pre, st.pre)
                and _same_atoms(i.statement.pre, g.statement.post)
                and _same_atoms(st.post, i.statement.post)
                and _check_node(lang, g, idx, ineffectual)
                and _check_node(lang, i, idx, ineffectual))

    if rule_name in ("perm-g", "perm-r"):
        kind = "grammar" if rule_name == "perm-g" else "inference-system"
        if st.subject.kind != kind or len(kids) != 1:
            return False
        inner = kids[0].statement
        return (inner.subject.kind == kind
                and _same_atoms(inner.pre, st.pre)
                and _same_atoms(inner.post, st.post)
                and _check_node(lang, kids[0], idx, ineffectual))

    if rule_name in ("grammar", "inf"):
        if rule_name == "grammar":
            if st.subject.kind != "grammar":
                return False
            expected = sorted(g.cat_name for g in lang.grammar)
            kid_kind = "grammar-rule"
        else:
            if st.subject.kind != "inference-system":
                return False
            expected = sorted(r.name for r in lang.inf_system)
            kid_kind = "inference-rule"
        refs = sorted(k.statement.subject.ref for k in kids)
        if refs != expected:
            return False
        current = st.pre
        for kid in kids:
            if kid.statement.subject.kind != kid_kind:
                return False
            if not _same_atoms(kid.statement.pre, current):
                return False
            if not _check_node(lang, kid, idx, ineffectual):
                return False
            current = kid.statement.post
        return _same_atoms(st.post, current)

    if rule_name == "iterate":
        if len(kids) != 2:
            return False
        a, b = kids
        return (a.statement.subject == st.subject
                and b.statement.subject == st.subject
                and _same_atoms(a.statement.pre, st.pre)
                and _same_atoms(b.statement.pre, a.statement.post)
                and _same_atoms(st.post, b.statement.post)
                and _check_node(lang, a, idx, ineffectual)
                and _check_node(lang, b, idx, ineffectual))

    if rule_name == "inductive":
        if kids or st.subject.kind != "grammar-rule":
            return False
        g = next((g for g in lang.grammar if g.cat_name == st.subject.ref), None)
        atom = _single_new_atom(st)
        if g is None or not isinstance(atom, Ctx):
            return False
        outcome = try_inductive(idx, g, atom.constructor)
        return isinstance(outcome, Derived) and outcome.atom == atom

    if rule_name in BASE_RULE_ORDER:
        if kids or st.subject.kind != "inference-rule":
            return False
        rule = next((r for r in lang.inf_system if r.name == st.subject.ref), None)
        atom = _single_new_atom(st)
        if rule is None or atom is None:
            return False
        if rule_name == "ctx-compliant":
            outcome = try_ctx_compliant(st.pre, rule, idx)
        elif rule_name == "error-handler":
            outcome = try_error_handler(st.pre, rule, idx)
        elif rule_name == "effectful":
            outcome = try_effectful(rule)
        elif rule_name == "effectual-args":
            outcome = try_effectual_args(st.pre, rule, idx, ineffectual)
        elif rule_name == "contravariant":
            outcome = try_contravariant(rule)
        else:
            if not isinstance(atom, ContraResp):
                return False
            outcome = try_contra_respecting(st.pre, rule, atom.constructor)
        return isinstance(outcome, Derived) and outcome.atom == atom

    return False


# ------------------------------------------------------------------ JSON

def subject_to_json(subject: Subject) -> dict:
    return {"kind": subject.kind, "ref": subject.ref}


def node_to_json(node: ProofNode) -> dict:
    return {
        "rule": node.rule,
        "pre": assertion_to_json(node.statement.pre),
        "subject": subject_to_json(node.statement.subject),
        "post": assertion_to_json(node.statement.post),
        "side_conditions": list(node.side_conditions),
        "children": [node_to_json(c) for c in node.children],
    }


def node_from_json(data: dict) -> ProofNode:
    statement = Statement(assertion_from_json(data["pre"]),
                          Subject(data["subject"]["kind"], data["subject"]["ref"]),
                          assertion_from_json(data["post"]))
    return ProofNode(data["rule"], statement,
                     tuple(data.get("side_conditions", ())),
                     tuple(node_from_json(c) for c in data.get("children", ())))


def failure_to_json(report: FailureReport) -> dict:
    return {
        "missing": [dict(atom_to_json(a), negated=neg)
                    for neg, a in report.missing],
        "nearest_misses": [{"at": at, "reason": reason}
                           for at, reason in report.nearest_misses],
    }


def tree_to_json_text(node: ProofNode) -> str:
    return json.dumps(node_to_json(node), sort_keys=True, indent=2)


# ------------------------------------------------------------------ text

def render_tree(node: ProofNode) -> str:
    lines = []
    _render_node(node, 0, lines)
    return "\n".join(lines) + "\n"


def _subject_text(subject: Subject) -> str:
    if subject.kind == "grammar-rule":
        return f"grammar rule {subject.ref}"
    if subject.kind == "inference-rule":
        return f"[{subject.ref}]"
    return subject.kind


def _render_node(node: ProofNode, depth: int, lines):
    st = node.statement
    if node.rule == "consequence":
        note = f" ⊨ {render_assertion(st.post)}"
    elif node.children:
        note = ""
    else:
        added = atoms_of(st.post) - atoms_of(st.pre)
        rendered = ", ".join(
            ("~" if neg else "") + render_atom(a)
            for neg, a in sorted(added, key=lambda sa: (atom_key(sa[1]), sa[0])))
        note = f" + {rendered}" if rendered else ""
    lines.append("  " * depth + f"({node.rule}) {_subject_text(st.subject)}{note}")
    for child in node.children:
        _render_node(child, depth + 1, lines)
