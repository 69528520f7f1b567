"""Grammar queries: metavariable resolution, the derivation relation,
and the inductive-position computation for context assertions."""

from __future__ import annotations

from typing import Iterable, Optional, Set

from .syntax import (
    Binder,
    ConApp,
    GrammarRule,
    Hole,
    LanguageDef,
    MetaVarOcc,
    NotAConApp,
    StrLit,
    Subst,
    Term,
)

#: Category-name aliases with reserved meaning.
EVAL_CTX_NAMES = ("EvalCtx", "Context")
ERR_CTX_NAMES = ("ErrCtx", "ErrorCtx")
VALUE_NAMES = ("Value",)
ERROR_NAMES = ("Error",)

_STRIPPABLE = set("0123456789'")


class UnresolvedMetaVar(Exception):
    def __init__(self, name: str):
        super().__init__(f"cannot resolve metavariable occurrence {name!r}")
        self.name = name


class CategoryIndex:
    """Query-ready view of a grammar: rules by metavariable and by
    category name, plus the reserved-category lookups.

    Built once per language definition and shared read-only; the
    derivation memo is an internal cache.
    """

    def __init__(self, lang: LanguageDef):
        self.lang = lang
        self.by_metavar = {}
        self.by_cat_name = {}
        for g in lang.grammar:
            self.by_metavar.setdefault(g.metavar, g)
            self.by_cat_name.setdefault(g.cat_name, g)
        self._derives_memo = {}

    def _reserved(self, names: Iterable[str]) -> Optional[GrammarRule]:
        for n in names:
            if n in self.by_cat_name:
                return self.by_cat_name[n]
        return None

    @property
    def eval_ctx_rule(self) -> Optional[GrammarRule]:
        return self._reserved(EVAL_CTX_NAMES)

    @property
    def err_ctx_rule(self) -> Optional[GrammarRule]:
        return self._reserved(ERR_CTX_NAMES)

    @property
    def value_rule(self) -> Optional[GrammarRule]:
        return self._reserved(VALUE_NAMES)

    @property
    def error_rule(self) -> Optional[GrammarRule]:
        return self._reserved(ERROR_NAMES)


def resolve_metavar(idx: CategoryIndex, occ_name: str) -> str:
    """Strip trailing digits and primes until the residue is a declared
    metavariable.  The longest declared prefix wins."""
    name = occ_name
    while True:
        if name in idx.by_metavar:
            return name
        if name and name[-1] in _STRIPPABLE:
            name = name[:-1]
        else:
            raise UnresolvedMetaVar(occ_name)


def resolves_to(idx: CategoryIndex, occ_name: str) -> Optional[str]:
    try:
        return resolve_metavar(idx, occ_name)
    except UnresolvedMetaVar:
        return None


# ----------------------------------------------------------- derivation

def derives(idx: CategoryIndex, mv: str, t: Term) -> bool:
    """The grammar-derivation relation: metavariable ``mv`` derives the
    term ``t`` through the productions of the grammar.

    A metavariable occurrence derives to its own category and, through
    bare-metavariable productions, to included categories; constructor
    productions match on head and arity with metavariable arguments
    recursing into the relation.  Binder productions match binder terms
    on their bodies.
    """
    return _derives(idx, mv, t, set())


def _derives(idx: CategoryIndex, mv: str, t: Term, in_progress: Set) -> bool:
    key = (mv, t)
    memo = idx._derives_memo
    if key in memo:
        return memo[key]
    if key in in_progress:
        # cyclic inclusion chain; assume false on this path
        return False
    if isinstance(t, MetaVarOcc) and resolves_to(idx, t.name) == mv:
        memo[key] = True
        return True
    rule = idx.by_metavar.get(mv)
    if rule is None:
        return False
    in_progress.add(key)
    try:
        result = any(_matches(idx, p, t, in_progress) for p in rule.productions)
    finally:
        in_progress.discard(key)
    # a found derivation never depends on the cyclic-assumption default,
    # so True is always safe to cache; False only at the outermost call
    if result or not in_progress:
        memo[key] = result
    return result


def _matches(idx: CategoryIndex, prod: Term, t: Term, in_progress: Set) -> bool:
    if isinstance(prod, MetaVarOcc):
        cat = resolves_to(idx, prod.name)
        if cat is None:
            return prod == t
        return _derives(idx, cat, t, in_progress)
    if isinstance(prod, ConApp):
        return (isinstance(t, ConApp)
                and t.constructor == prod.constructor
                and len(t.args) == len(prod.args)
                and all(_matches(idx, p, a, in_progress)
                        for p, a in zip(prod.args, t.args)))
    if isinstance(prod, Hole):
        return isinstance(t, Hole)
    if isinstance(prod, StrLit):
        return prod == t
    if isinstance(prod, Binder):
        return isinstance(t, Binder) and _matches(idx, prod.body, t.body, in_progress)
    if isinstance(prod, Subst):
        return (isinstance(t, Subst)
                and prod.var == t.var
                and _matches(idx, prod.body, t.body, in_progress)
                and _matches(idx, prod.replacement, t.replacement, in_progress))
    return False


def derivable_from_any(idx: CategoryIndex, mvs: Iterable[str], t: Term) -> bool:
    """True iff some metavariable among ``mvs`` derives ``t``."""
    return any(derives(idx, mv, t) for mv in mvs)


# ----------------------------------------------------- argument queries

def get_args_positions(idx: CategoryIndex, t: Term, mv: str) -> frozenset:
    """1-based positions of the arguments of ``t`` that are occurrences
    of the category with metavariable ``mv``."""
    if not isinstance(t, ConApp):
        raise NotAConApp(f"expected a constructor application, got {t!r}")
    positions = set()
    for i, arg in enumerate(t.args, start=1):
        if isinstance(arg, MetaVarOcc) and resolves_to(idx, arg.name) == mv:
            positions.add(i)
    return frozenset(positions)


def inductive_positions(idx: CategoryIndex, g: GrammarRule, c: str) -> frozenset:
    """Union of the inductive argument positions over every production
    of ``g`` whose top constructor is ``c``; empty when none is."""
    acc = set()
    for p in g.productions:
        if isinstance(p, ConApp) and p.constructor == c:
            acc |= get_args_positions(idx, p, g.metavar)
    return frozenset(acc)
