"""Metavariable resolution, the derivation relation, inductive positions."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lanprove import (
    Binder,
    CategoryIndex,
    ConApp,
    GrammarRule,
    LanguageDef,
    MetaVarOcc,
    UnresolvedMetaVar,
    derivable_from_any,
    derives,
    get_args_positions,
    inductive_positions,
    parse_document,
    resolve_metavar,
)
from lanprove.syntax import NotAConApp

from oracles import bfs_derives, random_grammar, random_query_term


def _idx(lang):
    return CategoryIndex(lang)


def _grammar_rule(lang, cat):
    return next(g for g in lang.grammar if g.cat_name == cat)


# ------------------------------------------------------------- resolution

def test_resolve_strips_digits(faulty):
    idx = _idx(faulty)
    assert resolve_metavar(idx, "e2") == "e"
    assert resolve_metavar(idx, "T1'") == "T"
    assert resolve_metavar(idx, "s1") == "s"
    assert resolve_metavar(idx, "er") == "er"


def test_resolve_rejects_undeclared_spellings(faulty):
    idx = _idx(faulty)
    with pytest.raises(UnresolvedMetaVar):
        resolve_metavar(idx, "Gm")
    with pytest.raises(UnresolvedMetaVar):
        resolve_metavar(idx, "error")


def test_resolve_longest_declared_prefix():
    lang = parse_document("Type T ::= bool\nTagged T1 ::= tag")
    idx = _idx(lang)
    assert resolve_metavar(idx, "T12") == "T1"
    assert resolve_metavar(idx, "T2") == "T"
    assert resolve_metavar(idx, "T1") == "T1"


# --------------------------------------------------------------- derives

def test_value_derives_abstraction(faulty):
    idx = _idx(faulty)
    lam = ConApp("abs", (MetaVarOcc("T"), Binder("x", MetaVarOcc("e1"))))
    assert derives(idx, "v", lam)


def test_error_derives_error_constant(faulty):
    idx = _idx(faulty)
    assert derives(idx, "er", ConApp("error", ()))


def test_value_does_not_derive_expression(faulty):
    idx = _idx(faulty)
    target = MetaVarOcc("e2")
    assert not derives(idx, "v", target)
    assert not bfs_derives(faulty, "v", target)


def test_value_derives_through_inclusion_chain(faulty):
    # v includes f, whose productions include (fnum n)
    idx = _idx(faulty)
    target = ConApp("fnum", (MetaVarOcc("n"),))
    assert derives(idx, "v", target)
    assert bfs_derives(faulty, "v", target)


def test_derives_reflexive_on_categories(corpus):
    for lang in corpus.values():
        idx = _idx(lang)
        for g in lang.grammar:
            assert derives(idx, g.metavar, MetaVarOcc(g.metavar))


def test_derives_suffixed_occurrence(faulty):
    idx = _idx(faulty)
    assert derives(idx, "v", MetaVarOcc("v1'"))
    assert derives(idx, "e", MetaVarOcc("n2"))


def test_expression_does_not_include_value(faulty):
    # e's productions include the metavariables n and f but not v
    idx = _idx(faulty)
    assert not derives(idx, "e", MetaVarOcc("v"))


def test_cyclic_inclusion_terminates():
    lang = parse_document("CatA a ::= b | (f a)\nCatB b ::= a | leaf")
    idx = _idx(lang)
    assert derives(idx, "a", ConApp("leaf", ()))
    assert derives(idx, "b", ConApp("f", (MetaVarOcc("a"),)))
    assert not derives(idx, "a", ConApp("other", ()))


def test_memo_not_poisoned_by_cycle():
    # b's answer must not be cached while a's cyclic query is in flight
    lang = parse_document("CatA a ::= b | leaf\nCatB b ::= a")
    idx = _idx(lang)
    assert derives(idx, "a", ConApp("leaf", ()))
    assert derives(idx, "b", ConApp("leaf", ()))
    idx2 = _idx(lang)
    assert derives(idx2, "b", ConApp("leaf", ()))


def test_derivable_from_any(faulty):
    idx = _idx(faulty)
    assert derivable_from_any(idx, {"v", "er"}, MetaVarOcc("v"))
    assert not derivable_from_any(idx, set(), MetaVarOcc("v"))
    assert not derivable_from_any(idx, {"v", "er"}, MetaVarOcc("e2"))


def test_binder_production_matches_on_body(stlc):
    # (abs T (x)E) derives terms whose binder body is expression-derived,
    # whatever the bound name is
    idx = _idx(stlc)
    target = ConApp("abs", (MetaVarOcc("T1"), Binder("y", MetaVarOcc("E2"))))
    assert derives(idx, "V", target)


# ----------------------------------------------------- argument positions

def test_get_args_positions_examples(faulty, fixed3):
    idx = _idx(faulty)
    arrow = ConApp("arrow", (MetaVarOcc("T"), MetaVarOcc("T")))
    assert get_args_positions(idx, arrow, "T") == {1, 2}
    try_ctx = ConApp("try", (MetaVarOcc("E"), MetaVarOcc("e")))
    assert get_args_positions(idx, try_ctx, "E") == {1}
    div = ConApp("div", (MetaVarOcc("v"), MetaVarOcc("E")))
    assert get_args_positions(idx, div, "E") == {2}


def test_get_args_positions_requires_conapp(faulty):
    with pytest.raises(NotAConApp):
        get_args_positions(_idx(faulty), MetaVarOcc("e"), "e")


def test_inductive_positions_eval_ctx_app(fixed2):
    idx = _idx(fixed2)
    g = _grammar_rule(fixed2, "EvalCtx")
    assert inductive_positions(idx, g, "app") == {1, 2}


def test_inductive_positions_empty_union(fixed3):
    idx = _idx(fixed3)
    g = _grammar_rule(fixed3, "ErrCtx")
    assert inductive_positions(idx, g, "try") == frozenset()


def test_inductive_positions_type_arrow(faulty):
    idx = _idx(faulty)
    g = _grammar_rule(faulty, "Type")
    assert inductive_positions(idx, g, "arrow") == {1, 2}


def test_inductive_positions_value_abs(faulty):
    # abs takes a type and a binder, neither an occurrence of v
    idx = _idx(faulty)
    g = _grammar_rule(faulty, "Value")
    assert inductive_positions(idx, g, "abs") == frozenset()


def test_inductive_positions_bounded_by_arity(corpus):
    for lang in corpus.values():
        idx = _idx(lang)
        for g in lang.grammar:
            for p in g.productions:
                if isinstance(p, ConApp):
                    positions = inductive_positions(idx, g, p.constructor)
                    assert all(1 <= i <= len(p.args) for i in positions)


def test_inductive_positions_production_order_invariant(fixed2):
    idx = _idx(fixed2)
    g = _grammar_rule(fixed2, "EvalCtx")
    rng = random.Random(7)
    for _ in range(10):
        prods = list(g.productions)
        rng.shuffle(prods)
        shuffled = GrammarRule(g.cat_name, g.metavar, tuple(prods))
        lang2 = LanguageDef(
            tuple(shuffled if h is g else h for h in fixed2.grammar),
            fixed2.inf_system, fixed2.ineffectual)
        idx2 = _idx(lang2)
        for c in ("app", "div", "try", "seq"):
            assert (inductive_positions(idx2, shuffled, c)
                    == inductive_positions(idx, g, c))


# --------------------------------------------------------- oracle checks

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 20))
def test_derives_matches_bfs_oracle(seed, queries):
    rng = random.Random(seed)
    lang = random_grammar(rng)
    idx = CategoryIndex(lang)
    cats = [g.metavar for g in lang.grammar]
    for _ in range(queries):
        term = random_query_term(rng, lang)
        mv = rng.choice(cats)
        assert derives(idx, mv, term) == bfs_derives(lang, mv, term), (
            lang, mv, term)


def test_resolve_abbreviation_must_be_declared():
    lang = parse_document(
        "Env Gamma ::= emptyenv\nExpr e ::= x\nType T ::= bool")
    idx = _idx(lang)
    assert resolve_metavar(idx, "Gamma") == "Gamma"
    with pytest.raises(UnresolvedMetaVar):
        resolve_metavar(idx, "Gm")
