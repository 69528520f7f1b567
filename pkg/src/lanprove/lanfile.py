"""Reader and writer for the ``.lan`` textual format.

Layout of a document:

* grammar rules ``CatName MV ::= prod | prod | ...``
* a ``%ineffectual MV ...`` directive (optional)
* inference rules: ``[NAME]`` on its own line, then
  ``conclusion <== prem1 /\\ prem2 ... .`` (or ``conclusion.`` for axioms)

Surface formulas: ``Gamma |- t : T`` (typing, with ``Env, x : T``
extension chains), ``T1 <: T2`` (subtyping), ``c1 --> c2`` with configs
``t , s1 , ... , sm`` (reduction), and ``(pn t1 ... tn)`` or bare
``pn t1 ... tn`` for user predicates.  ``//`` comments run to end of
line; ``\\`` continues a line.

Two constructs are whitespace-sensitive: ``(x)t`` is a binder only when
the body starts immediately after the closing paren, and ``t[t'/x]`` is
a substitution only when the bracket touches the term it follows.  With
space in between, ``(x)`` is a nullary constructor and ``[`` starts a
new statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .grammar import CategoryIndex, resolves_to
from .syntax import (
    PRED_STEP,
    PRED_SUBTYPE,
    PRED_TYPING,
    Binder,
    ConApp,
    Config,
    Formula,
    GrammarRule,
    Hole,
    InferenceRule,
    LanguageDef,
    MetaVarOcc,
    StrLit,
    Subst,
    Term,
    ValidationReport,
    validate_language,
)

#: Constructor used to encode typing-environment extension ``Env, x : T``.
ENV_EXTEND = "envext"

DIRECTIVE_INEFFECTUAL = "ineffectual"


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ValidationError(Exception):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(str(f) for f in report))
        self.report = report


# ------------------------------------------------------------- tokenizer

@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int
    start: int
    end: int


_TOKEN_SPEC = [
    ("COMMENT", r"//[^\n]*"),
    ("CONT", r"\\\r?\n"),
    ("NEWLINE", r"\r?\n"),
    ("WS", r"[ \t]+"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("DIRECTIVE", r"%[A-Za-z_][A-Za-z0-9_-]*"),
    ("DEFINE", r"::="),
    ("IMPLIES", r"<=="),
    ("ARROW", r"-->"),
    ("CONJ", r"/\\"),
    ("TURNSTILE", r"\|-"),
    ("SUBTYPE", r"<:"),
    ("HOLE", r"\[\]"),
    ("LBRACK", r"\["),
    ("RBRACK", r"\]"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("LBRACE", r"\{"),
    ("RBRACE", r"\}"),
    ("PIPE", r"\|"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("COLON", r":"),
    ("SLASH", r"/"),
    ("TILDE", r"~"),
    ("IDENT", r"[A-Za-z_](?:[A-Za-z0-9_']|-(?=[A-Za-z0-9_]))*"),
    ("NUMBER", r"[0-9]+"),
]

_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC))

_TERM_START = frozenset(["IDENT", "LPAREN", "STRING", "HOLE"])


def tokenize(source: str):
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "NEWLINE":
            tokens.append(Token("NEWLINE", text, line, col, pos, m.end()))
            line += 1
            line_start = m.end()
        elif kind == "CONT":
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, text, line, col, pos, m.end()))
        pos = m.end()
    return tokens


def _unquote(text: str) -> str:
    body = text[1:-1]
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(body[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ---------------------------------------------

    def _err(self, message: str, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            return ParseError(message, last.line if last else 1,
                              last.col if last else 1)
        return ParseError(message, tok.line, tok.col)

    def peek(self, offset=0, skip_newlines=True, bound=None):
        i = self.pos
        limit = bound if bound is not None else len(self.tokens)
        seen = 0
        while i < limit:
            tok = self.tokens[i]
            if skip_newlines and tok.kind == "NEWLINE":
                i += 1
                continue
            if seen == offset:
                return tok
            seen += 1
            i += 1
        return None

    def advance(self, skip_newlines=True, bound=None):
        limit = bound if bound is not None else len(self.tokens)
        while self.pos < limit:
            tok = self.tokens[self.pos]
            self.pos += 1
            if skip_newlines and tok.kind == "NEWLINE":
                continue
            return tok
        raise self._err("unexpected end of input")

    def expect(self, kind, bound=None):
        tok = self.peek(bound=bound)
        if tok is None or tok.kind != kind:
            found = tok.kind if tok else "end of input"
            raise self._err(f"expected {kind}, found {found}", tok)
        return self.advance(bound=bound)

    def at(self, kind, bound=None):
        tok = self.peek(bound=bound)
        return tok is not None and tok.kind == kind

    # -- document -----------------------------------------------------

    def parse_document(self):
        grammar, rules, ineffectual = [], [], []
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "DIRECTIVE":
                ineffectual.extend(self._parse_directive())
            elif tok.kind == "LBRACK":
                rules.append(self._parse_inference_rule())
            elif tok.kind == "IDENT":
                grammar.append(self._parse_grammar_rule())
            else:
                raise self._err(
                    f"expected a grammar rule, [RULE-NAME], or directive; "
                    f"found {tok.value!r}")
        if not grammar:
            raise self._err("document has no grammar rules")
        return grammar, rules, ineffectual

    def _parse_directive(self):
        tok = self.expect("DIRECTIVE")
        name = tok.value[1:]
        if name != DIRECTIVE_INEFFECTUAL:
            raise self._err(f"unknown directive %{name}", tok)
        names = []
        # the directive is line-oriented: idents up to the next newline
        while True:
            nxt = self.peek(skip_newlines=False)
            if nxt is None or nxt.kind != "IDENT":
                break
            names.append(self.advance().value)
        if not names:
            raise self._err("%ineffectual needs at least one metavariable", tok)
        return names

    def _parse_grammar_rule(self):
        cat = self.expect("IDENT").value
        mv_tok = self.peek()
        if mv_tok is None or mv_tok.kind != "IDENT":
            raise self._err("expected a metavariable after the category name")
        mv = self.advance().value
        self.expect("DEFINE")
        productions = [self.parse_term()]
        while self.at("PIPE"):
            self.advance()
            productions.append(self.parse_term())
        return GrammarRule(cat, mv, tuple(productions))

    def _parse_inference_rule(self):
        self.expect("LBRACK")
        name = self.expect("IDENT").value
        self.expect("RBRACK")
        conclusion = self.parse_formula()
        premises = []
        if self.at("IMPLIES"):
            self.advance()
            premises.append(self.parse_formula())
            while self.at("CONJ"):
                self.advance()
                premises.append(self.parse_formula())
        self.expect("DOT")
        return InferenceRule(name, tuple(premises), conclusion)

    # -- formulas ------------------------------------------------------

    def _formula_bound(self):
        """Index of the token ending the current formula (DOT, CONJ or
        IMPLIES at bracket depth zero)."""
        depth = 0
        i = self.pos
        while i < len(self.tokens):
            k = self.tokens[i].kind
            if k in ("LPAREN", "LBRACK"):
                depth += 1
            elif k in ("RPAREN", "RBRACK"):
                depth -= 1
                if depth < 0:
                    raise self._err("unbalanced bracket", self.tokens[i])
            elif depth == 0 and k in ("DOT", "CONJ", "IMPLIES"):
                return i
            i += 1
        raise self._err("inference rule not terminated with '.'")

    def _find_top_level(self, kind, bound):
        depth = 0
        for i in range(self.pos, bound):
            k = self.tokens[i].kind
            if k in ("LPAREN", "LBRACK"):
                depth += 1
            elif k in ("RPAREN", "RBRACK"):
                depth -= 1
            elif depth == 0 and k == kind:
                return i
        return None

    def parse_formula(self) -> Formula:
        bound = self._formula_bound()
        turnstile = self._find_top_level("TURNSTILE", bound)
        if turnstile is not None:
            env = self._parse_environment(turnstile)
            self.expect("TURNSTILE", bound=bound)
            subject = self.parse_term(bound=bound)
            self.expect("COLON", bound=bound)
            ty = self.parse_term(bound=bound)
            self._expect_spent(bound)
            return Formula(PRED_TYPING, (env, subject, ty))
        arrow = self._find_top_level("ARROW", bound)
        if arrow is not None:
            source = self._parse_config(arrow)
            self.expect("ARROW", bound=bound)
            target = self._parse_config(bound)
            self._expect_spent(bound)
            return Formula(PRED_STEP, (source, target))
        subtype = self._find_top_level("SUBTYPE", bound)
        if subtype is not None:
            left = self.parse_term(bound=subtype)
            self.expect("SUBTYPE", bound=bound)
            right = self.parse_term(bound=bound)
            self._expect_spent(bound)
            return Formula(PRED_SUBTYPE, (left, right))
        return self._parse_predicate(bound)

    def _expect_spent(self, bound):
        tok = self.peek(bound=bound)
        if tok is not None:
            raise self._err(f"unexpected {tok.value!r} in formula", tok)

    def _parse_environment(self, bound) -> Term:
        env = self.parse_term(bound=bound)
        while self.at("COMMA", bound=bound):
            self.advance(bound=bound)
            var = self.parse_term(bound=bound)
            self.expect("COLON", bound=bound)
            ty = self.parse_term(bound=bound)
            env = ConApp(ENV_EXTEND, (env, var, ty))
        return env

    def _parse_config(self, bound) -> Config:
        subject = self.parse_term(bound=bound)
        state = []
        while self.at("COMMA", bound=bound):
            self.advance(bound=bound)
            state.append(self.parse_term(bound=bound))
        return Config(subject, tuple(state))

    def _parse_predicate(self, bound) -> Formula:
        tok = self.peek(bound=bound)
        if tok is None:
            raise self._err("empty formula")
        if tok.kind == "LPAREN":
            self.advance(bound=bound)
            name = self.expect("IDENT", bound=bound).value
            args = []
            while not self.at("RPAREN", bound=bound):
                args.append(self.parse_term(bound=bound))
            self.advance(bound=bound)
            self._expect_spent(bound)
        elif tok.kind == "IDENT":
            name = self.advance(bound=bound).value
            args = []
            while self.peek(bound=bound) is not None:
                args.append(self.parse_term(bound=bound))
        else:
            raise self._err(f"cannot parse formula starting with {tok.value!r}", tok)
        if not args:
            raise self._err(f"predicate {name} needs at least one argument", tok)
        return Formula(name, tuple(args))

    # -- terms ---------------------------------------------------------

    def parse_term(self, bound=None) -> Term:
        term = self._parse_primary(bound)
        while True:
            tok = self.peek(bound=bound)
            if tok is None or tok.kind != "LBRACK":
                break
            prev = self.tokens[self._last_consumed_index()]
            if tok.start != prev.end:
                break
            self.advance(bound=bound)
            replacement = self.parse_term(bound=bound)
            self.expect("SLASH", bound=bound)
            var = self.expect("IDENT", bound=bound).value
            self.expect("RBRACK", bound=bound)
            term = Subst(term, replacement, var)
        return term

    def _last_consumed_index(self):
        i = self.pos - 1
        while i >= 0 and self.tokens[i].kind == "NEWLINE":
            i -= 1
        return i

    def _parse_primary(self, bound) -> Term:
        tok = self.peek(bound=bound)
        if tok is None:
            raise self._err("expected a term")
        if tok.kind == "IDENT":
            self.advance(bound=bound)
            # provisional: rewritten to a constructor if it never resolves
            return MetaVarOcc(tok.value)
        if tok.kind == "STRING":
            self.advance(bound=bound)
            return StrLit(_unquote(tok.value))
        if tok.kind == "HOLE":
            self.advance(bound=bound)
            return Hole()
        if tok.kind == "LPAREN":
            return self._parse_parenthesized(bound)
        raise self._err(f"cannot parse term starting with {tok.value!r}", tok)

    def _parse_parenthesized(self, bound) -> Term:
        self.advance(bound=bound)  # (
        tok = self.peek(bound=bound)
        if tok is None:
            raise self._err("unterminated '('")
        if tok.kind == "IDENT":
            after = self.peek(offset=1, bound=bound)
            if after is not None and after.kind == "RPAREN":
                body_tok = self.peek(offset=2, bound=bound)
                if (body_tok is not None and body_tok.kind in _TERM_START
                        and body_tok.start == after.end):
                    # (x)t binder: the body hugs the closing paren
                    var = self.advance(bound=bound).value
                    self.advance(bound=bound)  # )
                    body = self.parse_term(bound=bound)
                    return Binder(var, body)
            head = self.advance(bound=bound).value
            args = []
            while not self.at("RPAREN", bound=bound):
                args.append(self.parse_term(bound=bound))
            self.advance(bound=bound)
            return ConApp(head, tuple(args))
        if tok.kind in _TERM_START:
            inner = self.parse_term(bound=bound)
            self.expect("RPAREN", bound=bound)
            return inner
        raise self._err(f"cannot parse term starting with {tok.value!r}", tok)


# ----------------------------------------------- metavariable resолution

def _resolve_terms(term: Term, declared) -> Term:
    if isinstance(term, MetaVarOcc):
        name = term.name
        while True:
            if name in declared:
                return term
            if name and name[-1] in "0123456789'":
                name = name[:-1]
            else:
                return ConApp(term.name, ())
    if isinstance(term, ConApp):
        return ConApp(term.constructor,
                      tuple(_resolve_terms(a, declared) for a in term.args))
    if isinstance(term, Binder):
        return Binder(term.bound_var, _resolve_terms(term.body, declared))
    if isinstance(term, Subst):
        return Subst(_resolve_terms(term.body, declared),
                     _resolve_terms(term.replacement, declared),
                     term.var)
    return term


def _resolve_formula(f: Formula, declared) -> Formula:
    args = []
    for arg in f.args:
        if isinstance(arg, Config):
            args.append(Config(_resolve_terms(arg.subject, declared),
                               tuple(_resolve_terms(s, declared) for s in arg.state)))
        else:
            args.append(_resolve_terms(arg, declared))
    return Formula(f.pred_name, tuple(args))


def parse_document(source: str) -> LanguageDef:
    """Parse a ``.lan`` document without validating it."""
    grammar, rules, ineffectual = _Parser(tokenize(source)).parse_document()
    declared = {g.metavar for g in grammar}
    grammar = tuple(
        GrammarRule(g.cat_name, g.metavar,
                    tuple(_resolve_terms(p, declared) for p in g.productions))
        for g in grammar)
    rules = tuple(
        InferenceRule(r.name,
                      tuple(_resolve_formula(p, declared) for p in r.premises),
                      _resolve_formula(r.conclusion, declared))
        for r in rules)
    return LanguageDef(grammar, rules, frozenset(ineffectual))


def parse_language(source: str) -> LanguageDef:
    """Parse and validate; raises ParseError or ValidationError."""
    lang = parse_document(source)
    report = validate_language(lang)
    if not report.ok:
        raise ValidationError(report)
    return lang


# -------------------------------------------------------------- renderer

def render_term(term: Term, idx: CategoryIndex = None) -> str:
    if isinstance(term, MetaVarOcc):
        return term.name
    if isinstance(term, ConApp):
        if not term.args:
            # a bare identifier that would resolve to a metavariable must
            # stay parenthesized to survive a reparse
            if idx is not None and resolves_to(idx, term.constructor) is not None:
                return f"({term.constructor})"
            return term.constructor
        args = " ".join(render_term(a, idx) for a in term.args)
        return f"({term.constructor} {args})"
    if isinstance(term, Binder):
        return f"({term.bound_var}){render_term(term.body, idx)}"
    if isinstance(term, Subst):
        body = render_term(term.body, idx)
        if isinstance(term.body, Binder):
            body = f"({body})"
        return f"{body}[{render_term(term.replacement, idx)}/{term.var}]"
    if isinstance(term, Hole):
        return "[]"
    if isinstance(term, StrLit):
        return _quote(term.value)
    raise TypeError(f"not a term: {term!r}")


def _render_environment(env: Term, idx) -> str:
    if isinstance(env, ConApp) and env.constructor == ENV_EXTEND and len(env.args) == 3:
        base, var, ty = env.args
        return (f"{_render_environment(base, idx)}, "
                f"{render_term(var, idx)} : {render_term(ty, idx)}")
    return render_term(env, idx)


def _render_config(cfg: Config, idx) -> str:
    parts = [render_term(cfg.subject, idx)]
    parts.extend(render_term(s, idx) for s in cfg.state)
    return " , ".join(parts)


def render_formula(f: Formula, idx: CategoryIndex = None) -> str:
    if f.pred_name == PRED_TYPING and len(f.args) == 3:
        env, subject, ty = f.args
        return (f"{_render_environment(env, idx)} |- "
                f"{render_term(subject, idx)} : {render_term(ty, idx)}")
    if f.pred_name == PRED_SUBTYPE and len(f.args) == 2:
        left, right = f.args
        return f"{render_term(left, idx)} <: {render_term(right, idx)}"
    if f.pred_name == PRED_STEP and len(f.args) == 2:
        src, tgt = f.args
        return f"{_render_config(src, idx)} --> {_render_config(tgt, idx)}"
    args = " ".join(render_term(a, idx) for a in f.args)
    return f"({f.pred_name} {args})"


def render_language(lang: LanguageDef) -> str:
    """Print a definition so that reparsing yields an equal AST."""
    idx = CategoryIndex(lang)
    lines = []
    for g in lang.grammar:
        prods = " | ".join(render_term(p, idx) for p in g.productions)
        lines.append(f"{g.cat_name} {g.metavar} ::= {prods}")
    if lang.ineffectual:
        lines.append("")
        lines.append("%ineffectual " + " ".join(sorted(lang.ineffectual)))
    for r in lang.inf_system:
        lines.append("")
        lines.append(f"[{r.name}]")
        conclusion = render_formula(r.conclusion, idx)
        if r.premises:
            premises = " /\\ ".join(render_formula(p, idx) for p in r.premises)
            lines.append(f"{conclusion} <== {premises}.")
        else:
            lines.append(f"{conclusion}.")
    return "\n".join(lines) + "\n"
