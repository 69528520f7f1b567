"""The assertion language: seven atom kinds closed under conjunction,
negation, and true, with a syntactic entailment used for consequence
steps (strengthening/weakening is subset inclusion over signed atoms)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Tuple, Union


# ----------------------------------------------------------------- atoms

@dataclass(frozen=True)
class Ctx:
    """ctx(X, c, {n1, ..., nk}): the c-productions of category X are
    inductive at those argument positions."""

    metavar: str
    constructor: str
    positions: frozenset

    def __post_init__(self):
        object.__setattr__(self, "positions", frozenset(self.positions))


@dataclass(frozen=True)
class CtxCompliant:
    """ctx-compliant(rn): evaluation contexts cover every argument that
    rule rn needs to be a value or an error."""

    rule_name: str


@dataclass(frozen=True)
class ErrorHandler:
    """error-handler(op, n): op handles an error in argument n and no
    error context steals it there."""

    constructor: str
    position: int


@dataclass(frozen=True)
class Effectful:
    """effectful(i): some reduction modifies state component i."""

    state_pos: int


@dataclass(frozen=True)
class NoDupliEf:
    """no-dupli-ef(rn): rule rn does not duplicate effect-capable
    arguments."""

    rule_name: str


@dataclass(frozen=True)
class Contravariant:
    constructor: str
    positions: frozenset

    def __post_init__(self):
        object.__setattr__(self, "positions", frozenset(self.positions))


@dataclass(frozen=True)
class ContraResp:
    rule_name: str
    constructor: str


Atom = Union[Ctx, CtxCompliant, ErrorHandler, Effectful, NoDupliEf,
             Contravariant, ContraResp]


# ------------------------------------------------------------ assertions

@dataclass(frozen=True)
class TrueA:
    pass


@dataclass(frozen=True)
class AtomA:
    atom: Atom


@dataclass(frozen=True)
class Not:
    inner: "Assertion"


@dataclass(frozen=True)
class And:
    left: "Assertion"
    right: "Assertion"


Assertion = Union[TrueA, AtomA, Not, And]

TRUE = TrueA()


class NotFlat(Exception):
    pass


SignedAtom = Tuple[bool, Atom]  # (negated?, atom)


def atoms_of(assertion: Assertion) -> FrozenSet[SignedAtom]:
    """Signed-atom set of a flat assertion (conjunctions of atoms,
    negated atoms, and true)."""
    acc = set()
    _collect(assertion, acc)
    return frozenset(acc)


def _collect(assertion: Assertion, acc):
    if isinstance(assertion, TrueA):
        return
    if isinstance(assertion, AtomA):
        acc.add((False, assertion.atom))
        return
    if isinstance(assertion, Not):
        if not isinstance(assertion.inner, AtomA):
            raise NotFlat(f"negation wraps a non-atom: {assertion.inner!r}")
        acc.add((True, assertion.inner.atom))
        return
    if isinstance(assertion, And):
        _collect(assertion.left, acc)
        _collect(assertion.right, acc)
        return
    raise NotFlat(f"not an assertion: {assertion!r}")


def entails(p: Assertion, q: Assertion) -> bool:
    """p entails q iff every signed atom of q appears in p."""
    return atoms_of(q) <= atoms_of(p)


def conjoin(p: Assertion, atom: Atom) -> Assertion:
    """Flat assertion whose atom set is atoms_of(p) plus the atom;
    idempotent when the atom is already present."""
    if (False, atom) in atoms_of(p):
        return p
    if isinstance(p, TrueA):
        return AtomA(atom)
    return And(p, AtomA(atom))


def from_signed_atoms(signed) -> Assertion:
    """Flat assertion with exactly the given signed atoms, in sorted
    order (canonical form)."""
    ordered = sorted(signed, key=lambda sa: (atom_key(sa[1]), sa[0]))
    result: Assertion = TRUE
    for negated, atom in ordered:
        literal: Assertion = Not(AtomA(atom)) if negated else AtomA(atom)
        result = literal if isinstance(result, TrueA) else And(result, literal)
    return result


# ---------------------------------------------------- ordering & render

_KIND_FIELDS = {
    Ctx: ("ctx", lambda a: (a.metavar, a.constructor, tuple(sorted(a.positions)))),
    CtxCompliant: ("ctx-compliant", lambda a: (a.rule_name,)),
    ErrorHandler: ("error-handler", lambda a: (a.constructor, a.position)),
    Effectful: ("effectful", lambda a: (a.state_pos,)),
    NoDupliEf: ("no-dupli-ef", lambda a: (a.rule_name,)),
    Contravariant: ("contravariant", lambda a: (a.constructor, tuple(sorted(a.positions)))),
    ContraResp: ("contra-resp", lambda a: (a.rule_name, a.constructor)),
}


def atom_head(atom: Atom) -> str:
    return _KIND_FIELDS[type(atom)][0]


def atom_key(atom: Atom):
    # within one kind the field tuples have uniform shapes, so native
    # comparison keeps numeric fields in numeric order
    head, fields = _KIND_FIELDS[type(atom)]
    return (head, fields(atom))


def _render_positions(positions) -> str:
    return "{" + ",".join(str(n) for n in sorted(positions)) + "}"


def render_atom(atom: Atom) -> str:
    if isinstance(atom, Ctx):
        return f"ctx({atom.metavar}, {atom.constructor}, {_render_positions(atom.positions)})"
    if isinstance(atom, CtxCompliant):
        return f"ctx-compliant([{atom.rule_name}])"
    if isinstance(atom, ErrorHandler):
        return f"error-handler({atom.constructor}, {atom.position})"
    if isinstance(atom, Effectful):
        return f"effectful({atom.state_pos})"
    if isinstance(atom, NoDupliEf):
        return f"no-dupli-ef([{atom.rule_name}])"
    if isinstance(atom, Contravariant):
        return f"contravariant({atom.constructor}, {_render_positions(atom.positions)})"
    if isinstance(atom, ContraResp):
        return f"contra-resp([{atom.rule_name}], {atom.constructor})"
    raise TypeError(f"not an atom: {atom!r}")


def render_assertion(assertion: Assertion) -> str:
    """Canonical text of a flat assertion: atoms sorted and joined."""
    signed = atoms_of(assertion)
    if not signed:
        return "true"
    ordered = sorted(signed, key=lambda sa: (atom_key(sa[1]), sa[0]))
    return " /\\ ".join(("~" if neg else "") + render_atom(a) for neg, a in ordered)


# ------------------------------------------------------------------ JSON

def atom_to_json(atom: Atom) -> dict:
    if isinstance(atom, Ctx):
        return {"kind": "ctx", "metavar": atom.metavar,
                "constructor": atom.constructor,
                "positions": sorted(atom.positions)}
    if isinstance(atom, CtxCompliant):
        return {"kind": "ctx-compliant", "rule_name": atom.rule_name}
    if isinstance(atom, ErrorHandler):
        return {"kind": "error-handler", "constructor": atom.constructor,
                "position": atom.position}
    if isinstance(atom, Effectful):
        return {"kind": "effectful", "state_pos": atom.state_pos}
    if isinstance(atom, NoDupliEf):
        return {"kind": "no-dupli-ef", "rule_name": atom.rule_name}
    if isinstance(atom, Contravariant):
        return {"kind": "contravariant", "constructor": atom.constructor,
                "positions": sorted(atom.positions)}
    if isinstance(atom, ContraResp):
        return {"kind": "contra-resp", "rule_name": atom.rule_name,
                "constructor": atom.constructor}
    raise TypeError(f"not an atom: {atom!r}")


def atom_from_json(data: dict) -> Atom:
    kind = data["kind"]
    if kind == "ctx":
        return Ctx(data["metavar"], data["constructor"], frozenset(data["positions"]))
    if kind == "ctx-compliant":
        return CtxCompliant(data["rule_name"])
    if kind == "error-handler":
        return ErrorHandler(data["constructor"], data["position"])
    if kind == "effectful":
        return Effectful(data["state_pos"])
    if kind == "no-dupli-ef":
        return NoDupliEf(data["rule_name"])
    if kind == "contravariant":
        return Contravariant(data["constructor"], frozenset(data["positions"]))
    if kind == "contra-resp":
        return ContraResp(data["rule_name"], data["constructor"])
    raise ValueError(f"unknown atom kind {kind!r}")


def assertion_to_json(assertion: Assertion) -> list:
    signed = sorted(atoms_of(assertion), key=lambda sa: (atom_key(sa[1]), sa[0]))
    return [dict(atom_to_json(a), negated=neg) for neg, a in signed]


def assertion_from_json(data: list) -> Assertion:
    signed = []
    for entry in data:
        entry = dict(entry)
        negated = entry.pop("negated", False)
        signed.append((negated, atom_from_json(entry)))
    return from_signed_atoms(signed)


# ---------------------------------------------------------------- parser

class AssertionParseError(Exception):
    def __init__(self, message: str, pos: int = 0):
        super().__init__(f"col {pos + 1}: {message}")
        self.message = message
        self.pos = pos


_ATOKEN_RE = re.compile(
    r"(?P<WS>\s+)"
    r"|(?P<CONJ>/\\)"
    r"|(?P<IDENT>[A-Za-z_](?:[A-Za-z0-9_']|-(?=[A-Za-z0-9_]))*)"
    r"|(?P<NUMBER>[0-9]+)"
    r"|(?P<PUNCT>[(){},\[\]~])"
)


def _assertion_tokens(text: str):
    tokens, pos = [], 0
    while pos < len(text):
        m = _ATOKEN_RE.match(text, pos)
        if m is None:
            raise AssertionParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "WS":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _AssertionParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _assertion_tokens(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self):
        tok = self.peek()
        if tok is None:
            raise AssertionParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect(self, value):
        tok = self.advance()
        if tok[1] != value:
            raise AssertionParseError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Assertion:
        result = self.parse_conjunction()
        tok = self.peek()
        if tok is not None:
            raise AssertionParseError(f"unexpected {tok[1]!r}", tok[2])
        return result

    def parse_conjunction(self) -> Assertion:
        left = self.parse_unary()
        while self.peek() is not None and self.peek()[0] == "CONJ":
            self.advance()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Assertion:
        tok = self.peek()
        if tok is None:
            raise AssertionParseError("expected an assertion", len(self.text))
        if tok[1] == "~":
            self.advance()
            return Not(self.parse_unary())
        if tok[1] == "(":
            self.advance()
            inner = self.parse_conjunction()
            self.expect(")")
            return inner
        if tok[0] == "IDENT" and tok[1] == "true":
            self.advance()
            return TRUE
        if tok[0] == "IDENT":
            return AtomA(self.parse_atom())
        raise AssertionParseError(f"unexpected {tok[1]!r}", tok[2])

    def parse_atom(self) -> Atom:
        head_tok = self.advance()
        head = head_tok[1]
        self.expect("(")
        if head == "ctx":
            mv = self._ident()
            self.expect(",")
            con = self._ident()
            self.expect(",")
            positions = self._position_set()
            self.expect(")")
            return Ctx(mv, con, positions)
        if head == "ctx-compliant":
            rn = self._rule_name()
            self.expect(")")
            return CtxCompliant(rn)
        if head == "error-handler":
            con = self._ident()
            self.expect(",")
            n = self._number()
            self.expect(")")
            return ErrorHandler(con, n)
        if head == "effectful":
            n = self._number()
            self.expect(")")
            return Effectful(n)
        if head == "no-dupli-ef":
            rn = self._rule_name()
            self.expect(")")
            return NoDupliEf(rn)
        if head == "contravariant":
            con = self._ident()
            self.expect(",")
            positions = self._position_set()
            self.expect(")")
            return Contravariant(con, positions)
        if head == "contra-resp":
            rn = self._rule_name()
            self.expect(",")
            con = self._ident()
            self.expect(")")
            return ContraResp(rn, con)
        raise AssertionParseError(f"unknown assertion {head!r}", head_tok[2])

    def _ident(self) -> str:
        tok = self.advance()
        if tok[0] != "IDENT":
            raise AssertionParseError(f"expected a name, found {tok[1]!r}", tok[2])
        return tok[1]

    def _number(self) -> int:
        tok = self.advance()
        if tok[0] != "NUMBER":
            raise AssertionParseError(f"expected a number, found {tok[1]!r}", tok[2])
        return int(tok[1])

    def _rule_name(self) -> str:
        self.expect("[")
        name = self._ident()
        self.expect("]")
        return name

    def _position_set(self) -> frozenset:
        self.expect("{")
        positions = set()
        if self.peek() is not None and self.peek()[1] != "}":
            positions.add(self._number())
            while self.peek() is not None and self.peek()[1] == ",":
                self.advance()
                positions.add(self._number())
        self.expect("}")
        return frozenset(positions)


def parse_assertion(text: str) -> Assertion:
    """Parse assertion text: ``true``, ``~P``, ``P /\\ Q``, and the seven
    atom forms such as ``ctx(E, app, {1,2})`` or ``contra-resp([T-APP], arrow)``."""
    return _AssertionParser(text).parse()
