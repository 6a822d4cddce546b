"""Formula language: atoms, negation, conjunction, disjunction, group knowledge.

Concrete syntax (whitespace insensitive)::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary
             | "K" "{" idlist "}" unary
             | "C" "{" idlist "}" unary
             | atom
             | "(" formula ")"
    idlist  := id ("," id)*

Identifiers match [A-Za-z][A-Za-z0-9_]* and are resolved against a model's
symbol table.  Negation binds tighter than conjunction, conjunction tighter
than disjunction; the modalities take the smallest formula to their right,
so ``K{i} !K{j} p`` reads as i knowing the negation.  Individual knowledge
is group knowledge of a singleton, and the parser treats K{...} and C{...}
identically; the renderer writes singleton groups with K.

There are no constants for truth and falsity; the language is exactly the
grammar above.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Set, Tuple

from .core import EmptyWordError, InteractionModel, KnowcastError


class FormulaError(KnowcastError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, text: str, pos: int, expected: str):
        self.pos = pos
        self.expected = expected
        super().__init__("syntax error at position %d: expected %s" % (pos, expected))


class UnknownSymbolError(FormulaError):
    def __init__(self, name: str, pos: int, kind: str):
        self.name = name
        self.pos = pos
        super().__init__("unknown %s %r at position %d" % (kind, name, pos))


class EmptyGroupError(FormulaError):
    def __init__(self, pos: int):
        self.pos = pos
        super().__init__("empty group at position %d" % pos)


class NotPropositionalError(FormulaError):
    pass


class ContainsNegationError(FormulaError):
    pass


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    atom: int


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class CK(Formula):
    """The whole group knows, commonly: true at every related state.

    The group is a sorted tuple of player indices; a singleton is ordinary
    individual knowledge.
    """

    group: Tuple[int, ...]
    sub: Formula

    def __post_init__(self):
        canon = tuple(sorted(set(self.group)))
        if not canon:
            raise EmptyGroupError(0)
        object.__setattr__(self, "group", canon)


def K(player: int, sub: Formula) -> CK:
    return CK((player,), sub)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<punct>[!&|(){},]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise FormulaSyntaxError(text, at, "a formula token, not %r" % text[at])
        if m.group("ident"):
            out.append(("ident", m.group("ident"), m.start("ident")))
        else:
            out.append((m.group("punct"), m.group("punct"), m.start("punct")))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, model: InteractionModel, text: str):
        self.model = model
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.take()
        if tok[0] != kind:
            raise FormulaSyntaxError(self.text, tok[2], what)
        return tok

    def parse(self) -> Formula:
        node = self.disj()
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaSyntaxError(self.text, tok[2], "end of input or a connective")
        return node

    def disj(self) -> Formula:
        node = self.conj()
        while self.peek()[0] == "|":
            self.take()
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.peek()[0] == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "(":
            self.take()
            node = self.disj()
            self.expect(")", "')'")
            return node
        if kind == "ident":
            self.take()
            if value in ("K", "C") and self.peek()[0] == "{":
                return CK(self.group(), self.unary())
            if value not in self.model.atom_index:
                raise UnknownSymbolError(value, pos, "atom")
            return Atom(self.model.atom_index[value])
        raise FormulaSyntaxError(self.text, pos, "'!', '(', 'K{', 'C{' or an atom")

    def group(self) -> Tuple[int, ...]:
        open_tok = self.expect("{", "'{'")
        if self.peek()[0] == "}":
            raise EmptyGroupError(open_tok[2])
        ids = [self.player()]
        while self.peek()[0] == ",":
            self.take()
            ids.append(self.player())
        self.expect("}", "'}' or ','")
        return tuple(ids)

    def player(self) -> int:
        kind, value, pos = self.take()
        if kind != "ident":
            raise FormulaSyntaxError(self.text, pos, "a player name")
        if value not in self.model.player_index:
            raise UnknownSymbolError(value, pos, "player")
        return self.model.player_index[value]


def parse(model: InteractionModel, text: str) -> Formula:
    """Parse concrete syntax against the model's symbol table."""
    return _Parser(model, text).parse()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render(model: InteractionModel, phi: Formula) -> str:
    """Canonical text with minimal parentheses; parse(render(f)) == f."""
    return _render(model, phi, 0)


# context levels: 0 disjunction, 1 conjunction, 2 unary operand
def _render(model: InteractionModel, phi: Formula, level: int) -> str:
    if isinstance(phi, Atom):
        return model.atoms[phi.atom]
    if isinstance(phi, Not):
        return "!" + _render(model, phi.sub, 2)
    if isinstance(phi, CK):
        op = "K" if len(phi.group) == 1 else "C"
        names = ",".join(model.players[i] for i in phi.group)
        return "%s{%s} %s" % (op, names, _render(model, phi.sub, 2))
    if isinstance(phi, And):
        # the left slot keeps nested conjunctions unparenthesized (the parse
        # is left associative), the right slot forces them into parens
        body = "%s & %s" % (_render(model, phi.left, 1),
                            _render(model, phi.right, 2))
        return "(" + body + ")" if level >= 2 else body
    if isinstance(phi, Or):
        body = "%s | %s" % (_render(model, phi.left, 0),
                            _render(model, phi.right, 1))
        return "(" + body + ")" if level >= 1 else body
    raise TypeError("not a formula: %r" % (phi,))


# ---------------------------------------------------------------------------
# Structure: facts, fragments, normal form, words
# ---------------------------------------------------------------------------

def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.sub)
    elif isinstance(phi, (And, Or)):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, CK):
        yield from subformulas(phi.sub)


def facts_of(phi: Formula) -> Set[int]:
    """Atoms occurring anywhere in the formula."""
    return {f.atom for f in subformulas(phi) if isinstance(f, Atom)}


@dataclass(frozen=True)
class FragmentFlags:
    """Which sublanguages a formula belongs to.

    positive: free of negation.
    propositional: free of knowledge operators.
    nonnested_positive: positive, and no knowledge operator occurs inside
    another one.
    prop_monotone: positive and propositional (atoms, and, or only).
    """

    positive: bool
    propositional: bool
    nonnested_positive: bool
    prop_monotone: bool


def classify(phi: Formula) -> FragmentFlags:
    positive = not any(isinstance(f, Not) for f in subformulas(phi))
    propositional = not any(isinstance(f, CK) for f in subformulas(phi))
    nested = any(isinstance(f, CK) and not _ck_free(f.sub) for f in subformulas(phi))
    return FragmentFlags(
        positive=positive,
        propositional=propositional,
        nonnested_positive=positive and not nested,
        prop_monotone=positive and propositional,
    )


def _ck_free(phi: Formula) -> bool:
    return not any(isinstance(f, CK) for f in subformulas(phi))


def cnf_clauses(phi: Formula) -> Tuple[Tuple[int, ...], ...]:
    """Clauses of the conjunctive normal form of a negation-free
    propositional formula: a tuple of sorted atom tuples.
    """
    for f in subformulas(phi):
        if isinstance(f, CK):
            raise NotPropositionalError("knowledge operators have no propositional normal form")
        if isinstance(f, Not):
            raise ContainsNegationError("normal form is defined for negation-free input")
    clauses = _cnf(phi)
    seen = []
    for c in clauses:
        if c not in seen:
            seen.append(c)
    return tuple(seen)


def _cnf(phi: Formula) -> Tuple[Tuple[int, ...], ...]:
    if isinstance(phi, Atom):
        return ((phi.atom,),)
    if isinstance(phi, And):
        return _cnf(phi.left) + _cnf(phi.right)
    # Or distributes over the conjunctions on both sides
    left, right = _cnf(phi.left), _cnf(phi.right)
    return tuple(tuple(sorted(set(a) | set(b))) for a in left for b in right)


def cnf(phi: Formula) -> Formula:
    """Equivalent conjunction of disjunctions of atoms."""
    conj = [_join(Or, [Atom(a) for a in clause]) for clause in cnf_clauses(phi)]
    return _join(And, conj)


def _join(op, parts):
    node = parts[0]
    for p in parts[1:]:
        node = op(node, p)
    return node


def expand_word(word: Sequence[int], phi: Formula) -> Formula:
    """Nest individual knowledge along the word: first player outermost."""
    if not len(word):
        raise EmptyWordError("word must name at least one player")
    node = phi
    for player in reversed(tuple(word)):
        node = K(player, node)
    return node
