"""Syntax trees, parser and printer for dependence logic in negation normal form.

Every tree is built from frozen dataclasses, so trees are hashable values and
structural equality is ``==``.  Negation only ever appears inside :class:`Lit`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

__all__ = [
    "Var", "Const", "Func", "Term",
    "Eq", "Rel", "Dep", "Atom",
    "Lit", "And", "Or", "Exists", "Forall", "Formula", "Clause",
    "PrenexDepForm", "ParseError", "ShapeError",
    "parse_formula", "pretty_print", "free_vars", "term_vars", "atom_vars",
    "match_prenex_dep", "conj", "disj", "clause_to_formula", "TOP", "BOTTOM",
]


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple = ()


Term = Union[Var, Const, Func]


# -- atoms -------------------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Dep:
    """``=(t1, ..., tn)``: the last term is functionally determined by the rest."""

    determinants: tuple
    determined: Term


Atom = Union[Eq, Rel, Dep]


# -- formulae ----------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Lit":
        return Lit(self.atom, not self.positive)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Lit, And, Or, Exists, Forall]
Clause = tuple  # tuple[Lit, ...]; the empty clause is falsum

ZERO = Const("0")
TOP = Lit(Eq(ZERO, ZERO))
BOTTOM = Lit(Eq(ZERO, ZERO), False)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class ShapeError(ValueError):
    """The formula is not of the prenex dependence shape."""


# -- helpers -----------------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``0 = 0``."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``!(0 = 0)``."""
    parts = list(parts)
    if not parts:
        return BOTTOM
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def clause_to_formula(clause: Clause) -> Formula:
    return disj(clause)


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Func):
        out = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def atom_terms(a: Atom) -> tuple:
    if isinstance(a, Eq):
        return (a.left, a.right)
    if isinstance(a, Rel):
        return a.args
    return a.determinants + (a.determined,)


def atom_vars(a: Atom) -> set:
    out = set()
    for t in atom_terms(a):
        out |= term_vars(t)
    return out


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Lit):
        return frozenset(atom_vars(f.atom))
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from subformulas(f.body)


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[0-9]+)
  | (?P<punct>[()=,.&|!])
""", re.VERBOSE)

KEYWORDS = {"forall", "exists"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "punct" or kind == "arrow":
                kind = chunk
            elif kind == "ident" and chunk in KEYWORDS:
                kind = chunk
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ------------------------------------------------------------------

def _negate(f: Formula, tok: _Tok) -> Formula:
    if isinstance(f, Lit):
        if isinstance(f.atom, Dep) and not f.positive:
            raise ParseError("cannot negate a negated dependence atom", tok.line, tok.col)
        return f.negate()
    if isinstance(f, And):
        return Or(_negate(f.left, tok), _negate(f.right, tok))
    if isinstance(f, Or):
        return And(_negate(f.left, tok), _negate(f.right, tok))
    raise ParseError("negation of a quantified formula is not allowed", tok.line, tok.col)


def _conjunct_lits(f: Formula) -> list | None:
    if isinstance(f, Lit):
        return [f]
    if isinstance(f, And):
        left, right = _conjunct_lits(f.left), _conjunct_lits(f.right)
        if left is not None and right is not None:
            return left + right
    return None


class _Parser:
    def __init__(self, text: str, constants: Iterable[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = set(constants)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def expect(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            raise self.error(f"expected {kind!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")
        return f

    def formula(self) -> Formula:
        if self.tok.kind in ("forall", "exists"):
            kind = self.tok.kind
            self.i += 1
            names = [self.expect("ident").text]
            while self.tok.kind == "ident":
                names.append(self.expect("ident").text)
            self.expect(".")
            body = self.formula()
            node = Forall if kind == "forall" else Exists
            for name in reversed(names):
                body = node(name, body)
            return body
        return self.or_()

    def or_(self) -> Formula:
        f = self.and_()
        while self.accept("|"):
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unit()
        while self.accept("&"):
            f = And(f, self.unit())
        return f

    def unit(self) -> Formula:
        start = self.tok
        if self.accept("("):
            left = self.formula()
            self.expect(")")
        elif self.accept("!"):
            left = _negate(self.negatable(), start)
        else:
            left = Lit(self.atom())
        if self.tok.kind == "->":
            arrow = self.tok
            self.i += 1
            lits = _conjunct_lits(left)
            if lits is None:
                raise ParseError("left side of '->' must be a conjunction of literals",
                                 arrow.line, arrow.col)
            right = self.unit()
            return disj([_negate(l, arrow) for l in lits] + [right])
        return left

    def negatable(self) -> Formula:
        start = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("!"):
            return _negate(self.negatable(), start)
        return Lit(self.atom())

    def atom(self) -> Atom:
        if self.tok.kind == "=" and self.peek().kind == "(":
            self.i += 2
            terms = [self.term()]
            while self.accept(","):
                terms.append(self.term())
            self.expect(")")
            return Dep(tuple(terms[:-1]), terms[-1])
        if self.tok.kind == "ident" and self.peek().kind == "(" and self.peek(2).kind == ")":
            name = self.tok.text
            self.i += 3
            return Rel(name, ())
        start = self.tok
        t = self.term()
        if self.accept("="):
            return Eq(t, self.term())
        if isinstance(t, Func):
            return Rel(t.name, t.args)
        raise self.error("expected an atom", start)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            if tok.text != "0":
                raise self.error("only the numeral 0 is a term")
            self.i += 1
            return ZERO
        if tok.kind != "ident":
            raise self.error("expected a term")
        self.i += 1
        if self.tok.kind == "(":
            self.i += 1
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            return Func(tok.text, tuple(args))
        if tok.text == "max" or tok.text in self.constants:
            return Const(tok.text)
        return Var(tok.text)


def parse_formula(text: str, constants: Iterable[str] = ()) -> Formula:
    """Parse ``text`` into a formula.

    Identifiers listed in ``constants`` (plus ``0`` and ``max``) become
    :class:`Const` terms; every other bare identifier is a variable.
    """
    return _Parser(text, constants).parse()


# -- printer -----------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Func):
        return f"{t.name}({', '.join(format_term(a) for a in t.args)})"
    return t.name


def format_atom(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"{format_term(a.left)} = {format_term(a.right)}"
    if isinstance(a, Rel):
        return f"{a.name}({', '.join(format_term(t) for t in a.args)})"
    return f"=({', '.join(format_term(t) for t in atom_terms(a))})"


def format_lit(l: Lit) -> str:
    s = format_atom(l.atom)
    if l.positive:
        return s
    return f"!({s})" if isinstance(l.atom, Eq) else f"!{s}"


def _fmt(f: Formula, parens: bool) -> str:
    if isinstance(f, Lit):
        return format_lit(f)
    if isinstance(f, (Forall, Exists)):
        kind = "forall" if isinstance(f, Forall) else "exists"
        names = []
        node = f
        while type(node) is type(f):
            names.append(node.var)
            node = node.body
        s = f"{kind} {' '.join(names)}. {_fmt(node, False)}"
    elif isinstance(f, Or):
        left = _fmt(f.left, isinstance(f.left, (Forall, Exists)))
        right = _fmt(f.right, not isinstance(f.right, (Lit, And)))
        s = f"{left} | {right}"
    else:
        left = _fmt(f.left, not isinstance(f.left, (Lit, And)))
        right = _fmt(f.right, not isinstance(f.right, Lit))
        s = f"{left} & {right}"
    return f"({s})" if parens else s


def pretty_print(f: Formula) -> str:
    return _fmt(f, False)


# -- prenex dependence form --------------------------------------------------

@dataclass(frozen=True)
class PrenexDepForm:
    """``forall xs. exists ys. (deps & clauses)`` with explicit dependency tuples.

    ``existentials`` holds ``(y, dependency_tuple)`` pairs in quantifier order.
    Variables in the matrix outside ``universals`` and the existentials are free.
    """

    universals: tuple
    existentials: tuple
    matrix: tuple
    free: tuple = field(default=())

    @property
    def existential_vars(self) -> tuple:
        return tuple(y for y, _ in self.existentials)

    def dependencies(self) -> dict:
        return dict(self.existentials)

    def to_formula(self) -> Formula:
        deps = [Lit(Dep(tuple(Var(z) for z in zs), Var(y))) for y, zs in self.existentials]
        body = conj(deps + [clause_to_formula(c) for c in self.matrix])
        for y, _ in reversed(self.existentials):
            body = Exists(y, body)
        for x in reversed(self.universals):
            body = Forall(x, body)
        return body


def _conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _disjuncts(f: Formula) -> list:
    if isinstance(f, Or):
        return _disjuncts(f.left) + _disjuncts(f.right)
    if isinstance(f, Lit):
        return [f]
    raise ShapeError(f"matrix conjunct is not a clause: {pretty_print(f)}")


def _normalize_clause(lits: list) -> Clause | None:
    """Drop trivially false ``t = t`` negations; None when the clause is ``t = t``."""
    out = []
    for l in lits:
        if isinstance(l.atom, Eq) and l.atom.left == l.atom.right:
            if l.positive:
                return None
            continue
        if l not in out:
            out.append(l)
    return tuple(out)


def match_prenex_dep(f: Formula) -> PrenexDepForm:
    """Decompose ``f`` into :class:`PrenexDepForm`, raising :class:`ShapeError`.

    Existential variables without a dependence atom get full dependence on the
    free variables (sorted) followed by the universals.
    """
    universals, existentials = [], []
    node = f
    while isinstance(node, Forall):
        universals.append(node.var)
        node = node.body
    while isinstance(node, Exists):
        existentials.append(node.var)
        node = node.body
    if isinstance(node, (Forall, Exists)):
        raise ShapeError("quantifier prefix must be universals followed by existentials")
    bound = universals + existentials
    if len(set(bound)) != len(bound):
        raise ShapeError("a variable is quantified twice")
    for sub in subformulas(node):
        if isinstance(sub, (Forall, Exists)):
            raise ShapeError("quantifier inside the matrix")

    ys = set(existentials)
    deps: dict = {}
    clauses = []
    for part in _conjuncts(node):
        if isinstance(part, Lit) and isinstance(part.atom, Dep):
            if not part.positive:
                raise ShapeError("negated dependence atom in the matrix")
            dep = part.atom
            if not isinstance(dep.determined, Var) or dep.determined.name not in ys:
                raise ShapeError(f"dependence atom {format_atom(dep)} must determine an existential variable")
            y = dep.determined.name
            if y in deps:
                raise ShapeError(f"more than one dependence atom for {y}")
            zs = []
            for t in dep.determinants:
                if not isinstance(t, Var) or t.name in ys:
                    raise ShapeError(f"dependence atom {format_atom(dep)} may only depend on universal or free variables")
                if t.name not in zs:
                    zs.append(t.name)
            deps[y] = tuple(zs)
            continue
        lits = _disjuncts(part)
        for l in lits:
            if isinstance(l.atom, Dep):
                raise ShapeError("dependence atom inside a clause")
        clause = _normalize_clause(lits)
        if clause is not None:
            clauses.append(clause)

    free = set(free_vars(f))
    for zs in deps.values():
        free |= set(zs) - set(universals)
    free = tuple(sorted(free))
    default = free + tuple(universals)
    existentials_out = tuple((y, deps.get(y, default)) for y in existentials)
    return PrenexDepForm(tuple(universals), existentials_out, tuple(clauses), free)
