"""Translations between Boolean D-Horn formulae and existential second-order Horn
sentences, plus the open-formula constructions built on top of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterable

from .fragments import classify_prenex, horn_check
from .syntax import (ZERO, Const, Dep, Eq, Func, Lit, PrenexDepForm, Rel,
                     ShapeError, Var, atom_terms, atom_vars, conj, disj,
                     match_prenex_dep, parse_formula, pretty_print)


class TranslationError(ValueError):
    pass


@dataclass(frozen=True)
class ESOHornSentence:
    """``exists P1..Pk forall xs. C1 & ... & Cm`` with Horn clauses in the ``P``s."""

    so_relations: tuple   # ((name, arity), ...)
    universals: tuple
    clauses: tuple

    @property
    def so_names(self) -> frozenset:
        return frozenset(name for name, _ in self.so_relations)

    def is_so_atom(self, lit: Lit) -> bool:
        return isinstance(lit.atom, Rel) and lit.atom.name in self.so_names

    def validate(self) -> "ESOHornSentence":
        arity = dict(self.so_relations)
        if len(arity) != len(self.so_relations):
            raise TranslationError("duplicate second-order relation")
        for i, c in enumerate(self.clauses):
            for l in c:
                if isinstance(l.atom, Dep):
                    raise TranslationError(f"clause {i} contains a dependence atom")
                if self.is_so_atom(l) and len(l.atom.args) != arity[l.atom.name]:
                    raise TranslationError(f"clause {i}: {l.atom.name} used with wrong arity")
                stray = atom_vars(l.atom) - set(self.universals)
                if stray:
                    raise TranslationError(f"clause {i}: unquantified variables {sorted(stray)}")
        bad = horn_check(self.clauses, self.is_so_atom)
        if bad:
            raise TranslationError(f"clauses {bad} are not Horn in the second-order relations")
        return self

    def to_text(self) -> str:
        header = "exists-rel " + " ".join(f"{n}/{a}" for n, a in self.so_relations) + "."
        body = conj([disj(c) for c in self.clauses])
        prefix = f"forall {' '.join(self.universals)}. " if self.universals else ""
        return f"{header}\n{prefix}{pretty_print(body)}\n"


_HEADER_RE = re.compile(r"^\s*exists-rel((?:\s+[A-Za-z_][A-Za-z0-9_']*/[0-9]+)*)\s*\.", re.M)


def is_esohorn_text(text: str) -> bool:
    stripped = "\n".join(l for l in text.splitlines() if not l.lstrip().startswith("#"))
    return stripped.lstrip().startswith("exists-rel")


def parse_esohorn(text: str, constants: Iterable[str] = ()) -> ESOHornSentence:
    lines = [l if not l.lstrip().startswith("#") else "" for l in text.splitlines()]
    text = "\n".join(lines)
    m = _HEADER_RE.match(text)
    if not m:
        raise TranslationError("missing header 'exists-rel Name/arity ... .'")
    rels = []
    for item in m.group(1).split():
        name, arity = item.split("/")
        rels.append((name, int(arity)))
    # keep line numbers of the body aligned with the file
    body = "\n" * text[:m.end()].count("\n") + text[m.end():]
    f = parse_formula(body, constants)
    try:
        p = match_prenex_dep(f)
    except ShapeError as exc:
        raise TranslationError(f"body is not a universal clause conjunction: {exc}") from exc
    if p.existentials or p.free:
        raise TranslationError("body must be 'forall xs.' followed by clauses over xs")
    return ESOHornSentence(tuple(rels), p.universals, p.matrix).validate()


# -- helpers -----------------------------------------------------------------

def _relation_names(clauses: Iterable) -> set:
    return {l.atom.name for c in clauses for l in c if isinstance(l.atom, Rel)}


def _all_vars(clauses: Iterable) -> set:
    return {v for c in clauses for l in c for v in atom_vars(l.atom)}


def _fresh(base: str, used: set) -> str:
    name = base
    for i in count(1):
        if name not in used:
            used.add(name)
            return name
        name = f"{base}{i}"
    raise AssertionError


def _index_of(t, index: dict) -> int:
    return 0 if t == ZERO else index[t.name]


# -- Boolean D-Horn -> SO-exists Horn ----------------------------------------

def pair_closure(pairs: Iterable) -> set:
    """Close unordered index pairs under composition ``{r,s},{s,t} -> {r,t}``."""
    closed = {tuple(sorted(p)) for p in pairs}
    changed = True
    while changed:
        changed = False
        for a, b in list(closed):
            for c, d in list(closed):
                shared = {a, b} & {c, d}
                if len(shared) != 1 or (a, b) == (c, d):
                    continue
                (s,) = shared
                r = a if b == s else b
                t = c if d == s else d
                new = tuple(sorted((r, t)))
                if r != t and new not in closed:
                    closed.add(new)
                    changed = True
    return closed


def bdhorn_pairs(p: PrenexDepForm) -> set:
    """Index pairs ``{r,s}`` (0 standing for the constant) used in the matrix."""
    index = {y: i for i, y in enumerate(p.existential_vars, start=1)}
    pairs = set()
    for c in p.matrix:
        for l in c:
            if atom_vars(l.atom) & index.keys():
                a = l.atom
                pairs.add(tuple(sorted((_index_of(a.left, index), _index_of(a.right, index)))))
    return pairs


def bdhorn_to_esohorn(p: PrenexDepForm, functionality: str = "joint") -> ESOHornSentence:
    """Translate a Boolean D-Horn sentence into an SO-exists Horn sentence.

    Each identity between existentials (or an existential and 0) becomes a
    relation over the universal tuple; transitivity and functionality clauses
    tie those relations to actual functions.  ``functionality="member"`` makes
    ``P_{r,s}`` depend only on the dependency tuple of each member separately;
    ``"joint"`` lets it depend on the union of both tuples.  Either way the
    result is only meant for structures with more elements than existentials.
    """
    if functionality not in ("member", "joint"):
        raise ValueError(f"unknown functionality mode {functionality!r}")
    if p.free:
        raise TranslationError(f"not a sentence: free variables {list(p.free)}")
    report = classify_prenex(p)
    if not report.is_bdhorn:
        raise TranslationError("input is not Boolean D-Horn: " +
                               "; ".join(r for _, r in report.witnesses))
    xs = p.universals
    ys = p.existential_vars
    index = {y: i for i, y in enumerate(ys, start=1)}
    deps = {index[y]: zs for y, zs in p.existentials}
    closed = pair_closure(bdhorn_pairs(p))

    used_rels = _relation_names(p.matrix)
    names = {pair: _fresh(f"P_{pair[0]}_{pair[1]}", used_rels) for pair in sorted(closed)}
    xvars = tuple(Var(x) for x in xs)

    def P(pair, args=xvars, positive=True) -> Lit:
        return Lit(Rel(names[tuple(sorted(pair))], args), positive)

    clauses = []
    for c in p.matrix:
        new = []
        for l in c:
            if atom_vars(l.atom) & index.keys():
                a = l.atom
                pair = (_index_of(a.left, index), _index_of(a.right, index))
                new.append(P(pair, positive=l.positive))
            else:
                new.append(l)
        # y = 0 and 0 = y map to the same atom
        clauses.append(tuple(dict.fromkeys(new)))

    elems = sorted({i for pair in closed for i in pair})
    for s in elems:
        for r in elems:
            for t in elems:
                if len({r, s, t}) == 3 and r < t and (min(r, s), max(r, s)) in closed \
                        and (min(s, t), max(s, t)) in closed:
                    clauses.append((P((r, s), positive=False), P((s, t), positive=False), P((r, t))))

    universals = tuple(xs)
    if xs:
        used_vars = set(xs) | set(ys) | _all_vars(p.matrix)
        prime = {x: _fresh(f"{x}'", used_vars) for x in xs}
        primed = tuple(Var(prime[x]) for x in xs)
        universals = tuple(xs) + tuple(prime[x] for x in xs)
        for pair in sorted(closed):
            members = [m for m in pair if m != 0]
            if functionality == "member":
                groups = [deps[m] for m in members]
            else:
                joint = set().union(*(deps[m] for m in members))
                groups = [tuple(x for x in xs if x in joint)]
            for zs in groups:
                guard = tuple(Lit(Eq(Var(z), Var(prime[z])), False) for z in zs)
                clauses.append(guard + (P(pair, positive=False), P(pair, primed)))
                clauses.append(guard + (P(pair, primed, positive=False), P(pair)))

    so = tuple((names[pair], len(xs)) for pair in sorted(closed))
    return ESOHornSentence(so, universals, tuple(clauses)).validate()


# -- SO-exists Horn -> Boolean D-Horn ----------------------------------------

def _distinct_vars(args: tuple) -> bool:
    return all(isinstance(a, Var) for a in args) and len({a.name for a in args}) == len(args)


def esohorn_to_bdhorn(e: ESOHornSentence) -> PrenexDepForm:
    """Translate an SO-exists Horn sentence into an equivalent Boolean D-Horn sentence.

    Relations are coded by characteristic functions (``P(t)`` becomes
    ``F(t) = 0``), so the result is equivalent on structures with at least two
    elements.
    """
    e.validate()
    so = e.so_names
    used_vars = set(e.universals) | _all_vars(e.clauses)
    universals = list(e.universals)

    def fresh_var(base="w") -> str:
        v = _fresh(base, used_vars)
        universals.append(v)
        return v

    # Stage 1 and 2: SO atoms become ("F", name, args, positive); flatten args.
    clauses = []
    for c in e.clauses:
        lits = []
        extra = []
        cache = {}
        for l in c:
            if not e.is_so_atom(l):
                lits.append(l)
                continue
            name, args = l.atom.name, l.atom.args
            if not _distinct_vars(args):
                key = (name, args)
                if key not in cache:
                    seen = set()
                    new_args = []
                    for t in args:
                        if isinstance(t, Var) and t.name not in seen:
                            seen.add(t.name)
                            new_args.append(t)
                        else:
                            w = Var(fresh_var())
                            seen.add(w.name)
                            new_args.append(w)
                            extra.append(Lit(Eq(w, t), False))
                    cache[key] = tuple(new_args)
                args = cache[key]
            lits.append(("F", name, args, l.positive))
        clauses.append(lits + extra)

    # Stage 3: one argument tuple per function symbol.
    tuples: dict = {}
    for c in clauses:
        for l in c:
            if isinstance(l, tuple):
                tuples.setdefault(l[1], [])
                if l[2] not in tuples[l[1]]:
                    tuples[l[1]].append(l[2])
    used_funcs = set(so) | _relation_names(e.clauses)
    symbol_of: dict = {}      # (relation, args) -> (function symbol, canonical args)
    order = []                # function symbols in creation order with their tuples
    bridges = []
    for name, _ in e.so_relations:
        if name not in tuples:
            continue
        canon, *others = tuples[name]
        symbol_of[(name, canon)] = (name, canon)
        order.append((name, canon))
        for tu in others:
            g = _fresh(f"{name}_", used_funcs)
            guard = []
            if {a.name for a in tu} & {a.name for a in canon}:
                target = tuple(Var(fresh_var()) for _ in tu)
                guard = [Lit(Eq(v, t), False) for v, t in zip(target, tu)]
            else:
                target = tu
            symbol_of[(name, tu)] = (g, target, guard)
            order.append((g, target))
            bridge = [Lit(Eq(a, b), False) for a, b in zip(canon, target)]
            bridges.append(bridge + [("B", name, g)])

    # Stage 4: function symbols become existential variables.
    yname = {}
    for g, _ in order:
        yname[g] = _fresh(f"y_{g}", used_vars)

    def lower(lits) -> tuple:
        out = []
        for l in lits:
            if isinstance(l, Lit):
                new = l
            elif l[0] == "F":
                sym = symbol_of[(l[1], l[2])]
                if len(sym) == 3:
                    for gl in sym[2]:
                        if gl not in out:
                            out.append(gl)
                new = Lit(Eq(Var(yname[sym[0]]), ZERO), l[3])
            else:
                new = Lit(Eq(Var(yname[l[1]]), Var(yname[l[2]])))
            if new not in out:
                out.append(new)
        return tuple(out)

    matrix = tuple(lower(c) for c in clauses) + tuple(lower(b) for b in bridges)
    existentials = tuple((yname[g], tuple(a.name for a in args)) for g, args in order)
    return PrenexDepForm(tuple(universals), existentials, matrix, ())


# -- open formulae -----------------------------------------------------------

def openize(p: PrenexDepForm, relation: str = "R", free_order: Iterable[str] | None = None) -> PrenexDepForm:
    """Turn an open Boolean D-Horn formula into a sentence over an extra relation.

    The free variables become outer universals and every clause is widened by
    ``!R(free)``; a team ``X`` satisfies ``p`` iff the structure expanded by
    ``R = rel(X)`` satisfies the result (for nonempty ``X``).  Sentences are
    returned unchanged.
    """
    order = tuple(p.free if free_order is None else free_order)
    if sorted(order) != sorted(p.free) or len(set(order)) != len(order):
        raise TranslationError(f"free-variable order {list(order)} does not match {list(p.free)}")
    if not order:
        return p
    if relation in _relation_names(p.matrix):
        raise TranslationError(f"relation {relation} already occurs in the formula")
    guard = Lit(Rel(relation, tuple(Var(z) for z in order)), False)
    matrix = tuple(c + (guard,) for c in p.matrix)
    return PrenexDepForm(order + p.universals, p.existentials, matrix, ())


def r_polarities(e: ESOHornSentence, relation: str) -> set:
    return {l.positive for c in e.clauses for l in c
            if isinstance(l.atom, Rel) and l.atom.name == relation}


def negative_esohorn_to_open_bdhorn(e: ESOHornSentence, relation: str = "R",
                                    free_names: Iterable[str] | None = None,
                                    arity: int | None = None) -> PrenexDepForm:
    """Open Boolean D-Horn formula equivalent to an ``R``-negative SO-exists Horn sentence.

    The ``i``-th argument place of ``relation`` corresponds to ``free_names[i]``
    (default ``z1, z2, ...``); nonempty teams over those variables satisfy the
    result iff the structure expanded by ``R = rel(X)`` satisfies ``e``.
    """
    if relation in e.so_names:
        raise TranslationError(f"{relation} is quantified in the sentence")
    if True in r_polarities(e, relation):
        raise TranslationError(f"{relation} occurs positively")
    arities = {len(l.atom.args) for c in e.clauses for l in c
               if isinstance(l.atom, Rel) and l.atom.name == relation}
    if arity is None:
        if len(arities) != 1:
            raise TranslationError(f"cannot infer the arity of {relation}")
        (arity,) = arities
    elif arities - {arity}:
        raise TranslationError(f"{relation} used with arity other than {arity}")
    used_vars = set(e.universals) | _all_vars(e.clauses)
    used_rels = set(e.so_names) | _relation_names(e.clauses)
    copy = _fresh(f"{relation}_copy", used_rels)
    xs = tuple(_fresh(f"u{i}", used_vars) for i in range(1, arity + 1))

    def rename(l: Lit) -> Lit:
        if isinstance(l.atom, Rel) and l.atom.name == relation:
            return Lit(Rel(copy, l.atom.args), l.positive)
        return l

    clauses = tuple(tuple(rename(l) for l in c) for c in e.clauses)
    xv = tuple(Var(x) for x in xs)
    link = (Lit(Rel(relation, xv), False), Lit(Rel(copy, xv)))
    widened = ESOHornSentence(((copy, arity),) + e.so_relations, xs + e.universals,
                              clauses + (link,))
    q = esohorn_to_bdhorn(widened)

    q_vars = set(q.universals) | set(q.existential_vars) | _all_vars(q.matrix)
    if free_names is None:
        zs = tuple(_fresh(f"z{i}", q_vars) for i in range(1, arity + 1))
    else:
        zs = tuple(free_names)
        if len(zs) != arity or set(zs) & q_vars:
            raise TranslationError("free variable names clash or have the wrong count")
    matrix = []
    for c in q.matrix:
        new = []
        for l in c:
            if isinstance(l.atom, Rel) and l.atom.name == relation:
                new.extend(Lit(Eq(Var(z), t), False) for z, t in zip(zs, l.atom.args))
            else:
                new.append(l)
        matrix.append(tuple(dict.fromkeys(new)))
    return PrenexDepForm(q.universals, q.existentials, tuple(matrix), tuple(sorted(zs)))
