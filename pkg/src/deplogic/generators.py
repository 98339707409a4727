"""Random formulae, sentences, structures and teams for property testing."""

from __future__ import annotations

import itertools
import random

from .structures import Structure, Team
from .syntax import (ZERO, And, Const, Dep, Eq, Exists, Forall, Formula,
                     Func, Lit, Or, Rel, Var, conj, disj)
from .translate import ESOHornSentence

MAX = Const("max")
VOCAB = {"E": 2, "P": 1}


def random_structure(rng: random.Random, n: int, vocab: dict = VOCAB,
                     density: float = 0.4, functions: dict | None = None) -> Structure:
    rels = {}
    for name, arity in vocab.items():
        rels[name] = [t for t in itertools.product(range(n), repeat=arity)
                      if rng.random() < density]
    funcs = {}
    for name, arity in (functions or {}).items():
        funcs[name] = (arity, {t: rng.randrange(n) for t in itertools.product(range(n), repeat=arity)})
    return Structure.build(n, rels, {}, funcs)


def random_team(rng: random.Random, domain, n: int, max_rows: int, min_rows: int = 0) -> Team:
    domain = tuple(domain)
    space = list(itertools.product(range(n), repeat=len(domain)))
    k = rng.randint(min(min_rows, len(space)), min(max_rows, len(space)))
    return Team(domain, frozenset(rng.sample(space, k)))


def _fo_atom(rng: random.Random, vs: list, vocab: dict):
    terms = [Var(v) for v in vs] + [ZERO, MAX]
    kind = rng.choice(["eq", "eq", "succ"] + ["rel"] * len(vocab))
    if kind == "eq" or not vs:
        a, b = rng.sample(terms, 2) if len(terms) > 1 else (terms[0], terms[0])
        return Eq(a, b)
    if kind == "succ":
        return Rel("succ", (rng.choice(terms), rng.choice(terms)))
    name = rng.choice(sorted(vocab))
    return Rel(name, tuple(rng.choice(terms) for _ in range(vocab[name])))


# -- general dependence-logic formulae ---------------------------------------

def random_formula(rng: random.Random, free: list, depth: int = 3, vocab: dict = VOCAB,
                   dep_atoms: bool = True, quantifiers: int = 1) -> Formula:
    """A small NNF formula whose free variables are among ``free``."""
    def gen(vs, d, q):
        choices = ["lit"]
        if d > 0:
            choices += ["and", "or"]
            if q > 0:
                choices += ["exists", "forall"]
        kind = rng.choice(choices)
        if kind == "lit":
            if dep_atoms and vs and rng.random() < 0.4:
                k = rng.randint(1, min(3, len(vs) + 1))
                ts = [Var(rng.choice(vs)) for _ in range(k)]
                return Lit(Dep(tuple(ts[:-1]), ts[-1]), rng.random() < 0.85)
            return Lit(_fo_atom(rng, vs, vocab), rng.random() < 0.6)
        if kind in ("and", "or"):
            node = And if kind == "and" else Or
            return node(gen(vs, d - 1, q), gen(vs, d - 1, q))
        v = f"q{len(vs)}"
        node = Exists if kind == "exists" else Forall
        return node(v, gen(vs + [v], d - 1, q - 1))
    return gen(list(free), depth, quantifiers)


def random_term_formula(rng: random.Random, depth: int = 3) -> Formula:
    """Random formula using function symbols, constants and nested quantifiers,
    for parser round trips."""
    names = ["x", "y", "z", "u1", "v'"]

    def term(d):
        r = rng.random()
        if d <= 0 or r < 0.5:
            return Var(rng.choice(names))
        if r < 0.65:
            return rng.choice([ZERO, MAX, Const("c")])
        return Func(rng.choice(["f", "g"]), tuple(term(d - 1) for _ in range(rng.randint(1, 2))))

    def atom():
        r = rng.random()
        if r < 0.35:
            return Eq(term(2), term(2))
        if r < 0.7:
            return Rel(rng.choice(["P", "Q"]), tuple(term(2) for _ in range(rng.randint(0, 3))))
        return Dep(tuple(term(1) for _ in range(rng.randint(0, 3))), term(1))

    def gen(d):
        kind = rng.choice(["lit"] + ["and", "or", "exists", "forall"] * (d > 0))
        if kind == "lit":
            return Lit(atom(), rng.random() < 0.6)
        if kind in ("and", "or"):
            return (And if kind == "and" else Or)(gen(d - 1), gen(d - 1))
        return (Exists if kind == "exists" else Forall)(rng.choice(names), gen(d - 1))
    return gen(depth)


# -- Boolean D-Horn ----------------------------------------------------------

def random_bdhorn(rng: random.Random, n_univ: int = 2, n_exist: int = 3, n_clauses: int = 4,
                  free: tuple = (), vocab: dict = VOCAB, default_dep_rate: float = 0.2) -> Formula:
    """A random Boolean D-Horn formula ``forall xs exists ys (deps & clauses)``."""
    xs = [f"x{i}" for i in range(1, n_univ + 1)]
    ys = [f"y{i}" for i in range(1, n_exist + 1)]
    outer = list(free) + xs
    deps = []
    for y in ys:
        if rng.random() < default_dep_rate:
            continue
        zs = [v for v in outer if rng.random() < 0.5]
        rng.shuffle(zs)
        deps.append(Lit(Dep(tuple(Var(z) for z in zs), Var(y))))
    clauses = []
    for _ in range(n_clauses):
        lits = []
        positive_used = False
        for _ in range(rng.randint(1, 3)):
            if ys and rng.random() < 0.55:
                y = rng.choice(ys)
                other = [Var(v) for v in ys if v != y] + [ZERO]
                # keep the orientation random: y = t or t = y
                t = rng.choice(other)
                a = Eq(Var(y), t) if rng.random() < 0.7 else Eq(t, Var(y))
                pos = not positive_used and rng.random() < 0.5
                positive_used |= pos
                lits.append(Lit(a, pos))
            else:
                lits.append(Lit(_fo_atom(rng, outer, vocab), rng.random() < 0.5))
        clauses.append(disj(lits))
    body = conj(deps + clauses)
    for y in reversed(ys):
        body = Exists(y, body)
    for x in reversed(xs):
        body = Forall(x, body)
    return body


def mutate_out_of_dstar(rng: random.Random, f: Formula) -> Formula:
    """Insert an existential variable into a relation atom of the matrix.

    The mutated formula is in prenex dependence form but not in D*.
    """
    ys = []
    node = f
    while isinstance(node, Forall):
        node = node.body
    while isinstance(node, Exists):
        ys.append(node.var)
        node = node.body
    y = Var(rng.choice(ys))
    bad = Lit(Rel("P", (y,)), False)

    def put(g):
        return And(g, Lit(bad.atom, rng.random() < 0.5))
    # rebuild prefix
    body = put(node)
    for v in reversed(ys):
        body = Exists(v, body)
    prefix = []
    node = f
    while isinstance(node, Forall):
        prefix.append(node.var)
        node = node.body
    for x in reversed(prefix):
        body = Forall(x, body)
    return body


def mutate_out_of_horn(rng: random.Random, f: Formula) -> Formula:
    """Append a clause with two positive existential atoms.

    The result stays in D* but is no longer D-Horn.
    """
    ys, xs = [], []
    node = f
    while isinstance(node, Forall):
        xs.append(node.var)
        node = node.body
    while isinstance(node, Exists):
        ys.append(node.var)
        node = node.body
    y = rng.choice(ys)
    others = [Var(v) for v in ys if v != y]
    second = Eq(Var(y), rng.choice(others)) if others else Eq(ZERO, Var(y))
    body = And(node, Or(Lit(Eq(Var(y), ZERO)), Lit(second)))
    for v in reversed(ys):
        body = Exists(v, body)
    for x in reversed(xs):
        body = Forall(x, body)
    return body


# -- SO-exists Horn ----------------------------------------------------------

def random_esohorn(rng: random.Random, n_rel: int = 2, max_arity: int = 2, n_univ: int = 2,
                   n_clauses: int = 3, vocab: dict = VOCAB, negative: dict | None = None,
                   functions: dict | None = None) -> ESOHornSentence:
    """Random SO-exists Horn sentence.

    ``negative`` maps extra first-order relation names to arities; those occur
    only negatively.  ``functions`` adds unary/binary function terms to the
    argument pool of second-order atoms.
    """
    xs = [f"x{i}" for i in range(1, n_univ + 1)]
    rels = [(f"S{i}", rng.randint(1, max_arity)) for i in range(1, n_rel + 1)]
    negative = negative or {}

    def arg():
        r = rng.random()
        if functions and r < 0.15:
            name = rng.choice(sorted(functions))
            return Func(name, tuple(Var(rng.choice(xs)) for _ in range(functions[name])))
        if r < 0.25:
            return rng.choice([ZERO, MAX])
        return Var(rng.choice(xs))

    clauses = []
    for _ in range(n_clauses):
        lits = []
        positive_used = False
        for _ in range(rng.randint(1, 3)):
            r = rng.random()
            if r < 0.55:
                name, arity = rng.choice(rels)
                pos = not positive_used and rng.random() < 0.5
                positive_used |= pos
                lits.append(Lit(Rel(name, tuple(arg() for _ in range(arity))), pos))
            elif negative and r < 0.75:
                name = rng.choice(sorted(negative))
                lits.append(Lit(Rel(name, tuple(arg() for _ in range(negative[name]))), False))
            else:
                lits.append(Lit(_fo_atom(rng, xs, vocab), rng.random() < 0.5))
        clauses.append(tuple(dict.fromkeys(lits)))
    return ESOHornSentence(tuple(rels), tuple(xs), tuple(clauses)).validate()
