"""Finite successor structures, assignments and teams.

The universe of a structure is always ``{0, ..., n-1}``.  The constants ``0``
and ``max`` and the binary relation ``succ`` are injected on construction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .syntax import Atom, Const, Dep, Eq, Func, Lit, Rel, Term, Var

RESERVED = {"0", "max", "succ"}


class StructureError(ValueError):
    pass


class EvaluationError(ValueError):
    """Unbound variable or uninterpreted symbol."""


@dataclass(frozen=True)
class Structure:
    size: int
    relations: Mapping = field(default_factory=dict)
    constants: Mapping = field(default_factory=dict)
    functions: Mapping = field(default_factory=dict)  # name -> (arity, {args: value})

    @classmethod
    def build(cls, size: int, relations=None, constants=None, functions=None) -> "Structure":
        """Validate user symbols and add the successor built-ins."""
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise StructureError("universe size must be a positive integer")
        relations = dict(relations or {})
        constants = dict(constants or {})
        functions = dict(functions or {})
        for name in itertools.chain(relations, constants, functions):
            if name in RESERVED:
                raise StructureError(f"reserved name {name!r} may not be redefined")
        rels = {}
        for name, tuples in relations.items():
            ts = frozenset(tuple(t) for t in tuples)
            arities = {len(t) for t in ts}
            if len(arities) > 1:
                raise StructureError(f"relation {name} has tuples of different arity")
            for t in ts:
                if any(not isinstance(v, int) or not 0 <= v < size for v in t):
                    raise StructureError(f"relation {name}: tuple {t} out of range")
            rels[name] = ts
        rels["succ"] = frozenset((i, i + 1) for i in range(size - 1))
        for name, v in constants.items():
            if not isinstance(v, int) or not 0 <= v < size:
                raise StructureError(f"constant {name} out of range")
        consts = dict(constants, **{"0": 0, "max": size - 1})
        funcs = {}
        for name, (arity, table) in functions.items():
            table = {tuple(k): v for k, v in table.items()}
            for args in itertools.product(range(size), repeat=arity):
                if args not in table:
                    raise StructureError(f"function {name} is partial: no value at {args}")
            for k, v in table.items():
                if len(k) != arity or any(not 0 <= a < size for a in k) or not 0 <= v < size:
                    raise StructureError(f"function {name}: entry {k} -> {v} out of range")
            funcs[name] = (arity, table)
        return cls(size, rels, consts, funcs)

    @property
    def universe(self) -> range:
        return range(self.size)

    def with_relation(self, name: str, tuples: Iterable) -> "Structure":
        if name in self.relations or name in RESERVED:
            raise StructureError(f"relation {name} already interpreted")
        user = {k: v for k, v in self.relations.items() if k != "succ"}
        user[name] = tuples
        consts = {k: v for k, v in self.constants.items() if k not in RESERVED}
        return Structure.build(self.size, user, consts, self.functions)

    def to_json(self) -> dict:
        return {
            "universe": self.size,
            "relations": {k: sorted(map(list, v)) for k, v in sorted(self.relations.items())
                          if k != "succ"},
            "constants": {k: v for k, v in sorted(self.constants.items()) if k not in RESERVED},
            "functions": {k: {"arity": a, "table": {",".join(map(str, args)): v
                                                    for args, v in sorted(t.items())}}
                          for k, (a, t) in sorted(self.functions.items())},
        }


def load_structure(data: bytes | str) -> Structure:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict) or "universe" not in obj:
        raise StructureError("structure must be an object with a 'universe' field")
    functions = {}
    for name, spec in obj.get("functions", {}).items():
        arity = spec["arity"]
        table = {}
        for key, value in spec["table"].items():
            args = tuple(int(p) for p in key.split(",")) if key != "" else ()
            table[args] = value
        functions[name] = (arity, table)
    return Structure.build(obj["universe"], obj.get("relations", {}),
                           obj.get("constants", {}), functions)


# -- teams -------------------------------------------------------------------

@dataclass(frozen=True)
class Team:
    """A set of assignments over ``domain``, stored as value tuples in domain order."""

    domain: tuple
    rows: frozenset

    @classmethod
    def from_assignments(cls, assignments: Iterable[Mapping], domain: Iterable[str]) -> "Team":
        domain = tuple(domain)
        rows = set()
        for s in assignments:
            if set(s) != set(domain):
                raise StructureError(f"team row {dict(s)} does not have domain {list(domain)}")
            rows.add(tuple(s[v] for v in domain))
        return cls(domain, frozenset(rows))

    @classmethod
    def unit(cls) -> "Team":
        """The team ``{{}}`` holding only the empty assignment."""
        return cls((), frozenset({()}))

    def assignments(self) -> list:
        return [dict(zip(self.domain, r)) for r in sorted(self.rows)]

    def __len__(self) -> int:
        return len(self.rows)


def load_team(data: bytes | str, domain: Iterable[str] | None = None,
              structure: Structure | None = None) -> Team:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, list) or not all(isinstance(r, dict) for r in obj):
        raise StructureError("team must be a list of objects")
    if domain is None:
        domain = sorted(obj[0]) if obj else []
    team = Team.from_assignments(obj, domain)
    if structure is not None:
        for row in team.rows:
            if any(not isinstance(v, int) or not 0 <= v < structure.size for v in row):
                raise StructureError(f"team value out of range in {row}")
    return team


def team_rel(X: Team) -> frozenset:
    return X.rows


def team_from_relation(domain: Iterable[str], rel: Iterable) -> Team:
    return Team(tuple(domain), frozenset(tuple(t) for t in rel))


def extend_by_function(X: Team, x: str, F: Callable[[dict], int] | Mapping) -> Team:
    """``X(F/x)``: set (or overwrite) ``x`` in each row to ``F(row)``.

    ``F`` is a callable on assignment dicts or a mapping keyed by row tuples.
    """
    if x in X.domain:
        domain = X.domain
        idx = domain.index(x)
    else:
        domain = X.domain + (x,)
        idx = len(X.domain)
    rows = set()
    for r in X.rows:
        try:
            v = F[r] if isinstance(F, Mapping) else F(dict(zip(X.domain, r)))
        except KeyError as exc:
            raise StructureError(f"function undefined on row {r}") from exc
        rows.add(r[:idx] + (v,) + r[idx + 1:])
    return Team(domain, frozenset(rows))


def extend_universal(X: Team, x: str, S: Structure) -> Team:
    """``X(A/x)``: every row paired with every universe element at ``x``."""
    if x in X.domain:
        idx = X.domain.index(x)
        rows = {r[:idx] + (a,) + r[idx + 1:] for r in X.rows for a in S.universe}
        return Team(X.domain, frozenset(rows))
    rows = {r + (a,) for r in X.rows for a in S.universe}
    return Team(X.domain + (x,), frozenset(rows))


def restrict_team(X: Team, V: Iterable[str]) -> Team:
    V = set(V)
    if not V <= set(X.domain):
        raise StructureError(f"{sorted(V - set(X.domain))} not in team domain")
    idx = [i for i, v in enumerate(X.domain) if v in V]
    domain = tuple(X.domain[i] for i in idx)
    return Team(domain, frozenset(tuple(r[i] for i in idx) for r in X.rows))


# -- first-order evaluation --------------------------------------------------

def eval_term(S: Structure, s: Mapping, t: Term) -> int:
    if isinstance(t, Var):
        try:
            return s[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, Const):
        try:
            return S.constants[t.name]
        except KeyError:
            raise EvaluationError(f"unknown constant {t.name}") from None
    try:
        arity, table = S.functions[t.name]
    except KeyError:
        raise EvaluationError(f"unknown function {t.name}") from None
    if arity != len(t.args):
        raise EvaluationError(f"function {t.name} has arity {arity}")
    return table[tuple(eval_term(S, s, a) for a in t.args)]


def eval_atom(S: Structure, s: Mapping, a: Atom) -> bool:
    """First-order truth of an equality or relation atom under ``s``."""
    if isinstance(a, Eq):
        return eval_term(S, s, a.left) == eval_term(S, s, a.right)
    if isinstance(a, Rel):
        try:
            rel = S.relations[a.name]
        except KeyError:
            raise EvaluationError(f"unknown relation {a.name}") from None
        return tuple(eval_term(S, s, t) for t in a.args) in rel
    raise TypeError("dependence atoms have no first-order truth value")


def eval_literal(S: Structure, s: Mapping, l: Lit) -> bool:
    return eval_atom(S, s, l.atom) == l.positive
