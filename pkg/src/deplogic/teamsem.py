"""Brute-force evaluators for team semantics.

:func:`satisfies` follows the recursive team-semantics clauses literally and is
exponential in the team size.  :func:`skolem_eval` decides prenex dependence
forms by searching for Skolem function tables with forward checking; it is the
reference the polynomial pipeline in :mod:`deplogic.ground` is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .structures import (Structure, Team, eval_literal, eval_term,
                         extend_universal)
from .syntax import (And, Dep, Exists, Forall, Formula, Lit, Or,
                     PrenexDepForm, ShapeError, atom_vars, free_vars,
                     match_prenex_dep)

DEFAULT_MAX_TEAM = 16
DEFAULT_MAX_NODES = 10**8


class ResourceLimitExceeded(RuntimeError):
    """The instance is too large for brute force under the configured caps."""


class FreeVariableError(ValueError):
    pass


class _Generic:
    def __init__(self, S: Structure, max_team: int, max_nodes: int):
        self.S = S
        self.max_team = max_team
        self.max_nodes = max_nodes
        self.nodes = 0
        self.memo: dict = {}

    def tick(self, k: int = 1) -> None:
        self.nodes += k
        if self.nodes > self.max_nodes:
            raise ResourceLimitExceeded(f"more than {self.max_nodes} search nodes")

    def sat(self, f: Formula, dom: tuple, rows: frozenset) -> bool:
        key = (id(f), dom, rows)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._sat(f, dom, rows)
        return hit

    def _sat(self, f: Formula, dom: tuple, rows: frozenset) -> bool:
        S = self.S
        self.tick()
        if isinstance(f, Lit):
            atom = f.atom
            if isinstance(atom, Dep):
                if not f.positive:
                    return not rows
                seen: dict = {}
                for r in rows:
                    s = dict(zip(dom, r))
                    key = tuple(eval_term(S, s, t) for t in atom.determinants)
                    val = eval_term(S, s, atom.determined)
                    if seen.setdefault(key, val) != val:
                        return False
                return True
            return all(eval_literal(S, dict(zip(dom, r)), f) for r in rows)
        if isinstance(f, And):
            return self.sat(f.left, dom, rows) and self.sat(f.right, dom, rows)
        if isinstance(f, Or):
            ordered = sorted(rows)
            m = len(ordered)
            if m > self.max_team:
                raise ResourceLimitExceeded(f"team of {m} rows exceeds split cap {self.max_team}")
            for mask in range(1 << m):
                self.tick()
                left = frozenset(r for i, r in enumerate(ordered) if mask >> i & 1)
                if self.sat(f.left, dom, left) and self.sat(f.right, dom, rows - left):
                    return True
            return False
        if isinstance(f, Forall):
            team = extend_universal(Team(dom, rows), f.var, S)
            return self.sat(f.body, team.domain, team.rows)
        # Exists: every function from the rows to the universe, ascending.
        ordered = sorted(rows)
        m = len(ordered)
        if m > self.max_team or S.size ** m > self.max_nodes:
            raise ResourceLimitExceeded(f"{S.size}^{m} witness functions exceed the cap")
        if f.var in dom:
            idx = dom.index(f.var)
            new_dom = dom
        else:
            idx = len(dom)
            new_dom = dom + (f.var,)
        for values in itertools.product(S.universe, repeat=m):
            self.tick()
            new_rows = frozenset(r[:idx] + (v,) + r[idx + 1:] for r, v in zip(ordered, values))
            if self.sat(f.body, new_dom, new_rows):
                return True
        return False


def satisfies(S: Structure, X: Team, f: Formula, *, max_team: int = DEFAULT_MAX_TEAM,
              max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Decide ``S |=_X f`` by exhaustive search over splits and witness functions."""
    missing = free_vars(f) - set(X.domain)
    if missing:
        raise FreeVariableError(f"free variables {sorted(missing)} not in team domain")
    return _Generic(S, max_team, max_nodes).sat(f, X.domain, X.rows)


def satisfies_team(S: Structure, X: Team, f: Formula, *, method: str = "auto",
                   max_team: int = DEFAULT_MAX_TEAM, max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Team satisfaction, routed through the Skolem search when ``f`` is in prenex
    dependence shape and ``method`` is ``"auto"``; ``"generic"`` forces
    :func:`satisfies` and ``"skolem"`` forces :func:`skolem_eval`.
    """
    if method not in ("auto", "generic", "skolem"):
        raise ValueError(f"unknown method {method!r}")
    if method != "generic":
        try:
            p = match_prenex_dep(f)
        except ShapeError:
            if method == "skolem":
                raise
        else:
            missing = set(p.free) - set(X.domain)
            if missing:
                raise FreeVariableError(f"free variables {sorted(missing)} not in team domain")
            return skolem_eval(S, p, X, max_nodes=max_nodes)
    return satisfies(S, X, f, max_team=max_team, max_nodes=max_nodes)


def satisfies_sentence(S: Structure, f: Formula, *, method: str = "auto",
                       max_team: int = DEFAULT_MAX_TEAM,
                       max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Truth of a sentence: satisfaction by the team holding the empty assignment."""
    if free_vars(f):
        raise FreeVariableError(f"not a sentence: free variables {sorted(free_vars(f))}")
    return satisfies_team(S, Team.unit(), f, method=method, max_team=max_team,
                          max_nodes=max_nodes)


# -- Skolem search -----------------------------------------------------------

@dataclass
class _Constraint:
    scope: tuple          # CSP variable ids
    lits: tuple           # literals still open after evaluating the universal part
    env: dict             # row assignment
    names: tuple          # existential name bound by each scope entry


class _SkolemCSP:
    def __init__(self, S: Structure, p: PrenexDepForm, X: Team | None, max_nodes: int):
        self.S = S
        self.max_nodes = max_nodes
        self.nodes = 0
        if X is None:
            if p.free:
                raise FreeVariableError(f"free variables {list(p.free)} need a team")
            X = Team.unit()
        missing = set(p.free) - set(X.domain)
        if missing:
            raise FreeVariableError(f"team does not cover free variables {sorted(missing)}")
        ys = set(p.existential_vars)
        deps = dict(p.existentials)
        self.keys: list = []      # CSP variable id -> (existential, argument tuple)
        self.ids: dict = {}
        self.constraints: list = []
        self.unsat = False
        # A clause only sees the outer variables it mentions plus the dependency
        # tuples of its existentials, so rows are enumerated per clause over that
        # projection instead of over the whole universal block.
        for clause in p.matrix:
            seen = set().union(*(atom_vars(l.atom) for l in clause))
            for y in seen & ys:
                seen |= set(deps[y])
            fdom = tuple(v for v in X.domain if v in seen)
            udom = tuple(v for v in p.universals if v in seen)
            frows = sorted({tuple(r[X.domain.index(v)] for v in fdom) for r in X.rows})
            for fr in frows:
                for ur in itertools.product(S.universe, repeat=len(udom)):
                    env = dict(zip(fdom, fr))
                    env.update(zip(udom, ur))
                    if not self._add(p, clause, env, ys):
                        self.unsat = True
                        return

    def _add(self, p: PrenexDepForm, clause, env: dict, ys: set) -> bool:
        open_lits = []
        for l in clause:
            if atom_vars(l.atom) & ys:
                open_lits.append(l)
            elif eval_literal(self.S, env, l):
                return True
        if not open_lits:
            return False
        names = sorted(set().union(*(atom_vars(l.atom) for l in open_lits)) & ys)
        scope = tuple(self._var(y, tuple(env[z] for z in zs))
                      for y, zs in p.existentials if y in names)
        order = [y for y, _ in p.existentials if y in names]
        self.constraints.append(_Constraint(scope, tuple(open_lits), env, tuple(order)))
        return True

    def _var(self, y: str, args: tuple) -> int:
        key = (y, args)
        if key not in self.ids:
            self.ids[key] = len(self.keys)
            self.keys.append(key)
        return self.ids[key]

    def check(self, c: _Constraint, values: dict) -> bool:
        env = dict(c.env)
        for name, v in zip(c.names, c.scope):
            env[name] = values[v]
        return any(eval_literal(self.S, env, l) for l in c.lits)

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise ResourceLimitExceeded(f"Skolem search exceeded {self.max_nodes} nodes")

    def solve(self) -> dict | None:
        if self.unsat:
            return None
        nvars = len(self.keys)
        domains = [set(self.S.universe) for _ in range(nvars)]
        watch = [[] for _ in range(nvars)]
        for c in self.constraints:
            for v in c.scope:
                watch[v].append(c)
        values: dict = {}
        # node consistency on single-variable constraints
        for c in self.constraints:
            if len(c.scope) == 1:
                v = c.scope[0]
                domains[v] = {a for a in domains[v] if self.check(c, {v: a})}
                if not domains[v]:
                    return None
        comps = self._components(nvars)
        for comp in comps:
            if not self._search(comp, domains, watch, values):
                return None
        tables: dict = {}
        for vid, (y, args) in enumerate(self.keys):
            tables.setdefault(y, {})[args] = values.get(vid, min(domains[vid]))
        return tables

    def _components(self, nvars: int) -> list:
        parent = list(range(nvars))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in self.constraints:
            for v in c.scope[1:]:
                parent[find(v)] = find(c.scope[0])
        groups: dict = {}
        for v in range(nvars):
            groups.setdefault(find(v), []).append(v)
        return list(groups.values())

    def _search(self, comp: list, domains: list, watch: list, values: dict) -> bool:
        unassigned = set(comp)
        if not any(len(c.scope) > 1 for v in comp for c in watch[v]):
            return True

        def rec() -> bool:
            if not unassigned:
                return True
            v = min(unassigned, key=lambda u: (len(domains[u]), u))
            unassigned.discard(v)
            for a in sorted(domains[v]):
                self.tick()
                values[v] = a
                pruned = []
                ok = True
                for c in watch[v]:
                    free = [u for u in c.scope if u not in values]
                    if not free:
                        if not self.check(c, values):
                            ok = False
                            break
                    elif len(free) == 1:
                        u = free[0]
                        for b in list(domains[u]):
                            values[u] = b
                            if not self.check(c, values):
                                domains[u].discard(b)
                                pruned.append((u, b))
                            del values[u]
                        if not domains[u]:
                            ok = False
                            break
                if ok and rec():
                    return True
                for u, b in pruned:
                    domains[u].add(b)
                del values[v]
            unassigned.add(v)
            return False

        return rec()


def skolem_witness(S: Structure, p: PrenexDepForm, X: Team | None = None, *,
                   max_nodes: int = DEFAULT_MAX_NODES) -> dict | None:
    """Search for Skolem tables ``{y: {args: value}}`` making every clause hold on
    every row of ``X`` extended by the universals; None when none exist.

    Entries that no clause instance constrains are omitted; any value works there.
    """
    return _SkolemCSP(S, p, X, max_nodes).solve()


def skolem_eval(S: Structure, p: PrenexDepForm, X: Team | None = None, *,
                max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    return skolem_witness(S, p, X, max_nodes=max_nodes) is not None
