"""Grounding SO-exists Horn sentences to propositional Horn clauses, a linear-time
Horn-SAT solver, and the polynomial model checker for Boolean D-Horn formulae.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .fragments import classify
from .structures import (EvaluationError, Structure, Team, eval_literal,
                         eval_term, restrict_team, team_rel)
from .syntax import Eq, Formula, Func, Lit, Rel, Var, atom_vars, match_prenex_dep
from .teamsem import DEFAULT_MAX_NODES, skolem_eval
from .translate import ESOHornSentence, bdhorn_to_esohorn, openize


class GroundAtom(NamedTuple):
    relation: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.relation}({','.join(map(str, self.args))})"


class NotHornError(ValueError):
    pass


class FragmentError(ValueError):
    """The formula is outside the Boolean D-Horn fragment."""


@dataclass
class PropHornFormula:
    atoms: list                       # atoms[id - 1] is the GroundAtom with that id
    clauses: list                     # (negative ids, positive id or None)
    origins: list = field(default_factory=list)   # source clause index per ground clause
    instances: int = 0                # clause instances visited before simplification

    @property
    def ids(self) -> dict:
        return {a: i for i, a in enumerate(self.atoms, start=1)}

    def literal_count(self) -> int:
        return sum(len(n) + (p is not None) for n, p in self.clauses)


@dataclass
class HornResult:
    satisfiable: bool
    minimal_model: set | None = None
    contradiction_witness: int | None = None


def _rename_term(t, m: dict):
    if isinstance(t, Var):
        return Var(m.get(t.name, t.name))
    if isinstance(t, Func):
        return Func(t.name, tuple(_rename_term(a, m) for a in t.args))
    return t


def _rename(l: Lit, m: dict) -> Lit:
    a = l.atom
    if isinstance(a, Eq):
        a = Eq(_rename_term(a.left, m), _rename_term(a.right, m))
    else:
        a = Rel(a.name, tuple(_rename_term(t, m) for t in a.args))
    return Lit(a, l.positive)


def _merge_guards(clause) -> tuple:
    """Drop guards ``!(u = v)`` between variables by identifying ``u`` and ``v``.

    An instance with ``u != v`` makes the guard true, so only the instances
    with ``u = v`` can contribute a ground clause.
    """
    parent: dict = {}

    def find(v):
        while parent.get(v, v) != v:
            v = parent[v]
        return v

    rest = []
    for l in clause:
        a = l.atom
        if not l.positive and isinstance(a, Eq) and isinstance(a.left, Var) and isinstance(a.right, Var):
            u, v = sorted((find(a.left.name), find(a.right.name)))
            if u != v:
                parent[v] = u
        else:
            rest.append(l)
    if not parent:
        return tuple(rest)
    m = {v: find(v) for v in parent}
    return tuple(_rename(l, m) for l in rest)


def ground(e: ESOHornSentence, S: Structure) -> PropHornFormula:
    """Instantiate every clause over the universe.

    Each clause is instantiated over the universals it mentions only, so a
    clause with ``v`` variables contributes at most ``n**v`` instances; that
    raw count is reported as ``instances``.  Instances with a true
    first-order literal vanish (the search prunes them as soon as the
    literal's variables are bound); false first-order literals are deleted;
    an instance left empty is kept and forces UNSAT.
    """
    so = e.so_names
    raw = []      # (negative keys, positive key or None, origin)
    ground_keys = set()
    instances = 0
    universe = S.universe
    for ci, clause in enumerate(e.clauses):
        instances += S.size ** len(_clause_vars(clause))
        clause = _merge_guards(clause)
        fo = [l for l in clause if not (isinstance(l.atom, Rel) and l.atom.name in so)]
        sol = [l for l in clause if isinstance(l.atom, Rel) and l.atom.name in so]
        weight: dict = {}
        for l in fo:
            for v in atom_vars(l.atom):
                weight[v] = weight.get(v, 0) + 1
        vs = sorted(_clause_vars(clause), key=lambda v: (-weight.get(v, 0), v))
        # checks[d]: first-order literals whose variables are all bound at depth d
        checks = [[] for _ in range(len(vs) + 1)]
        for l in fo:
            lv = atom_vars(l.atom)
            checks[max((vs.index(v) + 1 for v in lv), default=0)].append(l)
        env: dict = {}

        def emit():
            neg, pos = [], None
            for l in sol:
                key = GroundAtom(l.atom.name, tuple(eval_term(S, env, t) for t in l.atom.args))
                ground_keys.add(key)
                if l.positive:
                    pos = key
                else:
                    neg.append(key)
            if pos is None or pos not in neg:
                raw.append((tuple(dict.fromkeys(neg)), pos, ci))

        def rec(d):
            if any(eval_literal(S, env, l) for l in checks[d]):
                return
            if d == len(vs):
                emit()
                return
            v = vs[d]
            for a in universe:
                env[v] = a
                rec(d + 1)
            del env[v]

        rec(0)
    atoms = sorted(ground_keys)
    ids = {a: i for i, a in enumerate(atoms, start=1)}
    clauses, origins = [], []
    for neg, pos, ci in raw:
        clauses.append((tuple(ids[a] for a in neg), None if pos is None else ids[pos]))
        origins.append(ci)
    return PropHornFormula(atoms, clauses, origins, instances)


def _clause_vars(clause) -> set:
    return set().union(*(atom_vars(l.atom) for l in clause)) if clause else set()


def horn_sat(h: PropHornFormula) -> HornResult:
    """Unit propagation to the least model, linear in the number of literals."""
    natoms = len(h.atoms)
    clauses = h.clauses
    remaining = [len(neg) for neg, _ in clauses]
    occurs = [[] for _ in range(natoms + 1)]
    truth = [False] * (natoms + 1)
    queue = []
    for ci, (neg, pos) in enumerate(clauses):
        if neg:
            for a in neg:
                occurs[a].append(ci)
        elif pos is None:
            return HornResult(False, contradiction_witness=ci)
        elif not truth[pos]:
            truth[pos] = True
            queue.append(pos)
    pop, push = queue.pop, queue.append
    while queue:
        for ci in occurs[pop()]:
            remaining[ci] -= 1
            if not remaining[ci]:
                pos = clauses[ci][1]
                if pos is None:
                    return HornResult(False, contradiction_witness=ci)
                if not truth[pos]:
                    truth[pos] = True
                    push(pos)
    # an atom listed twice in one clause's body would be over-counted; ground() dedupes
    return HornResult(True, minimal_model={i for i in range(1, natoms + 1) if truth[i]})


def from_signed_clauses(clauses, natoms: int | None = None) -> PropHornFormula:
    """Build a :class:`PropHornFormula` from DIMACS-style signed-integer clauses.

    Raises :class:`NotHornError` if some clause has two positive literals.
    """
    out = []
    top = 0
    for ci, c in enumerate(clauses):
        pos = sorted({l for l in c if l > 0})
        if len(pos) > 1:
            raise NotHornError(f"clause {ci} has more than one positive literal")
        neg = tuple(dict.fromkeys(-l for l in c if l < 0))
        if pos and pos[0] in neg:
            continue
        out.append((neg, pos[0] if pos else None))
        top = max([top, *map(abs, c)])
    n = top if natoms is None else natoms
    atoms = [GroundAtom("p", (i,)) for i in range(1, n + 1)]
    return PropHornFormula(atoms, out, list(range(len(out))), len(out))


def eval_esohorn(S: Structure, e: ESOHornSentence) -> bool:
    return horn_sat(ground(e, S)).satisfiable


def to_dimacs(h: PropHornFormula) -> str:
    lines = [f"c atom {i} {a}" for i, a in enumerate(h.atoms, start=1)]
    body = sorted(
        sorted([-a for a in neg] + ([pos] if pos is not None else []), key=lambda x: (abs(x), x))
        for neg, pos in h.clauses
    )
    lines.append(f"p cnf {len(h.atoms)} {len(body)}")
    lines.extend(" ".join(map(str, c + [0])) for c in body)
    return "\n".join(lines) + "\n"


def _fresh_relation(taken: set, base: str = "R") -> str:
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    return name


@dataclass
class PolyRun:
    """Trace of one :func:`eval_poly_run` call."""

    verdict: bool
    route: str                         # "pipeline", "fallback" or "empty-team"
    sentence: object = None            # the translated ESOHornSentence, if any
    structure: Structure | None = None
    propositional: PropHornFormula | None = None
    horn: HornResult | None = None


def eval_poly_run(S: Structure, f: Formula, X: Team | None = None, *,
                  functionality: str = "joint", max_nodes: int = DEFAULT_MAX_NODES) -> PolyRun:
    report = classify(f)
    if not report.is_bdhorn:
        raise FragmentError("formula is not Boolean D-Horn: " +
                            "; ".join(r for _, r in report.witnesses))
    p = match_prenex_dep(f)
    if p.free:
        if X is None:
            raise EvaluationError(f"open formula needs a team over {list(p.free)}")
        X = restrict_team(X, p.free)
        if not X.rows:
            return PolyRun(True, "empty-team")
        taken = set(S.relations) | {l.atom.name for c in p.matrix for l in c
                                    if isinstance(l.atom, Rel)}
        relation = _fresh_relation(taken)
        S = S.with_relation(relation, team_rel(X))
        p = openize(p, relation, X.domain)
    k = len(p.existentials)
    if S.size < k + 1:
        return PolyRun(skolem_eval(S, p, max_nodes=max_nodes), "fallback", structure=S)
    e = bdhorn_to_esohorn(p, functionality)
    h = ground(e, S)
    res = horn_sat(h)
    return PolyRun(res.satisfiable, "pipeline", e, S, h, res)


def eval_poly(S: Structure, f: Formula, X: Team | None = None, *,
              functionality: str = "joint", max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Model-check a Boolean D-Horn formula by translation, grounding and Horn-SAT.

    Open formulae need a team ``X`` over their free variables.  Structures with
    at most as many elements as existential variables are decided by the Skolem
    search instead.
    """
    return eval_poly_run(S, f, X, functionality=functionality, max_nodes=max_nodes).verdict
