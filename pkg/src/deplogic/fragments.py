"""Syntactic recognizers for FO, D*, D-Horn and the Boolean D-Horn fragment."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from .syntax import (Const, Dep, Eq, Formula, Lit, PrenexDepForm, ShapeError,
                     Var, atom_vars, format_lit, match_prenex_dep, subformulas)


@dataclass
class FragmentReport:
    is_fo: bool = False
    is_prenex_dep: bool = False
    is_dstar: bool = False
    is_dhorn: bool = False
    is_bdhorn: bool = False
    witnesses: list = field(default_factory=list)  # (clause index or None, reason)

    def to_json(self) -> dict:
        d = asdict(self)
        d["witnesses"] = [{"clause": i, "reason": r} for i, r in self.witnesses]
        return d

    def summary(self) -> str:
        lines = [f"{name}: {'yes' if getattr(self, name) else 'no'}"
                 for name in ("is_fo", "is_prenex_dep", "is_dstar", "is_dhorn", "is_bdhorn")]
        for i, reason in self.witnesses:
            where = "formula" if i is None else f"clause {i}"
            lines.append(f"  {where}: {reason}")
        return "\n".join(lines)


def horn_check(clauses: Iterable, marked: Callable[[Lit], bool]) -> list:
    """Indices of clauses with two or more positive literals accepted by ``marked``."""
    return [i for i, c in enumerate(clauses)
            if sum(1 for l in c if l.positive and marked(l)) >= 2]


def dstar_atom(lit: Lit, ys: set) -> bool:
    """Whether ``lit`` has the shape ``y = 0``, ``0 = y`` or ``y = y'`` over ``ys``."""
    a = lit.atom
    if not isinstance(a, Eq):
        return False
    sides = (a.left, a.right)
    exist = [t for t in sides if isinstance(t, Var) and t.name in ys]
    if len(exist) == 2:
        return a.left != a.right
    return len(exist) == 1 and any(t == Const("0") for t in sides)


def _dstar_violations(p: PrenexDepForm) -> list:
    ys = set(p.existential_vars)
    out = []
    for i, clause in enumerate(p.matrix):
        for l in clause:
            if atom_vars(l.atom) & ys and not dstar_atom(l, ys):
                a = l.atom
                if isinstance(a, Eq) and any(isinstance(t, Const) and t.name != "0" for t in (a.left, a.right)):
                    why = "existential compared with a constant other than 0"
                else:
                    why = "existential variable outside an atom y = 0 or y = y'"
                out.append((i, f"{format_lit(l)}: {why}"))
    return out


def classify_prenex(p: PrenexDepForm) -> FragmentReport:
    report = FragmentReport(is_prenex_dep=True)
    ys = set(p.existential_vars)
    dstar = _dstar_violations(p)
    report.witnesses.extend(dstar)
    report.is_dstar = not dstar
    bad = horn_check(p.matrix, lambda l: bool(atom_vars(l.atom) & ys))
    for i in bad:
        report.witnesses.append((i, "more than one positive literal with an existential variable"))
    report.is_dhorn = not bad
    report.is_bdhorn = report.is_dstar and report.is_dhorn
    return report


def classify(f: Formula) -> FragmentReport:
    is_fo = not any(isinstance(s, Lit) and isinstance(s.atom, Dep) for s in subformulas(f))
    try:
        p = match_prenex_dep(f)
    except ShapeError as exc:
        return FragmentReport(is_fo=is_fo, witnesses=[(None, f"not in prenex dependence form: {exc}")])
    report = classify_prenex(p)
    report.is_fo = is_fo
    return report
