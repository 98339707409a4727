import random

import pytest

from deplogic.fragments import classify, horn_check
from deplogic.generators import mutate_out_of_dstar, mutate_out_of_horn, random_bdhorn
from deplogic.syntax import Lit, Rel, Var, match_prenex_dep, parse_formula, pretty_print
from deplogic.translate import bdhorn_to_esohorn

DS = ("forall x0 x1 x2. exists y0 y1 y2. =(x0,y0) & =(x1,y1) & =(x2,y2) & "
      "(x1 = x2 -> y1 = y2) & (y1 = y2 -> x1 = x2) & E(x0,y0) & (y0 = x1 -> P(y1))")


def test_dominating_set_is_dhorn_only():
    r = classify(parse_formula(DS))
    assert r.is_prenex_dep and r.is_dhorn
    assert not r.is_dstar and not r.is_bdhorn
    assert not r.is_fo
    assert all(i is not None for i, _ in r.witnesses)


def test_bdhorn_example():
    r = classify(parse_formula("forall x. exists y. =(x,y) & (y = 0 | !(x = max))"))
    assert r.is_bdhorn and r.is_dhorn and r.is_dstar


def test_two_positive_existential_atoms():
    r = classify(parse_formula("forall x. exists y1 y2. =(x,y1) & =(x,y2) & (y1 = 0 | y2 = 0)"))
    assert r.is_dstar and not r.is_dhorn and not r.is_bdhorn
    assert r.witnesses[0][0] == 0


def test_reversed_orientation_accepted():
    assert classify(parse_formula("exists y. 0 = y")).is_bdhorn


def test_constant_other_than_zero():
    r = classify(parse_formula("exists y. y = max"))
    assert not r.is_dstar
    assert "other than 0" in r.witnesses[0][1]


def test_fo_and_non_prenex():
    r = classify(parse_formula("forall x. (P(x) | (exists y. E(x, y)))"))
    assert r.is_fo and not r.is_prenex_dep
    assert not (r.is_dstar or r.is_dhorn or r.is_bdhorn)
    assert r.witnesses and r.witnesses[0][0] is None


def test_report_json():
    d = classify(parse_formula(DS)).to_json()
    assert d["is_dhorn"] is True and d["is_bdhorn"] is False
    assert d["witnesses"][0]["clause"] == 2  # E(x0,y0)


def _so(l):
    return isinstance(l.atom, Rel) and l.atom.name in {"P", "Q"}


def test_horn_check():
    x = (Var("x"),)
    assert horn_check([(Lit(Rel("P", x), False), Lit(Rel("Q", x)))], _so) == []
    assert horn_check([(Lit(Rel("P", x)), Lit(Rel("Q", x)))], _so) == [0]
    assert horn_check([(Lit(Rel("E", x)), Lit(Rel("F", x)), Lit(Rel("P", x)))], _so) == []


def test_transitivity_clauses_are_horn():
    p = match_prenex_dep(parse_formula("forall x. exists y1 y2. (y1 = y2 | P(x)) & !(y2 = 0)"))
    e = bdhorn_to_esohorn(p)
    assert horn_check(e.clauses, e.is_so_atom) == []


def test_invariants_and_mutations():
    rng = random.Random(17)
    for _ in range(300):
        f = random_bdhorn(rng, rng.randint(0, 2), rng.randint(1, 3), rng.randint(1, 5))
        r = classify(f)
        assert r.is_bdhorn
        assert classify(parse_formula(pretty_print(f))) == r
        g = mutate_out_of_dstar(rng, f)
        rg = classify(g)
        assert rg.is_prenex_dep and not rg.is_dstar and not rg.is_bdhorn
        h = mutate_out_of_horn(rng, f)
        rh = classify(h)
        assert rh.is_dstar and not rh.is_dhorn and not rh.is_bdhorn
        assert all(i is not None for i, _ in rg.witnesses + rh.witnesses)


@pytest.mark.parametrize("text", [
    "forall x. exists y. =(x, y) & P(y)",
    "forall x. exists y. =(x, y) & !E(x, y)",
    "forall x. exists y. y = x",
])
def test_existential_outside_dstar_atoms(text):
    r = classify(parse_formula(text))
    assert r.is_prenex_dep and not r.is_dstar
