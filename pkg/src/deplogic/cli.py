"""Command-line front end.

Exit status: 0 true/SAT, 1 false/UNSAT, 2 usage or parse error, 3 fragment
violation, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .fragments import classify
from .ground import (FragmentError, eval_poly_run, ground, horn_sat,
                     to_dimacs)
from .structures import (EvaluationError, Structure, StructureError, Team,
                         load_structure, load_team)
from .syntax import (ParseError, Rel, ShapeError, free_vars, match_prenex_dep,
                     parse_formula, pretty_print)
from .teamsem import (DEFAULT_MAX_NODES, DEFAULT_MAX_TEAM, FreeVariableError,
                      ResourceLimitExceeded, satisfies_team)
from .translate import (TranslationError, bdhorn_to_esohorn, esohorn_to_bdhorn,
                        is_esohorn_text, negative_esohorn_to_open_bdhorn,
                        openize, parse_esohorn)

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_FRAGMENT, EXIT_RESOURCE = 0, 1, 2, 3, 4
COMMANDS = ("parse", "fragment", "eval", "eval-poly", "translate", "stats")
TARGETS = ("esohorn", "bdhorn", "openize", "open-bdhorn", "ground")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    formula: Path | None = None
    structure: Path | None = None
    team: Path | None = None
    output: Path | None = None
    json: bool = False
    emit_ground: Path | None = None
    max_team: int = DEFAULT_MAX_TEAM
    max_nodes: int = DEFAULT_MAX_NODES
    n_range: tuple = (1, 8)
    target: str | None = None
    relation: str = "R"
    method: str = "auto"
    functionality: str = "joint"
    out: list = field(default_factory=list)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command}")
        if self.formula is None:
            raise UsageError("--formula is required")
        if self.command in ("eval", "eval-poly") and self.structure is None:
            raise UsageError("--structure is required")
        if self.command == "translate":
            if self.target not in TARGETS:
                raise UsageError(f"--to must be one of {', '.join(TARGETS)}")
            if self.target == "ground" and self.structure is None:
                raise UsageError("--to ground needs --structure")
        if self.max_team < 1 or self.max_nodes < 1:
            raise UsageError("caps must be positive")
        lo, hi = self.n_range
        if lo < 1 or hi < lo:
            raise UsageError("--n-range must be A..B with 1 <= A <= B")


def _n_range(text: str) -> tuple:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected A..B") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deplogic", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--formula", type=Path)
    ap.add_argument("--structure", type=Path)
    ap.add_argument("--team", type=Path)
    ap.add_argument("--output", "-o", type=Path)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--emit-ground", type=Path)
    ap.add_argument("--max-team", type=int, default=DEFAULT_MAX_TEAM)
    ap.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    ap.add_argument("--n-range", type=_n_range, default=(1, 8))
    ap.add_argument("--to", dest="target", choices=TARGETS)
    ap.add_argument("--relation", default="R", help="team relation name for open formulae")
    ap.add_argument("--method", choices=("auto", "generic", "skolem"), default="auto",
                    help="evaluator used by 'eval'")
    ap.add_argument("--functionality", choices=("member", "joint"), default="joint",
                    help="functionality clauses used by the D*-Horn to SO-Horn translation")
    return ap


def _structure(cfg: RunConfig) -> Structure | None:
    if cfg.structure is None:
        return None
    return load_structure(cfg.structure.read_bytes())


def _constants(S: Structure | None) -> set:
    return set(S.constants) if S else set()


def _read_formula(cfg: RunConfig, S: Structure | None):
    text = cfg.formula.read_text(encoding="utf-8")
    if is_esohorn_text(text):
        return parse_esohorn(text, _constants(S))
    return parse_formula(text, _constants(S))


def _team(cfg: RunConfig, f, S: Structure) -> Team | None:
    if cfg.team is None:
        return None
    return load_team(cfg.team.read_bytes(), None, S)


def _emit(cfg: RunConfig, text: str) -> None:
    cfg.out.append(text)


def _report(cfg: RunConfig, obj: dict, text: str) -> None:
    _emit(cfg, json.dumps(obj, sort_keys=True) if cfg.json else text)


def _run(cfg: RunConfig) -> int:
    cfg.validate()
    S = _structure(cfg)
    f = _read_formula(cfg, S)
    cmd = cfg.command
    if cmd == "parse":
        if not hasattr(f, "to_text"):
            _report(cfg, {"formula": pretty_print(f), "free": sorted(free_vars(f))}, pretty_print(f))
        else:
            _report(cfg, {"esohorn": f.to_text()}, f.to_text().rstrip("\n"))
        return EXIT_TRUE
    if hasattr(f, "to_text") and cmd not in ("translate", "stats"):
        raise UsageError(f"'{cmd}' expects a dependence-logic formula, not an SO sentence")

    if cmd == "fragment":
        report = classify(f)
        _report(cfg, report.to_json(), report.summary())
        return EXIT_TRUE

    if cmd == "eval":
        X = _team(cfg, f, S) or Team.unit()
        verdict = satisfies_team(S, X, f, method=cfg.method, max_team=cfg.max_team,
                                 max_nodes=cfg.max_nodes)
        _report(cfg, {"verdict": verdict, "method": cfg.method}, "true" if verdict else "false")
        return EXIT_TRUE if verdict else EXIT_FALSE

    if cmd == "eval-poly":
        run = eval_poly_run(S, f, _team(cfg, f, S), functionality=cfg.functionality,
                            max_nodes=cfg.max_nodes)
        if cfg.emit_ground is not None:
            if run.propositional is None:
                cfg.emit_ground.write_text("c no grounding: " + run.route + "\n")
            else:
                cfg.emit_ground.write_text(to_dimacs(run.propositional))
        info = {"verdict": run.verdict, "route": run.route}
        if run.propositional is not None:
            info["ground_atoms"] = len(run.propositional.atoms)
            info["ground_clauses"] = len(run.propositional.clauses)
            if not run.verdict:
                ci = run.horn.contradiction_witness
                info["violated_clause"] = ci
                info["source_clause"] = run.propositional.origins[ci]
        text = "true" if run.verdict else "false"
        if "violated_clause" in info:
            text += f" (ground clause {info['violated_clause']} from source clause {info['source_clause']})"
        _report(cfg, info, text)
        return EXIT_TRUE if run.verdict else EXIT_FALSE

    if cmd == "translate":
        return _translate(cfg, f, S)
    return _stats(cfg, f)


def _as_esohorn(f, cfg: RunConfig):
    if hasattr(f, "to_text"):
        return f
    report = classify(f)
    if not report.is_bdhorn:
        raise FragmentError("formula is not Boolean D-Horn")
    p = match_prenex_dep(f)
    if p.free:
        p = openize(p, cfg.relation)
    return bdhorn_to_esohorn(p, cfg.functionality)


def _translate(cfg: RunConfig, f, S) -> int:
    target = cfg.target
    if target == "esohorn":
        if hasattr(f, "to_text"):
            raise UsageError("input is already an SO sentence")
        _emit(cfg, _as_esohorn(f, cfg).to_text().rstrip("\n"))
    elif target == "bdhorn":
        if not hasattr(f, "to_text"):
            raise UsageError("--to bdhorn expects an SO sentence (exists-rel header)")
        _emit(cfg, pretty_print(esohorn_to_bdhorn(f).to_formula()))
    elif target == "openize":
        if hasattr(f, "to_text") or not classify(f).is_bdhorn:
            raise FragmentError("--to openize expects a Boolean D-Horn formula")
        _emit(cfg, pretty_print(openize(match_prenex_dep(f), cfg.relation).to_formula()))
    elif target == "open-bdhorn":
        if not hasattr(f, "to_text"):
            raise UsageError("--to open-bdhorn expects an SO sentence (exists-rel header)")
        _emit(cfg, pretty_print(negative_esohorn_to_open_bdhorn(f, cfg.relation).to_formula()))
    else:
        _emit(cfg, to_dimacs(ground(_as_esohorn(f, cfg), S)).rstrip("\n"))
    return EXIT_TRUE


def _stats(cfg: RunConfig, f) -> int:
    e = _as_esohorn(f, cfg)
    rows = []
    lo, hi = cfg.n_range
    for n in range(lo, hi + 1):
        h = ground(e, Structure.build(n, {name: [] for name in _fo_relations(e)}))
        rows.append({"n": n, "instances": h.instances, "clauses": len(h.clauses),
                     "atoms": len(h.atoms), "literals": h.literal_count(),
                     "bound": len(e.clauses) * n ** len(e.universals)})
    if cfg.json:
        _emit(cfg, json.dumps({"universals": len(e.universals), "rows": rows}, sort_keys=True))
    else:
        lines = [f"{'n':>4} {'instances':>10} {'clauses':>8} {'atoms':>6} {'literals':>9} {'bound':>10}"]
        lines += [f"{r['n']:>4} {r['instances']:>10} {r['clauses']:>8} {r['atoms']:>6} "
                  f"{r['literals']:>9} {r['bound']:>10}" for r in rows]
        _emit(cfg, "\n".join(lines))
    return EXIT_TRUE


def _fo_relations(e) -> set:
    names = {l.atom.name for c in e.clauses for l in c if isinstance(l.atom, Rel)}
    return names - e.so_names - {"succ"}


def run(cfg: RunConfig) -> tuple:
    """Execute ``cfg``; returns ``(exit status, stdout text, stderr text)``."""
    cfg.out = []
    try:
        status = _run(cfg)
    except ResourceLimitExceeded as exc:
        return EXIT_RESOURCE, "", f"resource cap exceeded: {exc}"
    except (FragmentError, TranslationError) as exc:
        return EXIT_FRAGMENT, "", f"fragment violation: {exc}"
    except (ParseError, ShapeError, StructureError, EvaluationError, FreeVariableError,
            UsageError, OSError) as exc:
        return EXIT_USAGE, "", f"error: {exc}"
    text = "\n".join(cfg.out)
    if cfg.output is not None:
        cfg.output.write_text(text + "\n")
        text = ""
    return status, text, ""


def main(argv: list | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    cfg = RunConfig(**{k: v for k, v in vars(ns).items()})
    status, out, err = run(cfg)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
