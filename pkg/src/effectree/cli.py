"""Command line: ``effectree {typecheck,tree,translate,check,simulate} FILE``.

Exit codes: 0 Accept / equal, 1 Reject / mismatch, 2 Unknown,
3 usage, parse or type error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from effectree import apt as A
from effectree import cps, handlers as H
from effectree import effects as E
from effectree import lambda_y as L
from effectree import syntax as S
from effectree.config import RunConfig
from effectree.errors import EffectreeError
from effectree.lambda_y import BOTTOM
from effectree.trees import Closed, prefix, regularize

OK, FAIL, UNKNOWN, ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _generator(src: S.SourceFile, cfg: RunConfig):
    if src.calculus == "lambda-y":
        t = L.typecheck_ly(src.signature, {}, src.term)
        if t != L.O:
            raise UsageError(f"a tree needs a term of type o, got {S.show_type(t)}")
        return L.BohmGenerator(src.term, cfg.budget)
    mode = "hepcf" if src.calculus == "pcf" else src.calculus
    row = src.row
    E.typecheck(src.signature, {}, src.term, mode, row)
    term = E.elaborate(src.signature, src.term, row) if mode in ("hepcf", "gepcf") else src.term
    return E.EffectTreeGenerator(term, src.signature, cfg.budget)


def _typecheck(src: S.SourceFile):
    if src.calculus == "lambda-y":
        return L.typecheck_ly(src.signature, {}, src.term)
    return E.typecheck(src.signature, {}, src.term, src.calculus, src.row)


def cmd_typecheck(src, cfg, args, out) -> int:
    print(S.show_type(_typecheck(src)), file=out)
    return OK


def cmd_tree(src, cfg, args, out) -> int:
    if src.calculus == "pcf":
        raise UsageError("PCF programs have no effect tree; translate them to hepcf first")
    t = prefix(_generator(src, cfg), cfg.depth)
    print(json.dumps(t.to_json(), ensure_ascii=False), file=out)
    return OK


def cmd_translate(src, cfg, args, out) -> int:
    target = args.to
    match (src.calculus, target):
        case ("epcf", "lambda-y"):
            term = cps.cps_translate(src.signature, src.term)
            print(S.emit_lambda_y(cps.cps_signature(src.signature), term), end="", file=out)
        case ("gepcf", "lambda-y"):
            term = H.translate_gepcf_to_lambday(src.signature, src.term, src.row)
            print(S.emit_lambda_y(H.gepcf_signature(src.signature), term), end="", file=out)
        case ("gepcf", "hepcf"):
            E.typecheck(src.signature, {}, src.term, "gepcf", src.row)
            print(S.emit_effect("hepcf", src.signature, H.generic_to_deep(src.term), src.row), end="", file=out)
        case ("pcf", "hepcf"):
            print(S.emit_effect("hepcf", H.PCF_SIG, H.pcf_program(src.term), H.PCF_ROW), end="", file=out)
        case _:
            raise UsageError(f"no translation from {src.calculus} to {target}")
    return OK


def _load_apt(src: S.SourceFile, args) -> A.Apt:
    path = args.apt or src.apt
    if path is None:
        raise UsageError("no automaton: pass --apt or declare (apt path) in the source")
    if args.apt is None and not os.path.isabs(path):
        path = os.path.join(os.path.dirname(os.path.abspath(args.file)), path)
    return A.load_apt(path)


def cmd_check(src, cfg, args, out) -> int:
    apt = _load_apt(src, args)
    gen = _generator(src, cfg)
    reg = regularize(gen, cfg.max_states)
    if isinstance(reg, Closed):
        verdict = A.decide_regular(reg.graph, apt)
        how = f"regular tree with {len(reg.graph.labels)} vertices"
    else:
        verdict = A.bounded_check(gen, apt, cfg.depth)
        how = f"not regularized ({reg.reason}); bounded check at depth {cfg.depth}"
    name = type(verdict).__name__
    detail = getattr(verdict, "certificate", None) or getattr(verdict, "reason", "")
    print(f"{name}: {detail} [{how}]", file=out)
    return {"Accept": OK, "Reject": FAIL, "Unknown": UNKNOWN}[name]


def _continuation(src: S.SourceFile, cfg: RunConfig):
    choice = cfg.continuation
    if choice == "identity":
        return cps.identity_continuation()
    if choice == "canonical":
        return None
    k = S.parse_file(choice)
    if k.calculus != "lambda-y":
        raise UsageError("a continuation file must be a lambda-y source")
    return cps.Continuation(k.term, dict(k.signature.entries))


def cmd_simulate(src, cfg, args, out) -> int:
    match src.calculus:
        case "epcf":
            r = cps.simulation_check(src.signature, src.term, _continuation(src, cfg), cfg.depth, cfg.budget)
            print(f"cps:    {r.cps_tree}\neffect: {r.effect_tree}", file=out)
            equal = r.equal
        case "gepcf":
            r = H.gepcf_simulation_check(src.signature, src.term, src.row, cfg.depth, cfg.budget)
            print(f"lambda-y: {r.lambda_y_tree}\neffect:   {r.effect_tree}", file=out)
            equal = r.equal
        case "pcf":
            res = H.pcf_eval(src.term, cfg.budget)
            t = prefix(E.EffectTreeGenerator(H.pcf_program(src.term), H.PCF_SIG, cfg.budget), cfg.depth)
            n = H.count_sigma_spine(t)
            shown = f"numeral {res.n}" if isinstance(res, H.Numeral) else type(res).__name__
            print(f"pcf:    {shown}\neffect: {t}", file=out)
            if isinstance(res, H.Numeral):
                equal = n == res.n
            else:
                equal = isinstance(res, E.Diverged) and t.label == BOTTOM
        case _:
            raise UsageError(f"nothing to simulate for {src.calculus}")
    print("equal" if equal else "mismatch", file=out)
    return OK if equal else FAIL


COMMANDS = {
    "typecheck": cmd_typecheck,
    "tree": cmd_tree,
    "translate": cmd_translate,
    "check": cmd_check,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="effectree", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=RunConfig.depth)
    p.add_argument("--budget", type=int, default=RunConfig.budget)
    p.add_argument("--max-states", type=int, default=RunConfig.max_states)
    p.add_argument("--apt")
    p.add_argument("--continuation", default=RunConfig.continuation,
                   help="identity, canonical, or a lambda-y file")
    p.add_argument("--to", choices=("lambda-y", "hepcf"), default="lambda-y")
    return p


def run_command(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else ERROR
    try:
        cfg = RunConfig(args.depth, args.budget, args.max_states, args.continuation)
        src = S.parse_file(args.file)
        return COMMANDS[args.command](src, cfg, args, out)
    except (EffectreeError, UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"effectree: {exc}", file=err)
        return ERROR


def main() -> None:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    sys.exit(run_command())


if __name__ == "__main__":
    main()
