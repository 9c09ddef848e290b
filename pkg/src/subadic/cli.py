"""Command line interface: ``subadic <command> FILE [options]``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import bratteli as bt
from .branchpoints import L_CMP, branch_points, quasi_invertibility
from .codings import (apply_code, coded_prefix, image_branch_degrees, injectivity_check, load_rule,
                      perron_construct, rank_one)
from .errors import GateError, InvalidInput, SubadicError
from .pipeline import SCHEMA, describe_branch, jsonable, pipeline
from .recognition import DEFAULT_LMAX
from .returns import induce, left_proper_power, return_words, tower_partition
from .star import language_equality, star_decomposition, verify_candidate_star, verify_star_identities
from .words import DEFAULT_BUDGET, fixed_point, load_substitution


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, ensure_ascii=False) + "\n"


def _opts(args) -> dict:
    return {"budget": getattr(args, "budget", DEFAULT_BUDGET), "lmax": getattr(args, "lmax", DEFAULT_LMAX),
            "seed": getattr(args, "seed", 0)}


# subcommands; each returns (report, exit code)

def cmd_analyze(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    cand = load_substitution(args.candidate_star) if args.candidate_star else None
    rep = pipeline(tau, candidate=cand, budget=o["budget"], lmax=o["lmax"], depth=args.depth,
                   steps=args.steps, seed=o["seed"])
    code = {"ok": 0, "stopped": 3, "failed": 5}[rep["status"]]
    return rep, code


def cmd_branch_points(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    res = branch_points(tau, budget=o["budget"])
    traces = []
    for tr in res["traces"]:
        traces.append({"A1": [tau.symbols[a] for a in sorted(tr.A1)], "status": tr.status,
                       "start": tr.start, "period": tr.period,
                       "fizzle_step": tr.fizzle_step, "fizzle_reason": tr.fizzle_reason,
                       "s": [tau.show(st.s) for st in tr.steps]})
    rep = {"schema": SCHEMA, "command": "branch-points", "l_cmp": res["l_cmp"],
           "branch_points": [describe_branch(tau, bp) for bp in res["points"]],
           "fixed_points": [{"point": fp.describe(), "preimages": c,
                             "letters": [tau.symbols[a] for a in ls]} for fp, c, ls in res["fixed_points"]],
           "traces": traces, "comparisons": res["comparisons"]}
    return rep, 0


def cmd_quasi(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    q = quasi_invertibility(tau, budget=o["budget"])
    rep = {"schema": SCHEMA, "command": "quasi-invertible", "quasi_invertible": q.is_quasi_invertible,
           "M": q.M if q.is_quasi_invertible else None, "reason": q.reason, "l_cmp": q.evidence["l_cmp"],
           "branch_points": [describe_branch(tau, bp) for bp in q.points]}
    return rep, 0


def cmd_tau_star(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    rep = {"schema": SCHEMA, "command": "tau-star"}
    if args.candidate_star:
        cand = load_substitution(args.candidate_star)
        q = quasi_invertibility(tau, budget=o["budget"])
        if q.branch is None:
            raise GateError(f"no unique branch point to fix: {q.reason}")
        chk = verify_candidate_star(tau, cand, q.branch.limit, budget=o["budget"])
        rep.update(candidate=str(cand), verification=chk)
        ok = chk["fixes_branch_point"] and chk["left_proper"] and chk["language"].get("equal") is not False
        return rep, 0 if ok else 3
    sd = star_decomposition(tau)
    ids = verify_star_identities(sd.base, sd.star, sd.s1, seed=o["seed"], budget=o["budget"])
    rep.update(power=sd.power, s1=tau.show(sd.s1), star=str(sd.star), star_text=sd.star.to_text(),
               identities=ids, language=language_equality(tau, sd.star, args.ell, o["budget"]))
    return rep, 0 if ids["ok"] else 5


def cmd_induce(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    base = tau.word(args.base) if args.base else None
    rs = return_words(tau, base=base, budget=o["budget"])
    tau1 = induce(tau, rs)
    k = left_proper_power(tau1, len(rs.R) + 1)
    rep = {"schema": SCHEMA, "command": "induce", "base": tau.show(rs.base),
           "return_words": rs.show(), "certified": rs.certified, "window": rs.window,
           "tau1": str(tau1), "left_proper_power": k}
    if k:
        work = tau1.power(k) if k > 1 else tau1
        q = quasi_invertibility(work, budget=o["budget"])
        rep.update(analysed=str(work), quasi_invertible=q.is_quasi_invertible,
                   M=q.M if q.is_quasi_invertible else None,
                   branch_points=[describe_branch(work, bp) for bp in q.points])
    tp = tower_partition(tau, rs.base, ell=args.ell, budget=o["budget"])
    rep["tower"] = {"heights": {str(j + 1): h for j, h in tp.heights.items()}, "covers": tp.covers,
                    "disjoint": tp.disjoint, "ell": tp.word_length}
    return rep, 0


def cmd_bratteli(args):
    tau = load_substitution(args.file)
    B = bt.from_substitution(tau)
    if args.dot:
        write_atomic(args.dot, bt.to_dot(B, args.depth))
    rep = {"schema": SCHEMA, "command": "bratteli", "diagram": bt.to_json(B, args.depth),
           "extremal": bt.extremal_paths(B), "path_counts": B.path_count(args.depth)}
    return rep, 0


def cmd_vershik(args):
    tau = load_substitution(args.file)
    B = bt.from_substitution(tau)
    orbit = bt.vershik_orbit(B, args.depth)
    rep = {"schema": SCHEMA, "command": "vershik-orbit", "depth": args.depth, "total": len(orbit),
           "distinct": len(set(orbit)), "paths": sum(B.path_count(args.depth)),
           "orbit": [p.show(B) for p in orbit[:args.steps]]}
    return rep, 0


def cmd_verify(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    cand = load_substitution(args.candidate_star) if args.candidate_star else None
    rep = pipeline(tau, candidate=cand, budget=o["budget"], lmax=o["lmax"], depth=args.depth,
                   steps=args.steps, seed=o["seed"])
    if rep["status"] == "stopped":
        raise GateError(f"{rep['failed_stage']}: {rep['reason']}")
    out = {"schema": SCHEMA, "command": "verify-conjugacy", "route": rep["route"],
           "model": rep["model"], "tower_edges_added": rep["tower_edges_added"],
           "conjugacy": rep["conjugacy"]}
    return out, 0 if rep["conjugacy"]["commutes"] else 5


def cmd_code(args):
    o = _opts(args)
    tau = load_substitution(args.file)
    rule = load_rule(args.rule, tau)
    u = fixed_point(tau)
    img = coded_prefix(rule, u, args.length, o["budget"])
    inj = injectivity_check(rule, tau, args.ell, o["budget"])
    deg = image_branch_degrees(rule, tau, [img], o["budget"])[0]
    pts = [{"point": "Phi(u)", **deg}]
    for c in deg["letters"]:
        d2 = image_branch_degrees(rule, tau, [(c,) + img[:-1]], o["budget"])[0]
        pts.append({"point": f"{c} Phi(u)", **d2})
    rep = {"schema": SCHEMA, "command": "code", "image_prefix": list(img), "injectivity": inj,
           "branch_degrees": pts}
    return rep, 0


def cmd_gen(args):
    if args.family == "rank-one":
        if not args.n:
            raise InvalidInput("gen rank-one needs --n")
        sub = rank_one(args.n, args.m or [])
    else:
        if args.d is None or args.lam is None:
            raise InvalidInput("gen perron needs --d and --lam")
        sub = perron_construct(args.d, args.lam, args.power)
    text = sub.to_text()
    if args.out:
        write_atomic(args.out, text)
    rep = {"schema": SCHEMA, "command": "gen", "family": args.family, "substitution": text.splitlines()}
    return rep, 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help=f"work budget in symbols (default {DEFAULT_BUDGET})")
    common.add_argument("--lmax", type=int, default=argparse.SUPPRESS,
                        help=f"largest recognizability window (default {DEFAULT_LMAX})")
    common.add_argument("--json", metavar="OUT", default=argparse.SUPPRESS, help="write the report here")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="sampling seed")

    p = argparse.ArgumentParser(prog="subadic", parents=[common],
                                description="Analyse one-sided substitution subshifts.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, file=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if file:
            sp.add_argument("file", help="substitution file")
        sp.set_defaults(func=fn)
        return sp

    sp = add("analyze", cmd_analyze, "full pipeline")
    sp.add_argument("--candidate-star", metavar="FILE")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--steps", type=int, default=200)
    add("branch-points", cmd_branch_points, "suffix traces and branch points")
    add("quasi-invertible", cmd_quasi, "unique branch point test")
    sp = add("tau-star", cmd_tau_star, "construct or verify tau*")
    sp.add_argument("--candidate-star", metavar="FILE")
    sp.add_argument("--ell", type=int, default=20)
    sp = add("induce", cmd_induce, "return words and tau1")
    sp.add_argument("--base", metavar="WORD")
    sp.add_argument("--ell", type=int, default=16)
    sp = add("bratteli", cmd_bratteli, "stationary ordered Bratteli diagram")
    sp.add_argument("--dot", metavar="FILE")
    sp.add_argument("--depth", type=int, default=3)
    sp = add("vershik-orbit", cmd_vershik, "successor orbit on truncations")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp = add("verify-conjugacy", cmd_verify, "orbit replay against the adic model")
    sp.add_argument("--candidate-star", metavar="FILE")
    sp.add_argument("--depth", type=int, default=5)
    sp.add_argument("--steps", type=int, default=500)
    sp = add("code", cmd_code, "sliding block code")
    sp.add_argument("--rule", required=True, metavar="FILE")
    sp.add_argument("--ell", type=int, default=12)
    sp.add_argument("--length", type=int, default=24)
    sp = add("gen", cmd_gen, "generate rank-one or Perron substitutions", file=False)
    sp.add_argument("family", choices=["rank-one", "perron"])
    sp.add_argument("--n", type=int, nargs="+")
    sp.add_argument("--m", type=int, nargs="*")
    sp.add_argument("--d", type=int)
    sp.add_argument("--lam", type=int)
    sp.add_argument("--power", type=int, default=1, help="exponent m of lambda")
    sp.add_argument("--out", metavar="FILE")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except SubadicError as e:
        print(f"subadic: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except RecursionError as e:
        print(f"subadic: internal error: {e}", file=sys.stderr)
        return 5
    text = dump(report)
    out = getattr(args, "json", None)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
