"""End-to-end analysis: gates, branch points, and an adic model checked on orbits."""
from __future__ import annotations

from typing import Any

from . import bratteli as bt
from .branchpoints import L_CMP, BranchPoint, quasi_invertibility
from .errors import GateError, SubadicError
from .recognition import DEFAULT_LMAX, recognizability_check
from .returns import coded_point, induce, left_proper_power, return_words, tower_partition
from .star import language_equality, star_decomposition, verify_candidate_star, verify_star_identities
from .words import (DEFAULT_BUDGET, LimitWord, Substitution, classify, fixed_point, is_left_proper)

SCHEMA = 1


def jsonable(obj: Any) -> Any:
    """Plain JSON values; tuples become lists, dict keys become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=repr) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, bytes):
        return list(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def describe_branch(tau: Substitution, bp: BranchPoint, show: int = 24) -> dict:
    return {
        "point": bp.describe(),
        "degree": bp.degree,
        "extensions": [tau.symbols[a] for a in bp.extensions],
        "source": bp.source,
        "prefix": tau.show(bp.limit.prefix(show)),
        "fixed_match": bp.fixed_match,
    }


def _same_point(y: LimitWord, z: LimitWord, n: int) -> bool:
    return y.prefix_bytes(n) == z.prefix_bytes(n)


def diagram_summary(B: bt.OrderedBratteli, depth: int = 2) -> dict:
    out = {"levels": [list(B.vertices(n)) for n in range(depth + 1)],
           "level1_indegree": {v: B.indegree(1, a) for a, v in enumerate(B.vertices(1))},
           "level2_edges": [list(e) for e in B.level(2).edges()]}
    if B.cycle:
        ext = bt.extremal_paths(B)
        out.update(max_paths=ext["max_count"], min_paths=ext["min_count"], semi_proper=ext["semi_proper"])
    return out


def quick_induction(tau: Substitution, budget: int = DEFAULT_BUDGET) -> dict:
    """Return-word diagnostics for a tau that failed earlier gates."""
    try:
        rs = return_words(tau, budget=budget)
        tau1 = induce(tau, rs)
        k = left_proper_power(tau1, len(rs.R) + 1)
        work = tau1.power(k) if k and k > 1 else tau1
        q1 = quasi_invertibility(work, budget=budget)
    except SubadicError as e:
        return {"error": str(e)}
    return {
        "return_words": rs.show(),
        "tau1": str(tau1),
        "left_proper_power": k,
        "analysed": str(work),
        "quasi_invertible": q1.is_quasi_invertible,
        "M": q1.M,
        "branch_points": [describe_branch(work, bp) for bp in q1.points],
        "reason": q1.reason,
    }


def _check(B, rho, z, depth, steps, phi1=None, budget=DEFAULT_BUDGET):
    rep = bt.conjugacy_check(B, rho, z, depth, steps, phi1=phi1, budget=budget)
    rep["disagreements"] = rep["disagreements"][:3]
    return rep


def pipeline(tau: Substitution, candidate: Substitution | None = None, budget: int = DEFAULT_BUDGET,
             lmax: int = DEFAULT_LMAX, depth: int = 4, steps: int = 200, seed: int = 0,
             l_cmp: int = L_CMP) -> dict:
    """Run every stage in order; a failed gate stops the run and is named in the report."""
    report: dict[str, Any] = {"schema": SCHEMA, "substitution": tau.to_text().strip().splitlines(),
                              "stages": [], "status": "ok"}

    def stop(stage: str, reason: str):
        report["status"] = "stopped"
        report["failed_stage"] = stage
        report["reason"] = reason
        return report

    # gates
    report["stages"].append("gates")
    try:
        cl = classify(tau, budget=budget)
    except GateError as e:
        report["classify"] = {"error": str(e)}
        return stop("gates", str(e))
    report["classify"] = cl
    if not cl["injectivity"]["injective"]:
        return stop("gates", "tau^k is not injective within the checked bound")
    rec = recognizability_check(tau, L_max=lmax, scan_N=min(budget, 1 << 17), budget=budget)
    report["recognizability"] = rec
    if rec["verdict"] != "recognizable":
        return stop("gates", "not recognizable: witness found")

    # branch points
    report["stages"].append("quasi-invertibility")
    qv = quasi_invertibility(tau, l_cmp=l_cmp, budget=budget)
    report["quasi_invertible"] = qv.is_quasi_invertible
    report["M"] = qv.M if qv.is_quasi_invertible else None
    report["branch_points"] = [describe_branch(tau, bp) for bp in qv.points]
    report["l_cmp"] = qv.evidence["l_cmp"]
    if not qv.is_quasi_invertible:
        report["induction"] = quick_induction(tau, budget)
        return stop("quasi-invertibility", qv.reason)
    y = qv.branch.limit
    u = fixed_point(tau)
    n_cmp = report["l_cmp"]

    # choose a route to a stationary left-proper model
    report["stages"].append("model")
    phi1 = None
    if candidate is not None:
        chk = verify_candidate_star(tau, candidate, y, budget=budget)
        report["candidate_star"] = chk
        if not chk["fixes_branch_point"] or not chk["left_proper"]:
            return stop("model", "candidate tau* does not fix the branch point or is not left proper")
        rho = candidate
        z = LimitWord.fixed_point(rho, rho.images[0][0])
        route = "candidate-star"
    elif is_left_proper(tau) and _same_point(y, u, n_cmp) and u.power == 1:
        rho, z, route = tau, u, "left-proper"
    else:
        try:
            sd = star_decomposition(tau)
        except GateError:
            sd = None
        if sd is not None:
            rho = sd.star
            z = LimitWord.fixed_point(rho, rho.images[0][0])
            route = "tau-star"
            report["tau_star"] = {
                "power": sd.power, "s1": tau.show(sd.s1), "star": str(rho),
                "identities": verify_star_identities(sd.base, rho, sd.s1, seed=seed, budget=budget),
                "language": language_equality(tau, rho, 20, budget),
                "fixes_branch_point": _same_point(z, y, n_cmp),
            }
        else:
            route = "induction"
            res = _induction_route(tau, y, u, report, budget, n_cmp)
            if res is None:
                return report
            rho, z, phi1 = res
    report["route"] = route
    report["model"] = {"rho": str(rho), "left_proper": is_left_proper(rho),
                       "point": z.describe()}

    # diagram and orbit replay
    report["stages"].append("diagram")
    B = bt.from_substitution(rho)
    if phi1 is not None:
        heights = {rho.symbols[j]: len(w) for j, w in enumerate(phi1)}
        labels = {rho.symbols[j]: [tau.symbols[c] for c in w] for j, w in enumerate(phi1)}
        bare = B
        B, added = bt.add_tower_edges(B, heights, labels)
        report["tower_edges_added"] = added
        report["tower_heights"] = heights
        if added:
            bare_rep = _check(bare, rho, z, depth, steps, phi1, budget)
            report["without_tower_edges"] = {"commutes": bare_rep["commutes"],
                                             "invalid_paths": bare_rep["invalid_paths"]}
    else:
        report["tower_edges_added"] = 0
    report["diagram"] = diagram_summary(B)
    report["stages"].append("conjugacy")
    rep = _check(B, rho, z, depth, steps, phi1, budget)
    report["conjugacy"] = rep
    if not rep["commutes"]:
        report["status"] = "failed"
        report["failed_stage"] = "conjugacy"
        report["reason"] = "orbit replay found disagreements"
    return report


def _induction_route(tau, y, u, report, budget, n_cmp):
    rs = return_words(tau, u, budget=budget)
    tau1 = induce(tau, rs)
    info: dict[str, Any] = {"base": tau.show(rs.base), "return_words": rs.show(), "tau1": str(tau1),
                            "certified_window": rs.window if rs.certified else None}
    report["induction"] = info
    if y.prefix(len(rs.base)) != tuple(rs.base):
        report["status"] = "stopped"
        report["failed_stage"] = "model"
        report["reason"] = (f"the branch point is not in [{tau.show(rs.base)}]; "
                            "supply a candidate tau* with --candidate-star")
        return None
    k = left_proper_power(tau1, len(rs.R) + 1)
    info["left_proper_power"] = k
    if k is None:
        report["status"] = "stopped"
        report["failed_stage"] = "model"
        report["reason"] = "no left-proper power of tau1 within the search bound"
        return None
    rho1 = tau1.power(k) if k > 1 else tau1
    q1 = quasi_invertibility(rho1, budget=budget)
    info["analysed"] = str(rho1)
    info["quasi_invertible"] = q1.is_quasi_invertible
    info["M"] = q1.M if q1.is_quasi_invertible else None
    if not q1.is_quasi_invertible:
        report["status"] = "stopped"
        report["failed_stage"] = "model"
        report["reason"] = f"tau1^{k}: {q1.reason}"
        info["branch_points"] = [describe_branch(rho1, bp) for bp in q1.points]
        return None
    d = coded_point(rs)
    z1 = q1.branch.limit
    if _same_point(z1, LimitWord.fixed_point(rho1, rho1.images[0][0]), n_cmp):
        rho = rho1
        info["model"] = "tau1 power"
    else:
        sd = star_decomposition(rho1)
        rho = sd.star
        info["model"] = "tau1 star"
        info["star"] = str(rho)
    z = LimitWord.fixed_point(rho, rho.images[0][0])
    tp = tower_partition(tau, rs.base, ell=12, point=u, budget=budget)
    info["tower"] = {"covers": tp.covers, "disjoint": tp.disjoint, "ell": tp.word_length}
    info["coded_point"] = tau1.show(d.prefix(16))
    return rho, z, rs.R
