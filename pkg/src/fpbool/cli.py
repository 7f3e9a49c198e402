"""Command line interface: reduce, solve, optimize, and problem frontends.

Exit codes: 0 solved/optimal, 20 unsatisfiable/infeasible, 30 unknown,
2 usage error.  All emitted files are byte-stable for a fixed seed and input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .algebra import (
    CyclicElement,
    Ring,
    SparsePoly,
    VarTable,
    cyclic_convolve,
    dumps_canonical,
    poly_from_json,
    poly_to_json,
)
from .encode import COEFF_SUM, SIGNED_RANGE, TERM_COUNT, EncodingContext, decode, full_reduce
from .errors import FpboolError, ParseError
from .optimize import (
    CENTERED,
    INFEASIBLE,
    OPTIMAL,
    STANDARD,
    IntVar,
    StandardProblem,
    qfp_opt,
)
from .problems import (
    LatticeInstance,
    NtruParams,
    binlp_build,
    cvp_build,
    hnf,
    ntru_attack_system,
    ntru_keygen,
    ntru_min_weight,
    ntru_witness,
    pswn_build,
    qubo_build,
    sis_build,
    smallest_solution_build,
    svp_build,
    svp_coeff_bound,
)
from .solver import (
    BACKTRACKING,
    EXHAUSTIVE,
    EXTERNAL,
    BackendConfig,
    confirm_external,
    evaluate,
    export_opb,
    import_solution,
    solve,
)

EXIT_OK = 0
EXIT_UNSAT = 20
EXIT_UNKNOWN = 30
EXIT_USAGE = 2

LIFT_MODES = {"coeffsum": COEFF_SUM, "termcount": TERM_COUNT, "signedrange": SIGNED_RANGE}


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_system(obj):
    """System JSON: {"ring": ..., "vars": [...], "polys": [[{m, c}, ...], ...]}."""
    ring = Ring.from_json(obj["ring"])
    table = VarTable()
    for name in obj.get("vars", []):
        table.get_or_add(name)
    polys = []
    for terms in obj.get("polys", []):
        polys.append(poly_from_json({"terms": terms}, table, ring))
    return ring, table, polys


def _load_problem(obj):
    p = int(obj["p"])
    table = VarTable()
    xvars = [table.get_or_add(n) for n in obj.get("X", [])]
    yvars = []
    for spec in obj.get("Y", []):
        vid = table.get_or_add(spec["name"])
        if "bound" in spec:
            yvars.append(IntVar(vid, 0, int(spec["bound"])))
        else:
            yvars.append(IntVar(vid, int(spec["lo"]), int(spec["hi"])))
    ring = Ring.mod(p)
    eqs = [poly_from_json({"terms": t}, table, ring) for t in obj.get("F", [])]
    from .algebra import ZZ

    ineqs = [
        (poly_from_json({"terms": item["g"]}, table, ZZ), int(item["b"]))
        for item in obj.get("I", [])
    ]
    objective = poly_from_json({"terms": obj.get("o", [])}, table, ZZ)
    return StandardProblem(
        p=p,
        x_vars=xvars,
        y_vars=yvars,
        equalities=eqs,
        inequalities=ineqs,
        objective=objective,
        u=int(obj["u"]),
        representation=obj.get("representation", STANDARD),
        vartab=table,
    )


def _backend_config(args) -> BackendConfig:
    backends = {"exhaustive": EXHAUSTIVE, "backtracking": BACKTRACKING, "external": EXTERNAL}
    if getattr(args, "epsilon", None) is not None:
        print("note: success probability is ignored; backends are exact", file=sys.stderr)
    return BackendConfig(
        backend=backends[args.backend],
        var_limit=args.var_limit,
        time_limit=args.time_limit,
        seed=args.seed,
    )


def _emit_system(sys_obj, vartab, args):
    if args.emit in ("json", "both"):
        _write_text(args.out, dumps_canonical(sys_obj.to_json(vartab)))
    if args.emit in ("opb", "both"):
        text, sidecar = export_opb(sys_obj)
        _write_text(args.opb, text)
        _write_text(args.sidecar, dumps_canonical(sidecar))


def _solution_names(decoded, vartab):
    out = {}
    for vid, value in decoded.items():
        name = vartab.name(vid)
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def _result_json(status, value=None, solution=None, extra=None):
    obj = {"status": status}
    if value is not None:
        obj["value"] = value
    if solution is not None:
        obj["solution"] = solution
    if extra:
        obj.update(extra)
    return obj


def _finish(args, obj, ok_status=("sat", "optimal")):
    text = dumps_canonical(obj)
    if getattr(args, "result", None):
        _write_text(args.result, text)
    sys.stdout.write(text)
    status = obj["status"]
    if status in ok_status:
        return EXIT_OK
    if status in ("unsat", "infeasible"):
        return EXIT_UNSAT
    return EXIT_UNKNOWN


def _write_trace(args, trace):
    if getattr(args, "trace", None):
        lines = [
            dumps_canonical(
                {"alpha": t.alpha, "mu": t.mu, "beta": t.beta, "outcome": t.outcome}
            ).rstrip("\n")
            for t in trace
        ]
        _write_text(args.trace, "\n".join(lines) + ("\n" if lines else ""))


def cmd_reduce(args):
    ring, table, polys = _load_system(_read_json(args.input))
    ctx = EncodingContext(table)
    sys_obj = full_reduce(
        polys,
        ctx,
        centered=args.centered,
        lift_mode=LIFT_MODES[args.lift_mode] if args.lift_mode else None,
    )
    _emit_system(sys_obj, table, args)
    return EXIT_OK


def cmd_solve(args):
    ring, table, polys = _load_system(_read_json(args.input))
    ctx = EncodingContext(table)
    sys_obj = full_reduce(polys, ctx, centered=args.centered)
    out = solve(sys_obj, _backend_config(args))
    if out.is_sat:
        assert all(r == 0 for r in evaluate(sys_obj, out.assignment))
        decoded = decode(sys_obj, out.assignment).decoded
        return _finish(args, _result_json("sat", solution=_solution_names(decoded, table)))
    return _finish(args, _result_json(out.status, extra={"reason": out.reason} if out.reason else None))


def cmd_optimize(args):
    prob = _load_problem(_read_json(args.input))
    res = qfp_opt(prob, _backend_config(args))
    _write_trace(args, res.trace)
    if res.status == OPTIMAL:
        merged = {**res.x_values, **res.y_values}
        assert prob.objective.evaluate(merged) == res.value
        return _finish(
            args,
            _result_json("optimal", res.value, _solution_names(merged, prob.vartab)),
        )
    return _finish(args, _result_json(res.status))


def _run_optimizer(args, prob, vartab, unshift=None, extra_solution=None):
    res = qfp_opt(prob, _backend_config(args))
    _write_trace(args, res.trace)
    if res.status == OPTIMAL:
        merged = {**res.x_values, **res.y_values}
        value = res.value if unshift is None else unshift(res.value)
        solution = _solution_names(merged, vartab)
        if extra_solution:
            solution.update(extra_solution(merged))
        return _finish(args, _result_json("optimal", value, solution))
    return _finish(args, _result_json(res.status))


def cmd_pswn(args):
    ring, table, polys = _load_system(_read_json(args.input))
    prob = pswn_build(polys, table)
    return _run_optimizer(args, prob, table)


def _read_matrix(path):
    if path.endswith(".json"):
        return _read_json(path)
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(tok) for tok in line.split()])
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("matrix rows must be non-empty and of equal length")
    return {"basis": rows}


def cmd_sis(args):
    obj = _read_matrix(args.input)
    A = obj["basis"] if "basis" in obj else obj
    inst = sis_build(A, args.p, b=args.bound, b_sq=args.bound_sq)
    out = solve(inst.system, _backend_config(args))
    if out.is_sat:
        decoded = decode(inst.system, out.assignment).decoded
        sol = {inst.ctx.vartab.name(v): decoded[v] for v in inst.x_vars}
        norm = sum(x * x for x in sol.values())
        return _finish(args, _result_json("sat", norm, sol))
    return _finish(args, _result_json(out.status))


def cmd_minsol(args):
    obj = _read_matrix(args.input)
    A = obj["basis"] if "basis" in obj else obj
    prob = smallest_solution_build(A, args.p)
    return _run_optimizer(args, prob, prob.vartab, unshift=lambda v: v + 1)


def _lattice_instance(args, need_target=False):
    obj = _read_matrix(args.input)
    basis = obj["basis"]
    target = obj.get("target")
    if args.target:
        target = [int(t) for t in args.target.split(",")]
    if need_target and target is None:
        raise ParseError("closest-vector search needs a target")
    return LatticeInstance(basis, target=target, coeff_bound=args.coeff_bound)


def cmd_svp(args):
    L = _lattice_instance(args)
    lp = svp_build(L)
    print(f"coefficient box: [-{lp.coeff_bound}, {lp.coeff_bound}]", file=sys.stderr)
    print(f"worst-case coefficient bound: {svp_coeff_bound(L.basis)}", file=sys.stderr)

    def vec(merged):
        return {"vector": [merged[v] for v in lp.v_vars]}

    return _run_optimizer(args, lp.problem, lp.problem.vartab, unshift=lambda v: v + 1, extra_solution=vec)


def cmd_cvp(args):
    L = _lattice_instance(args, need_target=True)
    lp = cvp_build(L)

    def vec(merged):
        return {"vector": [merged[v] for v in lp.v_vars]}

    return _run_optimizer(args, lp.problem, lp.problem.vartab, extra_solution=vec)


def cmd_hnf(args):
    obj = _read_matrix(args.input)
    res = hnf(obj["basis"])
    out = {"H": res.H, "E": res.E, "pivots": res.pivots, "detE": res.det_e}
    _write_text(args.out, dumps_canonical(out))
    return EXIT_OK


def cmd_qubo(args):
    obj = _read_json(args.input)
    sp = qubo_build(obj["Q"])
    return _run_optimizer(args, sp.problem, sp.problem.vartab, unshift=sp.unshift)


def cmd_binlp(args):
    obj = _read_json(args.input)
    sp = binlp_build(obj["c"], obj["A"], obj["h"])
    return _run_optimizer(args, sp.problem, sp.problem.vartab, unshift=sp.unshift)


def cmd_ntru_gen(args):
    params = NtruParams(N=args.N, p=args.p, q=args.q, d_f=args.df, d_g=args.dg)
    key = ntru_keygen(params, random.Random(args.seed))
    obj = {
        "params": {"N": args.N, "p": args.p, "q": args.q, "df": args.df, "dg": args.dg},
        "h": list(key.h.coeffs),
        "secret": {
            "f": key.f,
            "g": key.g,
            "fp": list(key.f_p.coeffs),
            "fq": list(key.f_q.coeffs),
        },
    }
    _write_text(args.out, dumps_canonical(obj))
    return EXIT_OK


def _load_ntru(path):
    obj = _read_json(path)
    ps = obj["params"]
    params = NtruParams(
        N=int(ps["N"]),
        p=int(ps["p"]),
        q=int(ps["q"]),
        d_f=int(ps["df"]),
        d_g=int(ps["dg"]),
        h=CyclicElement(int(ps["q"]), obj["h"]),
    )
    return params, obj


def cmd_ntru_attack(args):
    params, obj = _load_ntru(args.params)
    attack = ntru_attack_system(params)
    if args.emit:
        _emit_system(attack.system, attack.ctx.vartab, args)
    if not args.solve:
        return EXIT_OK
    out = solve(attack.system, _backend_config(args))
    if out.is_sat:
        f, g = attack.decode_key(out.assignment)
        hf = cyclic_convolve(params.h, CyclicElement(params.q, f))
        assert list(hf.coeffs) == [c % params.q for c in g]
        return _finish(args, _result_json("sat", solution={"f": f, "g": g}))
    return _finish(args, _result_json(out.status))


def cmd_ntru_check(args):
    params, obj = _load_ntru(args.params)
    secret = obj.get("secret")
    if not secret:
        print("fixture file has no secret key material", file=sys.stderr)
        return EXIT_USAGE
    from .problems import NtruKey

    key = NtruKey(
        f=[int(c) for c in secret["f"]],
        g=[int(c) for c in secret["g"]],
        h=params.h,
        f_p=CyclicElement(params.p, secret["fp"]),
        f_q=CyclicElement(params.q, secret["fq"]),
    )
    attack = ntru_attack_system(params)
    w = ntru_witness(attack, key)
    residuals = evaluate(attack.system, w)
    if all(r == 0 for r in residuals):
        print("witness satisfies the key recovery system")
        return EXIT_OK
    print(f"witness FAILS: {sum(1 for r in residuals if r)} nonzero residuals")
    return EXIT_UNSAT


def cmd_import(args):
    ring, table, polys = _load_system(_read_json(args.input))
    ctx = EncodingContext(table)
    sys_obj = full_reduce(polys, ctx, centered=args.centered)
    sidecar = _read_json(args.sidecar)
    with open(args.solution) as fh:
        vline = next(line for line in fh if line.startswith("v"))
    assignment = confirm_external(sys_obj, import_solution(vline.strip(), sidecar))
    decoded = decode(sys_obj, assignment).decoded
    return _finish(args, _result_json("sat", solution=_solution_names(decoded, table)))


def _add_backend_flags(sp):
    sp.add_argument("--backend", choices=["exhaustive", "backtracking", "external"], default="backtracking")
    sp.add_argument("--var-limit", type=int, default=30)
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--epsilon", type=float, default=None, help="accepted and ignored; backends are exact")
    sp.add_argument("--result", help="also write the result JSON to this path")


def _add_emit_flags(sp):
    sp.add_argument("--emit", choices=["json", "opb", "both"], default="json")
    sp.add_argument("--out", default="-", help="system JSON path ('-' for stdout)")
    sp.add_argument("--opb", default="system.opb")
    sp.add_argument("--sidecar", default="system.sidecar.json")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="fpbool",
        description="Reduce polynomial systems over finite fields to Boolean systems, "
        "solve them, and optimize bounded objectives by bisection.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("reduce", help="system JSON to Boolean system JSON and/or OPB")
    rp.add_argument("--in", dest="input", required=True)
    rp.add_argument("--centered", action="store_true")
    rp.add_argument("--lift-mode", choices=sorted(LIFT_MODES), default=None)
    _add_emit_flags(rp)
    rp.set_defaults(func=cmd_reduce)

    spv = sub.add_parser("solve", help="solve a system over F_q end to end")
    spv.add_argument("--in", dest="input", required=True)
    spv.add_argument("--centered", action="store_true")
    _add_backend_flags(spv)
    spv.set_defaults(func=cmd_solve)

    op = sub.add_parser("optimize", help="minimize a standard problem JSON")
    op.add_argument("--in", dest="input", required=True)
    op.add_argument("--trace", help="write per-iteration JSON lines here")
    _add_backend_flags(op)
    op.set_defaults(func=cmd_optimize)

    pw = sub.add_parser("pswn", help="minimize the number of violated equations")
    pw.add_argument("--in", dest="input", required=True)
    pw.add_argument("--trace")
    _add_backend_flags(pw)
    pw.set_defaults(func=cmd_pswn)

    si = sub.add_parser("sis", help="short nonzero solution of A X = 0 mod p")
    si.add_argument("--in", dest="input", required=True)
    si.add_argument("--p", type=int, required=True)
    si.add_argument("--bound", type=int, default=None)
    si.add_argument("--bound-sq", type=int, default=None)
    _add_backend_flags(si)
    si.set_defaults(func=cmd_sis)

    ms = sub.add_parser("minsol", help="smallest nonzero solution of A X = 0 mod p")
    ms.add_argument("--in", dest="input", required=True)
    ms.add_argument("--p", type=int, required=True)
    ms.add_argument("--trace")
    _add_backend_flags(ms)
    ms.set_defaults(func=cmd_minsol)

    sv = sub.add_parser("svp", help="shortest nonzero lattice vector")
    sv.add_argument("--in", dest="input", required=True)
    sv.add_argument("--coeff-bound", type=int, default=None)
    sv.add_argument("--target", default=None, help=argparse.SUPPRESS)
    sv.add_argument("--trace")
    _add_backend_flags(sv)
    sv.set_defaults(func=cmd_svp)

    cv = sub.add_parser("cvp", help="lattice vector closest to a target")
    cv.add_argument("--in", dest="input", required=True)
    cv.add_argument("--coeff-bound", type=int, default=None)
    cv.add_argument("--target", default=None, help="comma separated integers")
    cv.add_argument("--trace")
    _add_backend_flags(cv)
    cv.set_defaults(func=cmd_cvp)

    hn = sub.add_parser("hnf", help="Hermite normal form of an integer matrix")
    hn.add_argument("--in", dest="input", required=True)
    hn.add_argument("--out", default="-")
    hn.set_defaults(func=cmd_hnf)

    qb = sub.add_parser("qubo", help="minimize y^T Q y over 0/1 vectors")
    qb.add_argument("--in", dest="input", required=True)
    qb.add_argument("--trace")
    _add_backend_flags(qb)
    qb.set_defaults(func=cmd_qubo)

    bl = sub.add_parser("binlp", help="0/1 linear program")
    bl.add_argument("--in", dest="input", required=True)
    bl.add_argument("--trace")
    _add_backend_flags(bl)
    bl.set_defaults(func=cmd_binlp)

    im = sub.add_parser("import", help="verify and decode an external PB solution")
    im.add_argument("--in", dest="input", required=True)
    im.add_argument("--sidecar", required=True)
    im.add_argument("--solution", required=True)
    im.add_argument("--centered", action="store_true")
    im.add_argument("--result")
    im.set_defaults(func=cmd_import)

    nt = sub.add_parser("ntru", help="key recovery fixtures and attack systems")
    ntsub = nt.add_subparsers(dest="ntru_command", required=True)

    ng = ntsub.add_parser("gen", help="generate a seeded key fixture")
    ng.add_argument("--N", type=int, required=True)
    ng.add_argument("--p", type=int, default=3)
    ng.add_argument("--q", type=int, required=True)
    ng.add_argument("--df", type=int, required=True)
    ng.add_argument("--dg", type=int, required=True)
    ng.add_argument("--seed", type=int, default=1)
    ng.add_argument("--out", default="-")
    ng.set_defaults(func=cmd_ntru_gen)

    na = ntsub.add_parser("attack", help="emit and optionally solve the recovery system")
    na.add_argument("--params", required=True)
    na.add_argument("--solve", action="store_true")
    na.add_argument("--emit", choices=["json", "opb", "both"], default=None)
    na.add_argument("--out", default="-")
    na.add_argument("--opb", default="ntru.opb")
    na.add_argument("--sidecar", default="ntru.sidecar.json")
    _add_backend_flags(na)
    na.set_defaults(func=cmd_ntru_attack)

    nc = ntsub.add_parser("check", help="verify a fixture key against its system")
    nc.add_argument("--params", required=True)
    nc.set_defaults(func=cmd_ntru_check)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except FpboolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
