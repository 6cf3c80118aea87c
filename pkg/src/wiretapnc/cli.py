"""Command-line front end: ``wiretapnc <command> [options]``.

Exit codes: 0 success, 2 bad input, 3 numerical failure (LP status or
code construction), 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import coding, entropy, flow, hardness, strategies
from . import lp as lpm
from .network import (DEFAULT_SET_CAP, FIXTURES, EnumerationTooLarge, NetworkError, format_rational,
                      parse_network, serialize_network, sort_ids)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CAP = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (frozenset, set)):
        return sort_ids(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(_jsonable(payload), indent=2) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _read_text(path: str, suffix: str) -> str:
    """File contents, or a shipped fixture when ``path`` names one (e.g. ``fig4.net``)."""
    p = Path(path)
    if p.exists():
        return p.read_text()
    stem = p.name[: -len(suffix)] if p.name.endswith(suffix) else p.name
    res = resources.files("wiretapnc.data").joinpath(stem + suffix)
    if res.is_file():
        return res.read_text()
    raise CliError(f"no such file: {path}")


def _load_net(args):
    if not args.net:
        raise CliError("--net is required")
    return parse_network(_read_text(args.net, ".net"))


def _fmt_set(s) -> str:
    return "{" + ", ".join(sort_ids(s)) + "}"


# -- commands ------------------------------------------------------------------


def cmd_bound(args):
    net, coll = _load_net(args)
    res = flow.cut_set_bound(net, coll, args.cap, args.parallel)
    _emit(args, {"cut_set_bound": res.value, "wiretap_set": res.wiretap_set, "cut": list(res.cut.links)},
          f"{format_rational(res.value)}\nwitness {_fmt_set(res.wiretap_set)}")


def _rate_payload(sol) -> dict:
    out = {"rate": sol.R_s, "status": sol.status, "z": sol.z}
    if isinstance(sol, strategies.Strategy1Solution):
        out["u_mode"] = sol.u_mode
        out["key_rate"] = sol.R_w
        out["U"] = {strategies.set_label(A): u for A, u in zip(sol.sets, sol.U)}
    else:
        out["key_rates"] = {v: r for v, r in sol.R_w.items() if r}
    return out


def cmd_strat1(args):
    net, coll = _load_net(args)
    mode = {"sum": strategies.SUM_Z, "static": strategies.STATIC_MINCUT}[args.umode]
    sol = strategies.strategy1_rate(net, coll, mode, exact=not args.float, cap=args.cap)
    _emit(args, _rate_payload(sol), _num(sol.R_s))


def cmd_strat2(args):
    net, coll = _load_net(args)
    sol = strategies.strategy2_rate(net, coll, exact=not args.float, cap=args.cap)
    _emit(args, _rate_payload(sol), _num(sol.R_s))


def cmd_globalkey(args):
    net, coll = _load_net(args)
    sol = strategies.global_key_rate(net, coll, exact=not args.float, cap=args.cap)
    _emit(args, _rate_payload(sol), _num(sol.R_s))


def _num(v) -> str:
    return format_rational(v) if isinstance(v, Fraction) else f"{v:.6f}"


def cmd_report(args):
    net, coll = _load_net(args)
    rep = strategies.best_achievable(net, coll, exact=not args.float, cap=args.cap)
    lines = [f"{k:<24}{_num(v)}" for k, v in rep["rates"].items()]
    lines += [f"{'best':<24}{_num(rep['best'])} ({rep['best_strategy']})",
              f"{'cut_set_bound':<24}{_num(rep['cut_set_bound'])} witness {_fmt_set(rep['bound_witness'])}",
              f"{'gap':<24}{'none' if rep['tight'] else _num(rep['cut_set_bound'] - rep['best'])}"]
    _emit(args, rep, "\n".join(lines))


def _parse_keys(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        node, _, n = part.partition(":")
        if not n.isdigit():
            raise CliError(f"bad key spec {part!r}; expected node:count")
        out[node] = int(n)
    return out


def cmd_codegen(args):
    net, coll = _load_net(args)
    if args.strategy == "1":
        sol = strategies.strategy1_rate(net, coll, strategies.SUM_Z, cap=args.cap)
        code = coding.realize_strategy1(net, sol, q=args.field, seed=args.seed).code
    elif args.strategy == "2":
        sol = strategies.strategy2_rate(net, coll, cap=args.cap)
        code = coding.realize_strategy2(net, sol, q=args.field, seed=args.seed)
    else:
        if not args.field:
            raise CliError("--strategy search needs --field")
        code = coding.search_secure_code(net, coll, args.rate, _parse_keys(args.keys), args.field,
                                         seed=args.seed, tries=args.tries, cap=args.cap)
    verdict = coding.verify_code(code, net, coll, args.cap)
    text = coding.code_to_json(code)
    if args.out:
        Path(args.out).write_text(text + "\n")
    summary = {"field": code.q, "message_dim": code.message_dim, "scale": code.scale,
               "decodable": verdict.decodable, "secret": verdict.secret, "out": args.out}
    _emit(args, summary if args.out else json.loads(text),
          text if not args.out else f"GF({code.q}) code with {code.message_dim} message symbols "
          f"(scale {format_rational(code.scale)}): decodable={verdict.decodable} secret={verdict.secret}")


def _load_code(args):
    if not args.code:
        raise CliError("--code is required")
    try:
        return coding.code_from_json(_read_text(args.code, ".code.json"))
    except (KeyError, json.JSONDecodeError) as e:
        raise CliError(f"malformed code file: {e}") from None


def cmd_verify(args):
    net, coll = _load_net(args)
    code = _load_code(args)
    v = coding.verify_code(code, net, coll, args.cap)
    rows = [{"set": s.wiretap_set, "rank": s.rank, "key_rank": s.key_rank, "secret": s.secret} for s in v.sets]
    lines = [f"decodable {v.decodable}", f"secret {v.secret}"]
    lines += [f"  {_fmt_set(r['set'])} rank={r['rank']} key_rank={r['key_rank']} secret={r['secret']}" for r in rows]
    _emit(args, {"decodable": v.decodable, "secret": v.secret, "sets": rows}, "\n".join(lines))
    return EXIT_OK


def cmd_oracle(args):
    code = _load_code(args)
    if not args.links:
        raise CliError("--links is required")
    links = [l.strip() for l in args.links.split(",") if l.strip()]
    rep = coding.mutual_information_oracle(code, links, cap=args.oracle_cap)
    payload = {"links": links, "independent": rep.independent, "mutual_information_bits": rep.mutual_information_bits,
               "mutual_information_symbols": rep.mutual_information_symbols,
               "conditional_entropy_symbols": rep.conditional_entropy_symbols, "assignments": rep.assignments}
    sym = "?" if rep.mutual_information_symbols is None else format_rational(rep.mutual_information_symbols)
    cond = "?" if rep.conditional_entropy_symbols is None else format_rational(rep.conditional_entropy_symbols)
    _emit(args, payload, f"I = {sym} symbols ({rep.mutual_information_bits:.6f} bits)\n"
          f"H(obs | message) = {cond} symbols\nindependent {rep.independent}")


def cmd_prove(args):
    if not args.sys:
        raise CliError("--sys is required")
    try:
        system = entropy.parse_constraints(_read_text(args.sys, ".ent"))
    except entropy.DSLSyntaxError as e:
        raise CliError(f"{args.sys}: {e}") from None
    if args.drop:
        system = system.without(args.drop)
    res = entropy.prove_bound(system, exact=not args.no_exact, tolerance=args.tol)
    if not res.optimal:
        raise CliError(f"LP status {res.status}", EXIT_NUMERIC)
    exact = res.exact_optimum
    tail = f" (= {format_rational(exact)} exact-verified)" if exact is not None else " (not exact-verified)"
    resid = {k: v for k, v in res.residuals.items() if isinstance(v, float)}
    _emit(args, {"optimum": res.optimum, "exact_optimum": exact, "constraints": res.num_constraints,
                 "residuals": res.residuals},
          f"optimum {res.optimum:.6f}{tail}" + "".join(f"\n{k} {v:.3g}" for k, v in resid.items()))


def _load_graph(args):
    if not args.graph:
        raise CliError("--graph is required")
    try:
        return hardness.parse_graph(_read_text(args.graph, ".graph"))
    except hardness.GraphError as e:
        raise CliError(str(e)) from None


def cmd_reduce(args):
    g = _load_graph(args)
    if args.r is None:
        raise CliError("--r is required")
    try:
        inst = hardness.clique_to_network(g, args.r)
    except hardness.GraphError as e:
        raise CliError(str(e)) from None
    if args.subdivide:
        inst = hardness.subdivide_instance(inst)
    text = serialize_network(inst.network, inst.wiretap())
    if args.out:
        Path(args.out).write_text(text)
    payload = {"k": inst.k, "A1": list(inst.A1), "A2": list(inst.A2), "A3": list(inst.A3),
               "network": text, "subdivided": inst.subdivided}
    _emit(args, payload, text if not args.out else f"wrote {args.out} (k={inst.k})")


def cmd_sweep(args):
    rows = hardness.sweep(args.max_vertices, labeled=args.labeled)
    count = lambda f: sum(1 for r in rows if f(r))  # noqa: E731
    summary = {
        "instances": len(rows),
        "clique_vs_lemma1_mismatches": count(lambda r: r.clique != r.lemma1),
        "clique_vs_bound_ge_r_mismatches": count(lambda r: r.clique != r.bound_at_least_r),
        "clique_vs_bound_eq_r_mismatches": count(lambda r: r.clique != r.bound_equals_r),
        "degree_fact_failures": count(lambda r: not r.degree_ok),
        "strategy1_cut_failures": count(lambda r: not r.strategy1_ok),
    }
    _emit(args, summary, "\n".join(f"{k:<36}{v}" for k, v in summary.items()))


def cmd_fixture(args):
    names = {f"{n}.net" for n in FIXTURES} | {"fig4.ent", "fig4.code.json"}
    if args.name not in names and f"{args.name}.net" in names:
        args.name += ".net"
    if args.name not in names:
        raise CliError(f"unknown fixture {args.name!r}; choose from {', '.join(sorted(names))}")
    text = resources.files("wiretapnc.data").joinpath(args.name).read_text()
    if args.out:
        target = Path(args.out)
        if target.is_dir():
            target = target / args.name
        target.write_text(text)
        _emit(args, {"written": str(target)}, f"wrote {target}")
    else:
        sys.stdout.write(text)


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--cap", type=int, default=DEFAULT_SET_CAP, help="wiretap-set enumeration cap (default 10^6)")
    common.add_argument("--parallel", type=int, default=None, metavar="N", help="worker processes for per-set work")

    net = argparse.ArgumentParser(add_help=False)
    net.add_argument("--net", help="network file (or a shipped fixture name such as fig4.net)")
    net.add_argument("--float", action="store_true", help="solve LPs in floating point (HiGHS)")

    parser = argparse.ArgumentParser(prog="wiretapnc", description="Secure network coding toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common, net], help="cut-set bound and worst wiretap set")
    p.set_defaults(func=cmd_bound)
    p = sub.add_parser("strat1", parents=[common, net], help="key-cancelation LP rate")
    p.add_argument("--umode", choices=["sum", "static"], default="sum")
    p.set_defaults(func=cmd_strat1)
    p = sub.add_parser("strat2", parents=[common, net], help="local-key LP rate")
    p.set_defaults(func=cmd_strat2)
    p = sub.add_parser("globalkey", parents=[common, net], help="source-key LP rate")
    p.set_defaults(func=cmd_globalkey)
    p = sub.add_parser("report", parents=[common, net], help="all rates next to the cut-set bound")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("codegen", parents=[common, net], help="construct and verify a secure linear code")
    p.add_argument("--strategy", choices=["1", "2", "search"], default="1")
    p.add_argument("--field", type=int, default=None, metavar="Q", help="prime field size (default: automatic)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate", type=int, default=1, help="message symbols for --strategy search")
    p.add_argument("--keys", default="", help="key symbols per node for search, e.g. s:2,a:1")
    p.add_argument("--tries", type=int, default=20000)
    p.add_argument("--out", help="write the code as JSON here")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("verify", parents=[common, net], help="rank-check a code against a network")
    p.add_argument("--code", help="code JSON (or fig4.code.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive mutual information of tapped links")
    p.add_argument("--code", help="code JSON")
    p.add_argument("--links", help="comma-separated link ids")
    p.add_argument("--oracle-cap", type=int, default=coding.DEFAULT_ORACLE_CAP, help="max assignments (default 10^7)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("prove", parents=[common], help="Shannon outer bound for an entropy system")
    p.add_argument("--sys", help="constraint file (or fig4.ent)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--no-exact", action="store_true", help="skip exact re-verification")
    p.add_argument("--drop", nargs="*", default=[], metavar="TAG", help="drop constraints with these tags")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("reduce", parents=[common], help="clique instance to network")
    p.add_argument("--graph", help="graph file (vertex/edge lines)")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--subdivide", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep", parents=[common], help="exhaustive clique/interdiction/secrecy sweep")
    p.add_argument("--max-vertices", type=int, default=5)
    p.add_argument("--labeled", action="store_true", help="all labeled graphs instead of one per isomorphism class")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fixture", parents=[common], help="print or write a shipped fixture")
    p.add_argument("name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixture)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    if getattr(args, "parallel", None) is not None and args.parallel < 1:
        print("error: --parallel must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        args.func(args)
        return EXIT_OK
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except EnumerationTooLarge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (lpm.LPError, coding.ConstructionFailed, OverflowError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NetworkError, coding.CodeError, entropy.EntropyError, hardness.GraphError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
