"""Command-line entry point.

Exit codes: 0 all requested checks passed, 1 a check failed, 2 usage or
input error, 3 a resource guard was hit (including inconclusive searches).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .entropy import (
    EdgeDistribution,
    check_ratio_constraints,
    conditional_entropy,
    density_value,
    joint_entropy,
    ratio_sequence,
    read_weights,
)
from .errors import DEFAULT_NODE_BUDGET, ResourceLimitError, SearchBudgetExceeded, env_budget
from .hypergraph import Hypergraph, IntPartition, corollary_hom_map, find_homomorphism, tent_lambda, tent_two_part
from .inequality import (
    ConstraintSystem,
    YVector,
    chain_bound,
    is_feasible,
    optimize_product,
    product_bound,
    tightness_probe,
)
from .partition import SCHEMA_VERSION, PartitionCertificate, greedy_partition, verify_partition
from .reproduce import run_all
from .threshold import format_table, t_of_k, threshold_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rational(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else f"{x.numerator}/1"
    return x


def _emit(payload: dict, fmt: str, text: str | None = None):
    if fmt == "json" or text is None:
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        print(json.dumps(payload, indent=2, sort_keys=True, default=_rational))
    else:
        print(text)


# -- subcommands ----------------------------------------------------------


def cmd_table(args) -> int:
    if not 2 <= args.k_from <= args.k_to:
        raise UsageError("need 2 <= --from <= --to")
    rows = threshold_table(args.k_from, args.k_to)
    _emit({"rows": [r.as_dict() for r in rows]}, args.format, format_table(rows))
    return EXIT_OK if all(r.t <= r.ceil_k_over_e for r in rows) else EXIT_FAIL


def cmd_partition(args) -> int:
    if args.verify:
        cert = PartitionCertificate.from_json(Path(args.verify).read_text())
        problems = verify_partition(cert)
        if args.k is not None and args.k != cert.k:
            problems.insert(0, f"certificate has k={cert.k}, expected {args.k}")
        text = "ok" if not problems else "\n".join(problems)
        _emit({"k": cert.k, "ok": not problems, "violations": problems}, args.format, text)
        return EXIT_FAIL if problems else EXIT_OK

    if args.k is None:
        raise UsageError("partition needs --k unless --verify is given")
    cert = greedy_partition(args.k, allow_large=args.allow_large)
    problems = verify_partition(cert)
    if args.out:
        Path(args.out).write_text(cert.to_json() + "\n")
        summary = {"k": cert.k, "t": cert.t, "m": cert.m, "N": cert.N, "blocks": len(cert.blocks),
                   "ok": not problems, "violations": problems, "out": args.out}
        text = f"k={cert.k} t={cert.t} blocks={len(cert.blocks)} -> {args.out}: " + ("ok" if not problems else "INVALID")
        _emit(summary, args.format, text)
    else:
        print(json.dumps(cert.to_dict(), separators=(",", ":")))
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
    return EXIT_FAIL if problems else EXIT_OK


def _inequality_verify(args) -> int:
    try:
        y = YVector.parse(args.y)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --y: {exc}") from exc
    k = args.k
    if y.k != k:
        raise UsageError(f"--y has {y.k} entries, expected {k}")
    t = args.t if args.t is not None else t_of_k(k)
    feas = is_feasible(y, ConstraintSystem(k, t))
    report: dict = {"k": k, "t": t, "y": list(y.values), "feasible": feas.feasible,
                    "worst_violation": feas.worst_violation, "worst_pair": feas.worst_pair}
    ok = feas.feasible
    if feas.feasible:
        cert = (PartitionCertificate.from_json(Path(args.cert).read_text()) if args.cert
                else greedy_partition(k))
        if cert.violations:
            report["certificate_violations"] = cert.violations
            ok = False
        else:
            try:
                chain = chain_bound(y, cert)
                report["chain"] = {"ok": chain.ok, "weighted_sum": chain.weighted_sum,
                                   "y_k": chain.y_k, "violations": chain.violations}
                ok = ok and chain.ok
            except ValueError as exc:
                report["chain"] = {"ok": False, "violations": [str(exc)]}
                ok = False
        prod = product_bound(y)
        report["product"] = {"ok": prod.ok, "product": prod.product, "rescaled": prod.rescaled,
                             "am_gm": prod.am_gm, "bound": prod.bound, "failures": prod.failures}
        ok = ok and prod.ok
    report["ok"] = ok
    _emit(report, args.format, None)
    return EXIT_OK if ok else EXIT_FAIL


def _inequality_optimize(args) -> int:
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    t = args.t if args.t is not None else t_of_k(args.k)
    res = optimize_product(args.k, t, args.tol)
    _emit({"k": args.k, "t": t, "value": res.value, "argmax": list(res.argmax), "status": res.status,
           "iterations": res.iterations, "tolerance_achieved": res.tolerance_achieved,
           "worst_violation": res.worst_violation}, args.format, None)
    return EXIT_OK if res.status == "optimal" else EXIT_FAIL


def _inequality_tightness(args) -> int:
    rep = tightness_probe(args.k)
    payload = {"k": rep.k, "t": rep.t, "applicable": rep.applicable, "bound": rep.bound,
               "value_at_t": rep.value_at_t, "value_at_t_minus_1": rep.value_at_t_minus_1, "gap": rep.gap}
    _emit(payload, args.format, None)
    return EXIT_OK if not rep.applicable or rep.gap > 0 else EXIT_FAIL


def cmd_inequality(args) -> int:
    return {"verify": _inequality_verify, "optimize": _inequality_optimize,
            "tightness": _inequality_tightness}[args.action](args)


def cmd_entropy(args) -> int:
    host = Hypergraph.from_text(Path(args.host).read_text())
    if args.weights:
        dist = EdgeDistribution(host, read_weights(Path(args.weights).read_text(), len(host.edges)))
    else:
        dist = EdgeDistribution.uniform(host)
    k = host.k
    seq = ratio_sequence(dist)
    report = {
        "k": k,
        "H": joint_entropy(dist, range(1, k + 1)),
        "H_X1": seq.marginal[0],
        "density": density_value(dist),
        "ratio_sequence": list(seq.values),
        "conditional_entropies": [conditional_entropy(dist, i) for i in range(1, k + 1)],
    }
    ok = True
    if args.t is not None:
        verdict = check_ratio_constraints(dist, args.t)
        report["constraints"] = {"t": args.t, "ok": verdict.ok, "worst_excess": verdict.worst_excess,
                                 "worst_pair": verdict.worst_pair}
        ok = verdict.ok
    _emit(report, "json")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_hom(args) -> int:
    if args.lam:
        if args.i is None:
            raise UsageError("--lambda needs --i")
        lam = IntPartition.parse(args.lam)
        hom = corollary_hom_map(lam, args.i)
        ok = hom.is_valid(tent_lambda(lam), tent_two_part(lam.k, args.i))
        _emit({"status": "found", "valid": ok, "map": list(hom.assignment)}, args.format, hom.to_json())
        return EXIT_OK if ok else EXIT_FAIL

    if not (args.source and args.target):
        raise UsageError("hom needs --source and --target, or --lambda and --i")
    source = Hypergraph.from_text(Path(args.source).read_text())
    target = Hypergraph.from_text(Path(args.target).read_text())
    budget = args.budget if args.budget is not None else env_budget(DEFAULT_NODE_BUDGET)
    try:
        hom = find_homomorphism(source, target, budget)
    except SearchBudgetExceeded as exc:
        _emit({"status": "inconclusive", "nodes": exc.nodes}, args.format, "inconclusive")
        return EXIT_RESOURCE
    if hom is None:
        _emit({"status": "none"}, args.format, "none")
    else:
        _emit({"status": "found", "map": list(hom.assignment)}, args.format, hom.to_json())
    return EXIT_OK


def cmd_reproduce(args) -> int:
    results = []
    for res in run_all(samples=args.samples, seed=args.seed):
        results.append(res)
        if args.format == "text":
            print(f"[{'PASS' if res.ok else 'FAIL'}] {res.name}: {res.detail}", flush=True)
    ok = all(r.ok for r in results)
    if args.format == "json":
        _emit({"ok": ok, "checks": [r.as_dict() for r in results]}, "json")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--jobs", type=int, default=1,
                        help="upper bound on worker processes; every path currently runs in one")

    parser = argparse.ArgumentParser(prog="tentdensity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="t(k) against ceil(k/e)")
    p.add_argument("--from", dest="k_from", type=int, default=4)
    p.add_argument("--to", dest="k_to", type=int, default=19)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("partition", parents=[common], help="build or verify a partition certificate")
    p.add_argument("--k", type=int)
    p.add_argument("--verify", metavar="FILE")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--allow-large", action="store_true", help="lift the k <= 9 memory guard")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("inequality", help="product inequality checks")
    acts = p.add_subparsers(dest="action", required=True)
    q = acts.add_parser("verify", parents=[common])
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=int)
    q.add_argument("--y", required=True, help="comma-separated rationals y_1..y_k")
    q.add_argument("--cert", metavar="FILE")
    q = acts.add_parser("optimize", parents=[common])
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=int)
    q.add_argument("--tol", type=float, default=1e-6)
    q = acts.add_parser("tightness", parents=[common])
    q.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_inequality)

    p = sub.add_parser("entropy", parents=[common], help="entropy report for a host hypergraph")
    p.add_argument("--host", required=True, metavar="FILE")
    p.add_argument("--weights", metavar="FILE")
    p.add_argument("--t", type=int)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("hom", parents=[common], help="homomorphism search or corollary map")
    p.add_argument("--source", metavar="FILE")
    p.add_argument("--target", metavar="FILE")
    p.add_argument("--budget", type=int)
    p.add_argument("--lambda", dest="lam", metavar="PARTS", help="e.g. 6,2,1")
    p.add_argument("--i", type=int)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("reproduce", parents=[common], help="run every check")
    p.add_argument("--samples", type=int, default=10**4, help="random vectors per k (default 10^4)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
