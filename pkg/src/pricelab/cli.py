"""Command-line front end: generate, evaluate, optimize, verify.

Exit codes: 0 success, 1 assertion/check failure, 2 usage or input error.
Default evaluation mode is exact whenever the profile cap permits; Monte
Carlo must be requested explicitly with ``--mc N --seed S``.  ``--json``
emits a schema-stable report carrying every number shown in the tables.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import dicut, instances, mechanisms, verify
from .errors import CapExceeded, InstanceFormatError
from .model import MONEY_ATOL, Instance
from .opt import build_lp, solve_opt

USAGE_ERROR = 2


def _parse_items(text: str) -> frozenset[int]:
    """'1,3' (1-indexed) -> internal 0-indexed item set."""
    if not text.strip():
        return frozenset()
    try:
        items = frozenset(int(tok) - 1 for tok in text.split(","))
    except ValueError as exc:
        raise InstanceFormatError(f"bad item list {text!r}: {exc}") from exc
    if any(i < 0 for i in items):
        raise InstanceFormatError(f"items are 1-indexed; got {text!r}")
    return items


def _parse_bundles(text: str) -> list[frozenset[int]]:
    """'2|4,5' -> [{1}, {3, 4}] (internal 0-indexed)."""
    return [_parse_items(part) for part in text.split("|") if part.strip()]


def _ext(items) -> list[int]:
    return sorted(i + 1 for i in items)


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    for key, value in report.items():
        if key == "checks":
            for chk in value:
                status = "PASS" if chk["passed"] else "FAIL"
                detail = f"  ({chk['detail']})" if chk.get("detail") else ""
                print(f"check {chk['name']}: {status} margin={chk['margin']:.6g}{detail}")
        elif key == "assertions":
            for a in value:
                status = "PASS" if a["passed"] else "FAIL"
                detail = f"  ({a['detail']})" if a.get("detail") else ""
                print(f"{status} margin={a['margin']:+.6g}  {a['name']}{detail}")
        elif isinstance(value, dict):
            print(f"{key}:")
            for k2, v2 in value.items():
                print(f"  {k2}: {v2}")
        else:
            print(f"{key}: {value}")


def cmd_gen(args) -> int:
    if args.kind == "numerical-example":
        inst = instances.gen_numerical_example()
        meta = {"generator": "numerical-example"}
    elif args.kind == "lb-standard":
        if args.n is None:
            raise InstanceFormatError("lb-standard needs --n")
        inst = instances.gen_lb_standard(args.n)
        meta = {"generator": "lb-standard", "n": args.n}
    elif args.kind == "hypergraph-lb":
        if args.m is None or args.k is None:
            raise InstanceFormatError("hypergraph-lb needs --m and --k")
        inst = instances.gen_hypergraph_lb(args.m, args.k)
        meta = {"generator": "hypergraph-lb", "m": args.m, "k": args.k}
    elif args.kind == "random":
        if args.m is None:
            raise InstanceFormatError("random needs --m")
        inst = instances.gen_random(
            args.m, args.layers, supports=args.supports,
            edge_density=args.edge_density, boost_scale=args.boost_scale,
            seed=args.seed, max_source_size=args.max_source_size)
        meta = {"generator": "random", "m": args.m, "K": args.layers,
                "supports": args.supports, "edge_density": args.edge_density,
                "boost_scale": args.boost_scale, "seed": args.seed,
                "max_source_size": args.max_source_size}
    else:  # pragma: no cover - argparse restricts choices
        raise InstanceFormatError(f"unknown generator {args.kind!r}")
    if args.out:
        instances.save(inst, args.out, meta=meta)
        print(f"wrote {args.out} (fingerprint {instances.fingerprint(inst)[:16]})")
    else:
        payload = json.loads(instances.canonical_dumps(inst))
        payload["meta"] = meta
        print(json.dumps(payload, indent=2))
    return 0


def _choose_free_set(inst: Instance, args) -> tuple[frozenset[int], str]:
    if args.free is not None:
        return _parse_items(args.free), "explicit"
    mode = args.free_mode or "exact-dicut"
    graph = dicut.build_graph(inst)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    if mode == "exact-dicut":
        free, _ = dicut.exact_max_dicut(graph)
    elif mode == "pairwise":
        free = dicut.sample_free_set_pairwise(rng, inst.num_items)
    elif mode == "rank":
        free = dicut.sample_free_set_rank(rng, inst.num_items, max(inst.rank, 1))
    elif mode == "degree":
        free = dicut.sample_free_set_degree(rng, graph, max(inst.max_out_degree, 1))
    elif mode == "local-search":
        free, _ = dicut.local_search_dicut(graph, rng=rng)
    else:  # pragma: no cover - argparse restricts choices
        raise InstanceFormatError(f"unknown free mode {mode!r}")
    return free, mode


def _revenue_entry(report: mechanisms.RevenueReport) -> dict:
    entry = {"mechanism": report.mechanism, "revenue": report.revenue,
             "mode": report.mode}
    if report.mode == "monte-carlo":
        entry.update(samples=report.samples, seed=report.seed,
                     std_error=report.std_error)
    return entry


def cmd_eval(args) -> int:
    inst = instances.load(args.instance)
    started = time.perf_counter()
    mode = "mc" if args.mc else "exact"
    eval_kwargs = {"mode": mode}
    if args.mc:
        eval_kwargs.update(mc_samples=args.mc, seed=args.seed)
    report: dict = {
        "command": "eval",
        "instance": str(args.instance),
        "fingerprint": instances.fingerprint(inst),
        "mechanism": args.mechanism,
        "mode": mode,
        "seed": args.seed,
        "results": {},
        "checks": [],
    }
    results = report["results"]
    checks = report["checks"]
    if args.mechanism == "separate":
        part = mechanisms.separate_free(inst, frozenset())
        rev = mechanisms.evaluate_revenue(inst, part.prices, **eval_kwargs)
        results.update(_revenue_entry(rev), prices=part.prices.tolist(),
                       lower_bound=part.lower_bound)
        tol = MONEY_ATOL if mode == "exact" else 4 * (rev.std_error or 0.0)
        checks.append({"name": "revenue >= sum of reserve revenues",
                       "passed": rev.revenue >= part.lower_bound - tol,
                       "margin": rev.revenue - part.lower_bound, "detail": ""})
    elif args.mechanism == "bundle":
        price, rev = mechanisms.brev(inst, **({"mc_samples": args.mc, "seed": args.seed}
                                              if args.mc else {}))
        results.update(_revenue_entry(rev), bundle_price=price)
    elif args.mechanism == "separate-free":
        free, how = _choose_free_set(inst, args)
        part = mechanisms.separate_free(inst, free)
        rev = mechanisms.evaluate_revenue(inst, part.prices, **eval_kwargs)
        results.update(_revenue_entry(rev), free_set=_ext(free), free_mode=how,
                       prices=part.prices.tolist(), lower_bound=part.lower_bound)
        tol = MONEY_ATOL if mode == "exact" else 4 * (rev.std_error or 0.0)
        checks.append({"name": "revenue >= free-set lower bound",
                       "passed": rev.revenue >= part.lower_bound - tol,
                       "margin": rev.revenue - part.lower_bound, "detail": ""})
    elif args.mechanism == "bundle-pricing":
        if args.bundles is None:
            raise InstanceFormatError("bundle-pricing needs --bundles")
        free = _parse_items(args.free) if args.free is not None else frozenset()
        menu = mechanisms.bundle_pricing(inst, free, _parse_bundles(args.bundles))
        proxy = mechanisms.proxy_revenue(inst, menu)
        results.update(mechanism="bundle-pricing", free_set=_ext(free),
                       bundles=[_ext(b) for b in menu.bundles],
                       bundle_prices=list(menu.prices), proxy_revenue=proxy)
        if mode == "exact":
            actual = mechanisms.evaluate_menu_revenue(inst, menu)
            results["revenue"] = actual.revenue
            results["mode"] = "exact"
            checks.append({"name": "proxy revenue undercounts actual revenue",
                           "passed": proxy <= actual.revenue + MONEY_ATOL,
                           "margin": actual.revenue - proxy, "detail": ""})
    else:  # pragma: no cover - argparse restricts choices
        raise InstanceFormatError(f"unknown mechanism {args.mechanism!r}")
    report["elapsed_s"] = time.perf_counter() - started
    _emit(report, args.json)
    return 0 if all(c["passed"] for c in checks) else 1


def cmd_opt(args) -> int:
    inst = instances.load(args.instance)
    started = time.perf_counter()
    res = solve_opt(build_lp(inst))
    price, bundle = mechanisms.brev(inst)
    part, sf = mechanisms.best_separate_free(inst)
    best_simple = max(bundle.revenue, sf.revenue)
    winner = "bundle" if bundle.revenue >= sf.revenue else "separate-free"
    report = {
        "command": "opt",
        "instance": str(args.instance),
        "fingerprint": instances.fingerprint(inst),
        "results": {
            "opt_revenue": res.opt_revenue,
            "bundle_price": price,
            "bundle_revenue": bundle.revenue,
            "best_free_set": _ext(part.free_set),
            "best_free_set_revenue": sf.revenue,
            "winning_mechanism": winner,
            "ratio": res.opt_revenue / best_simple if best_simple > 0 else float("inf"),
            "lp_residuals": res.residuals,
        },
        "elapsed_s": time.perf_counter() - started,
    }
    _emit(report, args.json)
    return 0


def cmd_verify(args) -> int:
    suite = verify.SUITES[args.suite]
    kwargs = {"jobs": args.jobs, "seed": args.seed}
    if args.trials is not None:
        kwargs["trials"] = args.trials
    if args.count is not None:
        kwargs["count"] = args.count
    if args.a is not None:
        kwargs["a"] = args.a
    if args.n is not None:
        kwargs["ns"] = tuple(int(tok) for tok in str(args.n).split(","))
    if args.m is not None:
        kwargs["m"] = args.m
    if args.k is not None:
        kwargs["k"] = args.k
    if args.seed is None:
        kwargs.pop("seed")
    started = time.perf_counter()
    assertions = suite(**kwargs)
    failed = [a for a in assertions if not a.passed]
    report = {
        "command": "verify",
        "suite": args.suite,
        "passed": len(assertions) - len(failed),
        "failed": len(failed),
        "assertions": [{"name": a.name, "passed": a.passed,
                        "margin": a.margin, "detail": a.detail}
                       for a in assertions],
        "elapsed_s": time.perf_counter() - started,
    }
    _emit(report, args.json)
    if not args.json:
        print(f"{report['passed']} passed, {report['failed']} failed "
              f"({report['elapsed_s']:.2f}s)")
    return 0 if not failed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pricelab",
        description="Pricing laboratory for proportional-complementarity buyers")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("kind", choices=["numerical-example", "lb-standard",
                                      "hypergraph-lb", "random"])
    gen.add_argument("--n", type=int, help="item count for lb-standard")
    gen.add_argument("--m", type=int, help="item count")
    gen.add_argument("--k", type=int, help="source-set size for hypergraph-lb")
    gen.add_argument("--layers", type=int, default=1)
    gen.add_argument("--supports", type=int, default=2)
    gen.add_argument("--edge-density", type=float, default=0.3)
    gen.add_argument("--boost-scale", type=float, default=1.0)
    gen.add_argument("--max-source-size", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--out", help="output path (default: stdout)")
    gen.set_defaults(func=cmd_gen)

    ev = sub.add_parser("eval", help="evaluate a mechanism on an instance")
    ev.add_argument("instance")
    ev.add_argument("mechanism", choices=["separate", "bundle", "separate-free",
                                          "bundle-pricing"])
    ev.add_argument("--free", help="explicit free set, 1-indexed: '1,3'")
    ev.add_argument("--free-mode",
                    choices=["exact-dicut", "pairwise", "rank", "degree",
                             "local-search"],
                    help="free-set selection when --free is absent")
    ev.add_argument("--bundles", help="priced bundles: '2|4,5' (1-indexed)")
    ev.add_argument("--exact", action="store_true",
                    help="exact expectation (default)")
    ev.add_argument("--mc", type=int, metavar="N",
                    help="Monte Carlo with N samples (requires --seed)")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--json", action="store_true")
    ev.set_defaults(func=cmd_eval)

    op = sub.add_parser("opt", help="LP optimal-revenue oracle")
    op.add_argument("instance")
    op.add_argument("--json", action="store_true")
    op.set_defaults(func=cmd_opt)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(verify.SUITES))
    ver.add_argument("--trials", type=int)
    ver.add_argument("--count", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--a", type=float)
    ver.add_argument("--n", help="comma-separated item counts for lb-standard")
    ver.add_argument("--m", type=int)
    ver.add_argument("--k", type=int)
    ver.add_argument("--jobs", type=int, default=1)
    ver.add_argument("--json", action="store_true")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "mc", None) and getattr(args, "exact", False):
        parser.error("--exact and --mc are mutually exclusive")
    if getattr(args, "mc", None) and "--seed" not in (argv or sys.argv[1:]):
        parser.error("--mc requires an explicit --seed")
    try:
        return args.func(args)
    except (InstanceFormatError, CapExceeded, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
