"""Batch command-line front end.

Exit codes: 0 success, 1 validation or usage error, 2 statistical refusal
(not enough samples for the requested guarantee).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bayesnet, design, enumeration, influence, io, sem, stats
from .divergence import DivergenceSpec
from .orders import CycleError

__all__ = ["main", "entry"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    parser = _Parser(prog="causaldesign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="census of labeled strict orders at small n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--by", choices=["relations", "height", "both"], default="relations")
    p.add_argument("--out", default=None)

    p = sub.add_parser("entropy-curve", help="closed-form and optimizer entropy on a d-grid")
    p.add_argument("--dmin", type=float, required=True)
    p.add_argument("--dmax", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--out", default=None)

    p = sub.add_parser("optimize-design", help="best layered design for a density d")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--json", action="store_true", help="kept for compatibility; output is JSON")
    p.add_argument("--out", default=None)

    p = sub.add_parser("density", help="relation density from raw counts")
    p.add_argument("--relations", type=float, required=True)
    p.add_argument("--rows", type=float, default=None)
    p.add_argument("--cols", type=float, default=None)
    p.add_argument("--n", type=float, default=None)

    p = sub.add_parser("intervene", help="sever edges and write the intervened model")
    p.add_argument("--model", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("influence", help="causal influence of an edge set")
    p.add_argument("--model", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--family", default="kl")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--partition", default=None, help="layer file; enables the layered ACI view")
    p.add_argument("--report", choices=["json"], default="json")
    p.add_argument("--out", default=None)

    p = sub.add_parser("sem-influence", help="layered SEM causal influence")
    p.add_argument("--model", required=True)
    p.add_argument("--edges", required=True, help='numeric 1-based pairs, e.g. "1->2,2->3"')
    p.add_argument("--family", default="kl", choices=["kl", "h2", "hellinger_sq"])
    p.add_argument("--per-edge", action="store_true", help="group per edge instead of per target")
    p.add_argument("--out", default=None)

    p = sub.add_parser("test-influence", help="sample-based layered influence test")
    p.add_argument("--model", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0 / 3.0)
    p.add_argument("--obs", required=True, help="CSV of observational samples")
    p.add_argument("--int", dest="inter", required=True, help="CSV of interventional samples")
    p.add_argument("--out", default=None)

    p = sub.add_parser("gof", help="power-divergence goodness of fit")
    p.add_argument("--counts", required=True, help='comma-separated, e.g. "30,70"')
    p.add_argument("--null", required=True, help='comma-separated probabilities')
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--significance", type=float, default=0.05)

    p = sub.add_parser("ate", help="average treatment effect (runs test or ERL)")
    p.add_argument("--treat", required=True)
    p.add_argument("--ctrl", default=None)
    p.add_argument("--method", choices=["runs", "erl"], default="runs")
    p.add_argument("--significance", type=float, default=0.05)
    p.add_argument("--alternative", choices=["two_sided", "low_runs"], default="two_sided")

    p = sub.add_parser("simulate", help="random layered net, plus optional samples")
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--design", default=None, help="JSON design file (k, lambdas, p) to use instead")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--card", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--partition-out", default=None)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--samples-out", default=None)

    return parser


def _emit(obj, out=None):
    text = io.canonical_json(obj)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_enumerate(args):
    census = enumeration.enumerate_orders(args.n)
    obj = {"n": census.n, "total": census.total}
    if args.by in ("relations", "both"):
        obj["by_relations"] = {str(k): v for k, v in census.by_relations.items()}
    if args.by in ("height", "both"):
        obj["by_height"] = {str(k): v for k, v in census.by_height.items()}
    _emit(obj, args.out)
    return 0


def _cmd_entropy_curve(args):
    rows = design.entropy_curve(args.dmin, args.dmax, args.steps, k_max=args.kmax)
    lines = ["d,c_closed_form_if_any,c_numeric,k,p"]
    for d, closed, numeric, k, p in rows:
        closed_txt = f"{closed:.12g}" if closed is not None else ""
        lines.append(f"{d:.12g},{closed_txt},{numeric:.12g},{k},{p:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _design_obj(best):
    return {
        "k": best.k,
        "lambdas": list(best.lambdas),
        "p": best.p,
        "objective": best.objective,
        "d": best.d,
        "p_branch": best.p_branch,
    }


def _cmd_optimize_design(args):
    best = design.optimize_design(args.d, k_max=args.kmax)
    _emit(_design_obj(best), args.out)
    return 0


def _cmd_density(args):
    if (args.rows is None) != (args.cols is None):
        raise ValueError("bipartite mode needs both --rows and --cols")
    if args.rows is not None:
        d = design.estimate_density(args.relations, rows=args.rows, cols=args.cols)
    else:
        if args.n is None:
            raise ValueError("give either --rows/--cols or --n")
        d = design.estimate_density(args.relations, n_units=args.n)
    _emit({"d": d})
    return 0


def _cmd_intervene(args):
    net = io.net_from_obj(io.load_json(args.model))
    edges = bayesnet.parse_edges(args.edges, net.names)
    cut = bayesnet.intervene(net, edges)
    io.write_json(args.out, io.net_to_obj(cut))
    return 0


def _spec_from_args(args):
    return DivergenceSpec.from_name(args.family, lam=args.lam, beta=getattr(args, "beta", None))


def _cmd_influence(args):
    net = io.net_from_obj(io.load_json(args.model))
    edges = bayesnet.parse_edges(args.edges, net.names)
    spec = _spec_from_args(args)
    if args.partition:
        part = io.partition_from_obj(io.load_json(args.partition), names=net.names)
        result = influence.kpartite_aci(net, part, edges, spec)
    else:
        result = influence.causal_influence(net, edges, spec)
    obj = {
        "total": result.total,
        "aci": result.aci,
        "decomposition_kind": result.decomposition_kind,
        "per_target": result.per_target,
    }
    if result.per_layer is not None:
        obj["per_layer"] = {str(k): v for k, v in result.per_layer.items()}
    _emit(obj, args.out)
    return 0


def _parse_sem_edges(text, n):
    edges = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "->" not in token:
            raise ValueError(f"bad edge token {token!r}, expected PARENT->CHILD")
        left, right = (part.strip() for part in token.split("->", 1))
        try:
            p, c = int(left) - 1, int(right) - 1
        except ValueError:
            raise ValueError(f"SEM edges use 1-based variable numbers, got {token!r}") from None
        if not (0 <= p < n and 0 <= c < n):
            raise ValueError(f"edge {token!r} out of range 1..{n}")
        edges.add((p, c))
    return edges


def _cmd_sem_influence(args):
    model = io.sem_from_obj(io.load_json(args.model))
    edges = _parse_sem_edges(args.edges, model.n)
    family = "hellinger_sq" if args.family in ("h2", "hellinger_sq") else "kl"
    grouping = "edge" if args.per_edge else "target"
    result = sem.sem_kpartite_aci(model, edges, family=family, grouping=grouping)
    obj = {
        "total": result.total,
        "aci": result.aci,
        "per_target": {str(k): v for k, v in result.per_target.items()},
        "per_layer": {str(k): {str(kk): vv for kk, vv in v.items()} for k, v in result.per_layer.items()},
    }
    _emit(obj, args.out)
    return 0


def _cmd_test_influence(args):
    net = io.net_from_obj(io.load_json(args.model))
    part = io.partition_from_obj(io.load_json(args.partition), names=net.names)
    edges = bayesnet.parse_edges(args.edges, net.names)
    obs_names, obs = io.read_samples_csv(args.obs)
    int_names, inter = io.read_samples_csv(args.inter)
    if obs_names != list(net.names) or int_names != list(net.names):
        raise ValueError("sample CSV headers must match the model's node names")
    verdict = stats.kpartite_influence_test(
        net, part, edges, args.eps, obs, inter, delta=args.delta
    )
    obj = {
        "influence_detected": verdict.reject_null,
        "statistic": verdict.statistic,
        "threshold": verdict.threshold,
        "samples_used": verdict.samples_used,
        "per_node": {
            name: {
                "reject_null": v.reject_null,
                "statistic": v.statistic,
                "threshold": v.threshold,
                "samples_used": v.samples_used,
            }
            for name, v in verdict.per_node.items()
        },
    }
    _emit(obj, args.out)
    return 0


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"{what} must be comma-separated numbers") from None


def _cmd_gof(args):
    counts = _floats(args.counts, "--counts")
    null = _floats(args.null, "--null")
    verdict = stats.power_divergence_gof(counts, null, lam=args.lam, significance=args.significance)
    _emit(
        {
            "reject_null": verdict.reject_null,
            "statistic": verdict.statistic,
            "threshold": verdict.threshold,
            "samples_used": verdict.samples_used,
            "lambda": args.lam,
        }
    )
    return 0


def _single_column(path):
    cols = io.read_float_csv(path)
    if len(cols) != 1:
        raise ValueError(f"{path}: expected a single-column CSV")
    return next(iter(cols.values()))


def _cmd_ate(args):
    if args.method == "runs":
        if not args.ctrl:
            raise ValueError("runs method needs --ctrl")
        treat = _single_column(args.treat)
        ctrl = _single_column(args.ctrl)
        res = stats.ww_ate_run_test(
            treat, ctrl, significance=args.significance, alternative=args.alternative
        )
        _emit(
            {
                "method": "runs",
                "r": res.r,
                "u": res.u,
                "v": res.v,
                "expected_r": res.expected_r,
                "var_r": res.var_r,
                "z": res.z,
                "p_value": res.p_value,
                "reject_null": res.reject_null,
            }
        )
        return 0
    cols = io.read_float_csv(args.treat)
    needed = ["y", "x", "ex", "varx"]
    missing = [c for c in needed if c not in cols]
    if missing:
        raise ValueError(f"ERL CSV must carry columns y,x,ex,varx (missing {missing[0]!r})")
    tau = stats.erl_estimate(cols["y"], cols["x"], cols["ex"], cols["varx"])
    _emit({"method": "erl", "tau_hat": tau})
    return 0


def _cmd_simulate(args):
    if args.design:
        obj = io.load_json(args.design)
        lambdas = [float(v) for v in obj["lambdas"]]
        p = float(obj["p"])
    elif args.d is not None:
        best = design.optimize_design(args.d, k_max=args.kmax)
        lambdas, p = list(best.lambdas), best.p
    else:
        raise ValueError("give either --d or --design")
    sizes = [max(1, round(lam * args.n)) for lam in lambdas]
    net, part = bayesnet.random_layered_net(sizes, p, args.card, args.seed)
    io.write_json(args.out, io.net_to_obj(net))
    if args.partition_out:
        io.write_json(args.partition_out, io.partition_to_obj(part, names=net.names))
    if args.samples:
        if not args.samples_out:
            raise ValueError("--samples needs --samples-out")
        matrix = bayesnet.sample(net, args.samples, args.seed + 1)
        io.write_samples_csv(args.samples_out, net.names, matrix)
    return 0


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "entropy-curve": _cmd_entropy_curve,
    "optimize-design": _cmd_optimize_design,
    "density": _cmd_density,
    "intervene": _cmd_intervene,
    "influence": _cmd_influence,
    "sem-influence": _cmd_sem_influence,
    "test-influence": _cmd_test_influence,
    "gof": _cmd_gof,
    "ate": _cmd_ate,
    "simulate": _cmd_simulate,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except stats.InsufficientSamples as exc:
        print(f"statistical refusal: {exc}", file=sys.stderr)
        return 2
    except (ValueError, CycleError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
