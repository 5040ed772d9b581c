"""Command line interface: analyze, generate, sweep, search-signaling.

Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 enumeration cap
exceeded, 5 bad parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from covergame import gamefile
from covergame.errors import CapExceeded, InvariantError, ParameterError, ParseError
from covergame.instances import (
    gairing_closed_form,
    gen_gairing_tight,
    gen_random,
    gen_voim_tight,
    gen_voip_tight,
    voim_closed_form,
)
from covergame.metrics import analyze, check_voi_bounds, rule_kind
from covergame.model import SignalingPolicy, as_fraction, interpolate_rules, make_fg, make_fmc
from covergame.partitions import search_signaling

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_CAP, EXIT_PARAMS = 0, 2, 3, 4, 5

SWEEP_COLUMNS = ("family", "row_type", "lambda", "eps", "p", "n") + gamefile.REPORT_COLUMNS + (
    "closed_form",
    "closed_form_match",
)
SEARCH_COLUMNS = ("label", "objective", "rank", "top", "n_cells", "partition", "value", "value_dec")


def _fraction_list(text: str) -> list[Fraction]:
    try:
        return [as_fraction(x) for x in text.split(",") if x.strip()]
    except InvariantError as exc:
        raise ParameterError(str(exc)) from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(args, line: str) -> None:
    # keep stdout clean when the CSV goes there
    print(line, file=sys.stdout if args.out else sys.stderr)


def _policy_override(text: str, k: int) -> SignalingPolicy:
    if text == "full":
        return SignalingPolicy.full_revelation(k)
    if text == "none":
        return SignalingPolicy.no_information(k)
    try:
        cells = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"--policy-override: {exc}") from exc
    if not isinstance(cells, list) or not all(isinstance(c, list) for c in cells):
        raise ParseError("--policy-override must be 'full', 'none' or a JSON list of lists")
    return SignalingPolicy(tuple(tuple(c) for c in cells))


def _rule_for(kind: str, n_agents: int):
    if kind == "mc":
        return make_fmc(n_agents)
    if kind == "g":
        return make_fg(n_agents)
    raise ParameterError(f"unknown rule {kind!r}")


def _analyze_bundle(bundle, n_samples, seed, cap, kind=None):
    report = analyze(bundle.game, bundle.dist, bundle.policy, bundle.rule, n_samples=n_samples, seed=seed, cap=cap)
    checks = check_voi_bounds(report, bundle.policy, kind or rule_kind(bundle.rule))
    return report, checks


def cmd_analyze(args) -> int:
    bundle = gamefile.load(args.input)
    if args.policy_override:
        bundle = bundle.with_policy(_policy_override(args.policy_override, len(bundle.dist)))
    if args.rule_override:
        bundle = bundle.with_rule(_rule_for(args.rule_override, bundle.game.n_agents))
    report, checks = _analyze_bundle(bundle, args.samples, args.seed, args.cap)
    row = gamefile.report_row(bundle.label, rule_kind(bundle.rule), report, checks)
    _emit(gamefile.csv_text([row], gamefile.REPORT_COLUMNS), args.out)
    _say(args, f"{bundle.label}: |Pi|={report.n_cells} rule={rule_kind(bundle.rule)}")
    for name in ("voi_plus", "voi_minus", "poa", "pos", "psi_est", "rho_est"):
        val = row[name] or "undefined"
        _say(args, f"  {name:9s} = {val}" + (f"  (~{row[name + '_dec']})" if row[name] else ""))
    for c in checks:
        _say(args, f"  [{c.status}] {c.name} {c.detail}")
    return EXIT_OK


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "voip-tight":
        bundle = gen_voip_tight(args.R)
    elif kind == "voim-tight":
        bundle = gen_voim_tight(_fraction_list(args.eps)[0], _fraction_list(args.p)[0])
    elif kind == "gairing-tight":
        bundle = gen_gairing_tight(args.n, _fraction_list(args.eps)[0])
    else:
        bundle = gen_random(
            n=args.n,
            R=args.R,
            max_actions=args.max_actions,
            support_size=args.support_size,
            seed=args.seed,
            prior=args.prior,
            policy=args.policy,
            rule=args.rule,
        )
    _emit(gamefile.dumps(bundle), args.out)
    return EXIT_OK


def _sweep_task(task):
    """Analyze one sweep member; runs in worker processes."""
    meta, bundle, kind, samples, seed, cap, closed = task
    row = dict(meta)
    try:
        report, checks = _analyze_bundle(bundle, samples, seed, cap, kind)
    except CapExceeded:
        row.update(gamefile.report_row(bundle.label, kind, status="cap"))
        return row, None
    row.update(gamefile.report_row(bundle.label, kind, report, checks))
    if closed is not None:
        row["closed_form"] = gamefile.fmt_rational(closed)
        row["closed_form_match"] = "1" if closed == report.voi_minus else "0"
    return row, report


def _sweep_tasks(args):
    fam = args.family
    tasks = []
    if fam == "rule-interpolation":
        lambdas = _fraction_list(args.lambdas)
        if not lambdas:
            raise ParameterError("empty lambda grid")
        battery = [
            gen_random(
                n=2 + (s % 2),
                R=args.R,
                max_actions=args.max_actions,
                support_size=args.support_size,
                seed=args.seed + s,
                prior="random",
                policy="random",
            )
            for s in range(args.battery)
        ]
        for lam in lambdas:
            kind = "mc" if lam == 0 else "g" if lam == 1 else "other"
            for b in battery:
                n = b.game.n_agents
                rule = interpolate_rules(make_fmc(n), make_fg(n), lam)
                meta = {"family": fam, "row_type": "instance", "lambda": gamefile.fmt_rational(lam)}
                tasks.append((meta, b.with_rule(rule), kind, args.samples, args.seed, args.cap, None))
    elif fam == "voim-tight-grid":
        for eps in _fraction_list(args.eps_grid):
            for p in _fraction_list(args.p_grid):
                b = gen_voim_tight(eps, p)
                meta = {"family": fam, "row_type": "instance", "eps": gamefile.fmt_rational(eps), "p": gamefile.fmt_rational(p)}
                tasks.append((meta, b, "mc", args.samples, args.seed, args.cap, voim_closed_form(eps, p)))
    else:
        for n in _int_list(args.n_grid):
            for factor in _fraction_list(args.eps_factors):
                eps = factor * make_fg(n)(n)
                b = gen_gairing_tight(n, eps)
                meta = {"family": fam, "row_type": "instance", "eps": gamefile.fmt_rational(eps), "n": str(n)}
                tasks.append((meta, b, "g", args.samples, args.seed, args.cap, gairing_closed_form(n, eps)))
    if not tasks:
        raise ParameterError("sweep grid is empty")
    return tasks


def _aggregate_rows(rows_reports, family):
    """Per-lambda minimum VoI over the battery, for rule-interpolation sweeps."""
    by_lam: dict[str, list] = {}
    for row, report in rows_reports:
        by_lam.setdefault(row["lambda"], []).append(report)
    out = []
    for lam, reports in by_lam.items():
        ok = [r for r in reports if r is not None]
        vp = [r.voi_plus for r in ok if r.voi_plus is not None]
        vm = [r.voi_minus for r in ok if r.voi_minus is not None]
        row = {"family": family, "row_type": "aggregate", "lambda": lam, "label": f"min over {len(ok)} instances"}
        row["status"] = "ok" if len(ok) == len(reports) else "partial"
        row.update(gamefile.rational_cells("voi_plus", min(vp) if vp else None))
        row.update(gamefile.rational_cells("voi_minus", min(vm) if vm else None))
        out.append(row)
    return out


def cmd_sweep(args) -> int:
    tasks = _sweep_tasks(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=4))
    else:
        results = [_sweep_task(t) for t in tasks]
    rows = [r for r, _ in results]
    if args.family == "rule-interpolation":
        rows += _aggregate_rows(results, args.family)
    _emit(gamefile.csv_text(rows, SWEEP_COLUMNS), args.out)
    bad = sum(1 for r in rows if r.get("bounds_ok") == "0")
    capped = sum(1 for r in rows if r.get("status") == "cap")
    _say(args, f"sweep {args.family}: {len(tasks)} configurations, {bad} bound failures, {capped} over cap")
    return EXIT_OK


def cmd_search(args) -> int:
    bundle = gamefile.load(args.input)
    ranked = search_signaling(bundle, args.objective, cap=args.cap)
    rows = [
        {
            "label": bundle.label,
            "objective": args.objective,
            "rank": str(r.rank),
            "top": "1" if i == 0 else "0",
            "n_cells": str(len(r.policy)),
            "partition": json.dumps([list(c) for c in r.policy.cells], separators=(",", ":")),
            "value": gamefile.fmt_rational(r.objective),
            "value_dec": gamefile.fmt_decimal(r.objective),
        }
        for i, r in enumerate(ranked)
    ]
    _emit(gamefile.csv_text(rows, SEARCH_COLUMNS), args.out)
    _say(args, f"{len(ranked)} policies ranked by {args.objective}; top {rows[0]['partition']} = {rows[0]['value']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=None, help="joint action space limit (default $COVERGAME_CAP or 10^7)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv"], default="csv")

    p = argparse.ArgumentParser(prog="covergame", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="analyze a game file")
    a.add_argument("input")
    a.add_argument("--policy-override", help="'full', 'none' or JSON list of cells")
    a.add_argument("--rule-override", choices=["mc", "g"])
    a.add_argument("--samples", type=int, default=None, help="hull samples (default: support size)")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", parents=[common], help="write a game file")
    g.add_argument("kind", choices=["voip-tight", "voim-tight", "gairing-tight", "random"])
    g.add_argument("--R", type=int, default=3)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--eps", default="1/2")
    g.add_argument("--p", default="1/2")
    g.add_argument("--max-actions", type=int, default=2)
    g.add_argument("--support-size", type=int, default=2)
    g.add_argument("--prior", choices=["uniform", "random"], default="uniform")
    g.add_argument("--policy", choices=["full", "none", "random"], default="full")
    g.add_argument("--rule", choices=["mc", "g"], default="mc")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sweep", parents=[common], help="analyze a grid of configurations")
    s.add_argument("family", choices=["rule-interpolation", "voim-tight-grid", "gairing-grid"])
    s.add_argument("--lambdas", default="0,1/4,1/2,3/4,1")
    s.add_argument("--battery", type=int, default=20)
    s.add_argument("--R", type=int, default=3)
    s.add_argument("--max-actions", type=int, default=3)
    s.add_argument("--support-size", type=int, default=3)
    s.add_argument("--eps-grid", default="1/10,1/4,1/2,3/4")
    s.add_argument("--p-grid", default="1/10,1/4,1/2,3/4,9/10")
    s.add_argument("--n-grid", default="2,3,4,5,6")
    s.add_argument("--eps-factors", default="1/10,1/100")
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    q = sub.add_parser("search-signaling", parents=[common], help="rank every signaling partition")
    q.add_argument("input")
    q.add_argument("--objective", choices=["best-case", "worst-case"], default="best-case")
    q.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        code = EXIT_PARSE
        msg = exc
    except InvariantError as exc:
        code = EXIT_INVARIANT
        msg = exc
    except CapExceeded as exc:
        code = EXIT_CAP
        msg = exc
    except ParameterError as exc:
        code = EXIT_PARAMS
        msg = exc
    except OSError as exc:
        code = EXIT_PARSE
        msg = exc
    print(f"covergame: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
