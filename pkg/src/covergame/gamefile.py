"""JSON game files and CSV reports.

Game file layout::

    {
      "label": "voim-tight(eps=1/2,p=1/2)",          # optional
      "n_resources": 3,
      "agents": [[[0], [1]], [[1], [2]]],            # 0-based resource ids
      "support": [{"values": ["1", "1/2", "0"], "prob": "1/2"}, ...],
      "policy": [[0], [1]],                          # partition of support ids
      "rule": {"kind": "mc" | "g" | "custom", "table": ["1", "1/2"]}
    }

Values and probabilities must be exact: integers or "p/q" strings.
"""

from __future__ import annotations

import csv
import io
import json
import re
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import IO, Iterable, Mapping

from covergame.errors import InvariantError, ParseError
from covergame.instances import InstanceBundle
from covergame.model import (
    CoverageGame,
    SignalingPolicy,
    UtilityRule,
    ValueDistribution,
    make_fg,
    make_fmc,
)

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(f"{where}: {x!r} is not an exact rational (write it as a 'p/q' string)")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and _RATIONAL.match(x):
        try:
            return Fraction(x.replace(" ", ""))
        except ZeroDivisionError:
            raise ParseError(f"{where}: zero denominator in {x!r}") from None
    raise ParseError(f"{where}: {x!r} is not an exact rational")


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def fmt_decimal(x: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 15
        return f"{Decimal(x.numerator) / Decimal(x.denominator):.15g}"


def _int_list(x, where: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(r, int) and not isinstance(r, bool) for r in x):
        raise ParseError(f"{where}: expected a list of integers")
    return x


def bundle_from_dict(doc: Mapping) -> InstanceBundle:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("agents", "n_resources", "support", "rule"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}")
    n_res = doc["n_resources"]
    if not isinstance(n_res, int) or isinstance(n_res, bool):
        raise ParseError("n_resources must be an integer")
    if not isinstance(doc["agents"], list):
        raise ParseError("agents must be a list")
    agents = []
    for i, acts in enumerate(doc["agents"]):
        if not isinstance(acts, list):
            raise ParseError(f"agents[{i}] must be a list of actions")
        agents.append([_int_list(a, f"agents[{i}][{j}]") for j, a in enumerate(acts)])
    game = CoverageGame.from_lists(n_res, agents)

    if not isinstance(doc["support"], list):
        raise ParseError("support must be a list")
    support, probs = [], []
    for k, state in enumerate(doc["support"]):
        if not isinstance(state, dict) or "values" not in state or "prob" not in state:
            raise ParseError(f"support[{k}] needs 'values' and 'prob'")
        if not isinstance(state["values"], list):
            raise ParseError(f"support[{k}].values must be a list")
        support.append(tuple(parse_rational(x, f"support[{k}].values") for x in state["values"]))
        probs.append(parse_rational(state["prob"], f"support[{k}].prob"))
    dist = ValueDistribution(tuple(support), tuple(probs))
    game.check_values(dist.support[0])

    if "policy" in doc:
        cells = doc["policy"]
        if not isinstance(cells, list):
            raise ParseError("policy must be a list of cells")
        policy = SignalingPolicy(tuple(tuple(_int_list(c, f"policy[{j}]")) for j, c in enumerate(cells)))
    else:
        policy = SignalingPolicy.full_revelation(len(dist))

    rule = parse_rule(doc["rule"], game.n_agents)
    return InstanceBundle(game, dist, policy, rule, str(doc.get("label") or "instance"))


def parse_rule(spec, n_agents: int) -> UtilityRule:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParseError("rule must be an object with a 'kind'")
    kind = spec["kind"]
    table = spec.get("table")
    if table is not None:
        if not isinstance(table, list):
            raise ParseError("rule.table must be a list")
        table = tuple(parse_rational(x, "rule.table") for x in table)
    if kind == "mc":
        rule = make_fmc(n_agents)
    elif kind == "g":
        rule = make_fg(n_agents)
    elif kind == "custom":
        if table is None:
            raise ParseError("custom rule needs a table")
        return UtilityRule(table)
    else:
        raise ParseError(f"unknown rule kind {kind!r}")
    if table is not None and table != rule.table:
        raise InvariantError(f"table given for rule kind {kind!r} does not match the rule")
    return rule


def bundle_to_dict(b: InstanceBundle) -> dict:
    rule: dict = {"kind": b.rule.kind}
    if b.rule.kind not in ("mc", "g"):
        rule = {"kind": "custom", "table": [fmt_rational(x) for x in b.rule.table]}
    return {
        "label": b.label,
        "n_resources": b.game.n_resources,
        "agents": [[sorted(a) for a in acts] for acts in b.game.action_sets],
        "support": [
            {"values": [fmt_rational(x) for x in vec], "prob": fmt_rational(p)}
            for vec, p in zip(b.dist.support, b.dist.probs)
        ],
        "policy": [list(c) for c in b.policy.cells],
        "rule": rule,
    }


def loads(text: str) -> InstanceBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return bundle_from_dict(doc)


def dumps(b: InstanceBundle) -> str:
    return json.dumps(bundle_to_dict(b), indent=2) + "\n"


def load(path) -> InstanceBundle:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(b: InstanceBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(b))


# ---- CSV reports -----------------------------------------------------------

RATIONAL_COLUMNS = (
    "uninformed_best",
    "uninformed_worst",
    "informed_best",
    "informed_worst",
    "voi_plus",
    "voi_minus",
    "poa",
    "pos",
    "psi_est",
    "rho_est",
)
REPORT_COLUMNS = (
    ("label", "status", "n_cells", "rule")
    + tuple(c for name in RATIONAL_COLUMNS for c in (name, name + "_dec"))
    + ("bounds_ok", "bounds_failed")
)


def rational_cells(name: str, x: Fraction | None) -> dict[str, str]:
    if x is None:
        return {name: "", name + "_dec": ""}
    return {name: fmt_rational(x), name + "_dec": fmt_decimal(x)}


def report_row(label: str, rule: str, report=None, checks=None, status: str = "ok") -> dict[str, str]:
    """One CSV row; ``report=None`` leaves every metric blank (failed rows)."""
    row = {"label": label, "status": status, "rule": rule, "n_cells": ""}
    if report is not None:
        row["n_cells"] = str(report.n_cells)
        values = {
            "uninformed_best": report.uninformed_best,
            "uninformed_worst": report.uninformed_worst,
            "informed_best": report.informed_best,
            "informed_worst": report.informed_worst,
            "voi_plus": report.voi_plus,
            "voi_minus": report.voi_minus,
            "poa": report.poa,
            "pos": report.pos,
            "psi_est": report.psi_estimate,
            "rho_est": report.rho_estimate,
        }
    else:
        values = {}
    for name in RATIONAL_COLUMNS:
        row.update(rational_cells(name, values.get(name)))
    if checks is None:
        row["bounds_ok"] = ""
        row["bounds_failed"] = ""
    else:
        row["bounds_ok"] = "1" if all(c.ok for c in checks) else "0"
        row["bounds_failed"] = ";".join(c.name for c in checks if not c.ok)
    return row


def write_csv(rows: Iterable[Mapping[str, str]], columns: Iterable[str], fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n", extrasaction="raise")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in writer.fieldnames})


def csv_text(rows, columns) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()
