"""Optimal welfare, price of anarchy/stability and value-of-informing ratios."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from covergame import _engine
from covergame.equilibrium import enumerate_bne, enumerate_nash
from covergame.errors import ParameterError, UndefinedRatio
from covergame.model import (
    Allocation,
    CoverageGame,
    SignalingPolicy,
    UtilityRule,
    ValueDistribution,
    posterior_mean,
    value_vector,
)

# certified rational enclosure E_LO < e < E_HI
E_LO = Fraction(27182818284, 10**10)
E_HI = Fraction(27182818285, 10**10)
# 1 - 1/e lies strictly between these
ONE_MINUS_INV_E_LO = 1 - 1 / E_LO
ONE_MINUS_INV_E_HI = 1 - 1 / E_HI


def w_star(game: CoverageGame, v: Sequence) -> tuple[Fraction, Allocation]:
    """Optimal welfare and one allocation attaining it."""
    v = value_vector(v)
    game.check_values(v)
    v_int, scale = _engine.scale_to_ints(v)
    best, alloc = _engine.max_welfare(game, v_int)
    return Fraction(best, scale), alloc


def poa_pos(game: CoverageGame, v: Sequence, f: UtilityRule, cap: int | None = None) -> tuple[Fraction, Fraction]:
    """(worst equilibrium / optimum, best equilibrium / optimum)."""
    opt, _ = w_star(game, v)
    if opt == 0:
        raise UndefinedRatio("optimal welfare is zero; price of anarchy/stability undefined")
    ne = enumerate_nash(game, v, f, cap=cap)
    return ne.worst / opt, ne.best / opt


def voi(
    game: CoverageGame,
    dist: ValueDistribution,
    policy: SignalingPolicy,
    f: UtilityRule,
    cap: int | None = None,
) -> tuple[Fraction, Fraction]:
    """Best-case and worst-case value of informing under ``policy``."""
    unin = enumerate_nash(game, dist.mean(), f, cap=cap)
    bne = enumerate_bne(game, dist, policy, f, cap=cap)
    return _ratio(bne.best, unin.best, "best"), _ratio(bne.worst, unin.worst, "worst")


def _ratio(num: Fraction, den: Fraction, which: str) -> Fraction:
    if den == 0:
        raise UndefinedRatio(f"uninformed {which}-case equilibrium welfare is zero")
    return num / den


@dataclass(frozen=True)
class HullEstimate:
    """Sampled minima of PoS (psi) and PoA (rho) over the support's hull.

    These are upper bounds on the true infima. ``None`` means every sampled
    point had zero optimal welfare.
    """

    psi: Fraction | None
    rho: Fraction | None
    n_points: int
    n_skipped: int

    def __iter__(self):
        return iter((self.psi, self.rho))


def hull_points(dist: ValueDistribution, n_samples: int, seed: int, max_weight: int = 1000):
    """Support vertices followed by ``n_samples`` seeded convex combinations.

    All-zero weight draws yield ``None`` so callers can count them.
    """
    yield from dist.support
    rng = random.Random(seed)
    k = len(dist)
    for _ in range(n_samples):
        w = [rng.randint(0, max_weight) for _ in range(k)]
        total = sum(w)
        if total == 0:
            yield None
            continue
        yield tuple(
            sum((Fraction(wk, total) * x[r] for wk, x in zip(w, dist.support)), Fraction(0)) for r in range(dist.dim)
        )


def hull_infimum_estimate(
    game: CoverageGame,
    dist: ValueDistribution,
    f: UtilityRule,
    n_samples: int,
    seed: int = 0,
    cap: int | None = None,
) -> HullEstimate:
    if n_samples < len(dist):
        raise ParameterError(f"n_samples must be at least the support size {len(dist)}")
    psi = rho = None
    used = skipped = 0
    for v in hull_points(dist, n_samples, seed):
        if v is None or not any(v):
            skipped += 1
            continue
        a, s = poa_pos(game, v, f, cap=cap)
        rho = a if rho is None else min(rho, a)
        psi = s if psi is None else min(psi, s)
        used += 1
    return HullEstimate(psi, rho, used, skipped)


@dataclass(frozen=True)
class MetricReport:
    """Everything derived from one (game, prior, policy, rule) configuration.

    Ratio fields are ``None`` when their denominator is zero.
    """

    n_cells: int
    w_star_uninformed: Fraction
    w_star_cells: tuple[Fraction, ...]
    uninformed_best: Fraction
    uninformed_worst: Fraction
    informed_best: Fraction
    informed_worst: Fraction
    voi_plus: Fraction | None
    voi_minus: Fraction | None
    poa: Fraction | None
    pos: Fraction | None
    psi_estimate: Fraction | None = None
    rho_estimate: Fraction | None = None
    hull_points: int = 0
    hull_skipped: int = 0
    n_bne: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def _safe_div(a: Fraction, b: Fraction) -> Fraction | None:
    return None if b == 0 else a / b


def analyze(
    game: CoverageGame,
    dist: ValueDistribution,
    policy: SignalingPolicy,
    f: UtilityRule,
    n_samples: int | None = None,
    seed: int = 0,
    cap: int | None = None,
) -> MetricReport:
    """Full metric report. ``n_samples=None`` samples as many points as support states."""
    policy.check(dist)
    mean = dist.mean()
    unin = enumerate_nash(game, mean, f, cap=cap)
    bne = enumerate_bne(game, dist, policy, f, cap=cap)
    opt, _ = w_star(game, mean)
    cell_opt = tuple(w_star(game, ns.values)[0] for ns in bne.cells)
    hull = hull_infimum_estimate(game, dist, f, len(dist) if n_samples is None else n_samples, seed, cap=cap)
    return MetricReport(
        n_cells=len(policy),
        w_star_uninformed=opt,
        w_star_cells=cell_opt,
        uninformed_best=unin.best,
        uninformed_worst=unin.worst,
        informed_best=bne.best,
        informed_worst=bne.worst,
        voi_plus=_safe_div(bne.best, unin.best),
        voi_minus=_safe_div(bne.worst, unin.worst),
        poa=_safe_div(unin.worst, opt),
        pos=_safe_div(unin.best, opt),
        psi_estimate=hull.psi,
        rho_estimate=hull.rho,
        hull_points=hull.n_points,
        hull_skipped=hull.n_skipped,
        n_bne=len(bne),
    )


def at_least_one_minus_inv_e(x: Fraction) -> bool | None:
    """Decide ``x >= 1 - 1/e`` with the rational enclosure of e.

    Returns ``None`` when the enclosure is too coarse to decide.
    """
    if x >= 1:
        return True
    gap = 1 - x
    if E_HI * gap <= 1:
        return True
    if E_LO * gap > 1:
        return False
    return None


@dataclass(frozen=True)
class BoundCheck:
    name: str
    status: str  # pass | fail | inconclusive | informational | undefined
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "informational")


def _cmp(name: str, holds: bool | None, detail: str) -> BoundCheck:
    status = {True: "pass", False: "fail", None: "inconclusive"}[holds]
    return BoundCheck(name, status, detail)


def check_voi_bounds(report: MetricReport, policy: SignalingPolicy, f_kind: str) -> list[BoundCheck]:
    """Compare a report against the value-of-informing bounds for its rule.

    ``f_kind`` is ``"mc"``, ``"g"`` or anything else. The hull-infimum
    sandwich is always reported as informational because the sampled
    estimates only bound the infima from above.
    """
    m = len(policy)
    vp, vm = report.voi_plus, report.voi_minus
    out: list[BoundCheck] = []

    def need(name, x):
        if x is None:
            out.append(BoundCheck(name, "undefined", "zero uninformed equilibrium welfare"))
            return False
        return True

    if f_kind == "mc":
        if need("voi_plus_range", vp):
            out.append(_cmp("voi_plus>=1", vp >= 1, f"{vp}"))
            out.append(_cmp("voi_plus<=|Pi|", vp <= m, f"{vp} vs {m}"))
        if need("voi_minus_range", vm):
            out.append(_cmp("voi_minus>=1/2", vm >= Fraction(1, 2), f"{vm}"))
            out.append(_cmp("voi_minus<=2|Pi|", vm <= 2 * m, f"{vm} vs {2 * m}"))
        if report.poa is not None:
            out.append(_cmp("poa>=1/2", report.poa >= Fraction(1, 2), f"{report.poa}"))
    elif f_kind == "g":
        if need("voi_plus>=1-1/e", vp):
            out.append(_cmp("voi_plus>=1-1/e", at_least_one_minus_inv_e(vp), f"{vp}"))
        if need("voi_minus>=1-1/e", vm):
            out.append(_cmp("voi_minus>=1-1/e", at_least_one_minus_inv_e(vm), f"{vm}"))

    psi, rho = report.psi_estimate, report.rho_estimate
    if psi is not None and vp is not None and psi > 0:
        holds = psi <= vp <= m / psi
        out.append(BoundCheck("hull_sandwich_plus", "informational", f"psi_est={psi} {'holds' if holds else 'violated'}"))
    if rho is not None and vm is not None and rho > 0:
        holds = rho <= vm <= m / rho
        out.append(BoundCheck("hull_sandwich_minus", "informational", f"rho_est={rho} {'holds' if holds else 'violated'}"))
    return out


def rule_kind(f: UtilityRule) -> str:
    return f.kind if f.kind in ("mc", "g") else "other"


def posterior_means(dist: ValueDistribution, policy: SignalingPolicy):
    return [posterior_mean(dist, c) for c in policy.cells]
