"""Tight constructions and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from covergame.errors import ParameterError
from covergame.model import (
    CoverageGame,
    SignalingPolicy,
    UtilityRule,
    ValueDistribution,
    as_fraction,
    make_fg,
    make_fmc,
)


@dataclass(frozen=True)
class InstanceBundle:
    game: CoverageGame
    dist: ValueDistribution
    policy: SignalingPolicy
    rule: UtilityRule
    label: str

    def __post_init__(self):
        if not self.label:
            raise ParameterError("instance label must be nonempty")
        self.game.check_values(self.dist.support[0])
        self.policy.check(self.dist)
        self.rule.check(self.game)

    def with_policy(self, policy: SignalingPolicy) -> InstanceBundle:
        return InstanceBundle(self.game, self.dist, policy, self.rule, self.label)

    def with_rule(self, rule: UtilityRule) -> InstanceBundle:
        return InstanceBundle(self.game, self.dist, self.policy, rule, self.label)


def gen_voip_tight(R: int) -> InstanceBundle:
    """One agent picks one of R resources; exactly one of them is worth 1."""
    if R < 1:
        raise ParameterError("R must be at least 1")
    game = CoverageGame.from_lists(R, [[{r} for r in range(R)]])
    support = [tuple(Fraction(int(r == k)) for r in range(R)) for k in range(R)]
    return InstanceBundle(
        game,
        ValueDistribution.uniform(support),
        SignalingPolicy.full_revelation(R),
        make_fmc(1),
        f"voip-tight(R={R})",
    )


def gen_voim_tight(eps, p) -> InstanceBundle:
    """Two agents, three resources; the shared middle resource is uncertain.

    Agent 0 picks r0 or r1, agent 1 picks r1 or r2. Values are
    (1, 1 - eps, 0) with probability 1 - p and (1, 1 + eps(1 - p), 0)
    with probability p.
    """
    eps, p = as_fraction(eps), as_fraction(p)
    if not (0 < eps < 1 and 0 < p < 1):
        raise ParameterError("gen_voim_tight needs 0 < eps < 1 and 0 < p < 1")
    game = CoverageGame.from_lists(3, [[{0}, {1}], [{1}, {2}]])
    low = (Fraction(1), 1 - eps, Fraction(0))
    high = (Fraction(1), 1 + eps * (1 - p), Fraction(0))
    return InstanceBundle(
        game,
        ValueDistribution((low, high), (1 - p, p)),
        SignalingPolicy.full_revelation(2),
        make_fmc(2),
        f"voim-tight(eps={eps},p={p})",
    )


def voim_closed_form(eps, p) -> Fraction:
    eps, p = as_fraction(eps), as_fraction(p)
    return ((1 - p) * (2 - eps) + p * (1 + eps * (1 - p))) / (2 - eps * (1 - p) ** 2)


def gairing_closed_form(n: int, eps) -> Fraction:
    eps = as_fraction(eps)
    return 1 / (1 + (n - 1) * (make_fg(n)(n) - eps))


def gen_gairing_tight(n: int, eps) -> InstanceBundle:
    """Gairing-rule construction where full revelation lowers welfare.

    Resources 0..n-2 are private (one per agent 0..n-2, value
    ``f^g(n) - eps`` in every state); resources n-1..n-2+z are shared, with
    z = ceil(1 / (f^g(n) - eps)). Agent n-1 covers all shared resources at
    once; every other agent picks one shared resource or its private one.
    Exactly one shared resource is worth 1, uniformly at random.
    """
    eps = as_fraction(eps)
    if n < 2:
        raise ParameterError("gen_gairing_tight needs n >= 2")
    f = make_fg(n)
    top = f(n)
    if not 0 < eps < top:
        raise ParameterError(f"eps must lie in (0, {top})")
    private = top - eps
    z = ceil(1 / private)
    # agents 0..n-2 must strictly prefer private when uninformed (a shared
    # resource is then worth 1/z and shared by at least two agents) and the
    # valuable shared resource when informed
    if not max(f(c) for c in range(2, n + 1)) / z < private < top:
        raise ParameterError("parameters break the strict preferences the construction relies on")
    n_priv = n - 1
    shared = list(range(n_priv, n_priv + z))
    agents = [[{s} for s in shared] + [{i}] for i in range(n_priv)]
    agents.append([set(shared)])
    game = CoverageGame.from_lists(n_priv + z, agents)
    support = [
        tuple([private] * n_priv + [Fraction(int(j == k)) for j in range(z)])
        for k in range(z)
    ]
    return InstanceBundle(
        game,
        ValueDistribution.uniform(support),
        SignalingPolicy.full_revelation(z),
        f,
        f"gairing-tight(n={n},eps={eps})",
    )


def _random_rational(rng: random.Random, lo: Fraction, hi: Fraction, max_den: int) -> Fraction:
    while True:
        den = rng.randint(1, max_den)
        a, b = ceil(lo * den), int(hi * den)
        if a <= b:
            return Fraction(rng.randint(a, b), den)


def random_partition(k: int, rng: random.Random) -> SignalingPolicy:
    """Random set partition of ``range(k)`` via a restricted growth string."""
    labels = []
    top = -1
    for _ in range(k):
        lab = rng.randint(0, top + 1)
        top = max(top, lab)
        labels.append(lab)
    cells = [[j for j in range(k) if labels[j] == c] for c in range(top + 1)]
    return SignalingPolicy(tuple(tuple(c) for c in cells))


def gen_random(
    n: int = 2,
    R: int = 3,
    max_actions: int = 2,
    support_size: int = 2,
    value_range=(0, 1),
    seed: int = 0,
    max_den: int = 1000,
    prior: str = "uniform",
    policy: str = "full",
    rule: str = "mc",
) -> InstanceBundle:
    """Seeded random instance.

    ``prior`` is ``"uniform"`` or ``"random"``; ``policy`` is ``"full"``,
    ``"none"`` or ``"random"``; ``rule`` is ``"mc"`` or ``"g"``.
    """
    if n < 1 or R < 1 or max_actions < 1 or support_size < 1 or max_den < 1:
        raise ParameterError("sizes must be positive")
    if rule == "g" and n < 2:
        raise ParameterError("the Gairing rule needs n >= 2")
    lo, hi = (as_fraction(x) for x in value_range)
    if not 0 <= lo <= hi or hi == 0:
        raise ParameterError("value_range must satisfy 0 <= lo <= hi, hi > 0")
    rng = random.Random(seed)
    subsets = list(range(1, 2**R))
    agents = []
    for _ in range(n):
        k = rng.randint(1, min(max_actions, len(subsets)))
        masks = rng.sample(subsets, k)
        agents.append([{r for r in range(R) if m >> r & 1} for m in masks])
    game = CoverageGame.from_lists(R, agents)

    support: list[tuple[Fraction, ...]] = []
    attempts = 0
    while len(support) < support_size:
        vec = tuple(_random_rational(rng, lo, hi, max_den) for _ in range(R))
        if vec not in support:
            support.append(vec)
        attempts += 1
        if attempts > 1000 * support_size:
            raise ParameterError("could not draw enough distinct value vectors")
    if prior == "uniform":
        probs = [Fraction(1, support_size)] * support_size
    elif prior == "random":
        w = [rng.randint(1, max_den) for _ in range(support_size)]
        probs = [Fraction(x, sum(w)) for x in w]
    else:
        raise ParameterError(f"unknown prior kind {prior!r}")
    dist = ValueDistribution(tuple(support), tuple(probs))

    if policy == "full":
        pol = SignalingPolicy.full_revelation(support_size)
    elif policy == "none":
        pol = SignalingPolicy.no_information(support_size)
    elif policy == "random":
        pol = random_partition(support_size, rng)
    else:
        raise ParameterError(f"unknown policy kind {policy!r}")
    f = {"mc": make_fmc, "g": make_fg}.get(rule)
    if f is None:
        raise ParameterError(f"unknown rule kind {rule!r}")
    return InstanceBundle(game, dist, pol, f(n), f"random(seed={seed},n={n},R={R},k={support_size})")
