"""Pure Nash and Bayes-Nash equilibria of coverage games."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from covergame import _engine
from covergame.errors import CapExceeded, InvariantError
from covergame.model import (
    Allocation,
    CoverageGame,
    JointStrategy,
    SignalingPolicy,
    UtilityRule,
    ValueDistribution,
    ValueVector,
    posterior_mean,
    utility,
    value_vector,
    welfare,
)

DEFAULT_BNE_CAP = 10**6


@dataclass(frozen=True)
class NashSet:
    game: CoverageGame
    values: ValueVector
    rule: UtilityRule
    allocations: tuple[Allocation, ...]
    welfares: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.allocations)

    def __iter__(self):
        return iter(self.allocations)

    def __contains__(self, alloc) -> bool:
        return tuple(alloc) in self.allocations

    @property
    def best(self) -> Fraction:
        return max(self.welfares)

    @property
    def worst(self) -> Fraction:
        return min(self.welfares)


def _scaled(values: Sequence[Fraction], rule: UtilityRule) -> tuple[list[int], list[int]]:
    v_int, _ = _engine.scale_to_ints(values)
    f_int, _ = _engine.scale_to_ints(rule.table)
    return v_int, [0] + f_int


def enumerate_nash(
    game: CoverageGame,
    v: Sequence,
    f: UtilityRule,
    cap: int | None = None,
    prune: bool = True,
) -> NashSet:
    """Every pure Nash equilibrium, in lexicographic order of action indices.

    Ties count as equilibria: an agent indifferent to a deviation does not
    break the profile. ``cap`` limits the number of candidate profiles
    examined after strictly dominated actions are removed; ``prune=False``
    disables that reduction.
    """
    v = value_vector(v)
    game.check_values(v)
    f.check(game)
    cap = _engine.default_cap() if cap is None else cap
    v_int, f_int = _scaled(v, f)
    eqs, _ = _engine.nash_scan(game, v_int, f_int, cap, prune=prune)
    return NashSet(game, v, f, tuple(eqs), tuple(welfare(game, a, v) for a in eqs))


def best_response_path(
    game: CoverageGame,
    v: Sequence,
    f: UtilityRule,
    init: Sequence[int],
    schedule: Callable[[int], Sequence[int]] | None = None,
) -> Iterator[Allocation]:
    """Yield the allocations visited by best-response dynamics, ``init`` first.

    ``schedule(round_index)`` gives the agent order for each sweep (default
    round robin). An agent moves only on strict improvement, to its
    lowest-indexed best response, so the potential strictly increases at
    every move and the walk stops after a sweep with no moves.
    """
    v = value_vector(v)
    alloc = list(game.check_allocation(init))
    yield tuple(alloc)
    rnd = 0
    while True:
        order = schedule(rnd) if schedule else range(game.n_agents)
        moved = False
        for i in order:
            current = utility(game, alloc, v, f, i)
            best_a, best_u = alloc[i], current
            for a in range(len(game.action_sets[i])):
                trial = alloc.copy()
                trial[i] = a
                u = utility(game, trial, v, f, i)
                if u > best_u:
                    best_a, best_u = a, u
            if best_a != alloc[i]:
                alloc[i] = best_a
                moved = True
                yield tuple(alloc)
        if not moved:
            return
        rnd += 1


def best_response_dynamics(game, v, f, init, schedule=None) -> Allocation:
    *_, last = best_response_path(game, v, f, init, schedule)
    return last


@dataclass(frozen=True)
class BayesNashSet:
    """Bayes-Nash equilibria as a product of per-cell Nash sets.

    The full product is only materialized on demand through
    :meth:`strategies`, which refuses to produce more than ``cap`` items.
    """

    game: CoverageGame
    dist: ValueDistribution
    policy: SignalingPolicy
    rule: UtilityRule
    cells: tuple[NashSet, ...]
    cell_probs: tuple[Fraction, ...]
    cap: int = DEFAULT_BNE_CAP

    def __len__(self) -> int:
        size = 1
        for ns in self.cells:
            size *= len(ns)
        return size

    def strategies(self) -> Iterator[JointStrategy]:
        if len(self) > self.cap:
            raise CapExceeded(f"{len(self)} Bayes-Nash strategies exceed cap {self.cap}")
        return itertools.product(*(ns.allocations for ns in self.cells))

    def expected_welfare(self, strategy: JointStrategy) -> Fraction:
        return sum(
            (p * welfare(self.game, a, ns.values) for p, a, ns in zip(self.cell_probs, strategy, self.cells)),
            Fraction(0),
        )

    @property
    def best(self) -> Fraction:
        return sum((p * ns.best for p, ns in zip(self.cell_probs, self.cells)), Fraction(0))

    @property
    def worst(self) -> Fraction:
        return sum((p * ns.worst for p, ns in zip(self.cell_probs, self.cells)), Fraction(0))


def enumerate_bne(
    game: CoverageGame,
    dist: ValueDistribution,
    policy: SignalingPolicy,
    f: UtilityRule,
    cap: int | None = None,
    strategy_cap: int = DEFAULT_BNE_CAP,
) -> BayesNashSet:
    """Compose per-signal Nash sets at each cell's posterior mean."""
    policy.check(dist)
    game.check_values(dist.support[0])
    cells = tuple(enumerate_nash(game, posterior_mean(dist, c), f, cap=cap) for c in policy.cells)
    probs = tuple(dist.cell_prob(c) for c in policy.cells)
    return BayesNashSet(game, dist, policy, f, cells, probs, strategy_cap)


def expected_utility(game, dist, policy, f, strategy: JointStrategy, agent: int) -> Fraction:
    """Expected payoff of ``agent``, averaging over support states directly."""
    signal = policy.signal_of()
    return sum(
        (p * utility(game, strategy[signal[k]], x, f, agent) for k, (x, p) in enumerate(zip(dist.support, dist.probs))),
        Fraction(0),
    )


def expected_welfare(game, dist, policy, strategy: JointStrategy) -> Fraction:
    signal = policy.signal_of()
    return sum(
        (p * welfare(game, strategy[signal[k]], x) for k, (x, p) in enumerate(zip(dist.support, dist.probs))),
        Fraction(0),
    )


def _check_strategy(game, policy, strategy) -> JointStrategy:
    if len(strategy) != len(policy):
        raise InvariantError(f"strategy has {len(strategy)} allocations for {len(policy)} cells")
    return tuple(game.check_allocation(a) for a in strategy)


def verify_bne(game, dist, policy, f, strategy: JointStrategy) -> bool:
    """Check the Bayes-Nash condition against every signal-contingent deviation.

    Each agent's deviations range over all maps from signals to its actions,
    and payoffs are expectations over the raw support states.
    """
    policy.check(dist)
    strategy = _check_strategy(game, policy, strategy)
    m = len(policy)
    for i in range(game.n_agents):
        base = expected_utility(game, dist, policy, f, strategy, i)
        for dev in itertools.product(range(len(game.action_sets[i])), repeat=m):
            alt = tuple(a[:i] + (d,) + a[i + 1:] for a, d in zip(strategy, dev))
            if expected_utility(game, dist, policy, f, alt, i) > base:
                return False
    return True


def direct_bne(
    game: CoverageGame,
    dist: ValueDistribution,
    policy: SignalingPolicy,
    f: UtilityRule,
    cap: int | None = None,
) -> list[JointStrategy]:
    """All Bayes-Nash strategies by brute force over every signal-contingent profile.

    Same condition as :func:`verify_bne`, vectorized over all strategies:
    for each agent, every deviation map is scored against every strategy
    using state-by-state payoffs weighted by prior probability.
    """
    policy.check(dist)
    cap = _engine.default_cap() if cap is None else cap
    m, K = len(policy), game.joint_size
    if K**m > cap:
        raise CapExceeded(f"{K**m} signal-contingent strategies exceed cap {cap}")
    joint = np.array(list(itertools.product(*(range(k) for k in game.shape))), dtype=np.int64).reshape(K, game.n_agents)
    inc = _engine.incidence(game)
    counts = sum(inc[i][joint[:, i]] for i in range(game.n_agents))
    f_int, _ = _engine.scale_to_ints(f.table)
    f_int = [0] + f_int
    v_all, _ = _engine.scale_to_ints([x for vec in dist.support for x in vec])
    w_int, _ = _engine.scale_to_ints(dist.probs)
    R = game.n_resources
    states = [v_all[k * R:(k + 1) * R] for k in range(len(dist))]
    bound = max(w_int) * len(dist) * max(sum(s) for s in states) * max(f_int) * m + 1
    dt = _engine._dtype_for(bound)
    f_arr = np.array(f_int, dtype=dt)
    signal = policy.signal_of()

    # strategy s = (joint index per cell), enumerated lexicographically
    strat = np.array(list(itertools.product(range(K), repeat=m)), dtype=np.int64).reshape(-1, m)
    ok = np.ones(len(strat), dtype=bool)
    for i in range(game.n_agents):
        others = counts - inc[i][joint[:, i]]
        # per-cell table: weighted payoff of agent i for (joint profile, own action)
        tables = [np.zeros((K, game.shape[i]), dtype=dt) for _ in range(m)]
        for k, state in enumerate(states):
            shares = f_arr[others + 1] * np.array(state, dtype=dt)
            tables[signal[k]] = tables[signal[k]] + w_int[k] * (shares @ inc[i].T.astype(dt))
        devs = np.array(list(itertools.product(range(game.shape[i]), repeat=m)), dtype=np.int64).reshape(-1, m)
        base = sum(tables[c][strat[:, c], joint[strat[:, c], i]] for c in range(m))
        scored = sum(tables[c][strat[:, c]][:, devs[:, c]] for c in range(m))
        ok &= np.asarray(base >= scored.max(axis=1), dtype=bool)
    return [tuple(tuple(int(x) for x in joint[j]) for j in row) for row in strat[ok]]


__all__ = [
    "NashSet",
    "BayesNashSet",
    "enumerate_nash",
    "best_response_path",
    "best_response_dynamics",
    "enumerate_bne",
    "verify_bne",
    "direct_bne",
    "expected_utility",
    "expected_welfare",
]
