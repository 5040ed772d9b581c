"""Exact integer kernels behind equilibrium enumeration and optimal welfare.

Values and utility-rule entries are scaled to integers by the lcm of their
denominators. Scaling by a positive constant changes neither the Nash set nor
the welfare ordering, and integer arithmetic stays exact. Arrays use int64
when a worst-case magnitude bound fits, Python ints (object dtype) otherwise.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

import numpy as np

from covergame.errors import CapExceeded
from covergame.model import CoverageGame, UtilityRule

DEFAULT_CAP = 10**7
CHUNK = 1 << 15
_INT64_SAFE = 1 << 62


def default_cap() -> int:
    env = os.environ.get("COVERGAME_CAP")
    return int(env) if env else DEFAULT_CAP


def scale_to_ints(xs: Sequence[Fraction]) -> tuple[list[int], int]:
    """Return integers ``xs * L`` and the scale ``L``."""
    scale = lcm(*(Fraction(x).denominator for x in xs)) if xs else 1
    return [int(Fraction(x) * scale) for x in xs], scale


def _dtype_for(bound: int):
    return np.int64 if bound < _INT64_SAFE else object


def incidence(game: CoverageGame) -> list[np.ndarray]:
    """Per agent, a 0/1 matrix of shape (n_actions, n_resources)."""
    mats = []
    for acts in game.action_sets:
        m = np.zeros((len(acts), game.n_resources), dtype=np.int64)
        for a, res in enumerate(acts):
            m[a, sorted(res)] = 1
        mats.append(m)
    return mats


def prune_dominated(game: CoverageGame, v: Sequence[int], f: Sequence[int]) -> list[list[int]]:
    """Iteratively drop actions that are strictly dominated for their agent.

    ``v`` and ``f`` are integer-scaled; ``f[x]`` is the share with x agents
    (``f[0] == 0``). An action is dropped when some other remaining action's
    worst-case utility beats its best-case utility, where the cases range
    over every count of other agents that the remaining actions allow.
    Strictly dominated actions appear in no pure Nash equilibrium, so the
    surviving lists contain every equilibrium.
    """
    n, R = game.n_agents, game.n_resources
    alive = [list(range(len(a))) for a in game.action_sets]
    changed = True
    while changed:
        changed = False
        must = [[0] * R for _ in range(n)]
        may = [[0] * R for _ in range(n)]
        for i, acts in enumerate(game.action_sets):
            sets = [acts[a] for a in alive[i]]
            common = frozenset.intersection(*sets)
            union = frozenset.union(*sets)
            for r in common:
                must[i][r] = 1
            for r in union:
                may[i][r] = 1
        lo_tot = [sum(must[i][r] for i in range(n)) for r in range(R)]
        hi_tot = [sum(may[i][r] for i in range(n)) for r in range(R)]
        for i, acts in enumerate(game.action_sets):
            if len(alive[i]) == 1:
                continue
            best = []
            worst = []
            for r in range(R):
                lo = lo_tot[r] - must[i][r]
                hi = hi_tot[r] - may[i][r]
                shares = [f[1 + c] for c in range(lo, hi + 1)]
                worst.append(v[r] * min(shares))
                best.append(v[r] * max(shares))
            lower = {a: sum(worst[r] for r in acts[a]) for a in alive[i]}
            upper = {a: sum(best[r] for r in acts[a]) for a in alive[i]}
            floor = max(lower.values())
            keep = [a for a in alive[i] if upper[a] >= floor]
            if len(keep) < len(alive[i]):
                alive[i] = keep
                changed = True
                # bounds of other agents depend on this agent's set
                break
    return alive


class JointScan:
    """Chunked walk over a product of per-agent action lists.

    Profiles are visited in lexicographic order of the action lists, so
    sorted input lists give canonically ordered output.
    """

    def __init__(self, lists: Sequence[Sequence[int]], cap: int):
        self.lists = [np.asarray(a, dtype=np.int64) for a in lists]
        self.shape = tuple(len(a) for a in lists)
        self.size = 1
        for k in self.shape:
            self.size *= k
        if self.size > cap:
            raise CapExceeded(f"joint action space of {self.size} profiles exceeds cap {cap}")

    def chunks(self) -> Iterator[np.ndarray]:
        for start in range(0, self.size, CHUNK):
            flat = np.arange(start, min(start + CHUNK, self.size), dtype=np.int64)
            pos = np.unravel_index(flat, self.shape)
            yield np.stack([lst[p] for lst, p in zip(self.lists, pos)], axis=1)


def nash_scan(
    game: CoverageGame,
    v: Sequence[int],
    f: Sequence[int],
    cap: int,
    prune: bool = True,
) -> tuple[list[tuple[int, ...]], list[int]]:
    """All pure Nash profiles and their scaled welfare.

    Candidates come from the pruned space; deviations are always checked
    against every original action.
    """
    inc = incidence(game)
    lists = prune_dominated(game, v, f) if prune else [list(range(k)) for k in game.shape]
    scan = JointScan(lists, cap)
    bound = sum(v) * max(f) + 1
    dt = _dtype_for(bound)
    v_arr = np.array(v, dtype=dt)
    f_arr = np.array(f, dtype=dt)
    eqs: list[tuple[int, ...]] = []
    wel: list[int] = []
    for prof in scan.chunks():
        counts = sum(inc[i][prof[:, i]] for i in range(game.n_agents))
        ok = np.ones(len(prof), dtype=bool)
        for i in range(game.n_agents):
            mine = inc[i][prof[:, i]]
            shares = f_arr[counts - mine + 1] * v_arr
            options = shares @ inc[i].T.astype(dt)
            current = options[np.arange(len(prof)), prof[:, i]]
            ok &= np.asarray(current >= options.max(axis=1), dtype=bool)
        if ok.any():
            hits = prof[ok]
            w = (counts[ok] > 0).astype(dt) @ v_arr
            eqs.extend(tuple(int(x) for x in row) for row in hits)
            wel.extend(int(x) for x in w)
    return eqs, wel


def max_welfare(game: CoverageGame, v: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Exact maximum coverage by depth-first branch and bound.

    The bound adds, to the value already covered, every uncovered resource
    that some later agent could still reach.
    """
    n = game.n_agents
    # agents with high-reach actions first tighten the bound early
    order = sorted(range(n), key=lambda i: -max(sum(v[r] for r in a) for a in game.action_sets[i]))
    reach_after = [frozenset()] * (n + 1)
    for pos in range(n - 1, -1, -1):
        i = order[pos]
        reach_after[pos] = reach_after[pos + 1].union(*game.action_sets[i])
    best_val = -1
    best_choice: list[int] = [0] * n
    choice = [0] * n

    def visit(pos: int, covered: frozenset, val: int):
        nonlocal best_val, best_choice
        if pos == n:
            if val > best_val:
                best_val = val
                best_choice = list(choice)
            return
        if val + sum(v[r] for r in reach_after[pos] - covered) <= best_val:
            return
        i = order[pos]
        acts = game.action_sets[i]
        gains = sorted(range(len(acts)), key=lambda a: (-sum(v[r] for r in acts[a] - covered), a))
        for a in gains:
            choice[i] = a
            new = acts[a] - covered
            visit(pos + 1, covered | new, val + sum(v[r] for r in new))

    visit(0, frozenset(), 0)
    return best_val, tuple(best_choice)
