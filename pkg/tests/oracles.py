"""Brute-force reference computations, deliberately naive.

Nothing here touches the package's integer kernels or dominance pruning.
"""

import itertools
from fractions import Fraction


def covered(game, alloc):
    out = set()
    for acts, a in zip(game.action_sets, alloc):
        out |= acts[a]
    return out


def welfare(game, alloc, v):
    return sum((Fraction(v[r]) for r in covered(game, alloc)), Fraction(0))


def counts(game, alloc):
    c = [0] * game.n_resources
    for acts, a in zip(game.action_sets, alloc):
        for r in acts[a]:
            c[r] += 1
    return c


def utility(game, alloc, v, table, i):
    c = counts(game, alloc)
    return sum((Fraction(v[r]) * table[c[r] - 1] for r in game.action_sets[i][alloc[i]]), Fraction(0))


def profiles(game):
    return itertools.product(*(range(len(a)) for a in game.action_sets))


def nash(game, v, table):
    out = []
    for a in profiles(game):
        stable = True
        for i in range(game.n_agents):
            u = utility(game, a, v, table, i)
            for b in range(len(game.action_sets[i])):
                dev = a[:i] + (b,) + a[i + 1:]
                if utility(game, dev, v, table, i) > u:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(a)
    return out


def w_star(game, v):
    return max(welfare(game, a, v) for a in profiles(game))


def marginal_contribution(game, alloc, v, i):
    without = set()
    for j, (acts, a) in enumerate(zip(game.action_sets, alloc)):
        if j != i:
            without |= acts[a]
    return welfare(game, alloc, v) - sum((Fraction(v[r]) for r in without), Fraction(0))


def fg_table(n):
    """Gairing rule from its defining sums, written out term by term."""
    from math import factorial

    def partial(lo):
        s = Fraction(1, (n - 1) * factorial(n - 1))
        for i in range(lo, n):
            s += Fraction(1, factorial(i))
        return s

    return [factorial(x - 1) * partial(x) / partial(1) for x in range(1, n + 1)]
