"""Coverage games, value uncertainty, signaling policies and utility rules.

Every quantity is an exact ``fractions.Fraction``. Resources and actions are
0-based indices. An allocation is a tuple holding one action index per agent;
a joint strategy is a tuple holding one allocation per policy cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from covergame.errors import InvariantError

Allocation = tuple[int, ...]
JointStrategy = tuple[Allocation, ...]
ValueVector = tuple[Fraction, ...]


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings. Floats are refused."""
    if isinstance(x, bool) or isinstance(x, float):
        raise InvariantError(f"inexact number {x!r}; use an int, Fraction or 'p/q' string")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if any(c in s for c in ".eE"):
            raise InvariantError(f"decimal literal {x!r} is not an exact rational")
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvariantError(f"cannot parse rational {x!r}") from exc
    raise InvariantError(f"unsupported number type {type(x).__name__}")


def value_vector(values: Iterable) -> ValueVector:
    vec = tuple(as_fraction(x) for x in values)
    if any(x < 0 for x in vec):
        raise InvariantError("resource values must be nonnegative")
    return vec


@dataclass(frozen=True)
class CoverageGame:
    """Agents choose among subsets of ``range(n_resources)``."""

    n_resources: int
    action_sets: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        if self.n_resources < 1:
            raise InvariantError("a game needs at least one resource")
        if not self.action_sets:
            raise InvariantError("a game needs at least one agent")
        canon = []
        for i, actions in enumerate(self.action_sets):
            acts = tuple(frozenset(int(r) for r in a) for a in actions)
            if not acts:
                raise InvariantError(f"agent {i} has no actions")
            if len(set(acts)) != len(acts):
                raise InvariantError(f"agent {i} has duplicate actions")
            for a in acts:
                if any(r < 0 or r >= self.n_resources for r in a):
                    raise InvariantError(f"agent {i} references a resource outside 0..{self.n_resources - 1}")
            canon.append(acts)
        object.__setattr__(self, "action_sets", tuple(canon))

    @classmethod
    def from_lists(cls, n_resources: int, agents: Sequence[Sequence[Iterable[int]]]) -> CoverageGame:
        return cls(n_resources, tuple(tuple(frozenset(a) for a in acts) for acts in agents))

    @property
    def n_agents(self) -> int:
        return len(self.action_sets)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.action_sets)

    @property
    def joint_size(self) -> int:
        size = 1
        for k in self.shape:
            size *= k
        return size

    def check_allocation(self, alloc: Sequence[int]) -> Allocation:
        alloc = tuple(int(x) for x in alloc)
        if len(alloc) != self.n_agents:
            raise InvariantError(f"allocation has {len(alloc)} entries for {self.n_agents} agents")
        for i, (a, k) in enumerate(zip(alloc, self.shape)):
            if not 0 <= a < k:
                raise InvariantError(f"agent {i} action index {a} out of range")
        return alloc

    def check_values(self, v: Sequence[Fraction]) -> None:
        if len(v) != self.n_resources:
            raise InvariantError(f"value vector has length {len(v)}, game has {self.n_resources} resources")

    def counts(self, alloc: Sequence[int]) -> list[int]:
        """Number of agents covering each resource."""
        c = [0] * self.n_resources
        for acts, a in zip(self.action_sets, alloc):
            for r in acts[a]:
                c[r] += 1
        return c


@dataclass(frozen=True)
class ValueDistribution:
    """Finite prior over value vectors; zero-probability states are rejected."""

    support: tuple[ValueVector, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(value_vector(x) for x in self.support)
        probs = tuple(as_fraction(p) for p in self.probs)
        if not support:
            raise InvariantError("empty support")
        if len(support) != len(probs):
            raise InvariantError("support and probs differ in length")
        if len({len(x) for x in support}) != 1:
            raise InvariantError("support vectors differ in length")
        if len(set(support)) != len(support):
            raise InvariantError("support vectors must be pairwise distinct")
        if any(p <= 0 for p in probs):
            raise InvariantError("every support point needs positive probability")
        if sum(probs) != 1:
            raise InvariantError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, support: Sequence[Iterable]) -> ValueDistribution:
        k = len(support)
        return cls(tuple(value_vector(x) for x in support), (Fraction(1, k),) * k)

    def __len__(self) -> int:
        return len(self.support)

    @property
    def dim(self) -> int:
        return len(self.support[0])

    def mean(self) -> ValueVector:
        return posterior_mean(self, range(len(self)))

    def cell_prob(self, cell: Iterable[int]) -> Fraction:
        return sum((self.probs[k] for k in cell), Fraction(0))


@dataclass(frozen=True)
class SignalingPolicy:
    """Deterministic signaling: a partition of support indices.

    Cells are stored sorted, ordered by their smallest element, so two equal
    partitions compare equal regardless of how they were written down.
    """

    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cells = [tuple(sorted(int(k) for k in c)) for c in self.cells]
        if not cells:
            raise InvariantError("a policy needs at least one cell")
        if any(not c for c in cells):
            raise InvariantError("policy cells must be nonempty")
        flat = [k for c in cells for k in c]
        if len(flat) != len(set(flat)):
            raise InvariantError("policy cells overlap")
        if sorted(flat) != list(range(len(flat))):
            raise InvariantError("policy cells must cover support indices 0..k-1 exactly")
        object.__setattr__(self, "cells", tuple(sorted(cells)))

    @classmethod
    def full_revelation(cls, k: int) -> SignalingPolicy:
        return cls(tuple((j,) for j in range(k)))

    @classmethod
    def no_information(cls, k: int) -> SignalingPolicy:
        return cls((tuple(range(k)),))

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def n_states(self) -> int:
        return sum(len(c) for c in self.cells)

    def signal_of(self) -> list[int]:
        """Map from support index to the index of its cell."""
        out = [0] * self.n_states
        for c, cell in enumerate(self.cells):
            for k in cell:
                out[k] = c
        return out

    def check(self, dist: ValueDistribution) -> None:
        if self.n_states != len(dist):
            raise InvariantError(f"policy partitions {self.n_states} states, distribution has {len(dist)}")

    def refines(self, other: SignalingPolicy) -> bool:
        """True if every cell of ``self`` lies inside some cell of ``other``."""
        owner = other.signal_of()
        return all(len({owner[k] for k in cell}) == 1 for cell in self.cells)


@dataclass(frozen=True)
class UtilityRule:
    """Payoff share ``f(x)`` for x = 1..n covering agents; ``f(0) = 0``."""

    table: tuple[Fraction, ...]
    kind: str = "custom"

    def __post_init__(self):
        table = tuple(as_fraction(x) for x in self.table)
        if not table:
            raise InvariantError("utility rule table is empty")
        if any(x < 0 for x in table):
            raise InvariantError("utility rule entries must be nonnegative")
        object.__setattr__(self, "table", table)

    def __call__(self, x: int) -> Fraction:
        return Fraction(0) if x == 0 else self.table[x - 1]

    def __len__(self) -> int:
        return len(self.table)

    def check(self, game: CoverageGame) -> None:
        if len(self.table) != game.n_agents:
            raise InvariantError(f"rule has {len(self.table)} entries for {game.n_agents} agents")


def make_fmc(n_agents: int) -> UtilityRule:
    """Marginal-contribution rule: pay only for resources covered alone."""
    if n_agents < 1:
        raise InvariantError("n_agents must be positive")
    return UtilityRule((Fraction(1),) + (Fraction(0),) * (n_agents - 1), kind="mc")


def make_fg(n_agents: int) -> UtilityRule:
    """Gairing's price-of-anarchy optimal rule for ``n_agents`` agents."""
    n = n_agents
    if n < 2:
        raise InvariantError("the Gairing rule needs at least two agents")
    head = Fraction(1, (n - 1) * factorial(n - 1))
    inv_fact = [Fraction(1, factorial(i)) for i in range(n)]
    denom = head + sum(inv_fact[1:n])
    table = tuple(
        factorial(x - 1) * (head + sum(inv_fact[x:n], Fraction(0))) / denom
        for x in range(1, n + 1)
    )
    return UtilityRule(table, kind="g")


def interpolate_rules(f0: UtilityRule, f1: UtilityRule, lam) -> UtilityRule:
    """Pointwise ``(1 - lam) * f0 + lam * f1``."""
    lam = as_fraction(lam)
    if not 0 <= lam <= 1:
        raise InvariantError("interpolation weight must lie in [0, 1]")
    if len(f0) != len(f1):
        raise InvariantError("rules have different lengths")
    if lam == 0:
        return f0
    if lam == 1:
        return f1
    return UtilityRule(tuple((1 - lam) * a + lam * b for a, b in zip(f0.table, f1.table)))


def welfare(game: CoverageGame, alloc: Sequence[int], v: Sequence[Fraction]) -> Fraction:
    """Total value of resources covered by at least one agent."""
    game.check_values(v)
    alloc = game.check_allocation(alloc)
    covered = set()
    for acts, a in zip(game.action_sets, alloc):
        covered |= acts[a]
    return sum((Fraction(v[r]) for r in covered), Fraction(0))


def utility(game: CoverageGame, alloc: Sequence[int], v: Sequence[Fraction], f: UtilityRule, agent: int) -> Fraction:
    if not 0 <= agent < game.n_agents:
        raise InvariantError(f"agent index {agent} out of range")
    game.check_values(v)
    alloc = game.check_allocation(alloc)
    counts = game.counts(alloc)
    return sum((Fraction(v[r]) * f(counts[r]) for r in game.action_sets[agent][alloc[agent]]), Fraction(0))


def potential(game: CoverageGame, alloc: Sequence[int], v: Sequence[Fraction], f: UtilityRule) -> Fraction:
    """Rosenthal potential ``sum_r v_r * (f(1) + ... + f(count_r))``."""
    game.check_values(v)
    alloc = game.check_allocation(alloc)
    total = Fraction(0)
    for r, c in enumerate(game.counts(alloc)):
        if c:
            total += Fraction(v[r]) * sum((f(j) for j in range(1, c + 1)), Fraction(0))
    return total


def posterior_mean(dist: ValueDistribution, cell: Iterable[int]) -> ValueVector:
    """Expected value vector conditioned on the state lying in ``cell``."""
    cell = list(cell)
    if not cell:
        raise InvariantError("posterior of an empty cell is undefined")
    if any(not 0 <= k < len(dist) for k in cell):
        raise InvariantError("cell index out of range")
    p = dist.cell_prob(cell)
    return tuple(
        sum((dist.probs[k] * dist.support[k][r] for k in cell), Fraction(0)) / p
        for r in range(dist.dim)
    )
