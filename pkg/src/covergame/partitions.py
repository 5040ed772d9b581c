"""Set partitions of ``range(k)`` and brute-force signaling search."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from covergame.equilibrium import enumerate_nash
from covergame.errors import CapExceeded
from covergame.model import SignalingPolicy, posterior_mean

MAX_SEARCH_SUPPORT = 10


def set_partitions(k: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of ``range(k)`` via restricted growth strings.

    Cells come out sorted and ordered by their smallest element.
    """
    if k == 0:
        yield ()
        return
    labels = [0] * k

    def rec(j: int, top: int):
        if j == k:
            cells = [[] for _ in range(top + 1)]
            for idx, lab in enumerate(labels):
                cells[lab].append(idx)
            yield tuple(tuple(c) for c in cells)
            return
        for lab in range(top + 2):
            labels[j] = lab
            yield from rec(j + 1, max(top, lab))

    labels[0] = 0
    yield from rec(1, 0)


def bell(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


@dataclass(frozen=True)
class RankedPolicy:
    rank: int
    policy: SignalingPolicy
    objective: Fraction


def search_signaling(bundle, objective: str = "best-case", cap: int | None = None) -> list[RankedPolicy]:
    """Score every deterministic signaling policy by equilibrium welfare.

    ``objective`` picks the best-case or worst-case Bayes-Nash expected
    welfare. Higher scores come first. Tied policies share a rank number
    and are listed coarsest first, then lexicographically.
    """
    if objective not in ("best-case", "worst-case"):
        raise ValueError(f"unknown objective {objective!r}")
    dist = bundle.dist
    if len(dist) > MAX_SEARCH_SUPPORT:
        raise CapExceeded(f"support of {len(dist)} states exceeds the partition search limit {MAX_SEARCH_SUPPORT}")
    # each cell's contribution p_k * W(cell) is reused across partitions
    memo: dict[tuple[int, ...], Fraction] = {}

    def cell_score(cell):
        if cell not in memo:
            ns = enumerate_nash(bundle.game, posterior_mean(dist, cell), bundle.rule, cap=cap)
            w = ns.best if objective == "best-case" else ns.worst
            memo[cell] = dist.cell_prob(cell) * w
        return memo[cell]

    scored = []
    for cells in set_partitions(len(dist)):
        score = sum((cell_score(c) for c in cells), Fraction(0))
        scored.append((score, SignalingPolicy(cells)))
    scored.sort(key=lambda t: (-t[0], len(t[1]), t[1].cells))
    # competition ranking: tied policies share the rank of the first of them
    out = []
    for i, (s, pol) in enumerate(scored):
        rank = out[-1].rank if out and out[-1].objective == s else i + 1
        out.append(RankedPolicy(rank, pol, s))
    return out
