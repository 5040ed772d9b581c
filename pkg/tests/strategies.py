from fractions import Fraction

from hypothesis import strategies as st

from covergame import CoverageGame, UtilityRule

rationals = st.builds(Fraction, st.integers(0, 40), st.integers(1, 12))


@st.composite
def games(draw, max_agents=3, max_resources=4, max_actions=3):
    R = draw(st.integers(1, max_resources))
    n = draw(st.integers(1, max_agents))
    masks = st.integers(1, 2**R - 1)
    agents = []
    for _ in range(n):
        ms = draw(st.lists(masks, min_size=1, max_size=max_actions, unique=True))
        agents.append([{r for r in range(R) if m >> r & 1} for m in ms])
    return CoverageGame.from_lists(R, agents)


@st.composite
def allocations(draw, game):
    return tuple(draw(st.integers(0, k - 1)) for k in game.shape)


@st.composite
def values(draw, game):
    return tuple(draw(st.lists(rationals, min_size=game.n_resources, max_size=game.n_resources)))


@st.composite
def rules(draw, game):
    return UtilityRule(tuple(draw(st.lists(rationals, min_size=game.n_agents, max_size=game.n_agents))))
