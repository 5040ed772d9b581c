from fractions import Fraction as F
from math import ceil

import pytest

import oracles
from covergame import (
    ParameterError,
    SignalingPolicy,
    enumerate_nash,
    gen_gairing_tight,
    gen_random,
    gen_voim_tight,
    gen_voip_tight,
    make_fg,
    voi,
)
from covergame.instances import gairing_closed_form, voim_closed_form


def test_voip_structure():
    b = gen_voip_tight(3)
    assert b.game.n_agents == 1 and b.game.shape == (3,)
    assert b.dist.support == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert b.dist.probs == (F(1, 3),) * 3
    assert b.policy == SignalingPolicy.full_revelation(3)


def test_voip_uninformed_welfare():
    b = gen_voip_tight(3)
    ne = enumerate_nash(b.game, b.dist.mean(), b.rule)
    assert len(ne) == 3 and ne.best == F(1, 3)


@pytest.mark.parametrize("R, expected", [(1, 1), (3, 3)])
def test_voip_values(R, expected):
    b = gen_voip_tight(R)
    assert voi(b.game, b.dist, b.policy, b.rule)[0] == expected


def test_voim_examples():
    b = gen_voim_tight("1/2", "1/2")
    assert voi(b.game, b.dist, b.policy, b.rule)[1] == F(11, 15) == voim_closed_form(F(1, 2), F(1, 2))
    assert enumerate_nash(b.game, b.dist.mean(), b.rule).allocations == ((0, 0),)


def test_voim_small_eps_near_half():
    eps, p = F(1, 1000), 1 - F(1, 1000)
    b = gen_voim_tight(eps, p)
    vm = voi(b.game, b.dist, b.policy, b.rule)[1]
    assert vm == voim_closed_form(eps, p)
    assert F(499, 1000) < vm < F(502, 1000)


@pytest.mark.parametrize("eps, p", [(0, "1/2"), (1, "1/2"), ("1/2", 0), ("1/2", 1), ("-1/2", "1/2")])
def test_voim_rejects_out_of_range(eps, p):
    with pytest.raises(ParameterError):
        gen_voim_tight(eps, p)


def test_gairing_n2():
    b = gen_gairing_tight(2, F(1, 10))
    # f^g(2) = 1/2, private value 2/5, z = ceil(5/2) = 3
    assert b.game.n_resources == 1 + 3
    assert b.dist.support[0] == (F(2, 5), 1, 0, 0)
    assert voi(b.game, b.dist, b.policy, b.rule) == (F(5, 7), F(5, 7))
    unin = enumerate_nash(b.game, b.dist.mean(), b.rule)
    assert len(unin) == 1 and unin.best == F(7, 5)


@pytest.mark.parametrize("n", range(2, 7))
@pytest.mark.parametrize("factor", [F(1, 2), F(1, 10), F(1, 1000)])
def test_gairing_closed_form_and_structure(n, factor):
    eps = make_fg(n)(n) * factor
    b = gen_gairing_tight(n, eps)
    z = ceil(1 / (make_fg(n)(n) - eps))
    assert b.game.n_resources == n - 1 + z
    assert len(b.dist) == z
    vp, vm = voi(b.game, b.dist, b.policy, b.rule)
    assert vp == vm == gairing_closed_form(n, eps)


def test_gairing_small_case_against_bruteforce():
    b = gen_gairing_tight(3, F(1, 20))
    for cell in b.policy.cells:
        from covergame import posterior_mean

        v = posterior_mean(b.dist, cell)
        assert list(enumerate_nash(b.game, v, b.rule).allocations) == oracles.nash(b.game, v, b.rule.table)
    assert list(enumerate_nash(b.game, b.dist.mean(), b.rule).allocations) == oracles.nash(
        b.game, b.dist.mean(), b.rule.table
    )


@pytest.mark.parametrize("n, eps", [(1, "1/10"), (2, 0), (2, "1/2"), (3, 1)])
def test_gairing_rejects_bad_params(n, eps):
    with pytest.raises(ParameterError):
        gen_gairing_tight(n, eps)


def test_random_is_deterministic():
    kw = dict(n=3, R=4, max_actions=3, support_size=3, prior="random", policy="random")
    assert gen_random(seed=9, **kw) == gen_random(seed=9, **kw)
    assert gen_random(seed=9, **kw) != gen_random(seed=10, **kw)


@pytest.mark.parametrize("seed", range(30))
def test_random_bundles_are_valid(seed):
    b = gen_random(n=3, R=4, max_actions=3, support_size=4, seed=seed, prior="random", policy="random")
    assert sum(b.dist.probs) == 1 and all(p > 0 for p in b.dist.probs)
    assert all(0 <= x <= 1 for vec in b.dist.support for x in vec)
    assert all(x.denominator <= 1000 for vec in b.dist.support for x in vec)
    assert b.policy.n_states == 4


@pytest.mark.parametrize("policy", ["full", "none", "random"])
def test_random_single_state_voi_is_one(policy):
    for seed in range(10):
        b = gen_random(n=2, R=3, support_size=1, seed=seed, policy=policy, value_range=("1/10", 1))
        assert voi(b.game, b.dist, b.policy, b.rule) == (1, 1)
