"""Acceptance suite: eight end-to-end criteria, each with its own time budget.

Every test prints one ``PASS``/``FAIL`` line (with wall time) straight to the
terminal, so ``pytest tests/test_acceptance.py -v`` doubles as a report.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction as F

import pytest

import oracles
from covergame import (
    SignalingPolicy,
    UtilityRule,
    analyze,
    best_response_dynamics,
    enumerate_bne,
    enumerate_nash,
    gen_gairing_tight,
    gen_random,
    gen_voim_tight,
    gen_voip_tight,
    make_fg,
    poa_pos,
    potential,
    utility,
    verify_bne,
    voi,
    w_star,
)
from covergame.equilibrium import direct_bne
from covergame.instances import gairing_closed_form, voim_closed_form
from covergame.metrics import ONE_MINUS_INV_E_HI, ONE_MINUS_INV_E_LO, at_least_one_minus_inv_e, check_voi_bounds
from covergame.model import posterior_mean
from covergame.partitions import search_signaling, set_partitions


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        status, note = "FAIL", ""
        try:
            yield
            elapsed = time.perf_counter() - start
            if elapsed < budget:
                status = "PASS"
            else:
                note = f" over budget {budget:g}s"
                raise AssertionError(f"criterion {number} took {elapsed:.2f}s, budget {budget:g}s")
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                print(f"\n[acceptance {number}] {status}  {title}  ({elapsed:.2f}s / {budget:g}s){note}")

    return run


def test_voi_plus_tightness(criterion):
    with criterion(1, "VoI+ = R on the one-agent R-state family", 1.0):
        for R in range(1, 7):
            b = gen_voip_tight(R)
            rep = analyze(b.game, b.dist, b.policy, b.rule)
            assert rep.voi_plus == R, (R, rep.voi_plus)


def test_voi_minus_approaches_half(criterion):
    with criterion(2, "VoI- -> 1/2 family and its closed form", 1.0):
        b = gen_voim_tight(F(1, 1000), 1 - F(1, 1000))
        vm = analyze(b.game, b.dist, b.policy, b.rule).voi_minus
        assert F(1, 2) <= vm <= F(1, 2) + F(1, 100), vm

        b = gen_voim_tight(F(1, 2), F(1, 2))
        assert analyze(b.game, b.dist, b.policy, b.rule).voi_minus == F(11, 15)

        grid = [(F(i, 5), F(j, 5)) for i in range(1, 5) for j in range(1, 5)]
        grid += [(F(1, 1000), F(999, 1000)), (F(1, 7), F(6, 7)), (F(2, 3), F(1, 9)), (F(99, 100), F(1, 100))]
        assert len(grid) == 20
        for eps, p in grid:
            b = gen_voim_tight(eps, p)
            assert voi(b.game, b.dist, b.policy, b.rule)[1] == voim_closed_form(eps, p), (eps, p)


def test_gairing_tightness(criterion):
    with criterion(3, "VoI+ = VoI- closed form on the n-agent family, >= 1-1/e", 10.0):
        for n in range(2, 13):
            fn = make_fg(n)(n)
            eps = fn / 10
            b = gen_gairing_tight(n, eps)
            vp, vm = voi(b.game, b.dist, b.policy, b.rule)
            assert vp == vm == gairing_closed_form(n, eps) == 1 / (1 + (n - 1) * (fn - eps)), n
            assert at_least_one_minus_inv_e(vp) is True, (n, vp)

        seq = []
        for n in range(2, 13):
            eps = make_fg(n)(n) / 10**4
            b = gen_gairing_tight(n, eps)
            vp, vm = voi(b.game, b.dist, b.policy, b.rule)
            assert vp == vm == gairing_closed_form(n, eps)
            assert at_least_one_minus_inv_e(vp) is True, (n, vp)
            # shrinking eps pushes the value down toward the limit
            assert vp < gairing_closed_form(n, make_fg(n)(n) / 10)
            seq.append(vp)
        assert all(a > b for a, b in zip(seq, seq[1:])), seq
        assert seq[-1] - ONE_MINUS_INV_E_HI < F(1, 1000) and seq[-1] > ONE_MINUS_INV_E_LO


def test_bne_composition_matches_direct_enumeration(criterion):
    with criterion(4, "per-cell BNE composition == direct enumeration of signal-contingent profiles", 60.0):
        n_instances = 0
        rng = random.Random(2024)
        for seed in range(400):
            n = 1 + seed % 3
            R = 2 + seed % 3
            b = gen_random(
                n=n, R=R, max_actions=2 if n == 3 else 3, support_size=1 + seed % 3,
                seed=seed, prior="random", rule="g" if n > 1 and seed % 2 == 0 else "mc",
            )
            if b.game.joint_size ** len(b.dist) > 20_000:
                continue
            n_instances += 1
            for cells in set_partitions(len(b.dist)):
                policy = SignalingPolicy(cells)
                composed = set(enumerate_bne(b.game, b.dist, policy, b.rule).strategies())
                direct = set(direct_bne(b.game, b.dist, policy, b.rule))
                assert composed == direct, (seed, cells)
                # pointwise confirmation with the exact verifier
                for s in rng.sample(sorted(direct), min(3, len(direct))):
                    assert verify_bne(b.game, b.dist, policy, b.rule, s)
                joint = list(oracles.profiles(b.game))
                for _ in range(3):
                    s = tuple(rng.choice(joint) for _ in cells)
                    assert verify_bne(b.game, b.dist, policy, b.rule, s) == (s in direct)
            if n_instances >= 200:
                break
        assert n_instances >= 200, n_instances


def test_marginal_contribution_bound_battery(criterion):
    with criterion(5, "VoI bounds and PoA >= 1/2 on random f^mc instances", 120.0):
        checked = 0
        for seed in range(500):
            b = gen_random(
                n=2 + seed % 2, R=3 + seed % 2, max_actions=3, support_size=1 + seed % 4,
                value_range=(F(1, 10), 1), seed=seed, prior="random", policy="random", rule="mc",
            )
            rep = analyze(b.game, b.dist, b.policy, b.rule, n_samples=len(b.dist) + 4, seed=seed)
            m = len(b.policy)
            assert 1 <= rep.voi_plus <= m, (seed, rep.voi_plus)
            assert F(1, 2) <= rep.voi_minus <= 2 * m, (seed, rep.voi_minus)
            assert all(c.ok for c in check_voi_bounds(rep, b.policy, "mc")), seed
            # sampled value vectors: support points, prior mean, posterior means, hull samples
            points = list(b.dist.support) + [b.dist.mean()] + [posterior_mean(b.dist, c) for c in b.policy.cells]
            for v in points:
                assert poa_pos(b.game, v, b.rule)[0] >= F(1, 2), (seed, v)
            assert rep.rho_estimate >= F(1, 2), seed
            checked += 1
        assert checked >= 500


def _random_values(rng, R):
    return tuple(F(rng.randint(0, 20), rng.randint(1, 6)) for _ in range(R))


def test_w_star_properties(criterion):
    with criterion(6, "W* homogeneity, monotonicity and two-point convexity", 30.0):
        rng = random.Random(6)
        draws = 0
        for seed in range(1000):
            b = gen_random(n=1 + seed % 3, R=2 + seed % 4, max_actions=3, seed=seed)
            g, R = b.game, b.game.n_resources
            v, u = _random_values(rng, R), _random_values(rng, R)
            lam = F(rng.randint(0, 30), rng.randint(1, 7))
            t = F(rng.randint(0, 10), 10)
            w = lambda x: w_star(g, x)[0]
            wv, wu = w(v), w(u)
            assert w([lam * x for x in v]) == lam * wv
            bigger = [x + F(rng.randint(0, 3), rng.randint(1, 4)) for x in v]
            assert w(bigger) >= wv
            assert w([max(a, c) for a, c in zip(v, u)]) >= max(wv, wu)
            assert w([t * a + (1 - t) * c for a, c in zip(v, u)]) <= t * wv + (1 - t) * wu
            if seed % 10 == 0:
                assert wv == oracles.w_star(g, v)
            draws += 1
        assert draws >= 1000


def test_potential_and_best_response(criterion):
    with criterion(7, "potential tracks unilateral deviations; BRD lands in the NE set", 60.0):
        rng = random.Random(7)
        deviations = 0
        for seed in range(100):
            b = gen_random(n=2 + seed % 3, R=2 + seed % 4, max_actions=3, seed=seed)
            g = b.game
            f = UtilityRule(tuple(F(rng.randint(0, 12), rng.randint(1, 5)) for _ in range(g.n_agents)))
            v = _random_values(rng, g.n_resources)
            for _ in range(6):
                a = tuple(rng.randrange(k) for k in g.shape)
                i = rng.randrange(g.n_agents)
                b2 = a[:i] + (rng.randrange(g.shape[i]),) + a[i + 1:]
                d_phi = potential(g, b2, v, f) - potential(g, a, v, f)
                assert d_phi == utility(g, b2, v, f, i) - utility(g, a, v, f, i)
                deviations += 1
            ne = enumerate_nash(g, v, f)
            for _ in range(20):
                init = tuple(rng.randrange(k) for k in g.shape)
                assert best_response_dynamics(g, v, f, init) in ne
        assert deviations >= 500


def test_signaling_search_sanity(criterion):
    with criterion(8, "signaling search: no-info tops worst case; full revelation tops best case", 60.0):
        b = gen_voim_tight(F(1, 2), F(1, 2))
        ranked = search_signaling(b, "worst-case")
        assert ranked[0].policy == SignalingPolicy.no_information(2) and ranked[0].objective == F(15, 8)
        assert ranked[0].rank < [r.rank for r in ranked if r.policy == SignalingPolicy.full_revelation(2)][0]
        assert [r.objective for r in ranked] == [F(15, 8), F(11, 8)]

        for seed in range(50):
            k = 2 + seed % 3
            inst = gen_random(n=2 + seed % 2, R=3 + seed % 2, max_actions=3, support_size=k, seed=seed, prior="random")
            ranked = search_signaling(inst, "best-case")
            full = [r for r in ranked if r.policy == SignalingPolicy.full_revelation(k)]
            assert len(full) == 1 and full[0].rank == 1, seed
            assert full[0].objective == ranked[0].objective
