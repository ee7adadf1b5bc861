import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from conftest import random_beliefs, random_profile
from seqpath.assessment import (
    UndefinedBeliefError, bayes_beliefs, conditional_action_payoff, conditional_payoffs,
    conditional_profile_payoff, expected_payoff, homotopy_perturb, infoset_reach_probability,
    partial_payoff, partial_payoffs, payoff_kernel, perturb, reach_probability,
    reach_probability_excluding,
)
from seqpath.fixtures import FIXTURE_NAMES, fixture

TOL = 1e-10


def _assessments(game, n, seed):
    rng = np.random.default_rng(seed)
    for k in range(n):
        # every fifth profile has exact zeros to exercise unreached sets
        beta = random_profile(game, rng)
        if k % 5 == 4:
            beta = np.where(rng.random(game.m0) < 0.3, 0.0, beta)
            for I in game.infosets:
                s = beta[I.span].sum()
                beta[I.span] = beta[I.span] / s if s > 0 else 1.0 / len(I.actions)
        yield beta, random_beliefs(game, rng)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_oracle_equivalence(name):
    game = fixture(name).game
    for beta, mu in _assessments(game, 50, seed=FIXTURE_NAMES.index(name)):
        for h in game.nodes:
            assert reach_probability(game, beta, h) == pytest.approx(oracle.reach(h, beta), abs=TOL)
        for I in game.infosets:
            assert infoset_reach_probability(game, beta, I) == pytest.approx(oracle.infoset_reach(I, beta), abs=TOL)
            for h in game.decision_nodes:
                got = reach_probability_excluding(game, beta, I, I.actions[0], h)
                assert got == pytest.approx(oracle.reach_excluding(h, beta, I), abs=TOL)
            prof = 0.0
            for k, a in enumerate(I.actions):
                cu = oracle.conditional_action_payoff(game, beta, mu, I, a)
                assert conditional_action_payoff(game, beta, mu, I, a) == pytest.approx(cu, abs=TOL)
                pp = oracle.partial_payoff(game, beta, I, a)
                assert partial_payoff(game, beta, I, a) == pytest.approx(pp, abs=TOL)
                prof += beta[I.offset + k] * cu
            assert conditional_profile_payoff(game, beta, mu, I) == pytest.approx(prof, abs=TOL)
        for i in range(1, game.n + 1):
            assert expected_payoff(game, beta, i) == pytest.approx(oracle.expected_payoff(game, beta, i), abs=TOL)
        if all(oracle.infoset_reach(I, beta) > 0 for I in game.infosets):
            np.testing.assert_allclose(bayes_beliefs(game, beta), oracle.bayes(game, beta), atol=TOL)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_quotient_identity(name):
    """Conditional payoff under Bayes beliefs = partial payoff / set reach."""
    game = fixture(name).game
    rng = np.random.default_rng(5)
    for _ in range(20):
        beta = random_profile(game, rng, floor=1e-3)
        mu = bayes_beliefs(game, beta)
        cu = conditional_payoffs(game, beta, mu)
        U = partial_payoffs(game, beta)
        for I in game.infosets:
            om = infoset_reach_probability(game, beta, I)
            np.testing.assert_allclose(cu[I.span], U[I.span] / om, rtol=1e-12, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from(FIXTURE_NAMES))
def test_profile_payoff_is_mix_of_action_payoffs(seed, name):
    game = fixture(name).game
    rng = np.random.default_rng(seed)
    beta = random_profile(game, rng)
    for I in game.infosets:
        total = partial_payoff(game, beta, I)
        assert total == pytest.approx(sum(beta[I.offset + k] * partial_payoff(game, beta, I, a)
                                          for k, a in enumerate(I.actions)), abs=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from(FIXTURE_NAMES))
def test_bayes_beliefs_sum_to_one(seed, name):
    game = fixture(name).game
    beta = random_profile(game, np.random.default_rng(seed), floor=1e-6)
    mu = bayes_beliefs(game, beta)
    for I in game.infosets:
        assert mu[I.member_span].sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(mu[I.member_span] >= 0)


def test_undefined_beliefs_at_unreached_set():
    game = fixture("F3").game
    beta = game.profile_from_dict({"1:I1": "C", "2:I1": "c", "3:I1": "L"})
    with pytest.raises(UndefinedBeliefError):
        bayes_beliefs(game, beta)
    beta = game.profile_from_dict({"1:I1": "D", "2:I1": "c", "3:I1": "L"})
    mu = game.beliefs_to_dict(bayes_beliefs(game, beta, strict=False))
    assert np.isnan(mu["2:I1"]["C"]) and mu["3:I1"] == {"D": 1.0, "C/d": 0.0}


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_payoff_kernel_derivatives(name):
    game = fixture(name).game
    rng = np.random.default_rng(11)
    p = random_profile(game, rng, floor=0.05)
    k = payoff_kernel(game, p)
    eps = 1e-6
    for j in range(game.m0):
        e = np.zeros(game.m0)
        e[j] = eps
        kp, km = payoff_kernel(game, p + e), payoff_kernel(game, p - e)
        np.testing.assert_allclose(k.dU[:, j], (kp.U - km.U) / (2 * eps), atol=1e-7)
        np.testing.assert_allclose(k.domega[:, j], (kp.omega - km.omega) / (2 * eps), atol=1e-7)


# -- closed-form conditional payoffs ------------------------------------------

def _rand(game, seed):
    rng = np.random.default_rng(seed)
    beta, mu = random_profile(game, rng), random_beliefs(game, rng)
    b = game.profile_to_dict(beta)
    m = game.beliefs_to_dict(mu)
    cu = lambda I, a: conditional_action_payoff(game, beta, mu, I, a)
    return b, m, cu


@pytest.mark.parametrize("seed", range(5))
def test_horse_closed_form(seed):
    b, m, cu = _rand(fixture("F3").game, seed)
    L = b["3:I1"]["L"]
    muD = m["3:I1"]["D"]
    assert cu("3:I1", "L") == pytest.approx(2 * muD)
    assert cu("3:I1", "R") == pytest.approx(1 - muD)
    assert cu("2:I1", "d") == pytest.approx(4 * L)
    assert cu("2:I1", "c") == pytest.approx(1)
    assert cu("1:I1", "D") == pytest.approx(3 * L)
    assert cu("1:I1", "C") == pytest.approx(b["2:I1"]["d"] * 4 * L + b["2:I1"]["c"])


@pytest.mark.parametrize("seed", range(5))
def test_selten_closed_form(seed):
    b, m, cu = _rand(fixture("F4").game, seed)
    Y = b["3:I1"]["Y"]
    x = m["3:I1"]["A/R/b"]
    assert cu("3:I1", "N") == pytest.approx(5 * x)
    assert cu("3:I1", "Y") == pytest.approx(3 * (1 - x))
    assert cu("1:I2", "a") == pytest.approx(2)
    assert cu("1:I2", "b") == pytest.approx(4 * Y)
    assert cu("2:I1", "L") == pytest.approx(3)
    assert cu("2:I1", "R") == pytest.approx(b["1:I2"]["b"] * 4 * Y)
    right = b["1:I2"]["a"] * 2 + b["1:I2"]["b"] * 4 * Y
    assert cu("1:I1", "A") == pytest.approx(b["2:I1"]["L"] + b["2:I1"]["R"] * right)
    assert cu("1:I1", "B") == pytest.approx(3 * Y)


@pytest.mark.parametrize("seed", range(5))
def test_three_action_game_closed_form(seed):
    b, m, cu = _rand(fixture("FA1").game, seed)
    L2, R2 = b["2:I1"]["L"], b["2:I1"]["R"]
    assert cu("2:I1", "L") == pytest.approx(m["2:I1"]["M"])
    assert cu("2:I1", "R") == pytest.approx(m["2:I1"]["R"])
    assert cu("1:I1", "L") == pytest.approx(1)
    assert cu("1:I1", "M") == pytest.approx(3 * L2 - 2 * R2)
    assert cu("1:I1", "R") == pytest.approx(2 * L2 - R2)


@pytest.mark.parametrize("seed", range(5))
def test_two_third_player_sets_closed_form(seed):
    b, m, cu = _rand(fixture("FA2").game, seed)
    for key, first in (("3:I1", "L'"), ("3:I2", "R'")):
        left = m[key][f"{first}/L''"]
        assert cu(key, "a") == pytest.approx(3 * left)
        assert cu(key, "b") == pytest.approx(3 * (1 - left))
        assert cu(key, "c") == pytest.approx(2)
    assert cu("2:I1", "A''") == pytest.approx(m["2:I1"]["L'"])
    assert cu("2:I1", "L''") == pytest.approx(0)
    assert cu("2:I1", "R''") == pytest.approx(0)
    assert cu("1:I1", "L'") == pytest.approx(b["2:I1"]["A''"])
    assert cu("1:I1", "R'") == pytest.approx(0)


@pytest.mark.parametrize("seed", range(5))
def test_chance_rooted_closed_form(seed):
    b, m, cu = _rand(fixture("FN").game, seed)
    x, y = m["3:I1"]["a/y"], m["3:I1"]["b/y/d"]
    assert cu("3:I1", "A") == pytest.approx(4 * x + 8 * y)
    assert cu("3:I1", "B") == pytest.approx(10 * y)
    p, q = m["2:I2"]["b/y/e/F"], m["2:I2"]["c/y/e/H"]
    assert cu("2:I2", "L") == pytest.approx(6 * p + 8 * q)
    assert cu("2:I2", "R") == pytest.approx(4 * p + 6 * q)


def test_chance_weights_enter_reach():
    game = fixture("FN").game
    beta = game.uniform_profile()
    assert reach_probability(game, beta, ("c", "y", "e")) == pytest.approx(0.6 * 0.5 * 0.5)
    mu = bayes_beliefs(game, beta)
    got = game.beliefs_to_dict(mu)["2:I2"]
    # both members are reached with probability chance * 1/2^4
    assert got["b/y/e/F"] == pytest.approx(0.2 / 0.8)


# -- perturbations ------------------------------------------------------------

@given(st.integers(0, 2**32 - 1), st.floats(0, 0.99))
def test_perturb_keeps_sets_normalized(seed, t):
    game = fixture("FA2").game
    rng = np.random.default_rng(seed)
    beta = random_profile(game, rng)
    prior = random_profile(game, rng)
    out = homotopy_perturb(beta, prior, t)
    np.testing.assert_allclose(out, perturb(game, beta, t * prior), atol=1e-15)
    for I in game.infosets:
        assert out[I.span].sum() == pytest.approx(1.0)
    if t > 0:
        assert np.all(out >= t * prior - 1e-15)


def test_perturb_rejects_bad_mass():
    game = fixture("F3").game
    beta = game.uniform_profile()
    with pytest.raises(ValueError):
        perturb(game, beta, -0.1 * np.ones(game.m0))
    with pytest.raises(ValueError):
        perturb(game, beta, 0.6 * np.ones(game.m0))


# -- worked values on the chance-rooted game and the horse ---------------------

@given(st.integers(0, 2**32 - 1))
def test_chance_game_reach_values(seed):
    game = fixture("FN").game
    beta = random_profile(game, np.random.default_rng(seed))
    b = game.profile_to_dict(beta)
    y, d = b["1:I1"]["y"], b["2:I1"]["d"]
    assert reach_probability(game, beta, ("b", "y")) == pytest.approx(0.2 * y)
    assert reach_probability_excluding(game, beta, "1:I1", "y", ("b", "y", "d")) == pytest.approx(0.2 * d)
    # the skipped factor is the set's, whichever action is named
    assert reach_probability_excluding(game, beta, "1:I1", "s", ("b", "y", "d")) == pytest.approx(0.2 * d)
    assert infoset_reach_probability(game, beta, "2:I1") == pytest.approx(0.8 * y)
    assert partial_payoff(game, beta, "3:I1", "B") == pytest.approx(2 * y * d)


@given(st.integers(0, 2**32 - 1))
def test_chance_game_profile_payoff(seed):
    game = fixture("FN").game
    rng = np.random.default_rng(seed)
    beta, mu = random_profile(game, rng), random_beliefs(game, rng)
    b, m = game.profile_to_dict(beta), game.beliefs_to_dict(mu)
    L, R = b["2:I2"]["L"], b["2:I2"]["R"]
    want = m["2:I2"]["b/y/e/F"] * (6 * L + 4 * R) + m["2:I2"]["c/y/e/H"] * (8 * L + 6 * R)
    assert conditional_profile_payoff(game, beta, mu, "2:I2") == pytest.approx(want)


def test_horse_uniform_belief_and_payoff():
    game = fixture("F3").game
    mu = game.beliefs_to_dict(bayes_beliefs(game, game.uniform_profile()))
    assert mu["3:I1"]["D"] == pytest.approx(2 / 3)
    for third in ("L", "R"):
        beta = game.profile_from_dict({"1:I1": "C", "2:I1": "c", "3:I1": third})
        assert expected_payoff(game, beta, 1) == 1.0


@given(st.integers(0, 2**32 - 1))
def test_selten_belief_formula(seed):
    game = fixture("F4").game
    beta = random_profile(game, np.random.default_rng(seed), floor=1e-3)
    b = game.profile_to_dict(beta)
    x = b["1:I1"]["A"] * b["2:I1"]["R"] * b["1:I2"]["b"]
    got = game.beliefs_to_dict(bayes_beliefs(game, beta))["3:I1"]["A/R/b"]
    assert got == pytest.approx(x / (x + b["1:I1"]["B"]))


def test_homotopy_perturb_example():
    np.testing.assert_allclose(homotopy_perturb(np.array([1.0, 0.0]), np.array([0.5, 0.5]), 0.5), [0.75, 0.25])
