import math
from fractions import Fraction

import numpy as np
import pytest

from temporal_games.correlators import InterventionSchedule, Target
from temporal_games.games import (
    GameKind,
    GameSpec,
    QuantumStrategy,
    alpha_from_correlator,
    alpha_table,
    analytic_payoff,
    answer_from_outcome,
    correlator_table,
    expected_payoff_table,
    make_game,
    optimal_strategy,
    outcome_from_answer,
    payoff_gain_percent,
    simulate_game,
)
from temporal_games.qubit import Direction, QubitDensity, X, Z, make_pure_product


def xz(deg: float) -> Direction:
    return Direction.in_xz(math.radians(deg))


def rand_dir(rng) -> Direction:
    return Direction.from_vector(rng.normal(size=3))


def rand_strategy(kind: GameKind, rng) -> QuantumStrategy:
    if kind.is_lgi:
        return QuantumStrategy.lgi(*(rand_dir(rng) for _ in range(3)))
    return QuantumStrategy.chsh(*(rand_dir(rng) for _ in range(4)))


class TestGameSpec:
    def test_lgi_tables(self):
        g = make_game("lgi")
        assert g.xi[2, 2] == 0
        assert sum(g.xi.values()) == 1
        assert all(g.xi[kl] == Fraction(1, 3) for kl in [(1, 2), (1, 3), (2, 3)])
        for r in (0, 1):
            for s in (0, 1):
                assert g.payoff[1, 3, r, s] == (1 if r ^ s == 1 else -1)
        assert g.mu_cl == Fraction(1, 3)
        assert (2, 2) not in g.support

    def test_chsh_tables(self):
        for kind in ("biased-tchsh", "nonlocal-temporal"):
            g = make_game(kind)
            assert set(g.xi.values()) == {Fraction(1, 4)}
            assert g.mu_cl == Fraction(1, 2)
            assert [g.winning_parity(k, l) for k in (0, 1) for l in (0, 1)] == [0, 0, 0, 1]

    def test_distribution_must_sum_to_one(self):
        g = make_game("lgi")
        bad = dict(g.xi)
        bad[1, 2] = Fraction(1, 2)
        with pytest.raises(ValueError):
            GameSpec(g.kind, g.k_set, g.l_set, bad, g.payoff, g.mu_cl)

    def test_answer_map_involution(self):
        assert answer_from_outcome(1) == 0 and answer_from_outcome(-1) == 1
        for o in (1, -1):
            assert outcome_from_answer(answer_from_outcome(o)) == o

    def test_lgi_strategy_shares_slot_two(self):
        with pytest.raises(ValueError):
            QuantumStrategy({1: Z, 2: Z}, {2: X, 3: Z}, time_slots=True)
        s = QuantumStrategy.lgi(Z, X, Z)
        assert s.a_dirs[2] == s.b_dirs[2]


class TestPayoffTables:
    def test_always_win(self):
        g = make_game("lgi")
        alpha = {}
        for k, l in g.xi:
            t = g.winning_parity(k, l)
            alpha[k, l] = {(0, t): 1.0}
        assert expected_payoff_table(g.xi, alpha, g.payoff) == pytest.approx(1.0)

    def test_uniform_responses(self):
        g = make_game("lgi")
        alpha = {kl: {(r, s): 0.25 for r in (0, 1) for s in (0, 1)} for kl in g.xi}
        assert expected_payoff_table(g.xi, alpha, g.payoff) == pytest.approx(0.0)

    def test_perfect_correlation_gives_one_third(self):
        g = make_game("lgi")
        table = alpha_table(g, {kl: 1.0 for kl in g.xi})
        assert expected_payoff_table(g.xi, table, g.payoff) == pytest.approx(1 / 3)

    def test_unnormalized_rejected(self):
        g = make_game("biased-tchsh")
        alpha = {kl: {(0, 0): 0.5} for kl in g.xi}
        with pytest.raises(ValueError):
            expected_payoff_table(g.xi, alpha, g.payoff)

    def test_alpha_from_correlator(self):
        g = make_game("biased-tchsh")
        assert alpha_from_correlator(1.0, 0, 0, g) == {0: 1.0, 1: 0.0}
        assert alpha_from_correlator(0.0, 0, 0, g) == {0: 0.5, 1: 0.5}
        assert alpha_from_correlator(-0.5, 0, 0, g)[1] == pytest.approx(0.75)


class TestAnalyticPayoff:
    def test_examples(self):
        lgi = make_game("lgi")
        assert analytic_payoff(lgi, optimal_strategy("lgi")) == pytest.approx(0.5, abs=1e-12)
        assert analytic_payoff(lgi, QuantumStrategy.lgi(X, X, X)) == pytest.approx(1 / 3, abs=1e-12)
        assert analytic_payoff(lgi, optimal_strategy("lgi"), InterventionSchedule.of(xz(0))) == pytest.approx(0.25)
        tchsh = make_game("biased-tchsh")
        assert analytic_payoff(tchsh, optimal_strategy("biased-tchsh")) == pytest.approx(0.70710678, abs=1e-8)
        nl = make_game("nonlocal-temporal")
        assert analytic_payoff(nl, optimal_strategy("nonlocal-temporal")) == pytest.approx(math.sqrt(2) / 2)

    def test_payoff_routes_agree(self):
        rng = np.random.default_rng(4)
        for kind in GameKind:
            g = make_game(kind)
            for _ in range(20):
                s = rand_strategy(kind, rng)
                table = alpha_table(g, correlator_table(g, s))
                assert expected_payoff_table(g.xi, table, g.payoff) == pytest.approx(analytic_payoff(g, s), abs=1e-12)

    def test_wrong_target_rejected(self):
        with pytest.raises(ValueError):
            analytic_payoff(make_game("lgi"), optimal_strategy("lgi"), InterventionSchedule.of(Z, target=Target.BOB))
        with pytest.raises(ValueError):
            analytic_payoff(make_game("nonlocal-temporal"), optimal_strategy("nonlocal-temporal"),
                            InterventionSchedule.of(Z))

    def test_intervened_lgi_capped(self):
        rng = np.random.default_rng(10)
        g = make_game("biased-lgi")
        for _ in range(100):
            s = rand_strategy(g.kind, rng)
            assert analytic_payoff(g, s, InterventionSchedule.of(rand_dir(rng))) <= Fraction(1, 3) + 1e-12

    def test_intervened_tchsh_capped(self):
        rng = np.random.default_rng(11)
        g = make_game("biased-tchsh")
        for _ in range(100):
            s = rand_strategy(g.kind, rng)
            sched = InterventionSchedule(tuple(rand_dir(rng) for _ in range(int(rng.integers(1, 6)))))
            assert analytic_payoff(g, s, sched) <= 0.5 + 1e-12


class TestSimulation:
    def test_lgi_optimal(self):
        g = make_game("lgi")
        res = simulate_game(g, optimal_strategy("lgi"), rounds=1_000_000, seed=1)
        assert abs(res.empirical_payoff - 0.5) <= 5 * res.std_error
        assert res.std_error == pytest.approx(math.sqrt((1 - res.empirical_payoff**2) / 1_000_000))
        assert res.verdict == "not-applicable"
        assert sum(w + lo for w, lo in res.per_pair_counts.values()) == 1_000_000
        assert (2, 2) not in res.per_pair_counts

    def test_biased_lgi_with_intervener(self):
        g = make_game("biased-lgi")
        res = simulate_game(g, optimal_strategy("biased-lgi"), InterventionSchedule.of(xz(35)), 1_000_000, seed=2)
        assert res.zeta < 0 and res.verdict == "C-win"

    def test_nonlocal_bob_side(self):
        g = make_game("nonlocal-temporal")
        sched = InterventionSchedule.of(Z, target=Target.BOB)
        res = simulate_game(g, optimal_strategy("nonlocal-temporal"), sched, 1_000_000, seed=3)
        assert res.empirical_payoff <= 0.5 + 5 * res.std_error
        assert res.verdict == "C-win"

    def test_zero_rounds(self):
        with pytest.raises(ValueError):
            simulate_game(make_game("lgi"), optimal_strategy("lgi"), rounds=0)

    def test_initial_state_irrelevant(self):
        g = make_game("biased-tchsh")
        res = simulate_game(g, optimal_strategy("biased-tchsh"), None, 400_000, 4, QubitDensity((0, 0, 1)))
        assert abs(res.empirical_payoff - math.sqrt(2) / 2) <= 5 * res.std_error

    def test_nonlocal_custom_state(self):
        g = make_game("nonlocal-temporal")
        s = QuantumStrategy.chsh(Z, X, Z, X)
        rho = make_pure_product(Z, Z)
        res = simulate_game(g, s, None, 200_000, 5, rho)
        assert abs(res.empirical_payoff - analytic_payoff(g, s, rho=rho)) <= 5 * res.std_error
        with pytest.raises(TypeError):
            simulate_game(g, s, None, 10, 5, QubitDensity.maximally_mixed())

    def test_deterministic_across_workers(self):
        g = make_game("biased-tchsh")
        one = simulate_game(g, optimal_strategy(g.kind), InterventionSchedule.of(X), 300_000, 6, workers=1)
        many = simulate_game(g, optimal_strategy(g.kind), InterventionSchedule.of(X), 300_000, 6, workers=3)
        assert one == many

    @pytest.mark.parametrize("kind", list(GameKind))
    def test_random_strategies_match_analytic(self, kind):
        rng = np.random.default_rng(100 + list(GameKind).index(kind))
        g = make_game(kind)
        for i in range(50):
            s = rand_strategy(kind, rng)
            res = simulate_game(g, s, rounds=100_000, seed=i)
            assert abs(res.empirical_payoff - analytic_payoff(g, s)) <= 5 * res.std_error

    def test_parity_frequencies_match_response_model(self):
        g = make_game("lgi")
        s = optimal_strategy("lgi")
        sched = InterventionSchedule.of(xz(20))
        res = simulate_game(g, s, sched, 1_000_000, seed=8)
        corr = correlator_table(g, s, sched)
        for (k, l), (wins, losses) in res.per_pair_counts.items():
            n = wins + losses
            t = g.winning_parity(k, l)
            p = alpha_from_correlator(corr[k, l], k, l, g)[t]
            assert abs(wins / n - p) <= 5 * math.sqrt(p * (1 - p) / n)

    @pytest.mark.parametrize("kind", ["biased-lgi", "biased-tchsh", "nonlocal-temporal"])
    def test_verdict_consistency(self, kind):
        g = make_game(kind)
        for seed in range(3):
            res = simulate_game(g, optimal_strategy(kind), rounds=20_000, seed=seed)
            assert (res.verdict == "AB-win") == (res.zeta > 0)


def test_payoff_gains():
    assert payoff_gain_percent(0.5, 1 / 3) == pytest.approx(50.0)
    assert payoff_gain_percent(0.5, 0.33) == pytest.approx(51.515, abs=1e-3)
    assert payoff_gain_percent(math.sqrt(2) / 2, 0.5) == pytest.approx(41.42, abs=0.01)
    assert payoff_gain_percent(0.4, 0.4) == 0
    with pytest.raises(ZeroDivisionError):
        payoff_gain_percent(1, 0)
