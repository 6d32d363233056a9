"""Acceptance criteria, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from _oracles import chain_correlator
from temporal_games.correlators import (
    InterventionSchedule,
    Target,
    analytic_spatiotemporal_correlator,
    analytic_temporal_correlator,
    chain_enumeration_correlator,
    chain_enumeration_spatiotemporal_correlator,
    mc_spatiotemporal_correlator,
)
from temporal_games.games import make_game, optimal_strategy, payoff_gain_percent, simulate_game
from temporal_games.inequalities import (
    chsh_from_directions,
    enumerate_deterministic,
    lgi_from_directions,
    spatiotemporal_chsh,
)
from temporal_games.optimizer import maximize_lgi, maximize_payoff, maximize_temporal_chsh
from temporal_games.qubit import Direction, QubitDensity, X, Y, Z, make_singlet
from temporal_games.verification import format_table, run_checks

SEED = 20240601
N = 1_000_000


def rand_dir(rng) -> Direction:
    return Direction.from_vector(rng.normal(size=3))


def rand_state(rng) -> QubitDensity:
    return QubitDensity(tuple(rand_dir(rng).as_array() * rng.random() ** (1 / 3)))


def xz(deg: float) -> Direction:
    return Direction.in_xz(math.radians(deg))


@pytest.mark.criterion(1, "quantum LGI game: optimum 1.5 / payoff 0.5 within 1e-6, MC at 10^6 within 5 SE, < 30 s")
def test_quantum_lgi_game():
    t0 = time.perf_counter()
    rep = maximize_lgi()
    pay = maximize_payoff("lgi")
    res = simulate_game(make_game("lgi"), optimal_strategy("lgi"), rounds=N, seed=SEED)
    elapsed = time.perf_counter() - t0
    print(f"LGI max {rep.best_value:.12f}, payoff {pay.best_value:.12f}, "
          f"MC {res.empirical_payoff:.5f} +/- {res.std_error:.5f}, {elapsed:.1f}s")
    assert abs(rep.best_value - 1.5) <= 1e-6
    assert abs(pay.best_value - 0.5) <= 1e-6
    assert abs(res.empirical_payoff - 0.5) <= 5 * res.std_error
    assert elapsed < 30


@pytest.mark.criterion(2, "classical bounds by enumeration: LGI 1/3, CHSH 1/2 exactly, < 1 s")
def test_classical_bounds():
    t0 = time.perf_counter()
    lgi, _ = enumerate_deterministic(make_game("lgi"))
    chsh, _ = enumerate_deterministic(make_game("biased-tchsh"))
    elapsed = time.perf_counter() - t0
    print(f"classical LGI {lgi}, classical CHSH {chsh}, {elapsed * 1e3:.1f} ms")
    assert lgi == Fraction(1, 3)
    assert chsh == Fraction(1, 2)
    assert elapsed < 1


@pytest.mark.criterion(3, "Tsirelson recovery: 2 sqrt 2 and payoff 0.70710678 within 1e-6")
def test_tsirelson():
    rep = maximize_temporal_chsh()
    pay = maximize_payoff("biased-tchsh")
    print(f"CHSH max {rep.best_value:.12f}, payoff {pay.best_value:.12f}")
    assert abs(rep.best_value - 2 * math.sqrt(2)) <= 1e-6
    assert abs(pay.best_value - 0.70710678) <= 1e-6


@pytest.mark.criterion(4, "intervened LGI <= 1 + 1e-12 over 10^4 draws; optimizer with fixed c reaches 1.0 within 1e-6")
def test_intervention_suppression():
    rng = np.random.default_rng(SEED)
    worst = max(lgi_from_directions(*(rand_dir(rng) for _ in range(4))) for _ in range(10_000))
    fixed = [Z, X, Y, xz(37)] + [rand_dir(rng) for _ in range(4)]
    reached = [maximize_lgi(c).best_value for c in fixed]
    print(f"max random {worst:.15f}; optimizer per c: " + ", ".join(f"{v:.10f}" for v in reached))
    assert worst <= 1 + 1e-12
    assert all(abs(v - 1.0) <= 1e-6 for v in reached)


@pytest.mark.criterion(5, "multi-intervention CHSH: |value| <= 2 + 1e-12 over 10^4 draws with n in 1..5")
def test_multi_intervention_chsh():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for i in range(10_000):
        n = 1 + i % 5
        sched = InterventionSchedule(tuple(rand_dir(rng) for _ in range(n)))
        worst = max(worst, abs(chsh_from_directions(*(rand_dir(rng) for _ in range(4)), sched)))
    print(f"max |CHSH| {worst:.15f}")
    assert worst <= 2 + 1e-12


@pytest.mark.criterion(6, "oracle equivalence: chain enumeration = closed form within 1e-10, 200 settings x 20 states")
def test_oracle_equivalence():
    rng = np.random.default_rng(SEED + 2)
    worst = spread = 0.0
    for i in range(200):
        n = i % 4
        a, b = rand_dir(rng), rand_dir(rng)
        mids = tuple(rand_dir(rng) for _ in range(n))
        sched = InterventionSchedule(mids)
        analytic = analytic_temporal_correlator(a, sched, b)
        values = []
        for _ in range(20):
            rho = rand_state(rng)
            values.append(chain_enumeration_correlator(rho, a, sched, b))
            values.append(chain_correlator(rho.bloch, [a, *mids, b]))
        worst = max(worst, max(abs(v - analytic) for v in values))
        spread = max(spread, max(values) - min(values))
    print(f"max deviation {worst:.2e}, max spread across states {spread:.2e}")
    assert worst <= 1e-10
    assert spread <= 1e-10


@pytest.mark.criterion(7, "spatio-temporal: Alice-side invariance, Bob-side (b.c)C(a,c), CHSH <= 2 + 1e-12")
def test_spatiotemporal():
    rho = make_singlet()
    a, b = Z, X
    alice = InterventionSchedule.of(Y, X, target=Target.ALICE)
    base = analytic_spatiotemporal_correlator(rho, a, b)
    b60, c = xz(60), Z
    bob = InterventionSchedule.of(c, target=Target.BOB)
    expected_bob = b60.dot(c) * analytic_spatiotemporal_correlator(rho, a, c)

    assert abs(analytic_spatiotemporal_correlator(rho, a, b, alice) - base) <= 1e-12
    assert abs(chain_enumeration_spatiotemporal_correlator(rho, a, b, alice) - base) <= 1e-12
    assert abs(analytic_spatiotemporal_correlator(rho, a, b60, bob) - expected_bob) <= 1e-12
    assert abs(chain_enumeration_spatiotemporal_correlator(rho, a, b60, bob) - expected_bob) <= 1e-12

    mc_alice = mc_spatiotemporal_correlator(rho, a, b, alice, N, SEED)
    mc_bob = mc_spatiotemporal_correlator(rho, a, b60, bob, N, SEED + 1)
    assert abs(mc_alice.mean - base) <= 5 * mc_alice.std_error
    assert abs(mc_bob.mean - expected_bob) <= 5 * mc_bob.std_error

    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for i in range(10_000):
        sched = InterventionSchedule(tuple(rand_dir(rng) for _ in range(1 + i % 5)), Target.BOB)
        worst = max(worst, abs(spatiotemporal_chsh(rho, *(rand_dir(rng) for _ in range(4)), sched)))
    print(f"alice MC {mc_alice.mean:+.5f} vs {base:+.5f}; bob MC {mc_bob.mean:+.5f} vs {expected_bob:+.5f}; "
          f"max |CHSH| {worst:.15f}")
    assert worst <= 2 + 1e-12


def _schedules(rng):
    fixed = [
        InterventionSchedule.of(Z),
        InterventionSchedule.of(X),
        InterventionSchedule.of(xz(30)),
        InterventionSchedule.of(xz(60), Y),
        InterventionSchedule.of(xz(10), xz(20), xz(30)),
    ]
    return fixed + [InterventionSchedule(tuple(rand_dir(rng) for _ in range(1 + i % 5))) for i in range(5)]


@pytest.mark.criterion(8, "biased games: C-win under every tested schedule; AB-win unopposed with zeta 1/6 and 0.207")
def test_biased_verdicts():
    rng = np.random.default_rng(SEED + 4)
    for j, (kind, zeta) in enumerate([("biased-lgi", 1 / 6), ("biased-tchsh", math.sqrt(2) / 2 - 0.5)]):
        game, strat = make_game(kind), optimal_strategy(kind)
        free = simulate_game(game, strat, None, N, SEED + 10 * j)
        print(f"{kind} unopposed: zeta {free.zeta:.5f} +/- {free.std_error:.5f}, {free.verdict}")
        assert free.verdict == "AB-win"
        assert abs(free.zeta - zeta) <= 5 * free.std_error
        for i, sched in enumerate(_schedules(rng)):
            res = simulate_game(game, strat, sched, N, SEED + 10 * j + i + 1)
            assert res.verdict == "C-win", (kind, sched, res.zeta)


@pytest.mark.criterion(9, "payoff gains 41.42%, 50.00% and 51.51% within 0.01")
def test_payoff_gains():
    chsh = payoff_gain_percent(math.sqrt(2) / 2, 0.5)
    exact = payoff_gain_percent(0.5, 1 / 3)
    rounded = payoff_gain_percent(0.5, 0.33)
    print(f"CHSH {chsh:.4f}%, LGI {exact:.4f}% (1/3), {rounded:.4f}% (0.33)")
    assert abs(chsh - 41.42) <= 0.01
    assert abs(exact - 50.00) <= 0.01
    assert abs(rounded - 51.51) <= 0.01


@pytest.mark.criterion(10, "full verify suite passes in < 5 minutes")
def test_verify_suite():
    t0 = time.perf_counter()
    results = run_checks()
    elapsed = time.perf_counter() - t0
    print(format_table(results))
    assert all(r.passed for r in results)
    assert elapsed < 300
