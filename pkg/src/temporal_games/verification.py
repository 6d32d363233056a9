"""Self-check suite run by ``temporal-games verify``.

Each check recomputes one headline result from scratch by two independent
routes, for example a closed form against outcome-chain enumeration, and
reports pass/fail with a short detail string.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import correlators
from .correlators import InterventionSchedule, Target
from .games import (
    GameKind,
    alpha_table,
    analytic_payoff,
    correlator_table,
    expected_payoff_table,
    make_game,
    optimal_strategy,
    payoff_gain_percent,
    simulate_game,
)
from .inequalities import (
    chsh_from_directions,
    enumerate_deterministic,
    lgi_from_directions,
    spatiotemporal_chsh,
)
from .optimizer import maximize_lgi, maximize_temporal_chsh
from .qubit import Direction, QubitDensity, X, Y, Z, make_singlet

TSIRELSON = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    key: str
    claim: str
    passed: bool
    detail: str
    seconds: float = 0.0


def random_direction(rng: np.random.Generator) -> Direction:
    while True:
        v = rng.normal(size=3)
        if np.linalg.norm(v) > 1e-6:
            return Direction.from_vector(v)


def random_bloch(rng: np.random.Generator) -> QubitDensity:
    v = random_direction(rng).as_array() * rng.random() ** (1 / 3)
    return QubitDensity(tuple(v))


def _lgi_game_max(seed: int) -> tuple[bool, str]:
    rep = maximize_lgi(tol=1e-9)
    game = make_game("lgi")
    strat = optimal_strategy("lgi")
    res = simulate_game(game, strat, rounds=1_000_000, seed=seed)
    ok = abs(rep.best_value - 1.5) <= 1e-6 and abs(res.empirical_payoff - 0.5) <= 5 * res.std_error
    return ok, (f"max LGI {rep.best_value:.9f}, payoff {rep.best_value / 3:.9f}, "
                f"MC {res.empirical_payoff:.5f} +/- {res.std_error:.5f}")


def _classical(seed: int) -> tuple[bool, str]:
    lgi, _ = enumerate_deterministic(make_game("lgi"))
    chsh, _ = enumerate_deterministic(make_game("biased-tchsh"))
    ok = lgi == Fraction(1, 3) and chsh == Fraction(1, 2)
    return ok, f"classical LGI game max {lgi}, classical CHSH game max {chsh}"


def _tsirelson(seed: int) -> tuple[bool, str]:
    rep = maximize_temporal_chsh(tol=1e-9)
    ok = abs(rep.best_value - TSIRELSON) <= 1e-6 and abs(rep.best_value / 4 - 0.70710678) <= 1e-6
    return ok, f"max temporal CHSH {rep.best_value:.9f}, payoff {rep.best_value / 4:.9f}"


def _oracle_equivalence(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(0, 4))
        a, b = random_direction(rng), random_direction(rng)
        sched = InterventionSchedule(tuple(random_direction(rng) for _ in range(n)))
        analytic = correlators.analytic_temporal_correlator(a, sched, b)
        for _ in range(20):
            oracle = correlators.chain_enumeration_correlator(random_bloch(rng), a, sched, b)
            worst = max(worst, abs(oracle - analytic))
    return worst <= 1e-10, f"max |enumeration - closed form| = {worst:.2e} over 200 settings x 20 states"


def _lgi_suppression(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = max(
        lgi_from_directions(*(random_direction(rng) for _ in range(3)), random_direction(rng))
        for _ in range(10_000)
    )
    rep = maximize_lgi(random_direction(rng), tol=1e-9)
    ok = worst <= 1 + 1e-12 and abs(rep.best_value - 1.0) <= 1e-6
    return ok, f"max over 10^4 random settings {worst:.12f}, optimizer {rep.best_value:.9f}"


def _chsh_suppression(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(1, 6))
        sched = InterventionSchedule(tuple(random_direction(rng) for _ in range(n)))
        worst = max(worst, abs(chsh_from_directions(*(random_direction(rng) for _ in range(4)), sched)))
    rep = maximize_temporal_chsh(Z, tol=1e-9)
    ok = worst <= 2 + 1e-12 and abs(rep.best_value - 2.0) <= 1e-6
    return ok, f"max |CHSH| over 10^4 schedules (n=1..5) {worst:.12f}, optimizer with one z intervention {rep.best_value:.9f}"


def _spatiotemporal(seed: int) -> tuple[bool, str]:
    rho = make_singlet()
    a, b = Z, X
    alice = InterventionSchedule.of(Y, X, target=Target.ALICE)
    c = Z
    b60 = Direction.in_xz(math.pi / 3)
    bob = InterventionSchedule.of(c, target=Target.BOB)
    base = correlators.analytic_spatiotemporal_correlator(rho, a, b)
    exact_alice = correlators.chain_enumeration_spatiotemporal_correlator(rho, a, b, alice)
    exact_bob = correlators.chain_enumeration_spatiotemporal_correlator(rho, a, b60, bob)
    expected_bob = b60.dot(c) * correlators.analytic_spatiotemporal_correlator(rho, a, c)
    mc_alice = correlators.mc_spatiotemporal_correlator(rho, a, b, alice, 1_000_000, seed)
    mc_bob = correlators.mc_spatiotemporal_correlator(rho, a, b60, bob, 1_000_000, seed + 1)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10_000):
        n = int(rng.integers(1, 6))
        sched = InterventionSchedule(tuple(random_direction(rng) for _ in range(n)), Target.BOB)
        worst = max(worst, abs(spatiotemporal_chsh(rho, *(random_direction(rng) for _ in range(4)), sched)))
    ok = (
        abs(exact_alice - base) <= 1e-12
        and abs(exact_bob - expected_bob) <= 1e-12
        and mc_alice.within(base)
        and mc_bob.within(expected_bob)
        and worst <= 2 + 1e-12
    )
    return ok, (f"alice-side {exact_alice:+.3e} vs {base:+.3e} (MC {mc_alice.mean:+.4f}); "
                f"bob-side {exact_bob:+.6f} vs {expected_bob:+.6f} (MC {mc_bob.mean:+.4f}); "
                f"max |CHSH| bob-side {worst:.9f}")


def _verdicts(seed: int) -> tuple[bool, str]:
    notes, ok = [], True
    c_tilt = Direction.in_xz(math.radians(30.0))
    cases = [
        ("biased-lgi", None, "AB-win", 1 / 6),
        ("biased-lgi", InterventionSchedule.of(Z), "C-win", None),
        ("biased-lgi", InterventionSchedule.of(c_tilt, Y), "C-win", None),
        ("biased-tchsh", None, "AB-win", math.sqrt(2) / 2 - 0.5),
        ("biased-tchsh", InterventionSchedule.of(Z), "C-win", None),
        ("biased-tchsh", InterventionSchedule.of(c_tilt, X, Z), "C-win", None),
    ]
    for i, (kind, sched, verdict, zeta) in enumerate(cases):
        game = make_game(kind)
        res = simulate_game(game, optimal_strategy(kind), sched, 1_000_000, seed + i)
        good = res.verdict == verdict and (zeta is None or abs(res.zeta - zeta) <= 5 * res.std_error)
        ok &= good
        notes.append(f"{kind}{'+C' if sched else ''}:{res.verdict}")
    return ok, ", ".join(notes)


def _gains(seed: int) -> tuple[bool, str]:
    chsh = payoff_gain_percent(math.sqrt(2) / 2, 0.5)
    exact = payoff_gain_percent(0.5, 1 / 3)
    rounded = payoff_gain_percent(0.5, 0.33)
    ok = abs(chsh - 41.42) <= 0.01 and abs(exact - 50.0) <= 0.01 and abs(rounded - 51.51) <= 0.01
    return ok, f"CHSH {chsh:.3f}%, LGI {exact:.3f}% (classical 1/3) / {rounded:.3f}% (classical 0.33)"


def _payoff_routes(seed: int) -> tuple[bool, str]:
    worst = 0.0
    for kind in GameKind:
        game = make_game(kind)
        strat = optimal_strategy(kind)
        direct = analytic_payoff(game, strat)
        table = expected_payoff_table(game.xi, alpha_table(game, correlator_table(game, strat)), game.payoff)
        worst = max(worst, abs(direct - table))
    return worst <= 1e-12, f"max |expression route - payoff table route| = {worst:.1e}"


CHECKS: list[tuple[str, str, Callable[[int], tuple[bool, str]]]] = [
    ("quantum-lgi-game", "quantum LGI game payoff reaches 1/2", _lgi_game_max),
    ("classical-bounds", "classical game values 1/3 and 1/2 by enumeration", _classical),
    ("tsirelson", "temporal CHSH reaches 2 sqrt 2", _tsirelson),
    ("payoff-routes", "payoff from expressions equals payoff from response tables", _payoff_routes),
    ("intervened-correlator", "closed-form intervened correlator matches outcome-chain enumeration", _oracle_equivalence),
    ("lgi-suppression", "one intervention caps the LGI combination at 1", _lgi_suppression),
    ("chsh-suppression", "any number of interventions caps temporal CHSH at 2", _chsh_suppression),
    ("spatiotemporal", "entangled pair: Alice-side invariance, Bob-side attenuation, CHSH cap", _spatiotemporal),
    ("biased-verdicts", "biased games: players win unopposed, intervener wins otherwise", _verdicts),
    ("payoff-gains", "relative payoff gains 41.42%, 50.00%, 51.51%", _gains),
]


def run_checks(seed: int = 20240601, only: list[str] | None = None) -> list[CheckResult]:
    results = []
    for key, claim, fn in CHECKS:
        if only and key not in only:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(seed)
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"error: {exc!r}"
        results.append(CheckResult(key, claim, bool(passed), detail, time.perf_counter() - t0))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.key) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.key:<{width}}  {r.claim}")
        lines.append(f"      {'':<{width}}  {r.detail}  [{r.seconds:.1f}s]")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
