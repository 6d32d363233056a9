"""The Bayesian games: definitions, expected payoffs and Monte Carlo play.

Four kinds are supported:

``lgi``
    Cooperative game on one qubit measured at three time slots; the payoff
    is a third of the Leggett-Garg combination.
``biased-lgi``
    Same rules, but a third group wins unless the players' average score
    beats the classical benchmark 1/3.
``biased-tchsh``
    Temporal CHSH game on one qubit, benchmark 1/2.
``nonlocal-temporal``
    CHSH game on a shared entangled pair, Bob measuring after Alice.

Answers map to outcomes as ``0 <-> +1`` and ``1 <-> -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Mapping

import numpy as np

from . import montecarlo
from .correlators import (
    InterventionSchedule,
    Target,
    analytic_spatiotemporal_correlator,
    analytic_temporal_correlator,
    as_schedule,
)
from .inequalities import chsh_from_directions, lgi_from_directions, spatiotemporal_chsh
from .qubit import (
    BiqubitDensity,
    Direction,
    QubitDensity,
    Side,
    make_singlet,
    measure_biqubit_batch,
    measure_bloch_batch,
)


class GameKind(str, Enum):
    LGI = "lgi"
    BIASED_LGI = "biased-lgi"
    BIASED_TCHSH = "biased-tchsh"
    NONLOCAL_TEMPORAL = "nonlocal-temporal"

    @property
    def is_lgi(self) -> bool:
        return self in (GameKind.LGI, GameKind.BIASED_LGI)

    @property
    def is_biased(self) -> bool:
        return self is not GameKind.LGI

    @property
    def is_temporal(self) -> bool:
        """True when both players measure the same qubit."""
        return self is not GameKind.NONLOCAL_TEMPORAL


Question = Hashable


@dataclass(frozen=True, eq=False)
class GameSpec:
    kind: GameKind
    k_set: tuple[Question, ...]
    l_set: tuple[Question, ...]
    xi: Mapping[tuple[Question, Question], Fraction]
    payoff: Mapping[tuple[Question, Question, int, int], int]
    mu_cl: Fraction
    r_set: tuple[int, ...] = (0, 1)
    s_set: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        if sum(self.xi.values(), Fraction(0)) != 1:
            raise ValueError("question distribution must sum to exactly 1")
        if any(p < 0 for p in self.xi.values()):
            raise ValueError("question probabilities must be non-negative")

    @property
    def shared_questions(self) -> tuple[Question, ...]:
        """Questions naming a time slot either player may be asked about (LGI kinds only)."""
        if not self.kind.is_lgi:
            return ()
        return tuple(q for q in self.k_set if q in self.l_set)

    @property
    def support(self) -> list[tuple[Question, Question]]:
        """Question pairs with nonzero probability, in table order."""
        return [kl for kl, p in self.xi.items() if p > 0]

    def winning_parity(self, k: Question, l: Question) -> int:
        """Parity ``r xor s`` that scores +1 for the pair ``(k, l)``."""
        return 0 if self.payoff[k, l, 0, 0] == 1 else 1


def answer_from_outcome(outcome: int) -> int:
    return (1 - int(outcome)) // 2


def outcome_from_answer(answer: int) -> int:
    return 1 - 2 * int(answer)


def _xor_payoff(k_set, l_set, target) -> dict:
    return {
        (k, l, r, s): 1 if (r ^ s) == target(k, l) else -1
        for k in k_set for l in l_set for r in (0, 1) for s in (0, 1)
    }


def make_game(kind: GameKind | str) -> GameSpec:
    kind = GameKind(kind)
    if kind.is_lgi:
        k_set, l_set = (1, 2), (2, 3)
        xi = {(k, l): Fraction(0 if k == l else 1, 3) for k in k_set for l in l_set}
        payoff = _xor_payoff(k_set, l_set, lambda k, l: (k * l) % 2)
        return GameSpec(kind, k_set, l_set, xi, payoff, Fraction(1, 3))
    k_set = l_set = (0, 1)
    xi = {(k, l): Fraction(1, 4) for k in k_set for l in l_set}
    payoff = _xor_payoff(k_set, l_set, lambda k, l: k * l)
    return GameSpec(kind, k_set, l_set, xi, payoff, Fraction(1, 2))


def expected_payoff_table(xi: Mapping, alpha: Mapping, mu: Mapping) -> float:
    """``sum_kl xi(k,l) sum_rs alpha(r,s|k,l) mu(r,s|k,l)``.

    ``alpha[k, l]`` maps answer pairs ``(r, s)`` to probabilities and
    ``mu`` is keyed by ``(k, l, r, s)``.
    """
    total = 0
    for (k, l), p in xi.items():
        if p == 0:
            continue
        resp = alpha[k, l]
        mass = sum(resp.values())
        if abs(mass - 1) > 1e-12:
            raise ValueError(f"responses for question pair {(k, l)} sum to {mass}, expected 1")
        total += p * sum(q * mu[k, l, r, s] for (r, s), q in resp.items())
    return total


def alpha_from_correlator(c_kl: float, k: Question, l: Question, game: GameSpec) -> dict[int, float]:
    """Probability mass on each answer parity ``r xor s`` implied by a correlator."""
    if (k, l) not in game.xi:
        raise KeyError(f"question pair {(k, l)} is not part of the {game.kind.value} game")
    if abs(c_kl) > 1.0 + 1e-12:
        raise ValueError(f"correlator {c_kl} lies outside [-1, 1]")
    return {0: 0.5 * (1.0 + c_kl), 1: 0.5 * (1.0 - c_kl)}


def alpha_table(game: GameSpec, correlators: Mapping) -> dict:
    """Full response table, splitting each parity's mass evenly between its two answer pairs."""
    table = {}
    for k, l in game.xi:
        parity = alpha_from_correlator(correlators.get((k, l), 0.0), k, l, game)
        table[k, l] = {(r, s): parity[r ^ s] / 2 for r in game.r_set for s in game.s_set}
    return table


@dataclass(frozen=True)
class QuantumStrategy:
    """Measurement direction for each question of each player.

    For the LGI kinds questions name time slots, so a player asked question 2
    always measures along the same t2 direction whichever player they are.
    """

    a_dirs: Mapping[Question, Direction]
    b_dirs: Mapping[Question, Direction]
    time_slots: bool = False

    def __post_init__(self):
        if not self.time_slots:
            return
        for q in set(self.a_dirs) & set(self.b_dirs):
            if self.a_dirs[q] != self.b_dirs[q]:
                raise ValueError(f"shared time slot {q!r} must use one direction for both players")

    @classmethod
    def lgi(cls, t1: Direction, t2: Direction, t3: Direction) -> "QuantumStrategy":
        return cls({1: t1, 2: t2}, {2: t2, 3: t3}, time_slots=True)

    @classmethod
    def chsh(cls, a0: Direction, a1: Direction, b0: Direction, b1: Direction) -> "QuantumStrategy":
        return cls({0: a0, 1: a1}, {0: b0, 1: b1})

    def slots(self) -> tuple[Direction, Direction, Direction]:
        return self.a_dirs[1], self.a_dirs[2], self.b_dirs[3]

    def chsh_dirs(self) -> tuple[Direction, Direction, Direction, Direction]:
        return self.a_dirs[0], self.a_dirs[1], self.b_dirs[0], self.b_dirs[1]


def optimal_strategy(kind: GameKind | str) -> QuantumStrategy:
    """Best-known quantum strategy without intervention, all directions in the xz-plane.

    The entangled game uses the singlet, whose correlator is ``-a.b``, so
    Bob's directions are flipped relative to the single-qubit game.
    """
    kind = GameKind(kind)
    if kind.is_lgi:
        return QuantumStrategy.lgi(*(Direction.in_xz(math.radians(t)) for t in (0.0, 60.0, 120.0)))
    b_angles = (45.0, -45.0) if kind.is_temporal else (225.0, 135.0)
    return QuantumStrategy.chsh(
        Direction.in_xz(0.0),
        Direction.in_xz(math.pi / 2),
        *(Direction.in_xz(math.radians(t)) for t in b_angles),
    )


def _check_schedule(game: GameSpec, sched: InterventionSchedule) -> None:
    if not sched.dirs:
        return
    if game.kind.is_temporal and sched.target is not Target.SHARED:
        raise ValueError(f"{game.kind.value} interventions must target the shared qubit")
    if not game.kind.is_temporal and sched.target is Target.SHARED:
        raise ValueError("nonlocal-temporal interventions must target alice-qubit or bob-qubit")


def _default_schedule(game: GameSpec, sched) -> InterventionSchedule:
    return as_schedule(sched, Target.SHARED if game.kind.is_temporal else Target.BOB)


def correlator_table(
    game: GameSpec,
    strategy: QuantumStrategy,
    sched: InterventionSchedule | None = None,
    rho: BiqubitDensity | None = None,
) -> dict:
    """Analytic correlator of the players' outcomes for every question pair."""
    sched = _default_schedule(game, sched)
    _check_schedule(game, sched)
    table = {}
    for k, l in game.xi:
        a, b = strategy.a_dirs[k], strategy.b_dirs[l]
        if game.kind.is_temporal:
            table[k, l] = analytic_temporal_correlator(a, sched, b)
        else:
            table[k, l] = analytic_spatiotemporal_correlator(rho or make_singlet(), a, b, sched)
    return table


def analytic_payoff(
    game: GameSpec,
    strategy: QuantumStrategy,
    sched: InterventionSchedule | None = None,
    rho: BiqubitDensity | None = None,
) -> float:
    sched = _default_schedule(game, sched)
    _check_schedule(game, sched)
    if game.kind.is_lgi:
        return lgi_from_directions(*strategy.slots(), sched) / 3
    if game.kind is GameKind.BIASED_TCHSH:
        return chsh_from_directions(*strategy.chsh_dirs(), sched) / 4
    return spatiotemporal_chsh(rho or make_singlet(), *strategy.chsh_dirs(), sched) / 4


@dataclass(frozen=True)
class SimulationResult:
    empirical_payoff: float
    std_error: float
    rounds: int
    per_pair_counts: dict = field(repr=False)
    zeta: float
    verdict: str


def _verdict(game: GameSpec, zeta: float) -> str:
    if not game.kind.is_biased:
        return "not-applicable"
    return "AB-win" if zeta > 0 else "C-win"


def simulate_game(
    game: GameSpec,
    strategy: QuantumStrategy,
    sched: InterventionSchedule | None = None,
    rounds: int = 100_000,
    seed: int = 0,
    initial_state: QubitDensity | BiqubitDensity | None = None,
    workers: int | None = None,
) -> SimulationResult:
    """Play ``rounds`` independent rounds, each on a freshly prepared system.

    Per round the question pair is drawn from the game's distribution, the
    earlier player measures, the intervener's schedule is applied, then the
    later player measures. Both answers are read off their outcomes and
    scored.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    sched = _default_schedule(game, sched)
    _check_schedule(game, sched)

    pairs = game.support
    probs = np.array([float(game.xi[kl]) for kl in pairs])
    a_dirs = np.array([strategy.a_dirs[k].as_array() for k, _ in pairs])
    b_dirs = np.array([strategy.b_dirs[l].as_array() for _, l in pairs])
    scores = np.array([[[game.payoff[k, l, r, s] for s in (0, 1)] for r in (0, 1)] for k, l in pairs])
    mids = [d.as_array() for d in sched.dirs]
    if game.kind.is_lgi and any(k >= l for k, l in pairs):
        raise ValueError("LGI question pairs must have player A's slot strictly before B's")

    if game.kind.is_temporal:
        if initial_state is not None and not isinstance(initial_state, QubitDensity):
            raise TypeError(f"{game.kind.value} needs a single-qubit initial state")
        start = (initial_state or QubitDensity.maximally_mixed()).as_array()
    else:
        if initial_state is not None and not isinstance(initial_state, BiqubitDensity):
            raise TypeError("nonlocal-temporal needs a two-qubit initial state")
        start = (initial_state or make_singlet()).matrix
    side = Side.A if sched.target is Target.ALICE else Side.B

    def block(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        q = rng.choice(len(pairs), size=size, p=probs)
        if game.kind.is_temporal:
            state = np.broadcast_to(start, (size, 3))
            xa, state = measure_bloch_batch(state, a_dirs[q], rng)
            for r in mids:
                _, state = measure_bloch_batch(state, r, rng)
            xb, _ = measure_bloch_batch(state, b_dirs[q], rng)
        else:
            state = np.broadcast_to(start, (size, 4, 4))
            xa, state = measure_biqubit_batch(state, Side.A, a_dirs[q], rng)
            for r in mids:
                _, state = measure_biqubit_batch(state, side, r, rng)
            xb, _ = measure_biqubit_batch(state, Side.B, b_dirs[q], rng)
        score = scores[q, (1 - xa) // 2, (1 - xb) // 2]
        wins = np.bincount(q[score == 1], minlength=len(pairs))
        losses = np.bincount(q[score == -1], minlength=len(pairs))
        return wins, losses

    wins = np.zeros(len(pairs), dtype=np.int64)
    losses = np.zeros(len(pairs), dtype=np.int64)
    for w, lo in montecarlo.run_blocks(block, rounds, seed, workers):
        wins += w
        losses += lo

    mean = float(wins.sum() - losses.sum()) / rounds
    se = math.sqrt(max(0.0, 1.0 - mean * mean) / rounds)
    counts = {kl: (int(w), int(lo)) for kl, w, lo in zip(pairs, wins, losses)}
    zeta = mean - float(game.mu_cl)
    return SimulationResult(mean, se, rounds, counts, zeta, _verdict(game, zeta))


def payoff_gain_percent(quantum: float, classical: float) -> float:
    if classical == 0:
        raise ZeroDivisionError("classical payoff must be nonzero")
    return 100.0 * (quantum - classical) / classical
