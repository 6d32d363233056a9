"""Leggett-Garg and CHSH expressions, and exhaustive classical baselines."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import TYPE_CHECKING, Hashable, Iterable, Mapping, Sequence

from .correlators import (
    InterventionSchedule,
    Target,
    analytic_spatiotemporal_correlator,
    analytic_temporal_correlator,
    as_schedule,
)
from .qubit import BiqubitDensity, Direction

if TYPE_CHECKING:
    from .games import GameSpec

_SLACK = 1e-12


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if abs(value) > 1.0 + _SLACK:
        raise ValueError(f"correlator {name}={value} lies outside [-1, 1]")
    return value


@dataclass(frozen=True)
class CorrelatorTriple:
    c12: float
    c23: float
    c13: float

    def __post_init__(self):
        for name in ("c12", "c23", "c13"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))


@dataclass(frozen=True)
class ChshQuad:
    c00: float
    c01: float
    c10: float
    c11: float

    def __post_init__(self):
        for name in ("c00", "c01", "c10", "c11"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))


def lgi_value(t: CorrelatorTriple) -> float:
    return t.c12 + t.c23 - t.c13


def chsh_value(q: ChshQuad) -> float:
    return q.c00 + q.c01 + q.c10 - q.c11


def lgi_from_directions(
    a1: Direction,
    a2: Direction,
    a3: Direction,
    intervention: Direction | InterventionSchedule | None = None,
) -> float:
    """LGI combination for spin measurements along ``a1, a2, a3`` at three times.

    With an intervention, the same schedule sits between the two measurements
    of every pair.
    """
    sched = as_schedule(intervention)
    c = lambda u, v: analytic_temporal_correlator(u, sched, v)  # noqa: E731
    return lgi_value(CorrelatorTriple(c(a1, a2), c(a2, a3), c(a1, a3)))


def chsh_from_directions(
    a0: Direction,
    a1: Direction,
    b0: Direction,
    b1: Direction,
    sched: InterventionSchedule | Direction | None = None,
) -> float:
    sched = as_schedule(sched)
    c = lambda u, v: analytic_temporal_correlator(u, sched, v)  # noqa: E731
    return chsh_value(ChshQuad(c(a0, b0), c(a0, b1), c(a1, b0), c(a1, b1)))


def spatiotemporal_chsh(
    rho: BiqubitDensity,
    a0: Direction,
    a1: Direction,
    b0: Direction,
    b1: Direction,
    sched: InterventionSchedule | None = None,
) -> float:
    sched = as_schedule(sched, Target.BOB)
    c = lambda u, v: analytic_spatiotemporal_correlator(rho, u, v, sched)  # noqa: E731
    return chsh_value(ChshQuad(c(a0, b0), c(a0, b1), c(a1, b0), c(a1, b1)))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Each player's answer bit as a fixed function of their question."""

    a_map: Mapping[Hashable, int]
    b_map: Mapping[Hashable, int]

    def __hash__(self):
        return hash((tuple(sorted(self.a_map.items())), tuple(sorted(self.b_map.items()))))

    def is_realist(self, game: "GameSpec") -> bool:
        """True if both players agree on every question that names a shared time slot."""
        return all(self.a_map[q] == self.b_map[q] for q in game.shared_questions)


def deterministic_strategies(game: "GameSpec", realist_only: bool = True) -> Iterable[DeterministicStrategy]:
    """Deterministic strategies in a fixed index order.

    All ``|R|^|K| * |S|^|L|`` answer maps are generated; with ``realist_only``
    those disagreeing on a shared time slot are skipped. In the LGI games
    question 2 is a single instant with one pre-existing value, so a
    classical model cannot answer it differently for the two players.
    """
    a_choices = itertools.product(game.r_set, repeat=len(game.k_set))
    b_choices = list(itertools.product(game.s_set, repeat=len(game.l_set)))
    for a_bits in a_choices:
        for b_bits in b_choices:
            s = DeterministicStrategy(dict(zip(game.k_set, a_bits)), dict(zip(game.l_set, b_bits)))
            if not realist_only or s.is_realist(game):
                yield s


def deterministic_payoff(game: "GameSpec", strategy: DeterministicStrategy) -> Fraction:
    return sum(
        (p * game.payoff[k, l, strategy.a_map[k], strategy.b_map[l]] for (k, l), p in game.xi.items()),
        Fraction(0),
    )


def enumerate_deterministic(
    game: "GameSpec", realist_only: bool = True
) -> tuple[Fraction, DeterministicStrategy]:
    """Exact classical value of the game. Ties go to the lowest strategy index."""
    best_value, best = None, None
    for strategy in deterministic_strategies(game, realist_only):
        value = deterministic_payoff(game, strategy)
        if best_value is None or value > best_value:
            best_value, best = value, strategy
    return best_value, best


def classical_strategy_payoff(
    game: "GameSpec",
    mixture: Sequence[tuple[Real, DeterministicStrategy]],
    realist_only: bool = True,
) -> Real:
    """Payoff of a shared-randomness mixture of deterministic strategies.

    Weights must be non-negative and sum to one. Rational weights give an
    exact rational result.
    """
    if not mixture:
        raise ValueError("mixture must contain at least one strategy")
    weights = [w for w, _ in mixture]
    if any(w < 0 for w in weights):
        raise ValueError("mixture weights must be non-negative")
    total = sum(weights)
    if abs(total - 1) > 1e-12:
        raise ValueError(f"mixture weights sum to {total}, expected 1")
    if realist_only and not all(s.is_realist(game) for _, s in mixture):
        raise ValueError("mixture contains a strategy answering a shared time slot inconsistently")
    return sum(w * deterministic_payoff(game, s) for w, s in mixture)
