"""Two-time correlators with intervening projective measurements.

Three routes compute the same quantities and are kept deliberately separate:

* closed forms (``analytic_*``), built on :func:`beta`;
* exhaustive sums over every outcome chain (``chain_enumeration_*``), used as
  oracles;
* Monte Carlo sampling through the measurement engine (``mc_*``).

Intervener outcomes are always marginalized; they never reach the players.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import montecarlo
from .qubit import (
    IDENTITY2,
    PAULI,
    BiqubitDensity,
    Direction,
    QubitDensity,
    Side,
    biqubit_collapse,
    biqubit_correlator,
    biqubit_local_probability,
    measure_biqubit_batch,
    measure_bloch_batch,
)

MAX_ENUMERATION_INTERVENTIONS = 20


class Target(str, Enum):
    SHARED = "shared-qubit"
    ALICE = "alice-qubit"
    BOB = "bob-qubit"


@dataclass(frozen=True)
class InterventionSchedule:
    """Chronological list of intervening measurement directions and the qubit they act on."""

    dirs: tuple[Direction, ...] = ()
    target: Target = Target.SHARED

    def __post_init__(self):
        object.__setattr__(self, "dirs", tuple(self.dirs))
        object.__setattr__(self, "target", Target(self.target))
        for d in self.dirs:
            if not isinstance(d, Direction):
                raise TypeError(f"schedule entries must be Directions, got {type(d).__name__}")

    @classmethod
    def of(cls, *dirs: Direction, target: Target | str = Target.SHARED) -> "InterventionSchedule":
        return cls(tuple(dirs), Target(target))

    @property
    def n(self) -> int:
        return len(self.dirs)

    def __bool__(self) -> bool:
        return bool(self.dirs)


NO_INTERVENTION = InterventionSchedule()


def as_schedule(sched: InterventionSchedule | Direction | Sequence[Direction] | None,
                target: Target | str = Target.SHARED) -> InterventionSchedule:
    if sched is None:
        return InterventionSchedule((), Target(target))
    if isinstance(sched, InterventionSchedule):
        return sched
    if isinstance(sched, Direction):
        return InterventionSchedule((sched,), Target(target))
    return InterventionSchedule(tuple(sched), Target(target))


@dataclass(frozen=True)
class CorrelatorEstimate:
    mean: float
    std_error: float
    n_samples: int

    def within(self, value: float, n_se: float = 5.0) -> bool:
        return abs(self.mean - value) <= n_se * self.std_error


def beta(dirs: Iterable[Direction]) -> float:
    """Product of dot products of consecutive intervention directions."""
    dirs = list(dirs)
    out = 1.0
    for prev, cur in zip(dirs, dirs[1:]):
        out *= prev.dot(cur)
    return out


def kappa(dirs: Sequence[Direction], b: Direction) -> float:
    """``beta(dirs)`` times the overlap of the last intervention with Bob's direction."""
    if not dirs:
        return 1.0
    return dirs[-1].dot(b) * beta(dirs)


def analytic_temporal_correlator(a: Direction, sched: InterventionSchedule | None, b: Direction) -> float:
    sched = as_schedule(sched)
    if sched.target is not Target.SHARED:
        raise ValueError(f"temporal correlators need a shared-qubit schedule, got {sched.target.value}")
    if not sched.dirs:
        return a.dot(b)
    return beta(sched.dirs) * a.dot(sched.dirs[0]) * sched.dirs[-1].dot(b)


def _projector_pair(direction: Direction) -> np.ndarray:
    """Explicit 2x2 projectors for outcomes (+1, -1), stacked."""
    s = np.einsum("i,ijk->jk", direction.as_array(), PAULI)
    return np.stack([0.5 * (IDENTITY2 + s), 0.5 * (IDENTITY2 - s)])


def chain_enumeration_correlator(
    rho: QubitDensity, a: Direction, sched: InterventionSchedule | None, b: Direction
) -> float:
    """Sum of ``x_0 x_{n+1}`` over every outcome chain weighted by its Born probability.

    Each chain ``(x_0, ..., x_{n+1})`` has probability
    ``Tr(rho P_0) * prod_i Tr(P_{i-1} P_i)`` with ``P_i`` the rank-one
    projector for outcome ``x_i`` along the i-th direction; all traces are
    taken of explicit 2x2 matrices.
    """
    sched = as_schedule(sched)
    if sched.target is not Target.SHARED:
        raise ValueError(f"temporal correlators need a shared-qubit schedule, got {sched.target.value}")
    if sched.n > MAX_ENUMERATION_INTERVENTIONS:
        raise ValueError(
            f"enumeration overflow: {sched.n} interventions exceeds {MAX_ENUMERATION_INTERVENTIONS}"
        )
    chain = [a, *sched.dirs, b]
    projs = [_projector_pair(d) for d in chain]
    first = np.einsum("ij,xji->x", rho.matrix(), projs[0]).real
    links = [np.einsum("xij,yji->xy", p, q).real for p, q in zip(projs, projs[1:])]

    m = len(chain)
    # row c of idx holds the outcome indices (0 -> +1, 1 -> -1) of chain c
    idx = (np.arange(2**m)[:, None] >> np.arange(m - 1, -1, -1)) & 1
    weight = first[idx[:, 0]]
    for i, link in enumerate(links):
        weight = weight * link[idx[:, i], idx[:, i + 1]]
    sign = 1 - 2 * idx[:, 0]
    sign_last = 1 - 2 * idx[:, -1]
    return float(np.sum(sign * sign_last * weight))


def _dirs_array(sched: InterventionSchedule) -> list[np.ndarray]:
    return [d.as_array() for d in sched.dirs]


def mc_temporal_correlator(
    rho: QubitDensity | None,
    a: Direction,
    sched: InterventionSchedule | None,
    b: Direction,
    n_rounds: int,
    seed: int,
    workers: int | None = None,
) -> CorrelatorEstimate:
    sched = as_schedule(sched)
    if sched.target is not Target.SHARED:
        raise ValueError(f"temporal correlators need a shared-qubit schedule, got {sched.target.value}")
    rho = rho or QubitDensity.maximally_mixed()
    start = rho.as_array()
    a_vec, b_vec, mids = a.as_array(), b.as_array(), _dirs_array(sched)

    def block(rng: np.random.Generator, size: int) -> int:
        state = np.broadcast_to(start, (size, 3))
        x0, state = measure_bloch_batch(state, a_vec, rng)
        for r in mids:
            _, state = measure_bloch_batch(state, r, rng)
        x1, _ = measure_bloch_batch(state, b_vec, rng)
        return int(np.sum(x0.astype(np.int64) * x1))

    total = sum(montecarlo.run_blocks(block, n_rounds, seed, workers))
    return _estimate(total, n_rounds)


def _estimate(total: int, n: int) -> CorrelatorEstimate:
    mean = total / n
    return CorrelatorEstimate(mean, math.sqrt(max(0.0, 1.0 - mean * mean) / n), n)


def analytic_spatiotemporal_correlator(
    rho: BiqubitDensity, a: Direction, b: Direction, sched: InterventionSchedule | None = None
) -> float:
    """Correlator of Alice (qubit A, earlier) and Bob (qubit B, later).

    Interventions on Alice's qubit after her measurement leave it unchanged;
    interventions on Bob's qubit replace it by ``kappa * C(a, r_1)``.
    """
    sched = as_schedule(sched)
    if not sched.dirs or sched.target is Target.ALICE:
        return biqubit_correlator(rho, a, b)
    if sched.target is Target.BOB:
        return kappa(sched.dirs, b) * biqubit_correlator(rho, a, sched.dirs[0])
    raise ValueError("spatio-temporal schedules must target alice-qubit or bob-qubit")


def chain_enumeration_spatiotemporal_correlator(
    rho: BiqubitDensity, a: Direction, b: Direction, sched: InterventionSchedule | None = None
) -> float:
    """Exact sum over all outcome sequences using successive 4x4 collapses."""
    sched = as_schedule(sched)
    if sched.dirs and sched.target is Target.SHARED:
        raise ValueError("spatio-temporal schedules must target alice-qubit or bob-qubit")
    side = Side.A if sched.target is Target.ALICE else Side.B
    steps = [(Side.A, a)] + [(side, d) for d in sched.dirs] + [(Side.B, b)]

    def walk(state: BiqubitDensity, i: int) -> float:
        # expectation of x_alice * x_bob given the first i steps already taken
        side_i, d = steps[i]
        total = 0.0
        for o in (1, -1):
            p = biqubit_local_probability(state, side_i, d, o)
            if p <= 1e-14:
                continue
            if i == len(steps) - 1:
                total += p * o
                continue
            nxt = biqubit_collapse(state, side_i, d, o)
            total += p * (o if i == 0 else 1) * walk(nxt, i + 1)
        return total

    return walk(rho, 0)


def mc_spatiotemporal_correlator(
    rho: BiqubitDensity,
    a: Direction,
    b: Direction,
    sched: InterventionSchedule | None,
    n_rounds: int,
    seed: int,
    workers: int | None = None,
) -> CorrelatorEstimate:
    sched = as_schedule(sched)
    if sched.dirs and sched.target is Target.SHARED:
        raise ValueError("spatio-temporal schedules must target alice-qubit or bob-qubit")
    side = Side.A if sched.target is Target.ALICE else Side.B
    start = rho.matrix
    a_vec, b_vec, mids = a.as_array(), b.as_array(), _dirs_array(sched)

    def block(rng: np.random.Generator, size: int) -> int:
        state = np.broadcast_to(start, (size, 4, 4))
        xa, state = measure_biqubit_batch(state, Side.A, a_vec, rng)
        for r in mids:
            _, state = measure_biqubit_batch(state, side, r, rng)
        xb, _ = measure_biqubit_batch(state, Side.B, b_vec, rng)
        return int(np.sum(xa.astype(np.int64) * xb))

    total = sum(montecarlo.run_blocks(block, n_rounds, seed, workers))
    return _estimate(total, n_rounds)


# Vectorized closed forms used by the optimizer: directions are (m, 3) arrays
# (or broadcastable (3,) vectors), results are (m,) arrays.

def _rowdot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(u * v, axis=-1)


def temporal_correlator_batch(a: np.ndarray, mids: Sequence[np.ndarray], b: np.ndarray) -> np.ndarray:
    if not mids:
        return _rowdot(a, b)
    out = _rowdot(a, mids[0]) * _rowdot(mids[-1], b)
    for prev, cur in zip(mids, mids[1:]):
        out = out * _rowdot(prev, cur)
    return out


def spatiotemporal_correlator_batch(
    tensor: np.ndarray, a: np.ndarray, b: np.ndarray, mids: Sequence[np.ndarray] = (), target: Target = Target.BOB
) -> np.ndarray:
    """Closed form with ``C(a, b) = a @ T @ b`` for a fixed correlation tensor ``T``."""
    if not mids or Target(target) is Target.ALICE:
        return _rowdot(a @ tensor, b)
    factor = _rowdot(mids[-1], b)
    for prev, cur in zip(mids, mids[1:]):
        factor = factor * _rowdot(prev, cur)
    return factor * _rowdot(a @ tensor, mids[0])
