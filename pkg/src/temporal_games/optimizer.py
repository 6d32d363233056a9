"""Maximization of inequality expressions and game payoffs over measurement directions.

Search is two-stage: an exhaustive grid over the direction angles, then
derivative-free coordinate ascent from every grid cell in the top decile
(step halving until the step drops below ``tol``). All starts are refined
simultaneously as numpy arrays. Objectives here are trigonometric
polynomials, so the grid reliably lands in the basin of the global optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .correlators import (
    InterventionSchedule,
    Target,
    as_schedule,
    spatiotemporal_correlator_batch,
    temporal_correlator_batch,
)
from .games import GameKind, GameSpec, QuantumStrategy, make_game, optimal_strategy, simulate_game
from .inequalities import chsh_from_directions, lgi_from_directions
from .montecarlo import derive_seed
from .qubit import BiqubitDensity, Direction, correlation_tensor, make_singlet

Objective = Callable[[Mapping[str, np.ndarray]], np.ndarray]

COPLANAR = "coplanar"
SPHERE = "sphere"
GRID_STEP_DEG = {COPLANAR: 15.0, SPHERE: 45.0}
DEFAULT_TOL = 1e-9
MAX_STARTS = 2048
MAX_SWEEPS = 20_000
_CHUNK = 1 << 18
_TIE = 1e-12


@dataclass
class OptimizationReport:
    best_value: float
    best_directions: dict[str, Direction]
    iterations: int
    converged: bool
    parameterization: str = COPLANAR
    history: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_directions": {k: [d.x, d.y, d.z] for k, d in self.best_directions.items()},
            "iterations": self.iterations,
            "converged": self.converged,
            "parameterization": self.parameterization,
        }


def _params_per_dir(parameterization: str) -> int:
    if parameterization == COPLANAR:
        return 1
    if parameterization == SPHERE:
        return 2
    raise ValueError(f"unknown parameterization {parameterization!r}")


def _to_vectors(params: np.ndarray, names: Sequence[str], parameterization: str) -> dict[str, np.ndarray]:
    out = {}
    if parameterization == COPLANAR:
        for i, name in enumerate(names):
            t = params[:, i]
            out[name] = np.stack([np.sin(t), np.zeros_like(t), np.cos(t)], axis=1)
    else:
        for i, name in enumerate(names):
            th, ph = params[:, 2 * i], params[:, 2 * i + 1]
            st = np.sin(th)
            out[name] = np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=1)
    return out


def _canonical(params: np.ndarray, parameterization: str) -> np.ndarray:
    p = np.array(params, dtype=float)
    two_pi = 2 * math.pi
    if parameterization == COPLANAR:
        return np.mod(p, two_pi)
    th, ph = p[..., 0::2] % two_pi, p[..., 1::2]
    flip = th > math.pi
    th = np.where(flip, two_pi - th, th)
    ph = np.mod(np.where(flip, ph + math.pi, ph), two_pi)
    p[..., 0::2], p[..., 1::2] = th, ph
    return p


def _grid_axes(n_dirs: int, parameterization: str, step_deg: float) -> list[np.ndarray]:
    step = math.radians(step_deg)
    around = np.arange(0.0, 2 * math.pi - 1e-12, step)
    if parameterization == COPLANAR:
        return [around] * n_dirs
    polar = np.arange(0.0, math.pi + 1e-12, step)
    return [polar, around] * n_dirs


def maximize_directions(
    objective: Objective,
    names: Sequence[str],
    parameterization: str = COPLANAR,
    tol: float = DEFAULT_TOL,
    grid_step_deg: float | None = None,
    max_starts: int = MAX_STARTS,
    max_sweeps: int = MAX_SWEEPS,
) -> OptimizationReport:
    """Maximize ``objective`` over one unit vector per name.

    ``best_value`` is the largest value seen at any probe; among probes within
    1e-12 of it, the lexicographically smallest canonical angles are reported.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _params_per_dir(parameterization)
    step_deg = GRID_STEP_DEG[parameterization] if grid_step_deg is None else grid_step_deg
    axes = _grid_axes(len(names), parameterization, step_deg)
    shape = tuple(len(a) for a in axes)

    def f(params: np.ndarray) -> np.ndarray:
        return np.asarray(objective(_to_vectors(params, names, parameterization)), dtype=float)

    def grid_points(flat: np.ndarray) -> np.ndarray:
        idx = np.unravel_index(flat, shape)
        return np.stack([ax[i] for ax, i in zip(axes, idx)], axis=1)

    size = int(np.prod(shape))
    values = np.empty(size)
    for lo in range(0, size, _CHUNK):
        flat = np.arange(lo, min(size, lo + _CHUNK))
        values[flat] = f(grid_points(flat))

    threshold = np.percentile(values, 90.0)
    cand = np.flatnonzero(values >= threshold)
    # best first; equal values keep grid (lexicographic) order
    cand = cand[np.lexsort((cand, -values[cand]))][:max_starts]
    params = grid_points(cand)
    vals = values[cand].copy()
    history = [float(vals.max())]

    h = math.radians(step_deg) / 2
    sweeps = 0
    while h >= tol and sweeps < max_sweeps:
        improved = True
        while improved and sweeps < max_sweeps:
            improved = False
            sweeps += 1
            for j in range(params.shape[1]):
                for sign in (1.0, -1.0):
                    trial = params.copy()
                    trial[:, j] += sign * h
                    tv = f(trial)
                    better = tv > vals
                    if better.any():
                        improved = True
                        params[better] = trial[better]
                        vals[better] = tv[better]
            history.append(float(vals.max()))
        h /= 2
    converged = h < tol

    params = _canonical(params, parameterization)
    top = vals.max()
    tied = np.flatnonzero(vals >= top - _TIE)
    order = np.lexsort(params[tied].T[::-1])
    best = tied[order[0]]
    best_vecs = _to_vectors(params[best : best + 1], names, parameterization)
    best_dirs = {name: Direction.from_vector(v[0]) for name, v in best_vecs.items()}
    # the reported directions attain best_value to within the tie window
    best_value = max(float(top), float(f(params[best : best + 1])[0]), max(history))
    history.append(best_value)
    return OptimizationReport(best_value, best_dirs, sweeps, converged, parameterization, history)


def _lgi_objective(sched: InterventionSchedule | None) -> Objective:
    mids = [d.as_array() for d in sched.dirs] if sched else []

    def obj(v):
        c = lambda a, b: temporal_correlator_batch(v[a], mids, v[b])  # noqa: E731
        return c("a1", "a2") + c("a2", "a3") - c("a1", "a3")

    return obj


def _lgi_joint_objective(v):
    c = lambda a, b: temporal_correlator_batch(v[a], [v["c"]], v[b])  # noqa: E731
    return c("a1", "a2") + c("a2", "a3") - c("a1", "a3")


def maximize_lgi(
    intervention: Direction | InterventionSchedule | None = None,
    tol: float = DEFAULT_TOL,
    joint: bool = False,
    parameterization: str | None = None,
    **kw,
) -> OptimizationReport:
    """Largest LGI combination over the three measurement directions.

    ``joint=True`` also lets a single intervening direction ``c`` vary.
    """
    if joint:
        if intervention is not None:
            raise ValueError("joint mode optimizes the intervention itself; do not pass one")
        return maximize_directions(_lgi_joint_objective, ("a1", "a2", "a3", "c"),
                                   parameterization or SPHERE, tol, **kw)
    sched = as_schedule(intervention)
    if sched.target is not Target.SHARED:
        raise ValueError("LGI interventions must target the shared qubit")
    default = SPHERE if sched else COPLANAR
    return maximize_directions(_lgi_objective(sched), ("a1", "a2", "a3"),
                               parameterization or default, tol, **kw)


def _chsh_objective(sched: InterventionSchedule | None) -> Objective:
    mids = [d.as_array() for d in sched.dirs] if sched else []

    def obj(v):
        c = lambda a, b: temporal_correlator_batch(v[a], mids, v[b])  # noqa: E731
        return c("a0", "b0") + c("a0", "b1") + c("a1", "b0") - c("a1", "b1")

    return obj


def maximize_temporal_chsh(
    sched: InterventionSchedule | Direction | None = None,
    tol: float = DEFAULT_TOL,
    parameterization: str | None = None,
    **kw,
) -> OptimizationReport:
    sched = as_schedule(sched)
    if sched.target is not Target.SHARED:
        raise ValueError("temporal CHSH interventions must target the shared qubit")
    default = SPHERE if sched else COPLANAR
    return maximize_directions(_chsh_objective(sched), ("a0", "a1", "b0", "b1"),
                               parameterization or default, tol, **kw)


def maximize_spatiotemporal_chsh(
    rho: BiqubitDensity | None = None,
    sched: InterventionSchedule | None = None,
    tol: float = DEFAULT_TOL,
    parameterization: str | None = None,
    **kw,
) -> OptimizationReport:
    rho = rho or make_singlet()
    sched = as_schedule(sched, Target.BOB)
    if sched and sched.target is Target.SHARED:
        raise ValueError("spatio-temporal interventions must target alice-qubit or bob-qubit")
    tensor = correlation_tensor(rho)
    mids = [d.as_array() for d in sched.dirs]

    def obj(v):
        c = lambda a, b: spatiotemporal_correlator_batch(tensor, v[a], v[b], mids, sched.target)  # noqa: E731
        return c("a0", "b0") + c("a0", "b1") + c("a1", "b0") - c("a1", "b1")

    default = SPHERE if sched.dirs and sched.target is Target.BOB else COPLANAR
    return maximize_directions(obj, ("a0", "a1", "b0", "b1"), parameterization or default, tol, **kw)


def maximize_payoff(
    game: GameSpec | GameKind | str,
    sched: InterventionSchedule | Direction | None = None,
    tol: float = DEFAULT_TOL,
    rho: BiqubitDensity | None = None,
    **kw,
) -> OptimizationReport:
    """Best quantum payoff of a game, from the matching expression maximizer."""
    game = game if isinstance(game, GameSpec) else make_game(game)
    if game.kind.is_lgi:
        report, scale = maximize_lgi(sched, tol, **kw), 3
    elif game.kind is GameKind.BIASED_TCHSH:
        report, scale = maximize_temporal_chsh(sched, tol, **kw), 4
    else:
        report, scale = maximize_spatiotemporal_chsh(rho, sched, tol, **kw), 4
    report.best_value /= scale
    report.history = [v / scale for v in report.history]
    return report


# Sweeps ---------------------------------------------------------------------

SWEEP_EXPRESSIONS = ("lgi", "tchsh", "payoff")
SWEEP_PARAMETERIZATIONS = ("equal-angle", "intervention-angle")


def _equal_angle_lgi(theta: float) -> tuple[Direction, Direction, Direction]:
    return tuple(Direction.in_xz(i * theta) for i in range(3))


def _equal_angle_chsh(theta: float) -> tuple[Direction, Direction, Direction, Direction]:
    # a0, a1, b0, b1: three pairs at angle theta, the subtracted pair at 3 theta
    return (Direction.in_xz(0.0), Direction.in_xz(2 * theta), Direction.in_xz(theta), Direction.in_xz(-theta))


@dataclass(frozen=True)
class SweepRow:
    angle_deg: float
    value: float
    empirical: float | None = None
    std_error: float | None = None


def sweep(
    expression: str,
    parameterization: str = "equal-angle",
    steps: int = 180,
    sched: InterventionSchedule | Direction | None = None,
    game: str = "lgi",
    mc_rounds: int | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> list[SweepRow]:
    """Expression values along a one-angle family, ``steps + 1`` rows over [0, 180] degrees.

    ``equal-angle``: players' directions in the xz-plane spaced by the swept
    angle (LGI: ``0, t, 2t``; CHSH: ``a0=0, b0=t, a1=2t, b1=-t``), with the
    optional fixed ``sched`` between every pair.

    ``intervention-angle``: players fixed at their optimal directions and a
    single intervention in the xz-plane at the swept angle.

    ``payoff`` evaluates the payoff of ``game`` on the same family. With
    ``mc_rounds``, each row is also estimated by simulating the game.
    """
    if expression not in SWEEP_EXPRESSIONS:
        raise ValueError(f"unknown sweep expression {expression!r}")
    if parameterization not in SWEEP_PARAMETERIZATIONS:
        raise ValueError(f"unknown sweep parameterization {parameterization!r}")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")

    if expression == "lgi":
        kind = GameKind.LGI
    elif expression == "tchsh":
        kind = GameKind.BIASED_TCHSH
    else:
        kind = GameKind(game)
        if kind is GameKind.NONLOCAL_TEMPORAL:
            raise ValueError("payoff sweeps cover the single-qubit games only")
    spec = make_game(kind)
    scale = 1 if expression == "payoff" else (3 if kind.is_lgi else 4)
    fixed = as_schedule(sched)

    rows = []
    for i in range(steps + 1):
        deg = 180.0 * i / steps
        theta = math.radians(deg)
        if parameterization == "equal-angle":
            dirs = _equal_angle_lgi(theta) if kind.is_lgi else _equal_angle_chsh(theta)
            row_sched = fixed
        else:
            dirs = optimal_strategy(kind).slots() if kind.is_lgi else optimal_strategy(kind).chsh_dirs()
            row_sched = InterventionSchedule.of(Direction.in_xz(theta))
        strategy = QuantumStrategy.lgi(*dirs) if kind.is_lgi else QuantumStrategy.chsh(*dirs)
        if kind.is_lgi:
            value = lgi_from_directions(*dirs, row_sched) / (3 if expression == "payoff" else 1)
        else:
            value = chsh_from_directions(*dirs, row_sched) / (4 if expression == "payoff" else 1)
        if mc_rounds:
            res = simulate_game(spec, strategy, row_sched, mc_rounds, derive_seed(seed, i), workers=workers)
            rows.append(SweepRow(deg, value, res.empirical_payoff * scale, res.std_error * scale))
        else:
            rows.append(SweepRow(deg, value))
    return rows
