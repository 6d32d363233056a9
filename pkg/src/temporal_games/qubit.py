"""Single- and two-qubit states, projective spin measurements and sampling.

Single-qubit states live on the Bloch ball as real 3-vectors; a projective
measurement along a unit direction leaves the qubit in the pure eigenstate
``outcome * direction``. Two-qubit states are explicit 4x4 density matrices
with qubit A as the left tensor factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Union

import numpy as np

__all__ = [
    "Direction",
    "X",
    "Y",
    "Z",
    "QubitDensity",
    "Outcome",
    "Side",
    "BiqubitDensity",
    "ImpossibleOutcomeError",
    "project_probability",
    "collapse",
    "sample_measurement",
    "biqubit_local_probability",
    "biqubit_collapse",
    "biqubit_correlator",
    "reduced_bloch",
    "correlation_tensor",
    "make_singlet",
    "make_pure_product",
    "measure_bloch_batch",
    "measure_biqubit_batch",
    "PAULI",
    "IDENTITY2",
]

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_PROB_FLOOR = 1e-14
_NORM_TOL = 1e-12
_PSD_FLOOR = -1e-10


class ImpossibleOutcomeError(ValueError):
    """Raised when collapsing onto an outcome of zero probability."""

    def __init__(self, probability: float):
        super().__init__(f"impossible outcome (probability {probability:.3e})")
        self.probability = probability


class Outcome(IntEnum):
    PLUS = 1
    MINUS = -1


OutcomeLike = Union[Outcome, int]


def _outcome(value: OutcomeLike) -> Outcome:
    try:
        return Outcome(int(value))
    except ValueError:
        raise ValueError(f"outcome must be +1 or -1, got {value!r}") from None


class Side(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class Direction:
    """Unit vector on the Bloch sphere; normalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if not math.isfinite(norm) or norm == 0.0:
            raise ValueError(f"direction must be a finite nonzero vector, got {(self.x, self.y, self.z)}")
        if norm != 1.0:
            object.__setattr__(self, "x", self.x / norm)
            object.__setattr__(self, "y", self.y / norm)
            object.__setattr__(self, "z", self.z / norm)

    @classmethod
    def from_vector(cls, v) -> "Direction":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    @classmethod
    def spherical(cls, theta: float, phi: float = 0.0) -> "Direction":
        """Polar angle ``theta`` from +z and azimuth ``phi`` from +x, radians."""
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    @classmethod
    def in_xz(cls, angle: float) -> "Direction":
        """Direction in the xz-plane, ``angle`` radians from +z towards +x."""
        return cls(math.sin(angle), 0.0, math.cos(angle))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "Direction") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> "Direction":
        return Direction(-self.x, -self.y, -self.z)

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z


X = Direction(1.0, 0.0, 0.0)
Y = Direction(0.0, 1.0, 0.0)
Z = Direction(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class QubitDensity:
    """Single-qubit density matrix ``(1 + bloch . sigma) / 2``."""

    bloch: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        b = tuple(float(c) for c in self.bloch)
        if len(b) != 3:
            raise ValueError("bloch vector must have three components")
        if math.sqrt(sum(c * c for c in b)) > 1.0 + _NORM_TOL:
            raise ValueError(f"bloch vector {b} lies outside the unit ball")
        object.__setattr__(self, "bloch", b)

    @classmethod
    def maximally_mixed(cls) -> "QubitDensity":
        return cls((0.0, 0.0, 0.0))

    @classmethod
    def pure(cls, direction: Direction) -> "QubitDensity":
        return cls((direction.x, direction.y, direction.z))

    def as_array(self) -> np.ndarray:
        return np.array(self.bloch)

    def matrix(self) -> np.ndarray:
        bx, by, bz = self.bloch
        return 0.5 * (IDENTITY2 + bx * PAULI[0] + by * PAULI[1] + bz * PAULI[2])


def project_probability(state: QubitDensity, direction: Direction, outcome: OutcomeLike) -> float:
    """Born probability of ``outcome`` for a spin measurement along ``direction``."""
    o = _outcome(outcome)
    bx, by, bz = state.bloch
    p = 0.5 * (1.0 + o * (bx * direction.x + by * direction.y + bz * direction.z))
    return min(1.0, max(0.0, p))


def collapse(state: QubitDensity, direction: Direction, outcome: OutcomeLike) -> QubitDensity:
    o = _outcome(outcome)
    p = project_probability(state, direction, o)
    if p <= _PROB_FLOOR:
        raise ImpossibleOutcomeError(p)
    return QubitDensity((o * direction.x, o * direction.y, o * direction.z))


def sample_measurement(
    state: QubitDensity, direction: Direction, rng: np.random.Generator
) -> tuple[Outcome, QubitDensity]:
    p_plus = project_probability(state, direction, Outcome.PLUS)
    outcome = Outcome.PLUS if rng.random() < p_plus else Outcome.MINUS
    return outcome, collapse(state, direction, outcome)


def measure_bloch_batch(
    blochs: np.ndarray, directions: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Measure many independent qubits at once.

    ``blochs`` is ``(n, 3)``; ``directions`` is ``(n, 3)`` or a single
    ``(3,)`` unit vector. Returns ``(outcomes, post_blochs)`` with outcomes
    as an int8 array of +1/-1.
    """
    directions = np.broadcast_to(directions, blochs.shape)
    p_plus = 0.5 * (1.0 + np.einsum("ij,ij->i", blochs, directions))
    outcomes = np.where(rng.random(blochs.shape[0]) < p_plus, 1, -1).astype(np.int8)
    return outcomes, outcomes[:, None] * directions


def _projector(direction: Direction, outcome: Outcome) -> np.ndarray:
    return 0.5 * (IDENTITY2 + outcome * np.einsum("i,ijk->jk", direction.as_array(), PAULI))


def _local_projector(side: Side, direction: Direction, outcome: Outcome) -> np.ndarray:
    chi = _projector(direction, outcome)
    return np.kron(chi, IDENTITY2) if Side(side) is Side.A else np.kron(IDENTITY2, chi)


@dataclass(frozen=True, eq=False)
class BiqubitDensity:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-qubit density matrix must be 4x4, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0.0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError(f"density matrix trace is {np.trace(m).real}, expected 1")
        if np.linalg.eigvalsh(m).min() < _PSD_FLOOR:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def biqubit_local_probability(
    state: BiqubitDensity, side: Side | str, direction: Direction, outcome: OutcomeLike
) -> float:
    proj = _local_projector(Side(side), direction, _outcome(outcome))
    p = float(np.trace(state.matrix @ proj).real)
    return min(1.0, max(0.0, p))


def biqubit_collapse(
    state: BiqubitDensity, side: Side | str, direction: Direction, outcome: OutcomeLike
) -> BiqubitDensity:
    proj = _local_projector(Side(side), direction, _outcome(outcome))
    p = float(np.trace(state.matrix @ proj).real)
    if p <= _PROB_FLOOR:
        raise ImpossibleOutcomeError(p)
    post = proj @ state.matrix @ proj / p
    # re-symmetrize to keep the Hermiticity check exact after round-off
    return BiqubitDensity(0.5 * (post + post.conj().T))


def _spin(direction: Direction) -> np.ndarray:
    return np.einsum("i,ijk->jk", direction.as_array(), PAULI)


def biqubit_correlator(state: BiqubitDensity, a: Direction, b: Direction) -> float:
    """``Tr(rho (sigma.a) x (sigma.b))``."""
    return float(np.trace(state.matrix @ np.kron(_spin(a), _spin(b))).real)


def correlation_tensor(state: BiqubitDensity) -> np.ndarray:
    """Real 3x3 tensor ``T[i, j] = Tr(rho sigma_i x sigma_j)``, so ``C(a, b) = a @ T @ b``."""
    ops = np.einsum("iab,jcd->ijacbd", PAULI, PAULI).reshape(3, 3, 4, 4)
    return np.einsum("kl,ijlk->ij", state.matrix, ops).real


def reduced_bloch(state: BiqubitDensity, side: Side | str) -> tuple[float, float, float]:
    """Bloch vector of one qubit's marginal state."""
    m = state.matrix.reshape(2, 2, 2, 2)
    rho = np.einsum("ijkj->ik", m) if Side(side) is Side.A else np.einsum("jijk->ik", m)
    return tuple(float(np.trace(rho @ s).real) for s in PAULI)


def make_singlet() -> BiqubitDensity:
    psi = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
    return BiqubitDensity(np.outer(psi, psi.conj()))


def make_pure_product(a: Direction, b: Direction) -> BiqubitDensity:
    """Product of the +1 eigenstates of ``sigma.a`` (qubit A) and ``sigma.b`` (qubit B)."""
    return BiqubitDensity(np.kron(_projector(a, Outcome.PLUS), _projector(b, Outcome.PLUS)))


def measure_biqubit_batch(
    rhos: np.ndarray, side: Side | str, directions: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Local projective measurement on one qubit of many two-qubit states.

    ``rhos`` is ``(n, 4, 4)`` complex, ``directions`` ``(n, 3)`` or ``(3,)``.
    """
    n = rhos.shape[0]
    d = np.broadcast_to(directions, (n, 3))
    chi_plus = np.empty((n, 2, 2), dtype=complex)
    chi_plus[:, 0, 0] = 0.5 * (1.0 + d[:, 2])
    chi_plus[:, 1, 1] = 0.5 * (1.0 - d[:, 2])
    chi_plus[:, 0, 1] = 0.5 * (d[:, 0] - 1j * d[:, 1])
    chi_plus[:, 1, 0] = 0.5 * (d[:, 0] + 1j * d[:, 1])
    if Side(side) is Side.A:
        proj_plus = (chi_plus[:, :, None, :, None] * IDENTITY2[None, None, :, None, :]).reshape(n, 4, 4)
    else:
        proj_plus = (IDENTITY2[None, :, None, :, None] * chi_plus[:, None, :, None, :]).reshape(n, 4, 4)
    p_plus = np.einsum("nij,nji->n", rhos, proj_plus).real
    outcomes = np.where(rng.random(n) < p_plus, 1, -1).astype(np.int8)
    plus = outcomes == 1
    proj = np.where(plus[:, None, None], proj_plus, np.eye(4) - proj_plus)
    p = np.where(plus, p_plus, 1.0 - p_plus)
    post = proj @ rhos @ proj
    post /= p[:, None, None]
    return outcomes, post
