"""Exact state-vector engine for the two-spin head/tape network.

Conventions, fixed once and used everywhere:

- single-spin kets are ordered (|-1>, |1>), so sigma3 = diag(-1, +1) and
  sigma3 |p> = p |p>;
- sigma1 = [[0, 1], [1, 0]] and sigma2 = i * sigma1 * sigma3;
- network amplitudes are indexed c[2h + t] with h, t in {0, 1} for the
  head and tape spin, i.e. c[0] is the amplitude of |-1> (x) |-1>.

With these choices a head prepared from |-1> by a rotation through the
cumulative angle C sits at Bloch vector (0, sin C, -cos C), so the analytic
trajectory formulas come out without sign fudging.

Even-numbered gates apply the conditional NOT: the tape spin is flipped
exactly when the head is in |-1>.  It is realized as an amplitude
permutation (swap c[0] <-> c[1]), which makes it bit-exact and self-inverse.
All operations are pure functions of the state; independent trajectories
can run in parallel without shared mutable state.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Iterator, NamedTuple

import numpy as np

from .schedule import AngleSequence

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA3 = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA2 = 1j * SIGMA1 @ SIGMA3

#: Pauli triple in component order (sigma1, sigma2, sigma3)
PAULI = (SIGMA1, SIGMA2, SIGMA3)

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_QCNOT_PERM = (1, 0, 2, 3)


class TapeState(str, Enum):
    """Initial tape kets; PLUS/MINUS are the sigma1 eigenstates."""

    MINUS_ONE = "minus1"
    PLUS_ONE = "plus1"
    PLUS = "plus"
    MINUS = "minus"


class Spin(str, Enum):
    HEAD = "head"
    TAPE = "tape"


class BlochVector(NamedTuple):
    s1: float
    s2: float
    s3: float

    def length_sq(self) -> float:
        return self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3


_TAPE_AMPLITUDES = {
    TapeState.MINUS_ONE: (1.0, 0.0),
    TapeState.PLUS_ONE: (0.0, 1.0),
    TapeState.PLUS: (_SQRT_HALF, _SQRT_HALF),
    TapeState.MINUS: (_SQRT_HALF, -_SQRT_HALF),
}


def init_state(head_angle: float, tape: TapeState | str = TapeState.MINUS_ONE) -> np.ndarray:
    """Product state exp(-i sigma1 head_angle / 2)|-1> (x) |tape>."""
    if not math.isfinite(head_angle):
        raise ValueError(f"head_angle must be finite, got {head_angle}")
    t0, t1 = _TAPE_AMPLITUDES[TapeState(tape)]
    h0 = math.cos(head_angle / 2.0)
    h1 = -1j * math.sin(head_angle / 2.0)
    return np.array([h0 * t0, h0 * t1, h1 * t0, h1 * t1], dtype=complex)


def apply_head_rotation(state: np.ndarray, alpha: float) -> np.ndarray:
    """Rotate the head spin: multiply by exp(-i sigma1 alpha / 2) (x) 1."""
    c = math.cos(alpha / 2.0)
    s = -1j * math.sin(alpha / 2.0)
    c0, c1, c2, c3 = state
    return np.array(
        [c * c0 + s * c2, c * c1 + s * c3, s * c0 + c * c2, s * c1 + c * c3]
    )


def apply_qcnot(state: np.ndarray) -> np.ndarray:
    """Conditional NOT: flip the tape when the head is |-1> (c0 <-> c1)."""
    return state[list(_QCNOT_PERM)]


def iterate(
    seq: AngleSequence, state: np.ndarray, n_steps: int
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n, state) after each gate: odd gates rotate, even gates QCNOT.

    Gate 2m-1 rotates the head by seq.angle(m); gate 2m applies the
    conditional NOT.  Deterministic and norm-preserving throughout.
    """
    if n_steps < 0:
        raise ValueError(f"step count must be >= 0, got {n_steps}")
    for n in range(1, n_steps + 1):
        if n % 2 == 1:
            state = apply_head_rotation(state, seq.angle((n + 1) // 2))
        else:
            state = apply_qcnot(state)
        yield n, state


def run(seq: AngleSequence, state: np.ndarray, n_steps: int) -> np.ndarray:
    """State after n_steps alternating gates (n_steps = 0 returns the input)."""
    for _, state in iterate(seq, state, n_steps):
        pass
    return state


def reduce_spin(state: np.ndarray, spin: Spin | str) -> np.ndarray:
    """2x2 reduced density matrix of one spin (partial trace over the other)."""
    m = state.reshape(2, 2)
    if Spin(spin) is Spin.HEAD:
        return m @ m.conj().T
    return m.T @ m.conj()


def bloch_vector(rho: np.ndarray) -> BlochVector:
    """Pauli expectation values (Tr rho sigma_j) of a 2x2 density matrix."""
    comps = []
    for sigma in PAULI:
        val = np.trace(rho @ sigma)
        if abs(val.imag) > 1e-9:
            raise ValueError(f"density matrix is corrupted: Im Tr(rho sigma) = {val.imag}")
        comps.append(val.real)
    return BlochVector(*comps)


def distance_sq(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Squared distance Tr[(rho_a - rho_b)^2], in [0, 2] for unit-trace states.

    For Hermitian arguments the trace equals the squared Frobenius norm of
    the difference, which is how it is computed here: nonnegative by
    construction instead of up to cancellation noise.
    """
    if rho_a.shape != rho_b.shape:
        raise ValueError(f"dimension mismatch: {rho_a.shape} vs {rho_b.shape}")
    d = rho_a - rho_b
    return float(np.sum((d * d.conj()).real))


def overlap_sq(psi_a: np.ndarray, psi_b: np.ndarray) -> float:
    """Squared overlap |<psi_b|psi_a>|^2 of two normalized state vectors."""
    return float(abs(np.vdot(psi_b, psi_a)) ** 2)


def norm_sq(state: np.ndarray) -> float:
    """Squared norm of a state vector."""
    return float(np.vdot(state, state).real)
