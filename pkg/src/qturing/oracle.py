"""Closed-form predictions for the driven two-spin network.

Everything here is an independent second route to quantities the state
engine produces by direct simulation: primitive (entanglement-free) head
trajectories, their superpositions, the tape polarization, periodic-orbit
closure in exact integer arithmetic, and the stability factors of periodic
orbits under a seed perturbation.  Pure functions throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .engine import BlochVector
from .schedule import (
    AngleSequence,
    ScheduleConfig,
    ScheduleMode,
    fib,
    fib_mod,
    wrap_angle,
)

# 2*pi to 40 digits; Fraction-exact reduction of huge multiples of alpha1
_TWO_PI = Fraction("6.283185307179586476925286766559005768394")

#: largest index at which Fibonacci numbers stay meaningful in double
#: precision products; larger requests are rejected rather than degraded
_MAX_FIB_INDEX = 90


class PrimitiveBranch(str, Enum):
    """Tape eigenstate branch: |+> or |-> of sigma1."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class SuperpositionWeights:
    a_plus: complex
    a_minus: complex

    def __post_init__(self) -> None:
        norm = abs(self.a_plus) ** 2 + abs(self.a_minus) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"weights must be normalized, |a+|^2+|a-|^2 = {norm}")


class StabilityLimits(NamedTuple):
    m11: int
    m22: float
    tape: float | None


def _reduce_pi_multiple(coeff: int, alpha1: float) -> float:
    """(coeff * alpha1) mod 2*pi without float blow-up, via rational arithmetic."""
    return float((coeff * Fraction(alpha1)) % _TWO_PI)


def _check_fib_index(m: int) -> None:
    if m > _MAX_FIB_INDEX:
        raise ValueError(
            f"index {m} exceeds {_MAX_FIB_INDEX}; Fibonacci factors would "
            "silently lose double precision"
        )


def sin_alpha1(config: ScheduleConfig) -> float:
    """sin(alpha1), exactly zero for declared integer multiples of pi."""
    if config.exact is not None and config.exact[1] == 1:
        return 0.0
    s = math.sin(config.alpha1)
    return 0.0 if abs(s) < 1e-12 else s


def _head_angles(
    seq: AngleSequence, n: int, head_angle: float | None
) -> tuple[float, float]:
    """Cumulative angles (C_plus, C_minus) after n steps, preparation included.

    By default the head is assumed prepared with the same angle as the
    schedule seed (the paired perturbation convention); pass ``head_angle``
    to decouple the preparation from the seed.
    """
    if n < 0:
        raise ValueError(f"step index must be >= 0, got {n}")
    m = (n + 1) // 2
    seed = wrap_angle(seq.config.delta)
    adjust = 0.0 if head_angle is None else wrap_angle(head_angle) - seed
    c_plus = seq.cumulative_plus(m) + adjust
    # the minus-branch head is reflected by each flip, so the preparation
    # angle enters with alternating sign
    sign = 1.0 if m % 2 == 0 else -1.0
    if n % 2 == 1:
        sign = -sign
    c_minus = seq.cumulative_minus(n) + sign * adjust
    return c_plus, c_minus


def head_bloch_primitive(
    seq: AngleSequence,
    branch: PrimitiveBranch | str,
    n: int,
    head_angle: float | None = None,
) -> BlochVector:
    """Head Bloch vector (0, sin C, -cos C) of one entanglement-free branch."""
    c_plus, c_minus = _head_angles(seq, n, head_angle)
    c = c_plus if PrimitiveBranch(branch) is PrimitiveBranch.PLUS else c_minus
    return BlochVector(0.0, math.sin(c), -math.cos(c))


def head_bloch_superposed(
    seq: AngleSequence,
    weights: SuperpositionWeights,
    n: int,
    head_angle: float | None = None,
) -> BlochVector:
    """Head Bloch vector of a weighted superposition of the two branches.

    The tape eigenstates stay orthogonal for all times, so the reduced head
    state is the convex combination of the branch states with weights
    |a+|^2 and |a-|^2.
    """
    wp = abs(weights.a_plus) ** 2
    wm = abs(weights.a_minus) ** 2
    p = head_bloch_primitive(seq, PrimitiveBranch.PLUS, n, head_angle)
    q = head_bloch_primitive(seq, PrimitiveBranch.MINUS, n, head_angle)
    return BlochVector(
        wp * p.s1 + wm * q.s1, wp * p.s2 + wm * q.s2, wp * p.s3 + wm * q.s3
    )


def tape_sigma3(seq: AngleSequence, n: int, delta: float | None = None) -> float:
    """Tape polarization at step n for the initial state |-1, -1>.

    Valid for Fibonacci schedules with a (possibly zero) seed perturbation;
    the head is assumed prepared with the same angle delta.  The other two
    tape components vanish identically for this initial state.
    """
    if n < 0:
        raise ValueError(f"step index must be >= 0, got {n}")
    cfg = seq.config
    if cfg.mode is not ScheduleMode.FIBONACCI:
        raise ValueError(f"tape formula requires a Fibonacci schedule, got {cfg.mode}")
    if delta is not None and delta != cfg.delta:
        seq = AngleSequence(replace(cfg, delta=delta))
    # the emitted angle at index k+1 already carries delta * F_k
    a = seq.angle(n // 2 + 1)
    if n % 4 in (0, 1):
        return -math.cos(wrap_angle(a - wrap_angle(cfg.alpha1)))
    return math.cos(a)


def orbit_conditions(p: int, q: int, m: int) -> tuple[bool, bool, bool]:
    """The three closure conditions at cycle m for alpha1 = (p/q)*pi.

    Order: cumulative-plus = 0 (mod 2*pi), cumulative-minus = 0 (mod 2*pi),
    angle recurrence returns (a_{m+1} = a_1 mod 2*pi).  Exact integers.
    """
    if q == 0:
        raise ValueError("q must be nonzero")
    if math.gcd(p, q) != 1:
        raise ValueError(f"(p, q) must be coprime, got ({p}, {q})")
    mod = 2 * q
    f_m1 = fib_mod(m - 1, mod) if m >= 1 else 1
    f1 = fib_mod(m + 1, mod)
    f2 = fib_mod(m + 2, mod)
    c_plus = (p * (f2 - 1)) % mod == 0
    if m % 2 == 0:
        c_minus = (p * (f_m1 - 1)) % mod == 0
    else:
        c_minus = (p * (f_m1 + 1)) % mod == 0
    c_angle = (p * (f1 - 1)) % mod == 0
    return c_plus, c_minus, c_angle


def periodic_orbit_check(p: int, q: int, m_max: int = 10**6) -> int | None:
    """Smallest period n = 2m of the head pattern for alpha1 = (p/q)*pi.

    Scans m = 1..m_max for simultaneous closure of all three conditions,
    entirely in integer arithmetic; returns None if no closure is found.
    """
    if q == 0:
        raise ValueError("q must be nonzero")
    if math.gcd(p, q) != 1:
        raise ValueError(f"(p, q) must be coprime, got ({p}, {q})")
    mod = 2 * q
    f_prev, f_cur = 0, 1 % mod  # F_0, F_1
    for m in range(1, m_max + 1):
        f_next = (f_prev + f_cur) % mod   # F_{m+1}
        f_next2 = (f_cur + f_next) % mod  # F_{m+2}
        c_plus = (p * (f_next2 - 1)) % mod == 0
        c_angle = (p * (f_next - 1)) % mod == 0
        if m % 2 == 0:
            c_minus = (p * (f_prev - 1)) % mod == 0
        else:
            c_minus = (p * (f_prev + 1)) % mod == 0
        if c_plus and c_minus and c_angle:
            return 2 * m
        f_prev, f_cur = f_cur, f_next
    return None


def stability_limits(m: int, seq: AngleSequence | None = None) -> StabilityLimits:
    """Small-perturbation limits of the orbit stability factors at cycle m.

    Returns (F_{m-1}, 1, F_{m+1} * sin(a_{m+2}) / sin(a_1)); the tape factor
    needs the angle schedule and is only defined for periods divisible by 4,
    so it is None unless ``seq`` is given.
    """
    if m < 1:
        raise ValueError(f"cycle index must be >= 1, got {m}")
    _check_fib_index(m + 2)
    tape = None
    if seq is not None:
        if m % 2 != 0:
            raise ValueError(f"tape factor needs period 2m = 0 (mod 4), got m = {m}")
        sin_a1 = sin_alpha1(seq.config)
        if sin_a1 == 0.0:
            raise ValueError("tape factor diverges: sin(alpha1) = 0")
        tape = fib(m + 1) * math.sin(seq.angle(m + 2)) / sin_a1
    return StabilityLimits(fib(m - 1), 1.0, tape)


def stability_matrix_closed(m: int, delta: float) -> tuple[float, float]:
    """Finite-delta closed forms of the orbit stability factors (M11, M22).

    M11 = cos(delta F_m) sin(delta F_{m-1}) / sin(delta) and
    M22 = cos(delta F_m) cos(delta F_{m-1}) / cos(delta); their delta -> 0
    limits are F_{m-1} and 1.
    """
    if m < 1:
        raise ValueError(f"cycle index must be >= 1, got {m}")
    if not 0.0 < delta <= 0.1:
        raise ValueError(f"delta must lie in (0, 0.1], got {delta}")
    _check_fib_index(m)
    dm = delta * fib(m)
    dm1 = delta * fib(m - 1)
    m11 = math.cos(dm) * math.sin(dm1) / math.sin(delta)
    m22 = math.cos(dm) * math.cos(dm1) / math.cos(delta)
    return m11, m22


def delta_c(m: int, delta: float) -> tuple[float, float]:
    """Cumulative-angle shifts (delta F_{m+1}, -delta F_{m-2}) at cycle m.

    Exact for any delta, not a linearization: re-seeding the recurrence with
    a_0 = delta shifts the plus cumulative by delta F_{m+1} and the minus
    cumulative by -delta F_{m-2}.
    """
    if m < 2:
        raise ValueError(f"cycle index must be >= 2, got {m}")
    _check_fib_index(m + 1)
    return delta * fib(m + 1), -delta * fib(m - 2)


def perturbed_cumulative_periodic(
    m: int, seq: AngleSequence
) -> tuple[float, float]:
    """Closed forms of the unperturbed cumulative angles at cycle m, mod 2*pi.

    C_plus(2m) = a_1 (F_{m+2} - 1) and C_minus(2m) = a_1 (1 - F_{m-1}) for
    even m, -a_1 (F_{m-1} + 1) for odd m; on a periodic orbit of period 2m
    both vanish mod 2*pi.  Uses exact integer residues when the schedule is
    declared exact, rational reduction otherwise.
    """
    if m < 1:
        raise ValueError(f"cycle index must be >= 1, got {m}")
    cfg = seq.config
    if cfg.mode is not ScheduleMode.FIBONACCI:
        raise ValueError(f"closed forms require a Fibonacci schedule, got {cfg.mode}")
    coeff_plus = fib(m + 2) - 1
    coeff_minus = (1 - fib(m - 1)) if m % 2 == 0 else -(fib(m - 1) + 1)
    if cfg.exact is not None:
        p, q = cfg.exact
        return (
            math.pi * ((p * coeff_plus) % (2 * q)) / q,
            math.pi * ((p * coeff_minus) % (2 * q)) / q,
        )
    return (
        _reduce_pi_multiple(coeff_plus, cfg.alpha1),
        _reduce_pi_multiple(coeff_minus, cfg.alpha1),
    )
