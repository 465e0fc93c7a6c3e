"""Paired-trajectory experiments: distance traces, divergence rates,
finite-difference stability factors.

A perturbation delta acts on both the initial head preparation and the
schedule seed (a_0 = delta): the two are the same physical dial, so the
perturbed run evolves under a genuinely different gate sequence.  Set
``perturb_schedule=False`` to perturb the state only, for comparison
experiments.

Everything is deterministic; identical configurations produce bit-identical
traces.  Each experiment is an independent pure computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import engine, oracle
from .engine import BlochVector
from .schedule import AngleSequence, ScheduleConfig

_SATURATION_GUARD = 0.5  # keep divergence fits clear of the d2 <= 2 ceiling


class Subsystem(str, Enum):
    HEAD = "head"
    TAPE = "tape"
    NETWORK = "network"


class TrajectoryRecord(NamedTuple):
    step: int
    head: BlochVector
    tape: BlochVector
    d2: float | None = None
    overlap: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    schedule: ScheduleConfig
    delta: float
    steps: int
    subsystem: Subsystem
    record_every: int = 1
    perturb_schedule: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "subsystem", Subsystem(self.subsystem))
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass
class DistanceTrace:
    """Recorded (step, squared distance, squared network overlap) triples."""

    steps: np.ndarray
    d2: np.ndarray
    overlap: np.ndarray

    def d2_at(self, step: int) -> float:
        idx = np.searchsorted(self.steps, step)
        if idx == len(self.steps) or self.steps[idx] != step:
            raise KeyError(f"step {step} was not recorded")
        return float(self.d2[idx])

    def presaturation_end(self, threshold: float = _SATURATION_GUARD) -> int:
        """First recorded step whose d2 reaches ``threshold`` (or last step)."""
        hit = np.nonzero(self.d2 >= threshold)[0]
        return int(self.steps[hit[0]]) if len(hit) else int(self.steps[-1])


def trajectory_bloch(
    seq: AngleSequence,
    initial: np.ndarray,
    steps: int,
    record_every: int = 1,
) -> list[TrajectoryRecord]:
    """Per-step head and tape Bloch vectors of a single trajectory."""
    out = []
    for n, state in engine.iterate(seq, initial, steps):
        if n % record_every == 0 or n == steps:
            head = engine.bloch_vector(engine.reduce_spin(state, engine.Spin.HEAD))
            tape = engine.bloch_vector(engine.reduce_spin(state, engine.Spin.TAPE))
            out.append(TrajectoryRecord(n, head, tape))
    return out


def _pair_metrics(
    state_a: np.ndarray, state_b: np.ndarray, subsystem: Subsystem
) -> tuple[float, float]:
    ov = engine.overlap_sq(state_a, state_b)
    if subsystem is Subsystem.NETWORK:
        return 2.0 * (1.0 - ov), ov
    spin = engine.Spin.HEAD if subsystem is Subsystem.HEAD else engine.Spin.TAPE
    rho_a = engine.reduce_spin(state_a, spin)
    rho_b = engine.reduce_spin(state_b, spin)
    return engine.distance_sq(rho_a, rho_b), ov


def distance_trace(cfg: ExperimentConfig) -> DistanceTrace:
    """Distance between the unperturbed and delta-perturbed trajectories.

    Trajectory A starts from |-1, -1> under the unperturbed schedule;
    trajectory B starts with the head rotated by delta and (by default) the
    schedule re-seeded with a_0 = delta.
    """
    seq_a = AngleSequence(replace(cfg.schedule, delta=0.0))
    delta_b = cfg.delta if cfg.perturb_schedule else 0.0
    seq_b = AngleSequence(replace(cfg.schedule, delta=delta_b))
    state_a = engine.init_state(0.0)
    state_b = engine.init_state(cfg.delta)

    steps = [0]
    d2_0, ov_0 = _pair_metrics(state_a, state_b, cfg.subsystem)
    d2 = [d2_0]
    ov = [ov_0]
    iter_a = engine.iterate(seq_a, state_a, cfg.steps)
    iter_b = engine.iterate(seq_b, state_b, cfg.steps)
    for (n, sa), (_, sb) in zip(iter_a, iter_b):
        if n % cfg.record_every == 0:
            d, o = _pair_metrics(sa, sb, cfg.subsystem)
            steps.append(n)
            d2.append(d)
            ov.append(o)
    return DistanceTrace(np.array(steps), np.array(d2), np.array(ov))


def lyapunov_estimate(trace: DistanceTrace, fit_window: tuple[int, int]) -> float:
    """Divergence rate per two-step cycle from a pre-saturation window.

    Least-squares slope of ln D(2m) against the cycle index m over
    m in [fit_window[0], fit_window[1]].  The window must hold at least
    five recorded cycles and stay below the saturation guard d2 < 0.5; a
    Fibonacci schedule targets ln((1 + sqrt(5))/2) ~ 0.4812.
    """
    m_lo, m_hi = fit_window
    ms, logs = [], []
    for m in range(m_lo, m_hi + 1):
        try:
            val = trace.d2_at(2 * m)
        except KeyError:
            continue
        if val >= _SATURATION_GUARD:
            raise ValueError(
                f"window reaches saturation: d2({2 * m}) = {val:.3g} >= {_SATURATION_GUARD}"
            )
        if val > 0.0:
            ms.append(m)
            logs.append(0.5 * math.log(val))
    if len(ms) < 5:
        raise ValueError(f"window holds {len(ms)} usable points, need >= 5")
    slope = np.polyfit(ms, logs, 1)[0]
    return float(slope)


def fit_power_law(trace: DistanceTrace, window: tuple[int, int]) -> float:
    """Exponent k of D ~ n**k over the recorded steps in ``window``."""
    lo, hi = window
    mask = (trace.steps >= lo) & (trace.steps <= hi) & (trace.d2 > 0.0)
    mask &= trace.d2 < _SATURATION_GUARD
    ns = trace.steps[mask]
    if len(ns) < 5:
        raise ValueError(f"window holds {len(ns)} usable points, need >= 5")
    return float(np.polyfit(np.log(ns), 0.5 * np.log(trace.d2[mask]), 1)[0])


@dataclass(frozen=True)
class StabilityResult:
    m: int
    delta: float
    m11: float
    m22: float
    m11_closed: float
    m22_closed: float


def _require_orbit(schedule: ScheduleConfig, m: int) -> tuple[int, int]:
    if schedule.exact is None:
        raise ValueError("stability factors need alpha1 declared as an exact p/q of pi")
    p, q = schedule.exact
    conds = oracle.orbit_conditions(p, q, m)
    if not all(conds):
        raise ValueError(
            f"no periodic orbit of period {2 * m} at alpha1 = ({p}/{q})*pi: "
            f"closure conditions {conds}"
        )
    return p, q


def stability_matrix_numeric(
    m: int, delta: float, schedule: ScheduleConfig
) -> StabilityResult:
    """Orbit stability factors from simulation, checked against closed forms.

    Runs the delta-perturbed trajectory over one period 2m and forms the
    ratios of the in-plane head components to their initial values; the
    result must agree with the finite-delta closed forms to 1e-8 relative,
    or the run aborts.
    """
    if not 0.0 < delta <= 0.1:
        raise ValueError(f"delta must lie in (0, 0.1], got {delta}")
    _require_orbit(schedule, m)

    seq_a = AngleSequence(replace(schedule, delta=0.0))
    closure = engine.bloch_vector(
        engine.reduce_spin(engine.run(seq_a, engine.init_state(0.0), 2 * m), engine.Spin.HEAD)
    )
    if abs(closure.s2) > 1e-8 or abs(closure.s3 + 1.0) > 1e-8:
        raise ValueError(f"orbit fails to close after {2 * m} steps: {closure}")

    seq_b = AngleSequence(replace(schedule, delta=delta))
    final = engine.run(seq_b, engine.init_state(delta), 2 * m)
    head = engine.bloch_vector(engine.reduce_spin(final, engine.Spin.HEAD))
    m11 = head.s2 / math.sin(delta)
    m22 = head.s3 / (-math.cos(delta))
    m11_closed, m22_closed = oracle.stability_matrix_closed(m, delta)
    for num, closed, name in ((m11, m11_closed, "M11"), (m22, m22_closed, "M22")):
        if abs(num - closed) > 1e-8 * abs(closed):
            raise RuntimeError(
                f"{name} simulation/closed-form mismatch: {num!r} vs {closed!r}"
            )
    return StabilityResult(m, delta, m11, m22, m11_closed, m22_closed)


def tape_stability_numeric(m: int, delta: float, schedule: ScheduleConfig) -> float:
    """Tape response ratio delta sigma3(2m+2) / delta sigma3(2) from simulation.

    Defined on periodic orbits whose period 2m is divisible by 4 and with
    sin(alpha1) != 0; converges to F_{m+1} sin(a_{m+2}) / sin(a_1) as
    delta -> 0.
    """
    if not 0.0 < delta <= 0.1:
        raise ValueError(f"delta must lie in (0, 0.1], got {delta}")
    if m % 2 != 0:
        raise ValueError(f"tape factor needs period 2m = 0 (mod 4), got m = {m}")
    if oracle.sin_alpha1(schedule) == 0.0:
        raise ValueError("tape factor diverges: sin(alpha1) = 0")
    _require_orbit(schedule, m)

    def tape_s3(seq: AngleSequence, head_angle: float, upto: int) -> dict[int, float]:
        picks = {}
        for n, state in engine.iterate(seq, engine.init_state(head_angle), upto):
            if n in (2, upto):
                rho = engine.reduce_spin(state, engine.Spin.TAPE)
                picks[n] = engine.bloch_vector(rho).s3
        return picks

    n_final = 2 * m + 2
    a = tape_s3(AngleSequence(replace(schedule, delta=0.0)), 0.0, n_final)
    b = tape_s3(AngleSequence(replace(schedule, delta=delta)), delta, n_final)
    denom = b[2] - a[2]
    if denom == 0.0:
        raise ValueError("tape perturbation vanished at step 2; cannot form ratio")
    return (b[n_final] - a[n_final]) / denom
