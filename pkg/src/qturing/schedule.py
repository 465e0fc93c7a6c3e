"""Control-angle schedules driving the head rotations.

Three schedules are supported: Fibonacci-like (a_{m+1} = a_m + a_{m-1}),
fixed (a_m = a_1) and arithmetic (a_{m+1} = 2 a_m - a_{m-1}).  Indexing
convention: a_1 is the first rotation angle and the recurrence seed a_0
defaults to 0.  A nonzero ``delta`` re-seeds the recurrence with a_0 = delta,
so in Fibonacci mode the emitted angles are a_m + delta * F_{m-1} with
F_0 = 0, F_1 = 1.

All angles are reduced mod 2*pi at every recurrence step: the raw Fibonacci
angles grow like ((1+sqrt(5))/2)**m and would exhaust double precision near
m ~ 75, while every consumer is trigonometric, and reduction commutes with
the additive recurrences.

When alpha1 is declared as an exact rational multiple of pi via
``exact=(p, q)``, Fibonacci-mode angles are computed from integer Fibonacci
residues mod 2q, so arbitrarily long periodic runs carry no float drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

TWO_PI = 2.0 * math.pi

#: growth rate of the Fibonacci recurrence, beta = (1 + sqrt(5)) / 2
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

#: expected divergence rate per two-step cycle, ln((1 + sqrt(5)) / 2)
LOG_GOLDEN_RATIO = math.log(GOLDEN_RATIO)


class ScheduleMode(str, Enum):
    FIBONACCI = "fibonacci"
    FIXED = "fixed"
    ARITHMETIC = "arithmetic"


def wrap_angle(x: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    r = x % TWO_PI
    # float mod can round up to the modulus itself (e.g. tiny negative x)
    return 0.0 if r == TWO_PI else r


def fib(n: int) -> int:
    """n-th Fibonacci number (F_0 = 0, F_1 = 1), exact integer."""
    if n < 0:
        raise ValueError(f"negative Fibonacci index: {n}")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fib_mod(n: int, mod: int) -> int:
    """F_n mod ``mod`` by fast doubling, O(log n)."""
    if n < 0:
        raise ValueError(f"negative Fibonacci index: {n}")
    if mod <= 0:
        raise ValueError(f"modulus must be positive, got {mod}")

    def doubling(k: int) -> tuple[int, int]:
        if k == 0:
            return 0, 1
        a, b = doubling(k >> 1)
        c = (a * ((2 * b - a) % mod)) % mod
        d = (a * a + b * b) % mod
        if k & 1:
            return d, (c + d) % mod
        return c, d

    return doubling(n)[0]


@dataclass(frozen=True)
class ScheduleConfig:
    """Immutable description of one control-angle schedule.

    ``exact``, when given, declares alpha1 = (p/q)*pi with coprime integers
    and enables the drift-free integer path (Fibonacci mode only; the fixed
    and arithmetic recurrences have no precision blow-up to protect against).
    """

    mode: ScheduleMode
    alpha1: float
    delta: float = 0.0
    exact: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", ScheduleMode(self.mode))
        if not math.isfinite(self.alpha1):
            raise ValueError(f"alpha1 must be finite, got {self.alpha1}")
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")
        if self.exact is not None:
            p, q = self.exact
            if q < 1:
                raise ValueError(f"exact denominator must be >= 1, got {q}")
            if math.gcd(p, q) != 1:
                raise ValueError(f"exact pair must be coprime, got ({p}, {q})")
            declared = (p / q) * math.pi
            if abs(declared - self.alpha1) > math.ulp(max(abs(declared), 1.0)):
                raise ValueError(
                    f"exact pair ({p}, {q}) declares alpha1={declared!r}, "
                    f"got {self.alpha1!r}"
                )

    @classmethod
    def exact_pi(
        cls,
        p: int,
        q: int,
        mode: ScheduleMode = ScheduleMode.FIBONACCI,
        delta: float = 0.0,
    ) -> "ScheduleConfig":
        """Schedule with alpha1 = (p/q)*pi declared exactly."""
        g = math.gcd(p, q)
        p, q = p // g, q // g
        p %= 2 * q
        return cls(mode=mode, alpha1=(p / q) * math.pi, delta=delta, exact=(p, q))


@dataclass
class AngleSequence:
    """Iterator state of one schedule plus cached cumulative quantities.

    The recurrence advances a rolling pair (a_{m-1}, a_m) mod 2*pi; emitted
    values and the running sums consumed by the closed-form predictions are
    cached so random access is O(1) after a single forward pass.  Instances
    are single-owner: advance one sequence per thread.
    """

    config: ScheduleConfig
    _ang: list[float] = field(init=False)        # emitted angles, index m >= 1
    _cum: list[float] = field(init=False)        # a_0 + sum_{j<=m} a_j
    _alt: list[float] = field(init=False)        # sum_{j<=m} (-1)^j a_j
    _sum_a: list[float] = field(init=False)      # a_m + a_{m-2} + ... (A_m)
    _sum_b: list[float] = field(init=False)      # a_{m-1} + a_{m-3} + ... (B_m)
    _dfib: list[float] = field(init=False)       # delta * F_m mod 2*pi

    def __post_init__(self) -> None:
        a0 = wrap_angle(self.config.delta)
        if self.config.exact is not None and self.config.mode is ScheduleMode.FIBONACCI:
            a1 = self._exact_base(1)  # grid value, not the rounded (p/q)*pi
        else:
            a1 = wrap_angle(self.config.alpha1)
        self._ang = [a0, a1]
        self._cum = [a0, wrap_angle(a0 + a1)]
        self._alt = [0.0, wrap_angle(-a1)]
        self._sum_a = [0.0, a1]
        self._sum_b = [0.0, 0.0]
        self._dfib = [0.0, wrap_angle(self.config.delta)]

    # -- recurrence -------------------------------------------------------

    def _exact_base(self, m: int) -> float:
        """Unperturbed exact-mode angle pi * ((p * F_m) mod 2q) / q."""
        p, q = self.config.exact  # type: ignore[misc]
        return math.pi * ((p * fib_mod(m, 2 * q)) % (2 * q)) / q

    def _grow(self, m: int) -> None:
        cfg = self.config
        exact = cfg.exact is not None and cfg.mode is ScheduleMode.FIBONACCI
        while len(self._ang) <= m:
            k = len(self._ang)
            prev2, prev1 = self._ang[k - 2], self._ang[k - 1]
            if cfg.mode is ScheduleMode.FIBONACCI:
                if exact:
                    nxt = wrap_angle(
                        self._exact_base(k)
                        + (self._dfib[k - 1] if cfg.delta != 0.0 else 0.0)
                    )
                else:
                    nxt = wrap_angle(prev2 + prev1)
            elif cfg.mode is ScheduleMode.ARITHMETIC:
                nxt = wrap_angle(2.0 * prev1 - prev2)
            else:
                nxt = wrap_angle(cfg.alpha1)
            self._ang.append(nxt)
            self._cum.append(wrap_angle(self._cum[k - 1] + nxt))
            self._alt.append(wrap_angle(self._alt[k - 1] + (-1) ** k * nxt))
            self._sum_a.append(wrap_angle(self._sum_a[k - 2] + nxt))
            self._sum_b.append(wrap_angle(self._sum_b[k - 2] + prev1))
            self._dfib.append(wrap_angle(self._dfib[k - 1] + self._dfib[k - 2]))

    # -- operations -------------------------------------------------------

    def angle(self, m: int) -> float:
        """Rotation angle a_m in [0, 2*pi), m >= 1."""
        if m < 1:
            raise ValueError(f"angle index must be >= 1, got {m}")
        cfg = self.config
        if (
            cfg.exact is not None
            and cfg.mode is ScheduleMode.FIBONACCI
            and cfg.delta == 0.0
        ):
            # O(log m) random access; supports very large m without caching
            return self._exact_base(m)
        self._grow(m)
        return self._ang[m]

    def cumulative_plus(self, m: int) -> float:
        """Total rotation accrued by the tape-plus branch after 2m steps.

        Equals a_0 + sum_{j=1..m} a_j mod 2*pi; the seed term makes the
        delta-perturbed cumulative exceed the unperturbed one by exactly
        delta * F_{m+1}, matching the perturbed evolution it predicts.
        """
        if m < 0:
            raise ValueError(f"cycle index must be >= 0, got {m}")
        cfg = self.config
        if (
            cfg.exact is not None
            and cfg.mode is ScheduleMode.FIBONACCI
            and cfg.delta == 0.0
        ):
            p, q = cfg.exact
            # sum_{j<=m} F_j = F_{m+2} - 1
            r = (p * (fib_mod(m + 2, 2 * q) - 1)) % (2 * q)
            return math.pi * r / q
        self._grow(m)
        return self._cum[m]

    def cumulative_minus(self, n: int) -> float:
        """Cumulative angle of the tape-minus branch after n steps.

        The head of this branch is reflected by every conditional flip, so
        the angle obeys C_{2m} = -C_{2m-1} and C_{2m-1} = a_m + C_{2m-2};
        this evaluates the resulting alternating sum (seed included) mod 2*pi.
        """
        if n < 0:
            raise ValueError(f"step index must be >= 0, got {n}")
        m = (n + 1) // 2
        cfg = self.config
        if (
            cfg.exact is not None
            and cfg.mode is ScheduleMode.FIBONACCI
            and cfg.delta == 0.0
        ):
            p, q = cfg.exact
            f = fib_mod(m - 1, 2 * q) if m >= 1 else 1
            r = (p * ((1 - f) if m % 2 == 0 else -(f + 1))) % (2 * q)
            even = math.pi * r / q
        else:
            self._grow(m)
            sign = 1.0 if m % 2 == 0 else -1.0
            even = wrap_angle(sign * self._ang[0] - (-1.0) ** m * self._alt[m])
        if n % 2 == 0:
            return even
        return wrap_angle(-even)

    def ab_angles(self, m: int) -> tuple[float, float]:
        """Alternating-index partial sums (A_m, B_m) mod 2*pi.

        A_m = a_m + a_{m-2} + ... and B_m = a_{m-1} + a_{m-3} + ..., each
        terminating at index 1 or 2 according to parity; computed by direct
        summation.
        """
        if m < 1:
            raise ValueError(f"cycle index must be >= 1, got {m}")
        self._grow(m)
        return self._sum_a[m], self._sum_b[m]

    def delta_fib(self, m: int) -> float:
        """Accumulated seed perturbation delta * F_m mod 2*pi, m >= 0."""
        if m < 0:
            raise ValueError(f"index must be >= 0, got {m}")
        self._grow(max(m, 1))
        return self._dfib[m]

    def unperturbed(self) -> "AngleSequence":
        """Fresh sequence with the same config but delta = 0."""
        return AngleSequence(replace(self.config, delta=0.0))
