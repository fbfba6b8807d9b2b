"""Continued fractions of sqrt(d): period, convergents, Pell fundamentals,
and an exact regulator backend.

The surd recurrence for sqrt(d) is
    P_0 = 0, Q_0 = 1,
    a_i = floor((P_i + floor(sqrt(d))) / Q_i),
    P_{i+1} = a_i Q_i - P_i,
    Q_{i+1} = (d - P_{i+1}^2) / Q_i   (exact division).

Walking one period multiplies a generator of the trivial ideal by the
fundamental unit of Z[sqrt(d)], so the regulator is the sum of
log((P_{i+1} + sqrt(d)) / Q_i) over a single period -- small integers only,
no exponentially large convergents.  The period length is odd exactly when
the fundamental unit has norm -1; the fundamental Pell (+1) solution is the
unit itself for norm +1 and its square otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt
from typing import Iterator, Protocol

import mpmath

from .arith import ParameterError


class DomainError(ValueError):
    """Input outside the mathematical domain (e.g. a perfect square d)."""


def _check_d(d: int) -> int:
    if d <= 1:
        raise DomainError(f"need d > 1, got {d}")
    s = isqrt(d)
    if s * s == d:
        raise DomainError(f"d = {d} is a perfect square")
    return s


@dataclass(frozen=True)
class CFExpansion:
    """Periodic continued fraction of sqrt(d): [a0; period repeating]."""

    d: int
    a0: int
    period: tuple[int, ...]


def surd_steps(d: int) -> Iterator[tuple[int, int, int]]:
    """Yield (P_i, Q_i, a_i) for i = 0, 1, 2, ... without end."""
    s = _check_d(d)
    p, q = 0, 1
    while True:
        a = (p + s) // q
        yield p, q, a
        p = a * q - p
        q = (d - p * p) // q


def cf_expand_sqrt(d: int) -> CFExpansion:
    """Full period of sqrt(d); ends at the first return of Q to 1."""
    s = _check_d(d)
    period = []
    steps = surd_steps(d)
    next(steps)  # a0 = s
    for p, q, a in steps:
        if q == 1:
            # a_i = 2*a0 closes the period
            period.append(a)
            break
        period.append(a)
        if len(period) > 10 * d:  # unreachable for valid d; defensive
            raise RuntimeError(f"period of sqrt({d}) did not close")
    return CFExpansion(d=d, a0=s, period=tuple(period))


def convergents(d: int) -> Iterator[tuple[int, int, int]]:
    """Yield convergents (p_i, q_i, i) of sqrt(d), i = 0, 1, 2, ..."""
    _check_d(d)
    p_prev, q_prev = 0, 1  # (p_{-2}, q_{-2})
    p_cur, q_cur = 1, 0  # (p_{-1}, q_{-1}); first step yields p_0 = a0, q_0 = 1
    for i, (_, _, a) in enumerate(surd_steps(d)):
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        yield p_cur, q_cur, i


@dataclass(frozen=True)
class PellFundamental:
    """Least positive solution of x^2 - d y^2 = 1."""

    d: int
    x1: int
    y1: int

    def log_height(self) -> float:
        return quad_log(self.x1, self.y1, self.d)


def quad_log(x: int, y: int, d: int) -> float:
    """log(x + y*sqrt(d)) for nonnegative x, y, robust for huge inputs."""
    if x.bit_length() < 500 and y.bit_length() < 500:
        return math.log(x + y * math.sqrt(d))
    with mpmath.workprec(80):
        return float(mpmath.log(x + y * mpmath.sqrt(d)))


def fundamental_solution(d: int) -> PellFundamental:
    """First convergent solving x^2 - d y^2 = 1 (it is the fundamental one)."""
    _check_d(d)
    for p, q, i in convergents(d):
        if p * p - d * q * q == 1:
            return PellFundamental(d=d, x1=p, y1=q)
        if i > 10 * d + 10:  # 2 periods always suffice
            raise RuntimeError(f"no Pell solution found for d={d}")
    raise AssertionError("unreachable")


def find_solution_below(d: int, bound: int) -> tuple[int, int] | None:
    """Scan convergents with q <= bound for a +1 solution.

    Every solution of x^2 - d y^2 = 1 appears among the convergents of
    sqrt(d), so returning None certifies that no solution has y <= bound.
    """
    _check_d(d)
    if bound < 1:
        return None
    for p, q, _ in convergents(d):
        if q > bound:
            return None
        if p * p - d * q * q == 1:
            return p, q
    return None


@dataclass(frozen=True)
class RegulatorResult:
    """Regulator of Z[sqrt(d)] with the unit's norm and the period length.

    ``value`` is log(eps) for the fundamental unit eps of Z[sqrt(d)].  When
    ``unit_norm`` is -1 the fundamental Pell solution is eps^2, so its log
    is 2 * value; when +1 it is eps itself.
    """

    d: int
    value: float
    unit_norm: int
    period: int
    abs_error: float

    def pell_log(self) -> float:
        return self.value if self.unit_norm == 1 else 2.0 * self.value


def regulator_cf(d: int, precision: float = 1e-10) -> RegulatorResult:
    """Exact-arithmetic regulator: sum of log step sizes over one period.

    Unconditional (no GRH): the walk itself proves the result.  Float64
    with compensated summation covers the default precision at desk scale;
    tighter requests rerun the accumulation in mpmath.
    """
    if precision <= 0:
        raise ParameterError(f"precision must be positive, got {precision}")
    s = _check_d(d)
    sqrt_d = math.sqrt(d)
    total = 0.0
    comp = 0.0
    period = 0
    p, q = 0, 1
    while True:
        a = (p + s) // q
        q_old = q
        p = a * q - p
        q = (d - p * p) // q
        term = math.log((p + sqrt_d) / q_old)
        # Kahan step
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        period += 1
        if q == 1:
            break
    # per-term rounding budget: ~3 ulp per log once summation is compensated
    est_error = 7e-16 * (abs(total) + period)
    if est_error > precision:
        total = _regulator_mp(d, precision)
        est_error = precision / 2
    return RegulatorResult(
        d=d,
        value=total,
        unit_norm=-1 if period % 2 else 1,
        period=period,
        abs_error=min(est_error, precision),
    )


def _regulator_mp(d: int, precision: float) -> float:
    s = _check_d(d)
    extra_bits = 20 + max(0, int(-math.log2(precision)))
    with mpmath.workprec(53 + extra_bits):
        sqrt_d = mpmath.sqrt(d)
        total = mpmath.mpf(0)
        p, q = 0, 1
        while True:
            a = (p + s) // q
            q_old = q
            p = a * q - p
            q = (d - p * p) // q
            total += mpmath.log((p + sqrt_d) / q_old)
            if q == 1:
                break
        return float(total)


@dataclass(frozen=True)
class RegulatorClaim:
    """What a regulator backend reports for one d.

    ``log_unit`` is treated downstream as possibly m * R for an unknown
    positive integer m (that is all an external subexponential backend can
    promise without GRH); ``unit_norm`` is the claimed norm of the unit the
    log belongs to.  The continued-fraction guard makes any m sound.
    """

    d: int
    log_unit: float
    unit_norm: int
    backend: str


class RegulatorProvider(Protocol):
    def regulator(self, d: int) -> RegulatorClaim: ...


class CFRegulatorProvider:
    """Default backend: the unconditional continued-fraction walk."""

    def __init__(self, precision: float = 1e-10):
        self.precision = precision

    def regulator(self, d: int) -> RegulatorClaim:
        r = regulator_cf(d, self.precision)
        return RegulatorClaim(d=d, log_unit=r.value, unit_norm=r.unit_norm, backend="cf")


class ScaledRegulatorProvider:
    """Wraps a backend and reports m * R instead of R.

    Models a subexponential backend whose output is only guaranteed to be an
    integer multiple of the true regulator; used to exercise the guard.
    """

    def __init__(self, inner: RegulatorProvider, multiple: int):
        if multiple < 1:
            raise ParameterError("multiple must be >= 1")
        self.inner = inner
        self.multiple = multiple

    def regulator(self, d: int) -> RegulatorClaim:
        r = self.inner.regulator(d)
        norm = r.unit_norm**self.multiple
        return RegulatorClaim(
            d=d,
            log_unit=r.log_unit * self.multiple,
            unit_norm=norm,
            backend=f"{r.backend}*{self.multiple}",
        )
