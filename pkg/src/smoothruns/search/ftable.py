"""Assembling f(k) from search evidence.

f(k) is the least window length L such that every run of L consecutive
integers starting above k contains a prime factor exceeding k.  Evidence
comes in two strengths:

  * a completed pair-product campaign (m, t) proves "no k-smooth m-window
    starts above k" outright, giving f(k) <= m for every k the prime range
    covers;
  * a brute-force scan proves the same only up to its max_n (enough for the
    desk-scale regression), and supplies witness windows either way.

A witness window of length L starting above k shows f(k) >= L + 1.  Bounds
are combined per k with no monotonicity assumption anywhere: f is known
not to be monotone (it dips at k = 114).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..arith import ParameterError, PrimeTable, sieve_primes
from .drivers import brute_force_windows
from .records import IntegrityError, SmoothWindowRecord


@dataclass(frozen=True)
class CampaignEvidence:
    """A completed (or explicitly partial) pair-product campaign."""

    m: int
    t: int
    records: tuple[SmoothWindowRecord, ...]
    complete: bool

    def covers(self, k: int, table: PrimeTable) -> bool:
        # the campaign's prime range decides smoothness up to the next
        # prime after p_t, exclusive
        return self.complete and k >= 1 and table.prime_pi(k) <= self.t


@dataclass(frozen=True)
class BruteEvidence:
    """Exhaustive scan of all length-``length`` windows with n <= max_n."""

    k_max: int
    length: int
    max_n: int
    records: tuple[SmoothWindowRecord, ...]

    def covers(self, k: int) -> bool:
        return 1 <= k <= self.k_max


@dataclass(frozen=True)
class FValue:
    k: int
    lower: int
    upper: int | None  # None: no upper evidence applies
    upper_unconditional: bool

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper


def _witness_length(k: int, records: Sequence[SmoothWindowRecord]) -> int:
    best = 0
    for rec in records:
        if rec.n > k and rec.p_max <= k and rec.length > best:
            best = rec.length
    return best


def assemble_f(
    k: int,
    campaigns: Sequence[CampaignEvidence] = (),
    brutes: Sequence[BruteEvidence] = (),
    table: PrimeTable | None = None,
) -> FValue:
    """Combine evidence for one k; raises IntegrityError on contradictions."""
    if k < 1:
        raise ParameterError(f"need k >= 1, got {k}")
    if table is None:
        table = sieve_primes(2000)

    lower = 1
    for ev in campaigns:
        lower = max(lower, _witness_length(k, ev.records) + 1)
    for ev in brutes:
        lower = max(lower, _witness_length(k, ev.records) + 1)

    upper: int | None = None
    unconditional = False
    for ev in campaigns:
        if not ev.covers(k, table):
            continue
        if any(r.n > k and r.p_max <= k for r in ev.records):
            continue  # a smooth m-window above k exists: no upper bound here
        if upper is None or ev.m < upper or (ev.m == upper and not unconditional):
            upper = ev.m
            unconditional = True
    for ev in brutes:
        if not ev.covers(k):
            continue
        if any(r.n > k and r.p_max <= k for r in ev.records):
            continue
        if upper is None or ev.length < upper:
            upper = ev.length
            unconditional = False

    if upper is not None and lower > upper:
        raise IntegrityError(
            f"k={k}: witness of length {lower - 1} contradicts upper bound {upper}"
        )
    return FValue(k=k, lower=lower, upper=upper, upper_unconditional=unconditional)


# known values of f for the regression: 1..268
_KNOWN_RANGES = (
    (1, 1, 1),
    (2, 2, 2),
    (3, 4, 3),
    (5, 12, 4),
    (13, 40, 6),
    (41, 46, 7),
    (47, 58, 8),
    (59, 60, 9),
    (61, 113, 14),
    (114, 114, 13),
    (115, 150, 12),
    (151, 178, 14),
    (179, 222, 14),
    (223, 268, 16),
)


def known_f(k: int) -> int | None:
    for lo, hi, value in _KNOWN_RANGES:
        if lo <= k <= hi:
            return value
    return None


@dataclass
class TableRow:
    k: int
    expected: int
    lower: int
    upper: int | None
    ok: bool


def verify_table(
    k_max: int = 40,
    max_n: int = 10**7,
    max_window: int = 8,
    table: PrimeTable | None = None,
) -> list[TableRow]:
    """Regression of the known f table for k <= k_max from brute scans only.

    One sieve feeds window scans of every length up to max_window; the
    assembled value must match the published table exactly (the scans are
    exhaustive to max_n, which is ample for k <= 40).
    """
    if table is None:
        table = sieve_primes(2000)
    if known_f(k_max) is None:
        raise ParameterError(f"no reference values beyond k = 268 (got {k_max})")
    brutes = []
    for length in range(1, max_window + 1):
        records = tuple(brute_force_windows(k_max, max_n, length))
        brutes.append(
            BruteEvidence(k_max=k_max, length=length, max_n=max_n, records=records)
        )
    rows = []
    for k in range(1, k_max + 1):
        fv = assemble_f(k, brutes=brutes, table=table)
        expected = known_f(k)
        ok = fv.exact and fv.upper == expected
        rows.append(TableRow(k=k, expected=expected, lower=fv.lower, upper=fv.upper, ok=ok))
    return rows
