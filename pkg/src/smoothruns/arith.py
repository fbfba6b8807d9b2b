"""Prime tables, trial-division factorization, and smoothness predicates.

Everything here is exact integer arithmetic.  Smoothness questions in this
package are always relative to a small prime bound (at most a few hundred),
so trial division over a sieved table is complete for our needs; cofactors
with larger prime factors are reported, never factored.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from dataclasses import dataclass, field
from math import isqrt


class ParameterError(ValueError):
    """A routine was called with arguments outside its contract."""


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: tuple[int, ...]

    def nth_prime(self, i: int) -> int:
        """1-based: nth_prime(1) = 2."""
        if i < 1 or i > len(self.primes):
            raise ParameterError(f"prime index {i} outside table (limit {self.limit})")
        return self.primes[i - 1]

    def prime_pi(self, x: int) -> int:
        """Number of primes <= x.  Requires x <= limit."""
        if x > self.limit:
            raise ParameterError(f"prime_pi({x}) beyond table limit {self.limit}")
        return bisect_right(self.primes, x)

    def primes_leq(self, bound: int) -> tuple[int, ...]:
        if bound > self.limit:
            raise ParameterError(f"bound {bound} beyond table limit {self.limit}")
        return self.primes[: bisect_right(self.primes, bound)]

    def __contains__(self, p: int) -> bool:
        i = bisect_right(self.primes, p)
        return i > 0 and self.primes[i - 1] == p


def sieve_primes(limit: int) -> PrimeTable:
    """Eratosthenes sieve; immutable table with nth_prime / prime_pi."""
    if limit < 2:
        raise ParameterError(f"sieve limit must be >= 2, got {limit}")
    flags = bytearray(b"\x01") * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            start = p * p
            flags[start :: p] = b"\x00" * ((limit - start) // p + 1)
    return PrimeTable(limit=limit, primes=tuple(i for i in range(2, limit + 1) if flags[i]))


@dataclass
class Factorization:
    """Partial factorization: value = cofactor * prod(p**e).

    ``factors`` lists distinct primes ascending; ``cofactor`` carries the
    part with no prime factor inside the table used to produce it.
    """

    factors: list[tuple[int, int]] = field(default_factory=list)
    cofactor: int = 1

    def value(self) -> int:
        v = self.cofactor
        for p, e in self.factors:
            v *= p**e
        return v

    def smooth_value(self) -> int:
        v = 1
        for p, e in self.factors:
            v *= p**e
        return v

    def is_complete(self) -> bool:
        return self.cofactor == 1

    def format_powers(self) -> str:
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        if self.cofactor != 1:
            parts.append(f"[{self.cofactor}]")
        return "*".join(parts) if parts else "1"


def factorize(n: int, table: PrimeTable) -> Factorization:
    """Trial-divide |n| over the table primes; leftover goes to cofactor."""
    if n == 0:
        raise ParameterError("cannot factorize 0")
    m = abs(n)
    out = Factorization()
    for p in table.primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.factors.append((p, e))
    if m > 1:
        # leftover m is coprime to every table prime tried, hence larger
        # than all appended primes; prime whenever it is <= limit.
        if m <= table.limit:
            out.factors.append((m, 1))
        else:
            out.cofactor = m
    return out


def largest_prime_factor(n: int) -> int:
    """P(n): largest prime factor of |n|, with P(0) = P(1) = 1."""
    m = abs(n)
    if m <= 1:
        return 1
    best = 1
    while m % 2 == 0:
        m //= 2
        best = 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            best = f
            while m % f == 0:
                m //= f
        else:
            f += 2
    if m > 1:
        best = m
    return best


_default_table = sieve_primes(512)


def _primes_leq(bound: int, table: PrimeTable | None) -> tuple[int, ...]:
    global _default_table
    if table is not None:
        return table.primes_leq(bound)
    if bound > _default_table.limit:
        _default_table = sieve_primes(bound)
    return _default_table.primes_leq(bound)


def smooth_part(n: int, bound: int, table: PrimeTable | None = None) -> int:
    """Largest divisor of |n| built only from primes <= bound."""
    if n == 0:
        raise ParameterError("0 has no smooth part")
    m = abs(n)
    z = 1
    for p in _primes_leq(bound, table):
        while m % p == 0:
            m //= p
            z *= p
    return z


def is_smooth(n: int, bound: int, table: PrimeTable | None = None) -> bool:
    """True iff every prime factor of |n| is <= bound (so P(n) <= bound)."""
    if n == 0:
        raise ParameterError("smoothness undefined for 0")
    m = abs(n)
    for p in _primes_leq(bound, table):
        while m % p == 0:
            m //= p
    return m == 1


def squarefree_kernel(n: int) -> tuple[int, int]:
    """Split n = d * y**2 with d squarefree; returns (d, y).

    Full factorization by trial division, so only meant for inputs whose
    prime factors are reachable that way (everything this package feeds it).
    """
    if n < 1:
        raise ParameterError(f"squarefree kernel needs n >= 1, got {n}")
    d, y = 1, 1
    m = n
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            y *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1 if f == 2 else 2
    if m > 1:
        d *= m
    return d, y


def window_largest_prime(n: int, length: int) -> int:
    """P(n (n+1) ... (n+length-1)) = max of P over the window."""
    if n < 1 or length < 1:
        raise ParameterError("window needs n >= 1 and length >= 1")
    return max(largest_prime_factor(n + i) for i in range(length))
