"""Window-search parameters and the squarefree coefficient stream.

For a window of length m, the indices 0..m-1 are split into disjoint pairs
(i, i+2) with i = 0, 1 (mod 4).  Writing X = n+i+1 and Y = (n+i)(n+i+2)
turns a smooth window into X^2 - D Y'^2 = 1 where D is the squarefree
kernel of the pair product.  By pigeonhole over the pairs, some D is
divisible by at most N of the primes above the first t0 = pi(m-1), which
cuts the coefficient list from 2^t - 1 to

    M = -1 + 2^t0 * sum_{j=0..N} C(t - t0, j).

The stream below enumerates exactly those M coefficients, resumable from
any position in O(t) time via combinatorial unranking.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from ..arith import ParameterError, PrimeTable, sieve_primes


@dataclass(frozen=True)
class SearchParams:
    m: int
    t: int
    t0: int
    pair_starts: tuple[int, ...]
    upper_allowance: int  # max count of large primes in one coefficient (N)
    equation_count: int  # M
    lower_primes: tuple[int, ...]
    upper_primes: tuple[int, ...]

    @property
    def p_t(self) -> int:
        return self.upper_primes[-1]


@dataclass(frozen=True)
class DCursor:
    m: int
    t: int
    position: int  # number of coefficients already emitted


class CursorError(ValueError):
    """Checkpoint cursor does not match the campaign parameters."""


def derive_params(m: int, t: int, table: PrimeTable | None = None) -> SearchParams:
    if m < 3:
        raise ParameterError(f"window length must be >= 3, got {m}")
    if table is None:
        table = sieve_primes(2000)
    if t < 1 or t > len(table.primes):
        raise ParameterError(f"prime count t={t} outside table")
    t0 = table.prime_pi(m - 1)
    if t <= t0:
        raise ParameterError(f"need t > pi(m-1) = {t0}, got t = {t}")
    pair_starts = tuple(i for i in range(m - 2) if i % 4 in (0, 1))
    n_pairs = len(pair_starts)
    assert n_pairs == m // 4 + (m + 1) // 4
    allowance = (t - t0) // n_pairs
    count = -1 + 2**t0 * sum(comb(t - t0, j) for j in range(allowance + 1))
    return SearchParams(
        m=m,
        t=t,
        t0=t0,
        pair_starts=pair_starts,
        upper_allowance=allowance,
        equation_count=count,
        lower_primes=table.primes[:t0],
        upper_primes=table.primes[t0:t],
    )


def count_equations(m: int, t: int, table: PrimeTable | None = None) -> int:
    return derive_params(m, t, table).equation_count


def _unrank_combination(n: int, k: int, rank: int) -> tuple[int, ...]:
    """Lexicographic unranking of a k-subset of range(n)."""
    out = []
    x = 0
    r = rank
    for slot in range(k):
        while True:
            block = comb(n - x - 1, k - slot - 1)
            if r < block:
                break
            r -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def _selection_at(params: SearchParams, sel_index: int) -> tuple[int, ...]:
    """The sel_index-th upper-prime subset (sizes ascending, lex within)."""
    u = len(params.upper_primes)
    j = 0
    while sel_index >= comb(u, j):
        sel_index -= comb(u, j)
        j += 1
        if j > params.upper_allowance:
            raise CursorError("selection index beyond enumeration")
    return _unrank_combination(u, j, sel_index)


def enumerate_coefficients(
    params: SearchParams, start: int = 0
) -> Iterator[tuple[int, int]]:
    """Yield (D, position) in deterministic order, resumable at any position.

    Order: upper subsets advance slowest (by size, then lexicographically);
    within one subset the lower mask counts 0, 1, 2, ... in binary, so the
    stream for (6,12) starts 2, 3, 6, 5, 10, 15, 30, then 7, 14, 21, ...
    The pair (empty subset, empty mask), i.e. D = 1, is skipped.
    """
    total = params.equation_count
    if start < 0 or start > total:
        raise CursorError(f"cursor position {start} outside [0, {total}]")
    lower = params.lower_primes
    n_masks = 2 ** params.t0

    pos = start
    # locate (selection, mask) for the starting position; block 0 omits D=1
    if start < n_masks - 1:
        sel_index, mask = 0, start + 1
    else:
        rest = start - (n_masks - 1)
        sel_index, mask = 1 + rest // n_masks, rest % n_masks

    while pos < total:
        upper_product = 1
        for idx in _selection_at(params, sel_index):
            upper_product *= params.upper_primes[idx]
        while mask < n_masks and pos < total:
            d = upper_product
            bits = mask
            i = 0
            while bits:
                if bits & 1:
                    d *= lower[i]
                bits >>= 1
                i += 1
            if d > 1:
                yield d, pos
                pos += 1
            mask += 1
        mask = 0
        sel_index += 1
