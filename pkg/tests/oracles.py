"""Independent oracles for the test suite.

These deliberately avoid the library's own code paths: ascending-y scans,
exact integer powering, and trial division are the ground truth the fast
machinery is checked against.
"""

from __future__ import annotations

from math import isqrt

import numpy as np


def pell_brute_first_solution(d: int, y_cap: int) -> tuple[int, int] | None:
    """Smallest solution of x^2 - d y^2 = 1 with 1 <= y <= y_cap, by scan.

    Vectorized so a cap of 10^6 is cheap; values stay below 2^53 for
    d <= 9000 at that cap, keeping the float sqrt candidate step exact
    enough to screen (every candidate is re-verified in integers).
    """
    chunk = 1 << 18
    y = 1
    while y <= y_cap:
        hi = min(y + chunk, y_cap + 1)
        ys = np.arange(y, hi, dtype=np.float64)
        vals = d * ys * ys + 1.0
        roots = np.rint(np.sqrt(vals))
        hits = np.flatnonzero(roots * roots == vals)
        for i in hits:
            yy = int(ys[i])
            xx = isqrt(1 + d * yy * yy)
            if xx * xx == 1 + d * yy * yy:
                return xx, yy
        y = hi
    return None


def pell_power(x1: int, y1: int, d: int, k: int) -> tuple[int, int]:
    """(x1 + y1 sqrt(d))^k by exact integer multiplication."""
    x, y = 1, 0
    for _ in range(k):
        x, y = x * x1 + d * y * y1, x * y1 + y * x1
    return x, y


def solution_root(x: int, y: int, d: int, k: int) -> tuple[int, int] | None:
    """Exact k-th root of the solution x + y sqrt(d), if it is one.

    Uses the integer k-th root of 2x as the candidate trace: for a unit
    u > 1 with u^k = x + y sqrt(d), the base x-coordinate is the nearest
    integer to cosh(arccosh(x)/k), which lies within 1 of root(2x, k)/2.
    """
    if k < 2:
        return (x, y)
    approx = _iroot(2 * x, k)
    for cand in range(max(1, (approx - 2) // 2), (approx + 4) // 2 + 1):
        rem = cand * cand - 1
        if rem < 0 or rem % d:
            continue
        yb = isqrt(rem // d)
        if d * yb * yb != rem:
            continue
        if pell_power(cand, yb, d, k) == (x, y):
            return cand, yb
    return None


def is_fundamental(x: int, y: int, d: int) -> bool:
    """No proper root exists: (x, y) generates the solution group.

    Every positive solution is a power of the fundamental one, so being
    fundamental is exactly not being a k-th power for any prime k.
    """
    if x * x - d * y * y != 1 or y < 1:
        return False
    k = 2
    while (1 << k) <= 2 * x:  # u^k <= 2x forces k <= log2(2x)
        if _is_prime_small(k) and solution_root(x, y, d, k) is not None:
            return False
        k += 1
    return True


def _iroot(n: int, k: int) -> int:
    """Floor integer k-th root."""
    if n < 2:
        return n
    x = int(round(n ** (1.0 / k)))
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def _is_prime_small(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def trial_factor(n: int) -> dict[int, int]:
    """Complete factorization by naive trial division (oracle-grade)."""
    out: dict[int, int] = {}
    m = abs(n)
    f = 2
    while f * f <= m:
        while m % f == 0:
            out[f] = out.get(f, 0) + 1
            m //= f
        f += 1 if f == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def smooth_pairs_by_scan(p_bound: int, max_z: int) -> list[int]:
    """All z <= max_z with both z and z+1 p_bound-smooth, by sieve."""
    lpf = _lpf(max_z + 1)
    ok = lpf[1:] <= p_bound
    return [int(z) for z in np.flatnonzero(ok[:-1] & ok[1:]) + 1]


def _lpf(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    lpf = np.ones(limit + 1, dtype=np.int64)
    for p in np.flatnonzero(is_prime):
        lpf[p::p] = p
    return lpf
