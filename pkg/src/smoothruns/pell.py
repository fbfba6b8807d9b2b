"""Smooth solutions of x^2 - d y^2 = 1 for one coefficient, certified
without GRH.

The solutions are powers of the fundamental solution, and only indices up
to max((p_t + 1)/2, 12) can have a p_t-smooth y (primitive divisors), so a
single equation needs one regulator call, one power-product construction,
and a bounded index loop.

The regulator backend's output is only trusted as m * R for some unknown
positive integer m.  The certification step makes that sound: if a smooth
solution below the base existed, the fundamental y_1 would divide it and
hence divide the smooth part z we computed, so y_1 <= z; scanning the
convergents of sqrt(d) up to z either finds that smaller solution (then the
search is redone from it) or proves unconditionally that none exists.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from math import isqrt

from . import compact
from .arith import Factorization, ParameterError, PrimeTable, factorize, sieve_primes
from .compact import CompactRep, build_compact, eval_exact, eval_mod, power_compact
from .contfrac import (
    CFRegulatorProvider,
    DomainError,
    RegulatorProvider,
    convergents,
    quad_log,
)

# below this total log height the whole index range is expanded exactly;
# above it, smoothness runs on residues and p-adic valuations only
EXACT_ROUTE_LOG_CUTOFF = 900.0

UNCONDITIONAL = "Unconditional"
RECOMPUTED = "RecomputedFromSmaller"


@dataclass(frozen=True)
class SmoothSolution:
    d: int
    index: int
    x: int
    y: int
    y_factorization: Factorization
    x_factorization: Factorization | None
    rep: CompactRep


@dataclass(frozen=True)
class Certification:
    status: str
    z_used: int
    convergents_scanned: int


def index_bound(t: int, table: PrimeTable) -> int:
    """Largest solution index that can still have a p_t-smooth y."""
    if t < 1:
        raise ParameterError(f"need t >= 1, got {t}")
    p_t = table.nth_prime(t)
    return max((p_t + 1) // 2, 12)


def smooth_solutions(
    d: int,
    t: int,
    require_x_smooth: bool = False,
    provider: RegulatorProvider | None = None,
    table: PrimeTable | None = None,
) -> tuple[list[SmoothSolution], Certification]:
    """All solutions with smooth y (and smooth x if required), certified.

    Raises DomainError for d <= 1, non-squarefree d, or P(d) > p_t.
    """
    if table is None:
        table = sieve_primes(300)
    table.nth_prime(t)  # validates t against the table
    _validate_equation(d, table)
    if provider is None:
        provider = CFRegulatorProvider()

    claim = provider.regulator(d)
    base_log = claim.log_unit if claim.unit_norm == 1 else 2.0 * claim.log_unit
    base_rep = _pell_base_rep(d, base_log)

    solutions, z_max = _search_from_base(d, base_rep, t, require_x_smooth, table)

    smaller, scanned = _scan_for_smaller(d, z_max, base_rep.log_height)
    if smaller is None:
        return solutions, Certification(UNCONDITIONAL, z_max, scanned)

    # the backend gave a proper multiple and a smaller solution exists:
    # redo everything from the solution the scan actually found
    x1, y1 = smaller
    true_rep = _pell_base_rep(d, quad_log(x1, y1, d))
    solutions, z2 = _search_from_base(d, true_rep, t, require_x_smooth, table)
    return solutions, Certification(RECOMPUTED, max(z_max, z2), scanned)


def grh_guard(d: int, base_rep: CompactRep, z: int) -> Certification:
    """Certify a base representation against the smooth part z.

    Unconditional when no solution with y <= z sits below the base; the
    caller must rerun the search from the reported smaller solution
    otherwise (smooth_solutions does this transparently).
    """
    if z < 1:
        raise ParameterError(f"smooth part must be >= 1, got {z}")
    smaller, scanned = _scan_for_smaller(d, z, base_rep.log_height)
    status = UNCONDITIONAL if smaller is None else RECOMPUTED
    return Certification(status, z, scanned)


def _validate_equation(d: int, table: PrimeTable) -> None:
    # P(d) <= p_t is not required here: the searches only enumerate smooth
    # coefficients, but solving a rough d for smooth y is still well defined
    # (it just never has any when d itself spoils the product).
    if d <= 1:
        raise DomainError(f"need d > 1, got {d}")
    if isqrt(d) ** 2 == d:
        raise DomainError(f"d = {d} is a perfect square")
    fac = factorize(d, table)
    if any(e > 1 for _, e in fac.factors) or _has_square_cofactor(fac):
        raise DomainError(f"d = {d} is not squarefree")


def _has_square_cofactor(fac: Factorization) -> bool:
    if fac.cofactor == 1:
        return False
    from .arith import squarefree_kernel

    return squarefree_kernel(fac.cofactor)[1] != 1


def _pell_base_rep(d: int, base_log: float) -> CompactRep:
    """Build the base representation, insisting on norm +1.

    A backend lying about the unit norm would land us on a norm -1 unit;
    the residue check catches that and doubling the log repairs it.
    """
    rep = build_compact(d, base_log)
    if _is_pell_rep(rep):
        return rep
    rep = build_compact(d, 2.0 * base_log)
    if _is_pell_rep(rep):
        return rep
    raise compact.ConstructionError(f"no Pell base near log {base_log} for d={d}")


def _is_pell_rep(rep: CompactRep) -> bool:
    for q in (2**61 - 1, 10**9 + 7):
        r = eval_mod(rep, q)
        if (r.x_res * r.x_res - rep.d * r.y_res * r.y_res) % q != 1 % q:
            return False
    return True


def _scan_for_smaller(d: int, z: int, base_log: float) -> tuple[tuple[int, int] | None, int]:
    """First convergent solution with q <= z strictly below the base."""
    scanned = 0
    for p, q, _ in convergents(d):
        if q > z:
            break
        scanned += 1
        if p * p - d * q * q == 1:
            if quad_log(p, q, d) < base_log - 0.5:
                return (p, q), scanned
            break  # found the base itself: minimal, nothing below
    return None, scanned


def _control_primes(d: int, t: int, require_x_smooth: bool, count: int = 3) -> list[int]:
    rng = random.Random(f"{d}:{t}:{require_x_smooth}")
    primes: list[int] = []
    while len(primes) < count:
        cand = rng.getrandbits(62) | (1 << 61) | 1
        if _is_probable_prime(cand) and cand not in primes:
            primes.append(cand)
    return primes


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    r, s = n - 1, 0
    while r % 2 == 0:
        r //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, r, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _search_from_base(
    d: int,
    base_rep: CompactRep,
    t: int,
    require_x_smooth: bool,
    table: PrimeTable,
) -> tuple[list[SmoothSolution], int]:
    bound = index_bound(t, table)
    if base_rep.log_height * bound <= EXACT_ROUTE_LOG_CUTOFF:
        return _search_exact(d, base_rep, t, bound, require_x_smooth, table)
    return _search_modular(d, base_rep, t, bound, require_x_smooth, table)


def _search_exact(d, base_rep, t, bound, require_x_smooth, table):
    """Small equations: expand every power and trial-divide."""
    p_t = table.nth_prime(t)
    xb, yb = eval_exact(base_rep)
    solutions = []
    z_max = 1
    x, y = 1, 0
    for n in range(1, bound + 1):
        x, y = x * xb + d * y * yb, x * yb + y * xb
        y_fac = factorize(y, table)
        z_max = max(z_max, _smooth_below(y_fac, p_t))
        if y_fac.cofactor != 1 or (y_fac.factors and y_fac.factors[-1][0] > p_t):
            continue  # rough part > 1
        x_fac = None
        if require_x_smooth:
            x_fac = factorize(x, table)
            if x_fac.cofactor != 1 or (x_fac.factors and x_fac.factors[-1][0] > p_t):
                continue
        solutions.append(
            SmoothSolution(
                d=d,
                index=n,
                x=x,
                y=y,
                y_factorization=y_fac,
                x_factorization=x_fac,
                rep=power_compact(base_rep, n),
            )
        )
    return solutions, z_max


def _smooth_below(fac: Factorization, p_t: int) -> int:
    z = 1
    for p, e in fac.factors:
        if p <= p_t:
            z *= p**e
    return z


def _search_modular(d, base_rep, t, bound, require_x_smooth, table):
    """Large equations: residue support scan, then p-adic valuations.

    y_n mod p follows a two-term recurrence from the base residues, so the
    full support matrix costs one eval_mod per prime.  Only indices whose y
    is divisible by at least one small prime can be smooth, and for those
    the exact smooth part z is assembled from valuations; y_n is smooth iff
    log z matches log y_n (deterministic, regulator error << 0.5) and the
    reconstruction matches the representation modulo control primes.
    """
    p_t = table.nth_prime(t)
    primes = table.primes_leq(p_t)
    base_log = base_rep.log_height
    ln_2sqrt = math.log(2.0 * math.sqrt(d))

    support: dict[int, list[int]] = {}
    for p in primes:
        r = eval_mod(base_rep, p)
        xb, yb = r.x_res, r.y_res
        x_, y_ = 1 % p, 0
        for n in range(1, bound + 1):
            x_, y_ = (x_ * xb + d * y_ * yb) % p, (x_ * yb + y_ * xb) % p
            if y_ == 0:
                support.setdefault(n, []).append(p)

    controls = _control_primes(d, t, require_x_smooth)
    solutions = []
    z_max = 1
    for n in sorted(support):
        rep_n = power_compact(base_rep, n)
        log_y_n = n * base_log - ln_2sqrt
        z = 1
        log_z = 0.0
        for p in support[n]:
            v = _valuation_definitive(rep_n, p, log_y_n)
            z *= p**v
            log_z += v * math.log(p)
        z_max = max(z_max, z)
        if log_z < log_y_n - 0.5:
            continue  # rough part provably > 1
        # candidate smooth: reconstruct and verify
        x = isqrt(1 + d * z * z)
        if x * x != 1 + d * z * z:
            continue
        ok = True
        for q in controls:
            r = eval_mod(rep_n, q)
            if r.x_res != x % q or r.y_res != z % q:
                ok = False
                break
        if not ok:
            continue
        x_fac = None
        if require_x_smooth:
            x_fac = factorize(x, table)
            if x_fac.cofactor != 1 or (x_fac.factors and x_fac.factors[-1][0] > p_t):
                continue
        solutions.append(
            SmoothSolution(
                d=d,
                index=n,
                x=x,
                y=z,
                y_factorization=factorize(z, table),
                x_factorization=x_fac,
                rep=rep_n,
            )
        )
    return solutions, z_max


def _valuation_definitive(rep_n: CompactRep, p: int, log_y_n: float) -> int:
    """v_p(y_n); escalates to the provable cap log_p(y_n) if 128 is hit."""
    try:
        return compact.valuation_of_y(rep_n, p, cap=64)
    except compact.CapExceededError:
        cap = int(log_y_n / math.log(p)) + 2
        residue = eval_mod(rep_n, p**cap).y_res
        v = 0
        while residue and residue % p == 0:
            residue //= p
            v += 1
        return v
