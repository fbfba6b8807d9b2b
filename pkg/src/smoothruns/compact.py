"""Power-product representations of huge Pell-equation solutions.

A solution x + y*sqrt(d) of x^2 - d y^2 = 1 has exponentially many digits in
d, but it is a power of the fundamental unit, so it can be written as

    prod_j ((a_j + b_j sqrt(d)) / c_j) ** 2**(K-j),   j = 1..K,

with K = O(log log_height) terms whose coefficients stay polynomial in d.
Construction walks the cycle of reduced ideals of Z[sqrt(d)]: each doubling
stage squares the current ideal, re-reduces, and nudges the walk distance to
half-exponentially-spaced targets; the relative generator of one stage is a
single small quadratic fraction and becomes one term.

Every Horner prefix prod_{j<=i} alpha_j^(2**(i-j)) is a generator of an
integral ideal, hence an algebraic integer.  Evaluation exploits that:
exact evaluation divides by each c_j exactly, and evaluation mod M runs the
same loop modulo M * prod c_j so each stage's division stays exact.  No
modular inverses are ever needed, so any modulus >= 2 works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd, isqrt

from .arith import ParameterError
from .contfrac import DomainError, _check_d

LN_PHI = math.log((1.0 + math.sqrt(5.0)) / 2.0)

# committed size bounds, asserted on every construction (see tests):
# terms    <= ceil(log2(max(L, LN_PHI) / LN_PHI)) + 2
# |a|, |b| <= 16 * d**2,   0 < c <= 8 * d
TERM_COUNT_SLACK = 2
COEFF_BOUND_FACTOR = 16
DENOM_BOUND_FACTOR = 8

DEFAULT_TARGET_SLACK = 0.05
EXACT_EVAL_DIGIT_CUTOFF = 10**6


class ConstructionError(ValueError):
    """log target does not sit near any unit power."""


class EvaluationError(ValueError):
    """Representation cannot be evaluated as requested."""


class EvalTooLargeError(EvaluationError):
    """Exact evaluation refused: the value exceeds the digit cutoff."""


class CapExceededError(EvaluationError):
    """A p-adic valuation probe ran past its exponent cap."""


@dataclass(frozen=True)
class CompactRep:
    """Value prod_j ((a_j + b_j sqrt(d)) / c_j) ** 2**(K-j) for j = 1..K.

    The empty term list is the identity (value 1).  ``log_height`` caches
    log of the represented value (float; construction-accurate).
    """

    d: int
    terms: tuple[tuple[int, int, int], ...]
    log_height: float

    @property
    def k_terms(self) -> int:
        return len(self.terms)

    def to_line(self) -> str:
        parts = [str(self.d), str(len(self.terms))]
        parts += [f"{a},{b},{c}" for a, b, c in self.terms]
        return ";".join(parts)

    @staticmethod
    def from_line(line: str) -> "CompactRep":
        fields = line.strip().split(";")
        if len(fields) < 2:
            raise ValueError(f"bad compact-rep line: {line!r}")
        d = int(fields[0])
        k = int(fields[1])
        if len(fields) != 2 + k:
            raise ValueError(f"term count mismatch in line: {line!r}")
        terms = []
        for part in fields[2:]:
            a, b, c = (int(v) for v in part.split(","))
            if c <= 0:
                raise ValueError(f"non-positive denominator in line: {line!r}")
            terms.append((a, b, c))
        return CompactRep(d=d, terms=tuple(terms), log_height=_terms_log_height(d, terms))


@dataclass(frozen=True)
class ResiduePair:
    modulus: int
    x_res: int
    y_res: int


def _terms_log_height(d: int, terms) -> float:
    sqrt_d = math.sqrt(d)
    total = 0.0
    for a, b, c in terms:
        total = 2.0 * total + math.log(abs(a + b * sqrt_d) / c)
    return total


# ---------------------------------------------------------------------------
# reduced-ideal walk: states (p, q) stand for the ideal [q, p + sqrt(d)]
# ---------------------------------------------------------------------------


def _log_step(p_new: int, q_old: int, q_new: int, sqrt_d: float) -> float:
    """log |(p_new + sqrt(d)) / q_old| without cancellation."""
    if p_new >= 0:
        return math.log((p_new + sqrt_d) / abs(q_old))
    # (p + sqrt(d))/q = q_new / (sqrt(d) - p)  exactly
    return math.log(abs(q_new) / (sqrt_d - p_new))


class _Walker:
    """Cycle walker with distance and stage-generator accumulation.

    The relative generator of one forward step from (p, q) to (p', q') is
    (p' + sqrt(d))/q; one backward step contributes (sqrt(d) - p)/q' for the
    state (p, q) being left.  Both follow from [q', p'+sqrt d] =
    ((p'+sqrt d)/q) [q, p+sqrt d], an exact module identity.
    """

    def __init__(self, d: int):
        self.d = d
        self.s = isqrt(d)
        self.sqrt_d = math.sqrt(d)
        self.p = self.s  # normalized form of the trivial ideal [1, sqrt d]
        self.q = 1
        self.delta = 0.0
        # stage generator accumulator: (ga + gb sqrt d) / gc
        self.ga, self.gb, self.gc = 1, 0, 1

    # -- generator bookkeeping ------------------------------------------------

    def _mul_gen(self, a: int, b: int, c: int) -> None:
        ga, gb, gc = self.ga, self.gb, self.gc
        na = ga * a + gb * b * self.d
        nb = ga * b + gb * a
        nc = gc * c
        if nc < 0:  # q may be negative while reducing; keep denominators > 0
            na, nb, nc = -na, -nb, -nc
        g = gcd(gcd(abs(na), abs(nb)), nc)
        if g > 1:
            na //= g
            nb //= g
            nc //= g
        self.ga, self.gb, self.gc = na, nb, nc

    def take_term(self) -> tuple[int, int, int]:
        """Pop the accumulated stage generator, normalized to positive value.

        Sign flips picked up during reduction are immaterial: terms enter the
        power product with even exponents except the last, and normalizing
        every term positive keeps each Horner prefix positive, so the value
        is the positive unit at the walked distance.
        """
        a, b, c = self.ga, self.gb, self.gc
        if _quad_sign(a, b, self.d) < 0:
            a, b = -a, -b
        self.ga, self.gb, self.gc = 1, 0, 1
        return a, b, c

    # -- steps ----------------------------------------------------------------

    def _floor_surd(self, p: int, q: int) -> int:
        num = p + self.s
        a = num // q
        if q < 0 and num % q == 0:
            a -= 1
        return a

    def step_forward(self) -> None:
        p, q = self.p, self.q
        a = self._floor_surd(p, q)
        p_new = a * q - p
        q_new = (self.d - p_new * p_new) // q
        self._mul_gen(p_new, 1, q)
        self.delta += _log_step(p_new, q, q_new, self.sqrt_d)
        self.p, self.q = p_new, q_new

    def peek_forward_log(self) -> float:
        p, q = self.p, self.q
        a = self._floor_surd(p, q)
        p_new = a * q - p
        q_new = (self.d - p_new * p_new) // q
        return _log_step(p_new, q, q_new, self.sqrt_d)

    def step_backward(self) -> None:
        """Predecessor in the reduced cycle (state must be reduced)."""
        p, q = self.p, self.q
        q_prev = (self.d - p * p) // q
        p_prev = self.s - (self.s + p) % q_prev
        self._mul_gen(-p, 1, q)
        self.delta -= _log_step(p, q_prev, q, self.sqrt_d)
        self.p, self.q = p_prev, q_prev

    def is_reduced(self) -> bool:
        return 0 < self.q <= self.p + self.s and self.p <= self.s and self.q + self.p > self.s

    def reduce(self) -> None:
        """Iterate the surd recurrence until the state is reduced (Lagrange)."""
        guard = 4 * max(self.q.bit_length(), 64)
        while not self.is_reduced():
            self.step_forward()
            guard -= 1
            if guard == 0:
                raise RuntimeError(f"reduction did not terminate for d={self.d}")

    def square(self) -> None:
        """Replace the ideal by the primitive part of its square.

        [q, p+sqrt d]^2 = g * [q^2/g^2, B/g + sqrt d] with g = gcd(q, 2p) and
        B = u q p + v (p^2 + d) for any u q + v 2p = g; the generator picks up
        the factor 1/g on top of the squaring, which the caller performs by
        squaring the Horner prefix.
        """
        p, q = self.p, self.q
        g, u, v = _ext_gcd(q, 2 * p)
        q_new = (q * q) // (g * g)
        b_val = u * q * p + v * (p * p + self.d)
        p_new = (b_val // g) % q_new
        # normalize p into (s - q, s]
        p_new = self.s - (self.s - p_new) % q_new
        if (self.d - p_new * p_new) % q_new != 0:
            raise AssertionError("ideal squaring broke the q | d - p^2 invariant")
        self._mul_gen(g, 0, g * g)  # exactly 1/g
        self.delta = 2.0 * self.delta - math.log(g)
        self.p, self.q = p_new, q_new


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_u, u = u, old_u - k * u
        old_v, v = v, old_v - k * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def _quad_sign(a: int, b: int, d: int) -> int:
    """Sign of a + b*sqrt(d), exactly."""
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1 if (a or b) else 0
    if a > 0:  # b < 0
        return 1 if a * a > b * b * d else -1
    return 1 if b * b * d > a * a else -1


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def build_compact(d: int, log_target: float, slack: float = DEFAULT_TARGET_SLACK) -> CompactRep:
    """Power-product representation of the unit at distance ~ log_target.

    ``log_target`` must sit within ``slack`` of an integer multiple of the
    regulator of Z[sqrt(d)] (that is what any regulator backend hands us);
    the construction lands exactly on the unit and never expands it.
    """
    _check_d(d)
    if slack <= 0 or slack > 0.4:
        raise ParameterError(f"slack must be in (0, 0.4], got {slack}")
    if log_target <= 0:
        raise ConstructionError(f"log target must be positive, got {log_target}")
    if log_target < 0.5:  # smallest unit log over all Z[sqrt d] is log(1+sqrt 2)
        raise ConstructionError(f"log target {log_target} below any unit height")

    stages = max(0, math.ceil(math.log2(log_target / LN_PHI)))
    walker = _Walker(d)
    terms: list[tuple[int, int, int]] = []

    target0 = log_target / (2.0**stages)
    _walk_to(walker, target0)
    terms.append(walker.take_term())
    for j in range(1, stages + 1):
        walker.square()
        walker.reduce()
        _walk_to(walker, log_target / (2.0 ** (stages - j)))
        terms.append(walker.take_term())

    _land_on_unit(walker, log_target, slack)
    a, b, c = walker.take_term()
    la, lb, lc = terms[-1]
    na = la * a + lb * b * d
    nb = la * b + lb * a
    nc = lc * c
    g = gcd(gcd(abs(na), abs(nb)), nc)
    terms[-1] = (na // g, nb // g, nc // g)

    rep = CompactRep(d=d, terms=tuple(terms), log_height=walker.delta)
    assert_size_bounds(rep, log_target)
    return rep


def _walk_to(walker: _Walker, target: float) -> None:
    while walker.delta > target:
        walker.step_backward()
    while walker.delta + walker.peek_forward_log() <= target + 1e-9:
        walker.step_forward()


def _land_on_unit(walker: _Walker, log_target: float, slack: float) -> None:
    """Move to the trivial ideal at distance within ``slack`` of the target."""
    lo, hi = log_target - slack, log_target + slack
    # scan backward first (the walk may already have passed the unit)
    back_steps = 0
    while walker.delta >= lo:
        if walker.q == 1 and abs(walker.delta - log_target) <= slack:
            return
        walker.step_backward()
        back_steps += 1
        if back_steps > 512:
            raise ConstructionError("unit scan ran away backward")
    for _ in range(back_steps):  # return to the scan origin
        walker.step_forward()
    fwd_steps = 0
    while walker.delta <= hi:
        if walker.q == 1 and abs(walker.delta - log_target) <= slack:
            return
        walker.step_forward()
        fwd_steps += 1
        if fwd_steps > 512:
            raise ConstructionError("unit scan ran away forward")
    raise ConstructionError(
        f"no unit power within {slack} of log target {log_target} for d={walker.d}"
    )


def assert_size_bounds(rep: CompactRep, log_target: float | None = None) -> None:
    """Committed polynomial size bounds; raised on violation."""
    height = log_target if log_target is not None else max(rep.log_height, LN_PHI)
    limit = math.ceil(math.log2(max(height, LN_PHI) / LN_PHI)) + TERM_COUNT_SLACK
    if rep.k_terms > max(limit, 1):
        raise AssertionError(f"{rep.k_terms} terms exceeds committed bound {limit}")
    coeff_cap = COEFF_BOUND_FACTOR * rep.d * rep.d
    denom_cap = DENOM_BOUND_FACTOR * rep.d
    for a, b, c in rep.terms:
        if abs(a) > coeff_cap or abs(b) > coeff_cap:
            raise AssertionError(f"coefficient {max(abs(a), abs(b))} exceeds {coeff_cap}")
        if not 0 < c <= denom_cap:
            raise AssertionError(f"denominator {c} exceeds {denom_cap}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def eval_exact(rep: CompactRep, digit_cutoff: int = EXACT_EVAL_DIGIT_CUTOFF) -> tuple[int, int]:
    """Expand to exact integers (x, y); refuses beyond the digit cutoff."""
    est_digits = rep.log_height / math.log(10.0)
    if est_digits > digit_cutoff:
        raise EvalTooLargeError(
            f"~{est_digits:.3g} digits exceeds cutoff {digit_cutoff}; use eval_mod"
        )
    d = rep.d
    x, y = 1, 0
    for a, b, c in rep.terms:
        x, y = x * x + d * y * y, 2 * x * y
        x, y = x * a + y * b * d, x * b + y * a
        if x % c or y % c:
            raise EvaluationError("non-integral Horner prefix; rep is not stage-structured")
        x //= c
        y //= c
    return x, y


def eval_mod(rep: CompactRep, modulus: int) -> ResiduePair:
    """(x mod modulus, y mod modulus) of the represented value.

    Runs the Horner loop modulo modulus * prod(c_j); each stage's division
    by c_j is exact because the true prefix is an algebraic integer, so no
    inverses are needed and any modulus >= 2 (even composite) is fine.
    """
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    d = rep.d
    carry = modulus
    for _, _, c in rep.terms:
        carry *= c
    x, y = 1, 0
    for a, b, c in rep.terms:
        x, y = (x * x + d * y * y) % carry, (2 * x * y) % carry
        x, y = (x * a + y * b * d) % carry, (x * b + y * a) % carry
        if x % c or y % c:
            raise EvaluationError("non-integral Horner prefix; rep is not stage-structured")
        x //= c
        y //= c
        carry //= c
        x %= carry
        y %= carry
    return ResiduePair(modulus=modulus, x_res=x % modulus, y_res=y % modulus)


def power_compact(rep: CompactRep, n: int) -> CompactRep:
    """Representation of the n-th power (n >= 0), rebuilt at full reduction.

    Rebuilding through the ideal walk keeps the size bounds intact for any
    exponent, unlike termwise multiplication of power products.
    """
    if n < 0:
        raise ParameterError("negative powers are outside the Pell solution set")
    if n == 0 or rep.log_height < 1e-12:
        return CompactRep(d=rep.d, terms=(), log_height=0.0)
    if n == 1:
        return rep
    return build_compact(rep.d, n * rep.log_height)


def valuation_of_y(rep: CompactRep, p: int, cap: int = 64) -> int:
    """Exact v_p(y) of the represented solution, probed modulo p**cap.

    One automatic doubling of the cap is attempted; beyond that the probe
    reports CapExceededError (never observed for genuine smooth parts).
    """
    if p < 2:
        raise ParameterError(f"p must be a prime >= 2, got {p}")
    if cap < 1:
        raise ParameterError(f"cap must be >= 1, got {cap}")
    for attempt_cap in (cap, 2 * cap):
        residue = eval_mod(rep, p**attempt_cap).y_res
        if residue:
            v = 0
            while residue % p == 0:
                residue //= p
                v += 1
            return v
    raise CapExceededError(f"v_{p}(y) >= {2 * cap} for d={rep.d}")


def values_equal(r1: CompactRep, r2: CompactRep) -> bool:
    """Value equality: log heights agree and residues match on a battery."""
    if r1.d != r2.d:
        return False
    scale = max(1.0, abs(r1.log_height), abs(r2.log_height))
    if abs(r1.log_height - r2.log_height) > 1e-6 * scale:
        return False
    for m in _EQUALITY_BATTERY:
        a, b = eval_mod(r1, m), eval_mod(r2, m)
        if (a.x_res, a.y_res) != (b.x_res, b.y_res):
            return False
    return True


_EQUALITY_BATTERY = (2**31 - 1, 2**61 - 1, 999999937, 10**9 + 7)
