import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothruns.arith import (
    Factorization,
    ParameterError,
    factorize,
    is_smooth,
    largest_prime_factor,
    sieve_primes,
    smooth_part,
    squarefree_kernel,
    window_largest_prime,
)

from oracles import trial_factor


def test_sieve_small():
    assert sieve_primes(10).primes == (2, 3, 5, 7)


def test_nth_prime_values(table):
    assert table.nth_prime(47) == 211
    assert table.nth_prime(56) == 263
    assert table.nth_prime(1) == 2


def test_prime_pi(table):
    assert table.prime_pi(13) == 6
    assert table.prime_pi(1) == 0
    assert table.prime_pi(2) == 1


def test_prime_pi_nth_prime_inverse(table):
    for i in range(1, 101):
        assert table.prime_pi(table.nth_prime(i)) == i


def test_sieve_rejects_tiny():
    with pytest.raises(ParameterError):
        sieve_primes(1)


def test_factorize_examples(table):
    small = sieve_primes(7)
    assert factorize(720, small).factors == [(2, 4), (3, 2), (5, 1)]
    assert factorize(720, small).cofactor == 1
    f = factorize(4375, small)
    assert f.factors == [(5, 4), (7, 1)] and f.cofactor == 1
    f = factorize(22, small)
    assert f.factors == [(2, 1)] and f.cofactor == 11


def test_factorize_zero(table):
    with pytest.raises(ParameterError):
        factorize(0, table)


def test_factorize_negative(table):
    f = factorize(-45, table)
    assert f.factors == [(3, 2), (5, 1)]
    assert f.value() == 45


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**9))
def test_factorize_reconstructs(n):
    table = sieve_primes(1000)
    f = factorize(n, table)
    assert f.value() == n
    assert [p for p, _ in f.factors] == sorted({p for p, _ in f.factors})
    if f.cofactor != 1:
        assert all(f.cofactor % p for p in table.primes)


def test_largest_prime_factor_examples():
    assert largest_prime_factor(0) == 1
    assert largest_prime_factor(1) == 1
    assert largest_prime_factor(-1) == 1
    assert largest_prime_factor(12) == 3
    assert largest_prime_factor(-45) == 5


def test_largest_prime_factor_vs_oracle():
    for n in range(2, 2000):
        assert largest_prime_factor(n) == max(trial_factor(n))


def test_smoothness_examples():
    assert is_smooth(4374, 7) and smooth_part(4374, 7) == 4374
    n = 2**3 * 7 * 11
    assert not is_smooth(n, 5)
    assert smooth_part(n, 5) == 8
    assert is_smooth(1, 2) and smooth_part(1, 2) == 1


def test_smoothness_zero():
    with pytest.raises(ParameterError):
        is_smooth(0, 7)
    with pytest.raises(ParameterError):
        smooth_part(0, 7)


def test_smooth_rough_split():
    for n in range(1, 3000):
        for b in (2, 3, 7, 13):
            z = smooth_part(n, b)
            assert n % z == 0
            rough = n // z
            assert all(rough % p for p in sieve_primes(b).primes)
            assert trial_factor(z) == {p: e for p, e in trial_factor(n).items() if p <= b}


def test_squarefree_kernel_examples():
    assert squarefree_kernel(12) == (3, 2)
    assert squarefree_kernel(30) == (30, 1)
    assert squarefree_kernel(360) == (10, 6)
    assert squarefree_kernel(1) == (1, 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**8))
def test_squarefree_kernel_decomposition(n):
    d, y = squarefree_kernel(n)
    assert d * y * y == n
    assert all(e == 1 for e in trial_factor(d).values())


def test_window_largest_prime_witnesses():
    assert window_largest_prime(318, 13) == 163
    assert window_largest_prime(1330, 15) == 223
    assert window_largest_prime(1, 1) == 1


def test_window_largest_prime_matches_pointwise():
    for n in range(1, 400):
        for length in (1, 2, 3, 5, 8):
            expected = max(largest_prime_factor(n + i) for i in range(length))
            assert window_largest_prime(n, length) == expected


def test_factorization_helpers():
    f = Factorization(factors=[(2, 3), (5, 1)], cofactor=7)
    assert f.value() == 280
    assert f.smooth_value() == 40
    assert not f.is_complete()
    assert f.format_powers() == "2^3*5*[7]"
