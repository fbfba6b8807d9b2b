import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from smoothruns.arith import sieve_primes


@pytest.fixture(scope="session")
def table():
    return sieve_primes(2000)


def squarefree_range(lo: int, hi: int) -> list[int]:
    from smoothruns.arith import squarefree_kernel

    return [d for d in range(lo, hi + 1) if squarefree_kernel(d)[1] == 1]
