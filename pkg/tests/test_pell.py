import math

import pytest

from smoothruns.arith import is_smooth, sieve_primes, smooth_part
from smoothruns.compact import CompactRep, eval_mod
from smoothruns.contfrac import (
    CFRegulatorProvider,
    DomainError,
    ScaledRegulatorProvider,
    fundamental_solution,
    quad_log,
    regulator_cf,
)
from smoothruns.pell import (
    RECOMPUTED,
    UNCONDITIONAL,
    Certification,
    grh_guard,
    index_bound,
    smooth_solutions,
)

from conftest import squarefree_range
from oracles import pell_power


def _oracle_smooth_set(d, t, table, require_x=False, bound=None):
    """Expand powers of the fundamental solution and trial-divide."""
    p_t = table.nth_prime(t)
    f = fundamental_solution(d)
    limit = bound if bound is not None else max((p_t + 1) // 2, 12)
    out = []
    x, y = 1, 0
    for n in range(1, limit + 1):
        x, y = x * f.x1 + d * y * f.y1, x * f.y1 + y * f.x1
        if not is_smooth(y, p_t, table):
            continue
        if require_x and not is_smooth(x, p_t, table):
            continue
        out.append((n, x, y))
    return out


def test_index_bound_examples(table):
    assert index_bound(47, table) == 106
    assert index_bound(4, table) == 12
    assert index_bound(56, table) == 132


def test_smooth_solutions_d2(table):
    sols, cert = smooth_solutions(2, 4, table=table)
    assert [(s.index, s.x, s.y) for s in sols] == [(1, 3, 2), (2, 17, 12), (3, 99, 70)]
    assert cert.status == UNCONDITIONAL
    assert all(s.x**2 - 2 * s.y**2 == 1 for s in sols)


def test_smooth_solutions_d6(table):
    sols, _ = smooth_solutions(6, 3, table=table)
    assert [(s.index, s.x, s.y) for s in sols] == [(1, 5, 2), (2, 49, 20)]


def test_smooth_solutions_x_required(table):
    sols, _ = smooth_solutions(2, 4, require_x_smooth=True, table=table)
    assert [(s.index, s.x, s.y) for s in sols] == [(1, 3, 2)]
    assert sols[0].x_factorization is not None


def test_smooth_solutions_factorizations(table):
    sols, _ = smooth_solutions(2, 4, table=table)
    by_index = {s.index: s for s in sols}
    assert by_index[2].y_factorization.factors == [(2, 2), (3, 1)]
    assert by_index[3].y_factorization.factors == [(2, 1), (5, 1), (7, 1)]


def test_smooth_solutions_rejects_bad_d(table):
    with pytest.raises(DomainError):
        smooth_solutions(4, 4, table=table)
    with pytest.raises(DomainError):
        smooth_solutions(12, 4, table=table)
    with pytest.raises(DomainError):
        smooth_solutions(1, 4, table=table)


def test_rough_d_has_no_solutions(table):
    sols, cert = smooth_solutions(61, 4, table=table)
    assert sols == []
    assert cert.status == UNCONDITIONAL


def test_guard_examples(table):
    rep32 = CompactRep(2, ((3, 2, 1),), quad_log(3, 2, 2))
    assert grh_guard(2, rep32, 2).status == UNCONDITIONAL
    rep1712 = CompactRep(2, ((17, 12, 1),), quad_log(17, 12, 2))
    cert = grh_guard(2, rep1712, 12)
    assert cert.status == RECOMPUTED
    f61 = fundamental_solution(61)
    rep61 = CompactRep(61, ((f61.x1, f61.y1, 1),), quad_log(f61.x1, f61.y1, 61))
    z = smooth_part(f61.y1, 7)
    cert = grh_guard(61, rep61, z)
    assert cert.status == UNCONDITIONAL
    assert cert.convergents_scanned <= 15  # "first 10 or so convergents"


def test_oracle_equivalence_small(table):
    for d in squarefree_range(2, 100):
        for t in (2, 3, 4):
            sols, cert = smooth_solutions(d, t, table=table)
            got = [(s.index, s.x, s.y) for s in sols]
            assert got == _oracle_smooth_set(d, t, table), (d, t)
            assert cert.status == UNCONDITIONAL
            bound = index_bound(t, table)
            assert all(s.index <= bound for s in sols)


def test_oracle_equivalence_x_smooth(table):
    for d in squarefree_range(2, 60):
        sols, _ = smooth_solutions(d, 4, require_x_smooth=True, table=table)
        got = [(s.index, s.x, s.y) for s in sols]
        assert got == _oracle_smooth_set(d, 4, table, require_x=True), d


def _expected_base_index(multiple, unit_norm):
    claimed_norm = unit_norm**multiple
    pell_scale = 1 if claimed_norm == 1 else 2
    honest_scale = 1 if unit_norm == 1 else 2
    return multiple * pell_scale // honest_scale


def test_injected_multiples_match_honest(table):
    for d in squarefree_range(2, 80):
        honest, _ = smooth_solutions(2, 4, table=table) if False else smooth_solutions(
            d, 4, table=table
        )
        honest_set = [(s.index, s.x, s.y) for s in honest]
        r = regulator_cf(d)
        f = fundamental_solution(d)
        for m in (2, 3):
            provider = ScaledRegulatorProvider(CFRegulatorProvider(), m)
            sols, cert = smooth_solutions(d, 4, provider=provider, table=table)
            assert [(s.index, s.x, s.y) for s in sols] == honest_set, (d, m)
            base_index = _expected_base_index(m, r.unit_norm)
            if base_index > 1 and f.y1 <= cert.z_used:
                assert cert.status == RECOMPUTED, (d, m)
            if base_index == 1:
                assert cert.status == UNCONDITIONAL, (d, m)


def test_solutions_verified_mod_control_primes(table):
    sols, _ = smooth_solutions(6, 4, table=table)
    for s in sols:
        for q in (2**61 - 1, 10**9 + 7):
            r = eval_mod(s.rep, q)
            assert (r.x_res, r.y_res) == (s.x % q, s.y % q)


def test_modular_route_matches_exact_route(table):
    """Equations big enough for the residue route, small enough to check."""
    import smoothruns.pell as pell_mod

    for d in (9949, 9967, 9973, 9293):  # large-ish fundamental solutions
        if d not in squarefree_range(d, d):
            continue
        sols, cert = smooth_solutions(d, 4, table=table)
        assert [(s.index, s.x, s.y) for s in sols] == _oracle_smooth_set(d, 4, table), d
        assert cert.status == UNCONDITIONAL


def test_certification_fields(table):
    _, cert = smooth_solutions(2, 4, table=table)
    assert isinstance(cert, Certification)
    assert cert.z_used >= 2
    assert cert.convergents_scanned >= 1
