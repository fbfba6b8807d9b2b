"""Search drivers: brute-force window scans, the consecutive-pair search,
and the windowed pair-product campaign with checkpoint/resume.

The campaign is a single-producer stream of coefficients feeding a pool of
independent equation solvers; one collector inserts records in stream
order (re-verifying each), so the final record set is identical for any
worker count.  Equations are never skipped: a failure halts the campaign
with the position persisted, because one missing equation would void the
completeness claim the campaign exists to make.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import get_context
from typing import Iterable, Sequence

import numpy as np

from .. import pell
from ..arith import (
    ParameterError,
    PrimeTable,
    is_smooth,
    sieve_primes,
    window_largest_prime,
)
from .params import CursorError, SearchParams, derive_params, enumerate_coefficients
from .records import Checkpoint, CheckpointFile, RecordStore, SmoothWindowRecord

DEFAULT_CHECKPOINT_EVERY = 10_000


class EquationFailure(RuntimeError):
    """One equation could not be completed; the campaign must halt."""


# ---------------------------------------------------------------------------
# brute-force oracle / witness finder
# ---------------------------------------------------------------------------

_lpf_cache: dict[int, np.ndarray] = {}


def largest_prime_factor_sieve(limit: int) -> np.ndarray:
    """lpf[i] = largest prime factor of i for 0 <= i <= limit (lpf[0..1] = 1)."""
    if limit in _lpf_cache:
        return _lpf_cache[limit]
    for cached_limit, arr in _lpf_cache.items():
        if cached_limit >= limit:
            return arr[: limit + 1]
    if limit >= 2**31:
        raise ParameterError("sieve limit beyond int32 range")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    lpf = np.ones(limit + 1, dtype=np.int32)
    for p in np.flatnonzero(is_prime):
        lpf[p::p] = p
    _lpf_cache.clear()  # keep at most one sieve resident
    _lpf_cache[limit] = lpf
    return lpf


def brute_force_windows(k: int, max_n: int, min_len: int) -> list[SmoothWindowRecord]:
    """Every window start n <= max_n whose min_len integers are all k-smooth.

    Exhaustive by sieve; the n > k cut is left to the f(k) assembly so one
    scan can serve both as witness source and as bounded upper evidence.
    """
    if k < 1 or min_len < 1 or max_n < 1:
        raise ParameterError("need k, max_n, min_len >= 1")
    lpf = largest_prime_factor_sieve(max_n + min_len - 1)
    smooth = lpf[1 : max_n + min_len] <= k  # index i -> integer i+1
    window_ok = np.cumsum(np.concatenate(([0], smooth.astype(np.int64))))
    counts = window_ok[min_len:] - window_ok[:-min_len]
    starts = np.flatnonzero(counts == min_len) + 1  # integer value of n
    records = []
    for n in starts:
        n = int(n)
        if n > max_n:
            break
        p_max = int(lpf[n : n + min_len].max())
        records.append(
            SmoothWindowRecord(n=n, length=min_len, p_max=p_max, source="brute_force")
        )
    return records


# ---------------------------------------------------------------------------
# consecutive-pair search (length-2 windows)
# ---------------------------------------------------------------------------


def lehmer_search(
    t: int,
    table: PrimeTable | None = None,
    provider=None,
) -> list[SmoothWindowRecord]:
    """All pairs (z, z+1) with P(z(z+1)) <= p_t, via x = 2z+1.

    x^2 - 1 = 4 z (z+1) = d y^2 forces d to range over the nonempty subset
    products of the first t primes; solutions with even x fall outside the
    pair correspondence and are skipped.
    """
    if table is None:
        table = sieve_primes(300)
    if t < 1:
        raise ParameterError(f"need t >= 1, got {t}")
    p_t = table.nth_prime(t)
    primes = table.primes[:t]
    found: dict[tuple[int, int], SmoothWindowRecord] = {}
    for mask in range(1, 2**t):
        d = 1
        bits = mask
        i = 0
        while bits:
            if bits & 1:
                d *= primes[i]
            bits >>= 1
            i += 1
        if d == 1:
            continue
        solutions, _cert = pell.smooth_solutions(d, t, require_x_smooth=False,
                                                 provider=provider, table=table)
        for sol in solutions:
            if sol.x % 2 == 0:
                continue
            z = (sol.x - 1) // 2
            if z < 1:
                continue
            if not (is_smooth(z, p_t, table) and is_smooth(z + 1, p_t, table)):
                continue
            rec = SmoothWindowRecord(
                n=z,
                length=2,
                p_max=window_largest_prime(z, 2),
                source="lehmer",
                coefficient=d,
                index=sol.index,
            )
            found.setdefault(rec.key(), rec)
    return sorted(found.values())


# ---------------------------------------------------------------------------
# windowed pair-product campaign
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _worker_table(limit: int) -> PrimeTable:
    return sieve_primes(limit)


def _worker_init() -> None:
    # the collector owns interruption: workers must die quietly on pool
    # teardown instead of inheriting the CLI's signal handlers
    import signal

    signal.signal(signal.SIGINT, signal.SIG_IGN)
    signal.signal(signal.SIGTERM, signal.SIG_DFL)


def _solve_window_equation(args: tuple[int, int, int, int]) -> tuple[str, object]:
    """Pool worker: one coefficient -> window hits (picklable payloads only)."""
    d, m, t, table_limit = args
    try:
        table = _worker_table(table_limit)
        p_t = table.nth_prime(t)
        pair_starts = derive_params(m, t, table).pair_starts
        solutions, cert = pell.smooth_solutions(d, t, require_x_smooth=True, table=table)
        hits = []
        for sol in solutions:
            for i in pair_starts:
                n = sol.x - 1 - i
                if n < 1:
                    continue
                if all(is_smooth(n + j, p_t, table) for j in range(m)):
                    hits.append((n, window_largest_prime(n, m), sol.index))
        return "ok", (hits, cert.status)
    except Exception as exc:  # noqa: BLE001 - marshalled to the collector
        return "err", f"{type(exc).__name__}: {exc}"


class _MemStore:
    """Store-shaped sink for campaigns that do not persist."""

    def __init__(self):
        self._by_key: dict[tuple[int, int], SmoothWindowRecord] = {}

    def insert(self, record: SmoothWindowRecord) -> bool:
        if record.key() in self._by_key:
            return False
        record.verify()
        self._by_key[record.key()] = record
        return True

    def flush(self) -> None:
        pass

    def close(self) -> None:
        pass

    def records(self) -> list[SmoothWindowRecord]:
        return sorted(self._by_key.values())

    def __len__(self) -> int:
        return len(self._by_key)


@dataclass
class CampaignResult:
    m: int
    t: int
    equation_count: int
    position: int
    completed: bool
    new_records: int
    records: list[SmoothWindowRecord]
    elapsed: float
    guard_statuses: dict[str, int]
    halted: str | None = None


def run_campaign(
    m: int,
    t: int,
    store_path: str | None = None,
    checkpoint_path: str | None = None,
    *,
    workers: int = 1,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    max_equations: int | None = None,
    table: PrimeTable | None = None,
    stop_event=None,
) -> CampaignResult:
    """Drive the windowed search over all M coefficients, resumably.

    Records are flushed and a cursor line appended every ``checkpoint_every``
    equations, on stop, and at the end; rerunning with the same paths
    resumes after the last completed equation and never duplicates records.
    """
    if table is None:
        table = sieve_primes(2000)
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if checkpoint_every < 1:
        raise ParameterError("checkpoint_every must be >= 1")
    params = derive_params(m, t, table)
    total = params.equation_count

    store = RecordStore(store_path) if store_path else _MemStore()
    ckpt = CheckpointFile(checkpoint_path) if checkpoint_path else None
    position = 0
    if ckpt is not None and ckpt.last is not None:
        if (ckpt.last.m, ckpt.last.t) != (m, t):
            store.close()
            ckpt.close()
            raise CursorError(
                f"checkpoint belongs to campaign ({ckpt.last.m}, {ckpt.last.t}), "
                f"not ({m}, {t})"
            )
        position = ckpt.last.position
        if position > total:
            store.close()
            ckpt.close()
            raise CursorError(f"checkpoint position {position} beyond {total}")

    budget = max_equations if max_equations is not None else total - position
    started = time.time()
    new_records = 0
    guard_statuses: dict[str, int] = {}
    halted: str | None = None

    pool = None
    try:
        if workers > 1 and position < total and budget > 0:
            pool = get_context("fork").Pool(workers, initializer=_worker_init)
        stream = enumerate_coefficients(params, position)
        interrupted = False
        while position < total and budget > 0 and halted is None:
            if stop_event is not None and stop_event.is_set():
                break
            batch_size = min(checkpoint_every, total - position, budget)
            batch = []
            for _ in range(batch_size):
                d, _pos = next(stream)
                batch.append((d, m, t, table.limit))
            if pool is not None:
                results: Iterable = pool.imap(_solve_window_equation, batch, chunksize=8)
            else:
                results = map(_solve_window_equation, batch)
            done_in_batch = 0
            try:
                for (d, _m, _t, _l), (status, payload) in zip(batch, results):
                    if status == "err":
                        halted = (
                            f"equation D={d} at position {position + done_in_batch}: {payload}"
                        )
                        break
                    hits, guard = payload
                    guard_statuses[guard] = guard_statuses.get(guard, 0) + 1
                    for n, p_max, index in hits:
                        rec = SmoothWindowRecord(
                            n=n,
                            length=m,
                            p_max=p_max,
                            source="bauer_bennett",
                            coefficient=d,
                            index=index,
                        )
                        if store.insert(rec):
                            new_records += 1
                    done_in_batch += 1
                    if stop_event is not None and stop_event.is_set():
                        break
            except KeyboardInterrupt:
                # signal: keep the records already inserted (dedup makes the
                # rerun byte-identical), checkpoint the completed prefix
                halted = "interrupted by signal"
                interrupted = True
            position += done_in_batch
            budget -= done_in_batch
            store.flush()
            if ckpt is not None:
                ckpt.write(Checkpoint(m=m, t=t, position=position, completed=position))
            if interrupted:
                break
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
        store.flush()
        records = store.records()
        store.close()
        if ckpt is not None:
            ckpt.close()

    return CampaignResult(
        m=m,
        t=t,
        equation_count=total,
        position=position,
        completed=(position == total and halted is None),
        new_records=new_records,
        records=records,
        elapsed=time.time() - started,
        guard_statuses=guard_statuses,
        halted=halted,
    )


def bauer_bennett_search(
    m: int,
    t: int,
    *,
    workers: int = 1,
    table: PrimeTable | None = None,
) -> list[SmoothWindowRecord]:
    """Complete in-memory campaign; returns the full record set."""
    result = run_campaign(m, t, workers=workers, table=table)
    if not result.completed:
        raise EquationFailure(result.halted or "campaign incomplete")
    return result.records
