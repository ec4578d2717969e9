"""Search for eps with gcd(R_n(eps), n+1) = 1 over a range of even dimensions.

R_n(eps) is never formed. gcd(R, n+1) = 1 exactly when no prime p dividing
n+1 divides R, and R mod p only needs C(n-1, eps) mod p, which Lucas gives
from base-p digits. Counting over all eps is vectorized with numpy.
"""
from __future__ import annotations

import bisect
import csv
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import HypothesisError
from .numtheory import TRIAL_LIMIT, factorize, is_probable_prime, prime_power, small_primes

log = logging.getLogger(__name__)

CSV_FIELDS = ("n", "witness_eps", "prime_witness_eps", "eps_count", "elapsed_ms")
MODES = ("witness_only", "full_count")


def qualifies(n: int) -> bool:
    """Even n >= 4 whose successor is not a prime power."""
    return n >= 4 and n % 2 == 0 and prime_power(n + 1) is None


def _require(n: int) -> None:
    if not qualifies(n):
        raise HypothesisError(f"n = {n} must be even with n+1 not a prime power")


@lru_cache(maxsize=128)
def _factorial_tables(p: int) -> tuple[list[int], list[int]]:
    """k! mod p and (k!)^-1 mod p for 0 <= k < p."""
    fact = [1] * p
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    inv = [1] * p
    inv[p - 1] = pow(fact[p - 1], -1, p)
    for i in range(p - 1, 0, -1):
        inv[i - 1] = inv[i] * i % p
    return fact, inv


def lucas_binomial(N: int, K: int, p: int) -> int:
    """C(N, K) mod p from base-p digits, using cached factorial tables."""
    fact, inv = _factorial_tables(p)
    res = 1
    while K:
        n_i, k_i = N % p, K % p
        if k_i > n_i:
            return 0
        res = res * fact[n_i] * inv[k_i] * inv[n_i - k_i] % p
        N //= p
        K //= p
    return res


def is_witness(n: int, eps: int) -> bool:
    """gcd(R_n(eps), n+1) == 1, decided prime by prime."""
    sign = 1 if eps % 2 == 0 else -1
    for p in factorize(n + 1).primes:
        if (n - eps + sign * lucas_binomial(n - 1, eps, p)) % p == 0:
            return False
    return True


def _prime_candidates(n: int) -> list[int]:
    big = factorize(n + 1).primes[-1]
    if n > TRIAL_LIMIT:
        return [e for e in range(big + 1, n) if is_probable_prime(e)]
    primes = small_primes()
    return list(primes[bisect.bisect_right(primes, big) : bisect.bisect_left(primes, n)])


def eps_search_order(n: int) -> Iterator[int]:
    """Primes above the largest prime factor of n+1 first, then every other eps ascending."""
    primes = _prime_candidates(n)
    yield from primes
    skip = set(primes)
    yield from (e for e in range(2, n) if e not in skip)


def find_epsilon(n: int) -> int | None:
    """Smallest eps in [2, n-1] with gcd(R_n(eps), n+1) = 1, or None."""
    _require(n)
    return next((e for e in range(2, n) if is_witness(n, e)), None)


def prime_witness(n: int) -> int | None:
    """Smallest prime eps above the largest prime factor of n+1 that is a witness."""
    _require(n)
    return next((e for e in _prime_candidates(n) if is_witness(n, e)), None)


def binomial_mod_prime_array(N: int, ks: np.ndarray, p: int) -> np.ndarray:
    """C(N, k) mod p for every k in ``ks`` (Lucas, vectorized over k)."""
    fact, inv = (np.array(t, dtype=np.int64) for t in _factorial_tables(p))
    res = np.ones(ks.shape, dtype=np.int64)
    k = ks.astype(np.int64).copy()
    while N or k.any():
        n_i = N % p
        k_i = k % p
        ok = k_i <= n_i
        kk = np.where(ok, k_i, 0)
        term = fact[n_i] * inv[kk] % p * inv[n_i - kk] % p
        res = np.where(ok, res * term % p, 0)
        N //= p
        k //= p
    return res


def witness_mask(n: int) -> np.ndarray:
    """Boolean mask over eps = 2..n-1 marking the witnesses."""
    eps = np.arange(2, n, dtype=np.int64)
    sign = np.where(eps % 2 == 0, 1, -1)
    mask = np.ones(eps.shape, dtype=bool)
    for p in factorize(n + 1).primes:
        c = binomial_mod_prime_array(n - 1, eps, p)
        mask &= (n - eps + sign * c) % p != 0
    return mask


def count_epsilons(n: int) -> int:
    _require(n)
    return int(witness_mask(n).sum())


# --- sweep -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    n: int
    witness_eps: int | None
    prime_witness_eps: int | None
    eps_count: int | None
    elapsed_ms: float | None = None

    def csv_row(self, timing: bool = True) -> list[str]:
        def s(x):
            return "" if x is None else str(x)

        el = "" if (self.elapsed_ms is None or not timing) else f"{self.elapsed_ms:.3f}"
        return [str(self.n), s(self.witness_eps), s(self.prime_witness_eps), s(self.eps_count), el]


def sweep_one(n: int, mode: str = "witness_only") -> SweepRecord:
    t0 = time.perf_counter()
    if mode == "full_count":
        mask = witness_mask(n)
        hits = np.flatnonzero(mask)
        witness = int(hits[0]) + 2 if hits.size else None
        count = int(hits.size)
    else:
        witness, count = find_epsilon(n), None
    pw = prime_witness(n)
    return SweepRecord(n, witness, pw, count, (time.perf_counter() - t0) * 1e3)


def _sweep_chunk(args: tuple[list[int], str]) -> list[SweepRecord]:
    ns, mode = args
    return [sweep_one(n, mode) for n in ns]


def domain(max_n: int, min_n: int = 2) -> list[int]:
    return [n for n in range(max(min_n, 4), max_n + 1) if qualifies(n)]


def _load_checkpoint(path: str, mode: str) -> list[SweepRecord]:
    if not os.path.exists(path):
        return []
    records = []
    with open(path) as fh:
        header = json.loads(fh.readline() or "{}")
        if header.get("mode") != mode:
            log.warning("checkpoint %s is for mode %r, ignoring it", path, header.get("mode"))
            return []
        for line in fh:
            line = line.strip()
            if line:
                records.append(SweepRecord(**json.loads(line)))
    return records


class _Checkpoint:
    """Append-only JSON-lines progress file: a header line, then one record per line."""

    def __init__(self, path: str | None, mode: str, every: int, kept: list[SweepRecord]):
        self.path, self.every = path, max(1, every)
        self.buffer: list[SweepRecord] = []
        self.last_flush_n = kept[-1].n if kept else 0
        if path:
            with open(path, "w") as fh:
                fh.write(json.dumps({"mode": mode}) + "\n")
                for r in kept:
                    fh.write(json.dumps(asdict(r)) + "\n")

    def add(self, rec: SweepRecord) -> None:
        if not self.path:
            return
        self.buffer.append(rec)
        if rec.n - self.last_flush_n >= self.every:
            self.flush()
            self.last_flush_n = rec.n

    def flush(self) -> None:
        if self.path and self.buffer:
            with open(self.path, "a") as fh:
                for r in self.buffer:
                    fh.write(json.dumps(asdict(r)) + "\n")
            self.buffer.clear()


@dataclass
class SweepSummary:
    min_n: int
    max_n: int
    mode: str
    records: int
    counterexample: bool
    counterexamples: list[int]
    heuristic_failures: list[int]
    runtime_s: float
    jobs: int
    resumed: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def sweep(
    max_n: int,
    mode: str = "witness_only",
    jobs: int = 1,
    *,
    min_n: int = 2,
    checkpoint: str | None = None,
    checkpoint_every: int = 1000,
    chunk: int = 64,
) -> tuple[list[SweepRecord], SweepSummary]:
    """One record per qualifying even n in [min_n, max_n], in increasing n.

    Record content other than ``elapsed_ms`` does not depend on ``jobs``.
    With ``checkpoint`` set, finished records are appended to that file as
    the sweep advances, and a rerun continues after the last saved n.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if max_n < 2:
        raise ValueError(f"max_n must be >= 2, got {max_n}")
    t0 = time.perf_counter()
    ns = domain(max_n, min_n)
    done: list[SweepRecord] = []
    if checkpoint:
        wanted = set(ns)
        done = [r for r in _load_checkpoint(checkpoint, mode) if r.n in wanted]
        # keep only a contiguous prefix of the domain
        prefix = 0
        while prefix < len(done) and done[prefix].n == ns[prefix]:
            prefix += 1
        done = done[:prefix]
    resumed = len(done)
    todo = ns[resumed:]
    ck = _Checkpoint(checkpoint, mode, checkpoint_every, done)

    chunks = [(todo[i : i + chunk], mode) for i in range(0, len(todo), chunk)]
    records = list(done)
    if jobs <= 1:
        results: Iterable[list[SweepRecord]] = map(_sweep_chunk, chunks)
        for batch in results:
            for r in batch:
                records.append(r)
                ck.add(r)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for batch in pool.map(_sweep_chunk, chunks):
                for r in batch:
                    records.append(r)
                    ck.add(r)
    ck.flush()

    missing = [r.n for r in records if r.witness_eps is None]
    heur = [r.n for r in records if r.prime_witness_eps is None]
    summary = SweepSummary(
        min_n=min_n,
        max_n=max_n,
        mode=mode,
        records=len(records),
        counterexample=bool(missing),
        counterexamples=missing,
        heuristic_failures=heur,
        runtime_s=round(time.perf_counter() - t0, 3),
        jobs=jobs,
        resumed=resumed,
    )
    return records, summary


def records_to_csv(records: Iterable[SweepRecord], timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(r.csv_row(timing))
    return buf.getvalue()


def records_from_csv(text: str) -> list[SweepRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        def opt(key, conv=int):
            v = row[key]
            return conv(v) if v != "" else None

        out.append(SweepRecord(int(row["n"]), opt("witness_eps"), opt("prime_witness_eps"), opt("eps_count"), opt("elapsed_ms", float)))
    return out
