"""Arithmetic kernel: Moebius and Liouville tables, Mertens sums, twisted sums.

All tables are numpy arrays of length ``limit + 1`` indexed directly by n;
slot 0 is padding and holds 0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import isqrt
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidArgument

DEFAULT_CHECKPOINTS = (10**3, 10**4, 10**5, 10**6)

CACHE_MAGIC = b"MOBS"
CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQ")


@dataclass(frozen=True)
class ArithmeticTable:
    """mu, lambda and Mertens sums for 1..limit (index 0 unused)."""

    limit: int
    mobius: np.ndarray  # int8
    liouville: np.ndarray  # int8
    mertens: np.ndarray  # int64, prefix sums of mobius

    def __post_init__(self):
        for arr in (self.mobius, self.liouville, self.mertens):
            arr.setflags(write=False)

    def weights(self, kind: str) -> np.ndarray:
        """Return the weight sequence w(0..limit) named by ``kind``."""
        if kind == "mobius":
            return self.mobius
        if kind == "liouville":
            return self.liouville
        if kind == "none":
            w = np.ones(self.limit + 1, dtype=np.int8)
            w[0] = 0
            return w
        raise InvalidArgument(f"unknown weight {kind!r}")


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            tail = spf[p * p :: p]
            tail[tail == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def sieve(limit: int) -> ArithmeticTable:
    """Tabulate mu, lambda and M(n) for n <= limit.

    The smallest-prime-factor table is filled first; then mu(n) and Omega(n)
    follow from n // spf(n) in one linear pass.  Because n // spf(n) <= n / 2,
    the pass is vectorized over dyadic blocks [lo, 2 lo), each depending
    only on earlier blocks.
    """
    if not isinstance(limit, (int, np.integer)) or limit < 1:
        raise InvalidArgument(f"limit must be a positive integer, got {limit!r}")
    limit = int(limit)
    spf = smallest_prime_factors(limit)
    mu = np.zeros(limit + 1, dtype=np.int8)
    omega = np.zeros(limit + 1, dtype=np.int8)
    mu[1] = 1
    lo = 2
    while lo <= limit:
        hi = min(2 * lo, limit + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        p = spf[lo:hi]
        m = n // p
        mu[lo:hi] = np.where(spf[m] == p, 0, -mu[m])
        omega[lo:hi] = omega[m] + 1
        lo = hi
    del spf
    liouville = np.where(omega % 2 == 0, 1, -1).astype(np.int8)
    liouville[0] = 0
    mertens = np.cumsum(mu, dtype=np.int64)
    return ArithmeticTable(limit, mu, liouville, mertens)


def segmented_mobius(lo: int, hi: int) -> np.ndarray:
    """mu(n) for lo <= n < hi by sieving the segment with primes <= sqrt(hi).

    Independent of :func:`sieve`: each n keeps a running product of the
    primes found; a leftover cofactor > 1 is one more prime.
    """
    if lo < 1 or hi <= lo:
        raise InvalidArgument("need 1 <= lo < hi")
    n = np.arange(lo, hi, dtype=np.int64)
    mu = np.ones(hi - lo, dtype=np.int8)
    rem = n.copy()
    bound = isqrt(hi - 1)
    is_p = np.ones(bound + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, isqrt(bound) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    for p in np.flatnonzero(is_p):
        p = int(p)
        start = (-lo) % p
        mu[start::p] *= -1
        rem[start::p] //= p
        sq = p * p
        start_sq = (-lo) % sq
        mu[start_sq::sq] = 0
    mu[rem > 1] *= -1
    return mu


def segmented_mertens(limit: int, block: int = 1 << 16) -> int:
    """M(limit) accumulated block by block with :func:`segmented_mobius`."""
    total = 0
    for lo in range(1, limit + 1, block):
        total += int(segmented_mobius(lo, min(lo + block, limit + 1)).sum(dtype=np.int64))
    return total


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius_trial(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def liouville_trial(n: int) -> int:
    return -1 if sum(factorize(n).values()) % 2 else 1


def squarefree_density(limit: int, table: ArithmeticTable | None = None) -> float:
    """Fraction of n <= limit with mu(n) != 0."""
    if table is None or table.limit < limit:
        table = sieve(limit)
    return int(np.count_nonzero(table.mobius[1 : limit + 1])) / limit


def squarefree_count(limit: int) -> int:
    """#{n <= limit squarefree} via inclusion-exclusion over d^2 <= limit."""
    return sum(mobius_trial(d) * (limit // (d * d)) for d in range(1, isqrt(limit) + 1))


@dataclass(frozen=True)
class TwistedScan:
    checkpoints: tuple[int, ...]
    suprema: tuple[float, ...]
    argmax_t: tuple[float, ...]
    grid_size: int
    slope: float | None  # fitted d log(sup) / d log(N)

    @property
    def supremum(self) -> float:
        return self.suprema[-1]


def twisted_sum_scan(
    limit: int,
    grid_size: int,
    checkpoints: Sequence[int] | None = None,
    table: ArithmeticTable | None = None,
) -> TwistedScan:
    """max_k |sum_{n<=N} mu(n) e(n k / G)| at each checkpoint N.

    The prefix of mu is folded modulo G and one length-G FFT evaluates the
    whole grid at once.
    """
    if grid_size < 2:
        raise InvalidArgument("grid_size must be >= 2")
    if checkpoints is None:
        checkpoints = [c for c in DEFAULT_CHECKPOINTS if c <= limit] or [limit]
    checkpoints = [int(c) for c in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise InvalidArgument("checkpoints must be strictly ascending")
    if checkpoints[0] < 1 or checkpoints[-1] > limit:
        raise InvalidArgument("checkpoints must lie in [1, limit]")
    if table is None or table.limit < checkpoints[-1]:
        table = sieve(checkpoints[-1])
    mu = table.mobius.astype(np.float64)
    folded = np.zeros(grid_size, dtype=np.float64)
    done = 0
    sups, args = [], []
    for N in checkpoints:
        idx = np.arange(done + 1, N + 1, dtype=np.int64)
        folded += np.bincount(idx % grid_size, weights=mu[done + 1 : N + 1], minlength=grid_size)
        done = N
        vals = np.abs(np.fft.ifft(folded)) * grid_size
        k = int(np.argmax(vals))
        sups.append(float(vals[k]))
        args.append(k / grid_size)
    slope = None
    if len(checkpoints) >= 2 and all(s > 0 for s in sups):
        slope = float(np.polyfit(np.log(checkpoints), np.log(sups), 1)[0])
    return TwistedScan(tuple(checkpoints), tuple(sups), tuple(args), grid_size, slope)


def save_mobius_cache(path: str | Path, table: ArithmeticTable) -> None:
    """Write mu(1..limit) as signed bytes behind a little-endian header."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit))
        fh.write(table.mobius[1:].astype("<i1").tobytes())


def load_mobius_cache(path: str | Path) -> ArithmeticTable:
    """Rebuild a table from a cache file; lambda is recomputed (not stored)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _CACHE_HEADER.size:
        raise InvalidArgument("truncated sieve cache")
    magic, version, limit = _CACHE_HEADER.unpack_from(raw)
    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        raise InvalidArgument(f"not a version-{CACHE_VERSION} MOBS cache")
    body = np.frombuffer(raw, dtype="<i1", offset=_CACHE_HEADER.size)
    if body.size != limit:
        raise InvalidArgument(f"cache declares {limit} entries, holds {body.size}")
    mu = np.zeros(limit + 1, dtype=np.int8)
    mu[1:] = body
    lam = sieve(limit).liouville
    return ArithmeticTable(limit, mu, lam.copy(), np.cumsum(mu, dtype=np.int64))
