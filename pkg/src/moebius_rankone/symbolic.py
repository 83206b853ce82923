"""Symbolic rank-one systems: building blocks, word statistics, cylinders.

Blocks follow ``W_0 = "0"`` and
``W_{n+1} = W_n 1^{s(n,0)} W_n 1^{s(n,1)} ... W_n 1^{s(n,p_n-1)}``.
Heights and symbol counts are exact Python integers at every stage; the
words themselves are materialized only while they fit under a length cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate, islice
from math import isqrt, prod
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import DegenerateCylinder, InvalidArgument, InvalidParameters

DEFAULT_LENGTH_CAP = 10**7

CuttingRule = Callable[[int, int], int]  # (n, h_n) -> p_n
SpacerRule = Callable[[int, int, int], Sequence[int]]  # (n, p_n, h_n) -> s(n, .)


@dataclass(frozen=True)
class Stage:
    """Cutting data of stage n together with the height h_n of W_n."""

    n: int
    p: int
    spacers: tuple[int, ...]
    height: int

    @property
    def offsets(self) -> list[int]:
        """Start positions of the p_n copies of W_n inside W_{n+1}."""
        partial = [0, *accumulate(self.spacers[:-1])]
        return [j * self.height + partial[j] for j in range(self.p)]

    @property
    def next_height(self) -> int:
        return self.p * self.height + sum(self.spacers)


@dataclass(frozen=True)
class RankOneParams:
    """Cutting sequence p_n and spacer table s(n, i) of a rank-one system.

    Both are rules evaluated lazily because growth families such as
    ``s(n, 1) = h_n`` depend on the current height.
    """

    cutting: CuttingRule
    spacers: SpacerRule
    name: str = "rank-one"

    @classmethod
    def constant(cls, p: int, spacers: Sequence[int], name: str = "rank-one") -> "RankOneParams":
        row = tuple(int(s) for s in spacers)
        return cls(lambda n, h: p, lambda n, p_n, h: row, name)

    @classmethod
    def from_table(
        cls, cuttings: Sequence[int], spacer_rows: Sequence[Sequence[int]], name: str = "rank-one"
    ) -> "RankOneParams":
        """Explicit finite tables; querying past their end is an error."""
        cuttings = tuple(int(p) for p in cuttings)
        rows = tuple(tuple(int(s) for s in row) for row in spacer_rows)

        def cut(n, h):
            if n >= len(cuttings):
                raise InvalidParameters("cutting table exhausted", n)
            return cuttings[n]

        def spc(n, p, h):
            if n >= len(rows):
                raise InvalidParameters("spacer table exhausted", n)
            return rows[n]

        return cls(cut, spc, name)

    def stage(self, n: int, height: int) -> Stage:
        p = self.cutting(n, height)
        if not isinstance(p, (int, np.integer)) or p < 2:
            raise InvalidParameters(f"cutting parameter p_n={p!r} must be an integer >= 2", n)
        row = tuple(int(s) for s in self.spacers(n, int(p), height))
        if len(row) != p:
            raise InvalidParameters(f"expected {p} spacers, got {len(row)}", n)
        if any(s < 0 for s in row):
            raise InvalidParameters(f"negative spacer in {row}", n)
        return Stage(n, int(p), row, height)

    def stages(self) -> Iterator[Stage]:
        """Yield Stage 0, 1, 2, ... indefinitely."""
        n, h = 0, 1
        while True:
            st = self.stage(n, h)
            yield st
            n, h = n + 1, st.next_height

    def stage_list(self, count: int) -> list[Stage]:
        return list(islice(self.stages(), count))


def chacon() -> RankOneParams:
    """p_n = 3, one spacer over the middle column."""
    return RankOneParams.constant(3, (0, 1, 0), name="chacon")


def tripling_family() -> RankOneParams:
    """p_n = 2, s(n, .) = (0, h_n): h_n = 3^n with only 2^n zeros (infinite measure)."""
    return RankOneParams(lambda n, h: 2, lambda n, p, h: (0, h), name="tripling")


def odometer(p: int = 2) -> RankOneParams:
    """No spacers at all; W_n is a run of zeros."""
    return RankOneParams.constant(p, (0,) * p, name=f"odometer-{p}")


@dataclass(frozen=True)
class BlockStats:
    stage: int
    height: int
    zeros: int
    ones: int
    word: str | None = field(default=None, repr=False)


def build_blocks(
    params: RankOneParams, stages: int, length_cap: int = DEFAULT_LENGTH_CAP
) -> list[BlockStats]:
    """Statistics of W_0 .. W_stages; words kept while h_n <= length_cap."""
    if stages < 1:
        raise InvalidArgument("stages must be >= 1")
    out = []
    word: str | None = "0"
    zeros = 1
    for st in islice(params.stages(), stages + 1):
        if word is not None and len(word) > length_cap:
            word = None
        out.append(BlockStats(st.n, st.height, zeros, st.height - zeros, word))
        if st.n == stages:
            break
        if word is not None and st.next_height <= length_cap:
            word = "".join(word + "1" * s for s in st.spacers)
        else:
            word = None
        zeros *= st.p
    return out


def limit_prefix(params: RankOneParams, length: int, length_cap: int = DEFAULT_LENGTH_CAP) -> str:
    """First ``length`` symbols of W_infinity (every W_n is a prefix of W_{n+1})."""
    if length > length_cap:
        raise InvalidArgument(f"prefix length {length} exceeds length cap {length_cap}")
    word = "0"
    for st in params.stages():
        if len(word) >= length:
            return word[:length]
        word = "".join(word + "1" * s for s in st.spacers)
    raise AssertionError("unreachable")


def _check_word(v: str) -> None:
    if not v:
        raise InvalidArgument("word must be nonempty")
    if set(v) - {"0", "1"}:
        raise InvalidArgument(f"word {v!r} has symbols outside {{0, 1}}")


def as_bits(word: str) -> np.ndarray:
    return np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")


def occurrence_positions(v: str, w: str | np.ndarray) -> np.ndarray:
    """All (overlapping) start positions of v in w."""
    _check_word(v)
    a = as_bits(w) if isinstance(w, str) else w
    L = len(v)
    if a.size < L:
        return np.zeros(0, dtype=np.int64)
    bits = as_bits(v)
    cand = np.flatnonzero(a[: a.size - L + 1] == bits[0])
    for j in range(1, L):
        cand = cand[a[cand + j] == bits[j]]
        if cand.size == 0:
            break
    return cand


def occurrence_count(v: str, w: str) -> int:
    """Number of overlapping occurrences of v in w."""
    _check_word(v)
    if len(v) == 1:
        return w.count(v)
    return int(occurrence_positions(v, w).size)


@dataclass(frozen=True)
class _Tally:
    """Occurrence count of a fixed word v in some word u, plus u's borders.

    head/tail are the first/last len(v)-1 symbols of u (all of u if shorter),
    which is all that concatenation needs: an occurrence straddling a seam
    lies inside tail(a) + head(b).
    """

    length: int
    count: int
    head: str
    tail: str


class _Counter:
    def __init__(self, v: str):
        self.v = v
        self.k = len(v) - 1

    def word(self, u: str) -> _Tally:
        k = self.k
        return _Tally(len(u), occurrence_count(self.v, u), u[:k], u[len(u) - k :] if k else "")

    def ones(self, s: int) -> _Tally:
        k = self.k
        run = "1" * min(s, k)
        n = s - k if (s > k and self.v.count("1") == len(self.v)) else 0
        return _Tally(s, n, run, run)

    def join(self, a: _Tally, b: _Tally) -> _Tally:
        k = self.k
        if k == 0:
            return _Tally(a.length + b.length, a.count + b.count, "", "")
        seam = occurrence_count(self.v, a.tail + b.head) if a.tail and b.head else 0
        return _Tally(
            a.length + b.length,
            a.count + b.count + seam,
            (a.head + b.head)[:k] if a.length < k else a.head,
            (a.tail + b.tail)[-k:] if b.length < k else b.tail,
        )


def occurrence_counts(params: RankOneParams, v: str, stages: int) -> list[int]:
    """Exact fr(v, W_n) for n = 0..stages, without materializing W_n."""
    _check_word(v)
    c = _Counter(v)
    t = c.word("0")
    out = [t.count]
    for st in islice(params.stages(), stages):
        nxt = None
        for s in st.spacers:
            piece = c.join(t, c.ones(s)) if s else t
            nxt = piece if nxt is None else c.join(nxt, piece)
        t = nxt
        out.append(t.count)
    return out


@dataclass(frozen=True)
class CylinderSeries:
    word: str
    ratios: tuple[Fraction, ...]  # fr(v, W_n) / fr(0, W_n), n = 0..K

    @property
    def estimate(self) -> Fraction:
        return self.ratios[-1]


def cylinder_measure(params: RankOneParams, v: str, stages: int) -> CylinderSeries:
    """Ratios fr(v, W_n) / fr(0, W_n) whose limit is mu(O_{v,0})."""
    _check_word(v)
    counts = occurrence_counts(params, v, stages)
    zeros = [1]
    for st in islice(params.stages(), stages):
        zeros.append(zeros[-1] * st.p)
    return CylinderSeries(v, tuple(Fraction(c, z) for c, z in zip(counts, zeros)))


@dataclass(frozen=True)
class InfiniteVerdict:
    curve: tuple[Fraction, ...]
    verdict: str  # "finite-suspected" | "infinite-suspected"
    threshold: float


def is_infinite(params: RankOneParams, stages: int, threshold: float = 10.0) -> InfiniteVerdict:
    """Numerical diagnostic for mu(O_{1,0}) = infinity; never a proof."""
    if stages < 3:
        raise InvalidArgument("need at least 3 stages")
    curve = cylinder_measure(params, "1", stages).ratios
    last = curve[-3:]
    rising = last[0] < last[1] < last[2]
    verdict = "infinite-suspected" if curve[-1] > threshold and rising else "finite-suspected"
    return InfiniteVerdict(curve, verdict, threshold)


@dataclass(frozen=True)
class PeriodicityReport:
    status: str  # "aperiodicity-witnessed" | "periodic-up-to-depth"
    depth: int
    witnesses: dict[int, int]  # q -> first i with W[i] != W[i+q]
    periods: tuple[int, ...]  # q <= max_period with no violation before depth


def periodicity_report(
    params: RankOneParams, depth: int, max_period: int, length_cap: int = DEFAULT_LENGTH_CAP
) -> PeriodicityReport:
    """Test every period q <= max_period on the first ``depth`` symbols of W_infinity."""
    if depth <= max_period:
        raise InvalidArgument("depth must exceed max_period")
    if max_period < 1:
        raise InvalidArgument("max_period must be >= 1")
    a = as_bits(limit_prefix(params, depth, length_cap))
    witnesses, periods = {}, []
    for q in range(1, max_period + 1):
        bad = np.flatnonzero(a[: depth - q] != a[q:depth])
        if bad.size:
            witnesses[q] = int(bad[0])
        else:
            periods.append(q)
    status = "periodic-up-to-depth" if periods else "aperiodicity-witnessed"
    return PeriodicityReport(status, depth, witnesses, tuple(periods))


def stage_at(params: RankOneParams, n: int) -> Stage:
    if n < 0:
        raise InvalidArgument("stage index must be >= 0")
    return next(islice(params.stages(), n, None))


def occurrence_offsets(params: RankOneParams, n: int) -> list[int]:
    """j h_n + (s(n,0) + ... + s(n,j-1)) for j < p_n."""
    return stage_at(params, n).offsets


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, isqrt(q) + 1))


def prime_condition(params: RankOneParams, n: int, q: int) -> bool:
    """True iff q does not divide (p_n - 1) h_n + sum_j s(n, j)."""
    if q < 2 or not _is_prime(q):
        raise InvalidArgument(f"q={q} is not a prime")
    st = stage_at(params, n)
    return ((st.p - 1) * st.height + sum(st.spacers)) % q != 0


@dataclass(frozen=True)
class NormalizedCylinder:
    stage: int
    word: str  # the cylinder [B_n]: W_n occurring at position 0
    measure: Fraction  # estimate of mu([B_n])
    constant: float  # 1 / sqrt(measure)


def normalized_cylinder(
    params: RankOneParams,
    n: int,
    estimate_stage: int | None = None,
    length_cap: int = DEFAULT_LENGTH_CAP,
) -> NormalizedCylinder:
    """The function f_n = 1_{[B_n]} / sqrt(mu([B_n])), as (cylinder, constant).

    mu([B_n]) is the ratio fr(W_n, W_m) / fr(0, W_m) at m = estimate_stage
    (default n + 5).
    """
    blocks = build_blocks(params, max(n, 1), length_cap)
    word = blocks[n].word
    if word is None:
        raise InvalidArgument(f"W_{n} exceeds the length cap {length_cap}")
    m = n + 5 if estimate_stage is None else estimate_stage
    measure = cylinder_measure(params, word, m).estimate
    if measure == 0:
        raise DegenerateCylinder(f"estimated measure of [W_{n}] is zero at stage {m}")
    return NormalizedCylinder(n, word, measure, float(measure) ** -0.5)


def zeros_product(params: RankOneParams, n: int) -> int:
    """prod_{k<n} p_k, the number of zeros in W_n."""
    return prod(st.p for st in islice(params.stages(), n))
