"""Orbit models and (weighted) ergodic averages along a single orbit.

Every average here is a running sum over n = 1..N of ``w(n) f(T^n x)``,
read off at caller-supplied checkpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt, pi
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument, OrbitError, UndefinedRatio
from .numtheory import ArithmeticTable, sieve
from .symbolic import DEFAULT_LENGTH_CAP, RankOneParams, limit_prefix, occurrence_positions

WEIGHTS = ("mobius", "liouville", "none")
BOOLE_ZERO_GUARD = 1e-12


@lru_cache(maxsize=4)
def _cached_sieve(limit: int) -> ArithmeticTable:
    return sieve(limit)


def arithmetic_table(limit: int, table: ArithmeticTable | None = None) -> ArithmeticTable:
    if table is not None and table.limit >= limit:
        return table
    # round up to a power of two so nearby requests share one table
    return _cached_sieve(max(1024, 1 << (limit - 1).bit_length()))


# --- orbit models -----------------------------------------------------------


@dataclass(frozen=True)
class RankOneSubshift:
    """Shift on the rank-one subshift, started at the limit word or at 1^Z.

    ``point="canonical"`` reads W_infinity at coordinates 0, 1, 2, ...;
    ``point="ones"`` is the fixed point carrying the atomic invariant measure.
    """

    params: RankOneParams
    point: str = "canonical"
    length_cap: int = DEFAULT_LENGTH_CAP

    def __post_init__(self):
        if self.point not in ("canonical", "ones"):
            raise InvalidArgument(f"unknown base point {self.point!r}")

    @property
    def label(self):
        return f"rank-one[{self.params.name}]@{self.point}"


@dataclass(frozen=True)
class IntegerShift:
    """n -> n + 1 on Z, started at ``start``."""

    start: int = 0

    @property
    def label(self):
        return f"integer-shift@{self.start}"


@dataclass(frozen=True)
class BooleMap:
    """x -> x - 1/x on R minus {0}, iterated in double precision."""

    x0: float

    def __post_init__(self):
        if self.x0 == 0:
            raise InvalidArgument("Boole orbit cannot start at 0")

    @property
    def label(self):
        return f"boole@{self.x0!r}"

    def orbit(self, N: int) -> np.ndarray:
        """x_1 .. x_N, raising OrbitError when an iterate is too close to 0."""
        out = np.empty(N, dtype=np.float64)
        x = float(self.x0)
        for n in range(1, N + 1):
            if abs(x) < BOOLE_ZERO_GUARD:
                raise OrbitError("Boole iterate hit 0", n)
            x = x - 1.0 / x
            out[n - 1] = x
        return out


OrbitModel = RankOneSubshift | IntegerShift | BooleMap


# --- observables ------------------------------------------------------------


class Observable:
    label = "observable"

    def on_subshift(self, model: RankOneSubshift, N: int) -> np.ndarray:
        raise InvalidArgument(f"{self.label} is not defined on a rank-one subshift")

    def on_integers(self, m: np.ndarray) -> np.ndarray:
        raise InvalidArgument(f"{self.label} is not defined on Z")

    def on_reals(self, x: np.ndarray) -> np.ndarray:
        raise InvalidArgument(f"{self.label} is not defined on R")

    @property
    def sup(self) -> float:
        return float("inf")


@dataclass(frozen=True)
class Constant(Observable):
    value: float = 1.0

    @property
    def label(self):
        return f"const:{self.value!r}"

    @property
    def sup(self):
        return abs(self.value)

    def on_subshift(self, model, N):
        return np.full(N, float(self.value))

    def on_integers(self, m):
        return np.full(m.shape, float(self.value))

    def on_reals(self, x):
        return np.full(x.shape, float(self.value))


@dataclass(frozen=True)
class CylinderIndicator(Observable):
    """1 if the word v occurs at position k of the current point."""

    word: str
    k: int = 0

    def __post_init__(self):
        if not self.word or set(self.word) - {"0", "1"}:
            raise InvalidArgument(f"bad cylinder word {self.word!r}")
        if self.k < -1:
            raise InvalidArgument("cylinder position must be >= -1 (forward orbit only)")

    @property
    def label(self):
        return f"cylinder:{self.word}@{self.k}"

    @property
    def sup(self):
        return 1.0

    def value_at_ones(self) -> float:
        return 1.0 if set(self.word) == {"1"} else 0.0

    def on_subshift(self, model, N):
        if model.point == "ones":
            return np.full(N, self.value_at_ones())
        L = len(self.word)
        prefix = limit_prefix(model.params, N + self.k + L, model.length_cap)
        hits = occurrence_positions(self.word, prefix) - self.k  # time n with hit at n + k
        out = np.zeros(N + 1)
        hits = hits[(hits >= 1) & (hits <= N)]
        out[hits] = 1.0
        return out[1:]


@dataclass(frozen=True)
class CylinderIndicatorCentered(CylinderIndicator):
    """Cylinder indicator minus its value at the all-ones point."""

    @property
    def label(self):
        return f"centered:{self.word}@{self.k}"

    def on_subshift(self, model, N):
        return super().on_subshift(model, N) - self.value_at_ones()


@dataclass(frozen=True)
class FinitelySupported(Observable):
    values: Mapping[int, float] = field(default_factory=dict)

    @property
    def label(self):
        return "finite:" + ",".join(f"{k}={v!r}" for k, v in sorted(self.values.items()))

    @property
    def sup(self):
        return max((abs(v) for v in self.values.values()), default=0.0)

    @property
    def total(self) -> float:
        return float(sum(self.values.values()))

    def on_integers(self, m):
        out = np.zeros(m.shape)
        for k, v in self.values.items():
            out[m == k] = v
        return out


@dataclass(frozen=True)
class ArithmeticFunction(Observable):
    """f(m) = mu(m) or lambda(m) for m >= 1, and 0 for m <= 0."""

    kind: str = "mobius"

    @property
    def label(self):
        return f"arith:{self.kind}"

    @property
    def sup(self):
        return 1.0

    def on_integers(self, m):
        top = int(m.max(initial=1))
        w = arithmetic_table(top).weights(self.kind)
        out = np.zeros(m.shape)
        pos = m >= 1
        out[pos] = w[m[pos]]
        return out


@dataclass(frozen=True)
class IndicatorInterval(Observable):
    """Indicator of the closed interval [a, b]."""

    a: float
    b: float

    @property
    def label(self):
        return f"interval:{self.a!r}:{self.b!r}"

    @property
    def sup(self):
        return 1.0

    @property
    def integral(self) -> float:
        return max(self.b - self.a, 0.0)

    def on_reals(self, x):
        return ((x >= self.a) & (x <= self.b)).astype(np.float64)

    def on_integers(self, m):
        return self.on_reals(m.astype(np.float64))


@dataclass(frozen=True)
class RealFunction(Observable):
    func: Callable[[np.ndarray], np.ndarray]
    name: str = "function"
    integral: float | None = None
    bound: float = float("inf")

    @property
    def label(self):
        return self.name

    @property
    def sup(self):
        return self.bound

    def on_reals(self, x):
        return np.asarray(self.func(x), dtype=np.float64)


def cauchy_density() -> RealFunction:
    """p(x) = 1 / (pi (1 + x^2)), a positive integrable density on R."""
    return RealFunction(lambda x: 1.0 / (pi * (1.0 + x * x)), "cauchy", integral=1.0, bound=1 / pi)


def orbit_values(model: OrbitModel, f: Observable, N: int) -> np.ndarray:
    """f(T^n x) for n = 1..N as an array of length N."""
    if N < 0:
        raise InvalidArgument("N must be >= 0")
    if isinstance(model, RankOneSubshift):
        return f.on_subshift(model, N)
    if isinstance(model, IntegerShift):
        return f.on_integers(np.arange(model.start + 1, model.start + N + 1, dtype=np.int64))
    if isinstance(model, BooleMap):
        return f.on_reals(model.orbit(N))
    raise InvalidArgument(f"unknown orbit model {model!r}")


# --- averages ---------------------------------------------------------------


@dataclass(frozen=True)
class AverageSeries:
    checkpoints: tuple[int, ...]
    values: tuple[float, ...]
    weight: str
    model: str = ""
    observable: str = ""
    bound: float | None = None

    def rows(self):
        return [
            {"N": N, "value": v, "weight": self.weight, "model": self.model, "observable": self.observable}
            for N, v in zip(self.checkpoints, self.values)
        ]


def _checkpoints(checkpoints: Sequence[int]) -> tuple[int, ...]:
    cps = tuple(int(c) for c in checkpoints)
    if not cps:
        raise InvalidArgument("need at least one checkpoint")
    if cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
        raise InvalidArgument("checkpoints must be positive and strictly ascending")
    return cps


def _weights(weight: str, N: int, table: ArithmeticTable | None) -> np.ndarray:
    if weight not in WEIGHTS:
        raise InvalidArgument(f"weight must be one of {WEIGHTS}")
    if weight == "none":
        return np.ones(N)
    return arithmetic_table(N, table).weights(weight)[1 : N + 1].astype(np.float64)


def _running(terms: np.ndarray, cps: tuple[int, ...]) -> np.ndarray:
    return np.cumsum(terms)[np.asarray(cps) - 1]


def weighted_average(
    model: OrbitModel,
    f: Observable,
    checkpoints: Sequence[int],
    weight: str = "mobius",
    table: ArithmeticTable | None = None,
) -> AverageSeries:
    """(1/N) sum_{n<=N} w(n) f(T^n x) at each checkpoint N."""
    cps = _checkpoints(checkpoints)
    N = cps[-1]
    vals = orbit_values(model, f, N) * _weights(weight, N, table)
    out = _running(vals, cps) / np.asarray(cps)
    return AverageSeries(cps, tuple(map(float, out)), weight, model.label, f.label)


def cesaro_deviation(
    model: OrbitModel, f: Observable, z_value: float, checkpoints: Sequence[int]
) -> AverageSeries:
    """(1/N) sum_{n<=N} (f(T^n x) - z_value)."""
    cps = _checkpoints(checkpoints)
    vals = orbit_values(model, f, cps[-1]) - z_value
    out = _running(vals, cps) / np.asarray(cps)
    return AverageSeries(cps, tuple(map(float, out)), "none", model.label, f"{f.label}-{z_value!r}")


def hopf_ratio(
    model: OrbitModel,
    f: Observable,
    p: Observable,
    checkpoints: Sequence[int],
    weight: str = "none",
    table: ArithmeticTable | None = None,
    f_abs_integral: float | None = None,
    p_integral: float | None = None,
) -> AverageSeries:
    """sum w(n) f(T^n x) / sum p(T^n x) at each checkpoint.

    When both integrals are given, ``bound`` carries int|f| / int p, the
    a.e. limsup bound from Hopf's maximal inequality.  It is reported, not
    asserted: no finite N certifies it.
    """
    cps = _checkpoints(checkpoints)
    N = cps[-1]
    num = _running(orbit_values(model, f, N) * _weights(weight, N, table), cps)
    den = _running(orbit_values(model, p, N), cps)
    if den[0] == 0:
        raise UndefinedRatio(f"denominator vanishes at N={cps[0]}")
    bound = None
    if f_abs_integral is not None and p_integral is not None:
        bound = f_abs_integral / p_integral
    return AverageSeries(
        cps, tuple(map(float, num / den)), weight, model.label, f"{f.label}/{p.label}", bound
    )


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, isqrt(p) + 1)):
        raise InvalidArgument(f"{p} is not a prime")


def dkbsz_correlation(
    model: OrbitModel, f: Observable, p: int, q: int, checkpoints: Sequence[int]
) -> AverageSeries:
    """(1/N) sum_{n<=N} f(T^{pn} x) f(T^{qn} x) for distinct primes p, q."""
    if p == q:
        raise InvalidArgument("p and q must be distinct")
    _check_prime(p)
    _check_prime(q)
    cps = _checkpoints(checkpoints)
    N = cps[-1]
    vals = orbit_values(model, f, max(p, q) * N)
    n = np.arange(1, N + 1)
    terms = vals[p * n - 1] * vals[q * n - 1]
    out = _running(terms, cps) / np.asarray(cps)
    return AverageSeries(cps, tuple(map(float, out)), "none", model.label, f"{f.label}|p={p},q={q}")
