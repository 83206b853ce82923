"""Generalized Riesz products built from rank-one copy offsets.

Stage n contributes P_n(t) = p_n^{-1/2} sum_j e(e_j t) where e_j are the
offsets of the copies of W_n inside W_{n+1}; the product of the |P_n|^2
over stages approximates the maximal spectral type.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import islice
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

from ..errors import InvalidArgument, ResourceError
from ..symbolic import RankOneParams
from .measures import GridDensity, SparseSpectrum, coefficient_budget, density_from_spectrum, sparse_product


@dataclass(frozen=True)
class RieszFactor:
    stage: int
    exponents: tuple[int, ...]
    weight: float

    def __post_init__(self):
        e = self.exponents
        if not e or e[0] != 0 or any(b <= a for a, b in zip(e, e[1:])):
            raise InvalidArgument(f"exponents must start at 0 and increase strictly: {e}")

    @property
    def p(self) -> int:
        return len(self.exponents)

    def difference_counts(self) -> Counter:
        """#{(j, j'): e_j - e_j' = d} for every difference d."""
        e = self.exponents
        return Counter(a - b for a in e for b in e)

    def square_coeffs_exact(self) -> dict[int, Fraction]:
        return {d: Fraction(c, self.p) for d, c in self.difference_counts().items()}

    def __call__(self, t) -> np.ndarray:
        """P_n(t) for t in [0, 1)."""
        t = np.asarray(t, dtype=np.float64)
        return np.exp(2j * np.pi * np.multiply.outer(t, self.exponents)).sum(axis=-1) * self.weight


def riesz_factors(params: RankOneParams, stages: Iterable[int]) -> list[RieszFactor]:
    stages = list(stages)
    if not stages:
        return []
    if min(stages) < 0:
        raise InvalidArgument("stage indices must be >= 0")
    table = list(islice(params.stages(), max(stages) + 1))
    return [RieszFactor(n, tuple(table[n].offsets), 1 / sqrt(table[n].p)) for n in stages]


def riesz_factor(params: RankOneParams, n: int) -> RieszFactor:
    return riesz_factors(params, [n])[0]


def factor_square_coeffs(factor: RieszFactor) -> SparseSpectrum:
    """Fourier coefficients of |P_n|^2; c(0) = 1 exactly."""
    return SparseSpectrum.from_coefficients(
        {d: c / factor.p for d, c in factor.difference_counts().items()}
    )


def product_coeffs(factors: Sequence[RieszFactor], budget: int | None = None) -> SparseSpectrum:
    """Coefficients of prod |P_n|^2 by repeated sparse convolution."""
    budget = coefficient_budget() if budget is None else budget
    unit = SparseSpectrum.from_coefficients({0: 1.0})
    return reduce(lambda acc, f: sparse_product(acc, factor_square_coeffs(f), budget), factors, unit)


def evaluate_density(source, grid_size: int, dilation: int = 1) -> GridDensity:
    """Samples of prod |P_n(dilation t)|^2, or of a coefficient map, on a grid.

    Factors are evaluated point by point from exact integer phases
    (exponent * dilation * k mod G), never through their coefficients.
    """
    if grid_size < 2:
        raise InvalidArgument("grid_size must be >= 2")
    if isinstance(source, SparseSpectrum):
        return density_from_spectrum(source, grid_size, dilation)
    k = np.arange(grid_size, dtype=np.int64)
    dens = np.ones(grid_size)
    for f in source:
        acc = np.zeros(grid_size, dtype=np.complex128)
        for e in f.exponents:
            step = (e * dilation) % grid_size
            acc += np.exp(2j * np.pi * ((step * k) % grid_size) / grid_size)
        dens *= np.abs(acc) ** 2 / f.p
    return GridDensity.from_raw(dens)


@dataclass
class RieszProduct:
    """Exact Fourier coefficients of a finite product prod_i |P_{n_i}|^2.

    ``coefficient(m)`` sums c_0(d_0) ... c_K(d_K) over d_0 + ... + d_K = m,
    walking from the top factor down and discarding any partial sum that
    the remaining factors can no longer reach.  Frequencies are Python
    integers, so m may be astronomically large.
    """

    factors: Sequence[RieszFactor]
    node_budget: int = 2_000_000
    _diffs: list = field(init=False, repr=False)
    _coef: list = field(init=False, repr=False)
    _spans: list = field(init=False, repr=False)

    def __post_init__(self):
        self.factors = tuple(self.factors)
        self._coef = [f.square_coeffs_exact() for f in self.factors]
        self._diffs = [sorted(c) for c in self._coef]
        spans, total = [], 0
        for d in self._diffs:
            total += d[-1]
            spans.append(total)
        self._spans = spans

    def truncated(self, K: int) -> "RieszProduct":
        return RieszProduct(self.factors[:K], self.node_budget)

    @property
    def max_frequency(self) -> int:
        return self._spans[-1] if self._spans else 0

    def coefficient(self, m: int) -> Fraction:
        m = int(m)
        memo: dict[tuple[int, int], Fraction] = {}
        nodes = 0

        def rec(i: int, m: int) -> Fraction:
            nonlocal nodes
            if i < 0:
                return Fraction(1) if m == 0 else Fraction(0)
            if abs(m) > self._spans[i]:
                return Fraction(0)
            key = (i, m)
            if key in memo:
                return memo[key]
            nodes += 1
            if nodes > self.node_budget:
                raise ResourceError(f"coefficient search exceeded {self.node_budget} nodes")
            lower = self._spans[i - 1] if i else 0
            diffs, coef = self._diffs[i], self._coef[i]
            lo, hi = bisect_left(diffs, m - lower), bisect_right(diffs, m + lower)
            total = Fraction(0)
            for d in diffs[lo:hi]:
                total += coef[d] * rec(i - 1, m - d)
            memo[key] = total
            return total

        return rec(len(self.factors) - 1, m)
