"""Singularity diagnostics for pairs of pseudo-dilated Riesz products.

Everything here reports finite truncations of series whose behaviour
(boundedness, divergence, stabilization) is read off numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from math import fsum
from typing import Sequence

import numpy as np

from ..errors import InvalidArgument, InvalidPlan
from ..symbolic import RankOneParams
from .measures import Dilated, empirical_spectral_density, hellinger
from .riesz import RieszProduct, riesz_factors


@dataclass(frozen=True)
class SubsequencePlan:
    """Stage indices n_0 < n_1 < ...; ``gap`` is the minimal spacing enforced."""

    indices: tuple[int, ...]
    eta: int | None = None
    gap: int = 3

    def __post_init__(self):
        idx = self.indices
        if any(i < 0 for i in idx):
            raise InvalidPlan("stage indices must be >= 0")
        if any(b - a < self.gap for a, b in zip(idx, idx[1:])):
            raise InvalidPlan(f"consecutive indices must differ by at least {self.gap}: {idx}")

    @classmethod
    def arithmetic(cls, eta: int, count: int, step: int = 3) -> "SubsequencePlan":
        """n_j = step * j + eta for j < count."""
        if eta not in range(step):
            raise InvalidPlan(f"residue eta must lie in 0..{step - 1}")
        return cls(tuple(step * j + eta for j in range(count)), eta, gap=step)


def mj_sequence(params: RankOneParams, plan: SubsequencePlan) -> list[int]:
    """m_j = h_{n_{j+1}} - h_{n_j} - s(n_j, p_{n_j} - 1), one per consecutive pair."""
    if plan.gap < 3:
        raise InvalidPlan("m_j needs plans with gap >= 3")
    idx = plan.indices
    if len(idx) < 2:
        return []
    stages = list(islice(params.stages(), idx[-1] + 1))
    return [
        stages[b].height - stages[a].height - stages[a].spacers[-1] for a, b in zip(idx, idx[1:])
    ]


def plan_product(params: RankOneParams, plan: SubsequencePlan, node_budget: int = 2_000_000) -> RieszProduct:
    return RieszProduct(riesz_factors(params, plan.indices), node_budget)


@dataclass(frozen=True)
class KlemesRow:
    j: int
    K: int
    alpha_mj: Fraction
    predicted: Fraction  # 1 / p_{n_j}
    alpha_sum: Fraction  # alpha_K(m_j + m_{j+1})
    alpha_product: Fraction  # alpha_K(m_j) alpha_K(m_{j+1})
    increment: Fraction | None  # |alpha_K(m_j) - alpha_{K-1}(m_j)|

    @property
    def product_defect(self) -> Fraction:
        return abs(self.alpha_sum - self.alpha_product)


def klemes_reinhold_check(
    params: RankOneParams, plan: SubsequencePlan, truncation: int, node_budget: int = 2_000_000
) -> list[KlemesRow]:
    """Truncated-product coefficients at the m_j next to their predicted limits.

    For every j with m_j and m_{j+1} defined and every K = 1..truncation,
    alpha_K is the product of the first K plan factors.
    """
    if truncation < 1:
        raise InvalidArgument("truncation must be >= 1")
    if len(plan.indices) < max(truncation, 3):
        raise InvalidPlan(f"plan needs at least {max(truncation, 3)} indices")
    ms = mj_sequence(params, plan)
    full = plan_product(params, plan, node_budget)
    rows = []
    for j in range(len(ms) - 1):
        prev = None
        for K in range(1, truncation + 1):
            alpha = full.truncated(K)
            a_j, a_k = alpha.coefficient(ms[j]), alpha.coefficient(ms[j + 1])
            rows.append(
                KlemesRow(
                    j,
                    K,
                    a_j,
                    Fraction(1, full.factors[j].p),
                    alpha.coefficient(ms[j] + ms[j + 1]),
                    a_j * a_k,
                    None if prev is None else abs(a_j - prev),
                )
            )
            prev = a_j
    return rows


@dataclass(frozen=True)
class PeyriereReport:
    br1_a: tuple[float, ...]  # truncation J = 1..len
    br1_b: tuple[float, ...]
    br2: tuple[float, ...]
    frequencies: tuple[int, ...]


def _mean(measure, f: int):
    # integral of z^f against mu is mu^(-f)
    return complex(measure.coefficient(-f))


def _br1(measure, freqs: Sequence[int], J: int) -> list[float]:
    means = [_mean(measure, f) for f in freqs[:J]]
    # sup over n of the k-th correlation defect, for n + k <= J
    out, total = [], 0.0
    sup_k = [0.0] * J
    for top in range(J):  # admit index `top` (0-based) into the window
        for n in range(top + 1):
            k = top - n
            corr = _mean(measure, freqs[n] + freqs[top]) - means[n] * means[top]
            sup_k[k] = max(sup_k[k], abs(corr))
        total = fsum(sup_k[: top + 1])
        out.append(total)
    return out


def peyriere_diagnostics(spec_a, spec_b, frequencies: Sequence[int], truncation: int) -> PeyriereReport:
    """Truncated series of the Brown-Hewitt conditions with phi_n(z) = z^{f_n}.

    br1_x[J-1] = sum_{k<J} max_{n+k<=J} |x^(-(f_n+f_{n+k})) - x^(-f_n) x^(-f_{n+k})|
    br2[J-1]   = sum_{n<=J} |a^(-f_n) - b^(-f_n)|^2
    Absent coefficients are exact zeros.
    """
    J = int(truncation)
    if J < 1 or len(frequencies) < J:
        raise InvalidArgument("need truncation >= 1 and at least that many frequencies")
    freqs = [int(f) for f in frequencies[:J]]
    diffs = [abs(_mean(spec_a, f) - _mean(spec_b, f)) ** 2 for f in freqs]
    br2 = [fsum(diffs[: i + 1]) for i in range(J)]
    return PeyriereReport(tuple(_br1(spec_a, freqs, J)), tuple(_br1(spec_b, freqs, J)), tuple(br2), tuple(freqs))


def dilation_pair_diagnostics(
    params: RankOneParams, p: int, q: int, truncation: int, eta: int = 0, node_budget: int = 2_000_000
) -> PeyriereReport:
    """Peyriere series for alpha_(p) vs alpha_(q) at frequencies p m_j.

    alpha is the Riesz product over the plan n_j = 3 j + eta, with enough
    factors that every queried coefficient is exact.
    """
    plan = SubsequencePlan.arithmetic(eta, truncation + 3)
    ms = mj_sequence(params, plan)
    alpha = plan_product(params, plan, node_budget)
    return peyriere_diagnostics(Dilated(alpha, p), Dilated(alpha, q), [p * m for m in ms], truncation)


@dataclass(frozen=True)
class ResidueReport:
    modulus: int
    horizon: int
    sums: tuple[float, ...]  # sum_{n <= H, n = r mod modulus} 1 / p_n^2

    @property
    def eta(self) -> int:
        return int(np.argmax(self.sums))


def divergence_residue(params: RankOneParams, horizon: int, modulus: int = 3) -> ResidueReport:
    """Partial sums of 1/p_n^2 over n = 0..horizon split by residue class."""
    if modulus < 1 or horizon < modulus:
        raise InvalidArgument("need horizon >= modulus >= 1")
    terms = [[] for _ in range(modulus)]
    for st in islice(params.stages(), horizon + 1):
        terms[st.n % modulus].append(1.0 / st.p**2)
    return ResidueReport(modulus, horizon, tuple(fsum(t) for t in terms))


@dataclass(frozen=True)
class DkbszBound:
    lhs: float
    rhs: float
    affinity: float
    n_tilde: int
    holds: bool


def dkbsz_bound(orbit_values, p: int, q: int, N: int, grid_size: int, tol: float = 1e-6) -> DkbszBound:
    """|(1/N~) sum_{n<=N~} f_{pn} f_{qn}| <= (N/N~) H(sigma_{f,(p),N}, sigma_{f,(q),N}).

    N~ = floor(N / max(p, q)); both spectral densities come from the first
    N orbit values.
    """
    if p == q:
        raise InvalidArgument("p and q must be distinct")
    f = np.asarray(orbit_values)[:N]
    if f.size < N:
        raise InvalidArgument(f"need {N} orbit values, got {f.size}")
    big = max(p, q)
    n_tilde = N // big
    if n_tilde < 1:
        raise InvalidArgument("N must be at least max(p, q)")
    if grid_size <= 2 * big * N:
        raise InvalidArgument(f"grid_size must exceed 2 max(p,q) N = {2 * big * N}")
    n = np.arange(1, n_tilde + 1)
    lhs = abs(np.sum(f[p * n - 1] * np.conj(f[q * n - 1]))) / n_tilde
    a = empirical_spectral_density(f, grid_size, dilation=p)
    b = empirical_spectral_density(f, grid_size, dilation=q)
    H = hellinger(a, b)
    rhs = N / n_tilde * H
    return DkbszBound(float(lhs), float(rhs), H, n_tilde, bool(lhs <= rhs + tol))
