"""Measures on the circle [0, 1): sparse Fourier data, atoms, grid densities.

Fourier convention throughout: c(n) = integral of exp(-2 pi i n t) d mu(t),
so a density with coefficients c has samples sum_n c(n) exp(2 pi i n t).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, sqrt
from typing import Mapping, Protocol

import numpy as np

from ..errors import InvalidArgument, ResourceError

MERGE_TOL = 1e-12
PRUNE_TOL = 1e-15
DEFAULT_BUDGET = 10**7
BUDGET_ENV = "MOEBIUS_RANKONE_COEFF_BUDGET"


def coefficient_budget() -> int:
    """Entry budget for sparse products; overridable through the environment."""
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


class HasCoefficients(Protocol):
    def coefficient(self, n: int) -> complex | Fraction: ...


def _circle(x) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True)
class SparseSpectrum:
    """Finitely many Fourier coefficients, or finitely many rational atoms.

    ``kind="density-coefficients"`` stores sorted integer frequencies and
    complex amplitudes; ``kind="atomic-measure"`` stores atoms
    ``{position in [0,1): mass}`` exactly and derives coefficients on demand.
    """

    freqs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    amps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    kind: str = "density-coefficients"
    atoms: Mapping[Fraction, Fraction] | None = None

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[int, complex]) -> "SparseSpectrum":
        items = sorted((int(k), complex(v)) for k, v in coeffs.items() if abs(v) >= PRUNE_TOL)
        freqs = np.array([k for k, _ in items], dtype=np.int64)
        amps = np.array([v for _, v in items], dtype=np.complex128)
        return cls(freqs, amps)

    @classmethod
    def from_arrays(cls, freqs: np.ndarray, amps: np.ndarray) -> "SparseSpectrum":
        order = np.argsort(freqs, kind="stable")
        freqs, amps = np.asarray(freqs, dtype=np.int64)[order], np.asarray(amps, dtype=np.complex128)[order]
        keep = np.abs(amps) >= PRUNE_TOL
        return cls(freqs[keep], amps[keep])

    @classmethod
    def from_atoms(cls, atoms: Mapping) -> "SparseSpectrum":
        merged: dict[Fraction, Fraction] = {}
        for x, w in atoms.items():
            w = Fraction(w)
            if w < 0:
                raise InvalidArgument("atom masses must be nonnegative")
            if w:
                x = _circle(x)
                merged[x] = merged.get(x, Fraction(0)) + w
        return cls(kind="atomic-measure", atoms=dict(sorted(merged.items())))

    @property
    def is_atomic(self) -> bool:
        return self.kind == "atomic-measure"

    @property
    def total_mass(self) -> Fraction | complex:
        if self.is_atomic:
            return sum(self.atoms.values(), Fraction(0))
        return self.coefficient(0)

    @property
    def support(self) -> frozenset:
        """Atom positions (atomic) or frequencies carrying a coefficient."""
        if self.is_atomic:
            return frozenset(self.atoms)
        return frozenset(int(k) for k in self.freqs)

    def coefficient(self, n: int) -> complex:
        if self.is_atomic:
            return complex(
                sum(float(w) * np.exp(-2j * np.pi * float((n * x) % 1)) for x, w in self.atoms.items())
            )
        i = np.searchsorted(self.freqs, n)
        if i < self.freqs.size and self.freqs[i] == n:
            return complex(self.amps[i])
        return 0j

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(v) for k, v in zip(self.freqs, self.amps)}

    @property
    def max_frequency(self) -> int:
        return int(np.abs(self.freqs).max(initial=0))

    def is_hermitian(self, tol: float = MERGE_TOL) -> bool:
        d = self.as_dict()
        return all(abs(d.get(-k, 0) - np.conj(v)) <= tol for k, v in d.items())

    def allclose(self, other: "SparseSpectrum", tol: float = MERGE_TOL) -> bool:
        a, b = self.as_dict(), other.as_dict()
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in set(a) | set(b))


@dataclass(frozen=True)
class Dilated:
    """Lazy pseudo-dilation of anything exposing ``coefficient``."""

    base: HasCoefficients
    m: int

    def coefficient(self, n: int):
        return self.base.coefficient(n // self.m) if n % self.m == 0 else 0


@dataclass(frozen=True)
class Pushed:
    """Lazy push-forward under z -> z^p."""

    base: HasCoefficients
    p: int

    def coefficient(self, n: int):
        return self.base.coefficient(self.p * n)


def pseudo_dilate(spectrum, m: int):
    """sigma_(m): coefficient n is c(n/m) when m | n, else 0.

    On atoms this is (1/m) sum_j (sigma scaled by 1/m) shifted by j/m.
    Non-sparse inputs get a lazy view.
    """
    if m < 1:
        raise InvalidArgument("dilation factor must be a positive integer")
    if not isinstance(spectrum, SparseSpectrum):
        return Dilated(spectrum, m)
    if spectrum.is_atomic:
        return SparseSpectrum.from_atoms(
            {(x + j) / m: w / m for x, w in spectrum.atoms.items() for j in range(m)}
        )
    return SparseSpectrum(spectrum.freqs * m, spectrum.amps.copy())


def power_pushforward(spectrum, p: int):
    """sigma_p, the image of sigma under z -> z^p: coefficient n becomes c(p n)."""
    if p < 1:
        raise InvalidArgument("power must be a positive integer")
    if not isinstance(spectrum, SparseSpectrum):
        return Pushed(spectrum, p)
    if spectrum.is_atomic:
        out: dict[Fraction, Fraction] = {}
        for x, w in spectrum.atoms.items():
            y = (p * x) % 1
            out[y] = out.get(y, Fraction(0)) + w
        return SparseSpectrum.from_atoms(out)
    keep = spectrum.freqs % p == 0
    return SparseSpectrum(spectrum.freqs[keep] // p, spectrum.amps[keep].copy())


def rotate(spectrum: SparseSpectrum, shift) -> SparseSpectrum:
    """Atomic measure translated by ``shift`` (mod 1)."""
    shift = Fraction(shift)
    return SparseSpectrum.from_atoms({x + shift: w for x, w in spectrum.atoms.items()})


def average_translates(spectrum: SparseSpectrum, p: int) -> SparseSpectrum:
    """(1/p) sum_j sigma * delta_{j/p}."""
    out: dict[Fraction, Fraction] = {}
    for x, w in spectrum.atoms.items():
        for j in range(p):
            y = (x + Fraction(j, p)) % 1  # translates of different atoms may coincide
            out[y] = out.get(y, Fraction(0)) + w / p
    return SparseSpectrum.from_atoms(out)


def sparse_product(a: SparseSpectrum, b: SparseSpectrum, budget: int | None = None) -> SparseSpectrum:
    """Coefficients of the product of two densities (sparse convolution)."""
    budget = coefficient_budget() if budget is None else budget
    size = a.freqs.size * b.freqs.size
    if size > budget:
        raise ResourceError(
            f"sparse product needs {size} entries, budget is {budget}; "
            "evaluate the density on a grid instead"
        )
    f = (a.freqs[:, None] + b.freqs[None, :]).ravel()
    v = (a.amps[:, None] * b.amps[None, :]).ravel()
    uniq, inv = np.unique(f, return_inverse=True)
    amps = np.bincount(inv, weights=v.real, minlength=uniq.size) + 1j * np.bincount(
        inv, weights=v.imag, minlength=uniq.size
    )
    keep = np.abs(amps) >= PRUNE_TOL
    return SparseSpectrum(uniq[keep], amps[keep])


# --- grid densities ---------------------------------------------------------


@dataclass(frozen=True)
class GridDensity:
    """Samples of a nonnegative density at t = k / G, k = 0..G-1."""

    grid_size: int
    samples: np.ndarray

    def __post_init__(self):
        if self.samples.shape != (self.grid_size,):
            raise InvalidArgument("sample count must equal the grid size")

    @classmethod
    def from_raw(cls, values: np.ndarray) -> "GridDensity":
        s = np.asarray(values, dtype=np.float64)
        return cls(s.size, np.maximum(s, 0.0))

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    def mean(self) -> float:
        return float(self.samples.mean())


def density_from_spectrum(spectrum: SparseSpectrum, grid_size: int, dilation: int = 1) -> GridDensity:
    """Evaluate sum_n c(n) e(n dilation t) on the grid.

    Frequencies are folded mod G first, which is exact for point values.
    """
    if grid_size < 2:
        raise InvalidArgument("grid_size must be >= 2")
    folded = np.zeros(grid_size, dtype=np.complex128)
    np.add.at(folded, (spectrum.freqs * dilation) % grid_size, spectrum.amps)
    vals = np.fft.ifft(folded) * grid_size
    return GridDensity.from_raw(vals.real)


def empirical_spectral_density(orbit_values, grid_size: int, dilation: int = 1) -> GridDensity:
    """|N^{-1/2} sum_{n=1}^N f(T^n x) e(dilation n t)|^2 on the grid."""
    f = np.asarray(orbit_values)
    N = f.size
    if N < 1:
        raise InvalidArgument("need at least one orbit value")
    if grid_size < 2:
        raise InvalidArgument("grid_size must be >= 2")
    folded = np.zeros(grid_size, dtype=np.complex128)
    n = np.arange(1, N + 1, dtype=np.int64)
    np.add.at(folded, (dilation * n) % grid_size, f.astype(np.complex128))
    S = np.fft.ifft(folded) * grid_size
    return GridDensity.from_raw(np.abs(S) ** 2 / N)


def hellinger(a: GridDensity, b: GridDensity) -> float:
    """Grid mean of sqrt(a b): the affinity relative to normalized grid measure."""
    if a.grid_size != b.grid_size:
        raise InvalidArgument(f"grid mismatch: {a.grid_size} vs {b.grid_size}")
    return float(np.sqrt(np.maximum(a.samples, 0) * np.maximum(b.samples, 0)).mean())


def hellinger_atomic(a: SparseSpectrum, b: SparseSpectrum) -> float:
    """sum over shared atoms of sqrt(mass_a mass_b), for atomic probabilities."""
    for s in (a, b):
        if not s.is_atomic:
            raise InvalidArgument("hellinger_atomic needs atomic measures")
        if s.total_mass != 1:
            raise InvalidArgument(f"total mass {s.total_mass} is not 1")
    return sum(sqrt(a.atoms[x] * b.atoms[x]) for x in a.atoms.keys() & b.atoms.keys())


def mutually_singular(a: SparseSpectrum, b: SparseSpectrum) -> bool:
    """Exact singularity test for atomic measures: disjoint supports."""
    return not (a.support & b.support)


@dataclass(frozen=True)
class ThouvenotVerdict:
    singular_pq: bool  # a_p vs b_q
    singular_dilations: bool  # a_(q) vs b_(p)
    agree: bool


def thouvenot_check(a: SparseSpectrum, b: SparseSpectrum, p: int, q: int) -> ThouvenotVerdict:
    """Compare a_p vs b_q with the crossed pseudo-dilations a_(q) vs b_(p).

    For coprime p, q the two singularity verdicts coincide.  The dilations
    must be crossed: a = delta_{1/2}, b = delta_0, p = 2, q = 3 has
    a_2 = b_3 = delta_0 while a_(2) and b_(3) are disjoint.
    """
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise InvalidArgument(f"p={p}, q={q} must be coprime positive integers")
    if not (a.is_atomic and b.is_atomic):
        raise InvalidArgument("thouvenot_check needs atomic measures")
    s1 = mutually_singular(power_pushforward(a, p), power_pushforward(b, q))
    s2 = mutually_singular(pseudo_dilate(a, q), pseudo_dilate(b, p))
    return ThouvenotVerdict(s1, s2, s1 == s2)
