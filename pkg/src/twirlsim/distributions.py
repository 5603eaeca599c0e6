"""Probability laws for random evolution times and their characteristic data.

Everything downstream consumes one convention: char_minus(D)(omega) is
E[exp(-i omega s)] for s drawn from D. For a Levy triplet, levy_psi is the
exponent in the same convention, so exp(psi) = char_minus of the time-one law
and exp(t * psi) is the multiplier of the time-t twirl. In particular a pure
drift gamma shifts samples toward +gamma, and the corresponding twirl at time
t is conjugation by exp(-i gamma t H).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DistributionError

TRUNCATED_CHAR_NODES = 64
_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _leggauss_cache:
        _leggauss_cache[n] = leggauss(n)
    return _leggauss_cache[n]


def _as_atoms(pairs) -> tuple[tuple[float, float], ...]:
    out = []
    for pair in pairs:
        s, w = pair
        out.append((float(s), float(w)))
    return tuple(out)


@dataclass(frozen=True)
class Gaussian:
    """Centered normal law with the given variance."""

    variance: float

    def __post_init__(self):
        if not self.variance >= 0.0:
            raise DistributionError(f"Gaussian variance must be >= 0, got {self.variance}")


@dataclass(frozen=True)
class TruncatedGaussian:
    """Centered normal of the given variance conditioned on [-cutoff, cutoff]."""

    variance: float
    cutoff: float

    def __post_init__(self):
        if not self.variance >= 0.0:
            raise DistributionError(f"variance must be >= 0, got {self.variance}")
        if not self.cutoff > 0.0:
            raise DistributionError(f"cutoff must be > 0, got {self.cutoff}")


@dataclass(frozen=True)
class Dirac:
    """Point mass at location."""

    location: float


@dataclass(frozen=True)
class FiniteMixture:
    """Finitely many atoms (location, probability) with probabilities summing to 1."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", _as_atoms(self.atoms))
        if not self.atoms:
            raise DistributionError("mixture needs at least one atom")
        if any(p < 0.0 for _, p in self.atoms):
            raise DistributionError("mixture probabilities must be nonnegative")
        total = math.fsum(p for _, p in self.atoms)
        if abs(total - 1.0) > 1e-12:
            raise DistributionError(f"mixture probabilities sum to {total!r}, not 1")


BaseLaw = Union[Dirac, FiniteMixture, Gaussian]


@dataclass(frozen=True)
class CompoundPoisson:
    """Sum of a Poisson(rate) number of i.i.d. draws from the base law.

    The base law must put no mass at zero: a zero-length jump is not a jump.
    """

    rate: float
    base: BaseLaw

    def __post_init__(self):
        if not self.rate >= 0.0:
            raise DistributionError(f"rate must be >= 0, got {self.rate}")
        b = self.base
        if isinstance(b, Dirac):
            if b.location == 0.0:
                raise DistributionError("compound Poisson base has an atom at 0")
        elif isinstance(b, FiniteMixture):
            if any(s == 0.0 and p > 0.0 for s, p in b.atoms):
                raise DistributionError("compound Poisson base has an atom at 0")
        elif isinstance(b, Gaussian):
            if b.variance == 0.0:
                raise DistributionError("compound Poisson base has an atom at 0")
        else:
            raise DistributionError(f"unsupported compound Poisson base {type(b).__name__}")


@dataclass(frozen=True)
class LevyTriplet:
    """Diffusion coefficient, drift, and a finite jump measure.

    atoms holds (location, weight) pairs of the jump measure; weights are
    arbitrary positive numbers, not probabilities. With compensated=True the
    small jumps (|location| <= 1) are compensated in the exponent.
    """

    sigma2: float
    gamma: float
    atoms: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    compensated: bool = False

    def __post_init__(self):
        if not self.sigma2 >= 0.0:
            raise DistributionError(f"sigma2 must be >= 0, got {self.sigma2}")
        object.__setattr__(self, "atoms", _as_atoms(self.atoms))
        if any(w <= 0.0 for _, w in self.atoms):
            raise DistributionError("jump weights must be positive")
        if any(s == 0.0 for s, _ in self.atoms):
            raise DistributionError("jump measure has an atom at 0")


DistributionSpec = Union[Gaussian, TruncatedGaussian, Dirac, FiniteMixture,
                         CompoundPoisson, LevyTriplet]


def levy_psi(triplet: LevyTriplet, omega):
    """Levy exponent psi(omega) with exp(psi) = char_minus of the time-one law.

    psi(omega) = -(sigma2/2) omega^2 - i gamma omega
                 + sum_j w_j (exp(-i omega s_j) - 1 [+ i omega s_j for
                   compensated small jumps]).
    """
    w = np.asarray(omega, dtype=np.float64)
    psi = -0.5 * triplet.sigma2 * w ** 2 - 1j * triplet.gamma * w
    psi = psi.astype(np.complex128)
    for s, weight in triplet.atoms:
        term = np.exp(-1j * w * s) - 1.0
        if triplet.compensated and abs(s) <= 1.0:
            term = term + 1j * w * s
        psi = psi + weight * term
    if np.isscalar(omega):
        return complex(psi)
    return psi


def scale_triplet(triplet: LevyTriplet, t: float) -> LevyTriplet:
    """Triplet of the time-t law: every component scales linearly."""
    return LevyTriplet(
        sigma2=triplet.sigma2 * t,
        gamma=triplet.gamma * t,
        atoms=tuple((s, w * t) for s, w in triplet.atoms),
        compensated=triplet.compensated,
    )


@singledispatch
def char_minus(dist, omega):
    """E[exp(-i omega s)] for s ~ dist; omega may be a scalar or an array."""
    raise TypeError(f"no characteristic function for {type(dist).__name__}")


def _shaped(value, omega):
    if np.isscalar(omega):
        return complex(value)
    return value


@char_minus.register
def _(dist: Gaussian, omega):
    w = np.asarray(omega, dtype=np.float64)
    return _shaped(np.exp(-0.5 * dist.variance * w ** 2).astype(np.complex128), omega)


@char_minus.register
def _(dist: Dirac, omega):
    w = np.asarray(omega, dtype=np.float64)
    return _shaped(np.exp(-1j * dist.location * w), omega)


@char_minus.register
def _(dist: FiniteMixture, omega):
    w = np.asarray(omega, dtype=np.float64)
    acc = np.zeros(w.shape, dtype=np.complex128)
    for s, p in dist.atoms:
        acc += p * np.exp(-1j * s * w)
    return _shaped(acc, omega)


@char_minus.register
def _(dist: CompoundPoisson, omega):
    base = char_minus(dist.base, np.asarray(omega, dtype=np.float64))
    return _shaped(np.exp(dist.rate * (np.asarray(base) - 1.0)), omega)


@char_minus.register
def _(dist: TruncatedGaussian, omega):
    # Gauss-Legendre on [-cutoff, cutoff]; the normalization uses the same
    # nodes, so char(0) = 1 holds exactly.
    if dist.variance == 0.0:
        w = np.asarray(omega, dtype=np.float64)
        return _shaped(np.ones(w.shape, dtype=np.complex128), omega)
    nodes, weights = _gl_nodes(TRUNCATED_CHAR_NODES)
    s = nodes * dist.cutoff
    density_weights = weights * np.exp(-0.5 * s ** 2 / dist.variance)
    w = np.asarray(omega, dtype=np.float64)
    phases = np.exp(-1j * np.multiply.outer(w, s))
    value = phases @ density_weights / density_weights.sum()
    return _shaped(value, omega)


@char_minus.register
def _(dist: LevyTriplet, omega):
    return _shaped(np.exp(levy_psi(dist, np.asarray(omega, dtype=np.float64))), omega)


@singledispatch
def sample_law(dist, rng: np.random.Generator, size=None):
    """Draw from laws that admit direct sampling (base laws of compound sums)."""
    raise TypeError(f"no sampler for {type(dist).__name__}")


@sample_law.register
def _(dist: Gaussian, rng: np.random.Generator, size=None):
    return rng.normal(0.0, math.sqrt(dist.variance), size=size)


@sample_law.register
def _(dist: Dirac, rng: np.random.Generator, size=None):
    if size is None:
        return dist.location
    return np.full(size, dist.location)


@sample_law.register
def _(dist: FiniteMixture, rng: np.random.Generator, size=None):
    locations = np.array([s for s, _ in dist.atoms])
    probs = np.array([p for _, p in dist.atoms])
    probs = probs / probs.sum()
    idx = rng.choice(len(locations), size=size, p=probs)
    return locations[idx]


@singledispatch
def mean_abs(dist) -> float:
    """E|s| where it has a simple closed form."""
    raise TypeError(f"no mean_abs for {type(dist).__name__}")


@mean_abs.register
def _(dist: Gaussian) -> float:
    return math.sqrt(2.0 * dist.variance / math.pi)


@mean_abs.register
def _(dist: Dirac) -> float:
    return abs(dist.location)


@mean_abs.register
def _(dist: FiniteMixture) -> float:
    return math.fsum(p * abs(s) for s, p in dist.atoms)
