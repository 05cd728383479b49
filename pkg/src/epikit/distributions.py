"""Infectious-period laws and generation-time distributions.

An infectious period is a strictly positive random duration I. Engines and
theory code only ever touch it through the small interface below: mean,
coefficient of variation, survival function P(I > t), the Laplace transform
E[exp(-rho I)], and sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "InfectiousPeriodDist",
    "ExponentialPeriod",
    "ConstantPeriod",
    "GammaPeriod",
    "EmpiricalPeriod",
    "GenerationTimeDist",
    "GenerationTimeFromPeriod",
    "EmpiricalGenerationTime",
]

# kernel codes used by the simulation engines
_KERNEL_EXPONENTIAL = 0
_KERNEL_CONSTANT = 1
_KERNEL_GAMMA = 2
_KERNEL_EMPIRICAL = 3
_NO_SAMPLE = np.empty(0, dtype=np.float64)


class InfectiousPeriodDist:
    """Base interface for infectious-period distributions (mass on t > 0)."""

    def mean(self) -> float:
        raise NotImplementedError

    def cv(self) -> float:
        """Coefficient of variation sd(I)/E(I)."""
        raise NotImplementedError

    def survival(self, t):
        """P(I > t), vectorized over t."""
        raise NotImplementedError

    def laplace(self, rho: float) -> float:
        """E[exp(-rho I)]; raises ValueError where the integral diverges."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def _kernel_spec(self) -> tuple[int, float, float, np.ndarray]:
        """(code, a, b, sample) consumed by the compiled engine kernels."""
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialPeriod(InfectiousPeriodDist):
    """I ~ Exp(rate); mean 1/rate, cv = 1. The Markovian choice."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError("exponential rate must be strictly positive")

    def mean(self) -> float:
        return 1.0 / self.rate

    def cv(self) -> float:
        return 1.0

    def survival(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def laplace(self, rho: float) -> float:
        if rho <= -self.rate:
            raise ValueError("Laplace transform diverges for rho <= -rate")
        return self.rate / (self.rate + rho)

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def _kernel_spec(self):
        return _KERNEL_EXPONENTIAL, self.rate, 0.0, _NO_SAMPLE


@dataclass(frozen=True)
class ConstantPeriod(InfectiousPeriodDist):
    """Non-random period I identical to `length` (Reed-Frost choice); cv = 0."""

    length: float

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError("constant period length must be strictly positive")

    def mean(self) -> float:
        return self.length

    def cv(self) -> float:
        return 0.0

    def survival(self, t):
        return np.where(np.asarray(t, dtype=float) < self.length, 1.0, 0.0)

    def laplace(self, rho: float) -> float:
        return math.exp(-rho * self.length)

    def sample(self, rng, size=None):
        if size is None:
            return self.length
        return np.full(size, self.length)

    def _kernel_spec(self):
        return _KERNEL_CONSTANT, self.length, 0.0, _NO_SAMPLE


@dataclass(frozen=True)
class GammaPeriod(InfectiousPeriodDist):
    """I ~ Gamma(shape, rate); mean shape/rate, cv = 1/sqrt(shape).

    Covers the 0 < cv < 1 range sitting between the constant and
    exponential special cases.
    """

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError("gamma shape must be strictly positive")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError("gamma rate must be strictly positive")

    def mean(self) -> float:
        return self.shape / self.rate

    def cv(self) -> float:
        return 1.0 / math.sqrt(self.shape)

    def survival(self, t):
        return special.gammaincc(self.shape, self.rate * np.asarray(t, dtype=float))

    def laplace(self, rho: float) -> float:
        if rho <= -self.rate:
            raise ValueError("Laplace transform diverges for rho <= -rate")
        return (self.rate / (self.rate + rho)) ** self.shape

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def _kernel_spec(self):
        return _KERNEL_GAMMA, self.shape, self.rate, _NO_SAMPLE


@dataclass(frozen=True)
class EmpiricalPeriod(InfectiousPeriodDist):
    """Resampling distribution over an observed sample of durations.

    Draws are uniform over the (sorted) sample entries.
    """

    durations: tuple[float, ...]
    _sorted: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.durations, dtype=float)
        if arr.size == 0:
            raise ValueError("empirical sample must be non-empty")
        if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
            raise ValueError("empirical durations must all be strictly positive")
        object.__setattr__(self, "durations", tuple(float(x) for x in arr))
        object.__setattr__(self, "_sorted", np.sort(arr))

    def mean(self) -> float:
        return float(self._sorted.mean())

    def cv(self) -> float:
        return float(self._sorted.std() / self._sorted.mean())

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        # fraction of sample entries strictly above t
        idx = np.searchsorted(self._sorted, t, side="right")
        return (self._sorted.size - idx) / self._sorted.size

    def laplace(self, rho: float) -> float:
        return float(np.mean(np.exp(-rho * self._sorted)))

    def sample(self, rng, size=None):
        return self._sorted[rng.integers(0, self._sorted.size, size)]

    def _kernel_spec(self):
        return _KERNEL_EMPIRICAL, 0.0, 0.0, self._sorted


class GenerationTimeDist:
    """Density g(t) of the delay from one infection to the ones it causes."""

    def density(self, t):
        raise NotImplementedError

    def laplace(self, rho: float) -> float:
        """Integral of exp(-rho t) g(t) dt over t >= 0."""
        raise NotImplementedError


@dataclass(frozen=True)
class GenerationTimeFromPeriod(GenerationTimeDist):
    """g(t) = P(I > t) / E(I) for an infectious period with constant infectivity."""

    period: InfectiousPeriodDist

    def density(self, t):
        return self.period.survival(t) / self.period.mean()

    def laplace(self, rho: float) -> float:
        # integral of exp(-rho t) P(I > t) dt equals (1 - E[exp(-rho I)]) / rho
        if rho == 0.0:
            return 1.0
        return (1.0 - self.period.laplace(rho)) / (rho * self.period.mean())


@dataclass(frozen=True)
class EmpiricalGenerationTime(GenerationTimeDist):
    """Generation-time density tabulated on a grid of (t, g(t)) points."""

    t: tuple[float, ...]
    g: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if t.size != g.size or t.size < 2:
            raise ValueError("grid needs matching t and g arrays of length >= 2")
        if not np.all(np.diff(t) > 0):
            raise ValueError("grid times must be strictly increasing")
        if np.any(g < 0):
            raise ValueError("density values must be non-negative")
        total = float(np.trapezoid(g, t))
        if abs(total - 1.0) > 1e-8:
            raise ValueError(
                f"density must integrate to 1 on the grid (got {total!r}); "
                "normalize before constructing"
            )
        object.__setattr__(self, "t", tuple(float(x) for x in t))
        object.__setattr__(self, "g", tuple(float(x) for x in g))

    def density(self, t):
        return np.interp(np.asarray(t, dtype=float), self.t, self.g, left=0.0, right=0.0)

    def laplace(self, rho: float) -> float:
        t = np.asarray(self.t)
        g = np.asarray(self.g)
        return float(np.trapezoid(np.exp(-rho * t) * g, t))
