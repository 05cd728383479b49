"""Shared domain types, parameter validation, and the reproducible RNG contract.

Every stochastic engine draws from a `numpy.random.Generator` obtained through
`replicate_rng(seed, replicate)`. Streams are derived hierarchically
(run seed -> replicate index) with `SeedSequence` spawn keys, so replicate k of
a run is reproducible independently of execution order or worker layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import ExponentialPeriod, InfectiousPeriodDist

__all__ = [
    "EpidemicParams",
    "Trajectory",
    "FinalSizeData",
    "EstimateWithSE",
    "Violation",
    "ValidationError",
    "validate",
    "offspring_pgf",
    "replicate_rng",
    "EVENT_NAMES",
]

# event kind codes shared with the engine kernels
EVENT_NAMES = ("infection", "recovery", "birth", "death-S", "death-I", "death-R")


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent, order-reproducible stream for one replicate of one run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


@dataclass(frozen=True)
class EpidemicParams:
    """Parameters of an SIR-family epidemic in a community of size n.

    `beta` is the rate of infectious contacts per infective; each contact
    targets a uniformly chosen member of the community. `death_rate` (mu) is 0
    for a closed population; mu > 0 adds demography (births at rate mu*n,
    deaths at rate mu per individual). `immune_fraction` is the initially
    immune share of the community.
    """

    n: int
    beta: float
    infectious_period: InfectiousPeriodDist
    initial_infectives: int = 1
    immune_fraction: float = 0.0
    death_rate: float = 0.0
    seed: int = 0

    def r0(self) -> float:
        """Basic reproduction number.

        beta * E(I) in the closed model; beta / (gamma + mu) for the
        Markovian model with demography.
        """
        if self.death_rate == 0:
            return self.beta * self.infectious_period.mean()
        if isinstance(self.infectious_period, ExponentialPeriod):
            return self.beta / (self.infectious_period.rate + self.death_rate)
        raise ValueError(
            "r0 with demography is defined for the exponential infectious period only"
        )

    def immune_count(self) -> int:
        return int(round(self.immune_fraction * self.n))

    def initial_counts(self) -> tuple[int, int, int]:
        """(S, I, R) at time zero; initially immune individuals sit in R."""
        r = self.immune_count()
        i = self.initial_infectives
        return self.n - i - r, i, r


@dataclass(frozen=True)
class Violation:
    field: str
    message: str


class ValidationError(ValueError):
    """Raised by `validate` with every violated constraint attached."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


def validate(params: EpidemicParams) -> None:
    """Check all parameter invariants; raise ValidationError listing each failure."""
    bad: list[Violation] = []
    if not isinstance(params.n, (int, np.integer)) or params.n < 1:
        bad.append(Violation("n", "n must be a positive integer"))
    if not (math.isfinite(params.beta) and params.beta > 0):
        bad.append(Violation("beta", "beta must be > 0"))
    if not isinstance(params.initial_infectives, (int, np.integer)) or params.initial_infectives < 1:
        bad.append(Violation("initial_infectives", "initial_infectives must be >= 1"))
    if not (0.0 <= params.immune_fraction < 1.0):
        bad.append(Violation("immune_fraction", "no susceptibles: immune_fraction must be in [0, 1)"))
    if not (math.isfinite(params.death_rate) and params.death_rate >= 0):
        bad.append(Violation("death_rate", "death_rate must be >= 0"))
    if not isinstance(params.seed, (int, np.integer)) or not (0 <= int(params.seed) < 2**64):
        bad.append(Violation("seed", "seed must be a non-negative 64-bit integer"))
    if not isinstance(params.infectious_period, InfectiousPeriodDist):
        bad.append(Violation("infectious_period", "infectious_period must be an InfectiousPeriodDist"))
    if isinstance(params.n, (int, np.integer)) and isinstance(params.initial_infectives, (int, np.integer)):
        if params.n >= 1 and params.initial_infectives >= 1 and 0.0 <= params.immune_fraction <= 1.0:
            if params.n < params.initial_infectives:
                bad.append(Violation("n", "n must be at least initial_infectives"))
            elif params.immune_count() + params.initial_infectives > params.n:
                bad.append(
                    Violation(
                        "immune_fraction",
                        "no susceptibles: immune individuals plus initial infectives exceed n",
                    )
                )
    if bad:
        raise ValidationError(bad)


def offspring_pgf(params: EpidemicParams, z: float) -> float:
    """E(z^X) for the early-outbreak offspring count X ~ MixPoi(beta * I).

    Conditional on I, X is Poisson(beta * I), so the pgf equals the Laplace
    transform of I at beta * (1 - z): exp(beta*iota*(z-1)) for a constant
    period, gamma/(gamma + beta*(1-z)) for the exponential one (a geometric
    pgf with support {0, 1, ...} and mean beta/gamma).
    """
    if not (0.0 <= z <= 1.0):
        raise ValueError("z must lie in [0, 1]")
    validate(params)
    if params.death_rate != 0:
        raise ValueError("offspring distribution is defined for the closed model (mu = 0)")
    return params.infectious_period.laplace(params.beta * (1.0 - z))


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped (S, I, R) counts from one stochastic run or ODE solve.

    `t`, `s`, `i`, `r` are parallel arrays (strictly increasing t). For
    event-level recordings, `event_times`/`event_kinds` hold one entry per
    transition, with kind codes indexing EVENT_NAMES.
    """

    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    event_times: np.ndarray | None = None
    event_kinds: np.ndarray | None = None

    def events(self) -> list[tuple[float, str]]:
        if self.event_times is None:
            return []
        return [(float(t), EVENT_NAMES[int(k)]) for t, k in zip(self.event_times, self.event_kinds)]


@dataclass(frozen=True)
class FinalSizeData:
    """Final-size observation: fraction r_tilde_s of the initially susceptible
    (an initial fraction s of the community of size n) that got infected.

    `reporting_fraction` is the share of true cases that get reported; when
    set, `r_tilde_s` is understood as the *reported* fraction.
    """

    n: int
    s: float
    r_tilde_s: float
    reporting_fraction: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("population size n must be >= 1")
        if not (0.0 < self.s <= 1.0):
            raise ValueError("initial susceptible fraction s must be in (0, 1]")
        if not (0.0 <= self.r_tilde_s <= 1.0):
            raise ValueError("observed infected fraction must be in [0, 1]")
        if self.reporting_fraction is not None:
            if not (0.0 < self.reporting_fraction <= 1.0):
                raise ValueError("reporting fraction must be in (0, 1]")
            if self.r_tilde_s / self.reporting_fraction > 1.0:
                raise ValueError("corrected fraction r_tilde_s / reporting_fraction exceeds 1")

    def corrected_fraction(self) -> float:
        """Attack rate after undoing under-reporting."""
        if self.reporting_fraction is None:
            return self.r_tilde_s
        return self.r_tilde_s / self.reporting_fraction


@dataclass(frozen=True)
class EstimateWithSE:
    """Point estimate with standard error, 95% CI and a method tag.

    `se` may be None where no standard error is available; `ci95` is then
    None as well. Otherwise ci95 = estimate +- 1.96 * se.
    """

    estimate: float
    se: float | None = None
    ci95: tuple[float, float] | None = None
    method: str = ""

    def __post_init__(self):
        if self.se is not None:
            if not (self.se >= 0):
                raise ValueError("standard error must be >= 0")
            if self.ci95 is None:
                half = 1.96 * self.se
                object.__setattr__(self, "ci95", (self.estimate - half, self.estimate + half))
        if self.ci95 is not None:
            lo, hi = self.ci95
            if not (lo <= self.estimate <= hi):
                raise ValueError("ci95 must bracket the estimate")

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "se": self.se,
            "ci95": list(self.ci95) if self.ci95 is not None else None,
            "method": self.method,
        }
