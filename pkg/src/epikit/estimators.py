"""Outbreak estimators: reproduction numbers, growth rates, rates and periods,
vaccination coverage, and model-fit diagnostics.

Each estimator returns an `EstimateWithSE` whose method tag names the data
route it used. Estimators raise `EstimationError` on boundary or degenerate
data rather than clamping; a silently clamped attack rate would bias studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EstimateWithSE, FinalSizeData, Trajectory
from .distributions import GenerationTimeDist
from .theory import integrate_sir

__all__ = [
    "EstimationError",
    "TemporalData",
    "IncidenceSeries",
    "FitReport",
    "estimate_r0_final_size",
    "estimate_infectious_period",
    "estimate_beta",
    "estimate_growth_rate",
    "estimate_r0_emerging",
    "estimate_r0_endemic",
    "estimate_vc_final_size",
    "estimate_vc_endemic",
    "model_fit_report",
]


class EstimationError(ValueError):
    """Estimator undefined or degenerate on the given data."""


@dataclass(frozen=True)
class TemporalData:
    """Complete temporal observation of an outbreak on [t[0], t[-1]]:
    susceptible/infective fractions on a time grid, the completed infectious
    periods, and the community size n behind the fractions."""

    t: np.ndarray
    s_frac: np.ndarray
    i_frac: np.ndarray
    periods: np.ndarray
    n: int

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        s = np.asarray(self.s_frac, dtype=float)
        i = np.asarray(self.i_frac, dtype=float)
        per = np.asarray(self.periods, dtype=float)
        if t.size != s.size or t.size != i.size:
            raise ValueError("t, s_frac and i_frac must have matching lengths")
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValueError("time grid must be strictly increasing")
        if s.size and (s.min() < 0 or s.max() > 1 or i.min() < 0 or i.max() > 1):
            raise ValueError("fractions must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("community size n must be >= 1")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "s_frac", s)
        object.__setattr__(self, "i_frac", i)
        object.__setattr__(self, "periods", per)

    @classmethod
    def from_trajectory(cls, traj: Trajectory, n: int,
                        periods: np.ndarray | None = None) -> "TemporalData":
        per = np.empty(0) if periods is None else np.asarray(periods, dtype=float)
        return cls(traj.t, np.asarray(traj.s) / n, np.asarray(traj.i) / n, per, n)


@dataclass(frozen=True)
class IncidenceSeries:
    """Reported case counts over time (typically weekly)."""

    t: np.ndarray
    cases: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        c = np.asarray(self.cases, dtype=float)
        if t.size != c.size or t.size == 0:
            raise ValueError("times and counts must be non-empty and of equal length")
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(c < 0):
            raise ValueError("counts must be >= 0")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "cases", c)


def _attack_rate(data: FinalSizeData) -> float:
    r = data.corrected_fraction()
    if r <= 0.0 or r >= 1.0:
        raise EstimationError(
            "final-size estimator is undefined at attack rates 0 and 1"
        )
    return r


def _final_size_r0_se(n: int, s: float, r: float, r0_hat: float, cv: float) -> float:
    num = 1.0 + cv * cv * (1.0 - r) * r0_hat * r0_hat * s * s
    den = s * s * r * (1.0 - r)
    return math.sqrt(num / den) / math.sqrt(n * s)


def estimate_r0_final_size(data: FinalSizeData, cv: float = 1.0) -> EstimateWithSE:
    """Invert the final-size relation: r0_hat = -ln(1 - r) / (s r).

    `cv` is the coefficient of variation of the infectious period entering the
    standard error (1 is the conservative default). A reporting fraction on
    the data corrects the attack rate before inversion.
    """
    if cv < 0:
        raise ValueError("cv must be >= 0")
    r = _attack_rate(data)
    r0_hat = -math.log1p(-r) / (data.s * r)
    se = _final_size_r0_se(data.n, data.s, r, r0_hat, cv)
    return EstimateWithSE(r0_hat, se, method="final-size inversion")


def estimate_infectious_period(data: TemporalData) -> EstimateWithSE:
    """Sample mean of the completed infectious periods, se = sd / sqrt(k)."""
    k = data.periods.size
    if k < 2:
        raise EstimationError("need at least two completed infectious periods")
    mean = float(data.periods.mean())
    se = float(data.periods.std(ddof=1) / math.sqrt(k))
    return EstimateWithSE(mean, se, method="mean completed infectious period")


def estimate_beta(data: TemporalData) -> EstimateWithSE:
    """Contact-rate estimator (S(0)-S(t)) / integral of S I dt on the window.

    The denominator is a trapezoid quadrature on the observation grid. The
    reported se is the counting-process approximation beta_hat / sqrt(number
    of observed infections), tagged as such.
    """
    if data.t.size < 2:
        raise EstimationError("need at least two grid points")
    denom = float(np.trapezoid(data.s_frac * data.i_frac, data.t))
    if denom <= 0.0:
        raise EstimationError("no infection pressure observed (integral of S*I is zero)")
    drop = float(data.s_frac[0] - data.s_frac[-1])
    infections = int(round(drop * data.n))
    if infections < 1:
        raise EstimationError("no infections observed in the window")
    beta_hat = drop / denom
    se = beta_hat / math.sqrt(infections)
    return EstimateWithSE(beta_hat, se, method="susceptible-depletion rate (counting-process se)")


def estimate_growth_rate(series: IncidenceSeries,
                         window: tuple[float, float] | None = None) -> EstimateWithSE:
    """OLS slope of log(counts) against time inside the window.

    Zero counts are excluded from the fit (small-count bias documented); at
    least three positive counts are required.
    """
    t = series.t
    c = series.cases
    if window is not None:
        lo, hi = window
        keep = (t >= lo) & (t <= hi)
        t, c = t[keep], c[keep]
    pos = c > 0
    t, c = t[pos], c[pos]
    if t.size < 3:
        raise EstimationError("need at least three positive counts in the window")
    y = np.log(c)
    tbar = t.mean()
    ybar = y.mean()
    sxx = float(np.sum((t - tbar) ** 2))
    if sxx == 0.0:
        raise EstimationError("degenerate time window")
    slope = float(np.sum((t - tbar) * (y - ybar)) / sxx)
    resid = y - ybar - slope * (t - tbar)
    sigma2 = float(np.sum(resid**2) / (t.size - 2))
    se = math.sqrt(sigma2 / sxx)
    return EstimateWithSE(slope, se, method="log-incidence regression")


def estimate_r0_emerging(series: IncidenceSeries, g: GenerationTimeDist,
                         window: tuple[float, float] | None = None) -> EstimateWithSE:
    """Growth rate from the incidence, inverted through the generation-time
    transform: r0_hat = 1 / integral exp(-rho t) g(t) dt, delta-method se."""
    rho = estimate_growth_rate(series, window)
    value = g.laplace(rho.estimate)
    r0_hat = 1.0 / value
    h = 1e-5
    dl = (g.laplace(rho.estimate + h) - g.laplace(rho.estimate - h)) / (2 * h)
    dr0 = -dl / (value * value)
    se = abs(dr0) * rho.se if rho.se is not None else None
    return EstimateWithSE(r0_hat, se, method="growth rate + generation-time inversion")


def estimate_r0_endemic(avg_age_of_infection: float, avg_lifespan: float) -> EstimateWithSE:
    """r0_hat = lifespan / age at infection (the endemic susceptible fraction
    is age/lifespan). No plug-in standard error is available."""
    a, ell = avg_age_of_infection, avg_lifespan
    if not (0 < a < ell):
        raise EstimationError("need 0 < average age of infection < average lifespan")
    return EstimateWithSE(ell / a, None, method="endemic susceptible fraction (no se available)")


def estimate_vc_final_size(data: FinalSizeData, cv: float = 1.0) -> EstimateWithSE:
    """Critical vaccination coverage from final-size data, 1 - 1/r0_hat,
    with se(vc) = se(r0) / r0_hat^2."""
    r0 = estimate_r0_final_size(data, cv)
    vc = 1.0 - 1.0 / r0.estimate
    se = r0.se / (r0.estimate * r0.estimate)
    return EstimateWithSE(vc, se, method="final-size inversion (coverage)")


def estimate_vc_endemic(avg_age_of_infection: float, avg_lifespan: float) -> EstimateWithSE:
    """Coverage needed to eliminate an endemic disease: 1 - a/lifespan."""
    a, ell = avg_age_of_infection, avg_lifespan
    if not (0 < a < ell):
        raise EstimationError("need 0 < average age of infection < average lifespan")
    return EstimateWithSE(1.0 - a / ell, None,
                          method="endemic susceptible fraction (no se available)")


@dataclass(frozen=True)
class FitReport:
    """Observed-vs-fitted discrepancies per compartment (max and rms over the
    observation grid)."""

    s_max: float
    i_max: float
    r_max: float
    s_rms: float
    i_rms: float
    r_rms: float

    def max_discrepancy(self) -> float:
        return max(self.s_max, self.i_max, self.r_max)


def model_fit_report(data: TemporalData, beta_hat: float, mean_period_hat: float,
                     step: float = 1e-3) -> FitReport:
    """Integrate the deterministic system under the fitted parameters and
    report discrepancies against the observed curves.

    A large discrepancy flags model misfit (for instance an unmodelled
    heterogeneity).
    """
    if data.t.size == 0:
        return FitReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    if beta_hat <= 0 or mean_period_hat <= 0:
        raise EstimationError("fitted beta and mean infectious period must be > 0")
    t0 = float(data.t[0])
    horizon = float(data.t[-1] - t0)
    s_obs = data.s_frac
    i_obs = data.i_frac
    r_obs = np.maximum(1.0 - s_obs - i_obs, 0.0)  # guard float dust at 0
    initial = (float(s_obs[0]), float(i_obs[0]), float(r_obs[0]))
    if horizon <= 0:
        return FitReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    curve = integrate_sir(initial, horizon, beta=beta_hat,
                          gamma=1.0 / mean_period_hat, step=step)
    s_fit = np.interp(data.t - t0, curve.t, curve.s)
    i_fit = np.interp(data.t - t0, curve.t, curve.i)
    r_fit = np.interp(data.t - t0, curve.t, curve.r)

    def metrics(obs, fit):
        d = np.abs(obs - fit)
        return float(d.max()), float(math.sqrt(np.mean(d * d)))

    s_max, s_rms = metrics(s_obs, s_fit)
    i_max, i_rms = metrics(i_obs, i_fit)
    r_max, r_rms = metrics(r_obs, r_fit)
    return FitReport(s_max, i_max, r_max, s_rms, i_rms, r_rms)
