"""Deterministic and asymptotic computations for SIR-family epidemics.

ODE integration of the closed and demographic systems, the final-size
equation, branching extinction probability, Malthusian growth rate and its
generation-time inversion, the endemic equilibrium, vaccination thresholds,
and the multitype reproduction number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import EpidemicParams, validate
from .distributions import ExponentialPeriod, GenerationTimeDist

__all__ = [
    "DeterministicCurve",
    "integrate_sir",
    "integrate_endemic",
    "solve_final_size",
    "extinction_probability",
    "take_off_probability",
    "malthusian_rate",
    "lotka_r0",
    "endemic_level",
    "effective_r",
    "vaccinated_r",
    "critical_vaccination",
    "multitype_r0",
]


@dataclass(frozen=True)
class DeterministicCurve:
    """Grid of (t, s, i, r) compartment fractions from an ODE solve."""

    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray

    def terminal(self) -> tuple[float, float, float]:
        return float(self.s[-1]), float(self.i[-1]), float(self.r[-1])


def _rk4_sir(beta, gamma, mu, initial, horizon, step):
    s, i, r = (float(x) for x in initial)
    if step <= 0:
        raise ValueError("step must be > 0")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    if min(s, i, r) < 0 or abs(s + i + r - 1.0) > 1e-9:
        raise ValueError("initial fractions must be non-negative and sum to 1")
    steps = max(1, int(round(horizon / step)))
    ts = np.empty(steps + 1)
    ss = np.empty(steps + 1)
    ii = np.empty(steps + 1)
    rr = np.empty(steps + 1)
    ts[0], ss[0], ii[0], rr[0] = 0.0, s, i, r

    def deriv(s, i, r):
        inf = beta * s * i
        return (mu - inf - mu * s, inf - gamma * i - mu * i, gamma * i - mu * r)

    h = step
    for k in range(steps):
        ds1, di1, dr1 = deriv(s, i, r)
        ds2, di2, dr2 = deriv(s + 0.5 * h * ds1, i + 0.5 * h * di1, r + 0.5 * h * dr1)
        ds3, di3, dr3 = deriv(s + 0.5 * h * ds2, i + 0.5 * h * di2, r + 0.5 * h * dr2)
        ds4, di4, dr4 = deriv(s + h * ds3, i + h * di3, r + h * dr3)
        s += h * (ds1 + 2 * ds2 + 2 * ds3 + ds4) / 6.0
        i += h * (di1 + 2 * di2 + 2 * di3 + di4) / 6.0
        r += h * (dr1 + 2 * dr2 + 2 * dr3 + dr4) / 6.0
        ts[k + 1] = (k + 1) * h
        ss[k + 1], ii[k + 1], rr[k + 1] = s, i, r
    return DeterministicCurve(ts, ss, ii, rr)


def integrate_sir(initial, horizon, *, beta=None, gamma=None, r0=None, step=1e-3):
    """Fixed-step RK4 solve of the closed deterministic system
    s' = -beta s i, i' = beta s i - gamma i, r' = gamma i.

    Pass (beta, gamma), or just r0 to run in units of the mean infectious
    period (gamma = 1, beta = r0).
    """
    if r0 is not None:
        if beta is not None or gamma is not None:
            raise ValueError("pass either r0 or (beta, gamma), not both")
        beta, gamma = float(r0), 1.0
    if beta is None or gamma is None:
        raise ValueError("beta and gamma are required when r0 is not given")
    return _rk4_sir(beta, gamma, 0.0, initial, horizon, step)


def integrate_endemic(beta, gamma, mu, initial, horizon, step=1e-3):
    """RK4 solve of the demographic system with birth influx mu and per-capita
    death rate mu in every compartment. mu = 0 reduces to `integrate_sir`."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    return _rk4_sir(beta, gamma, mu, initial, horizon, step)


def solve_final_size(r0: float, s: float = 1.0) -> float:
    """Largest root in [0, 1) of the final size equation 1 - r = exp(-r0*s*r).

    Returns the fraction of the initially susceptible ultimately infected in a
    major outbreak; 0 when r0*s <= 1 (no major outbreak possible).
    """
    if r0 < 0 or not math.isfinite(r0):
        raise ValueError("r0 must be a finite non-negative number")
    if not (0.0 < s <= 1.0):
        raise ValueError("susceptible fraction s must be in (0, 1]")
    a = r0 * s
    if a <= 1.0:
        return 0.0

    def f(x):
        return 1.0 - x - math.exp(-a * x)

    # f(0) = 0 is the trivial root; f is positive just above 0 and negative at 1
    lo, hi = 1e-12, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(50):
        fx = f(x)
        if abs(fx) < 1e-13:
            break
        x -= fx / (-1.0 + a * math.exp(-a * x))
    return x


def extinction_probability(params: EpidemicParams) -> float:
    """Probability that the outbreak dies out in the branching approximation.

    Smallest fixed point of the offspring pgf, raised to the number of initial
    infectives (independent lineages). Equals 1 when r0 <= 1; 1/r0 per lineage
    for the Markovian (exponential-period) model.
    """
    validate(params)
    if params.death_rate != 0:
        raise ValueError("extinction probability applies to the closed model (mu = 0)")
    r0 = params.r0()
    if r0 <= 1.0:
        return 1.0
    period = params.infectious_period
    if isinstance(period, ExponentialPeriod):
        q = 1.0 / r0
    else:
        # monotone fixed-point iteration q <- pgf(q) from 0
        q = 0.0
        for _ in range(1_000_000):
            nxt = period.laplace(params.beta * (1.0 - q))
            if abs(nxt - q) < 1e-14:
                q = nxt
                break
            q = nxt
    return q ** params.initial_infectives


def take_off_probability(params: EpidemicParams) -> float:
    """Probability of a major outbreak, 1 - extinction_probability."""
    return 1.0 - extinction_probability(params)


def malthusian_rate(params: EpidemicParams) -> float:
    """Exponential growth rate rho of the emerging epidemic: the root of
    integral of exp(-rho t) * beta * P(I > t) dt = 1.

    Closed forms: rho = beta - gamma for the exponential period; for a
    constant period rho solves beta * (1 - exp(-rho*iota)) / rho = 1.
    """
    validate(params)
    if params.death_rate != 0:
        raise ValueError("growth rate applies to the closed model (mu = 0)")
    r0 = params.r0()
    if r0 <= 1.0:
        raise ValueError("growth rate requires a supercritical epidemic (r0 > 1)")
    period = params.infectious_period
    if isinstance(period, ExponentialPeriod):
        return params.beta - period.rate

    def lhs_minus_one(rho):
        # integral of exp(-rho t) P(I>t) dt = (1 - E exp(-rho I)) / rho
        return params.beta * (1.0 - period.laplace(rho)) / rho - 1.0

    lo = 1e-12
    hi = 1.0
    for _ in range(200):
        if lhs_minus_one(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ValueError("failed to bracket the growth rate")
    rho = brentq(lhs_minus_one, lo, hi, xtol=1e-14, rtol=8.9e-16)
    if abs(lhs_minus_one(rho)) > 1e-10:
        raise RuntimeError("growth-rate residual above tolerance")
    return rho


def lotka_r0(rho: float, g: GenerationTimeDist) -> float:
    """Invert growth rate rho into r0 via integral exp(-rho t) g(t) dt = 1/r0."""
    value = g.laplace(rho)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError("generation-time transform is not finite and positive at rho")
    return 1.0 / value


def endemic_level(beta: float, gamma: float, mu: float) -> tuple[float, float, float]:
    """Stationary fractions (s, i, r) of the demographic model for r0 > 1.

    s = 1/r0, i = eps*(r0-1)/r0 with eps the infectious-period share of a
    lifetime, eps = (1/gamma) / (1/mu + 1/gamma).
    """
    if gamma <= 0 or beta <= 0 or mu < 0:
        raise ValueError("beta, gamma must be > 0 and mu >= 0")
    r0 = beta / (gamma + mu)
    if r0 <= 1.0:
        raise ValueError("no endemic level: r0 = beta/(gamma+mu) must exceed 1")
    eps = mu / (mu + gamma)
    s = 1.0 / r0
    i = eps * (r0 - 1.0) / r0
    return s, i, 1.0 - s - i


def effective_r(r0: float, s: float) -> float:
    """Effective reproduction number r0 * s in a partially immune community."""
    if r0 < 0 or not (0.0 <= s <= 1.0):
        raise ValueError("need r0 >= 0 and s in [0, 1]")
    return r0 * s


def vaccinated_r(r0: float, v: float) -> float:
    """Reproduction number r0 * (1 - v) after vaccinating a fraction v."""
    if r0 < 0 or not (0.0 <= v <= 1.0):
        raise ValueError("need r0 >= 0 and v in [0, 1]")
    return r0 * (1.0 - v)


def critical_vaccination(r0: float) -> float:
    """Critical vaccination coverage 1 - 1/r0 (0 when r0 <= 1)."""
    if r0 < 0:
        raise ValueError("r0 must be >= 0")
    if r0 <= 1.0:
        return 0.0
    return 1.0 - 1.0 / r0


def multitype_r0(m, max_iter: int = 100_000) -> float:
    """Spectral radius of a non-negative next-generation matrix.

    Power iteration on the shifted matrix m + I (the shift makes the dominant
    eigenvalue simple for periodic matrices such as [[0, 2], [0.5, 0]]);
    raises RuntimeError if the iteration does not settle.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("next-generation matrix must be square and non-empty")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValueError("next-generation matrix entries must be finite and >= 0")
    k = a.shape[0]
    shifted = a + np.eye(k)
    v = np.full(k, 1.0 / k)
    lam_prev = None
    for _ in range(max_iter):
        w = shifted @ v
        lam = float(w.sum())
        v = w / lam
        if lam_prev is not None and abs(lam - lam_prev) <= 1e-12 * max(1.0, lam):
            return lam - 1.0
        lam_prev = lam
    raise RuntimeError("power iteration failed to converge on the spectral radius")
