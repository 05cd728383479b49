"""Stochastic simulation engines.

`simulate_sir` is the exact event-driven engine for an arbitrary infectious
period; `simulate_sir_gillespie` the direct rate-based engine for the
Markovian special case (equal in law); `simulate_reed_frost` the discrete
generation chain; `simulate_endemic` the Markovian model with demography.
`run_replicates` fans a parameter set out over deterministic per-replicate
streams and summarizes take-offs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, theory
from ._kernels import RECORD_EVENTS, RECORD_GRID, RECORD_NONE
from .core import EpidemicParams, Trajectory, replicate_rng, validate
from .distributions import ExponentialPeriod

__all__ = [
    "ReplicateResult",
    "ReplicateSummary",
    "ChainState",
    "take_off_threshold",
    "simulate_sir",
    "simulate_sir_gillespie",
    "simulate_reed_frost",
    "simulate_endemic",
    "run_replicates",
]

# full event logs are kept up to this population size; above it trajectories
# default to fixed-grid snapshots
FULL_RECORD_MAX_N = 10_000
DEFAULT_GRID_DT = 0.1


@dataclass(frozen=True)
class ReplicateResult:
    """Outcome of one closed-population run.

    `final_size` counts ever-infected among the initially susceptible (the
    index cases are not included). `extinction_time` is the time of the last
    recovery; NaN when the run was stopped early at `max_infections`
    (early-stopped runs are flagged as take-offs, since they were still
    growing when capped). `trajectory` is None when recording was off;
    `periods` holds the realized infectious periods completed during the run.
    """

    trajectory: Trajectory | None
    final_size: int
    extinction_time: float
    took_off: bool
    periods: np.ndarray | None = None


@dataclass(frozen=True)
class ReplicateSummary:
    """Aggregate over a batch of replicates.

    Final fractions are relative to the initially susceptible count; mean/sd
    are over the replicates that took off (NaN when there are none/too few).
    """

    count: int
    threshold: float
    take_off_count: int
    take_off_fraction: float
    mean_final_fraction: float
    sd_final_fraction: float


@dataclass(frozen=True)
class ChainState:
    """One generation of the discrete Reed-Frost chain: `infected` new cases
    in generation `generation`, `susceptible` remaining afterwards."""

    generation: int
    infected: int
    susceptible: int


def take_off_threshold(n: int) -> float:
    """Final-size cutoff separating minor from major outbreaks.

    The asymptotic theory gives no finite-n rule; any point inside the gap of
    the bimodal final-size distribution works. Overridable wherever used.
    """
    return max(10.0, 0.1 * math.sqrt(n) * math.log(n))


def _record_code(record: str, n: int) -> int:
    if record == "auto":
        record = "events" if n <= FULL_RECORD_MAX_N else "grid"
    try:
        return {"none": RECORD_NONE, "events": RECORD_EVENTS, "grid": RECORD_GRID}[record]
    except KeyError:
        raise ValueError(f"unknown record mode {record!r}") from None


def _build_trajectory(code, rec_t, rec_s, rec_i, rec_r, ev_t, ev_k) -> Trajectory | None:
    if code == RECORD_NONE:
        return None
    if code == RECORD_EVENTS:
        return Trajectory(np.asarray(rec_t), np.asarray(rec_s), np.asarray(rec_i),
                          np.asarray(rec_r), np.asarray(ev_t), np.asarray(ev_k))
    return Trajectory(np.asarray(rec_t), np.asarray(rec_s), np.asarray(rec_i),
                      np.asarray(rec_r))


def _result(params, threshold, code, out) -> ReplicateResult:
    infections, extinction, early, rec_t, rec_s, rec_i, rec_r, ev_t, ev_k, periods = out
    traj = _build_trajectory(code, rec_t, rec_s, rec_i, rec_r, ev_t, ev_k)
    if threshold is None:
        threshold = take_off_threshold(params.n)
    if early:
        return ReplicateResult(traj, int(infections), math.nan, True, np.asarray(periods))
    return ReplicateResult(traj, int(infections), float(extinction),
                           infections > threshold, np.asarray(periods))


def simulate_sir(params: EpidemicParams, *, record: str = "auto",
                 grid_dt: float = DEFAULT_GRID_DT, max_infections: int | None = None,
                 horizon: float | None = None, threshold: float | None = None,
                 replicate: int = 0) -> ReplicateResult:
    """One exact event-driven realization of the closed epidemic.

    Infectives emit contact epochs at rate beta over their drawn infectious
    period; each contact hits a uniform member of the community and infects
    iff that member is susceptible. For an exponential period this coincides
    in law with the Markov chain of rates beta*S*I/n and gamma*I.
    """
    validate(params)
    if params.death_rate != 0:
        raise ValueError("simulate_sir is the closed-population engine (mu = 0)")
    s0, i0, _ = params.initial_counts()
    code = _record_code(record, params.n)
    pcode, pa, pb, psample = params.infectious_period._kernel_spec()
    rng = replicate_rng(params.seed, replicate)
    out = _kernels.event_sir(
        rng, params.n, params.beta, s0, i0, pcode, pa, pb, psample,
        code, grid_dt,
        _kernels.NO_CAP if max_infections is None else int(max_infections),
        math.inf if horizon is None else float(horizon),
    )
    return _result(params, threshold, code, out)


def simulate_sir_gillespie(params: EpidemicParams, *, record: str = "auto",
                           grid_dt: float = DEFAULT_GRID_DT,
                           max_infections: int | None = None,
                           horizon: float | None = None,
                           threshold: float | None = None,
                           replicate: int = 0) -> ReplicateResult:
    """Direct rate-based realization of the Markovian closed epidemic."""
    validate(params)
    if params.death_rate != 0:
        raise ValueError("simulate_sir_gillespie is the closed-population engine (mu = 0)")
    if not isinstance(params.infectious_period, ExponentialPeriod):
        raise ValueError("the rate-based engine requires an exponential infectious period")
    s0, i0, _ = params.initial_counts()
    code = _record_code(record, params.n)
    rng = replicate_rng(params.seed, replicate)
    out = _kernels.gillespie_sir(
        rng, params.n, params.beta, params.infectious_period.rate, s0, i0,
        code, grid_dt,
        _kernels.NO_CAP if max_infections is None else int(max_infections),
        math.inf if horizon is None else float(horizon),
    )
    return _result(params, threshold, code, out)


def simulate_reed_frost(s0: int, i0: int, p: float, seed: int, *,
                        replicate: int = 0) -> list[ChainState]:
    """Discrete-generation Reed-Frost chain.

    Iterates I_{k+1} ~ Bin(s_k, 1 - (1-p)^{i_k}), s_{k+1} = s_k - I_{k+1}
    until no new infections; returns every generation including the
    terminal zero.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError("transmission probability p must lie in [0, 1]")
    if s0 < 0 or i0 < 1:
        raise ValueError("need s0 >= 0 and i0 >= 1")
    rng = replicate_rng(seed, replicate)
    q = 1.0 - p
    states = [ChainState(0, i0, s0)]
    s, i, k = s0, i0, 0
    while i > 0:
        p_inf = -math.expm1(i * math.log(q)) if q > 0.0 else 1.0
        nxt = int(rng.binomial(s, p_inf))
        s -= nxt
        k += 1
        states.append(ChainState(k, nxt, s))
        i = nxt
    return states


def simulate_endemic(params: EpidemicParams, horizon: float, *,
                     record: str = "grid", grid_dt: float = DEFAULT_GRID_DT,
                     start: str = "auto", replicate: int = 0) -> Trajectory:
    """Markovian SIR with demography (mu > 0), run to `horizon` or disease
    extinction.

    `start="endemic"` begins at the deterministic equilibrium rounded to
    integers (the quasi-stationary regime of interest); `start="index"` begins
    fully susceptible apart from the index cases and any immune fraction;
    `start="auto"` picks "endemic" when r0 > 1, else "index".
    """
    if params.death_rate <= 0:
        raise ValueError("simulate_endemic requires mu > 0")
    if not isinstance(params.infectious_period, ExponentialPeriod):
        raise ValueError("the demographic engine supports only the Markovian model "
                         "(exponential infectious period)")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    if params.beta < 0 or params.n < 1 or params.initial_infectives < 0:
        raise ValueError("need beta >= 0, n >= 1 and initial_infectives >= 0")
    if record == "none":
        raise ValueError("simulate_endemic returns a trajectory; use record='grid' or 'events'")
    gamma = params.infectious_period.rate
    mu = params.death_rate
    r0 = params.beta / (gamma + mu)
    if start == "auto":
        start = "endemic" if r0 > 1.0 else "index"
    if start == "endemic":
        s_frac, i_frac, _ = theory.endemic_level(params.beta, gamma, mu)
        s0 = int(round(s_frac * params.n))
        i0 = max(1, int(round(i_frac * params.n)))
        r0c = params.n - s0 - i0
    elif start == "index":
        s0, i0, r0c = params.initial_counts()
    else:
        raise ValueError(f"unknown start mode {start!r}")
    code = _record_code(record, params.n)
    rng = replicate_rng(params.seed, replicate)
    out = _kernels.gillespie_endemic(
        rng, params.n, params.beta, gamma, mu, s0, i0, r0c,
        float(horizon), code, grid_dt,
    )
    _, _, _, _, rec_t, rec_s, rec_i, rec_r, ev_t, ev_k = out
    return _build_trajectory(code, rec_t, rec_s, rec_i, rec_r, ev_t, ev_k)


def run_replicates(params: EpidemicParams, count: int, horizon: float | None = None, *,
                   engine: str = "auto", record: str = "none",
                   grid_dt: float = DEFAULT_GRID_DT, threshold: float | None = None,
                   max_infections: int | None = None,
                   ) -> tuple[list[ReplicateResult], ReplicateSummary]:
    """Run `count` closed-population replicates on deterministic per-replicate
    streams derived from params.seed, plus a take-off summary.

    `engine="auto"` uses the rate-based engine for the exponential period
    (equal in law to the event-driven one) and the event-driven engine
    otherwise.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    validate(params)
    if params.death_rate != 0:
        raise ValueError("run_replicates summarizes closed-population runs (mu = 0)")
    if engine == "auto":
        engine = "gillespie" if isinstance(params.infectious_period, ExponentialPeriod) else "event"
    if engine == "gillespie":
        run_one = simulate_sir_gillespie
    elif engine == "event":
        run_one = simulate_sir
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if threshold is None:
        threshold = take_off_threshold(params.n)
    results = [
        run_one(params, record=record, grid_dt=grid_dt, max_infections=max_infections,
                horizon=horizon, threshold=threshold, replicate=k)
        for k in range(count)
    ]
    s0 = params.initial_counts()[0]
    took = [res for res in results if res.took_off]
    fractions = np.array([res.final_size / s0 for res in took]) if s0 > 0 else np.array([])
    mean = float(fractions.mean()) if fractions.size else math.nan
    sd = float(fractions.std(ddof=1)) if fractions.size > 1 else math.nan
    summary = ReplicateSummary(
        count=count,
        threshold=float(threshold),
        take_off_count=len(took),
        take_off_fraction=len(took) / count,
        mean_final_fraction=mean,
        sd_final_fraction=sd,
    )
    return results, summary
