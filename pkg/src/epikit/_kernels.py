"""Compiled hot loops for the stochastic engines.

Pure numerical kernels: they take primitive state plus a numpy Generator and
return flat arrays; all object construction happens in `simulate`. Draw order
inside each kernel is fixed, so a given (seed, parameters) pair is bit
reproducible.
"""

from __future__ import annotations

import heapq

import numpy as np
from numba import njit

RECORD_NONE = 0
RECORD_EVENTS = 1
RECORD_GRID = 2

EVT_INFECTION = 0
EVT_RECOVERY = 1
EVT_BIRTH = 2
EVT_DEATH_S = 3
EVT_DEATH_I = 4
EVT_DEATH_R = 5

NO_CAP = 2**62


@njit(cache=True, nogil=True)
def _grow_f8(a):
    out = np.empty(a.shape[0] * 2, np.float64)
    out[: a.shape[0]] = a
    return out


@njit(cache=True, nogil=True)
def _grow_i8(a):
    out = np.empty(a.shape[0] * 2, np.int64)
    out[: a.shape[0]] = a
    return out


@njit(cache=True, nogil=True)
def _draw_period(rng, code, a, b, sample):
    if code == 0:
        return rng.exponential(1.0 / a)
    if code == 1:
        return a
    if code == 2:
        return rng.gamma(a, 1.0 / b)
    return sample[rng.integers(0, sample.shape[0])]


@njit(cache=True, nogil=True)
def event_sir(rng, n, beta, s0, i0, pcode, pa, pb, psample,
              record_mode, grid_dt, max_infections, horizon):
    """Event-driven closed SIR with an arbitrary infectious-period law.

    Each infective emits contact epochs as a Poisson(beta) process over its
    drawn infectious period (gaps drawn lazily); every contact targets a
    uniform individual among all n (self-contacts are wasted); a contact
    infects iff the target is susceptible. Individuals [0, s0) start
    susceptible, [s0, s0+i0) infective with fresh periods at t = 0, the rest
    immune.
    """
    status = np.zeros(n, np.int8)  # 0 susceptible, 1 infective, 2 removed
    rec_time = np.zeros(n, np.float64)
    inf_time = np.zeros(n, np.float64)
    for j in range(s0, n):
        status[j] = 2
    s_cnt = s0
    i_cnt = 0
    r_cnt = n - s0

    if record_mode == RECORD_EVENTS:
        cap = 2 * (s0 + i0) + 2
    elif record_mode == RECORD_GRID:
        cap = 1024
    else:
        cap = 1
    rec_t = np.empty(cap, np.float64)
    rec_s = np.empty(cap, np.int64)
    rec_i = np.empty(cap, np.int64)
    rec_r = np.empty(cap, np.int64)
    ev_t = np.empty(cap, np.float64)
    ev_k = np.empty(cap, np.int64)
    nrec = 0
    nev = 0
    periods = np.empty(s0 + i0, np.float64)
    nper = 0

    heap = [(0.0, 0, 0) for _ in range(0)]
    for j in range(s0, s0 + i0):
        status[j] = 1
        i_cnt += 1
        r_cnt -= 1
        per = _draw_period(rng, pcode, pa, pb, psample)
        rec_time[j] = per
        heapq.heappush(heap, (per, 1, j))
        gap = rng.exponential(1.0 / beta)
        if gap < per:
            heapq.heappush(heap, (gap, 0, j))

    if record_mode != RECORD_NONE:
        rec_t[0] = 0.0
        rec_s[0] = s_cnt
        rec_i[0] = i_cnt
        rec_r[0] = r_cnt
        nrec = 1
    next_grid = grid_dt

    t = 0.0
    infections = 0
    extinction = 0.0
    early = 0
    while len(heap) > 0:
        te, kind, who = heapq.heappop(heap)
        if te > horizon:
            t = horizon
            break
        if record_mode == RECORD_GRID:
            while next_grid <= te:
                if nrec == rec_t.shape[0]:
                    rec_t = _grow_f8(rec_t)
                    rec_s = _grow_i8(rec_s)
                    rec_i = _grow_i8(rec_i)
                    rec_r = _grow_i8(rec_r)
                rec_t[nrec] = next_grid
                rec_s[nrec] = s_cnt
                rec_i[nrec] = i_cnt
                rec_r[nrec] = r_cnt
                nrec += 1
                next_grid += grid_dt
        t = te
        if kind == 1:  # recovery
            status[who] = 2
            i_cnt -= 1
            r_cnt += 1
            extinction = te
            periods[nper] = te - inf_time[who]
            nper += 1
            if record_mode == RECORD_EVENTS:
                ev_t[nev] = te
                ev_k[nev] = EVT_RECOVERY
                nev += 1
                rec_t[nrec] = te
                rec_s[nrec] = s_cnt
                rec_i[nrec] = i_cnt
                rec_r[nrec] = r_cnt
                nrec += 1
            if i_cnt == 0:
                break
        else:  # contact epoch of infective `who`
            if status[who] != 1:
                continue
            target = rng.integers(0, n)
            infected = False
            if status[target] == 0:
                infected = True
                status[target] = 1
                s_cnt -= 1
                i_cnt += 1
                infections += 1
                per = _draw_period(rng, pcode, pa, pb, psample)
                inf_time[target] = te
                rec_time[target] = te + per
                heapq.heappush(heap, (te + per, 1, target))
                gap = rng.exponential(1.0 / beta)
                if gap < per:
                    heapq.heappush(heap, (te + gap, 0, target))
                if record_mode == RECORD_EVENTS:
                    ev_t[nev] = te
                    ev_k[nev] = EVT_INFECTION
                    nev += 1
                    rec_t[nrec] = te
                    rec_s[nrec] = s_cnt
                    rec_i[nrec] = i_cnt
                    rec_r[nrec] = r_cnt
                    nrec += 1
            gap = rng.exponential(1.0 / beta)
            if te + gap < rec_time[who]:
                heapq.heappush(heap, (te + gap, 0, who))
            if infected and infections >= max_infections:
                early = 1
                break

    if record_mode == RECORD_GRID:
        stop = t if horizon == np.inf else min(t, horizon)
        while next_grid <= stop:
            if nrec == rec_t.shape[0]:
                rec_t = _grow_f8(rec_t)
                rec_s = _grow_i8(rec_s)
                rec_i = _grow_i8(rec_i)
                rec_r = _grow_i8(rec_r)
            rec_t[nrec] = next_grid
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1
            next_grid += grid_dt
        if nrec == rec_t.shape[0]:
            rec_t = _grow_f8(rec_t)
            rec_s = _grow_i8(rec_s)
            rec_i = _grow_i8(rec_i)
            rec_r = _grow_i8(rec_r)
        if nrec == 0 or rec_t[nrec - 1] < t:
            rec_t[nrec] = t
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1

    return (infections, extinction, early,
            rec_t[:nrec], rec_s[:nrec], rec_i[:nrec], rec_r[:nrec],
            ev_t[:nev], ev_k[:nev], periods[:nper])


@njit(cache=True, nogil=True)
def gillespie_sir(rng, n, beta, gamma, s0, i0,
                  record_mode, grid_dt, max_infections, horizon):
    """Direct rate-based simulation of the Markovian closed SIR.

    Jump rates beta*S*I/n (infection) and gamma*I (recovery); equal in law to
    `event_sir` with an exponential infectious period. Recoveries pick a
    uniform current infective so realized periods can be reported.
    """
    s_cnt = s0
    i_cnt = i0
    r_cnt = n - s0 - i0
    inf_times = np.zeros(s0 + i0, np.float64)
    active = i0
    periods = np.empty(s0 + i0, np.float64)
    nper = 0

    if record_mode == RECORD_EVENTS:
        cap = 2 * (s0 + i0) + 2
    elif record_mode == RECORD_GRID:
        cap = 1024
    else:
        cap = 1
    rec_t = np.empty(cap, np.float64)
    rec_s = np.empty(cap, np.int64)
    rec_i = np.empty(cap, np.int64)
    rec_r = np.empty(cap, np.int64)
    ev_t = np.empty(cap, np.float64)
    ev_k = np.empty(cap, np.int64)
    nrec = 0
    nev = 0
    if record_mode != RECORD_NONE:
        rec_t[0] = 0.0
        rec_s[0] = s_cnt
        rec_i[0] = i_cnt
        rec_r[0] = r_cnt
        nrec = 1
    next_grid = grid_dt

    nf = float(n)
    t = 0.0
    infections = 0
    extinction = 0.0
    early = 0
    while i_cnt > 0:
        rate_inf = beta * s_cnt * i_cnt / nf
        rate_tot = rate_inf + gamma * i_cnt
        tn = t + rng.exponential(1.0 / rate_tot)
        if tn > horizon:
            t = horizon
            break
        if record_mode == RECORD_GRID:
            while next_grid <= tn:
                if nrec == rec_t.shape[0]:
                    rec_t = _grow_f8(rec_t)
                    rec_s = _grow_i8(rec_s)
                    rec_i = _grow_i8(rec_i)
                    rec_r = _grow_i8(rec_r)
                rec_t[nrec] = next_grid
                rec_s[nrec] = s_cnt
                rec_i[nrec] = i_cnt
                rec_r[nrec] = r_cnt
                nrec += 1
                next_grid += grid_dt
        t = tn
        if rng.random() * rate_tot < rate_inf:
            s_cnt -= 1
            i_cnt += 1
            infections += 1
            inf_times[active] = t
            active += 1
            kind = EVT_INFECTION
        else:
            idx = rng.integers(0, active)
            periods[nper] = t - inf_times[idx]
            nper += 1
            inf_times[idx] = inf_times[active - 1]
            active -= 1
            i_cnt -= 1
            r_cnt += 1
            extinction = t
            kind = EVT_RECOVERY
        if record_mode == RECORD_EVENTS:
            ev_t[nev] = t
            ev_k[nev] = kind
            nev += 1
            rec_t[nrec] = t
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1
        if kind == EVT_INFECTION and infections >= max_infections:
            early = 1
            break

    if record_mode == RECORD_GRID:
        stop = t if horizon == np.inf else min(t, horizon)
        while next_grid <= stop:
            if nrec == rec_t.shape[0]:
                rec_t = _grow_f8(rec_t)
                rec_s = _grow_i8(rec_s)
                rec_i = _grow_i8(rec_i)
                rec_r = _grow_i8(rec_r)
            rec_t[nrec] = next_grid
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1
            next_grid += grid_dt
        if nrec == rec_t.shape[0]:
            rec_t = _grow_f8(rec_t)
            rec_s = _grow_i8(rec_s)
            rec_i = _grow_i8(rec_i)
            rec_r = _grow_i8(rec_r)
        if nrec == 0 or rec_t[nrec - 1] < t:
            rec_t[nrec] = t
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1

    return (infections, extinction, early,
            rec_t[:nrec], rec_s[:nrec], rec_i[:nrec], rec_r[:nrec],
            ev_t[:nev], ev_k[:nev], periods[:nper])


@njit(cache=True, nogil=True)
def gillespie_endemic(rng, n, beta, gamma, mu, s0, i0, r0c,
                      horizon, record_mode, grid_dt):
    """Markovian SIR with demography: births of susceptibles at rate mu*n,
    deaths at rate mu per individual in every compartment, infection
    beta*S*I/n, recovery gamma*I. Runs to the horizon or disease extinction.
    """
    s_cnt = s0
    i_cnt = i0
    r_cnt = r0c

    if record_mode == RECORD_GRID:
        cap = int(horizon / grid_dt) + 3
    elif record_mode == RECORD_EVENTS:
        cap = 4096
    else:
        cap = 1
    rec_t = np.empty(cap, np.float64)
    rec_s = np.empty(cap, np.int64)
    rec_i = np.empty(cap, np.int64)
    rec_r = np.empty(cap, np.int64)
    ev_t = np.empty(cap, np.float64)
    ev_k = np.empty(cap, np.int64)
    nrec = 0
    nev = 0
    if record_mode != RECORD_NONE:
        rec_t[0] = 0.0
        rec_s[0] = s_cnt
        rec_i[0] = i_cnt
        rec_r[0] = r_cnt
        nrec = 1
    next_grid = grid_dt

    nf = float(n)
    birth = mu * nf
    t = 0.0
    while True:
        rate_inf = beta * s_cnt * i_cnt / nf
        rate_rec = gamma * i_cnt
        d_s = mu * s_cnt
        d_i = mu * i_cnt
        d_r = mu * r_cnt
        total = rate_inf + rate_rec + birth + d_s + d_i + d_r
        tn = t + rng.exponential(1.0 / total)
        if tn > horizon:
            t = horizon
            break
        if record_mode == RECORD_GRID:
            while next_grid <= tn:
                if nrec == rec_t.shape[0]:
                    rec_t = _grow_f8(rec_t)
                    rec_s = _grow_i8(rec_s)
                    rec_i = _grow_i8(rec_i)
                    rec_r = _grow_i8(rec_r)
                rec_t[nrec] = next_grid
                rec_s[nrec] = s_cnt
                rec_i[nrec] = i_cnt
                rec_r[nrec] = r_cnt
                nrec += 1
                next_grid += grid_dt
        t = tn
        u = rng.random() * total
        if u < rate_inf:
            s_cnt -= 1
            i_cnt += 1
            kind = EVT_INFECTION
        elif u < rate_inf + rate_rec:
            i_cnt -= 1
            r_cnt += 1
            kind = EVT_RECOVERY
        elif u < rate_inf + rate_rec + birth:
            s_cnt += 1
            kind = EVT_BIRTH
        elif u < rate_inf + rate_rec + birth + d_s:
            s_cnt -= 1
            kind = EVT_DEATH_S
        elif u < rate_inf + rate_rec + birth + d_s + d_i:
            i_cnt -= 1
            kind = EVT_DEATH_I
        else:
            r_cnt -= 1
            kind = EVT_DEATH_R
        if record_mode == RECORD_EVENTS:
            if nev == ev_t.shape[0]:
                ev_t = _grow_f8(ev_t)
                ev_k = _grow_i8(ev_k)
            if nrec == rec_t.shape[0]:
                rec_t = _grow_f8(rec_t)
                rec_s = _grow_i8(rec_s)
                rec_i = _grow_i8(rec_i)
                rec_r = _grow_i8(rec_r)
            ev_t[nev] = t
            ev_k[nev] = kind
            nev += 1
            rec_t[nrec] = t
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1
        if i_cnt == 0:
            break

    if record_mode == RECORD_GRID:
        while next_grid <= t:
            if nrec == rec_t.shape[0]:
                rec_t = _grow_f8(rec_t)
                rec_s = _grow_i8(rec_s)
                rec_i = _grow_i8(rec_i)
                rec_r = _grow_i8(rec_r)
            rec_t[nrec] = next_grid
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1
            next_grid += grid_dt
        if nrec == rec_t.shape[0]:
            rec_t = _grow_f8(rec_t)
            rec_s = _grow_i8(rec_s)
            rec_i = _grow_i8(rec_i)
            rec_r = _grow_i8(rec_r)
        if nrec == 0 or rec_t[nrec - 1] < t:
            rec_t[nrec] = t
            rec_s[nrec] = s_cnt
            rec_i[nrec] = i_cnt
            rec_r[nrec] = r_cnt
            nrec += 1

    return (t, s_cnt, i_cnt, r_cnt,
            rec_t[:nrec], rec_s[:nrec], rec_i[:nrec], rec_r[:nrec],
            ev_t[:nev], ev_k[:nev])
