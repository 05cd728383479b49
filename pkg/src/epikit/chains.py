"""Exact probabilities for the discrete-time Reed-Frost chain binomial.

Ground truth for small populations: per-chain probabilities from the product
of binomials, and the exact final-size distribution by memoized recursion.
Practical only at desk scale (enumeration bound 25 individuals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChainRecord",
    "chain_probability",
    "final_size_distribution",
    "enumerate_chains",
    "ENUMERATION_BOUND",
]

ENUMERATION_BOUND = 25
_FULL_CHAIN_BOUND = 15  # explicit chain listing grows like 2**s0


@dataclass(frozen=True)
class ChainRecord:
    """One outbreak chain (i_0, i_1, ..., 0) and its exact probability."""

    chain: tuple[int, ...]
    probability: float


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError("transmission probability p must lie in [0, 1]")


def _check_chain(s0: int, i0: int, chain) -> tuple[int, ...]:
    chain = tuple(int(x) for x in chain)
    if len(chain) < 2 or chain[0] != i0:
        raise ValueError("infeasible chain: must start at i0 and contain a terminal 0")
    if chain[-1] != 0 or any(x <= 0 for x in chain[1:-1]) or any(x < 0 for x in chain):
        raise ValueError("infeasible chain: generations must be positive until the terminal 0")
    if sum(chain[1:]) > s0:
        raise ValueError("infeasible chain: more infections than initial susceptibles")
    return chain


def _binom_pmf(k: int, n: int, p: float) -> float:
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def chain_probability(s0: int, i0: int, p: float, chain) -> float:
    """Exact probability of one outbreak chain.

    Product over generations of C(s_k, i_{k+1}) * (1-(1-p)^{i_k})^{i_{k+1}}
    * ((1-p)^{i_k})^{s_k - i_{k+1}}, accumulated in log space.
    """
    _check_p(p)
    if s0 < 0 or i0 < 1:
        raise ValueError("need s0 >= 0 and i0 >= 1")
    chain = _check_chain(s0, i0, chain)
    q = 1.0 - p
    log_prob = 0.0
    s = s0
    for prev, nxt in zip(chain, chain[1:]):
        if q == 0.0:
            p_inf = 1.0
        elif q == 1.0:
            p_inf = 0.0
        else:
            p_inf = -math.expm1(prev * math.log(q))
        if p_inf == 0.0:
            if nxt > 0:
                return 0.0
            # all s escape with certainty, factor 1
        elif p_inf == 1.0:
            if nxt < s:
                return 0.0
        else:
            log_prob += (
                math.lgamma(s + 1)
                - math.lgamma(nxt + 1)
                - math.lgamma(s - nxt + 1)
                + nxt * math.log(p_inf)
                + (s - nxt) * prev * math.log(q)
            )
        s -= nxt
    return math.exp(log_prob)


def final_size_distribution(s0: int, i0: int, p: float) -> np.ndarray:
    """Exact distribution of the number ultimately infected among the s0
    initially susceptible, as a vector indexed 0..s0.

    Memoized recursion over (susceptibles, current infectives); sums to 1
    within 1e-12.
    """
    _check_p(p)
    if s0 < 0 or i0 < 1:
        raise ValueError("need s0 >= 0 and i0 >= 1")
    if s0 + i0 > ENUMERATION_BOUND:
        raise ValueError(f"enumeration bound exceeded: s0 + i0 must be <= {ENUMERATION_BOUND}")
    q = 1.0 - p
    memo: dict[tuple[int, int], np.ndarray] = {}

    def dist(s: int, i: int) -> np.ndarray:
        # distribution of additional infections starting from (s, i)
        if i == 0 or s == 0:
            out = np.zeros(s + 1)
            out[0] = 1.0
            return out
        key = (s, i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if q == 0.0:
            p_inf = 1.0
        elif q == 1.0:
            p_inf = 0.0
        else:
            p_inf = -math.expm1(i * math.log(q))
        out = np.zeros(s + 1)
        for j in range(s + 1):
            w = _binom_pmf(j, s, p_inf)
            if w == 0.0:
                continue
            sub = dist(s - j, j)
            out[j : j + sub.size] += w * sub
        memo[key] = out
        return out

    return dist(s0, i0)


def enumerate_chains(s0: int, i0: int, p: float) -> list[ChainRecord]:
    """All outbreak chains from (s0, i0) with their probabilities.

    Independent of `final_size_distribution`: each chain is priced through
    `chain_probability`. Chain count grows like 2**s0, so this is bounded
    at s0 + i0 <= 15.
    """
    _check_p(p)
    if s0 < 0 or i0 < 1:
        raise ValueError("need s0 >= 0 and i0 >= 1")
    if s0 + i0 > _FULL_CHAIN_BOUND:
        raise ValueError(f"chain enumeration bound exceeded: s0 + i0 must be <= {_FULL_CHAIN_BOUND}")
    records: list[ChainRecord] = []

    def walk(prefix: list[int], s: int):
        i = prefix[-1]
        if i == 0:
            chain = tuple(prefix)
            records.append(ChainRecord(chain, chain_probability(s0, i0, p, chain)))
            return
        for nxt in range(s + 1):
            walk(prefix + [nxt], s - nxt)

    walk([i0], s0)
    return records
