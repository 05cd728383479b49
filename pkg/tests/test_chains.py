import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epikit.chains import (chain_probability, enumerate_chains,
                           final_size_distribution)

# exact value of the worked 10-person chain (1,2,3,1,0) at p = 0.2, computed
# independently with rational arithmetic before the build
WORKED_CHAIN_PROB = 0.011098071050367486

# exact final-size distribution for s0=5, i0=1, p=0.3 (rational arithmetic)
EXACT_DIST_P03 = np.array([
    0.16807,
    0.086472014999999999,
    0.08716379112,
    0.12604506794459999,
    0.21534849235115999,
    0.31690063358423998,
])


class TestChainProbability:
    def test_everyone_escapes(self):
        # chain (i0, 0): all s0 escape i0 infectives once
        assert chain_probability(9, 1, 0.2, (1, 0)) == pytest.approx(0.8**9, rel=1e-12)
        assert chain_probability(5, 2, 0.3, (2, 0)) == pytest.approx(0.7**10, rel=1e-12)

    def test_certain_transmission(self):
        assert chain_probability(9, 1, 1.0, (1, 9, 0)) == 1.0

    def test_worked_example(self):
        prob = chain_probability(9, 1, 0.2, (1, 2, 3, 1, 0))
        assert prob == pytest.approx(WORKED_CHAIN_PROB, rel=1e-12)

    def test_zero_transmission(self):
        assert chain_probability(9, 1, 0.0, (1, 0)) == 1.0
        assert chain_probability(9, 1, 0.0, (1, 1, 0)) == 0.0

    @pytest.mark.parametrize("chain", [
        (2, 0),          # wrong starting generation
        (1, 5, 5, 0),    # more infections than susceptibles
        (1, 0, 1, 0),    # zero before the end
        (1, 2),          # no terminal zero
        (1,),            # too short
    ])
    def test_infeasible_chains_rejected(self, chain):
        with pytest.raises(ValueError):
            chain_probability(9, 1, 0.2, chain)

    def test_p_out_of_range(self):
        with pytest.raises(ValueError):
            chain_probability(9, 1, 1.2, (1, 0))


class TestFinalSizeDistribution:
    def test_point_mass_without_transmission(self):
        dist = final_size_distribution(6, 1, 0.0)
        assert dist[0] == 1.0
        assert dist.sum() == pytest.approx(1.0, abs=1e-15)

    def test_single_bernoulli(self):
        dist = final_size_distribution(1, 1, 0.3)
        assert dist[0] == pytest.approx(0.7, abs=1e-15)
        assert dist[1] == pytest.approx(0.3, abs=1e-15)

    def test_certain_transmission(self):
        dist = final_size_distribution(4, 1, 1.0)
        assert dist[4] == 1.0

    def test_frozen_exact_distribution(self):
        dist = final_size_distribution(5, 1, 0.3)
        assert np.allclose(dist, EXACT_DIST_P03, rtol=1e-12, atol=0)

    @pytest.mark.parametrize("s0,i0,p", [(5, 1, 0.1), (5, 1, 0.7), (7, 2, 0.4), (9, 1, 0.25)])
    def test_sums_to_one(self, s0, i0, p):
        assert final_size_distribution(s0, i0, p).sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_chain_enumeration(self):
        # independent route: sum per-chain probabilities grouped by total size
        for p in (0.15, 0.4, 0.8):
            dist = final_size_distribution(6, 1, p)
            grouped = np.zeros(7)
            for rec in enumerate_chains(6, 1, p):
                grouped[sum(rec.chain[1:])] += rec.probability
            assert np.allclose(dist, grouped, atol=1e-12)

    def test_mean_nondecreasing_in_p(self):
        sizes = np.arange(6)
        means = [final_size_distribution(5, 1, p) @ sizes for p in np.linspace(0, 1, 11)]
        assert np.all(np.diff(means) >= -1e-12)

    def test_enumeration_bound(self):
        with pytest.raises(ValueError):
            final_size_distribution(25, 1, 0.5)


class TestEnumerateChains:
    def test_total_probability_one(self):
        total = math.fsum(rec.probability for rec in enumerate_chains(8, 1, 0.35))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_chain_count(self):
        # chains from (s0, 1) are compositions: 2**s0 of them
        assert len(enumerate_chains(5, 1, 0.5)) == 32

    def test_bound(self):
        with pytest.raises(ValueError):
            enumerate_chains(16, 1, 0.5)


@settings(max_examples=25, deadline=None)
@given(s0=st.integers(1, 7), i0=st.integers(1, 3),
       p=st.floats(0.01, 0.99))
def test_distribution_properties(s0, i0, p):
    dist = final_size_distribution(s0, i0, p)
    assert dist.size == s0 + 1
    assert np.all(dist >= 0)
    assert dist.sum() == pytest.approx(1.0, abs=1e-12)
