"""Overlap-matrix gap bound: combinatorial core and frozen small cases.

The 2x2 frozen matrix below was produced by an explicit construction of
the symmetrized two-rung ladder states; the entries are exactly
[[1/2, sqrt(2)/5], [sqrt(2)/5, 21/25]] with eigenvalues {17/50, 1}.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from xxzgap import DomainError, ResourceRefusal, SpinParams, spectral_gap
from xxzgap.sos_bound import (
    build_overlap_matrix,
    contingency_count,
    crude_tail_bound,
    delta_and_bound,
    gale_ryser_feasible,
    partition_norm_sums,
    restricted_partitions,
)


class TestRestrictedPartitions:
    @pytest.mark.parametrize("L,two_j,N", [
        (3, 2, 4), (4, 3, 6), (2, 4, 5), (5, 1, 3), (4, 4, 8),
    ])
    def test_matches_brute_enumeration(self, L, two_j, N):
        got = [p.parts for p in restricted_partitions(L, two_j, N)]
        assert got == oracles.brute_partitions(L, two_j, N)

    def test_descending_order_and_padding(self):
        parts = [p.parts for p in restricted_partitions(3, 3, 3)]
        assert parts == [(3, 0, 0), (2, 1, 0), (1, 1, 1)]

    def test_orbit_multiplicity_counts_orderings(self):
        from xxzgap.sos_bound import RestrictedPartition

        assert RestrictedPartition((2, 1, 0)).orbit_multiplicity == 6
        assert RestrictedPartition((2, 2, 0)).orbit_multiplicity == 3
        assert RestrictedPartition((1, 1, 1)).orbit_multiplicity == 1

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            restricted_partitions(3, 2, 7)
        with pytest.raises(DomainError):
            restricted_partitions(0, 2, 0)


class TestContingency:
    def test_exhaustive_small_instances(self):
        # every (partition, column-profile) pair with L <= 3, 2J <= 3
        for two_j, L in itertools.product((1, 2, 3), (1, 2, 3)):
            for N in range(two_j * L + 1):
                parts = restricted_partitions(L, two_j, N)
                for cols in itertools.product(range(two_j + 1), repeat=L):
                    if sum(cols) != N:
                        continue
                    for mu in parts:
                        got = contingency_count(mu.parts, cols)
                        want = oracles.brute_contingency(mu.parts, cols)
                        assert got == want, (mu.parts, cols)
                        assert gale_ryser_feasible(mu.parts, cols) == (want > 0)

    def test_mismatched_totals_count_zero(self):
        assert contingency_count((2, 1), (1, 1)) == 0
        assert not gale_ryser_feasible((2, 1), (1, 1))

    def test_out_of_range_rows_count_zero(self):
        # a row sum larger than the number of columns is unfillable
        assert contingency_count((3,), (1, 1)) == 0

    @given(
        rows=st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=4),
        cols=st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=4),
    )
    @settings(max_examples=60)
    def test_matches_brute_force_on_random_margins(self, rows, cols):
        assert contingency_count(rows, cols) == oracles.brute_contingency(rows, cols)

    @given(
        rows=st.lists(st.integers(min_value=0, max_value=3), min_size=2, max_size=5),
        cols=st.lists(st.integers(min_value=0, max_value=3), min_size=2, max_size=5),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=40)
    def test_invariant_under_margin_permutations(self, rows, cols, seed):
        base = contingency_count(rows, cols)
        rng = np.random.default_rng(seed)
        for _ in range(4):
            r = list(rng.permutation(rows))
            c = list(rng.permutation(cols))
            assert contingency_count(r, c) == base

    def test_known_doubly_stochastic_value(self):
        # permutation matrices: all-ones margins count n!
        assert contingency_count((1, 1, 1, 1), (1, 1, 1, 1)) == 24
        # 2x2 margins (1,1),(1,1) -> two matrices
        assert contingency_count((1, 1), (1, 1)) == 2


class TestOverlapMatrix:
    def test_frozen_two_by_two(self):
        om = build_overlap_matrix(L=2, two_j=2, N=2, q=0.5)
        expected = np.array([
            [0.5, math.sqrt(2.0) / 5.0],
            [math.sqrt(2.0) / 5.0, 0.84],
        ])
        assert om.matrix == pytest.approx(expected, abs=1e-14)
        assert np.linalg.eigvalsh(om.matrix) == pytest.approx([0.34, 1.0], abs=1e-14)
        assert [p.parts for p in om.partitions] == [(2, 0), (1, 1)]

    def test_frozen_two_by_two_ising(self):
        om = build_overlap_matrix(L=2, two_j=2, N=2, q=0.0)
        assert om.matrix == pytest.approx(np.array([[0.5, 0.0], [0.0, 1.0]]), abs=0)

    @pytest.mark.parametrize("L,two_j,N,q", [
        (3, 2, 3, 0.4), (4, 2, 4, 0.7), (3, 3, 4, 0.2),
        (5, 1, 2, 0.5), (4, 4, 9, 0.35), (3, 3, 4, 0.0),
    ])
    def test_spectrum_lies_in_unit_interval_with_top_one(self, L, two_j, N, q):
        om = build_overlap_matrix(L, two_j, N, q)
        evals = np.linalg.eigvalsh(om.matrix)
        assert evals[0] >= -1e-12
        assert evals[-1] == pytest.approx(1.0, abs=1e-11)
        assert np.array_equal(om.matrix, om.matrix.T)

    @pytest.mark.parametrize("L,two_j,N,q", [
        (4, 2, 3, 0.45), (3, 3, 5, 0.3), (5, 2, 6, 0.6), (6, 1, 3, 0.8),
    ])
    def test_norm_route_matches_direct_coefficient_sum(self, L, two_j, N, q):
        # sum_mu mult(mu) W(mu) must equal the plain kink norm
        # sum_profiles prod_x C(2J, n_x) q^(2 <x, n>)
        _, mult, sums = partition_norm_sums(L, two_j, N, q)
        route = float(mult @ sums)
        direct = 0.0
        for prof in itertools.product(range(two_j + 1), repeat=L):
            if sum(prof) != N:
                continue
            term = 1.0
            for x, n in enumerate(prof, start=1):
                term *= math.comb(two_j, n) * q ** (2 * x * n)
            direct += term
        assert route == pytest.approx(direct, rel=1e-12)

    def test_brute_recomputation_of_entries(self):
        # same formula, straight loops and independent contingency counts
        L, two_j, N, q = 3, 2, 3, 0.6
        om = build_overlap_matrix(L, two_j, N, q)
        parts = [p.parts for p in om.partitions]
        mult = [om.partitions[i].orbit_multiplicity for i in range(len(parts))]
        profiles = [c for c in itertools.product(range(two_j + 1), repeat=L)
                    if sum(c) == N]

        def w(mu):
            return math.fsum(
                oracles.brute_contingency(mu, c)
                * q ** (2 * sum(x * v for x, v in enumerate(c, start=1)))
                for c in profiles
            )

        def s(mu, nu):
            return math.fsum(
                oracles.brute_contingency(mu, c) * oracles.brute_contingency(nu, c)
                * q ** (2 * sum(x * v for x, v in enumerate(c, start=1)))
                / math.prod(math.comb(two_j, v) for v in c)
                for c in profiles
            )

        for i, mu in enumerate(parts):
            for j, nu in enumerate(parts):
                expected = (
                    math.sqrt(mult[i] * mult[j]) * s(mu, nu)
                    / math.sqrt(w(mu) * w(nu))
                )
                assert om.matrix[i, j] == pytest.approx(expected, rel=1e-12)

    def test_refuses_explosive_profile_spaces(self):
        with pytest.raises(ResourceRefusal):
            build_overlap_matrix(L=24, two_j=2, N=24, q=0.5)


class TestGapBound:
    def test_never_exceeds_the_true_gap_spot_checks(self):
        for two_j, L, N, dinv in [
            (1, 5, 2, 0.5), (2, 4, 3, 0.25), (3, 4, 6, 0.75), (2, 5, 5, 0.1),
        ]:
            sos = delta_and_bound(L, two_j, N, dinv)
            two_m = two_j * L - 2 * N
            gap = spectral_gap(SpinParams(two_j, L, dinv), two_m).gap
            assert sos.bound <= gap + 1e-9

    def test_ising_limit_is_tight_at_special_fillings(self):
        # N a multiple of 2J: the bound coincides with the exact gap
        for two_j, L in [(1, 4), (2, 4), (3, 3)]:
            for N in range(two_j, two_j * L, two_j):
                sos = delta_and_bound(L, two_j, N, 0.0)
                gap = spectral_gap(SpinParams(two_j, L, 0.0), two_j * L - 2 * N).gap
                assert sos.bound == pytest.approx(gap, abs=1e-12)

    def test_bound_fields_are_consistent(self):
        sos = delta_and_bound(4, 2, 3, 0.5)
        assert sos.q == SpinParams(2, 4, 0.5).q
        assert sos.bound == pytest.approx(
            2 * (1 - sos.delta_inv) * (1 - sos.delta), rel=1e-15
        )
        assert sos.size == len(restricted_partitions(4, 2, 3))


class TestTailBound:
    def test_matches_formula(self):
        x = 4.0 * 3 * 0.2 ** 6  # (two_j=2)^2 * R * q^(2R) with R=3, q=0.2
        assert crude_tail_bound(3, 2, 0.2) == pytest.approx(x / (1 - x), rel=1e-15)

    def test_decreases_in_window_size(self):
        vals = [crude_tail_bound(R, 3, 0.5) for R in (4, 6, 8, 12)]
        assert vals == sorted(vals, reverse=True)

    def test_rejects_windows_too_small_to_converge(self):
        with pytest.raises(DomainError):
            crude_tail_bound(1, 10, 0.9)
