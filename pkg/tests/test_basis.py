import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxzgap import DomainError, SpinParams
from xxzgap.basis import (
    MAX_TWO_J,
    SectorBasis,
    enumerate_sector,
    local_values,
    sector_dimension,
)


def sectors(two_j, length):
    return range(-two_j * length, two_j * length + 1, 2)


class TestSpinParams:
    def test_basic_properties(self):
        p = SpinParams(two_j=1, length=10, delta_inv=0.5)
        assert p.spin == 0.5
        assert p.delta == 2.0
        assert not p.is_ising
        # q = d / (1 + sqrt(1 - d^2)) and sech(eta) = delta_inv exactly
        assert p.q == 0.5 / (1.0 + math.sqrt(0.75))
        assert 1.0 / math.cosh(p.eta) == pytest.approx(0.5, abs=1e-15)

    def test_ising_limit(self):
        p = SpinParams(two_j=3, length=4, delta_inv=0.0)
        assert p.is_ising
        assert p.q == 0.0

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, float("nan")])
    def test_delta_inv_range(self, bad):
        with pytest.raises(DomainError):
            SpinParams(two_j=1, length=4, delta_inv=bad)

    def test_two_j_cap(self):
        with pytest.raises(DomainError):
            SpinParams(two_j=MAX_TWO_J + 2, length=2, delta_inv=0.5)
        with pytest.raises(DomainError):
            SpinParams(two_j=0, length=4, delta_inv=0.5)

    def test_length_validation(self):
        with pytest.raises(DomainError):
            SpinParams(two_j=1, length=1, delta_inv=0.5)


def test_local_values_are_doubled_and_ascending():
    vals = local_values(3)
    assert vals.tolist() == [-3, -1, 1, 3]


@pytest.mark.parametrize("two_j,length", [(1, 6), (2, 4), (3, 3), (4, 3)])
def test_sector_dimensions_partition_the_space(two_j, length):
    total = sum(sector_dimension(two_j, length, m) for m in sectors(two_j, length))
    assert total == (two_j + 1) ** length


def test_sector_dimension_rejects_bad_parity():
    # two_j * L odd means odd two_m only
    with pytest.raises(DomainError):
        sector_dimension(1, 3, 0)
    with pytest.raises(DomainError):
        sector_dimension(2, 3, 7)  # out of range


def test_enumerate_matches_dimension_and_is_sorted():
    configs = enumerate_sector(2, 4, 0)
    assert configs.shape == (sector_dimension(2, 4, 0), 4)
    assert (configs.sum(axis=1) == 0).all()
    # ranked lexicographic: rows strictly increasing as tuples
    rows = [tuple(r) for r in configs.tolist()]
    assert rows == sorted(rows)
    assert len(set(rows)) == len(rows)


@given(
    two_j=st.integers(min_value=1, max_value=5),
    length=st.integers(min_value=2, max_value=5),
    data=st.data(),
)
def test_rank_unrank_round_trip(two_j, length, data):
    lo, hi = -two_j * length, two_j * length
    two_m = data.draw(
        st.integers(min_value=0, max_value=(hi - lo) // 2).map(lambda k: lo + 2 * k)
    )
    basis = SectorBasis(SpinParams(two_j, length, 0.5), two_m)
    index = data.draw(st.integers(min_value=0, max_value=basis.dim - 1))
    cfg = basis.unrank(index)
    assert sum(cfg) == two_m
    assert basis.rank(cfg) == index


def test_rank_validates_input():
    basis = SectorBasis(SpinParams(2, 3, 0.5), 0)
    with pytest.raises(DomainError):
        basis.rank([0, 0])  # wrong shape
    with pytest.raises(DomainError):
        basis.rank([1, 1, 0])  # wrong sector sum... and odd values for two_j=2
    with pytest.raises(DomainError):
        basis.rank([4, -2, -2])  # out-of-range local value


def test_configs_cached_and_read_only():
    basis = SectorBasis(SpinParams(1, 4, 0.5), 0)
    configs = basis.configs
    assert configs is basis.configs
    with pytest.raises(ValueError):
        configs[0, 0] = 99


def test_one_dimensional_edge_sectors():
    basis = SectorBasis(SpinParams(3, 4, 0.25), 12)
    assert basis.dim == 1
    assert basis.configs.tolist() == [[3, 3, 3, 3]]
