import pytest

from xxzgap.figures import FIGURE2_SETS, half_filling_n_down


def test_half_filling_rule_matches_hand_checked_values():
    # nearest N to half filling with N = n (mod two_j), ties to the smaller
    expected = [15, 12, 17, 10, 12, 14, 16, 9]
    got = [half_filling_n_down(two_j, length, n)
           for (two_j, n, length) in FIGURE2_SETS]
    assert got == expected


def test_half_filling_congruence_and_proximity():
    for (two_j, n, length) in FIGURE2_SETS:
        N = half_filling_n_down(two_j, length, n)
        assert N % two_j == n % two_j
        assert abs(2 * N - two_j * length) <= 2 * two_j
        assert 0 < N < two_j * length
