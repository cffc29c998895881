import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermite_multipliers import thresholds as th


@pytest.mark.parametrize("n,p,want", [
    (1, "4", F(2)), (2, "2", F(3)), (1, "3", F(3, 2)), (1, "6", F(14, 9)),
    (2, "5/2", F(61, 20)), (2, "10/3", F(31, 10)), (2, "4", F(19, 6)), (3, "3", F(14, 3)),
    (3, "6", F(5)), (3, "8", F(41, 8)), (4, "5/2", F(123, 20)), (2, "3/2", F(37, 12)),
])
def test_linear_ft_values(n, p, want):
    assert th.s_threshold("s-linear-FT", n, p) == want
    assert th.s_threshold("s-linear-FHT", n, p) == want - F(1, 12)


@pytest.mark.parametrize("n,p,want", [
    (1, 3, F(0)), (1, 4, F(0)), (1, 6, F(1, 18)), (1, "inf", F(1, 6)),
    (2, 3, F(1, 12)), (2, "10/3", F(1, 10)), (2, "inf", F(1, 2)),
    (3, 3, F(1, 6)), (3, 6, F(1, 2)), (3, "inf", F(1)), (5, 2, F(0)),
])
def test_gamma_values(n, p, want):
    assert th.gamma(n, p) == want


def test_exponent_parsing():
    assert th.as_exponent("10/3") == F(10, 3)
    assert th.as_exponent("inf") == math.inf
    assert th.as_exponent(math.inf) == math.inf
    assert th.as_exponent(10 / 3) == F(10, 3)
    assert th.as_exponent(2) == F(2)
    assert th.conjugate(1) == math.inf and th.conjugate("inf") == 1
    assert th.conjugate(3) == F(3, 2)
    with pytest.raises(th.ThresholdError):
        th.as_exponent(float("nan"))


@given(n=st.integers(1, 12), num=st.integers(101, 1000))
def test_gamma_duality(n, num):
    p = F(num, 100)
    assert th.gamma(n, p) == th.gamma(n, th.conjugate(p))
    assert th.s_linear_ft(n, p) == th.s_linear_ft(n, th.conjugate(p))


@given(n=st.integers(1, 12), num=st.integers(200, 5000))
def test_gamma_is_continuous_nondecreasing(n, num):
    p = F(num, 100)
    q = p + F(1, 100)
    assert th.gamma(n, p) <= th.gamma(n, q) <= th.gamma(n, p) + F(n, 100)


@pytest.mark.parametrize("n", range(1, 11))
def test_branch_junctions_agree(n):
    for pj in th.junctions(n):
        vals = th.branch_values(n, pj)
        i = 0 if (n == 1 or pj == F(2 * (n + 3), n + 1)) else 1
        assert vals[i] == vals[i + 1] == th.gamma(n, pj)


def test_dedicated_value_at_four_in_one_dimension():
    # the value at p = 4 sits above both one-sided limits (3/2)
    assert th.s_linear_ft(1, 4) == 2
    assert th.s_linear_ft(1, F(399, 100)) == F(3, 2)
    assert th.s_linear_ft(1, F(401, 100)) > F(3, 2)


@pytest.mark.parametrize("n", range(2, 7))
def test_delta_at_critical_exponent(n):
    assert th.delta(n, F(2 * n, n + 2)) == F(1, 2)


def test_delta_values():
    assert th.delta(2, 1) == F(1, 2)
    assert th.delta(3, 2) == F(-1, 2)
    assert th.delta(1, "inf") == 0


def test_literal_mode_below_two():
    # printed p < 2 formulas keep (1/2 - 1/p); default returns the dual value
    assert th.s_linear_ft(2, "3/2", literal=True) == F(35, 12)
    assert th.s_linear_ft(2, "3/2") == F(37, 12)
    assert th.s_linear_ft(1, "3/2", literal=True) == F(3, 2)
    assert th.s_linear_ft(1, "6/5", literal=True) == F(4, 3) + F(2, 3) * (F(1, 2) - F(5, 6))


def test_general_and_spectral():
    assert th.s_linear_general(3, 3) == F(9, 2)
    assert th.s_linear_general(3, 3, fht=True) == F(9, 2) - F(1, 12)
    with pytest.raises(th.ThresholdError):
        th.s_linear_general(1, 4)
    assert th.s_spectral_pp(2, 1) == 2
    assert th.s_spectral_pp(3, "6/5") == F(5, 2)
    assert th.s_spectral_pp(3, 2) == F(9, 2)
    assert th.s_spectral_pp(1, "3/2") == F(4, 3)
    assert th.s_spectral_pp(1, "4/3") == F(3, 2)
    assert th.s_spectral_pp(1, "6/5") == F(23, 18)
    assert th.s_spectral_pq(2, 2) == 3
    assert th.s_spectral_pq(1, 2) == F(3, 2)
    assert th.s_spectral_pq(2, "3/2") >= th.s_spectral_pp(2, "3/2")


def test_multilinear():
    assert th.s_multilinear(2, 2, 1) == F(13, 2)
    assert th.s_threshold("s-multilinear", 2, 1, kappa=2) == F(13, 2)
    assert th.s_multilinear(1, 2, 4) == F(13, 4)
    with pytest.raises(th.ThresholdError):
        th.s_multilinear(1, 1, 2)


def test_constants_and_errors():
    assert th.theta_infty() == F(-1, 12)
    assert th.gamma_infty(1) == F(1, 6)
    with pytest.raises(th.ThresholdError):
        th.s_linear_ft(2, "inf")
    with pytest.raises(th.ThresholdError):
        th.gamma(2, 1)
    with pytest.raises(th.ThresholdError):
        th.gamma(0, 2)
    with pytest.raises(th.ThresholdError):
        th.s_threshold("bogus", 1, 2)
    with pytest.raises(th.ThresholdError):
        th.s_threshold("s-multilinear", 1, 2)
