from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dispca.commcost import cost_limits, horizontal_cost, vertical_cost


class TestHandExamples:
    def test_horizontal_small_case(self):
        # 2 monitors, 1 component, 7x4 data: 2*1*5 / 28
        assert horizontal_cost(s=2, r=1, m=7, n=4) == pytest.approx(10 / 28, abs=1e-15)

    def test_vertical_small_case(self):
        # 2 monitors, 1 component, 4x4 data: 2*1*(4 + 2) / 16
        assert vertical_cost(s=2, r=1, m=4, n=4) == pytest.approx(0.75, abs=1e-15)

    def test_single_monitor_single_component(self):
        assert horizontal_cost(s=1, r=1, m=10, n=9) == pytest.approx(1 / 9, abs=1e-15)
        assert vertical_cost(s=1, r=1, m=10, n=10) == pytest.approx(0.2, abs=1e-15)

    def test_zero_components_cost_nothing(self):
        assert horizontal_cost(s=3, r=0, m=10, n=10) == 0.0
        assert vertical_cost(s=3, r=0, m=10, n=10) == 0.0

    def test_full_ship_horizontal(self):
        # r = m/s means every monitor ships its whole block, plus the
        # singular values on top: cost exceeds 1
        assert horizontal_cost(s=2, r=5, m=10, n=10) == pytest.approx(1.1, abs=1e-15)


class TestLimits:
    def test_limit_values(self):
        limits = cost_limits(s=4, r=5, m=100, n=50)
        assert limits.horizontal_large_n == pytest.approx(0.2, abs=1e-15)
        assert limits.vertical_large_n == pytest.approx(0.05, abs=1e-15)
        assert limits.horizontal_large_m == 0.0
        assert limits.vertical_large_m == pytest.approx(0.4, abs=1e-15)

    def test_horizontal_converges_in_n(self):
        s, r, m = 4, 5, 100
        target = cost_limits(s, r, m, 10).horizontal_large_n
        gaps = [abs(horizontal_cost(s, r, m, n) - target) for n in (10**3, 10**6, 10**9)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[1] < 1e-5

    def test_vertical_converges_in_n(self):
        s, r, m = 4, 5, 100
        target = cost_limits(s, r, m, 10).vertical_large_n
        gaps = [abs(vertical_cost(s, r, m, n) - target) for n in (10**3, 10**6, 10**9)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_costs_converge_in_m(self):
        # hor = s*r*(n+1)/n / m and ver - s*r/n = r/m: both gaps shrink as 1/m
        s, r, n = 4, 5, 50
        ver_target = cost_limits(s, r, 10, n).vertical_large_m
        for m in (10**3, 10**6):
            assert horizontal_cost(s, r, m, n) < s * r * (n + 1) / n / m + 1e-15
            assert abs(vertical_cost(s, r, m, n) - ver_target) < (r + 1) / m

    def test_many_observations_ordering(self):
        # once m > n + 1 the column-partitioned protocol is strictly dearer
        for s in (2, 4, 8):
            for r in (1, 5):
                assert vertical_cost(s, r, 400, 64) > horizontal_cost(s, r, 400, 64)

    def test_many_features_ordering(self):
        # with s > 1 and n large the row-partitioned protocol is dearer
        assert horizontal_cost(4, 5, 100, 10**6) > vertical_cost(4, 5, 100, 10**6)


class TestValidation:
    def test_type_checks(self):
        with pytest.raises(TypeError):
            horizontal_cost(2.0, 1, 10, 10)
        with pytest.raises(TypeError):
            vertical_cost(2, 1.5, 10, 10)
        with pytest.raises(TypeError):
            horizontal_cost(True, 1, 10, 10)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            horizontal_cost(0, 1, 10, 10)
        with pytest.raises(ValueError):
            vertical_cost(2, -1, 10, 10)
        with pytest.raises(ValueError):
            horizontal_cost(2, 1, 0, 10)
        with pytest.raises(ValueError):
            vertical_cost(2, 1, 10, 0)


@settings(max_examples=200, deadline=None)
@given(
    s=st.integers(min_value=1, max_value=64),
    r=st.integers(min_value=0, max_value=64),
    m=st.integers(min_value=1, max_value=10**6),
    n=st.integers(min_value=1, max_value=10**6),
)
def test_matches_exact_rational_arithmetic(s, r, m, n):
    hor_exact = Fraction(s * r * (n + 1), m * n)
    ver_exact = Fraction(s * r, 1) * (Fraction(m) + Fraction(n, s)) / (m * n)
    assert horizontal_cost(s, r, m, n) == pytest.approx(float(hor_exact), rel=1e-12)
    assert vertical_cost(s, r, m, n) == pytest.approx(float(ver_exact), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    s=st.integers(min_value=1, max_value=32),
    r=st.integers(min_value=1, max_value=32),
    m=st.integers(min_value=1, max_value=10**5),
    n=st.integers(min_value=1, max_value=10**5),
)
def test_ordering_rule(s, r, m, n):
    # exact rational comparison: c_ver > c_hor iff m > n + 1 - n/s
    hor_exact = Fraction(s * r * (n + 1), m * n)
    ver_exact = Fraction(s * r, 1) * (Fraction(m) + Fraction(n, s)) / (m * n)
    threshold = Fraction(n + 1) - Fraction(n, s)
    if Fraction(m) > threshold:
        assert ver_exact > hor_exact
        assert vertical_cost(s, r, m, n) > horizontal_cost(s, r, m, n)
    elif Fraction(m) < threshold:
        assert ver_exact < hor_exact
        assert vertical_cost(s, r, m, n) < horizontal_cost(s, r, m, n)
