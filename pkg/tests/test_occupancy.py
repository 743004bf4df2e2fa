from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bloomlab import oracle
from bloomlab.occupancy import (
    CommitteeSpec,
    MomentKind,
    classic_mean_variance,
    classic_pmf,
    classic_raw_moment,
    committee_mean_variance,
    committee_moment,
    committee_pmf,
    committee_variance_printed_form,
    intersection_moment,
    intersection_pmf,
    intersection_pmf_table,
    moment_bounds,
    union_moment,
    union_pmf,
)


class TestClassicPmf:
    def test_examples(self):
        assert classic_pmf(5, 1, 1) == 1
        assert classic_pmf(2, 2, 1) == Fraction(1, 2)
        assert classic_pmf(2, 2, 2) == Fraction(1, 2)

    def test_degenerate_no_balls(self):
        assert classic_pmf(4, 0, 0) == 1
        assert all(classic_pmf(4, 0, i) == 0 for i in range(1, 5))

    def test_out_of_support(self):
        assert classic_pmf(3, 2, -1) == 0
        assert classic_pmf(3, 2, 4) == 0
        assert classic_pmf(3, 1, 2) == 0

    @given(m=st.integers(1, 6), n=st.integers(0, 8))
    @settings(max_examples=40, deadline=None)
    def test_matches_enumeration(self, m, n):
        expect = oracle.enumerate_classic_pmf(m, n)
        for i in range(m + 1):
            assert classic_pmf(m, n, i) == expect[i]

    @given(m=st.integers(1, 10), n=st.integers(0, 10))
    @settings(max_examples=50, deadline=None)
    def test_single_ball_recurrence(self, m, n):
        for i in range(m):
            lhs = classic_pmf(m, n + 1, i + 1)
            rhs = Fraction(m - i, m) * classic_pmf(m, n, i) + Fraction(
                i + 1, m
            ) * classic_pmf(m, n, i + 1)
            assert lhs == rhs


class TestClassicMoments:
    def test_examples(self):
        assert classic_raw_moment(2, 2, 0) == 1
        assert classic_raw_moment(2, 2, 1) == Fraction(3, 2)
        assert classic_raw_moment(2, 2, 2) == Fraction(5, 2)

    def test_mean_variance_examples(self):
        assert classic_mean_variance(6, 0) == (0, 0)
        assert classic_mean_variance(2, 2) == (Fraction(3, 2), Fraction(1, 4))
        assert classic_mean_variance(9, 1) == (1, 0)

    @given(m=st.integers(1, 8), n=st.integers(0, 8))
    @settings(max_examples=40, deadline=None)
    def test_closed_forms_agree_with_moments(self, m, n):
        mean, var = classic_mean_variance(m, n)
        m1 = classic_raw_moment(m, n, 1)
        m2 = classic_raw_moment(m, n, 2)
        assert mean == m1
        assert var == m2 - m1 * m1

    @given(m=st.integers(2, 8), n=st.integers(0, 8), r=st.integers(0, 8))
    @settings(max_examples=60, deadline=None)
    def test_moment_recurrence_in_m(self, m, n, r):
        lhs = classic_raw_moment(m, n, r)
        rhs = Fraction(1, m) * classic_raw_moment(m, n, r + 1) + Fraction(
            m - 1, m
        ) ** n * classic_raw_moment(m - 1, n, r)
        assert lhs == rhs

    @given(m=st.integers(1, 6), n=st.integers(0, 6), r=st.integers(0, 5))
    @settings(max_examples=40, deadline=None)
    def test_matches_enumeration(self, m, n, r):
        pmf = oracle.enumerate_classic_pmf(m, n)
        assert classic_raw_moment(m, n, r) == oracle.enumerate_moment(pmf, r, "raw")


class TestCommitteePmf:
    def test_examples(self):
        assert committee_pmf(5, 2, 3, 4) == Fraction(3, 5)
        assert committee_pmf(5, 2, 3, 3) == Fraction(1, 10)
        assert committee_pmf(7, 1, 4, 4) == 1

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_matches_enumeration(self, data):
        m = data.draw(st.integers(1, 6))
        k = data.draw(st.integers(1, m))
        n = data.draw(st.integers(0, max(1, 8 // k)))
        expect = oracle.enumerate_committee_pmf(m, n, k)
        for i in range(m + 1):
            assert committee_pmf(m, n, k, i) == expect[i]


class TestCommitteeMoments:
    def test_examples(self):
        assert committee_moment(5, 2, 3, 1, MomentKind.RAW) == Fraction(21, 5)
        assert committee_moment(5, 2, 3, 5, MomentKind.BINOMIAL) == Fraction(3, 10)
        assert committee_moment(6, 2, 2, 0, MomentKind.FACTORIAL) == 1

    def test_first_moment_closed_form(self):
        for m in range(2, 10):
            for k in range(1, m + 1):
                for n in range(0, 5):
                    expect = m * (1 - Fraction(m - k, m) ** n)
                    assert committee_moment(m, n, k, 1, MomentKind.RAW) == expect

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_kind_interconversion(self, data):
        m = data.draw(st.integers(1, 8))
        k = data.draw(st.integers(1, m))
        n = data.draw(st.integers(0, 3))
        r = data.draw(st.integers(0, 6))
        from math import factorial

        from bloomlab.kernel import stirling2

        binom = committee_moment(m, n, k, r, MomentKind.BINOMIAL)
        fact = committee_moment(m, n, k, r, MomentKind.FACTORIAL)
        raw = committee_moment(m, n, k, r, MomentKind.RAW)
        assert fact == binom * factorial(r)
        assert raw == sum(
            stirling2(r, i) * committee_moment(m, n, k, i, MomentKind.FACTORIAL)
            for i in range(r + 1)
        )

    def test_mean_variance(self):
        assert committee_mean_variance(9, 1, 4) == (4, 0)
        assert committee_mean_variance(5, 2, 3) == (Fraction(21, 5), Fraction(9, 25))
        assert committee_mean_variance(7, 0, 3) == (0, 0)

    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_variance_matches_enumeration(self, data):
        m = data.draw(st.integers(2, 6))
        k = data.draw(st.integers(1, m))
        n = data.draw(st.integers(0, max(1, 6 // k)))
        pmf = oracle.enumerate_committee_pmf(m, n, k)
        mean, var = committee_mean_variance(m, n, k)
        e1 = oracle.enumerate_moment(pmf, 1, "raw")
        e2 = oracle.enumerate_moment(pmf, 2, "raw")
        assert mean == e1
        assert var == e2 - e1 * e1

    def test_printed_variance_form_disagrees(self):
        # The transcribed lemma expression is not a variance at (5, 2, 3):
        # the exact value is 9/25 but the printed form is negative. Kept as
        # a report, not a correction.
        printed = committee_variance_printed_form(5, 2, 3)
        exact = committee_mean_variance(5, 2, 3)[1]
        assert exact == Fraction(9, 25)
        assert printed != exact
        assert printed < 0


class TestUnion:
    def test_single_department_reduces_to_committee(self):
        spec = CommitteeSpec(5, [(2, 3)])
        for i in range(6):
            assert union_pmf(spec, i) == committee_pmf(5, 2, 3, i)

    def test_mean_example(self):
        spec = CommitteeSpec(4, [(1, 2), (1, 2)])
        assert union_moment(spec, 1, MomentKind.BINOMIAL) == 3

    def test_out_of_range_is_zero(self):
        spec = CommitteeSpec(4, [(1, 2)])
        assert union_pmf(spec, 5) == 0
        assert union_pmf(spec, -1) == 0

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            CommitteeSpec(4, [(0, 2)])
        with pytest.raises(ValueError):
            CommitteeSpec(4, [(1, 5)])
        with pytest.raises(ValueError):
            CommitteeSpec(4, [])

    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_matches_enumeration(self, data):
        spec = _draw_spec(data, max_m=5, max_total=7)
        expect = oracle.enumerate_union_pmf(spec)
        for i in range(spec.m + 1):
            assert union_pmf(spec, i) == expect[i]
        for r in range(0, 4):
            assert union_moment(spec, r, MomentKind.BINOMIAL) == (
                oracle.enumerate_moment(expect, r, "binomial")
            )
            assert union_moment(spec, r, MomentKind.RAW) == (
                oracle.enumerate_moment(expect, r, "raw")
            )


class TestIntersection:
    def test_examples(self):
        spec = CommitteeSpec(4, [(1, 2), (1, 2)])
        assert intersection_moment(spec, 1) == 1
        two_singles = CommitteeSpec(2, [(1, 1), (1, 1)])
        assert intersection_moment(two_singles, 1) == Fraction(1, 2)
        assert intersection_moment(two_singles, 0) == 1
        assert intersection_pmf(two_singles, 1) == Fraction(1, 2)
        assert intersection_pmf(two_singles, 0) == Fraction(1, 2)

    def test_single_department_reduces_to_committee(self):
        spec = CommitteeSpec(5, [(2, 2)])
        for i in range(6):
            assert intersection_pmf(spec, i) == committee_pmf(5, 2, 2, i)

    def test_single_batch_fast_path_equals_general(self):
        spec = CommitteeSpec(6, [(1, 2), (1, 3), (1, 4)])
        for r in range(0, 7):
            direct = Fraction(
                comb(2, r) * comb(3, r) * comb(4, r), comb(6, r) ** 2
            ) if r <= 2 else Fraction(0)
            assert intersection_moment(spec, r) == direct

    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_matches_enumeration(self, data):
        spec = _draw_spec(data, max_m=5, max_total=7)
        expect = oracle.enumerate_intersection_pmf(spec)
        table = intersection_pmf_table(spec)
        assert table == expect
        for r in range(0, 4):
            assert intersection_moment(spec, r) == (
                oracle.enumerate_moment(expect, r, "binomial")
            )

    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_complement_duality(self, data):
        m = data.draw(st.integers(2, 8))
        c = data.draw(st.integers(1, 3))
        sizes = [data.draw(st.integers(1, m - 1)) for _ in range(c)]
        spec = CommitteeSpec(m, [(1, k) for k in sizes])
        comp = CommitteeSpec(m, [(1, m - k) for k in sizes])
        table = intersection_pmf_table(spec)
        for i in range(m + 1):
            assert table[i] == union_pmf(comp, m - i)


def _draw_spec(data, max_m: int, max_total: int) -> CommitteeSpec:
    m = data.draw(st.integers(1, max_m))
    c = data.draw(st.integers(1, 3))
    departments = []
    budget = max_total
    for _ in range(c):
        k_d = data.draw(st.integers(1, min(m, max(1, budget))))
        n_d = data.draw(st.integers(1, max(1, budget // k_d)))
        departments.append((n_d, k_d))
        budget -= n_d * k_d
        if budget < 1:
            break
    return CommitteeSpec(m, departments)


class TestNormalization:
    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_all_families_sum_to_one(self, data):
        m = data.draw(st.integers(1, 12))
        n = data.draw(st.integers(0, 12))
        assert sum(classic_pmf(m, n, i) for i in range(m + 1)) == 1
        k = data.draw(st.integers(1, m))
        nk = data.draw(st.integers(0, max(1, 12 // k)))
        assert sum(committee_pmf(m, nk, k, i) for i in range(m + 1)) == 1
        spec = _draw_spec(data, max_m=7, max_total=9)
        assert sum(union_pmf(spec, i) for i in range(spec.m + 1)) == 1
        assert sum(intersection_pmf_table(spec)) == 1


class TestMomentBounds:
    def test_rejects_out_of_regime(self):
        with pytest.raises(ValueError):
            moment_bounds(5, 2, 3, 3)
        moment_bounds(5, 2, 3, 2)

    def test_trivial_r0(self):
        assert moment_bounds(7, 3, 2, 0) == (1, 1, 1)

    def test_worked_example(self):
        lower, jensen, upper = moment_bounds(10, 2, 3, 2)
        assert lower == Fraction(10**6 - 2 * 9**6 + 8**6, 10**6)
        assert upper == Fraction(51, 100) ** 2
        middle = committee_moment(10, 2, 3, 2, MomentKind.BINOMIAL) / comb(10, 2)
        assert lower <= jensen <= middle <= upper

    @given(data=st.data())
    @settings(max_examples=80, deadline=None)
    def test_sandwich(self, data):
        m = data.draw(st.integers(2, 20))
        k = data.draw(st.integers(1, m - 1))
        n = data.draw(st.integers(0, 8))
        r = data.draw(st.integers(0, min(k, m - k)))
        lower, jensen, upper = moment_bounds(m, n, k, r)
        middle = committee_moment(m, n, k, r, MomentKind.BINOMIAL) / comb(m, r)
        assert lower <= jensen <= middle <= upper
