"""Enumeration/counting engine tests: DFS vs brute-force filtration, python
vs numpy engine agreement, worker-count determinism, and moment summaries."""

import math
from fractions import Fraction

import numpy as np
import pytest

from densediv import (
    CountQuery,
    DomainError,
    ThetaFamily,
    collect_divisor_counts,
    collect_moments,
    count_members,
    count_members_multi,
    deviation_bound,
    enumerate_members,
    factor_stats,
    factorize,
    is_member,
    iter_members,
    multiple_vanishing_threshold,
)

DENSE2 = ThetaFamily.dense(2)
DENSE52 = ThetaFamily.dense(Fraction(5, 2))
PRACTICAL = ThetaFamily.practical()
SHIFTED1 = ThetaFamily.shifted_one()
SHIFTED2 = ThetaFamily.shifted_two()

ALL_FAMILIES = [DENSE2, DENSE52, PRACTICAL, SHIFTED1, SHIFTED2]


class TestIterMembers:
    def test_dense2_prefix(self):
        got = sorted(rec.n for rec in iter_members(DENSE2, 20))
        assert got == [1, 2, 4, 6, 8, 12, 16, 18, 20]

    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f"{f.kind}{f.t_num}_{f.t_den}" if f.kind == "dense" else f.kind)
    def test_matches_filtration(self, table, family):
        x = 10_000
        enumerated = sorted(rec.n for rec in iter_members(family, x))
        filtered = [n for n in range(1, x + 1) if is_member(n, family, table)]
        assert enumerated == filtered

    def test_each_member_once(self):
        ns = [rec.n for rec in iter_members(PRACTICAL, 5000)]
        assert len(ns) == len(set(ns))

    def test_record_fields(self, table):
        for rec in iter_members(DENSE2, 2000):
            st = factor_stats(factorize(rec.n, table))
            assert (rec.omega, rec.big_omega, rec.tau, rec.sigma, rec.p_max) == (
                st.omega,
                st.big_omega,
                st.tau,
                st.sigma,
                st.p_max,
            ), rec.n

    def test_visitor_matches_iterator(self):
        seen: list[int] = []
        enumerate_members(DENSE2, 1000, lambda rec: seen.append(rec.n))
        assert seen == [rec.n for rec in iter_members(DENSE2, 1000)]

    def test_domain_error(self):
        with pytest.raises(DomainError):
            list(iter_members(DENSE2, 0))


class TestCounts:
    def test_spot_values(self):
        assert count_members(CountQuery(x=20, family=DENSE2)) == 9
        assert count_members(CountQuery(x=20, family=DENSE2, q=2)) == 8
        assert count_members(CountQuery(x=20, family=DENSE2, q=3)) == 3
        assert count_members(CountQuery(x=20, family=PRACTICAL)) == 9

    @pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f"{f.kind}{f.t_num}_{f.t_den}" if f.kind == "dense" else f.kind)
    def test_matches_enumeration(self, family):
        x = 3000
        expect = sum(1 for _ in iter_members(family, x))
        assert count_members(CountQuery(x=x, family=family)) == expect

    def test_engines_agree(self):
        qs = [1, 2, 3, 5, 7, 16, 17]
        for family in (DENSE2, PRACTICAL):
            py = count_members_multi(family, 200_000, qs, engine="python")
            vec = count_members_multi(family, 200_000, qs, engine="numpy")
            assert py == vec

    def test_threads_deterministic(self):
        qs = [1, 2, 9]
        one = count_members_multi(DENSE2, 100_000, qs, threads=1, engine="python")
        three = count_members_multi(DENSE2, 100_000, qs, threads=3, engine="python")
        assert one == three

    def test_multi_matches_single(self):
        qs = [1, 3, 4]
        multi = count_members_multi(DENSE52, 50_000, qs)
        for q, c in zip(qs, multi):
            assert count_members(CountQuery(x=50_000, family=DENSE52, q=q)) == c


class TestVanishingThreshold:
    def test_spot_values(self, table):
        # F(9) = 27 so no dense-2 member below 27/2 is divisible by 9.
        assert multiple_vanishing_threshold(9, 2, 1, table) == Fraction(27, 2)
        assert multiple_vanishing_threshold(1, 2, 1, table) == 1
        assert multiple_vanishing_threshold(6, 2, 1, table) == 6  # F(6)/2 = 6

    def test_counts_vanish_below(self, table):
        threshold = multiple_vanishing_threshold(9, 2, 1, table)
        below = int(threshold)  # 13
        assert count_members(CountQuery(x=below, family=DENSE2, q=9)) == 0
        assert count_members(CountQuery(x=18, family=DENSE2, q=9)) == 1

    def test_ratio_validated(self, table):
        with pytest.raises(DomainError):
            multiple_vanishing_threshold(9, 3, 2, table)


class TestMoments:
    def test_engines_agree(self):
        kwargs = dict(x=200_000, xi=4.0, expected=2.0)
        py = collect_moments(DENSE2, engine="python", **kwargs)
        vec = collect_moments(DENSE2, engine="numpy", **kwargs)
        assert py.count == vec.count
        assert py.sum_omega == vec.sum_omega
        assert py.sum_omega_sq == vec.sum_omega_sq
        assert py.sum_big_omega == vec.sum_big_omega
        assert py.sum_big_omega_sq == vec.sum_big_omega_sq
        assert py.sum_tau == vec.sum_tau
        assert py.exceed_count == vec.exceed_count
        assert py.histogram_omega == vec.histogram_omega
        assert py.histogram_big_omega == vec.histogram_big_omega
        assert py.sum_log_tau == pytest.approx(vec.sum_log_tau, rel=1e-9)

    def test_threads_deterministic(self):
        one = collect_moments(DENSE2, 50_000, 4.0, 2.0, threads=1, engine="python")
        three = collect_moments(DENSE2, 50_000, 4.0, 2.0, threads=3, engine="python")
        assert one == three

    def test_histograms_consistent(self):
        s = collect_moments(PRACTICAL, 20_000, 4.0, 2.0)
        assert sum(s.histogram_omega.values()) == s.count
        assert sum(s.histogram_big_omega.values()) == s.count
        assert sum(k * v for k, v in s.histogram_omega.items()) == s.sum_omega
        assert sum(k * v for k, v in s.histogram_big_omega.items()) == s.sum_big_omega
        assert s.mean_big_omega >= s.mean_omega
        direct_var = (
            sum(k * k * v for k, v in s.histogram_omega.items()) / s.count
            - s.mean_omega**2
        )
        assert s.variance_omega == pytest.approx(direct_var, rel=1e-12)

    def test_exceedance_extremes(self):
        # A wide band flags nothing; a zero band at expected 0 flags every
        # member except n = 1 (the only member with no prime factor).
        wide = collect_moments(DENSE2, 10_000, xi=100.0, expected=2.0)
        assert wide.exceed_count == 0
        tight = collect_moments(DENSE2, 10_000, xi=0.0, expected=0.0)
        assert tight.exceed_count == tight.count - 1
        assert tight.exceed_fraction == pytest.approx(1 - 1 / tight.count)

    def test_matches_brute(self, table):
        s = collect_moments(DENSE52, 2000, 4.0, 2.0)
        stats = [
            factor_stats(factorize(rec.n, table))
            for rec in iter_members(DENSE52, 2000)
        ]
        assert s.count == len(stats)
        assert s.sum_omega == sum(st.omega for st in stats)
        assert s.sum_tau == sum(st.tau for st in stats)
        assert s.sum_log_tau == pytest.approx(
            sum(math.log(st.tau) for st in stats), rel=1e-12
        )

    def test_domain_error(self):
        with pytest.raises(DomainError):
            collect_moments(DENSE2, 0, 4.0, 2.0)


class TestDivisorCounts:
    def test_ascending_and_exact(self, table):
        ns, taus = collect_divisor_counts(DENSE2, 10_000)
        assert ns[0] == 1 and taus[0] == 1
        assert np.all(np.diff(ns) > 0)
        for n, tau in zip(ns.tolist(), taus.tolist()):
            assert factor_stats(factorize(n, table)).tau == tau

    def test_n_min_filter(self):
        full_n, full_tau = collect_divisor_counts(PRACTICAL, 5000)
        tail_n, tail_tau = collect_divisor_counts(PRACTICAL, 5000, n_min=100)
        assert np.all(tail_n > 100)
        keep = full_n > 100
        assert np.array_equal(tail_n, full_n[keep])
        assert np.array_equal(tail_tau, full_tau[keep])

    def test_engines_and_threads_agree(self):
        base_n, base_tau = collect_divisor_counts(DENSE2, 200_000, engine="python")
        vec_n, vec_tau = collect_divisor_counts(DENSE2, 200_000, engine="numpy")
        thr_n, thr_tau = collect_divisor_counts(
            DENSE2, 200_000, threads=3, engine="python"
        )
        assert np.array_equal(base_n, vec_n) and np.array_equal(base_tau, vec_tau)
        assert np.array_equal(base_n, thr_n) and np.array_equal(base_tau, thr_tau)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            collect_divisor_counts(DENSE2, 0)
        with pytest.raises(DomainError):
            collect_divisor_counts(DENSE2, 100, n_min=-1)


class TestDeviationBound:
    def test_formula(self):
        x = 10**6
        assert deviation_bound(x, 4.0) == pytest.approx(
            4.0 * math.sqrt(math.log(math.log(x)))
        )

    def test_clamped_small_x(self):
        # ln ln 2 < 0: the bound clamps at zero rather than going imaginary.
        assert deviation_bound(2, 4.0) == 0.0
        assert deviation_bound(10**6, 0.0) == 0.0
