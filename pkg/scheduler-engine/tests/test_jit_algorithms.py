import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from services.core import SUM_WC, SUM_WE, SUM_WU, Instance, Job, check_schedule, edd_order, evaluate
from services.errors import ContractError
from services.generators import get_preset, random_instance
from services.jit_algorithms import (
    JitDpContext,
    JitInterval,
    best_costs_by_jit_count,
    jit_completion_table,
    jit_weight_table,
    packable_count,
    packed_weighted_completion,
    solve_e_wc,
    solve_we_we,
    solve_we_wu,
)
from services.oracle import brute_force_feasible, brute_force_optimal
from services.reductions import PartitionInstance, reduce_to_unit_jit
from services.subroutines import weighted_interval_scheduling
from tests.strategies import instances, make_jobs


def _ends_on_time(job):
    def check(sequence, completions):
        return any(other.key == job.key and c == job.d for other, c in zip(sequence, completions))

    return check


def _tail_completion(ctx, start, ell):
    """第 ell 个之后的代理2 作业自 start 起连续加工的加权完工时间之和"""
    return sum(
        job.w * (start + ctx.prefix_p[j + 1] - ctx.prefix_p[ell])
        for j, job in enumerate(ctx.jobs2[ell:], start=ell)
    )


def _tail_on_time(ctx, start, ell):
    return all(start + ctx.prefix_p[j + 1] - ctx.prefix_p[ell] <= ctx.jobs2[j].d for j in range(ell, ctx.k))


def _completion_entries(instance):
    """{(b, e): 以 b 为最后准时作业时代理2 加权完工时间的最小值}，对代理2 全部排列取最小"""
    entries = {}
    jobs1 = edd_order(instance.jobs1)
    for order in itertools.permutations(range(instance.k)):
        ctx = JitDpContext(instance.jobs1, [instance.jobs2[i] for i in order])
        table, _ = jit_completion_table(ctx)
        for b in range(1, ctx.n + 1):
            for e in range(ctx.n + 1):
                for ell in range(ctx.k + 1):
                    if table[b][e][ell] is None:
                        continue
                    value = table[b][e][ell] + _tail_completion(ctx, ctx.d[b], ell)
                    entries[b, e] = min(value, entries.get((b, e), value))
    return jobs1, entries


class TestIntervals:
    def test_interval_bounds(self):
        interval = JitInterval(Job(id=0, agent=1, p=2, d=5))
        assert (interval.start, interval.end) == (3, 5)
        assert not interval.overlaps(JitInterval(Job(id=1, agent=1, p=1, d=6)))
        assert interval.overlaps(JitInterval(Job(id=2, agent=1, p=2, d=6)))

    def test_job_without_interval(self):
        with pytest.raises(ContractError):
            JitInterval(Job(id=0, agent=1, p=3, d=2))


class TestPacking:
    @pytest.mark.parametrize("due, count", [(1, 0), (5, 1), (6, 2)])
    def test_packable_prefix(self, due, count):
        ctx = JitDpContext(make_jobs(1, (1, 1, due)), make_jobs(2, (2, 1, None), (3, 1, None)))
        assert packable_count(ctx, 0, 1, 0) == count

    def test_packable_from_later_position(self):
        ctx = JitDpContext(make_jobs(1, (1, 1, 6)), make_jobs(2, (2, 1, None), (3, 1, None)))
        assert packable_count(ctx, 0, 1, 1) == 1
        assert packable_count(ctx, 0, 1, 2) == 0

    def test_indices_checked(self):
        ctx = JitDpContext(make_jobs(1, (1, 1, 6)), ())
        with pytest.raises(ContractError):
            packable_count(ctx, 1, 1, 0)
        with pytest.raises(ContractError):
            packable_count(ctx, 0, 1, 1)

    def test_weighted_completion_after_jit_job(self):
        ctx = JitDpContext(make_jobs(1, (1, 1, 4)), make_jobs(2, (2, 3, None)))
        assert packed_weighted_completion(ctx, 1, 2, 0) == 3 * (4 + 2)

    def test_weighted_completion_from_zero(self):
        ctx = JitDpContext((), make_jobs(2, (1, 1, None), (1, 2, None)))
        assert packed_weighted_completion(ctx, 0, 1, 0) == 1 * 1 + 2 * 2

    def test_nothing_packed(self):
        ctx = JitDpContext(make_jobs(1, (1, 1, 1)), make_jobs(2, (2, 1, None)))
        assert packed_weighted_completion(ctx, 0, 1, 0) == 0

    @given(st.integers(0, 12), st.lists(st.integers(1, 4), min_size=1, max_size=5))
    def test_count_monotone(self, gap, ps):
        def count(g, ell):
            ctx = JitDpContext(make_jobs(1, (1, 1, g + 1)), make_jobs(2, *[(p, 1, None) for p in ps]))
            return packable_count(ctx, 0, 1, ell)

        for ell in range(len(ps)):
            packed = count(gap, ell)
            assert packed <= count(gap + 1, ell)
            assert sum(ps[ell: ell + packed]) <= gap
            if ell + packed < len(ps):
                assert sum(ps[ell: ell + packed + 1]) > gap


class TestJitVersusCompletion:
    def _instance(self, a1, a2):
        return Instance(make_jobs(1, (1, 1, 1)), make_jobs(2, (1, 1, None)), SUM_WE, SUM_WC, a1, a2)

    def test_empty(self):
        assert solve_e_wc(Instance((), (), SUM_WE, SUM_WC, 0, 0)).feasible

    def test_jit_job_then_agent2(self):
        outcome = solve_e_wc(self._instance(1, 2))
        assert outcome.feasible
        assert outcome.witness.lines() == ["(J1.0, 0, 1)", "(J2.0, 1, 2)"]
        assert not solve_e_wc(self._instance(1, 1)).feasible

    def test_bound_above_job_count(self):
        outcome = solve_e_wc(self._instance(2, 100))
        assert not outcome.feasible
        assert outcome.reason

    def test_rejects_weighted_agent1(self):
        instance = Instance(make_jobs(1, (1, 2, 1)), (), SUM_WE, SUM_WC, 0, 0)
        with pytest.raises(ContractError):
            solve_e_wc(instance)

    @given(instances("e_wc", max_n=3, max_k=2))
    def test_matches_oracle(self, instance):
        outcome = solve_e_wc(instance)
        assert outcome.verdict is brute_force_feasible(instance).verdict
        if outcome.feasible:
            assert check_schedule(outcome.witness, instance)[0]

    @given(instances("e_wc", max_n=3, max_k=2))
    def test_cost_table_matches_oracle_optimum(self, instance):
        best = best_costs_by_jit_count(instance)
        for e in range(instance.n + 1):
            reachable = [value for value in best[e:] if value is not None]
            expected = brute_force_optimal(instance.with_bounds(a1=e), fix_agent=2)
            assert (min(reachable) if reachable else None) == expected

    @given(instances("e_wc", max_n=3, max_k=2))
    def test_cost_table_entries_match_oracle(self, instance):
        jobs1, entries = _completion_entries(instance)
        for b in range(1, instance.n + 1):
            prefix = Instance(jobs1[:b], instance.jobs2, SUM_WE, SUM_WC, 0, 0)
            for e in range(b + 1):
                reachable = [entries[b, count] for count in range(e, b + 1) if (b, count) in entries]
                expected = brute_force_optimal(
                    prefix.with_bounds(a1=e), fix_agent=2, layout_filter=_ends_on_time(jobs1[b - 1]),
                )
                assert (min(reachable) if reachable else None) == expected


class TestJitVersusTardy:
    @given(instances("we_wu", max_n=3, max_k=2))
    def test_weight_table_entries_match_oracle(self, instance):
        ctx = JitDpContext(instance.jobs1, edd_order(instance.jobs2))
        table, _ = jit_weight_table(ctx)
        for b in range(1, ctx.n + 2):
            values = [
                table[b][ell] for ell in range(ctx.k + 1)
                if table[b][ell] is not None and _tail_on_time(ctx, ctx.d[b], ell)
            ]
            prefix = Instance(ctx.jobs1[:b], instance.jobs2, SUM_WE, SUM_WU, 0, 0)
            layout_filter = _ends_on_time(ctx.jobs1[b - 1]) if b <= ctx.n else None
            expected = brute_force_optimal(prefix, fix_agent=1, layout_filter=layout_filter)
            assert (max(values) if values else None) == expected

    def _instance(self, a1, a2):
        return Instance(make_jobs(1, (1, 7, 1)), make_jobs(2, (1, 1, 1)), SUM_WE, SUM_WU, a1, a2)

    def test_agent2_job_made_tardy(self):
        outcome = solve_we_wu(self._instance(7, 1))
        assert outcome.feasible
        assert evaluate(outcome.witness, self._instance(7, 1)).jit_jobs(1)
        assert not solve_we_wu(self._instance(7, 0)).feasible

    def test_without_agent2_matches_interval_scheduling(self):
        jobs1 = make_jobs(1, (2, 3, 2), (2, 5, 3), (1, 2, 4), (3, 4, 6))
        best, _ = weighted_interval_scheduling([(job.d - job.p, job.d, job.w) for job in jobs1])
        assert solve_we_wu(Instance(jobs1, (), SUM_WE, SUM_WU, best, 0)).feasible
        assert not solve_we_wu(Instance(jobs1, (), SUM_WE, SUM_WU, best + 1, 0)).feasible

    @given(instances("we_wu", max_n=3, max_k=2))
    def test_matches_oracle(self, instance):
        outcome = solve_we_wu(instance)
        assert outcome.verdict is brute_force_feasible(instance).verdict
        if outcome.feasible:
            assert check_schedule(outcome.witness, instance)[0]


class TestJitVersusJit:
    def test_zero_bounds(self):
        instance = Instance(make_jobs(1, (3, 1, 2)), make_jobs(2, (1, 1, 1)), SUM_WE, SUM_WE, 0, 0)
        assert solve_we_we(instance).feasible

    @pytest.mark.parametrize("values, feasible", [((1, 1, 2), True), ((1, 1, 4), False)])
    def test_partition_construction(self, values, feasible):
        instance = reduce_to_unit_jit(PartitionInstance(values))
        outcome = solve_we_we(instance)
        assert outcome.feasible is feasible
        if feasible:
            report = evaluate(outcome.witness, instance)
            assert report.value1 >= instance.a1 and report.value2 >= instance.a2

    @given(instances("we_we", max_n=3, max_k=2))
    def test_matches_oracle(self, instance):
        outcome = solve_we_we(instance)
        assert outcome.verdict is brute_force_feasible(instance).verdict
        if outcome.feasible:
            report = evaluate(outcome.witness, instance)
            jit = report.jit_jobs(1) + report.jit_jobs(2)
            intervals = sorted((outcome.witness.completion_of(job.key) - job.p, job.d) for job in jit)
            assert all(left[1] <= right[0] for left, right in zip(intervals, intervals[1:]))


@pytest.mark.slow
def test_disjoint_subsets_at_hundred_thousand_jobs():
    instance = random_instance(np.random.default_rng(15), get_preset("we_we"), 100_000, 15)
    unreachable = instance.with_bounds(a1=sum(job.w for job in instance.jobs1) + 1, a2=0)
    outcome = solve_we_we(unreachable)
    assert not outcome.feasible
    assert outcome.stats.subproblems == 1 << sum(job.can_be_jit for job in instance.jobs2)
    assert outcome.stats.elapsed_ms < 10_000
