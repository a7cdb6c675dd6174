import pytest
from hypothesis import given, strategies as st

from services.core import SUM_WC, SUM_WE, SUM_WU, Instance, check_schedule
from services.errors import BudgetExceededError, StructuralError
from services.oracle import (
    NORMAL_FORMS,
    OracleBudget,
    brute_force_feasible,
    brute_force_optimal,
    exhaustive_start_times,
    iter_layouts,
    pareto_front,
)
from services.reductions import PartitionInstance, ReductionVariant, reduce_to_weighted_completion
from tests.strategies import instances, make_jobs


def test_empty_instance_is_feasible():
    outcome = brute_force_feasible(Instance((), (), SUM_WC, SUM_WC, 0, 0))
    assert outcome.feasible
    assert outcome.witness.entries == ()


def test_partition_yes_instance(partition_112):
    outcome = brute_force_feasible(partition_112)
    assert outcome.feasible
    assert outcome.solver == "oracle"
    assert check_schedule(outcome.witness, partition_112)[0]


def test_partition_no_instance():
    instance = reduce_to_weighted_completion(PartitionInstance((1, 1, 4)), ReductionVariant.SUM_C)
    assert not brute_force_feasible(instance).feasible


def test_budget_is_a_separate_outcome():
    instance = Instance(make_jobs(1, *[(1, 1, None)] * 4), (), SUM_WC, SUM_WC, 100, 0)
    with pytest.raises(BudgetExceededError):
        brute_force_feasible(instance, budget=OracleBudget(max_total_jobs=3))
    with pytest.raises(BudgetExceededError):
        brute_force_feasible(instance.with_bounds(a1=0), budget=OracleBudget(max_configurations=5))


def test_budget_must_be_positive():
    with pytest.raises(StructuralError):
        OracleBudget(max_total_jobs=0)


class TestOptimal:
    def test_single_weighted_job(self):
        instance = Instance(make_jobs(1, (2, 3, None)), (), SUM_WC, SUM_WC, 0, 0)
        assert brute_force_optimal(instance, 1) == 6

    def test_spt_sum(self):
        instance = Instance(make_jobs(1, (1, 1, None), (2, 1, None)), (), SUM_WC, SUM_WC, 0, 0)
        assert brute_force_optimal(instance, 1) == 4

    def test_jit_maximum(self):
        instance = Instance(make_jobs(1, (1, 1, 1), (1, 1, 2)), (), SUM_WE, SUM_WC, 0, 0)
        assert brute_force_optimal(instance, 1) == 2

    def test_none_when_other_bound_unreachable(self):
        instance = Instance(make_jobs(1, (1, 1, None)), make_jobs(2, (2, 1, None)), SUM_WC, SUM_WC, 0, 1)
        assert brute_force_optimal(instance, 1) is None

    def test_fix_agent_checked(self):
        with pytest.raises(StructuralError):
            brute_force_optimal(Instance((), (), SUM_WC, SUM_WC, 0, 0), 3)


def test_pareto_front_single_machine_tradeoff():
    instance = Instance(make_jobs(1, (1, 1, None)), make_jobs(2, (1, 1, None)), SUM_WC, SUM_WC, 0, 0)
    assert pareto_front(instance) == [(1, 2), (2, 1)]


def test_layout_order_is_deterministic(partition_112):
    first = [values for _, _, values in iter_layouts(partition_112)]
    second = [values for _, _, values in iter_layouts(partition_112)]
    assert first == second
    assert len(first) == 24


@given(instances("we_we", max_n=2, max_k=1))
def test_start_time_oracle_agrees(instance):
    assert brute_force_feasible(instance).verdict is exhaustive_start_times(instance).verdict


@given(instances("we_wu", max_n=2, max_k=1))
def test_start_time_oracle_agrees_mixed(instance):
    assert brute_force_feasible(instance).verdict is exhaustive_start_times(instance).verdict


@given(instances("wc_general"))
def test_agent_swap_invariance(instance):
    assert brute_force_feasible(instance).verdict is brute_force_feasible(instance.swapped()).verdict


@given(instances("u_wu"), st.integers(1, 20))
def test_relabel_invariance(instance, offset):
    assert brute_force_feasible(instance).verdict is brute_force_feasible(instance.relabeled(offset)).verdict


@given(instances("c_wu"))
def test_relaxing_bounds_keeps_feasibility(instance):
    if brute_force_feasible(instance).feasible:
        assert brute_force_feasible(instance.with_bounds(instance.a1 + 1, instance.a2 + 1)).feasible


@pytest.mark.parametrize("form, preset", [
    ("spt", "c_wc"),
    ("spt", "c_wu"),
    ("agent2-edd-tardy-last", "c_wu"),
    ("agent1-edd-tardy-last", "u_wc"),
    ("weight-order", "wc_wc_unitp"),
    ("early-edd-tardy-last", "u_wu"),
    ("jit-first", "we_wc_general"),
])
@given(data=st.data())
def test_normal_forms_preserve_verdict(form, preset, data):
    instance = data.draw(instances(preset))
    order_filter, layout_filter = NORMAL_FORMS[form]
    restricted = brute_force_feasible(instance, order_filter=order_filter, layout_filter=layout_filter)
    assert restricted.verdict is brute_force_feasible(instance).verdict


def test_tardy_only_instance_verdicts():
    instance = Instance(make_jobs(1, (2, 1, 1)), make_jobs(2, (1, 3, 1)), SUM_WU, SUM_WU, 1, 0)
    assert brute_force_feasible(instance).feasible
    assert not brute_force_feasible(instance.with_bounds(a1=0)).feasible


def _restricted(instance, form):
    order_filter, layout_filter = NORMAL_FORMS[form]
    return brute_force_feasible(instance, order_filter=order_filter, layout_filter=layout_filter)


class TestNormalFormsWithOneAgentEmpty:
    def test_jit_first_without_agent2_jobs(self):
        instance = Instance(make_jobs(1, (1, 1, 1), (1, 1, 1), (1, 1, 1)), (), SUM_WE, SUM_WC, 1, 0)
        assert brute_force_feasible(instance).feasible
        assert _restricted(instance, "jit-first").feasible

    @pytest.mark.parametrize("crit2", [SUM_WU, SUM_WC])
    def test_agent1_edd_without_agent2_jobs(self, crit2):
        instance = Instance(make_jobs(1, (2, 1, 1), (2, 1, 1), (1, 1, 10)), (), SUM_WU, crit2, 2, 0)
        assert brute_force_feasible(instance).feasible
        outcome = _restricted(instance, "agent1-edd-tardy-last")
        assert outcome.feasible
        assert check_schedule(outcome.witness, instance)[0]

    def test_agent2_edd_without_agent1_jobs(self):
        instance = Instance((), make_jobs(2, (2, 1, 1), (2, 1, 1), (1, 1, 10)), SUM_WC, SUM_WU, 0, 2)
        assert brute_force_feasible(instance).feasible
        assert _restricted(instance, "agent2-edd-tardy-last").feasible

    @pytest.mark.parametrize("form, preset, max_n, max_k", [
        ("jit-first", "we_wc_general", 4, 0),
        ("agent1-edd-tardy-last", "u_wc", 4, 0),
        ("agent1-edd-tardy-last", "u_wu", 4, 0),
        ("agent2-edd-tardy-last", "c_wu", 0, 4),
    ])
    @given(data=st.data())
    def test_single_agent_draws(self, form, preset, max_n, max_k, data):
        instance = data.draw(instances(preset, max_n=max_n, max_k=max_k))
        assert _restricted(instance, form).verdict is brute_force_feasible(instance).verdict
