import pytest

from services.classify import (
    ORACLE_ONLY,
    SOLVERS,
    TractabilityStatus,
    TractabilityVerdict,
    classify,
    route_and_solve,
)
from services.core import SUM_WC, SUM_WE, SUM_WU, Instance
from services.errors import ContractError
from services.reductions import PartitionInstance, ReductionVariant, reduce_to_weighted_completion
from tests.strategies import make_jobs


def _instance(crit1, crit2, jobs1, jobs2=()):
    return Instance(jobs1, jobs2, crit1, crit2, 0, 0)


CASES = [
    (SUM_WC, SUM_WC, [(2, 1, None)], [(1, 3, None)], TractabilityStatus.FPT, "c_wc", 'Th. "unit weights2"'),
    (SUM_WC, SUM_WC, [(1, 2, None)], [(2, 3, None)], TractabilityStatus.FPT, "wc_wc_unitp", 'Th. "unit processing"'),
    (SUM_WC, SUM_WC, [(2, 2, None)], [], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Th. "single job bob"'),
    (SUM_WC, SUM_WU, [(2, 1, None)], [(1, 1, 1)], TractabilityStatus.FPT, "c_wu", 'Th. "single job bob3"'),
    (SUM_WC, SUM_WU, [(2, 2, None)], [(1, 1, 1)], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Th. "single job bob"'),
    (SUM_WC, SUM_WE, [(1, 1, None)], [(1, 1, 1)], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Cor. "hardness1"'),
    (SUM_WU, SUM_WC, [(2, 1, 3)], [(1, 2, None)], TractabilityStatus.XP, "u_wc", 'Th. "ucuc"'),
    (SUM_WU, SUM_WC, [(2, 1, 3)], [(1, 1, None)], TractabilityStatus.XP, "u_c", 'Cor. "ucuc"'),
    (SUM_WU, SUM_WC, [(2, 2, 3)], [], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Cor. "SigmaWUhardness"'),
    (SUM_WU, SUM_WU, [(2, 1, 3)], [(1, 2, 1)], TractabilityStatus.FPT, "u_wu", 'Th. "uuu"'),
    (SUM_WU, SUM_WU, [(1, 2, 3)], [(1, 2, 1)], TractabilityStatus.FPT, "wu_wu_unitp", 'Th. "uuu2"'),
    (SUM_WU, SUM_WU, [(2, 2, 3)], [(1, 2, 1)], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Cor. "SigmaWUhardness"'),
    (SUM_WU, SUM_WE, [(1, 1, 1)], [(1, 1, 1)], TractabilityStatus.NP_HARD, ORACLE_ONLY, 'Cor. "hardness2"'),
    (SUM_WE, SUM_WC, [(2, 1, 3)], [(1, 2, None)], TractabilityStatus.FPT, "e_wc", 'Th. "EC1"'),
    (SUM_WE, SUM_WC, [(2, 2, 3)], [(1, 2, None)], TractabilityStatus.OPEN, ORACLE_ONLY, "Open"),
    (SUM_WE, SUM_WU, [(2, 2, 3)], [(1, 2, 1)], TractabilityStatus.FPT, "we_wu", 'Th. "EU1"'),
    (SUM_WE, SUM_WE, [(2, 2, 3)], [(1, 2, 1)], TractabilityStatus.FPT, "we_we", 'Th. "single job bob4"'),
]


@pytest.mark.parametrize("crit1, crit2, specs1, specs2, status, solver, citation", CASES)
def test_cells(crit1, crit2, specs1, specs2, status, solver, citation):
    verdict = classify(_instance(crit1, crit2, make_jobs(1, *specs1), make_jobs(2, *specs2)))
    assert verdict.status is status
    assert verdict.solver == solver
    assert verdict.citation == citation
    assert verdict.basis


def test_xp_cell_notes_open_question():
    verdict = classify(_instance(SUM_WU, SUM_WC, make_jobs(1, (1, 1, 1))))
    assert verdict.note


@pytest.mark.parametrize("crit2, jobs2", [(SUM_WC, ()), (SUM_WE, make_jobs(2, (1, 1, 1)))])
def test_common_due_date_keeps_hardness(crit2, jobs2):
    common = classify(_instance(SUM_WU, crit2, make_jobs(1, (2, 2, 4), (1, 3, 4)), jobs2))
    spread = classify(_instance(SUM_WU, crit2, make_jobs(1, (2, 2, 4), (1, 3, 5)), jobs2))
    assert common.status is spread.status is TractabilityStatus.NP_HARD
    assert common.citation == spread.citation
    assert common.note and not spread.note


def test_unit_jit_cell_notes_unbounded_k():
    verdict = classify(_instance(SUM_WE, SUM_WE, make_jobs(1, (1, 2, 1)), make_jobs(2, (1, 3, 1))))
    assert verdict.solver == "we_we"
    assert verdict.note


class TestVerdictContract:
    def test_polynomial_needs_solver(self):
        with pytest.raises(ContractError):
            TractabilityVerdict(TractabilityStatus.FPT, "x", ORACLE_ONLY)
        with pytest.raises(ContractError):
            TractabilityVerdict(TractabilityStatus.XP, "x", "missing")

    def test_hard_goes_to_oracle(self):
        with pytest.raises(ContractError):
            TractabilityVerdict(TractabilityStatus.NP_HARD, "x", "c_wc")
        assert not TractabilityVerdict(TractabilityStatus.OPEN, "x", ORACLE_ONLY).solvable

    def test_citation_required(self):
        with pytest.raises(ContractError):
            TractabilityVerdict(TractabilityStatus.FPT, "", "c_wc")

    def test_registry_covers_polynomial_cells(self):
        assert {solver for *_, solver, _ in CASES if solver != ORACLE_ONLY} == set(SOLVERS)


class TestRouting:
    def test_routes_to_solver(self):
        instance = Instance(
            make_jobs(1, (1, 1, None), (1, 1, None), (2, 1, None)),
            make_jobs(2, (1, 1, None)),
            SUM_WC, SUM_WC, 13, 3,
        )
        verdict, outcome = route_and_solve(instance)
        assert verdict.solver == "c_wc"
        assert outcome.solver == "c_wc"
        assert outcome.feasible

    def test_hard_cell_without_fallback(self):
        instance = reduce_to_weighted_completion(PartitionInstance((1, 1, 2)), ReductionVariant.SUM_C)
        with pytest.raises(ContractError):
            route_and_solve(instance)

    @pytest.mark.parametrize("values, feasible", [((1, 1, 2), True), ((1, 1, 4), False)])
    def test_hard_cell_with_fallback(self, values, feasible):
        instance = reduce_to_weighted_completion(PartitionInstance(values), ReductionVariant.TARDY)
        verdict, outcome = route_and_solve(instance, oracle_fallback=True)
        assert verdict.status is TractabilityStatus.NP_HARD
        assert outcome.solver == "oracle"
        assert outcome.feasible is feasible
