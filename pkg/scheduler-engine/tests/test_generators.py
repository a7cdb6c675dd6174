import numpy as np
import pytest

from services.core import SUM_WC, Instance
from services.documents import dump_document
from services.errors import ContractError
from services.generators import (
    PRESETS,
    bound_sweep,
    exhaustive_family,
    get_preset,
    partition_document,
    random_document,
    random_family,
    random_instance,
    u_wu_scaling_instance,
)
from services.oracle import brute_force_feasible
from services.tardy_algorithms import solve_u_wu
from tests.strategies import make_jobs


class TestRandom:
    def test_same_seed_same_family(self):
        assert random_family("we_wu", 5, seed=7) == random_family("we_wu", 5, seed=7)

    def test_document_is_reproducible(self):
        first = dump_document(random_document("c_wu", 3, 2, seed=11))
        assert first == dump_document(random_document("c_wu", 3, 2, seed=11))
        assert '"id": "random-c_wu-n3-k2-s11"' in first

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_preset_structure(self, name):
        preset = get_preset(name)
        for instance in random_family(name, 10, seed=3):
            assert instance.crit1.kind is preset.kind1
            assert instance.crit2.kind is preset.kind2
            if preset.unit_w1:
                assert all(job.w == 1 for job in instance.jobs1)
            if preset.unit_w2:
                assert all(job.w == 1 for job in instance.jobs2)
            if preset.unit_p1:
                assert all(job.p == 1 for job in instance.jobs1)
            if preset.unit_p_all:
                assert all(job.p == 1 for job in instance.all_jobs)

    def test_requested_sizes(self):
        instance = random_instance(np.random.default_rng(0), get_preset("u_wc"), 4, 3)
        assert (instance.n, instance.k) == (4, 3)
        assert all(job.d is not None for job in instance.jobs1)
        assert all(job.d is None for job in instance.jobs2)

    def test_unknown_preset(self):
        with pytest.raises(ContractError):
            get_preset("makespan")


class TestSweep:
    def test_both_sides_of_front(self):
        instance = Instance(make_jobs(1, (1, 1, None)), make_jobs(2, (1, 1, None)), SUM_WC, SUM_WC, 0, 0)
        sweep = bound_sweep(instance)
        assert [(item.a1, item.a2) for item in sweep] == [(1, 2), (0, 2), (1, 1), (2, 1), (2, 0)]
        verdicts = [brute_force_feasible(item).feasible for item in sweep]
        assert verdicts == [True, False, False, True, False]

    def test_exhaustive_family_agrees_with_oracle(self):
        count = 0
        for instance in exhaustive_family("u_wu", 1, 1):
            assert (instance.n, instance.k) == (1, 1)
            assert solve_u_wu(instance).verdict is brute_force_feasible(instance).verdict
            count += 1
        assert count > 0

    def test_exhaustive_family_skips_relabelings(self):
        shapes = {
            tuple((job.p, job.w, job.d) for job in instance.jobs1)
            for instance in exhaustive_family("c_wc", 2, 0)
        }
        assert shapes == {((1, 1, None), (1, 1, None)), ((1, 1, None), (2, 1, None)), ((2, 1, None), (2, 1, None))}


class TestPartitionDocuments:
    def test_completion_document(self):
        document = partition_document([1, 1, 2], "partition-completion", "tardy")
        assert document.id == "partition-completion-tardy-1-1-2"
        assert document.expected == "feasible"
        assert document.criteria.agent1.bound == 13

    def test_jit_document(self):
        document = partition_document([1, 1, 4], "partition-jit")
        assert document.id == "partition-jit-1-1-4"
        assert document.expected == "infeasible"
        assert len(document.jobs1) == len(document.jobs2) == 3

    def test_unknown_kind(self):
        with pytest.raises(ContractError):
            partition_document([1, 1], "partition-makespan")

    def test_scaling_instance_needs_jobs(self):
        with pytest.raises(ContractError):
            u_wu_scaling_instance(0, 2)
