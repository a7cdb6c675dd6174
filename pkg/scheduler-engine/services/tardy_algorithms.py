"""
迟到作业类求解器
代理1 为迟到作业数的四种可解情形：
分块 Moore 方案枚举（代理2 为完工时间），以及代理2 迟到集合的 2^k 枚举
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from services.completion_algorithms import split_by_mask, tardy_subsets
from services.core import (
    CriterionKind,
    Instance,
    Job,
    Schedule,
    ScheduledJob,
    SearchStats,
    SolveOutcome,
    append_jobs,
    normalize_left_shift,
    require_criteria,
    solver_entry,
)
from services.errors import ContractError, PreconditionError
from services.subroutines import MandatoryScanner, MooreProfile, unit_time_max_wearly
from utils.logger import setup_logger
from utils.parallel import first_success

logger = setup_logger(__name__)


@dataclass(frozen=True)
class BlockPlan:
    """
    EDD 序列的连续分块方案

    boundaries: k 个非降分割点，块 i 为 [boundaries[i-1], boundaries[i])
    early: 每块的准时作业数，总和恰为所需准时数
    """

    boundaries: Tuple[int, ...]
    early: Tuple[int, ...]

    def blocks(self, n: int) -> List[Tuple[int, int]]:
        edges = (0,) + self.boundaries + (n,)
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def count_block_plans(n: int, k: int, required_early: int) -> int:
    """分块方案总数：准时数与迟到数各自分到 k+1 块的方式数之积"""
    if required_early < 0 or required_early > n:
        return 0
    return comb(required_early + k, k) * comb(n - required_early + k, k)


def iter_block_plans(n: int, k: int, required_early: int) -> Iterator[BlockPlan]:
    """按 (第0块终点, e_0, 第1块终点, e_1, ...) 的字典序生成全部分块方案"""

    def extend(lo: int, block: int, need: int, boundaries: Tuple[int, ...], early: Tuple[int, ...]):
        if block == k:
            if need <= n - lo:
                yield BlockPlan(boundaries, early + (need,))
            return
        for hi in range(lo, n + 1):
            size = hi - lo
            for e in range(max(0, need - (n - hi)), min(size, need) + 1):
                yield from extend(hi, block + 1, need - e, boundaries + (hi,), early + (e,))

    yield from extend(0, 0, required_early, (), ())


def _agent1_edd(jobs: Sequence[Job]) -> List[Job]:
    for job in jobs:
        if job.d is None:
            raise PreconditionError(f"作业 {job} 缺少交期，无法按 EDD 排序")
    return sorted(jobs, key=lambda job: (job.d, job.p, job.id))


class _BlockSearch:
    """固定代理2 顺序下的分块方案深度优先搜索"""

    def __init__(self, jobs1: Sequence[Job], jobs2: Sequence[Job], required_early: int, a2: int):
        self.jobs1 = list(jobs1)
        self.jobs2 = list(jobs2)
        self.n = len(self.jobs1)
        self.k = len(self.jobs2)
        self.required_early = required_early
        self.a2 = a2
        self.plans = 0
        self._profiles: Dict[Tuple[int, int, int], MooreProfile] = {}

    def profile(self, lo: int, hi: int, offset: int) -> MooreProfile:
        key = (lo, hi, offset)
        if key not in self._profiles:
            self._profiles[key] = MooreProfile(self.jobs1[lo:hi], offset)
        return self._profiles[key]

    def search(self) -> Optional[BlockPlan]:
        # 不需要准时作业时只检查全零方案：代理2 链从 0 开始
        return self._walk(0, 0, self.required_early, 0, (), (), 0, self.required_early == 0)

    def _walk(self, lo: int, block: int, need: int, t: int, boundaries: Tuple[int, ...],
              early: Tuple[int, ...], cost: int, only_zero: bool) -> Optional[BlockPlan]:
        n = self.n
        if block == self.k:
            self.plans += 1
            if need > n - lo or self.profile(lo, n, t).makespan(need) is None:
                return None
            return BlockPlan(boundaries, early + (need,))
        for hi in ([lo] if only_zero else range(lo, n + 1)):
            for e in range(max(0, need - (n - hi)), min(hi - lo, need) + 1):
                makespan = self.profile(lo, hi, t).makespan(e)
                finish = None if makespan is None else makespan + self.jobs2[block].p
                # 准时数越多完工越晚，后续 e 只会更差
                if finish is None or cost + self.jobs2[block].w * finish > self.a2:
                    self.plans += 1
                    break
                plan = self._walk(
                    hi, block + 1, need - e, finish, boundaries + (hi,),
                    early + (e,), cost + self.jobs2[block].w * finish, only_zero,
                )
                if plan is not None:
                    return plan
        return None

    def realize(self, plan: BlockPlan) -> Schedule:
        sequence: List[Job] = []
        kept = set()
        t = 0
        for index, (lo, hi) in enumerate(plan.blocks(self.n)):
            selection = self.profile(lo, hi, t).selection(plan.early[index])
            sequence.extend(selection.early)
            kept.update(job.key for job in selection.early)
            t = selection.makespan
            if index < self.k:
                sequence.append(self.jobs2[index])
                t += self.jobs2[index].p
        tardy = [job for job in self.jobs1 if job.key not in kept]
        return append_jobs(normalize_left_shift(sequence), tardy)


def _solve_blocks(
    instance: Instance,
    stats: SearchStats,
    orders: Iterator[Tuple[int, ...]],
    threads: Optional[int],
) -> SolveOutcome:
    jobs1 = _agent1_edd(instance.jobs1)
    required_early = max(0, instance.n - instance.a1)

    def probe(order: Tuple[int, ...]):
        search = _BlockSearch(jobs1, [instance.jobs2[i] for i in order], required_early, instance.a2)
        plan = search.search()
        return ((search, plan) if plan is not None else None), search.plans

    _, hit, probed, nodes = first_success(orders, probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if hit is None:
        return SolveOutcome.none(stats, reason="没有满足界限的分块方案")
    search, plan = hit
    logger.debug(f"分块方案: boundaries={plan.boundaries}, early={plan.early}")
    return SolveOutcome.found(search.realize(plan), stats)


@solver_entry("u_wc")
def solve_u_wc(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位权重 ΣU ≤ A1，代理2 ΣwC ≤ A2

    代理1 按 EDD 切成 k+1 个连续块，第 i 块的准时作业之后紧跟代理2 的第 i+1 个作业，
    各块用带起点的 Moore-Hodgson 取最早完工的准时子集，迟到作业放在最后。

    Raises:
        ContractError: 准则组合或权重不符
    """
    require_criteria(
        instance, "solve_u_wc",
        CriterionKind.WEIGHTED_TARDY_COUNT, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
        unit_w1=True,
    )
    return _solve_blocks(instance, stats, itertools.permutations(range(instance.k)), threads)


@solver_entry("u_c")
def solve_u_c(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """代理2 单位权重时只需检查 SPT 顺序"""
    require_criteria(
        instance, "solve_u_c",
        CriterionKind.WEIGHTED_TARDY_COUNT, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
        unit_w1=True, unit_w2=True,
    )
    order = tuple(sorted(range(instance.k), key=lambda i: (instance.jobs2[i].p, instance.jobs2[i].id)))
    return _solve_blocks(instance, stats, iter([order]), threads)


@solver_entry("u_wu")
def solve_u_wu(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位权重 ΣU ≤ A1，代理2 ΣwU ≤ A2

    枚举代理2 的迟到集合；其余代理2 作业必须准时，与代理1 作业合并按 EDD 扫描。

    Raises:
        ContractError: 准则组合或权重不符
    """
    require_criteria(
        instance, "solve_u_wu",
        CriterionKind.WEIGHTED_TARDY_COUNT, CriterionKind.WEIGHTED_TARDY_COUNT,
        unit_w1=True,
    )
    jobs2 = list(instance.jobs2)
    scanner = MandatoryScanner(instance.jobs1, jobs2)

    def probe(mask: int):
        mandatory = [not mask >> i & 1 for i in range(len(jobs2))]
        return scanner.selection(mandatory, max_tardy=instance.a1), len(scanner.jobs)

    masks = tardy_subsets(jobs2, instance.a2)
    index, selection, probed, nodes = first_success(masks, probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if selection is None:
        return SolveOutcome.none(stats, reason="没有满足界限的代理2 迟到集合")
    early_keys = {job.key for job in selection.sequence}
    _, tardy2 = split_by_mask(jobs2, masks[index])
    tardy1 = [job for job in instance.jobs1 if job.key not in early_keys]
    witness = append_jobs(normalize_left_shift(selection.sequence), tardy1 + tardy2)
    return SolveOutcome.found(witness, stats)


@solver_entry("wu_wu_unitp")
def solve_wu_wu_unitp(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    全部作业单位工时，代理1 ΣwU ≤ A1，代理2 ΣwU ≤ A2

    Raises:
        ContractError: 准则不符或存在非单位工时
    """
    require_criteria(
        instance, "solve_wu_wu_unitp",
        CriterionKind.WEIGHTED_TARDY_COUNT, CriterionKind.WEIGHTED_TARDY_COUNT,
    )
    if any(job.p != 1 for job in instance.all_jobs):
        raise ContractError("solve_wu_wu_unitp 要求所有作业加工时间为 1")
    jobs2 = list(instance.jobs2)
    horizon = instance.n + instance.k
    total1 = sum(job.w for job in instance.jobs1)

    def probe(mask: int):
        early, _ = split_by_mask(jobs2, mask)
        selection = unit_time_max_wearly(instance.jobs1, early, horizon)
        if selection is None or total1 - selection.weight > instance.a1:
            return None, horizon
        return selection, horizon

    _, selection, probed, nodes = first_success(tardy_subsets(jobs2, instance.a2), probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if selection is None:
        return SolveOutcome.none(stats, reason="没有满足界限的代理2 迟到集合")

    entries = [ScheduledJob(job, selection.slots[job.key] - 1) for job in instance.all_jobs if job.key in selection.slots]
    free = sorted(set(range(1, horizon + 1)) - set(selection.slots.values()))
    rest = [job for job in instance.all_jobs if job.key not in selection.slots]
    entries += [ScheduledJob(job, slot - 1) for job, slot in zip(rest, free)]
    return SolveOutcome.found(Schedule(tuple(entries)), stats)
