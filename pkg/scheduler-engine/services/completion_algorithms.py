"""
完工时间类求解器
代理1 为（加权）总完工时间的三种可解情形：
对代理2 的全部排列或全部迟到子集逐一求解子问题，首个可行者即为答案
"""

import itertools
from typing import List, Optional, Sequence, Tuple

from services.core import (
    CriterionKind,
    Instance,
    Job,
    Schedule,
    SearchStats,
    SolveOutcome,
    append_jobs,
    edd_order,
    normalize_left_shift,
    require_criteria,
    solver_entry,
    spt_order,
)
from services.errors import ContractError
from services.milp import (
    MilpResult,
    build_cc_model,
    build_unitp_model,
    solve_feasibility,
    weight_order,
)
from services.subroutines import min_sumc_with_mandatory_early
from utils.logger import setup_logger
from utils.parallel import first_success

logger = setup_logger(__name__)


def realize_interleaving(jobs1: Sequence[Job], jobs2: Sequence[Job], before_counts: Sequence[int]) -> Schedule:
    """
    把代理2 的第 j 个作业插在前 before_counts[j] 个代理1 作业之后，并左移排布

    Raises:
        ContractError: before_counts 不是 0..n 内的非降序列
    """
    n = len(jobs1)
    counts = list(before_counts)
    if len(counts) != len(jobs2):
        raise ContractError(f"插入位置个数 {len(counts)} 与代理2 作业数 {len(jobs2)} 不符")
    if any(c < 0 or c > n for c in counts) or any(a > b for a, b in zip(counts, counts[1:])):
        raise ContractError(f"插入位置必须是 0..{n} 内的非降序列: {counts}")

    sequence: List[Job] = []
    j = 0
    for i in range(n + 1):
        while j < len(jobs2) and counts[j] <= i:
            sequence.append(jobs2[j])
            j += 1
        if i < n:
            sequence.append(jobs1[i])
    return normalize_left_shift(sequence)


def realize_before(jobs1: Sequence[Job], jobs2: Sequence[Job], x: Sequence[int]) -> Schedule:
    """x_j 为排在代理2 第 j 个作业之前的代理1 作业数"""
    return realize_interleaving(jobs1, jobs2, x)


def realize_after(jobs1: Sequence[Job], jobs2: Sequence[Job], x: Sequence[int]) -> Schedule:
    """x_j 为排在代理2 第 j 个作业之后的代理1 作业数"""
    n = len(jobs1)
    return realize_interleaving(jobs1, jobs2, [n - value for value in x])


def _order_scan(
    instance: Instance,
    stats: SearchStats,
    build_model,
    threads: Optional[int],
) -> Optional[Tuple[Tuple[int, ...], MilpResult]]:
    def probe(order: Tuple[int, ...]):
        result = solve_feasibility(build_model(instance, order))
        leaves = {"leaves": result.stats.extra.get("leaves", 0)}
        return ((order, result) if result.feasible else None), (result.stats.nodes, leaves)

    _, hit, probed, nodes = first_success(
        itertools.permutations(range(instance.k)), probe, threads, extra=stats.extra,
    )
    stats.subproblems += probed
    stats.nodes += nodes
    return hit


@solver_entry("c_wc")
def solve_c_wc(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位权重 ΣC ≤ A1，代理2 ΣwC ≤ A2

    对代理2 的每个排列构建交错模型并做整数可行性搜索。

    Raises:
        ContractError: 准则组合或权重不符
    """
    require_criteria(
        instance, "solve_c_wc",
        CriterionKind.TOTAL_WEIGHTED_COMPLETION, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
        unit_w1=True,
    )
    hit = _order_scan(instance, stats, build_cc_model, threads)
    if hit is None:
        return SolveOutcome.none(stats, reason="代理2 的所有排列均无可行交错")
    order, result = hit
    jobs2 = [instance.jobs2[i] for i in order]
    logger.debug(f"solve_c_wc 在排列 {order} 上找到可行交错 {result.assignment.as_dict()}")
    witness = realize_before(spt_order(instance.jobs1), jobs2, result.assignment.ordered())
    return SolveOutcome.found(witness, stats)


@solver_entry("wc_wc_unitp")
def solve_wc_wc_unitp(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位工时 ΣwC ≤ A1，代理2 ΣwC ≤ A2

    Raises:
        ContractError: 准则不符或代理1 存在非单位工时
    """
    require_criteria(
        instance, "solve_wc_wc_unitp",
        CriterionKind.TOTAL_WEIGHTED_COMPLETION, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
    )
    if any(job.p != 1 for job in instance.jobs1):
        raise ContractError("solve_wc_wc_unitp 要求代理1 的加工时间全部为 1")
    hit = _order_scan(instance, stats, build_unitp_model, threads)
    if hit is None:
        return SolveOutcome.none(stats, reason="代理2 的所有排列均无可行交错")
    order, result = hit
    jobs2 = [instance.jobs2[i] for i in order]
    witness = realize_after(weight_order(instance.jobs1), jobs2, result.assignment.ordered())
    return SolveOutcome.found(witness, stats)


def tardy_subsets(jobs: Sequence[Job], limit: int) -> List[int]:
    """总权重不超过 limit 的全部子集掩码，按 (权重, 掩码) 升序"""
    k = len(jobs)
    weighted = []
    for mask in range(1 << k):
        weight = sum(jobs[i].w for i in range(k) if mask >> i & 1)
        if weight <= limit:
            weighted.append((weight, mask))
    weighted.sort()
    return [mask for _, mask in weighted]


def split_by_mask(jobs: Sequence[Job], mask: int) -> Tuple[List[Job], List[Job]]:
    """(不在掩码中的作业, 在掩码中的作业)，各自保持原顺序"""
    inside = [job for i, job in enumerate(jobs) if mask >> i & 1]
    outside = [job for i, job in enumerate(jobs) if not mask >> i & 1]
    return outside, inside


@solver_entry("c_wu")
def solve_c_wu(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位权重 ΣC ≤ A1，代理2 ΣwU ≤ A2

    枚举代理2 的迟到集合（权重不超过 A2），其余作业按 EDD 必须准时，
    迟到作业统一放在最后。

    Raises:
        ContractError: 准则组合或权重不符
    """
    require_criteria(
        instance, "solve_c_wu",
        CriterionKind.TOTAL_WEIGHTED_COMPLETION, CriterionKind.WEIGHTED_TARDY_COUNT,
        unit_w1=True,
    )
    jobs2 = list(instance.jobs2)

    def probe(mask: int):
        early, tardy = split_by_mask(jobs2, mask)
        outcome = min_sumc_with_mandatory_early(instance.jobs1, edd_order(early), instance.a1)
        if not outcome.feasible:
            return None, outcome.stats.nodes
        return append_jobs(outcome.witness, tardy), outcome.stats.nodes

    _, witness, probed, nodes = first_success(tardy_subsets(jobs2, instance.a2), probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if witness is None:
        return SolveOutcome.none(stats, reason="没有满足界限的代理2 迟到集合")
    return SolveOutcome.found(witness, stats)
