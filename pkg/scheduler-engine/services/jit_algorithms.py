"""
准时完工（JIT）类求解器
两个以代理1 准时作业为骨架的动态规划，以及代理2 准时子集枚举 + 加权区间调度
"""

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from services.completion_algorithms import split_by_mask, tardy_subsets
from services.core import (
    CriterionKind,
    Instance,
    Job,
    JobKey,
    Schedule,
    ScheduledJob,
    SearchStats,
    SolveOutcome,
    append_jobs,
    edd_order,
    normalize_left_shift,
    require_criteria,
    solver_entry,
)
from services.errors import ContractError
from services.subroutines import WindowedIntervalTable, weighted_interval_scheduling
from utils.logger import setup_logger
from utils.parallel import first_success

logger = setup_logger(__name__)


@dataclass(frozen=True)
class JitInterval:
    """作业恰好在交期完工时占用的区间 (d - p, d]"""

    job: Job

    def __post_init__(self) -> None:
        if not self.job.can_be_jit:
            raise ContractError(f"作业 {self.job} 的交期小于加工时间，没有准时区间")

    @property
    def start(self) -> int:
        return self.job.d - self.job.p

    @property
    def end(self) -> int:
        return self.job.d

    def overlaps(self, other: "JitInterval") -> bool:
        return self.start < other.end and other.start < self.end


class JitDpContext:
    """
    动态规划上下文

    代理1 作业按 EDD 编号为 1..n，另加虚拟作业 0（d=0）与 n+1（交期足够大），
    代理2 作业按给定顺序排列，并预先计算加工时间与加权前缀和。
    """

    def __init__(self, jobs1: Sequence[Job], jobs2: Sequence[Job]):
        self.jobs1 = edd_order(jobs1)
        self.jobs2 = list(jobs2)
        self.n = len(self.jobs1)
        self.k = len(self.jobs2)
        everything = self.jobs1 + self.jobs2
        horizon = sum(job.p for job in everything) + max((job.d or 0 for job in everything), default=0) + 1
        self.d = [0] + [job.d for job in self.jobs1] + [horizon]
        self.p = [0] + [job.p for job in self.jobs1] + [0]
        self.w = [0] + [job.w for job in self.jobs1] + [0]
        self.prefix_p = list(itertools.accumulate((job.p for job in self.jobs2), initial=0))
        self.prefix_w = list(itertools.accumulate((job.w for job in self.jobs2), initial=0))
        # Σ w_i · (从序列开头累计到 i 的加工时间)
        self.prefix_wp = list(
            itertools.accumulate(
                (job.w * self.prefix_p[i + 1] for i, job in enumerate(self.jobs2)),
                initial=0,
            )
        )

    def gap(self, a: int, b: int) -> int:
        return self.d[b] - self.d[a] - self.p[b]

    def check_indices(self, a: int, b: int, ell: int) -> None:
        if not (0 <= a < b <= self.n + 1):
            raise ContractError(f"需要 0 <= a < b <= {self.n + 1}，实际 a={a}, b={b}")
        if not (0 <= ell <= self.k):
            raise ContractError(f"需要 0 <= ell <= {self.k}，实际 ell={ell}")


def packable_count(ctx: JitDpContext, a: int, b: int, ell: int) -> int:
    """
    准时作业 a 与 b 之间最多能放下多少个代理2 作业（从第 ell+1 个起的前缀）

    Raises:
        ContractError: 下标越界
    """
    ctx.check_indices(a, b, ell)
    gap = ctx.gap(a, b)
    if gap < 0 or ell == ctx.k:
        return 0
    last = bisect_right(ctx.prefix_p, ctx.prefix_p[ell] + gap) - 1
    return min(last, ctx.k) - ell


def packed_weighted_completion(ctx: JitDpContext, a: int, b: int, ell: int) -> int:
    """放进 a 与 b 之间的代理2 作业从 d_a 起连续加工时的加权完工时间之和"""
    count = packable_count(ctx, a, b, ell)
    hi = ell + count
    return (ctx.d[a] - ctx.prefix_p[ell]) * (ctx.prefix_w[hi] - ctx.prefix_w[ell]) + (
        ctx.prefix_wp[hi] - ctx.prefix_wp[ell]
    )


def _realize_path(
    ctx: JitDpContext,
    path: List[Tuple[int, int, int]],
    trailing: Sequence[Job],
) -> Schedule:
    """path 为 (准时作业下标, 放入前的 ell, 放入个数) 序列，末尾为虚拟作业 n+1"""
    sequence: List[Job] = []
    designated: List[JobKey] = []
    for b, ell, count in path:
        sequence.extend(ctx.jobs2[ell: ell + count])
        if b <= ctx.n:
            job = ctx.jobs1[b - 1]
            sequence.append(job)
            designated.append(job.key)
    chosen = set(designated)
    rest = [job for job in ctx.jobs1 if job.key not in chosen] + list(trailing)
    return append_jobs(normalize_left_shift(sequence, designated), rest)


def jit_completion_table(ctx: JitDpContext) -> Tuple[List, List]:
    """
    代理1 单位权重时的表 W[b][e][ell]：以准时作业 b 结尾、含 e 个准时作业、
    已放入 ell 个代理2 作业时，代理2 加权完工时间的最小值（不可达为 None）

    Returns:
        (表, 父指针表)
    """
    n, k = ctx.n, ctx.k
    table = [[[None] * (k + 1) for _ in range(n + 1)] for _ in range(n + 2)]
    parent = [[[None] * (k + 1) for _ in range(n + 1)] for _ in range(n + 2)]
    table[0][0][0] = 0
    for b in range(1, n + 2):
        bump = 1 if b <= n else 0
        for a in range(b):
            if ctx.gap(a, b) < 0:
                continue
            for e in range(0, min(a, n) + 1):
                row = table[a][e]
                for ell in range(k + 1):
                    base = row[ell]
                    if base is None:
                        continue
                    count = packable_count(ctx, a, b, ell)
                    cost = base + packed_weighted_completion(ctx, a, b, ell)
                    target = ell + count
                    current = table[b][e + bump][target]
                    if current is None or cost < current:
                        table[b][e + bump][target] = cost
                        parent[b][e + bump][target] = (a, e, ell)
    return table, parent


def _trace(parent, b: int, e: int, ell: int) -> List[Tuple[int, int, int]]:
    path: List[Tuple[int, int, int]] = []
    while b != 0:
        a, prev_e, prev_ell = parent[b][e][ell]
        path.append((b, prev_ell, ell - prev_ell))
        b, e, ell = a, prev_e, prev_ell
    path.reverse()
    return path


def best_costs_by_jit_count(instance: Instance) -> List[Optional[int]]:
    """各准时作业数 e 下代理2 加权完工时间的最小值（对代理2 全部排列取最小）"""
    best: List[Optional[int]] = [None] * (instance.n + 1)
    for order in itertools.permutations(range(instance.k)):
        ctx = JitDpContext(instance.jobs1, [instance.jobs2[i] for i in order])
        table, _ = jit_completion_table(ctx)
        for e in range(instance.n + 1):
            value = table[ctx.n + 1][e][ctx.k]
            if value is not None and (best[e] is None or value < best[e]):
                best[e] = value
    return best


@solver_entry("e_wc")
def solve_e_wc(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 单位权重 ΣE ≥ A1，代理2 ΣwC ≤ A2

    对代理2 的每个排列填表 W[b][e][ell]，相邻准时作业之间尽量多地放入代理2 作业。

    Raises:
        ContractError: 准则组合或权重不符
    """
    require_criteria(
        instance, "solve_e_wc",
        CriterionKind.WEIGHTED_JIT_COUNT, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
        unit_w1=True,
    )
    if instance.a1 > instance.n:
        return SolveOutcome.none(stats, reason=f"准时作业数不可能达到 {instance.a1}")
    need = max(0, instance.a1)

    def probe(order: Tuple[int, ...]):
        ctx = JitDpContext(instance.jobs1, [instance.jobs2[i] for i in order])
        table, parent = jit_completion_table(ctx)
        states = (ctx.n + 2) * (ctx.n + 1) * (ctx.k + 1)
        for e in range(need, ctx.n + 1):
            cost = table[ctx.n + 1][e][ctx.k]
            if cost is not None and cost <= instance.a2:
                return (ctx, _trace(parent, ctx.n + 1, e, ctx.k)), states
        return None, states

    _, hit, probed, nodes = first_success(itertools.permutations(range(instance.k)), probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if hit is None:
        return SolveOutcome.none(stats, reason="代理2 的所有排列均不满足界限")
    ctx, path = hit
    return SolveOutcome.found(_realize_path(ctx, path, ()), stats)


def _packed_on_time(ctx: JitDpContext, a: int, ell: int, count: int) -> bool:
    start = ctx.d[a] - ctx.prefix_p[ell]
    return all(start + ctx.prefix_p[j + 1] <= ctx.jobs2[j].d for j in range(ell, ell + count))


def jit_weight_table(ctx: JitDpContext) -> Tuple[List, List]:
    """
    表 W[b][ell]：以准时作业 b 结尾、已放入 ell 个（全部准时的）代理2 作业时，
    代理1 准时权重的最大值（不可达为 None）
    """
    n, k = ctx.n, ctx.k
    table = [[None] * (k + 1) for _ in range(n + 2)]
    parent = [[None] * (k + 1) for _ in range(n + 2)]
    table[0][0] = 0
    for b in range(1, n + 2):
        for a in range(b):
            if ctx.gap(a, b) < 0:
                continue
            for ell in range(k + 1):
                base = table[a][ell]
                if base is None:
                    continue
                count = packable_count(ctx, a, b, ell)
                if not _packed_on_time(ctx, a, ell, count):
                    continue
                value = base + ctx.w[b]
                target = ell + count
                if table[b][target] is None or value > table[b][target]:
                    table[b][target] = value
                    parent[b][target] = (a, ell)
    return table, parent


@solver_entry("we_wu")
def solve_we_wu(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 ΣwE ≥ A1，代理2 ΣwU ≤ A2

    枚举代理2 的迟到集合，其余作业按 EDD 必须准时地插入代理1 准时作业之间。

    Raises:
        ContractError: 准则组合不符
    """
    require_criteria(
        instance, "solve_we_wu",
        CriterionKind.WEIGHTED_JIT_COUNT, CriterionKind.WEIGHTED_TARDY_COUNT,
    )
    jobs2 = list(instance.jobs2)

    def probe(mask: int):
        early, tardy = split_by_mask(jobs2, mask)
        ctx = JitDpContext(instance.jobs1, edd_order(early))
        table, parent = jit_weight_table(ctx)
        states = (ctx.n + 2) * (ctx.k + 1)
        value = table[ctx.n + 1][ctx.k]
        if value is None or value < instance.a1:
            return None, states
        path: List[Tuple[int, int, int]] = []
        b, ell = ctx.n + 1, ctx.k
        while b != 0:
            a, prev_ell = parent[b][ell]
            path.append((b, prev_ell, ell - prev_ell))
            b, ell = a, prev_ell
        path.reverse()
        return _realize_path(ctx, path, tardy), states

    _, witness, probed, nodes = first_success(tardy_subsets(jobs2, instance.a2), probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if witness is None:
        return SolveOutcome.none(stats, reason="没有满足界限的代理2 迟到集合")
    return SolveOutcome.found(witness, stats)


class _DisjointSubsets:
    """代理2 可准时作业中区间两两不交的子集"""

    def __init__(self, jobs2: Sequence[Job]):
        self.intervals = [JitInterval(job) for job in jobs2 if job.can_be_jit]
        self.intervals.sort(key=lambda iv: (iv.start, iv.end, iv.job.id))

    def members(self, mask: int) -> List[JitInterval]:
        return [iv for i, iv in enumerate(self.intervals) if mask >> i & 1]

    @staticmethod
    def disjoint(members: Sequence[JitInterval]) -> bool:
        return all(left.end <= right.start for left, right in zip(members, members[1:]))


@solver_entry("we_we")
def solve_we_we(instance: Instance, stats: SearchStats, threads: Optional[int] = None) -> SolveOutcome:
    """
    代理1 ΣwE ≥ A1，代理2 ΣwE ≥ A2

    枚举代理2 的准时子集（区间两两不交、权重达到 A2），
    代理1 在剩余空隙里做加权区间调度。

    Raises:
        ContractError: 准则组合不符
    """
    require_criteria(
        instance, "solve_we_we",
        CriterionKind.WEIGHTED_JIT_COUNT, CriterionKind.WEIGHTED_JIT_COUNT,
    )
    subsets = _DisjointSubsets(instance.jobs2)
    candidates1 = [JitInterval(job) for job in instance.jobs1 if job.can_be_jit]
    windows = WindowedIntervalTable([(iv.start, iv.end, iv.job.w) for iv in candidates1])

    def probe(mask: int):
        members = subsets.members(mask)
        if not subsets.disjoint(members) or sum(iv.job.w for iv in members) < instance.a2:
            return None, 1
        total = 0
        left = 0
        for iv in members:
            total += windows.best(left, iv.start)
            left = iv.end
        total += windows.best(left, None)
        return (members if total >= instance.a1 else None), 1

    _, members, probed, nodes = first_success(range(1 << len(subsets.intervals)), probe, threads)
    stats.subproblems += probed
    stats.nodes += nodes
    if members is None:
        return SolveOutcome.none(stats, reason="没有满足两个界限的准时区间组合")

    allowed = [iv for iv in candidates1 if not any(iv.overlaps(other) for other in members)]
    _, chosen = weighted_interval_scheduling([(iv.start, iv.end, iv.job.w) for iv in allowed])
    pinned = [allowed[i] for i in chosen] + list(members)
    entries = [ScheduledJob(iv.job, iv.start) for iv in pinned]
    pinned_keys = {iv.job.key for iv in pinned}
    free = max((iv.end for iv in pinned), default=0)
    for job in instance.all_jobs:
        if job.key not in pinned_keys:
            entries.append(ScheduledJob(job, free))
            free += job.p
    return SolveOutcome.found(Schedule(tuple(entries)), stats)
