"""
单代理与受约束链子程序
各二代理求解器调用的基础算法：带偏移的 Moore-Hodgson、
强制准时链下的最小总完工时间、最大准时作业数、单位工时加权准时、
以及加权区间调度
"""

import heapq
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from services.core import (
    Job,
    JobKey,
    Schedule,
    ScheduledJob,
    SearchStats,
    SolveOutcome,
    spt_order,
)
from services.errors import ContractError


@dataclass(frozen=True)
class MooreSelection:
    """Moore 选择结果：准时作业（EDD 顺序）与其完工时刻"""

    early: Tuple[Job, ...]
    makespan: int


class MooreProfile:
    """
    一段 EDD 作业在给定起点上的 Moore 结果

    记录最大准时集合及其按“先淘汰”顺序的加工时间，
    从而对任意 min_early 直接给出最小完工时刻
    """

    def __init__(self, jobs: Sequence[Job], offset: int):
        self.jobs = tuple(jobs)
        self.offset = offset
        heap: List[Tuple[int, int]] = []
        t = offset
        for position, job in enumerate(self.jobs):
            heapq.heappush(heap, (-job.p, -position))
            t += job.p
            if t > job.d:
                neg_p, _ = heapq.heappop(heap)
                t += neg_p
        # 淘汰顺序：加工时间大者先，同加工时间时位置靠后者先
        eviction = sorted(heap)
        self.kept_positions = tuple(sorted(-neg_pos for _, neg_pos in eviction))
        self.eviction_positions = tuple(-neg_pos for _, neg_pos in eviction)
        self.max_early = len(eviction)
        self.total = t - offset
        self._evicted_prefix = [0]
        for neg_p, _ in eviction:
            self._evicted_prefix.append(self._evicted_prefix[-1] - neg_p)

    def makespan(self, min_early: int) -> Optional[int]:
        """保留 min_early 个准时作业时的最小完工时刻，不可达返回 None"""
        if min_early > self.max_early:
            return None
        drop = self.max_early - min_early
        return self.offset + self.total - self._evicted_prefix[drop]

    def selection(self, min_early: int) -> Optional[MooreSelection]:
        makespan = self.makespan(min_early)
        if makespan is None:
            return None
        dropped = set(self.eviction_positions[: self.max_early - min_early])
        early = tuple(self.jobs[pos] for pos in self.kept_positions if pos not in dropped)
        return MooreSelection(early, makespan)


def moore_hodgson_offset(jobs: Sequence[Job], offset: int, min_early: int) -> Optional[MooreSelection]:
    """
    从 offset 时刻开始运行 Moore-Hodgson，返回至少 min_early 个准时作业中完工最早的选择

    Args:
        jobs: 按 EDD 排好的作业
        offset: 起始时刻
        min_early: 需要的最少准时作业数

    Returns:
        MooreSelection，准时作业数不足时返回 None

    Raises:
        ContractError: min_early 超出作业数或为负
    """
    if min_early < 0 or min_early > len(jobs):
        raise ContractError(f"min_early={min_early} 超出作业数 {len(jobs)}")
    return MooreProfile(jobs, offset).selection(min_early)


def latest_starts(chain: Sequence[Job]) -> List[int]:
    """强制准时链中每个作业的最晚开始时间（自后向前计算）"""
    starts = [0] * len(chain)
    limit = None
    for index in range(len(chain) - 1, -1, -1):
        job = chain[index]
        finish = job.d if limit is None else min(job.d, limit)
        starts[index] = finish - job.p
        limit = starts[index]
    return starts


def min_sumc_with_mandatory_early(jobs1: Sequence[Job], chain2: Sequence[Job], a1: int) -> SolveOutcome:
    """
    在代理2 链作业全部准时的约束下，最小化代理1 的总完工时间并与 a1 比较

    代理1 作业按 SPT 顺序；链作业尽量推迟，只有当再插入一个代理1 作业
    会使其超过最晚开始时间时才安排它。

    Returns:
        SolveOutcome：可行时见证为 jobs1 与链作业的部分调度，
        stats.extra["sum_completion"] 为代理1 的最小总完工时间
    """
    stats = SearchStats(subproblems=1)
    chain = list(chain2)
    starts = latest_starts(chain)
    if chain and starts[0] < 0:
        return SolveOutcome.none(stats, reason="链作业自身无法全部准时")

    entries: List[ScheduledJob] = []
    t = 0
    c = 0
    total = 0
    for job in spt_order(jobs1):
        while c < len(chain) and t + job.p > starts[c]:
            entries.append(ScheduledJob(chain[c], t))
            t += chain[c].p
            c += 1
        entries.append(ScheduledJob(job, t))
        t += job.p
        total += t
        stats.nodes += 1
    for job in chain[c:]:
        entries.append(ScheduledJob(job, t))
        t += job.p

    stats.extra["sum_completion"] = total
    if total > a1:
        return SolveOutcome.none(stats, reason=f"代理1 最小总完工时间 {total} 超过 {a1}")
    return SolveOutcome.found(Schedule(tuple(entries)), stats)


@dataclass(frozen=True)
class MandatorySelection:
    """强制准时作业下的选择：按 EDD 执行的准时序列与代理1 准时作业数"""

    count: int
    sequence: Tuple[Job, ...]


class MandatoryScanner:
    """
    合并 EDD 扫描器

    预先把代理1 作业与全部代理2 作业按 (d, 代理2 优先, id) 合并排序，
    每次扫描只需给出哪些代理2 作业必须准时，其余代理2 作业被跳过。
    """

    def __init__(self, jobs1: Sequence[Job], jobs2: Sequence[Job]):
        merged = sorted(
            [(job.d, 0, job.id, index, job) for index, job in enumerate(jobs2)]
            + [(job.d, 1, job.id, -1, job) for job in jobs1],
            key=lambda item: item[:3],
        )
        self.jobs = [item[4] for item in merged]
        self.due = [item[0] for item in merged]
        self.proc = [item[4].p for item in merged]
        self.agent2_index = [item[3] for item in merged]
        self.size = len(merged) + 1

    def scan(self, mandatory: Sequence[bool], max_tardy: Optional[int] = None) -> Optional[Tuple[int, List[int]]]:
        """
        Args:
            mandatory: 按 jobs2 下标给出的“必须准时”标记
            max_tardy: 淘汰的代理1 作业数超过它时提前返回 None

        Returns:
            (代理1 准时作业数, 被淘汰位置列表)，强制作业无法准时时返回 None
        """
        heap: List[int] = []
        heapified = False
        removed: List[int] = []
        push = heapq.heappush
        pop = heapq.heappop
        size = self.size
        due, proc, agent2_index = self.due, self.proc, self.agent2_index
        scheduled1 = 0
        t = 0
        for position in range(len(due)):
            index = agent2_index[position]
            if index >= 0:
                if not mandatory[index]:
                    continue
                t += proc[position]
                if t > due[position]:
                    if not heapified:
                        heapq.heapify(heap)
                        heapified = True
                    while t > due[position] and heap:
                        encoded = -pop(heap)
                        t -= encoded // size
                        removed.append(encoded % size)
                    if t > due[position]:
                        return None
            else:
                p = proc[position]
                t += p
                scheduled1 += 1
                encoded = p * size + position
                if heapified:
                    push(heap, -encoded)
                else:
                    heap.append(-encoded)
                if t > due[position]:
                    if not heapified:
                        heapq.heapify(heap)
                        heapified = True
                    encoded = -pop(heap)
                    t -= encoded // size
                    removed.append(encoded % size)
            if max_tardy is not None and len(removed) > max_tardy:
                return None
        return scheduled1 - len(removed), removed

    def selection(self, mandatory: Sequence[bool], max_tardy: Optional[int] = None) -> Optional[MandatorySelection]:
        result = self.scan(mandatory, max_tardy)
        if result is None:
            return None
        count, removed = result
        dropped = set(removed)
        sequence = tuple(
            job
            for position, job in enumerate(self.jobs)
            if position not in dropped
            and (self.agent2_index[position] < 0 or mandatory[self.agent2_index[position]])
        )
        return MandatorySelection(count, sequence)


def max_early_count_with_mandatory(
    jobs1: Sequence[Job],
    chain2: Sequence[Job],
    max_tardy: Optional[int] = None,
) -> Optional[MandatorySelection]:
    """
    链作业必须准时时，代理1 最多能有多少准时作业

    合并 EDD 扫描；可选作业迟到时淘汰最长的可选作业，
    强制作业迟到时反复淘汰最长的可选作业直至其准时。

    Args:
        jobs1: 代理1 作业（单位权重）
        chain2: 必须准时的代理2 作业
        max_tardy: 可选的提前终止阈值，淘汰数超过它时直接返回 None

    Returns:
        MandatorySelection，强制作业无法准时（或超过阈值）时返回 None
    """
    scanner = MandatoryScanner(jobs1, chain2)
    return scanner.selection([True] * len(chain2), max_tardy)


class _LatestFreeSlot:
    """并查集：查询不晚于 t 的最晚空闲时间槽（槽 t 表示区间 (t-1, t]）"""

    def __init__(self, horizon: int):
        self.parent = list(range(horizon + 1))

    def find(self, t: int) -> int:
        root = t
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[t] != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def take(self, t: int) -> int:
        slot = self.find(t)
        if slot > 0:
            self.parent[slot] = slot - 1
        return slot


@dataclass(frozen=True)
class UnitSlotSelection:
    """单位工时选择：代理1 准时权重与各准时作业的时间槽"""

    weight: int
    slots: Dict[JobKey, int]


def unit_time_max_wearly(
    jobs1: Sequence[Job],
    chain2: Sequence[Job],
    horizon: Optional[int] = None,
) -> Optional[UnitSlotSelection]:
    """
    单位工时作业：强制链作业准时的前提下最大化代理1 的准时权重

    链作业按交期从晚到早放入不晚于交期的最晚空闲槽，
    代理1 作业按权重非增顺序贪心放置（拟阵贪心）。

    Returns:
        UnitSlotSelection，链作业找不到时间槽时返回 None

    Raises:
        ContractError: 存在非单位工时作业
    """
    if any(job.p != 1 for job in list(jobs1) + list(chain2)):
        raise ContractError("unit_time_max_wearly 要求所有作业加工时间为 1")
    horizon = len(jobs1) + len(chain2) if horizon is None else horizon
    free = _LatestFreeSlot(horizon)
    slots: Dict[JobKey, int] = {}

    for job in sorted(chain2, key=lambda job: (-job.d, job.id)):
        slot = free.take(min(job.d, horizon))
        if slot == 0:
            return None
        slots[job.key] = slot

    weight = 0
    for job in sorted(jobs1, key=lambda job: (-job.w, job.id)):
        slot = free.take(min(job.d, horizon))
        if slot > 0:
            slots[job.key] = slot
            weight += job.w
    return UnitSlotSelection(weight, slots)


def weighted_interval_scheduling(intervals: Sequence[Tuple[int, int, int]]) -> Tuple[int, List[int]]:
    """
    加权区间调度：选择互不相交的半开区间 (start, end] 使总权重最大

    Args:
        intervals: (start, end, weight) 序列，端点相接视为相容

    Returns:
        (最大权重, 选中区间在输入中的下标，升序)
    """
    order = sorted(range(len(intervals)), key=lambda i: (intervals[i][1], intervals[i][0], i))
    ends = [intervals[i][1] for i in order]
    best = [0] * (len(order) + 1)
    pred = [0] * len(order)
    for rank, index in enumerate(order):
        start, _, weight = intervals[index]
        pred[rank] = bisect_right(ends, start, 0, rank)
        best[rank + 1] = max(best[rank], weight + best[pred[rank]])

    chosen: List[int] = []
    rank = len(order)
    while rank > 0:
        index = order[rank - 1]
        weight = intervals[index][2]
        if weight + best[pred[rank - 1]] == best[rank]:
            chosen.append(index)
            rank = pred[rank - 1]
        else:
            rank -= 1
    return best[-1], sorted(chosen)


class WindowedIntervalTable:
    """
    窗口加权区间调度查询

    对固定的一组区间，回答“完全落在 (left, right] 内的区间最多能选多少权重”。
    每个左端点只做一次前缀动态规划并缓存，右端点用二分定位。
    """

    def __init__(self, intervals: Sequence[Tuple[int, int, int]]):
        self.order = sorted(range(len(intervals)), key=lambda i: (intervals[i][1], intervals[i][0], i))
        self.starts = [intervals[i][0] for i in self.order]
        self.ends = [intervals[i][1] for i in self.order]
        self.weights = [intervals[i][2] for i in self.order]
        self.pred = [bisect_right(self.ends, self.starts[r], 0, r) for r in range(len(self.order))]
        self._prefix = lru_cache(maxsize=None)(self._build_prefix)

    def _build_prefix(self, left: int) -> List[int]:
        best = [0] * (len(self.order) + 1)
        starts, weights, pred = self.starts, self.weights, self.pred
        for r in range(len(self.order)):
            skip = best[r]
            if starts[r] >= left:
                take = weights[r] + best[pred[r]]
                best[r + 1] = take if take > skip else skip
            else:
                best[r + 1] = skip
        return best

    def best(self, left: int, right: Optional[int]) -> int:
        """完全位于 (left, right] 内的区间的最大权重，right 为 None 表示无上界"""
        best = self._prefix(left)
        if right is None:
            return best[-1]
        return best[bisect_right(self.ends, right)]
