"""
暴力枚举预言机
对小规模实例精确判定可行性，是所有求解器与交换引理的基准

枚举全部作业排列；对每个排列，再枚举 JIT 准则代理中每个可准时作业
“尽早开始 / 恰在交期完工”两种选择，用左移规范化排布。
完备性：任一可行调度都可以在不破坏可行性的前提下变换为这种形式，
左移不会增大 ΣwC 与 ΣwU，而计入 JIT 的作业保持钉在 C = d。
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from config import config
from services.core import (
    CriterionKind,
    Instance,
    Job,
    Schedule,
    ScheduledJob,
    SearchStats,
    SolveOutcome,
    solver_entry,
)
from services.errors import BudgetExceededError, StructuralError
from utils.logger import setup_logger

logger = setup_logger(__name__)

OrderFilter = Callable[[Sequence[Job]], bool]
LayoutFilter = Callable[[Sequence[Job], Sequence[int]], bool]


@dataclass(frozen=True)
class OracleBudget:
    """预言机预算：作业总数上限与叶子配置数上限"""

    max_total_jobs: int = 8
    max_configurations: int = 20_000_000

    def __post_init__(self) -> None:
        if self.max_total_jobs <= 0 or self.max_configurations <= 0:
            raise StructuralError("预言机预算必须为正")

    @classmethod
    def from_config(cls) -> "OracleBudget":
        return cls(**config.get_oracle_config())


def _check_budget(instance: Instance, budget: OracleBudget) -> None:
    total = instance.n + instance.k
    if total > budget.max_total_jobs:
        raise BudgetExceededError(f"作业总数 {total} 超过预言机上限 {budget.max_total_jobs}")


def _values(instance: Instance, sequence: Sequence[Job], completions: Sequence[int]) -> Tuple[int, int]:
    values = [0, 0, 0]
    kinds = (None, instance.crit1.kind, instance.crit2.kind)
    for job, completion in zip(sequence, completions):
        kind = kinds[job.agent]
        if kind is CriterionKind.TOTAL_WEIGHTED_COMPLETION:
            values[job.agent] += job.w * completion
        elif kind is CriterionKind.WEIGHTED_TARDY_COUNT:
            if completion > job.d:
                values[job.agent] += job.w
        elif completion == job.d:
            values[job.agent] += job.w
    return values[1], values[2]


def iter_layouts(
    instance: Instance,
    budget: Optional[OracleBudget] = None,
    order_filter: Optional[OrderFilter] = None,
    layout_filter: Optional[LayoutFilter] = None,
    stats: Optional[SearchStats] = None,
) -> Iterator[Tuple[Tuple[Job, ...], List[int], Tuple[int, int]]]:
    """
    按确定顺序产出所有规范化排布

    排列按字典序（作业在 jobs1 + jobs2 中的下标），每个排列内
    指定集合按 (否, 是) 的乘积顺序枚举。

    Yields:
        (作业顺序, 各作业开始时间, (代理1 准则值, 代理2 准则值))
    """
    budget = budget or OracleBudget.from_config()
    _check_budget(instance, budget)
    stats = stats if stats is not None else SearchStats()
    jobs = instance.all_jobs
    pinnable_agents = {
        agent
        for agent in (1, 2)
        if instance.criterion_of(agent).kind is CriterionKind.WEIGHTED_JIT_COUNT
    }
    leaves = 0
    for permutation in itertools.permutations(range(len(jobs))):
        sequence = tuple(jobs[i] for i in permutation)
        if order_filter is not None and not order_filter(sequence):
            continue
        stats.subproblems += 1
        pinnable = [pos for pos, job in enumerate(sequence) if job.agent in pinnable_agents and job.can_be_jit]
        for mask in itertools.product((False, True), repeat=len(pinnable)):
            pinned = {pos for pos, flag in zip(pinnable, mask) if flag}
            starts: List[int] = []
            free = 0
            valid = True
            for pos, job in enumerate(sequence):
                if pos in pinned:
                    start = job.d - job.p
                    if start < free:
                        valid = False
                        break
                else:
                    start = free
                starts.append(start)
                free = start + job.p
            if not valid:
                continue
            leaves += 1
            stats.nodes += 1
            if leaves > budget.max_configurations:
                raise BudgetExceededError(f"预言机叶子数超过上限 {budget.max_configurations}")
            completions = [start + job.p for start, job in zip(starts, sequence)]
            if layout_filter is not None and not layout_filter(sequence, completions):
                continue
            yield sequence, starts, _values(instance, sequence, completions)


@solver_entry("oracle")
def _brute_force(
    instance: Instance,
    stats: SearchStats,
    budget: Optional[OracleBudget] = None,
    order_filter: Optional[OrderFilter] = None,
    layout_filter: Optional[LayoutFilter] = None,
) -> SolveOutcome:
    for sequence, starts, (value1, value2) in iter_layouts(instance, budget, order_filter, layout_filter, stats):
        if instance.crit1.satisfied(value1, instance.a1) and instance.crit2.satisfied(value2, instance.a2):
            witness = Schedule(tuple(ScheduledJob(job, start) for job, start in zip(sequence, starts)))
            return SolveOutcome.found(witness, stats)
    return SolveOutcome.none(stats, reason="所有规范化排布均不满足界限")


def brute_force_feasible(
    instance: Instance,
    budget: Optional[OracleBudget] = None,
    order_filter: Optional[OrderFilter] = None,
    layout_filter: Optional[LayoutFilter] = None,
) -> SolveOutcome:
    """
    暴力判定实例可行性

    Args:
        instance: 调度实例
        budget: 预算，默认读取配置
        order_filter: 可选的排列过滤（用于交换引理的规范形检验）
        layout_filter: 可选的排布过滤，参数为 (作业顺序, 完工时间)

    Returns:
        SolveOutcome：第一个可行排布为见证

    Raises:
        BudgetExceededError: 作业数或叶子数超过预算
    """
    return _brute_force(instance, budget=budget, order_filter=order_filter, layout_filter=layout_filter)


def layout_values(
    instance: Instance,
    budget: Optional[OracleBudget] = None,
    order_filter: Optional[OrderFilter] = None,
    layout_filter: Optional[LayoutFilter] = None,
) -> Set[Tuple[int, int]]:
    """所有规范化排布达到的 (代理1 值, 代理2 值) 集合；可行性等价于其中存在满足两个界限的点"""
    return {values for _, _, values in iter_layouts(instance, budget, order_filter, layout_filter)}


def feasible_from_values(instance: Instance, values: Set[Tuple[int, int]]) -> bool:
    return any(
        instance.crit1.satisfied(v1, instance.a1) and instance.crit2.satisfied(v2, instance.a2)
        for v1, v2 in values
    )


def brute_force_optimal(
    instance: Instance,
    fix_agent: int,
    budget: Optional[OracleBudget] = None,
    order_filter: Optional[OrderFilter] = None,
    layout_filter: Optional[LayoutFilter] = None,
) -> Optional[int]:
    """
    在另一代理界限约束下，fix_agent 准则的最优值

    Returns:
        最小值（≤ 型准则）或最大值（≥ 型准则）；没有满足另一界限的调度时返回 None
    """
    if fix_agent not in (1, 2):
        raise StructuralError(f"fix_agent 只能是 1 或 2: {fix_agent}")
    other = 2 if fix_agent == 1 else 1
    criterion = instance.criterion_of(fix_agent)
    other_criterion = instance.criterion_of(other)
    other_bound = instance.bound_of(other)
    best: Optional[int] = None
    for _, _, values in iter_layouts(instance, budget, order_filter, layout_filter):
        if not other_criterion.satisfied(values[other - 1], other_bound):
            continue
        value = values[fix_agent - 1]
        if best is None or criterion.better(value, best):
            best = value
    return best


def pareto_front(instance: Instance, budget: Optional[OracleBudget] = None) -> List[Tuple[int, int]]:
    """规范化排布值中的非支配点，按代理1 值排序"""
    values = layout_values(instance, budget)

    def dominates(left: Tuple[int, int], right: Tuple[int, int]) -> bool:
        no_worse = all(
            not instance.criterion_of(agent).better(right[agent - 1], left[agent - 1])
            for agent in (1, 2)
        )
        return no_worse and left != right

    front = [point for point in values if not any(dominates(other, point) for other in values)]
    return sorted(front)


def exhaustive_start_times(instance: Instance, horizon: Optional[int] = None) -> SolveOutcome:
    """
    第二预言机：n + k <= 4 时尝试 0..horizon 内的全部整数开始时间

    默认 horizon = Σp + max d，覆盖所有规范化排布的开始时间。
    """
    jobs = instance.all_jobs
    if len(jobs) > 4:
        raise BudgetExceededError(f"开始时间穷举只支持不超过 4 个作业，当前 {len(jobs)}")
    if horizon is None:
        horizon = sum(job.p for job in jobs) + max((job.d for job in jobs if job.d is not None), default=0)
    stats = SearchStats()
    for starts in itertools.product(range(horizon + 1), repeat=len(jobs)):
        stats.nodes += 1
        intervals = sorted(zip(starts, (job.p for job in jobs)))
        if any(intervals[i][0] + intervals[i][1] > intervals[i + 1][0] for i in range(len(intervals) - 1)):
            continue
        completions = [start + job.p for start, job in zip(starts, jobs)]
        value1, value2 = _values(instance, jobs, completions)
        if instance.crit1.satisfied(value1, instance.a1) and instance.crit2.satisfied(value2, instance.a2):
            witness = Schedule(tuple(ScheduledJob(job, start) for job, start in zip(jobs, starts)))
            return SolveOutcome.found(witness, stats, solver="start-times")
    return SolveOutcome.none(stats, solver="start-times")


# ---------------------------------------------------------------------------
# 规范形过滤器：限制枚举空间后判定结果应保持不变
# ---------------------------------------------------------------------------

def _agent_jobs(sequence: Sequence[Job], agent: int) -> List[Job]:
    return [job for job in sequence if job.agent == agent]


def _non_decreasing(values: Sequence[int]) -> bool:
    return all(values[i] <= values[i + 1] for i in range(len(values) - 1))


def agent1_spt(sequence: Sequence[Job]) -> bool:
    """代理1 作业按加工时间非降序"""
    return _non_decreasing([job.p for job in _agent_jobs(sequence, 1)])


def agent1_weight_non_increasing(sequence: Sequence[Job]) -> bool:
    """代理1 作业按权重非增序"""
    return _non_decreasing([-job.w for job in _agent_jobs(sequence, 1)])


def _last_position(sequence: Sequence[Job], agent: int) -> int:
    """该代理最后一个作业的位置；该代理没有作业时返回 0（前缀为空）"""
    positions = [pos for pos, job in enumerate(sequence) if job.agent == agent]
    return positions[-1] if positions else 0


def agent2_early_edd_before_agent1_tail(sequence: Sequence[Job], completions: Sequence[int]) -> bool:
    """ΣC 对 ΣwU：代理1 SPT；最后一个代理1 作业之前的代理2 作业都准时且按 EDD"""
    if not agent1_spt(sequence):
        return False
    last = _last_position(sequence, 1)
    head = [(job, c) for job, c in zip(sequence[:last], completions[:last]) if job.agent == 2]
    return all(c <= job.d for job, c in head) and _non_decreasing([job.d for job, _ in head])


def early_edd_tardy_last(sequence: Sequence[Job], completions: Sequence[int]) -> bool:
    """ΣU 对 ΣwU：准时作业（两个代理）按 EDD，迟到作业全部排在最后"""
    early_dues = [job.d for job, c in zip(sequence, completions) if c <= job.d]
    if not _non_decreasing(early_dues):
        return False
    seen_tardy = False
    for job, c in zip(sequence, completions):
        if c > job.d:
            seen_tardy = True
        elif seen_tardy:
            return False
    return True


def agent1_early_edd_before_agent2_tail(sequence: Sequence[Job], completions: Sequence[int]) -> bool:
    """ΣU 对 ΣwC：最后一个代理2 作业之前的代理1 作业都准时且按 EDD"""
    last = _last_position(sequence, 2)
    head = [(job, c) for job, c in zip(sequence[:last], completions[:last]) if job.agent == 1]
    return all(c <= job.d for job, c in head) and _non_decreasing([job.d for job, _ in head])


def agent1_jit_before_agent2_tail(sequence: Sequence[Job], completions: Sequence[int]) -> bool:
    """ΣE 对 ΣwC：最后一个代理2 作业之前的代理1 作业都恰在交期完工"""
    last = _last_position(sequence, 2)
    return all(c == job.d for job, c in zip(sequence[:last], completions[:last]) if job.agent == 1)


NORMAL_FORMS: Dict[str, Tuple[Optional[OrderFilter], Optional[LayoutFilter]]] = {
    "spt": (agent1_spt, None),
    "weight-order": (agent1_weight_non_increasing, None),
    "agent2-edd-tardy-last": (None, agent2_early_edd_before_agent1_tail),
    "early-edd-tardy-last": (None, early_edd_tardy_last),
    "agent1-edd-tardy-last": (None, agent1_early_edd_before_agent2_tail),
    "jit-first": (None, agent1_jit_before_agent2_tail),
}
