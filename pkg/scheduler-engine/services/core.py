"""
调度核心模型
包含作业、实例、调度方案等领域类型，目标函数评估、准则语义，
以及所有算法共用的 SPT / EDD 排序与左移规范化
"""

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import wraps
from typing import Callable, Collection, Dict, Iterable, List, Optional, Sequence, Tuple

from config import config
from services.errors import (
    ContractError,
    NormalizationError,
    PreconditionError,
    StructuralError,
)
from utils.logger import setup_logger

logger = setup_logger(__name__)

JobKey = Tuple[int, int]


class Direction(str, Enum):
    """准则界限方向"""

    AT_MOST = "<="
    AT_LEAST = ">="


class CriterionKind(str, Enum):
    """三种调度准则"""

    TOTAL_WEIGHTED_COMPLETION = "TotalWeightedCompletion"
    WEIGHTED_TARDY_COUNT = "WeightedTardyCount"
    WEIGHTED_JIT_COUNT = "WeightedJITCount"

    @property
    def direction(self) -> Direction:
        if self is CriterionKind.WEIGHTED_JIT_COUNT:
            return Direction.AT_LEAST
        return Direction.AT_MOST

    @property
    def needs_due_date(self) -> bool:
        return self is not CriterionKind.TOTAL_WEIGHTED_COMPLETION


@dataclass(frozen=True)
class Criterion:
    """一个代理的调度准则，方向由准则类型决定"""

    kind: CriterionKind

    @property
    def direction(self) -> Direction:
        return self.kind.direction

    @property
    def needs_due_date(self) -> bool:
        return self.kind.needs_due_date

    def satisfied(self, value: int, bound: int) -> bool:
        """判断准则值是否满足界限"""
        if self.direction is Direction.AT_MOST:
            return value <= bound
        return value >= bound

    def better(self, left: int, right: int) -> bool:
        """left 是否严格优于 right"""
        if self.direction is Direction.AT_MOST:
            return left < right
        return left > right

    def __str__(self) -> str:
        return f"{self.kind.value} {self.direction.value}"


SUM_WC = Criterion(CriterionKind.TOTAL_WEIGHTED_COMPLETION)
SUM_WU = Criterion(CriterionKind.WEIGHTED_TARDY_COUNT)
SUM_WE = Criterion(CriterionKind.WEIGHTED_JIT_COUNT)


def _check_int(value, name: str, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise StructuralError(f"{name} 必须是整数: {value!r}")
    if value < minimum:
        raise StructuralError(f"{name} 必须不小于 {minimum}: {value}")


@dataclass(frozen=True)
class Job:
    """单个作业：代理标签、加工时间、权重与可选交期"""

    id: int
    agent: int
    p: int
    w: int = 1
    d: Optional[int] = None

    def __post_init__(self) -> None:
        _check_int(self.id, "id", 0)
        if self.agent not in (1, 2):
            raise StructuralError(f"agent 只能是 1 或 2: {self.agent!r}")
        _check_int(self.p, "p", 1)
        _check_int(self.w, "w", 1)
        if self.d is not None:
            _check_int(self.d, "d", 1)

    @property
    def key(self) -> JobKey:
        return (self.agent, self.id)

    @property
    def can_be_jit(self) -> bool:
        """只有 d >= p 的作业才能在交期处完工"""
        return self.d is not None and self.d >= self.p

    def __str__(self) -> str:
        return f"J{self.agent}.{self.id}"


@dataclass(frozen=True)
class Instance:
    """两代理单机调度实例"""

    jobs1: Tuple[Job, ...]
    jobs2: Tuple[Job, ...]
    crit1: Criterion
    crit2: Criterion
    a1: int
    a2: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs1", tuple(self.jobs1))
        object.__setattr__(self, "jobs2", tuple(self.jobs2))
        _check_int(self.a1, "a1", 0)
        _check_int(self.a2, "a2", 0)
        for agent, jobs, crit in ((1, self.jobs1, self.crit1), (2, self.jobs2, self.crit2)):
            seen = set()
            for position, job in enumerate(jobs):
                if job.agent != agent:
                    raise StructuralError(f"jobs{agent}[{position}] 的代理标签为 {job.agent}")
                if job.id in seen:
                    raise StructuralError(f"jobs{agent} 中作业编号重复: {job.id}")
                seen.add(job.id)
                if crit.needs_due_date and job.d is None:
                    raise StructuralError(f"jobs{agent}[{position}].d: 准则 {crit.kind.value} 需要交期")

    @property
    def n(self) -> int:
        return len(self.jobs1)

    @property
    def k(self) -> int:
        return len(self.jobs2)

    @property
    def all_jobs(self) -> Tuple[Job, ...]:
        return self.jobs1 + self.jobs2

    def jobs_of(self, agent: int) -> Tuple[Job, ...]:
        return self.jobs1 if agent == 1 else self.jobs2

    def criterion_of(self, agent: int) -> Criterion:
        return self.crit1 if agent == 1 else self.crit2

    def bound_of(self, agent: int) -> int:
        return self.a1 if agent == 1 else self.a2

    def with_bounds(self, a1: Optional[int] = None, a2: Optional[int] = None) -> "Instance":
        """返回替换界限后的新实例"""
        return replace(
            self,
            a1=self.a1 if a1 is None else a1,
            a2=self.a2 if a2 is None else a2,
        )

    def swapped(self) -> "Instance":
        """交换两个代理（连同准则与界限）"""
        return Instance(
            jobs1=tuple(replace(job, agent=1) for job in self.jobs2),
            jobs2=tuple(replace(job, agent=2) for job in self.jobs1),
            crit1=self.crit2,
            crit2=self.crit1,
            a1=self.a2,
            a2=self.a1,
        )

    def relabeled(self, offset: int) -> "Instance":
        """作业编号整体平移，用于验证结果与编号无关"""
        return replace(
            self,
            jobs1=tuple(replace(job, id=job.id + offset) for job in self.jobs1),
            jobs2=tuple(replace(job, id=job.id + offset) for job in self.jobs2),
        )


@dataclass(frozen=True)
class ScheduledJob:
    """调度中的一项：作业与开始时间，执行区间为 (start, start + p]"""

    job: Job
    start: int

    @property
    def completion(self) -> int:
        return self.start + self.job.p


@dataclass(frozen=True)
class Schedule:
    """单机调度方案（允许空闲时间）"""

    entries: Tuple[ScheduledJob, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Job, int]]) -> "Schedule":
        return cls(tuple(ScheduledJob(job, start) for job, start in pairs))

    def by_start(self) -> List[ScheduledJob]:
        return sorted(self.entries, key=lambda entry: (entry.start, entry.job.key))

    def completion_of(self, key: JobKey) -> int:
        for entry in self.entries:
            if entry.job.key == key:
                return entry.completion
        raise StructuralError(f"调度中不存在作业 {key}")

    @property
    def makespan(self) -> int:
        return max((entry.completion for entry in self.entries), default=0)

    def lines(self) -> List[str]:
        """按开始时间输出 (job, start, completion) 行"""
        return [
            f"({entry.job}, {entry.start}, {entry.completion})"
            for entry in self.by_start()
        ]


@dataclass(frozen=True)
class JobOutcome:
    """单个作业的完工信息"""

    job: Job
    completion: int
    tardy: bool
    jit: bool
    lateness: Optional[int]


@dataclass(frozen=True)
class ObjectiveReport:
    """两代理的准则值与每个作业的派生指标"""

    value1: int
    value2: int
    outcomes: Tuple[JobOutcome, ...]

    def value_of(self, agent: int) -> int:
        return self.value1 if agent == 1 else self.value2

    def early_jobs(self, agent: int) -> List[Job]:
        return [o.job for o in self.outcomes if o.job.agent == agent and o.lateness is not None and o.lateness <= 0]

    def tardy_jobs(self, agent: int) -> List[Job]:
        return [o.job for o in self.outcomes if o.job.agent == agent and o.tardy]

    def jit_jobs(self, agent: int) -> List[Job]:
        return [o.job for o in self.outcomes if o.job.agent == agent and o.jit]


class Verdict(str, Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


@dataclass
class SearchStats:
    """搜索统计：节点数、子问题数、耗时"""

    nodes: int = 0
    subproblems: int = 0
    elapsed_ms: float = 0.0
    extra: Dict[str, int] = field(default_factory=dict)

    def absorb(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.subproblems += other.subproblems
        for name, value in other.extra.items():
            self.extra[name] = self.extra.get(name, 0) + value


@dataclass(frozen=True)
class SolveOutcome:
    """求解结果：可行（附见证调度）或不可行，以及搜索统计"""

    verdict: Verdict
    witness: Optional[Schedule]
    stats: SearchStats
    solver: str = ""
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE

    @classmethod
    def found(cls, witness: Schedule, stats: SearchStats, solver: str = "") -> "SolveOutcome":
        return cls(Verdict.FEASIBLE, witness, stats, solver)

    @classmethod
    def none(cls, stats: SearchStats, solver: str = "", reason: str = "") -> "SolveOutcome":
        return cls(Verdict.INFEASIBLE, None, stats, solver, reason)


def _criterion_value(kind: CriterionKind, outcomes: Iterable[JobOutcome]) -> int:
    if kind is CriterionKind.TOTAL_WEIGHTED_COMPLETION:
        return sum(o.job.w * o.completion for o in outcomes)
    if kind is CriterionKind.WEIGHTED_TARDY_COUNT:
        return sum(o.job.w for o in outcomes if o.tardy)
    return sum(o.job.w for o in outcomes if o.jit)


def evaluate(schedule: Schedule, instance: Instance) -> ObjectiveReport:
    """
    计算调度方案下两个代理的准则值

    Args:
        schedule: 调度方案
        instance: 调度实例

    Returns:
        ObjectiveReport: 准则值与作业级指标

    Raises:
        StructuralError: 调度中的作业集合与实例不一致
    """
    expected = {job.key: job for job in instance.all_jobs}
    seen = set()
    outcomes: List[JobOutcome] = []
    for entry in schedule.entries:
        key = entry.job.key
        if key not in expected or expected[key] != entry.job:
            raise StructuralError(f"作业 {entry.job} 不属于该实例")
        if key in seen:
            raise StructuralError(f"作业 {entry.job} 在调度中出现多次")
        seen.add(key)
        completion = entry.completion
        job = entry.job
        if job.d is None:
            outcomes.append(JobOutcome(job, completion, False, False, None))
        else:
            outcomes.append(JobOutcome(job, completion, completion > job.d, completion == job.d, completion - job.d))
    missing = set(expected) - seen
    if missing:
        raise StructuralError(f"调度缺少作业: {sorted(missing)}")

    value1 = _criterion_value(instance.crit1.kind, (o for o in outcomes if o.job.agent == 1))
    value2 = _criterion_value(instance.crit2.kind, (o for o in outcomes if o.job.agent == 2))
    return ObjectiveReport(value1, value2, tuple(outcomes))


def check_schedule(schedule: Schedule, instance: Instance) -> Tuple[bool, str]:
    """
    检查调度方案是否可行，并给出原因

    Returns:
        (是否可行, 诊断信息)
    """
    try:
        report = evaluate(schedule, instance)
    except StructuralError as e:
        return False, str(e)

    busy_until = 0
    for entry in schedule.by_start():
        if entry.start < 0:
            return False, f"作业 {entry.job} 的开始时间为负: {entry.start}"
        if entry.start < busy_until:
            return False, f"作业 {entry.job} 与前一作业重叠 (开始 {entry.start} < {busy_until})"
        busy_until = entry.completion

    if not instance.crit1.satisfied(report.value1, instance.a1):
        return False, f"代理1 准则值 {report.value1} 不满足 {instance.crit1.direction.value} {instance.a1}"
    if not instance.crit2.satisfied(report.value2, instance.a2):
        return False, f"代理2 准则值 {report.value2} 不满足 {instance.crit2.direction.value} {instance.a2}"
    return True, "ok"


def is_feasible_schedule(schedule: Schedule, instance: Instance) -> bool:
    return check_schedule(schedule, instance)[0]


def spt_order(jobs: Iterable[Job]) -> List[Job]:
    """按加工时间非降序排列，相同时按编号"""
    return sorted(jobs, key=lambda job: (job.p, job.id))


def edd_order(jobs: Iterable[Job]) -> List[Job]:
    """
    按交期非降序排列，相同时按编号

    Raises:
        PreconditionError: 存在缺少交期的作业
    """
    jobs = list(jobs)
    for job in jobs:
        if job.d is None:
            raise PreconditionError(f"作业 {job} 缺少交期，无法按 EDD 排序")
    return sorted(jobs, key=lambda job: (job.d, job.id))


def normalize_left_shift(sequence: Sequence[Job], designated: Collection[JobKey] = ()) -> Schedule:
    """
    按给定顺序排布作业：普通作业在机器空闲时立即开始，
    指定的准时作业恰好在 d - p 开始

    Args:
        sequence: 作业顺序
        designated: 需要在交期处完工的作业键集合

    Returns:
        Schedule: 排布后的调度

    Raises:
        NormalizationError: 指定作业无法在交期处完工
    """
    designated = set(designated)
    entries: List[ScheduledJob] = []
    free = 0
    for job in sequence:
        if job.key in designated:
            if job.d is None or job.d < job.p:
                raise NormalizationError(f"作业 {job} 不可能在交期处完工")
            start = job.d - job.p
            if start < free:
                raise NormalizationError(f"作业 {job} 需要在 {start} 开始，但机器在 {free} 才空闲")
        else:
            start = free
        entries.append(ScheduledJob(job, start))
        free = start + job.p
    return Schedule(tuple(entries))


def append_jobs(schedule: Schedule, jobs: Iterable[Job]) -> Schedule:
    """把作业依次追加到调度末尾"""
    free = schedule.makespan
    entries = list(schedule.entries)
    for job in jobs:
        entries.append(ScheduledJob(job, free))
        free += job.p
    return Schedule(tuple(entries))


def require_criteria(
    instance: Instance,
    solver: str,
    kind1: CriterionKind,
    kind2: CriterionKind,
    unit_w1: bool = False,
    unit_w2: bool = False,
) -> None:
    """
    检查实例是否落在求解器的适用范围内

    Raises:
        ContractError: 准则组合或权重不符
    """
    if instance.crit1.kind is not kind1 or instance.crit2.kind is not kind2:
        raise ContractError(
            f"{solver} 只接受 ({kind1.value}, {kind2.value})，"
            f"实际为 ({instance.crit1.kind.value}, {instance.crit2.kind.value})"
        )
    if unit_w1 and any(job.w != 1 for job in instance.jobs1):
        raise ContractError(f"{solver} 要求代理1 的权重全部为 1")
    if unit_w2 and any(job.w != 1 for job in instance.jobs2):
        raise ContractError(f"{solver} 要求代理2 的权重全部为 1")


def solver_entry(name: str) -> Callable:
    """
    求解器入口装饰器：计时、记录日志，并在配置开启时自检见证调度

    被装饰函数签名为 fn(instance, stats, **kwargs) -> SolveOutcome
    """

    def decorate(fn: Callable[..., SolveOutcome]) -> Callable[..., SolveOutcome]:
        @wraps(fn)
        def run(instance: Instance, **kwargs) -> SolveOutcome:
            stats = SearchStats()
            started = time.perf_counter()
            outcome = fn(instance, stats, **kwargs)
            stats.elapsed_ms = (time.perf_counter() - started) * 1000.0
            outcome = replace(outcome, solver=name)
            if outcome.feasible and config.VERIFY_WITNESS:
                ok, reason = check_schedule(outcome.witness, instance)
                if not ok:
                    logger.error(f"{name} 返回的见证调度不可行: {reason}")
                    raise ContractError(f"{name} 返回的见证调度不可行: {reason}")
            logger.debug(
                f"{name}: {outcome.verdict.value}, nodes={stats.nodes}, "
                f"subproblems={stats.subproblems}, ms={stats.elapsed_ms:.2f}"
            )
            return outcome

        run.solver_name = name
        return run

    return decorate
