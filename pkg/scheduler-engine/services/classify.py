"""
可解性分类与路由
根据两代理准则组合及实例结构（单位权重、单位工时、公共交期）给出
复杂度结论与对应求解器；困难或未决的单元只能交给预言机
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

from services.completion_algorithms import solve_c_wc, solve_c_wu, solve_wc_wc_unitp
from services.core import CriterionKind, Instance, SolveOutcome
from services.errors import ContractError
from services.jit_algorithms import solve_e_wc, solve_we_we, solve_we_wu
from services.oracle import OracleBudget, brute_force_feasible
from services.tardy_algorithms import solve_u_c, solve_u_wc, solve_u_wu, solve_wu_wu_unitp
from utils.logger import setup_logger

logger = setup_logger(__name__)

ORACLE_ONLY = "oracle-only"

SOLVERS: Dict[str, Callable[..., SolveOutcome]] = {
    "c_wc": solve_c_wc,
    "wc_wc_unitp": solve_wc_wc_unitp,
    "c_wu": solve_c_wu,
    "u_wc": solve_u_wc,
    "u_c": solve_u_c,
    "u_wu": solve_u_wu,
    "wu_wu_unitp": solve_wu_wu_unitp,
    "e_wc": solve_e_wc,
    "we_wu": solve_we_wu,
    "we_we": solve_we_we,
}


class TractabilityStatus(str, Enum):
    FPT = "FPT"
    XP = "XP"
    NP_HARD = "NP-hard-for-constant-k"
    OPEN = "Open"


@dataclass(frozen=True)
class InstanceFlags:
    """影响分类的结构特征"""

    unit_w1: bool
    unit_w2: bool
    unit_p1: bool
    unit_p_all: bool
    common_d1: bool

    @classmethod
    def of(cls, instance: Instance) -> "InstanceFlags":
        due1 = {job.d for job in instance.jobs1}
        return cls(
            unit_w1=all(job.w == 1 for job in instance.jobs1),
            unit_w2=all(job.w == 1 for job in instance.jobs2),
            unit_p1=all(job.p == 1 for job in instance.jobs1),
            unit_p_all=all(job.p == 1 for job in instance.all_jobs),
            common_d1=len(due1) <= 1 and None not in due1,
        )


@dataclass(frozen=True)
class TractabilityVerdict:
    """分类结论：复杂度状态、结论标签、求解器名（或 oracle-only）、依据说明"""

    status: TractabilityStatus
    citation: str
    solver: str
    note: str = ""
    basis: str = ""

    def __post_init__(self) -> None:
        polynomial = self.status in (TractabilityStatus.FPT, TractabilityStatus.XP)
        if polynomial and self.solver not in SOLVERS:
            raise ContractError(f"{self.status.value} 结论必须指向已实现的求解器，实际为 {self.solver}")
        if not polynomial and self.solver != ORACLE_ONLY:
            raise ContractError(f"{self.status.value} 结论只能交给预言机，实际为 {self.solver}")
        if not self.citation:
            raise ContractError("分类结论必须带结论标签")

    @property
    def solvable(self) -> bool:
        return self.solver != ORACLE_ONLY


def _fpt(solver: str, citation: str, basis: str, note: str = "") -> TractabilityVerdict:
    return TractabilityVerdict(TractabilityStatus.FPT, citation, solver, note, basis)


def _hard(citation: str, basis: str, note: str = "") -> TractabilityVerdict:
    return TractabilityVerdict(TractabilityStatus.NP_HARD, citation, ORACLE_ONLY, note, basis)


_WC = CriterionKind.TOTAL_WEIGHTED_COMPLETION
_WU = CriterionKind.WEIGHTED_TARDY_COUNT
_WE = CriterionKind.WEIGHTED_JIT_COUNT

_COMMON_DUE = "代理1 公共交期时结论不变"


def _completion_row(kind2: CriterionKind, flags: InstanceFlags) -> TractabilityVerdict:
    if kind2 is _WC:
        if flags.unit_w1:
            return _fpt("c_wc", 'Th. "unit weights2"', "代理1 单位权重：枚举代理2 的 k! 个顺序，每个顺序解一个有界整数规划")
        if flags.unit_p1:
            return _fpt("wc_wc_unitp", 'Th. "unit processing"', "代理1 单位工时：按权重排序后同样归结为 k! 个整数规划")
        return _hard('Th. "single job bob"', "代理1 一般 ΣwC：k = 1 时即可由 Partition 归约，NP 完全")
    if kind2 is _WU:
        if flags.unit_w1:
            return _fpt("c_wu", 'Th. "single job bob3"', "代理1 单位权重：枚举代理2 迟到集合，O(2^k n)")
        return _hard('Th. "single job bob"', "代理1 一般 ΣwC：k = 1 时即可由 Partition 归约，NP 完全")
    return _hard('Cor. "hardness1"', "代理2 为 ΣwE 时，代理1 为完工时间类准则即 NP 难（k = 1 的 Partition 归约）")


def _tardy_row(kind2: CriterionKind, flags: InstanceFlags) -> TractabilityVerdict:
    general_hard = ('Cor. "SigmaWUhardness"', "代理1 ΣwU 在 k = 0 时即为 NP 完全（背包式）")
    due_note = _COMMON_DUE if flags.common_d1 else ""
    if kind2 is _WC:
        if flags.unit_w1:
            solver = "u_c" if flags.unit_w2 else "u_wc"
            citation = 'Cor. "ucuc"' if flags.unit_w2 else 'Th. "ucuc"'
            return TractabilityVerdict(
                TractabilityStatus.XP,
                citation,
                solver,
                "是否关于 k 为 FPT 尚未解决",
                "代理1 单位权重：EDD 连续分块 + 带起点的 Moore-Hodgson，n^O(k)",
            )
        return _hard(*general_hard, note=due_note)
    if kind2 is _WU:
        if flags.unit_w1:
            return _fpt("u_wu", 'Th. "uuu"', "代理1 单位权重：枚举代理2 迟到集合后做合并 EDD 扫描，O(2^k n log n)")
        if flags.unit_p_all:
            return _fpt("wu_wu_unitp", 'Th. "uuu2"', "全部单位工时：枚举代理2 迟到集合后做拟阵贪心，O(2^k n log n)")
        return _hard(*general_hard, note=due_note)
    return _hard(
        'Cor. "hardness2"',
        "代理2 为 ΣwE 时，代理1 为迟到类准则即 NP 难（k = 1 的 Partition 归约）",
        note=due_note,
    )


def _jit_row(kind2: CriterionKind, flags: InstanceFlags) -> TractabilityVerdict:
    if kind2 is _WC:
        if flags.unit_w1:
            return _fpt("e_wc", 'Th. "EC1"', "代理1 单位权重：对 k! 个顺序做准时作业动态规划，O(k! k^2 n^3)")
        return TractabilityVerdict(
            TractabilityStatus.OPEN,
            "Open",
            ORACLE_ONLY,
            basis="代理1 加权 ΣwE、代理2 ΣwC：复杂度尚未解决",
        )
    if kind2 is _WU:
        return _fpt("we_wu", 'Th. "EU1"', "枚举代理2 准时集合后做准时作业动态规划，O(2^k k^2 n^2)")
    note = "k 不受限时即使全部单位工时也是 NP 完全" if flags.unit_p_all else ""
    return _fpt("we_we", 'Th. "single job bob4"', "枚举代理2 的准时子集后做加权区间调度，O(2^k n log n)", note)


def classify(instance: Instance) -> TractabilityVerdict:
    """
    给出实例所在单元的复杂度结论与求解器

    Raises:
        ContractError: 准则组合不在九个单元之内
    """
    flags = InstanceFlags.of(instance)
    rows = {_WC: _completion_row, _WU: _tardy_row, _WE: _jit_row}
    row = rows.get(instance.crit1.kind)
    if row is None or instance.crit2.kind not in rows:
        raise ContractError(f"未知的准则组合: ({instance.crit1}, {instance.crit2})")
    return row(instance.crit2.kind, flags)


def route_and_solve(
    instance: Instance,
    threads: Optional[int] = None,
    oracle_fallback: bool = False,
    budget: Optional[OracleBudget] = None,
) -> Tuple[TractabilityVerdict, SolveOutcome]:
    """
    分类后调用对应求解器

    Args:
        instance: 调度实例
        threads: 子问题扫描线程数
        oracle_fallback: 困难/未决单元是否交给预言机
        budget: 预言机预算

    Returns:
        (分类结论, 求解结果)

    Raises:
        ContractError: 困难/未决单元且未开启预言机回退
        BudgetExceededError: 预言机超出预算
    """
    verdict = classify(instance)
    try:
        if verdict.solvable:
            outcome = SOLVERS[verdict.solver](instance, threads=threads)
        elif oracle_fallback:
            logger.info(f"{verdict.status.value} 单元，改用预言机求解")
            outcome = brute_force_feasible(instance, budget=budget)
        else:
            raise ContractError(
                f"实例属于 {verdict.status.value} 单元（{verdict.citation}），"
                "没有专用求解器；可使用 --oracle-fallback"
            )
        return verdict, outcome
    except Exception as e:
        logger.error(f"求解失败: {e}")
        raise
