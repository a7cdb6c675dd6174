"""
基准与校验模块
对实例集运行全部适用的求解器并与预言机、文档中的已知答案比对，
输出 CSV / Markdown 表格；另含 ΣU/ΣwU 的 2^k 规模实验与随机校验扫描
"""

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import BaseModel

from services.classify import SOLVERS
from services.core import Instance, SolveOutcome, Verdict
from services.documents import InstanceDocument
from services.errors import BudgetExceededError, ContractError
from services.generators import bound_sweep, exhaustive_family, random_family, u_wu_scaling_instance
from services.oracle import OracleBudget, brute_force_feasible
from utils.logger import setup_logger

logger = setup_logger(__name__)

COLUMNS = ["instance_id", "solver", "verdict", "nodes", "ms"]


class BenchRecord(BaseModel):
    """一次求解的记录；ms 不参与结果比对"""

    instance_id: str
    solver: str
    verdict: Verdict
    nodes: int
    ms: float


@dataclass
class BenchReport:
    records: List[BenchRecord] = field(default_factory=list)
    disagreements: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def frame(self) -> pd.DataFrame:
        return records_frame(self.records)


def records_frame(records: Sequence[BenchRecord]) -> pd.DataFrame:
    rows = [record.model_dump(mode="json") for record in records]
    frame = pd.DataFrame(rows, columns=COLUMNS)
    return frame.sort_values(["instance_id", "solver"], kind="mergesort").reset_index(drop=True)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.3f")


def to_markdown(frame: pd.DataFrame) -> str:
    return frame.to_markdown(index=False, floatfmt=".3f")


def _record(instance_id: str, outcome: SolveOutcome) -> BenchRecord:
    return BenchRecord(
        instance_id=instance_id,
        solver=outcome.solver,
        verdict=outcome.verdict,
        nodes=outcome.stats.nodes,
        ms=round(outcome.stats.elapsed_ms, 3),
    )


def _oracle_outcome(instance: Instance, budget: OracleBudget) -> Optional[SolveOutcome]:
    if instance.n + instance.k > budget.max_total_jobs:
        return None
    try:
        return brute_force_feasible(instance, budget=budget)
    except BudgetExceededError as e:
        logger.warning(f"预言机超出预算，跳过比对: {e}")
        return None


def run_bench(
    corpus: Sequence[Tuple[str, InstanceDocument]],
    solvers: Optional[Sequence[str]] = None,
    registry: Optional[Mapping[str, Callable[..., SolveOutcome]]] = None,
    budget: Optional[OracleBudget] = None,
    threads: Optional[int] = None,
) -> BenchReport:
    """
    对实例集运行所有适用求解器

    Args:
        corpus: (实例编号, 文档) 列表
        solvers: 只运行这些求解器（默认全部）
        registry: 求解器注册表，默认使用分类模块的注册表
        budget: 预言机预算
        threads: 子问题扫描线程数

    Returns:
        BenchReport：记录按 (实例, 求解器) 排序，另附分歧描述
    """
    registry = SOLVERS if registry is None else registry
    budget = budget or OracleBudget.from_config()
    names = list(registry) if solvers is None else list(solvers)
    unknown = [name for name in names if name not in registry]
    if unknown:
        raise ContractError(f"未知的求解器: {', '.join(unknown)}")

    report = BenchReport()
    for instance_id, document in corpus:
        instance = document.to_instance()
        reference = _oracle_outcome(instance, budget)
        if reference is not None:
            report.records.append(_record(instance_id, reference))
        for name in names:
            try:
                outcome = registry[name](instance, threads=threads)
            except ContractError:
                continue
            report.records.append(_record(instance_id, replace_solver(outcome, name)))
            if reference is not None and outcome.verdict is not reference.verdict:
                report.disagreements.append(
                    f"{instance_id}: {name} 判定 {outcome.verdict.value}，预言机判定 {reference.verdict.value}"
                )
            if document.expected is not None and outcome.feasible != (document.expected == "feasible"):
                report.disagreements.append(
                    f"{instance_id}: {name} 判定 {outcome.verdict.value}，已知答案为 {document.expected}"
                )

    report.records.sort(key=lambda record: (record.instance_id, record.solver))
    for line in report.disagreements:
        logger.warning(f"判定分歧 {line}")
    logger.info(f"基准完成: {len(corpus)} 个实例, {len(report.records)} 条记录, {len(report.disagreements)} 处分歧")
    return report


def replace_solver(outcome: SolveOutcome, name: str) -> SolveOutcome:
    """未经入口装饰器的求解器没有名字，用注册名补上"""
    return outcome if outcome.solver else replace(outcome, solver=name)


@dataclass
class ScalingReport:
    frame: pd.DataFrame
    ratios: List[float]

    @property
    def mean_ratio(self) -> float:
        """相邻 k 耗时比的几何平均"""
        if not self.ratios:
            return float("nan")
        return math.exp(sum(math.log(r) for r in self.ratios) / len(self.ratios))


def run_scaling(n: int = 10_000, ks: Sequence[int] = tuple(range(1, 11)), threads: Optional[int] = None) -> ScalingReport:
    """在不可行构造上测量 solve_u_wu 随 k 的耗时增长"""
    solver = SOLVERS["u_wu"]
    rows = []
    for k in ks:
        outcome = solver(u_wu_scaling_instance(n, k), threads=threads)
        if outcome.feasible:
            raise ContractError(f"规模实验实例 n={n}, k={k} 应当不可行")
        rows.append({"k": k, "subproblems": outcome.stats.subproblems, "ms": outcome.stats.elapsed_ms})
        logger.info(f"scaling k={k}: {outcome.stats.elapsed_ms:.1f} ms")
    frame = pd.DataFrame(rows, columns=["k", "subproblems", "ms"])
    ratios = [
        later / earlier
        for earlier, later in zip(frame["ms"], frame["ms"].iloc[1:])
        if earlier > 0
    ]
    return ScalingReport(frame, ratios)


@dataclass
class VerifyReport:
    checked: Dict[str, int] = field(default_factory=dict)
    counterexample: Optional[InstanceDocument] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _verify_instances(
    name: str,
    count: int,
    seed: int,
    max_n: int,
    max_k: int,
    sweep: bool,
    exhaustive: Sequence[Tuple[int, int]],
    budget: OracleBudget,
) -> Iterator[Instance]:
    for base in random_family(name, count, seed, max_n, max_k):
        yield from (bound_sweep(base, budget) if sweep else [base])
    for n, k in exhaustive:
        yield from exhaustive_family(name, n, k)


def run_verify(
    presets: Sequence[str],
    count: int = 50,
    seed: int = 0,
    max_n: int = 4,
    max_k: int = 2,
    sweep: bool = True,
    exhaustive: Sequence[Tuple[int, int]] = (),
    budget: Optional[OracleBudget] = None,
    threads: Optional[int] = None,
) -> VerifyReport:
    """
    随机小实例族（及可选的穷举族）上比对求解器与预言机，遇到第一个反例即停止

    Args:
        presets: 求解器名（同时作为生成预设名）
        count: 每个预设的随机实例数
        seed: 随机种子
        sweep: 是否对每个实例再做 Pareto 界限扫描
        exhaustive: 追加穷举的 (n, k) 规模
    """
    budget = budget or OracleBudget.from_config()
    report = VerifyReport()
    for offset, name in enumerate(presets):
        if name not in SOLVERS:
            raise ContractError(f"没有名为 {name} 的求解器")
        solver = SOLVERS[name]
        checked = 0
        for instance in _verify_instances(name, count, seed + offset, max_n, max_k, sweep, exhaustive, budget):
            outcome = solver(instance, threads=threads)
            reference = brute_force_feasible(instance, budget=budget)
            checked += 1
            if outcome.verdict is not reference.verdict:
                report.checked[name] = checked
                report.counterexample = InstanceDocument.from_instance(
                    instance,
                    doc_id=f"counterexample-{name}",
                    expected=reference.verdict.value.lower(),
                )
                report.message = f"{name} 判定 {outcome.verdict.value}，预言机判定 {reference.verdict.value}"
                logger.error(f"校验失败: {report.message}")
                return report
        report.checked[name] = checked
        logger.info(f"{name}: {checked} 个实例与预言机一致")
    return report
