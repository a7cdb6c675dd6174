"""
实例生成模块
按求解器预设生成随机实例（numpy 种子随机数，结果可复现）、小规模穷举族、
界限扫描，以及基于 Partition 的已知答案文档
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from services.core import Criterion, CriterionKind, Instance, Job, evaluate, normalize_left_shift
from services.documents import InstanceDocument
from services.errors import ContractError
from services.oracle import OracleBudget, pareto_front
from services.reductions import (
    PartitionInstance,
    ReductionVariant,
    reduce_to_unit_jit,
    reduce_to_weighted_completion,
    solve_partition,
)

_WC = CriterionKind.TOTAL_WEIGHTED_COMPLETION
_WU = CriterionKind.WEIGHTED_TARDY_COUNT
_WE = CriterionKind.WEIGHTED_JIT_COUNT


@dataclass(frozen=True)
class Preset:
    """一类实例的准则组合与结构约束"""

    kind1: CriterionKind
    kind2: CriterionKind
    unit_w1: bool = False
    unit_w2: bool = False
    unit_p1: bool = False
    unit_p_all: bool = False


PRESETS: Dict[str, Preset] = {
    "c_wc": Preset(_WC, _WC, unit_w1=True),
    "wc_wc_unitp": Preset(_WC, _WC, unit_p1=True),
    "c_wu": Preset(_WC, _WU, unit_w1=True),
    "u_wc": Preset(_WU, _WC, unit_w1=True),
    "u_c": Preset(_WU, _WC, unit_w1=True, unit_w2=True),
    "u_wu": Preset(_WU, _WU, unit_w1=True),
    "wu_wu_unitp": Preset(_WU, _WU, unit_p_all=True),
    "e_wc": Preset(_WE, _WC, unit_w1=True),
    "we_wu": Preset(_WE, _WU),
    "we_we": Preset(_WE, _WE),
    "wc_general": Preset(_WC, _WC),
    "we_wc_general": Preset(_WE, _WC),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ContractError(f"未知的预设 {name}，可选: {', '.join(PRESETS)}") from None


def _draw(rng: np.random.Generator, low: int, high: int) -> int:
    return int(rng.integers(low, high + 1))


def _random_jobs(
    rng: np.random.Generator,
    agent: int,
    count: int,
    preset: Preset,
    needs_due: bool,
    p_max: int,
    w_max: int,
    due_span: int,
) -> List[Job]:
    unit_p = preset.unit_p_all or (agent == 1 and preset.unit_p1)
    unit_w = preset.unit_w1 if agent == 1 else preset.unit_w2
    jobs = []
    for j in range(count):
        p = 1 if unit_p else _draw(rng, 1, p_max)
        w = 1 if unit_w else _draw(rng, 1, w_max)
        d = _draw(rng, 1, due_span) if needs_due else None
        jobs.append(Job(id=j, agent=agent, p=p, w=w, d=d))
    return jobs


def _layout_bounds(rng: np.random.Generator, jobs1: Sequence[Job], jobs2: Sequence[Job],
                   crit1: Criterion, crit2: Criterion) -> Tuple[int, int]:
    """随机排布一次，用其目标值加 -1..1 的扰动作为界限"""
    everything = list(jobs1) + list(jobs2)
    order = [everything[i] for i in rng.permutation(len(everything))]
    base = Instance(jobs1, jobs2, crit1, crit2, 0, 0)
    report = evaluate(normalize_left_shift(order), base)
    bounds = []
    for value in (report.value1, report.value2):
        bounds.append(max(0, value + _draw(rng, -1, 1)))
    return bounds[0], bounds[1]


def random_instance(
    rng: np.random.Generator,
    preset: Preset,
    n: int,
    k: int,
    p_max: int = 3,
    w_max: int = 2,
) -> Instance:
    """
    按预设生成随机实例

    Args:
        rng: numpy 随机数生成器
        preset: 准则与结构约束
        n: 代理1 作业数
        k: 代理2 作业数
        p_max: 加工时间上限
        w_max: 权重上限

    Returns:
        Instance: 交期取自 1..Σp，界限取自一次随机排布的目标值
    """
    crit1, crit2 = Criterion(preset.kind1), Criterion(preset.kind2)
    span = max(1, (n + k) * (1 if preset.unit_p_all else p_max))
    jobs1 = _random_jobs(rng, 1, n, preset, crit1.needs_due_date, p_max, w_max, span)
    jobs2 = _random_jobs(rng, 2, k, preset, crit2.needs_due_date, p_max, w_max, span)
    a1, a2 = _layout_bounds(rng, jobs1, jobs2, crit1, crit2)
    return Instance(jobs1, jobs2, crit1, crit2, a1, a2)


def random_family(preset_name: str, count: int, seed: int, max_n: int = 4, max_k: int = 2,
                  p_max: int = 3, w_max: int = 2) -> List[Instance]:
    """同一种子总是生成同一组实例"""
    preset = get_preset(preset_name)
    rng = np.random.default_rng(seed)
    family = []
    for _ in range(count):
        n = _draw(rng, 0, max_n)
        k = _draw(rng, 0, max_k)
        family.append(random_instance(rng, preset, n, k, p_max, w_max))
    return family


def exhaustive_family(
    preset_name: str,
    n: int,
    k: int,
    p_values: Sequence[int] = (1, 2),
    w_values: Sequence[int] = (1, 2),
) -> Iterator[Instance]:
    """
    穷举给定规模下的全部作业参数组合，界限取各自 Pareto 点及其收紧一格

    交期取自 1..Σp。同一代理的作业可互换，按多重集枚举。
    """
    preset = get_preset(preset_name)
    crit1, crit2 = Criterion(preset.kind1), Criterion(preset.kind2)

    def options(agent: int, needs_due: bool, total_p: int) -> List[Tuple[int, int, Optional[int]]]:
        unit_p = preset.unit_p_all or (agent == 1 and preset.unit_p1)
        unit_w = preset.unit_w1 if agent == 1 else preset.unit_w2
        ps = (1,) if unit_p else tuple(p_values)
        ws = (1,) if unit_w else tuple(w_values)
        ds = tuple(range(1, total_p + 1)) if needs_due else (None,)
        return list(itertools.product(ps, ws, ds))

    max_p = 1 if preset.unit_p_all else max(p_values)
    span = (n + k) * max_p
    for specs1 in itertools.combinations_with_replacement(options(1, crit1.needs_due_date, span), n):
        for specs2 in itertools.combinations_with_replacement(options(2, crit2.needs_due_date, span), k):
            jobs1 = [Job(id=j, agent=1, p=p, w=w, d=d) for j, (p, w, d) in enumerate(specs1)]
            jobs2 = [Job(id=j, agent=2, p=p, w=w, d=d) for j, (p, w, d) in enumerate(specs2)]
            yield from bound_sweep(Instance(jobs1, jobs2, crit1, crit2, 0, 0))


def bound_sweep(instance: Instance, budget: Optional[OracleBudget] = None) -> List[Instance]:
    """
    以 Pareto 点为界限的可行实例，以及每个点在某一侧收紧一格后的实例

    收紧后的实例可能可行（被其他点覆盖）也可能不可行，覆盖判定边界两侧。
    """
    sweep = []
    seen = set()
    for v1, v2 in pareto_front(instance, budget):
        candidates = [(v1, v2)]
        tighter1 = v1 - 1 if instance.crit1.kind is not _WE else v1 + 1
        tighter2 = v2 - 1 if instance.crit2.kind is not _WE else v2 + 1
        candidates += [(tighter1, v2), (v1, tighter2)]
        for a1, a2 in candidates:
            if a1 < 0 or a2 < 0 or (a1, a2) in seen:
                continue
            seen.add((a1, a2))
            sweep.append(instance.with_bounds(a1, a2))
    return sweep


def partition_document(values: Sequence[int], kind: str, variant: str = "sumC") -> InstanceDocument:
    """
    Partition 构造的实例文档，expected 字段给出由子集和判定的已知答案

    Args:
        values: 多重集 X
        kind: "partition-completion" 或 "partition-jit"
        variant: partition-completion 的代理2 准则变体（sumC / tardy / jit）
    """
    pi = PartitionInstance(tuple(values))
    if kind == "partition-completion":
        instance = reduce_to_weighted_completion(pi, ReductionVariant(variant))
        doc_id = f"partition-completion-{variant}-" + "-".join(map(str, pi.values))
    elif kind == "partition-jit":
        instance = reduce_to_unit_jit(pi)
        doc_id = "partition-jit-" + "-".join(map(str, pi.values))
    else:
        raise ContractError(f"未知的 Partition 构造: {kind}")
    expected = "feasible" if solve_partition(pi) else "infeasible"
    return InstanceDocument.from_instance(instance, doc_id=doc_id, expected=expected)


def random_document(preset_name: str, n: int, k: int, seed: int) -> InstanceDocument:
    rng = np.random.default_rng(seed)
    instance = random_instance(rng, get_preset(preset_name), n, k)
    return InstanceDocument.from_instance(instance, doc_id=f"random-{preset_name}-n{n}-k{k}-s{seed}")


def u_wu_scaling_instance(n: int, k: int) -> Instance:
    """
    不可行的 ΣU/ΣwU 实例：每个代理2 迟到集合都要扫描到 EDD 序列末尾才失败

    代理1 的最后一个作业交期最大但小于其加工时间，A1 = 0。
    """
    if n < 1:
        raise ContractError("n 至少为 1")
    horizon = n + k + 10
    jobs1 = [Job(id=j, agent=1, p=1, w=1, d=horizon - 1) for j in range(n - 1)]
    jobs1.append(Job(id=n - 1, agent=1, p=horizon + 1, w=1, d=horizon))
    jobs2 = [Job(id=j, agent=2, p=1, w=1, d=horizon - 1) for j in range(k)]
    return Instance(jobs1, jobs2, Criterion(_WU), Criterion(_WU), 0, k)
