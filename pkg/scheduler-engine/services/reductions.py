"""
划分问题与困难实例构造
从 Partition 实例生成已知答案的调度实例，作为求解器的对抗测试集
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from services.core import SUM_WC, SUM_WE, SUM_WU, Instance, Job
from services.errors import ContractError


@dataclass(frozen=True)
class PartitionInstance:
    """正整数多重集 X，要求总和为偶数"""

    values: Tuple[int, ...]

    def __post_init__(self) -> None:
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        for index, value in enumerate(values):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ContractError(f"X[{index}] 必须是正整数，实际为 {value!r}")
        if sum(values) % 2:
            raise ContractError(f"X 的总和 {sum(values)} 为奇数")

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def z(self) -> int:
        return sum(self.values) // 2


def _reachable_sums(values: Sequence[int], target: int) -> int:
    """位集合：第 s 位为 1 表示存在和为 s 的子集（只保留到 target）"""
    mask = (1 << (target + 1)) - 1
    bits = 1
    for value in values:
        bits = (bits | (bits << value)) & mask
    return bits


def solve_partition(pi: PartitionInstance) -> bool:
    """是否存在和为 z 的子集"""
    return bool(_reachable_sums(pi.values, pi.z) >> pi.z & 1)


def find_partition(pi: PartitionInstance) -> Optional[List[int]]:
    """
    返回和为 z 的一个子集（下标升序），不存在时返回 None

    自后向前回溯：保存每个前缀的可达位集合
    """
    z = pi.z
    mask = (1 << (z + 1)) - 1
    layers = [1]
    for value in pi.values:
        layers.append((layers[-1] | (layers[-1] << value)) & mask)
    if not layers[-1] >> z & 1:
        return None
    chosen: List[int] = []
    remaining = z
    for index in range(pi.m, 0, -1):
        if layers[index - 1] >> remaining & 1:
            continue
        chosen.append(index - 1)
        remaining -= pi.values[index - 1]
    return sorted(chosen)


class ReductionVariant(str, Enum):
    """代理2 准则的三种构造变体"""

    SUM_C = "sumC"
    TARDY = "tardy"
    JIT = "jit"


def completion_bound(values: Sequence[int]) -> int:
    """Σ_i Σ_{j<=i} x_i x_j，用闭式 ((Σx)^2 + Σx^2) / 2 计算"""
    total = sum(values)
    closed = (total * total + sum(x * x for x in values)) // 2
    assert closed == sum(values[i] * values[j] for i in range(len(values)) for j in range(i + 1))
    return closed


def reduce_to_weighted_completion(pi: PartitionInstance, variant: ReductionVariant) -> Instance:
    """
    代理1 为 ΣwC 的困难构造：n = m 个作业 p = w = x，代理2 只有一个单位作业

    可行当且仅当 X 存在等和划分。
    """
    variant = ReductionVariant(variant)
    z = pi.z
    jobs1 = tuple(Job(id=j, agent=1, p=x, w=x) for j, x in enumerate(pi.values))
    due = None if variant is ReductionVariant.SUM_C else z + 1
    jobs2 = (Job(id=0, agent=2, p=1, w=1, d=due),)
    criterion2, a2 = {
        ReductionVariant.SUM_C: (SUM_WC, z + 1),
        ReductionVariant.TARDY: (SUM_WU, 0),
        ReductionVariant.JIT: (SUM_WE, 1),
    }[variant]
    return Instance(jobs1, jobs2, SUM_WC, criterion2, z + completion_bound(pi.values), a2)


def reduce_to_unit_jit(pi: PartitionInstance) -> Instance:
    """
    双方 ΣwE 的困难构造：n = k = m，单位工时，两代理的第 j 个作业权重 x_j、交期 j

    可行当且仅当 X 存在等和划分。
    """
    jobs1 = tuple(Job(id=j, agent=1, p=1, w=x, d=j + 1) for j, x in enumerate(pi.values))
    jobs2 = tuple(Job(id=j, agent=2, p=1, w=x, d=j + 1) for j, x in enumerate(pi.values))
    return Instance(jobs1, jobs2, SUM_WE, SUM_WE, pi.z, pi.z)
