"""
混合整数线性可行性模型
构建两种交错模型（代理1 单位权重 / 代理1 单位工时），并提供专用的有界整数可行性搜索

专用求解器只接受“紧取值”模式：每个连续变量由若干下界约束定义
（自身系数为正，其他连续变量系数为负），在 ≤ 型预算约束中系数非负。
此时给定整数取值后，把每个连续变量取为其下界的最大值即为最优，
整数部分只需深度优先枚举单调链。
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from services.core import (
    CriterionKind,
    Instance,
    Job,
    SearchStats,
    require_criteria,
    spt_order,
)
from services.errors import ContractError
from utils.logger import setup_logger

logger = setup_logger(__name__)

Number = Union[int, Fraction]


def _exact(value: Number) -> Number:
    """分母为 1 的有理数化为 int，加快整数系数模型的运算"""
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


def _fmt(value: Number) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class IntVar:
    name: str
    lower: int
    upper: int


@dataclass(frozen=True)
class ContVar:
    name: str
    lower: Optional[Fraction] = None


@dataclass(frozen=True)
class LinearConstraint:
    """线性约束 lower <= Σ coef·var <= upper（任一侧可缺省）"""

    coeffs: Tuple[Tuple[str, Fraction], ...]
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    family: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple((name, Fraction(c)) for name, c in self.coeffs))
        if self.lower is not None:
            object.__setattr__(self, "lower", Fraction(self.lower))
        if self.upper is not None:
            object.__setattr__(self, "upper", Fraction(self.upper))

    def value(self, values: Mapping[str, Number]) -> Fraction:
        return sum((c * values[name] for name, c in self.coeffs), Fraction(0))

    def holds(self, values: Mapping[str, Number]) -> bool:
        lhs = self.value(values)
        if self.lower is not None and lhs < self.lower:
            return False
        if self.upper is not None and lhs > self.upper:
            return False
        return True

    def __str__(self) -> str:
        terms = " ".join(f"{_fmt(c)}*{name}" for name, c in self.coeffs) or "0"
        if self.lower is not None and self.upper is not None:
            return f"{_fmt(self.lower)} <= {terms} <= {_fmt(self.upper)}"
        if self.upper is not None:
            return f"{terms} <= {_fmt(self.upper)}"
        return f"{terms} >= {_fmt(self.lower)}"


@dataclass(frozen=True)
class MilpModel:
    """整数变量、连续变量与有理系数线性约束"""

    int_vars: Tuple[IntVar, ...]
    cont_vars: Tuple[ContVar, ...]
    constraints: Tuple[LinearConstraint, ...]

    def dump(self) -> str:
        """模型文本：变量声明后每行一个约束"""
        lines = [f"int {v.name} [{v.lower}, {v.upper}]" for v in self.int_vars]
        lines += [
            f"cont {v.name} [{'-inf' if v.lower is None else _fmt(v.lower)}, +inf)"
            for v in self.cont_vars
        ]
        lines += [str(c) for c in self.constraints]
        return "\n".join(lines)

    def family(self, name: str) -> List[LinearConstraint]:
        return [c for c in self.constraints if c.family == name]


@dataclass(frozen=True)
class IntAssignment:
    """整数变量取值"""

    values: Tuple[Tuple[str, int], ...]

    def __getitem__(self, name: str) -> int:
        for key, value in self.values:
            if key == name:
                return value
        raise KeyError(name)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.values)

    def ordered(self) -> List[int]:
        return [value for _, value in self.values]


@dataclass
class MilpResult:
    assignment: Optional[IntAssignment]
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def feasible(self) -> bool:
        return self.assignment is not None


def _check_order(order: Sequence[int], k: int) -> List[int]:
    order = list(order)
    if sorted(order) != list(range(k)):
        raise ContractError(f"agent2_order 不是 0..{k - 1} 的排列: {order}")
    return order


def _x(j: int) -> str:
    return f"x_{j}"


def _y(j: int) -> str:
    return f"y_{j}"


def _yij(i: int, j: int) -> str:
    return f"y_{i}_{j}"


def _chain_completion_cost(jobs2: Sequence[Job]) -> int:
    t = 0
    cost = 0
    for job in jobs2:
        t += job.p
        cost += job.w * t
    return cost


def _step_model(
    n: int,
    jobs2: Sequence[Job],
    steps: Sequence[int],
    step_offsets: Sequence[int],
    ascending: bool,
    x_budget: Tuple[Sequence[Tuple[str, int]], int, str],
    y_budget: Tuple[Sequence[int], int, str],
) -> MilpModel:
    k = len(jobs2)
    int_vars = tuple(IntVar(_x(j), 0, n) for j in range(1, k + 1))
    cont_vars: List[ContVar] = []
    for j in range(1, k + 1):
        cont_vars += [ContVar(_yij(i, j)) for i in range(1, n + 1)]
        cont_vars.append(ContVar(_y(j)))

    constraints: List[LinearConstraint] = []
    for j in range(1, k + 1):
        constraints.append(LinearConstraint(((_x(j), 1),), lower=0, upper=n, family="bounds"))
    for j in range(1, k):
        if ascending:
            coeffs = ((_x(j), 1), (_x(j + 1), -1))
        else:
            coeffs = ((_x(j + 1), 1), (_x(j), -1))
        constraints.append(LinearConstraint(coeffs, upper=0, family="chain"))

    x_coeffs, x_rhs, x_family = x_budget
    constraints.append(LinearConstraint(tuple(x_coeffs), upper=x_rhs, family=x_family))

    for j in range(1, k + 1):
        for i in range(1, n + 1):
            constraints.append(LinearConstraint(((_yij(i, j), 1),), lower=0, family="nonneg"))
    for j in range(1, k + 1):
        for i in range(1, n + 1):
            delta = steps[i - 1]
            constraints.append(
                LinearConstraint(((_yij(i, j), 1), (_x(j), -delta)), lower=step_offsets[i - 1] * delta, family="step")
            )
    for j in range(1, k + 1):
        coeffs = ((_y(j), 1),) + tuple((_yij(i, j), -1) for i in range(1, n + 1))
        constraints.append(LinearConstraint(coeffs, lower=0, family="aggregate"))

    y_weights, y_rhs, y_family = y_budget
    constraints.append(
        LinearConstraint(tuple((_y(j), y_weights[j - 1]) for j in range(1, k + 1)), upper=y_rhs, family=y_family)
    )
    return MilpModel(int_vars, tuple(cont_vars), tuple(constraints))


def build_cc_model(instance: Instance, agent2_order: Sequence[int]) -> MilpModel:
    """
    代理1 单位权重 ΣC、代理2 ΣwC 的交错模型

    x_j 表示排在第 j 个代理2 作业之前的代理1 作业数（代理1 按 SPT）。

    Raises:
        ContractError: 准则组合或权重不符，或 agent2_order 不是排列
    """
    require_criteria(
        instance, "build_cc_model",
        CriterionKind.TOTAL_WEIGHTED_COMPLETION, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
        unit_w1=True,
    )
    order = _check_order(agent2_order, instance.k)
    jobs1 = spt_order(instance.jobs1)
    jobs2 = [instance.jobs2[i] for i in order]
    n = len(jobs1)
    p = [job.p for job in jobs1]

    spt_sum = sum((n - i) * p[i] for i in range(n))
    p2_total = sum(job.p for job in jobs2)
    x_budget = (
        [(_x(j), -job.p) for j, job in enumerate(jobs2, start=1)],
        instance.a1 - spt_sum - n * p2_total,
        "agent1",
    )
    y_budget = (
        [job.w for job in jobs2],
        instance.a2 - _chain_completion_cost(jobs2),
        "agent2",
    )
    steps = [p[i] - (p[i - 1] if i > 0 else 0) for i in range(n)]
    # y_ij >= (x_j - i + 1) * delta_i
    offsets = [-(i - 1) for i in range(1, n + 1)]
    return _step_model(n, jobs2, steps, offsets, True, x_budget, y_budget)


def build_unitp_model(instance: Instance, agent2_order: Sequence[int]) -> MilpModel:
    """
    代理1 单位工时 ΣwC、代理2 ΣwC 的交错模型

    代理1 按权重非增排序，x_j 表示排在第 j 个代理2 作业之后的代理1 作业数。

    Raises:
        ContractError: 代理1 存在非单位工时，准则不符，或 agent2_order 不是排列
    """
    require_criteria(
        instance, "build_unitp_model",
        CriterionKind.TOTAL_WEIGHTED_COMPLETION, CriterionKind.TOTAL_WEIGHTED_COMPLETION,
    )
    if any(job.p != 1 for job in instance.jobs1):
        raise ContractError("build_unitp_model 要求代理1 的加工时间全部为 1")
    order = _check_order(agent2_order, instance.k)
    jobs1 = weight_order(instance.jobs1)
    jobs2 = [instance.jobs2[i] for i in order]
    n = len(jobs1)
    w = [job.w for job in jobs1] + [0]

    w2_total = sum(job.w for job in jobs2)
    x_budget = (
        [(_x(j), -job.w) for j, job in enumerate(jobs2, start=1)],
        instance.a2 - _chain_completion_cost(jobs2) - n * w2_total,
        "agent2",
    )
    y_budget = (
        [job.p for job in jobs2],
        instance.a1 - sum((i + 1) * w[i] for i in range(n)),
        "agent1",
    )
    steps = [w[i] - w[i + 1] for i in range(n)]
    # y_ij >= (x_j - n + i) * delta_i
    offsets = [i - n for i in range(1, n + 1)]
    return _step_model(n, jobs2, steps, offsets, False, x_budget, y_budget)


def weight_order(jobs: Iterable[Job]) -> List[Job]:
    """按权重非增排序，相同时按编号"""
    return sorted(jobs, key=lambda job: (-job.w, job.id))


# ---------------------------------------------------------------------------
# 专用可行性搜索
# ---------------------------------------------------------------------------

@dataclass
class _Definition:
    target: str
    coef: Number
    others: List[Tuple[str, Number]]
    lower: Number


class _CompiledModel:
    """把模型拆成：整数域、链关系、连续变量定义、预算约束"""

    def __init__(self, model: MilpModel):
        self.model = model
        self.int_names = [v.name for v in model.int_vars]
        self.int_index = {name: i for i, name in enumerate(self.int_names)}
        self.cont_names = [v.name for v in model.cont_vars]
        cont_set = set(self.cont_names)
        self.lo = [v.lower for v in model.int_vars]
        self.hi = [v.upper for v in model.int_vars]
        self.relations: List[Tuple[int, int, str]] = []
        self.definitions: Dict[str, List[_Definition]] = {name: [] for name in self.cont_names}
        self.budgets: List[LinearConstraint] = []

        for var in model.cont_vars:
            if var.lower is not None:
                self.definitions[var.name].append(_Definition(var.name, 1, [], _exact(var.lower)))

        for constraint in model.constraints:
            names = [name for name, c in constraint.coeffs if c != 0]
            for name in names:
                if name not in cont_set and name not in self.int_index:
                    raise ContractError(f"约束引用了未声明的变量 {name}")
            cont_terms = [(name, c) for name, c in constraint.coeffs if name in cont_set and c != 0]
            int_terms = [(name, c) for name, c in constraint.coeffs if name in self.int_index and c != 0]
            if not cont_terms:
                if self._try_bound(int_terms, constraint) or self._try_chain(int_terms, constraint):
                    continue
                self.budgets.append(constraint)
                continue
            positive = [name for name, c in cont_terms if c > 0]
            if constraint.upper is None and constraint.lower is not None and len(positive) == 1:
                target = positive[0]
                coef = _exact(dict(cont_terms)[target])
                others = [(name, _exact(c)) for name, c in constraint.coeffs if name != target and c != 0]
                self.definitions[target].append(_Definition(target, coef, others, _exact(constraint.lower)))
                continue
            if constraint.lower is None and constraint.upper is not None and all(c >= 0 for _, c in cont_terms):
                self.budgets.append(constraint)
                continue
            raise ContractError(f"约束不符合紧取值模式: {constraint}")

        for name, defs in self.definitions.items():
            if not defs:
                raise ContractError(f"连续变量 {name} 没有下界定义")
        if any(self.lo[i] > self.hi[i] for i in range(len(self.lo))):
            self.empty = True
        else:
            self.empty = False
        self.topo = self._topological_order()
        self.owner = self._int_owners()

    def _try_bound(self, int_terms, constraint: LinearConstraint) -> bool:
        if len(int_terms) != 1:
            return False
        name, c = int_terms[0]
        index = self.int_index[name]
        bounds = []
        if constraint.lower is not None:
            bounds.append((constraint.lower / c, c > 0))
        if constraint.upper is not None:
            bounds.append((constraint.upper / c, c < 0))
        for limit, is_lower in bounds:
            if is_lower:
                self.lo[index] = max(self.lo[index], -((-limit.numerator) // limit.denominator))
            else:
                self.hi[index] = min(self.hi[index], limit.numerator // limit.denominator)
        return True

    def _try_chain(self, int_terms, constraint: LinearConstraint) -> bool:
        if len(int_terms) != 2 or int_terms[0][1] != -int_terms[1][1]:
            return False
        one_sided_zero = (
            (constraint.lower is None and constraint.upper == 0)
            or (constraint.upper is None and constraint.lower == 0)
        )
        if not one_sided_zero:
            return False
        (a, ca), (b, _) = int_terms
        ia, ib = self.int_index[a], self.int_index[b]
        # 规范为 ca*(x_a - x_b) <= 0
        sign = ca if constraint.upper == 0 else -ca
        a_le_b = sign > 0
        first, second = (ia, ib) if ia < ib else (ib, ia)
        second_ge_first = a_le_b if ia < ib else not a_le_b
        self.relations.append((first, second, "ge" if second_ge_first else "le"))
        return True

    def _topological_order(self) -> List[str]:
        order: List[str] = []
        state: Dict[str, int] = {}

        def visit(name: str) -> None:
            if state.get(name) == 2:
                return
            if state.get(name) == 1:
                raise ContractError(f"连续变量定义存在循环: {name}")
            state[name] = 1
            for definition in self.definitions[name]:
                for other, _ in definition.others:
                    if other in self.definitions:
                        visit(other)
            state[name] = 2
            order.append(name)

        for name in self.cont_names:
            visit(name)
        return order

    def _int_owners(self) -> Dict[str, Optional[int]]:
        owners: Dict[str, Set[int]] = {}
        for name in self.topo:
            deps: Set[int] = set()
            for definition in self.definitions[name]:
                for other, _ in definition.others:
                    if other in self.int_index:
                        deps.add(self.int_index[other])
                    else:
                        deps |= owners[other]
            if len(deps) > 1:
                raise ContractError(f"连续变量 {name} 依赖多个整数变量，无法分离求值")
            owners[name] = deps
        return {name: (next(iter(deps)) if deps else None) for name, deps in owners.items()}

    def evaluate(self, ints: Mapping[str, int], names: Optional[Iterable[str]] = None,
                 values: Optional[Dict[str, Number]] = None) -> Dict[str, Number]:
        """紧取值：按拓扑序把连续变量取为其下界的最大值"""
        values = dict(ints) if values is None else values
        for name in (self.topo if names is None else names):
            best = None
            for definition in self.definitions[name]:
                rest = definition.lower - sum(c * values[other] for other, c in definition.others)
                candidate = rest if definition.coef == 1 else Fraction(rest) / definition.coef
                if best is None or candidate > best:
                    best = candidate
            values[name] = best
        return values


def tight_evaluate(model: MilpModel, assignment: Mapping[str, int]) -> Dict[str, Number]:
    """给定整数取值，返回全部变量（含连续变量的紧取值）"""
    return _CompiledModel(model).evaluate(dict(assignment))


def solve_feasibility(model: MilpModel) -> MilpResult:
    """
    有界整数可行性搜索

    按下标顺序深度优先枚举整数变量（链关系传播取值区间），
    用可分离的预算贡献表做下界剪枝，叶子处紧取值并逐条校验约束。
    返回字典序最小的可行取值。

    Raises:
        ContractError: 模型不符合紧取值模式
    """
    compiled = _CompiledModel(model)
    stats = SearchStats(subproblems=1)
    stats.extra["leaves"] = 0
    m = len(compiled.int_names)
    if compiled.empty:
        return MilpResult(None, stats)

    # 常量连续变量（不依赖整数变量）先求值
    constant_names = [name for name in compiled.topo if compiled.owner[name] is None]
    base_values = compiled.evaluate({}, constant_names, {})
    owned: List[List[str]] = [[] for _ in range(m)]
    for name in compiled.topo:
        if compiled.owner[name] is not None:
            owned[compiled.owner[name]].append(name)

    # 每个预算对每个整数变量的贡献表
    tables: List[List[List[Number]]] = []
    constants: List[Number] = []
    for budget in compiled.budgets:
        coeffs = dict(budget.coeffs)
        constant = sum(
            (_exact(c) * base_values[name] for name, c in coeffs.items() if name in base_values),
            0,
        )
        per_var: List[List[Number]] = []
        for index, int_name in enumerate(compiled.int_names):
            row: List[Number] = []
            relevant = [(name, _exact(coeffs[name])) for name in owned[index] if name in coeffs]
            int_coef = _exact(coeffs.get(int_name, 0))
            for value in range(compiled.lo[index], compiled.hi[index] + 1):
                contribution = int_coef * value
                if relevant:
                    values = compiled.evaluate({int_name: value}, owned[index], {**base_values, int_name: value})
                    contribution += sum(c * values[name] for name, c in relevant)
                row.append(contribution)
            per_var.append(row)
        tables.append(per_var)
        constants.append(constant)

    def range_extremes(table_row: List[Number], offset: int, lo: int, hi: int) -> Tuple[Number, Number]:
        window = table_row[lo - offset: hi - offset + 1]
        return min(window), max(window)

    # 前缀/后缀极值，链区间总有一端是静态界
    prefix_min = []
    prefix_max = []
    suffix_min = []
    suffix_max = []
    for per_var in tables:
        pmin, pmax, smin, smax = [], [], [], []
        for row in per_var:
            pmin.append(list(itertools.accumulate(row, min)))
            pmax.append(list(itertools.accumulate(row, max)))
            smin.append(list(itertools.accumulate(reversed(row), min))[::-1])
            smax.append(list(itertools.accumulate(reversed(row), max))[::-1])
        prefix_min.append(pmin)
        prefix_max.append(pmax)
        suffix_min.append(smin)
        suffix_max.append(smax)

    def extremes(b: int, index: int, lo: int, hi: int) -> Tuple[Number, Number]:
        static_lo, static_hi = compiled.lo[index], compiled.hi[index]
        if lo == static_lo:
            return prefix_min[b][index][hi - static_lo], prefix_max[b][index][hi - static_lo]
        if hi == static_hi:
            return suffix_min[b][index][lo - static_lo], suffix_max[b][index][lo - static_lo]
        return range_extremes(tables[b][index], static_lo, lo, hi)

    relations_into: List[List[Tuple[int, str]]] = [[] for _ in range(m)]
    for first, second, kind in compiled.relations:
        relations_into[second].append((first, kind))

    def ranges_from(assigned: List[int]) -> Optional[List[Tuple[int, int]]]:
        ranges: List[Tuple[int, int]] = []
        for index in range(m):
            if index < len(assigned):
                ranges.append((assigned[index], assigned[index]))
                continue
            lo, hi = compiled.lo[index], compiled.hi[index]
            for first, kind in relations_into[index]:
                if kind == "ge":
                    lo = max(lo, ranges[first][0])
                else:
                    hi = min(hi, ranges[first][1])
            if lo > hi:
                return None
            ranges.append((lo, hi))
        return ranges

    def promising(ranges: List[Tuple[int, int]]) -> bool:
        for b, budget in enumerate(compiled.budgets):
            low = constants[b]
            high = constants[b]
            for index, (lo, hi) in enumerate(ranges):
                mn, mx = extremes(b, index, lo, hi)
                low += mn
                high += mx
            if budget.upper is not None and low > budget.upper:
                return False
            if budget.lower is not None and high < budget.lower:
                return False
        return True

    assigned: List[int] = []

    def dfs() -> bool:
        stats.nodes += 1
        depth = len(assigned)
        ranges = ranges_from(assigned)
        if ranges is None or not promising(ranges):
            return False
        if depth == m:
            stats.extra["leaves"] += 1
            values = compiled.evaluate(dict(zip(compiled.int_names, assigned)))
            return all(c.holds(values) for c in model.constraints)
        lo, hi = ranges[depth]
        for value in range(lo, hi + 1):
            assigned.append(value)
            if dfs():
                return True
            assigned.pop()
        return False

    if dfs():
        return MilpResult(IntAssignment(tuple(zip(compiled.int_names, assigned))), stats)
    return MilpResult(None, stats)
