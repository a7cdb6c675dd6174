"""
调度求解器异常定义
所有服务抛出的业务异常都继承自 SchedulingError
"""


class SchedulingError(Exception):
    """调度求解相关异常的基类"""


class StructuralError(SchedulingError):
    """作业、实例或调度方案结构不合法（覆盖不一致、字段越界等）"""


class PreconditionError(SchedulingError):
    """操作前置条件不满足，例如 EDD 排序时缺少交期"""


class ContractError(SchedulingError):
    """求解器在其适用范围之外被调用，或模型不符合专用求解器的模式"""


class NormalizationError(SchedulingError):
    """左移规范化失败：指定的准时作业无法在交期处完工"""


class BudgetExceededError(SchedulingError):
    """穷举预算超限（与“不可行”区分）"""


class DocumentError(SchedulingError):
    """实例文档解析或校验失败"""
