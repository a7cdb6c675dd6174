"""
并行扫描工具
对相互独立的子问题（代理2 的排列、子集、分块方案）做“首个成功”扫描，
多线程时仍以最小下标的成功项为准，保证结果确定
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Tuple, TypeVar, Union

from config import config

T = TypeVar("T")
R = TypeVar("R")

# 探测函数的工作量：节点数，或 (节点数, 附加计数) 对
Work = Union[int, Tuple[int, Dict[str, int]]]
Probe = Callable[[T], Tuple[Optional[R], Work]]


def _tally(work: Work, extra: Optional[Dict[str, int]]) -> int:
    """返回节点数，附加计数并入 extra（只在调用线程上执行）"""
    if isinstance(work, int):
        return work
    nodes, counts = work
    if extra is not None:
        for name, value in counts.items():
            extra[name] = extra.get(name, 0) + value
    return nodes


def first_success(
    items: Iterable[T],
    probe: Probe,
    threads: Optional[int] = None,
    batch_size: Optional[int] = None,
    extra: Optional[Dict[str, int]] = None,
) -> Tuple[Optional[int], Optional[R], int, int]:
    """
    依次探测各子问题，返回第一个成功的结果

    Args:
        items: 子问题序列（顺序即确定性优先级）
        probe: 探测函数，返回 (结果或 None, 工作量)
        threads: 线程数，默认读取配置
        batch_size: 多线程时每批提交的子问题数
        extra: 累加各子问题附加计数的字典

    Returns:
        (成功下标, 结果, 已探测子问题数, 累计节点数)
    """
    threads = max(1, threads or config.get_solver_config()["threads"])
    nodes = 0
    probed = 0

    if threads == 1:
        for index, item in enumerate(items):
            result, work = probe(item)
            probed += 1
            nodes += _tally(work, extra)
            if result is not None:
                return index, result, probed, nodes
        return None, None, probed, nodes

    batch_size = batch_size or threads * 4
    iterator = iter(items)
    offset = 0
    with ThreadPoolExecutor(max_workers=threads) as executor:
        while True:
            batch: List[T] = []
            for item in iterator:
                batch.append(item)
                if len(batch) >= batch_size:
                    break
            if not batch:
                return None, None, probed, nodes
            results = list(executor.map(probe, batch))
            probed += len(results)
            nodes += sum(_tally(work, extra) for _, work in results)
            for position, (result, _) in enumerate(results):
                if result is not None:
                    return offset + position, result, probed, nodes
            offset += len(batch)
