#!/usr/bin/env python3
"""
两代理单机调度可行性求解命令行

子命令：solve / classify / oracle / generate / bench / verify
退出码：0 可行（或命令成功），1 不可行（或出现判定分歧），2 错误
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# 添加项目根目录到Python路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from services.bench import run_bench, run_scaling, run_verify, to_markdown, write_csv  # noqa: E402
from services.classify import SOLVERS, classify, route_and_solve  # noqa: E402
from services.core import Schedule, SolveOutcome  # noqa: E402
from services.documents import dump_document, load_corpus, load_instance, write_document  # noqa: E402
from services.errors import ContractError, SchedulingError  # noqa: E402
from services.generators import PRESETS, partition_document, random_document  # noqa: E402
from services.oracle import OracleBudget, brute_force_feasible, pareto_front  # noqa: E402
from utils.logger import setup_logger  # noqa: E402

logger = setup_logger(__name__)

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_ERROR = 2


def _print_witness(schedule: Optional[Schedule]) -> None:
    if schedule is None:
        return
    for line in schedule.lines():
        print(line)


def _print_outcome(outcome: SolveOutcome, witness: bool) -> int:
    print(outcome.verdict.value)
    stats = outcome.stats
    print(f"求解器: {outcome.solver}  nodes={stats.nodes}  subproblems={stats.subproblems}  ms={stats.elapsed_ms:.3f}")
    if outcome.reason:
        print(f"原因: {outcome.reason}")
    if witness:
        _print_witness(outcome.witness)
    return EXIT_FEASIBLE if outcome.feasible else EXIT_INFEASIBLE


def _parse_values(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ContractError(f"--values 需要逗号分隔的整数: {text}") from None


def _parse_names(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_sizes(text: Optional[str]) -> List[Tuple[int, int]]:
    sizes = []
    for part in _parse_names(text) or []:
        try:
            n, k = part.lower().split("x")
            sizes.append((int(n), int(k)))
        except ValueError:
            raise ContractError(f"--exhaustive 需要 NxK 形式的规模: {part}") from None
    return sizes


def cmd_solve(args: argparse.Namespace) -> int:
    document, instance = load_instance(args.path)
    logger.info(f"求解实例 {document.id or args.path}: n={instance.n}, k={instance.k}")
    if args.solver:
        if args.solver not in SOLVERS:
            raise ContractError(f"未知的求解器 {args.solver}，可选: {', '.join(SOLVERS)}")
        outcome = SOLVERS[args.solver](instance, threads=args.order_parallel)
    else:
        verdict, outcome = route_and_solve(
            instance,
            threads=args.order_parallel,
            oracle_fallback=args.oracle_fallback,
        )
        print(f"分类: {verdict.status.value}  {verdict.citation}")
    return _print_outcome(outcome, args.witness)


def cmd_classify(args: argparse.Namespace) -> int:
    _, instance = load_instance(args.path)
    verdict = classify(instance)
    print(f"{verdict.status.value}\t{verdict.solver}\t{verdict.citation}")
    if verdict.basis:
        print(f"依据: {verdict.basis}")
    if verdict.note:
        print(f"备注: {verdict.note}")
    return EXIT_FEASIBLE


def cmd_oracle(args: argparse.Namespace) -> int:
    _, instance = load_instance(args.path)
    budget = OracleBudget.from_config()
    if args.max_jobs is not None:
        budget = OracleBudget(args.max_jobs, budget.max_configurations)
    if args.pareto:
        for value1, value2 in pareto_front(instance, budget):
            print(f"{value1}\t{value2}")
    return _print_outcome(brute_force_feasible(instance, budget=budget), args.witness)


def cmd_generate(args: argparse.Namespace) -> int:
    if args.kind == "random":
        document = random_document(args.preset, args.n, args.k, args.seed)
    else:
        if not args.values:
            raise ContractError(f"{args.kind} 需要 --values")
        document = partition_document(_parse_values(args.values), args.kind, args.variant)
    if args.output:
        write_document(document, args.output)
        logger.info(f"实例文档已写入 {args.output}")
    else:
        sys.stdout.write(dump_document(document))
    return EXIT_FEASIBLE


def cmd_bench(args: argparse.Namespace) -> int:
    if args.scaling:
        report = run_scaling(n=args.n, ks=range(1, args.max_k + 1), threads=args.order_parallel)
        print(to_markdown(report.frame))
        print(f"相邻 k 的平均耗时比: {report.mean_ratio:.2f}")
        return EXIT_FEASIBLE
    if not args.corpus:
        raise ContractError("bench 需要实例目录（或使用 --scaling）")
    report = run_bench(load_corpus(args.corpus), solvers=_parse_names(args.solvers), threads=args.order_parallel)
    frame = report.frame()
    if args.csv:
        write_csv(frame, args.csv)
    else:
        sys.stdout.write(frame.to_csv(index=False, float_format="%.3f"))
    if args.markdown:
        print(to_markdown(frame))
    for line in report.disagreements:
        print(f"分歧: {line}")
    return EXIT_FEASIBLE if report.ok else EXIT_INFEASIBLE


def cmd_verify(args: argparse.Namespace) -> int:
    presets = _parse_names(args.presets) or list(SOLVERS)
    report = run_verify(
        presets,
        count=args.count,
        seed=args.seed,
        max_n=args.max_n,
        max_k=args.max_k,
        sweep=not args.no_sweep,
        exhaustive=_parse_sizes(args.exhaustive),
        threads=args.order_parallel,
    )
    for name, checked in report.checked.items():
        print(f"{name}\t{checked}")
    if not report.ok:
        print(f"反例: {report.message}")
        sys.stdout.write(dump_document(report.counterexample))
        return EXIT_INFEASIBLE
    return EXIT_FEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scheduler-engine", description="两代理单机调度可行性求解")
    parser.add_argument("--log-level", default=None, help="日志级别（默认读取 SCHED_LOG_LEVEL）")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="分类并求解实例文档")
    solve.add_argument("path")
    solve.add_argument("--witness", action="store_true", help="输出 (作业, 开始, 完工) 见证调度")
    solve.add_argument("--order-parallel", type=int, default=None, help="子问题扫描线程数")
    solve.add_argument("--solver", choices=sorted(SOLVERS), default=None, help="跳过分类直接使用指定求解器")
    solve.add_argument("--oracle-fallback", action="store_true", help="困难/未决单元改用预言机")
    solve.set_defaults(handler=cmd_solve)

    classify_cmd = sub.add_parser("classify", help="输出复杂度结论与对应求解器")
    classify_cmd.add_argument("path")
    classify_cmd.set_defaults(handler=cmd_classify)

    oracle = sub.add_parser("oracle", help="暴力枚举判定")
    oracle.add_argument("path")
    oracle.add_argument("--witness", action="store_true")
    oracle.add_argument("--pareto", action="store_true", help="输出 Pareto 前沿")
    oracle.add_argument("--max-jobs", type=int, default=None, help="作业总数上限")
    oracle.set_defaults(handler=cmd_oracle)

    generate = sub.add_parser("generate", help="生成实例文档")
    generate.add_argument("kind", choices=["random", "partition-completion", "partition-jit"])
    generate.add_argument("--values", default=None, help="Partition 多重集，如 1,1,2")
    generate.add_argument("--variant", choices=["sumC", "tardy", "jit"], default="sumC")
    generate.add_argument("--preset", choices=sorted(PRESETS), default="c_wc")
    generate.add_argument("--n", type=int, default=4)
    generate.add_argument("--k", type=int, default=2)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--output", default=None)
    generate.set_defaults(handler=cmd_generate)

    bench = sub.add_parser("bench", help="在实例目录上运行全部适用求解器并与预言机比对")
    bench.add_argument("corpus", nargs="?", default=None)
    bench.add_argument("--solvers", default=None, help="逗号分隔的求解器名")
    bench.add_argument("--csv", default=None, help="CSV 输出路径（默认写到标准输出）")
    bench.add_argument("--markdown", action="store_true", help="同时输出 Markdown 表格")
    bench.add_argument("--scaling", action="store_true", help="ΣU/ΣwU 随 k 的耗时实验")
    bench.add_argument("--n", type=int, default=10_000)
    bench.add_argument("--max-k", type=int, default=10)
    bench.add_argument("--order-parallel", type=int, default=None)
    bench.set_defaults(handler=cmd_bench)

    verify = sub.add_parser("verify", help="随机小实例族上比对求解器与预言机")
    verify.add_argument("--presets", default=None, help="逗号分隔的求解器名（默认全部）")
    verify.add_argument("--count", type=int, default=50)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--max-n", type=int, default=4)
    verify.add_argument("--max-k", type=int, default=2)
    verify.add_argument("--no-sweep", action="store_true", help="不做 Pareto 界限扫描")
    verify.add_argument("--exhaustive", default=None, help="追加穷举的规模，如 1x1,2x0")
    verify.add_argument("--order-parallel", type=int, default=None)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        setup_logger(level=args.log_level, force=True)
    try:
        return args.handler(args)
    except SchedulingError as e:
        logger.error(f"{args.command} 失败: {e}")
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
