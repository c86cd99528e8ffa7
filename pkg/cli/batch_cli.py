import argparse
import logging
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from cli.query_cli import build_parser, execute
from cli.report import QueryReport, error_report
from core.errors import InvalidInput

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MAX_WORKERS = 8


def read_queries(path: str) -> List[Tuple[int, str]]:
    """
    读取批量查询文件

    每行一条查询，空行与 # 开头的注释行跳过。

    返回:
    List[Tuple[int, str]]: (序号, 查询文本)，序号从 0 开始按有效行计数
    """
    queries = []
    with open(path, 'r', encoding='utf-8') as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            queries.append((len(queries), line))
    logger.info(f"读取 {len(queries)} 条查询: {path}")
    return queries


def run_query(line: str) -> Tuple[QueryReport, int]:
    """执行一行查询；用法错误记为输入错误"""
    try:
        argv = shlex.split(line)
        args = build_parser().parse_args(argv)
    except SystemExit:
        return error_report("usage", {"query": line}, InvalidInput(f"无法解析查询: {line}")), 1
    except ValueError as exc:
        return error_report("usage", {"query": line}, InvalidInput(str(exc))), 1
    if not args.command or args.batch:
        return error_report("usage", {"query": line}, InvalidInput("批量查询中每行必须是一个子命令")), 1
    return execute(args)


def run_batch(path: str, pretty: bool = False, workers: int = MAX_WORKERS) -> int:
    """
    并发执行批量查询，按输入顺序输出报告

    返回:
    int: 各查询退出码的最大值
    """
    try:
        queries = read_queries(path)
    except OSError as exc:
        logger.error(f"无法读取批量文件 {path}: {exc}")
        return 1

    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(queries)))) as pool:
        results = list(pool.map(lambda q: run_query(q[1]), queries))

    worst = 0
    for (index, _), (report, code) in zip(queries, results):
        report.index = index
        print(report.to_json(pretty=pretty))
        worst = max(worst, code)
    logger.info(f"批量查询完成: {len(queries)} 条，退出码 {worst}")
    return worst


def main(argv: Optional[Sequence[str]] = None):
    """主函数，批量命令行界面"""
    parser = argparse.ArgumentParser(
        description="quasidiv 批量查询 - 每行一条子命令，结果按输入顺序逐行输出",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例:
  python -m cli.batch_cli queries.txt          # 执行批量查询
  python -m cli.batch_cli queries.txt -j 4     # 使用 4 个工作线程
  python -m cli.batch_cli queries.txt -v       # 启用详细输出模式
        """
    )
    parser.add_argument('batch_file', help='查询文件路径')
    parser.add_argument('-j', '--workers', type=int, default=MAX_WORKERS, help='工作线程数，默认8')
    parser.add_argument('--pretty', action='store_true', help='缩进输出 JSON')
    parser.add_argument('-v', '--verbose', action='store_true', help='启用详细输出模式')

    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    else:
        logging.getLogger().setLevel(logging.INFO)

    sys.exit(run_batch(args.batch_file, pretty=args.pretty, workers=args.workers))


if __name__ == "__main__":
    main()
