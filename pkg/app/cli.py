"""
命令行入口: python -m app <子命令>

  check     单个作用的判定（可选 oracle 对照），输出报告
  classify  输出微分同胚类型
  enumerate 范围扫描与直方图
  verify    性质检查套件
  catalog   静态目录

退出码: 0 成功，1 输入不合法或作用被拒绝，2 内部验证不一致
"""
import argparse
import csv
import json
import logging
import sys
from typing import List, Optional, Sequence

from app.biquotient.actions import CircleWeights, TorusWeights
from app.biquotient.classify import catalog_lookup, classify_circle, classify_torus
from app.biquotient.errors import BiquotientError, ConsistencyError, InvalidInputError, NotEffectivelyFreeError
from app.biquotient.report import CSV_COLUMNS, SCHEMA, Report, build_circle_report, build_torus_report, csv_row
from app.biquotient.sweep import DEFAULT_BOUND, GF2_RING_CHECKS, enumerate_actions, verify_suites

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2

logger = logging.getLogger("biquotient")


class _Parser(argparse.ArgumentParser):
    """参数错误按输入不合法处理（退出码1），退出码2留给验证不一致"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------
# 输入解析
# ------------------------------------------------------------


def parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidInputError(f"不是整数: {text!r}")


def parse_circle(values: Sequence[str]) -> CircleWeights:
    if len(values) != 4:
        raise InvalidInputError(f"圆周作用需要4个整数 a b c d，收到 {len(values)} 个")
    return CircleWeights(*(parse_int(v) for v in values))


def parse_torus(text: str) -> TorusWeights:
    """形如 1,1,0,0/0,2,1,1 的 2×4 矩阵"""
    rows = text.split("/")
    if len(rows) != 2:
        raise InvalidInputError(f"环面权重矩阵应为两行，用 / 分隔: {text!r}")
    matrix = tuple(tuple(parse_int(v) for v in row.split(",")) for row in rows)
    if any(len(row) != 4 for row in matrix):
        raise InvalidInputError(f"每一行需要4个整数: {text!r}")
    return TorusWeights(matrix)


def _subject(args: argparse.Namespace):
    if args.subject == "circle":
        return parse_circle(args.weights)
    return parse_torus(args.matrix)


# ------------------------------------------------------------
# 输出
# ------------------------------------------------------------


def emit_reports(reports: List[Report], fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "csv":
        writer = csv.writer(stream)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerow(csv_row(report))
        return
    if len(reports) == 1:
        stream.write(reports[0].to_json(indent=2) + "\n")
    else:
        payload = {"schema": SCHEMA, "reports": [r.to_dict() for r in reports]}
        stream.write(json.dumps(payload, indent=2, ensure_ascii=False, default=str) + "\n")


# ------------------------------------------------------------
# 子命令
# ------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    subject = _subject(args)
    if isinstance(subject, CircleWeights):
        report = build_circle_report(subject, oracle_depth=args.oracle)
    else:
        report = build_torus_report(subject, oracle_depth=args.oracle)
    emit_reports([report], args.format)
    return EXIT_OK if report.agrees else EXIT_MISMATCH


def cmd_classify(args: argparse.Namespace) -> int:
    subject = _subject(args)
    if isinstance(subject, CircleWeights):
        diffeo = classify_circle(subject)
        reduced = list(subject.values)
    else:
        diffeo = classify_torus(subject)
        reduced = [list(row) for row in subject.rows]
    if args.format == "json":
        print(json.dumps({"kind": args.subject, "reduced_weights": reduced, "diffeo": diffeo.value}))
    else:
        print(diffeo.value)
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    bound = args.bound if args.bound is not None else DEFAULT_BOUND[args.dim]
    if bound < 0:
        raise InvalidInputError(f"--bound 必须非负: {bound}")
    reports, summary = enumerate_actions(args.dim, bound, workers=args.workers)
    if args.format == "csv":
        emit_reports(reports, "csv")
        # 直方图不混入 CSV 数据流
        sys.stderr.write(summary.json(ensure_ascii=False) + "\n")
    else:
        payload = {
            "schema": SCHEMA,
            "reports": [r.to_dict() for r in reports],
            "summary": summary.dict(),
        }
        print(json.dumps(payload, indent=2, ensure_ascii=False, default=str))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    summary = verify_suites(
        args.bound,
        depth=args.depth,
        samples=args.samples,
        seed=args.seed,
        workers=args.workers,
        inject_fault=args.inject_fault,
        ring_checks=args.ring_checks,
    )
    print(summary.json(indent=2, ensure_ascii=False))
    return EXIT_OK if summary.passed else EXIT_MISMATCH


def cmd_catalog(args: argparse.Namespace) -> int:
    rows = catalog_lookup(parse_int(args.dim), args.manifold)
    if args.json or args.format == "json":
        print(json.dumps([row.dict() for row in rows], indent=2, ensure_ascii=False, default=str))
        return EXIT_OK
    table = [("M", "G", "H", "H → G×G")] + [(r.manifold.value, r.group_g, r.group_h, r.embedding) for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(4)]
    for line in table:
        print("  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip())
    return EXIT_OK


# ------------------------------------------------------------
# Main
# ------------------------------------------------------------


def _add_subjects(parser: argparse.ArgumentParser, options: argparse.ArgumentParser) -> None:
    # 选项挂在 circle/torus 上，允许写在权重之后
    subjects = parser.add_subparsers(dest="subject", required=True)
    s = subjects.add_parser("circle", parents=[options], help="圆周作用 a b c d")
    s.add_argument("weights", nargs=4, metavar="N", help="指数 a b c d")
    s = subjects.add_parser("torus", parents=[options], help="环面作用，例如 1,1,0,0/0,2,1,1")
    s.add_argument("matrix", help="2×4 权重矩阵，两行用 / 分隔")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="python -m app", description="SU(2)×SU(2) 上圆周与环面双商作用的分类工具")
    p.add_argument("--verbose", action="store_true", help="输出调试日志到标准错误")
    sub = p.add_subparsers(dest="cmd", required=True)

    options = _Parser(add_help=False)
    options.add_argument("--oracle", type=int, metavar="N", help="同时运行阶不超过 N 的不动点枚举")
    options.add_argument("--format", choices=["json", "csv"], default="json")
    s = sub.add_parser("check", help="判定单个作用并输出报告")
    _add_subjects(s, options)
    s.set_defaults(func=cmd_check)

    options = _Parser(add_help=False)
    options.add_argument("--format", choices=["text", "json"], default="text")
    s = sub.add_parser("classify", help="输出商流形的微分同胚类型")
    _add_subjects(s, options)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("enumerate", help="在 [−bound, bound] 内扫描规范代表元")
    s.add_argument("--dim", type=int, choices=[4, 5], required=True)
    s.add_argument("--bound", type=int, help="默认: 5维为2，4维为1（4维扫描 2×4 矩阵，规模增长很快）")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--workers", type=int, default=1, help="进程数，结果与进程数无关")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("verify", help="运行判据/oracle、对称性、可容许类与 w₂ 检查")
    s.add_argument("--bound", type=int, default=12)
    s.add_argument("--depth", type=int, help="oracle 枚举深度，默认按每个作用自动选取")
    s.add_argument("--samples", type=int, default=1000, help="随机对称性检查的样本数")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--inject-fault", action="store_true", help="把判据结论取反，用于检验报警机制")
    s.add_argument("--ring-checks", type=int, default=GF2_RING_CHECKS, help="GF(2) 截断环的随机性质检查次数")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("catalog", help="输出维数4或5的静态目录")
    s.add_argument("dim", help="维数 4 或 5")
    s.add_argument("--manifold", help="按流形标签过滤，例如 S4")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.add_argument("--json", action="store_true", help="等同于 --format json")
    s.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConsistencyError as e:
        logger.error(f"内部一致性检查失败 [{e.code}]: {e.message}")
        return EXIT_MISMATCH
    except NotEffectivelyFreeError as e:
        witness = e.verdict.witness if e.verdict is not None else None
        if witness is not None:
            logger.error(f"[{e.code}] {e.message}; 见证: 阶 {witness.order}, 指数 {witness.exponents}, 不动点 {witness.fixed_point}")
        else:
            logger.error(f"[{e.code}] {e.message}")
        return EXIT_INVALID
    except BiquotientError as e:
        logger.error(f"[{e.code}] {e.message}")
        return EXIT_INVALID
