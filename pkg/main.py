#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
乘积分数次积分加权范数工具主程序

用法示例：
    python main.py classify --indices m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4
    python main.py power-check --indices m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4 gamma=0 delta=0
    python main.py counterexample simple --rho 1 --K 64

退出码：0 成功；2 判定为否（便于 shell 分支）；1 错误。
发散不是错误：报告中 "diverging": true，退出码 0。
"""

import argparse
import asyncio
import sys
from typing import Any, Dict, List, Optional

from indices import IndexDomainError, format_scalar, parse_assignments
from models.report_models import OutputFormat, RunConfig
from services.pipeline import create_pipeline
from utils.config import settings
from utils.logger import setup_logger

# 需要完整乘积指数元组的命令；其他命令把 key=value 当作普通参数
PRODUCT_COMMANDS = {"classify", "power-check", "characteristic", "sandwich", "testing-check"}
INDEX_KEYS = ("m", "n", "p", "q", "alpha", "beta")
WEIGHT_KEYS = ("gamma", "delta")
FILE_ROLES = ("sigma", "omega", "measure", "source", "grid")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALSE = 2


def _add_assignments(parser: argparse.ArgumentParser):
    parser.add_argument("--indices", default=None,
                        help="指数元组，如 m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4（支持有理数 4/3）")
    parser.add_argument("assignments", nargs="*", default=[],
                        help="额外的 key=value，如 gamma=0 delta=0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="两参数加权范数理论：乘积分数次积分的特征量、判定与实验",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  %(prog)s classify --indices m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4
  %(prog)s power-check --indices m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4 gamma=0 delta=0
  %(prog)s characteristic --indices ... --sigma s.json --omega w.json --kind one-tailed --csv local.csv
  %(prog)s apply-op --grid f.csv --alpha 1/2 --beta 1/2 --format csv --out If.csv
  %(prog)s counterexample simple --rho 1 --K 64
  %(prog)s counterexample half --p 2 --q 4 --K 32
  %(prog)s sandwich --indices m=1,n=1,p=2,q=4,alpha=7/20,beta=7/20 gamma=1/10 delta=1/10
  %(prog)s sharpness --p 2 --q 4 --parameters 2

退出码: 0 成功, 2 判定为否, 1 错误
        """
    )

    parser.add_argument("--version", action="version",
                        version=f"{settings.app_name} {settings.app_version}")
    parser.add_argument("--seed", type=int, default=settings.seed, help=f"随机种子（默认 {settings.seed:#x}）")
    parser.add_argument("--out", default=None, help="报告输出文件（默认写到 stdout）")
    parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat],
                        default=OutputFormat.JSON.value, help="输出格式")
    parser.add_argument("--log-level", default=settings.log_level, help="日志级别（写到 stderr）")
    parser.add_argument("--log-file", default=settings.log_file, help="JSON 日志文件（可选）")
    parser.add_argument("--quad-cells", dest="quadrature_cells", type=int,
                        default=settings.quadrature_cells, help="每轴求积单元数")
    parser.add_argument("--k-min", type=int, default=settings.lattice_k_min, help="格点最小尺度 2^k")
    parser.add_argument("--k-max", type=int, default=settings.lattice_k_max, help="格点最大尺度 2^k")
    parser.add_argument("--shifts", type=int, default=settings.lattice_shifts, help="每个尺度的随机平移数")
    parser.add_argument("--shells", dest="shell_cutoff", type=int, default=settings.shell_cutoff,
                        help="尾部特征量的壳层数 K")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    # ========== 指数判定 ==========
    p = sub.add_parser("classify", help="分类指数区域")
    _add_assignments(p)

    p = sub.add_parser("power-check", help="幂权特征量有限性与 Stein–Weiss 有界性")
    _add_assignments(p)

    p = sub.add_parser("sw1", help="单参数 Stein–Weiss 不等式")
    _add_assignments(p)

    # ========== 特征量 ==========
    p = sub.add_parser("characteristic", help="格点上的矩形特征量")
    _add_assignments(p)
    p.add_argument("--sigma", help="σ 测度 JSON")
    p.add_argument("--omega", help="ω 测度 JSON")
    p.add_argument("--kind", choices=["plain", "one-tailed", "two-tailed"], default="plain")
    p.add_argument("--csv", help="逐矩形局部值 CSV")
    p.add_argument("--lattice-cells", type=int, help="格点扫描的求积单元数")
    p.add_argument("--workers", type=int, help="进程池大小（1 = 串行）")

    p = sub.add_parser("testing-check", help="测试条件与对偶测试条件")
    _add_assignments(p)
    p.add_argument("--sigma", help="σ 测度 JSON")
    p.add_argument("--omega", help="ω 测度 JSON")
    p.add_argument("--resolution", type=int)
    p.add_argument("--box-factor", type=float)
    p.add_argument("--no-window", action="store_true", default=None, help="不强制 Hölder 窗口")

    p = sub.add_parser("reverse-doubling", help="估计反向倍增指数")
    _add_assignments(p)
    p.add_argument("--measure", help="测度 JSON")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--factor", type=int, choices=[1, 2], help="只检查一个因子")
    p.add_argument("--halvings", type=int)

    # ========== 算子 ==========
    p = sub.add_parser("apply-op", help="在网格上作用乘积分数次积分")
    _add_assignments(p)
    p.add_argument("--grid", help="输入网格 CSV")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--order", choices=["xy", "yx"])
    p.add_argument("--grid-out", help="输出网格 CSV")

    p = sub.add_parser("maximal", help="乘积二进分数次极大函数")
    _add_assignments(p)
    p.add_argument("--source", help="源测度 JSON（默认原点 Dirac）")
    p.add_argument("--omega", help="ω 测度 JSON")
    p.add_argument("--sigma", help="σ 测度 JSON")
    p.add_argument("--dim", type=int)
    p.add_argument("--dyadic-k-min", type=int)
    p.add_argument("--dyadic-k-max", type=int)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--f-norm")

    # ========== 实验 ==========
    p = sub.add_parser("counterexample", help="复现反例")
    p.add_argument("subcommand", choices=["simple", "half"])
    _add_assignments(p)
    p.add_argument("--rho")
    p.add_argument("--K", dest="K", type=int)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--m", type=int)

    p = sub.add_parser("sandwich", help="幂权夹逼分解")
    _add_assignments(p)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("sharpness", help="特征量指数的锐性拟合")
    _add_assignments(p)
    p.add_argument("--mode", choices=["fit", "one-tailed"])
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--m", type=int)
    p.add_argument("--parameters", type=int, choices=[1, 2])
    p.add_argument("--family-size", type=int)
    p.add_argument("--start", type=int)
    p.add_argument("--tail-shells", dest="shells", type=int, help="单尾比较的壳层数")

    return parser


# 全局参数，不进入 options
GLOBAL_KEYS = {
    "command", "subcommand", "seed", "out", "output_format", "log_level", "log_file",
    "quadrature_cells", "k_min", "k_max", "shifts", "shell_cutoff", "indices", "assignments",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    把命令行参数转为 RunConfig

    Raises:
        IndexDomainError: key=value 无法解析
    """
    values: Dict[str, Any] = {}
    if args.indices:
        values.update(parse_assignments(args.indices))
    if args.assignments:
        values.update(parse_assignments(" ".join(args.assignments)))

    indices: Optional[Dict[str, str]] = None
    options: Dict[str, Any] = {}
    for key, value in values.items():
        if key in WEIGHT_KEYS:
            continue
        if args.command in PRODUCT_COMMANDS and key in INDEX_KEYS:
            indices = indices or {}
            indices[key] = format_scalar(value)
        else:
            options[key] = format_scalar(value)

    files: Dict[str, str] = {}
    for key, value in vars(args).items():
        if key in GLOBAL_KEYS or value is None:
            continue
        if key in FILE_ROLES:
            files[key] = value
        else:
            options[key] = value

    return RunConfig(
        command=args.command,
        subcommand=getattr(args, "subcommand", None),
        indices=indices,
        gamma=format_scalar(values["gamma"]) if "gamma" in values else None,
        delta=format_scalar(values["delta"]) if "delta" in values else None,
        files=files,
        k_min=args.k_min,
        k_max=args.k_max,
        shifts=args.shifts,
        shell_cutoff=args.shell_cutoff,
        quadrature_cells=args.quadrature_cells,
        seed=args.seed,
        output_format=args.output_format,
        out=args.out,
        options=options,
    )


def run(config: RunConfig) -> int:
    """执行一次命令，返回退出码"""
    result = asyncio.run(create_pipeline().execute(config))

    if not result["success"]:
        print(f"错误: {result['error']}", file=sys.stderr)
        return EXIT_ERROR

    if result["rendered"] is not None:
        sys.stdout.write(result["rendered"])
        sys.stdout.flush()

    if result["report"].decision is False:
        return EXIT_FALSE
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logger("", args.log_level, args.log_file, json_format=settings.log_json)

    try:
        config = build_config(args)
    except IndexDomainError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_ERROR

    return run(config)


if __name__ == "__main__":
    sys.exit(main())
