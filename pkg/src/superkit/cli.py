"""
命令行入口

    superkit run <experiment> [--spec file.json] --out dir [--samples N] [--seed S] [--raw-matrices]
    superkit decompose --target file.json --components K --out dir
    superkit qec-scan --lambdas 0:0.5:0.05 --out dir
    superkit grape --system file.json --target file.json --out dir

成功时退出码为 0；失败时向 stderr 写出 {"error": 类型, "message": 信息} 并以 1 退出。
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from superkit import __version__
from superkit.algorithms.decomposition import MAX_COMPONENTS, ConvexDecomposer
from superkit.algorithms.grape import (
    GRADIENT_METHODS,
    GrapeConfig,
    GrapeOptimizer,
    echo_cnot_pulse,
)
from superkit.algorithms.optimizer import METHODS, OptimizerConfig
from superkit.data.loader import DataLoader, dump_json
from superkit.evaluation.experiments import EXPERIMENTS, ExperimentRunner, ExperimentSpec
from superkit.evaluation.report import FORMATS, export_report

logger = logging.getLogger(__name__)


def parse_lambdas(text: str) -> list[float]:
    """'start:stop:step'（含端点）或逗号分隔的列表

    Raises:
        ValueError: 格式错误或步长非正
    """
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"λ 范围应为 start:stop:step: {text}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"非法的 λ 范围: {text}")
        count = int(round((stop - start) / step)) + 1
        return [round(start + k * step, 12) for k in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def _run(args: argparse.Namespace) -> dict:
    overrides = {
        "sample_count": args.samples,
        "seed": args.seed,
        "output_dir": args.out,
        "raw_matrices": True if args.raw_matrices else None,
    }
    if args.spec:
        spec = ExperimentSpec.from_file(args.spec, name=args.experiment, **overrides)
    else:
        spec = ExperimentSpec(
            args.experiment, **{k: v for k, v in overrides.items() if v is not None}
        )
    report = ExperimentRunner(spec).run()
    files = export_report(report, spec.output_dir, fmt=args.format)
    return {"experiment": spec.name, "output_dir": str(spec.output_dir), "files": len(files)}


def _decompose(args: argparse.Namespace) -> dict:
    target = DataLoader.load_superchannel_target(args.target)
    config = OptimizerConfig(
        seed=args.seed or 0,
        restarts=args.restarts,
        max_iters=args.max_iters,
        tolerance=args.tolerance,
        method=args.method,
        show_progress=args.verbose,
    )
    decomposer = ConvexDecomposer(target, args.components, config)
    decomposition = decomposer.decompose()
    out = Path(args.out or "results")
    path = dump_json(DataLoader.encode_decomposition(decomposition), out / "decomposition.json")
    return {
        "output": str(path),
        "achieved_distance": decomposition.achieved_distance,
        "converged": decomposition.converged,
        "weights": list(decomposition.weights),
    }


def _qec_scan(args: argparse.Namespace) -> dict:
    spec = ExperimentSpec(
        "qec_scan",
        seed=args.seed or 0,
        output_dir=Path(args.out or "results"),
        lambdas=tuple(parse_lambdas(args.lambdas)),
        qec_restarts=args.restarts,
        qec_max_iters=args.max_iters,
        show_progress=args.verbose,
    )
    report = ExperimentRunner(spec).run()
    export_report(report, spec.output_dir)
    df = report.tables["qec_scan"]
    return {
        "output_dir": str(spec.output_dir),
        "lambdas": len(df),
        "min_gain": float((df["f_corrected"] - df["f_uncorrected"]).min()),
    }


def _grape(args: argparse.Namespace) -> dict:
    system = DataLoader.load_spin_system(args.system)
    u_target = DataLoader.load_matrix(args.target)
    config = GrapeConfig(
        seed=args.seed or 0,
        n_slices=args.slices,
        duration=args.duration,
        max_iters=args.max_iters,
        target_fidelity=args.target_fidelity,
        robust=args.robust,
        gradient=args.gradient,
        show_progress=args.verbose,
    )
    initial = None
    if args.init == "echo-cnot":
        initial = echo_cnot_pulse(system, args.slices, args.duration, config.seed)
    grape = GrapeOptimizer(system, u_target, config)
    pulse = grape.optimize(initial)
    out = Path(args.out or "results")
    dump_json(DataLoader.encode_pulse(pulse), out / "pulse.json")
    history = pd.DataFrame(
        {"iter": np.arange(len(grape.history)), "fidelity": grape.history}
    )
    history.to_csv(
        out / "grape_history.csv", index=False, float_format="%.17g", lineterminator="\n"
    )
    return {"output_dir": str(out), "fidelity": pulse.fidelity, "converged": pulse.converged}


class _JsonErrorParser(argparse.ArgumentParser):
    """参数错误同样以 JSON 错误对象报告并以 1 退出"""

    def error(self, message: str):
        raise ValueError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="随机种子（默认: 0）")
    common.add_argument("--verbose", action="store_true", help="输出 DEBUG 日志与进度条")
    common.add_argument("--out", type=str, default=None, help="结果输出目录（默认: results）")

    parser = _JsonErrorParser(prog="superkit", description="单比特量子超信道模拟与实验复现")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_JsonErrorParser)

    run = sub.add_parser("run", parents=[common], help="运行一个实验并导出报告")
    run.add_argument("experiment", choices=EXPERIMENTS)
    run.add_argument("--spec", type=str, default=None, help="实验描述 JSON")
    run.add_argument("--samples", type=int, default=None, help="Bloch 采样数（默认: 1000）")
    run.add_argument("--raw-matrices", action="store_true", help="使用未投影的原始附录矩阵")
    run.add_argument("--format", choices=FORMATS, default="csv", help="表格导出格式")
    run.set_defaults(handler=_run)

    dec = sub.add_parser("decompose", parents=[common], help="超信道的凸分解")
    dec.add_argument("--target", type=str, required=True, help="目标超信道 JSON")
    dec.add_argument(
        "--components",
        type=int,
        required=True,
        choices=range(1, MAX_COMPONENTS + 1),
        help="分量数",
    )
    dec.add_argument("--method", choices=METHODS, default="l-bfgs-b")
    dec.add_argument("--restarts", type=int, default=4)
    dec.add_argument("--max-iters", type=int, default=2000)
    dec.add_argument("--tolerance", type=float, default=1e-4)
    dec.set_defaults(handler=_decompose)

    qec = sub.add_parser("qec-scan", parents=[common], help="纠缠辅助码的 F_e–λ 扫描")
    qec.add_argument("--lambdas", type=str, default="0:0.5:0.05", help="start:stop:step 或列表")
    qec.add_argument("--restarts", type=int, default=2)
    qec.add_argument("--max-iters", type=int, default=500)
    qec.set_defaults(handler=_qec_scan)

    grape = sub.add_parser("grape", parents=[common], help="GRAPE 脉冲优化")
    grape.add_argument("--system", type=str, required=True, help="自旋体系 JSON")
    grape.add_argument("--target", type=str, required=True, help="目标酉门 JSON")
    grape.add_argument("--slices", type=int, default=100)
    grape.add_argument("--duration", type=float, default=0.02, help="脉冲时长（秒）")
    grape.add_argument("--max-iters", type=int, default=500)
    grape.add_argument("--target-fidelity", type=float, default=0.995)
    grape.add_argument("--robust", action="store_true", help="对射频缩放 0.95/1.0/1.05 取平均")
    grape.add_argument("--gradient", choices=GRADIENT_METHODS, default="first_order")
    grape.add_argument(
        "--init",
        choices=("random", "echo-cnot"),
        default="random",
        help="初始脉冲：随机或两自旋的回波 CNOT",
    )
    grape.set_defaults(handler=_grape)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ValueError as e:
        logging.basicConfig(format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        logger.error(f"参数错误: {e}")
        sys.stderr.write(json.dumps({"error": "ArgumentError", "message": str(e)}) + "\n")
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        summary = args.handler(args)
    except Exception as e:
        logger.error(f"命令失败: {e}", exc_info=args.verbose)
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    sys.stdout.write(json.dumps(summary, ensure_ascii=False, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
