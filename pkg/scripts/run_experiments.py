#!/usr/bin/env python3
"""
运行完整实验流程的脚本

依次复现三个超信道实验、纠错码 λ 扫描与 GRAPE 演示，每个实验的报告写入独立子目录。
"""

import argparse
import logging
import sys
from pathlib import Path

# src布局路径修正
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

# 导入项目模块
from superkit.evaluation import ExperimentRunner, ExperimentSpec, export_report
from superkit.evaluation.experiments import EXPERIMENTS
from superkit.evaluation.metrics import FidelityTable

# 配置日志
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def run_experiments(
    experiments: list[str],
    sample_count: int,
    seed: int,
    output_dir: str,
    raw_matrices: bool = False,
) -> None:
    """运行完整实验

    Args:
        experiments: 要运行的实验名列表
        sample_count: Bloch 球面采样数
        seed: 随机种子
        output_dir: 结果输出目录
        raw_matrices: 是否使用未投影的原始附录矩阵
    """
    output_path = Path(output_dir)

    logger.info("=" * 60)
    logger.info(f"开始运行实验: {experiments}")
    logger.info("=" * 60)

    for name in experiments:
        spec = ExperimentSpec(
            name,
            sample_count=sample_count,
            seed=seed,
            output_dir=output_path / name,
            raw_matrices=raw_matrices,
        )
        runner = ExperimentRunner(spec)
        report = runner.run()
        export_report(report, spec.output_dir)

        stats = FidelityTable.calculate_statistics(report.fidelities.to_dataframe())
        for key, values in stats.items():
            logger.info(f"  {name} {key}: mean={values['mean']:.6f}, max={values['max']:.6f}")
        logger.info(f"{name} 完成: {runner.get_statistics()}")

    logger.info("=" * 60)
    logger.info(f"实验完成，结果保存在: {output_path}")
    logger.info("=" * 60)


def main():
    """主函数"""
    parser = argparse.ArgumentParser(
        description='复现单比特超信道实验'
    )
    parser.add_argument(
        '--experiments',
        nargs='+',
        choices=EXPERIMENTS,
        default=["extreme", "dephasing", "decomposition"],
        help='要运行的实验（默认: extreme dephasing decomposition）'
    )
    parser.add_argument(
        '--samples',
        type=int,
        default=1000,
        help='Bloch 球面采样数（默认: 1000）'
    )
    parser.add_argument(
        '--seed',
        type=int,
        default=0,
        help='随机种子（默认: 0）'
    )
    parser.add_argument(
        '--output',
        type=str,
        default='results',
        help='结果输出目录（默认: results）'
    )
    parser.add_argument(
        '--raw-matrices',
        action='store_true',
        help='使用未投影的原始附录矩阵'
    )
    parser.add_argument(
        '--all',
        action='store_true',
        help='运行所有实验（包括纠错扫描与 GRAPE 演示）'
    )

    args = parser.parse_args()
    experiments = list(EXPERIMENTS) if args.all else args.experiments

    try:
        run_experiments(experiments, args.samples, args.seed, args.output, args.raw_matrices)
    except Exception as e:
        logger.error(f"实验运行失败: {e}", exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
