"""
评估模块

包含保真度指标表、实验运行器和报告的导出与加载。
"""

from superkit.evaluation.experiments import ExperimentRunner, ExperimentSpec, run_experiment
from superkit.evaluation.metrics import FidelityTable
from superkit.evaluation.report import ExperimentReport, export_report, load_report

__all__ = [
    "FidelityTable",
    "ExperimentSpec",
    "ExperimentRunner",
    "ExperimentReport",
    "run_experiment",
    "export_report",
    "load_report",
]
