"""
实验复现

用附录矩阵重放三个超信道实验（随机极端超信道、退相位超信道、凸分解演示）、
纠错码的 λ 扫描以及 GRAPE 演示，结果整理为 ExperimentReport。
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd

import superkit
from superkit.algorithms.grape import (
    CNOT,
    GrapeConfig,
    GrapeOptimizer,
    SpinSystem,
    echo_cnot_pulse,
    gate_fidelity,
    propagate,
)
from superkit.algorithms.optimizer import OptimizerConfig
from superkit.algorithms.qec import EbitCodeSearch
from superkit.core.channels import ChoiState, KrausChannel
from superkit.core.metrics import process_fidelity, trace_distance
from superkit.core.states import BASIS_LABELS, BASIS_STATES, fibonacci_points, fibonacci_sphere
from superkit.core.tomography import basis_outputs
from superkit.data.appendix import AppendixBundle
from superkit.data.generator import ChannelGenerator
from superkit.data.loader import DataLoader
from superkit.evaluation.metrics import bloch_cloud, ellipsoid_axes
from superkit.evaluation.report import ExperimentReport
from superkit.superchannel.circuit import (
    CircuitSuperchannel,
    GenExtremeSuperchannel,
    act_on_choi,
    circuit_to_kraus,
    output_channel,
)
from superkit.utils.linalg import PSD_ATOL

logger = logging.getLogger(__name__)

EXPERIMENTS = ("extreme", "dephasing", "decomposition", "qec_scan", "grape_demo")
DEFAULT_LAMBDAS = tuple(round(0.05 * k, 2) for k in range(11))


@dataclass(frozen=True)
class ExperimentSpec:
    """实验描述

    Args:
        name: 实验名，取值见 EXPERIMENTS
        sample_count: Bloch 球面采样数
        seed: 随机种子（qec_scan 与 grape_demo 使用）
        output_dir: 导出目录
        raw_matrices: 是否使用未投影的原始附录矩阵
        matrices: 覆盖附录矩阵的外部矩阵 {名称: 矩阵}
        weights: 凸分解演示中两个分量的权重
        lambdas: qec_scan 的 λ 取值
        qec_restarts: 每个 λ 的随机起点数
        qec_max_iters: 每个起点的最大迭代数
        grape_slices: grape_demo 的段数
        grape_duration: grape_demo 的脉冲时长（秒）
        grape_max_iters: grape_demo 每次尝试的最大迭代数
        grape_gradient: grape_demo 的梯度方法（实验室坐标系下段长较长，默认精确导数）
        show_progress: 是否显示进度条
    """

    name: str
    sample_count: int = 1000
    seed: int = 0
    output_dir: Path = Path("results")
    raw_matrices: bool = False
    matrices: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    weights: tuple[float, float] = (0.5, 0.5)
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    qec_restarts: int = 2
    qec_max_iters: int = 500
    grape_slices: int = 100
    grape_duration: float = 0.02
    grape_max_iters: int = 500
    grape_gradient: str = "exact"
    show_progress: bool = False

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ValueError(f"未知实验: {self.name}，可选 {EXPERIMENTS}")
        if self.sample_count < 1:
            raise ValueError(f"采样数必须为正: {self.sample_count}")
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != 2 or any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
            raise ValueError(f"两分量权重必须非负且和为 1: {weights}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "lambdas", tuple(float(lam) for lam in self.lambdas))
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @classmethod
    def from_dict(cls, payload: dict[str, Any], base_dir: str | Path = ".") -> "ExperimentSpec":
        """由实验描述 JSON 构造；matrices 中的路径相对 base_dir 解析"""
        payload = dict(payload)
        if "matrices" in payload:
            payload["matrices"] = DataLoader.load_matrix_bundle(payload["matrices"], base_dir)
        for key in ("weights", "lambdas"):
            if key in payload:
                payload[key] = tuple(payload[key])
        known = cls.__dataclass_fields__
        unknown = sorted(set(payload) - set(known))
        if unknown:
            raise ValueError(f"实验描述中有未知字段: {unknown}")
        return cls(**payload)

    @classmethod
    def from_file(cls, filepath: str | Path, **overrides: Any) -> "ExperimentSpec":
        payload = DataLoader.load_experiment_spec(filepath)
        payload.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(payload, base_dir=Path(filepath).parent)

    def bundle(self) -> AppendixBundle:
        bundle = AppendixBundle.load(raw=self.raw_matrices)
        if self.matrices:
            bundle = bundle.with_overrides(self.matrices)
        return bundle


class ExperimentRunner:
    """按实验描述运行实验

    Args:
        spec: 实验描述

    Examples:
        >>> runner = ExperimentRunner(ExperimentSpec("extreme", sample_count=200))
        >>> report = runner.run()
        >>> report.fidelities.value("E_vs_S_E", "process", "process_fidelity")
    """

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self._channels_evaluated = 0
        self._samples_evaluated = 0
        logger.debug(f"初始化 ExperimentRunner: {spec.name}")

    def run(self) -> ExperimentReport:
        handlers: dict[str, Callable[[], ExperimentReport]] = {
            "extreme": self.run_extreme,
            "dephasing": self.run_dephasing,
            "decomposition": self.run_decomposition,
            "qec_scan": self.run_qec_scan,
            "grape_demo": self.run_grape_demo,
        }
        logger.info(f"开始实验: {self.spec.name}")
        report = handlers[self.spec.name]()
        logger.info(f"实验结束: {self.spec.name}")
        return report

    def _require(self, name: str) -> None:
        if self.spec.name != name:
            raise ValueError(f"实验描述为 {self.spec.name}，不能运行 {name}")

    def _metadata(self, bundle: Optional[AppendixBundle] = None) -> dict[str, Any]:
        meta = {
            "experiment": self.spec.name,
            "seed": self.spec.seed,
            "sample_count": self.spec.sample_count,
            "versions": {"superkit": superkit.__version__, "numpy": np.__version__},
        }
        if bundle is not None:
            meta.update({
                "tolerance": bundle.tol,
                "raw_matrices": bundle.raw,
                "matrix_bundle_sha256": bundle.hash,
            })
        else:
            meta["tolerance"] = PSD_ATOL
        return meta

    def _channel_report(
        self,
        name: str,
        channels: dict[str, KrausChannel],
        bundle: AppendixBundle,
    ) -> ExperimentReport:
        """ℬ 输出、χ、Choi 与 Bloch 点云"""
        states = fibonacci_sphere(self.spec.sample_count)
        report = ExperimentReport(name=name, metadata=self._metadata(bundle))
        report.bloch_in = fibonacci_points(self.spec.sample_count)
        for channel_name, channel in channels.items():
            report.basis_outputs[channel_name] = basis_outputs(channel)
            report.choi[channel_name] = channel.choi()
            report.chi[channel_name] = channel.chi()
            report.artifacts[f"channel_{channel_name}"] = DataLoader.encode_channel(channel)
            report.bloch_out[channel_name] = bloch_cloud(
                channel.apply, states, self.spec.show_progress
            )
            for k, axis in enumerate(ellipsoid_axes(channel), start=1):
                report.fidelities.add(name, channel_name, "bloch", f"ellipsoid_axis_{k}", axis)
            self._channels_evaluated += 1
            self._samples_evaluated += len(states)
        return report

    def _superchannel_experiment(
        self,
        name: str,
        superchannel: GenExtremeSuperchannel,
        label: str,
        bundle: AppendixBundle,
    ) -> tuple[ExperimentReport, KrausChannel, KrausChannel, ChoiState]:
        channel = bundle.random_channel()
        transformed = output_channel(superchannel, channel)
        # 另一条路径：超信道 Kraus 直接作用在 Choi 态上
        choi_path = act_on_choi(circuit_to_kraus(superchannel), channel.choi())

        report = self._channel_report(name, {"E": channel, label: transformed}, bundle)
        table = report.fidelities
        pair = f"E_vs_{label}"
        outputs = report.basis_outputs
        table.add_basis_comparison(name, pair, outputs["E"], outputs[label])
        table.add_process_fidelity(name, pair, report.chi["E"], report.chi[label])
        table.add_bloch_comparison(name, pair, report.bloch_out["E"], report.bloch_out[label])

        via_choi = {
            basis: choi_path.apply(BASIS_STATES[basis].density()) for basis in BASIS_LABELS
        }
        paths = f"{label}_kraus_vs_choi"
        table.add_basis_comparison(name, paths, report.basis_outputs[label], via_choi)
        gap = trace_distance(report.choi[label], choi_path)
        table.add(name, paths, "process", "choi_trace_distance", gap)
        for case in ChannelGenerator.generate_special_cases():
            if "channel" in case:
                special = case["channel"]
                fidelity = process_fidelity(
                    special.chi(), output_channel(superchannel, special).chi()
                )
                table.add(name, f"special_{case['name']}", "process", "process_fidelity", fidelity)
        return report, channel, transformed, choi_path

    def run_extreme(self) -> ExperimentReport:
        """随机极端超信道 Ŝ 作用于随机信道 ℰ"""
        self._require("extreme")
        bundle = self.spec.bundle()
        report, *_ = self._superchannel_experiment(
            "extreme", bundle.extreme_superchannel(), "S_E", bundle
        )
        return report

    def run_dephasing(self) -> ExperimentReport:
        """退相位超信道 Ŝ_d：Choi 态对角元不变，非对角元被压缩"""
        self._require("dephasing")
        bundle = self.spec.bundle()
        report, channel, transformed, _ = self._superchannel_experiment(
            "dephasing", bundle.dephasing_superchannel(), "Sd_E", bundle
        )
        before = report.choi["E"].data
        after = report.choi["Sd_E"].data
        off = ~np.eye(before.shape[0], dtype=bool)
        report.fidelities.add(
            "dephasing", "E_vs_Sd_E", "process", "choi_diagonal_max_deviation",
            np.max(np.abs(np.diag(after) - np.diag(before))),
        )
        report.fidelities.add(
            "dephasing", "E_vs_Sd_E", "process", "choi_offdiagonal_max_excess",
            np.max(np.abs(after[off]) - np.abs(before[off])),
        )
        return report

    def run_decomposition(self) -> ExperimentReport:
        """一般超信道 Ŝ_g 与两个 3 比特分量的凸组合在同一酉信道上的输出比较"""
        self._require("decomposition")
        bundle = self.spec.bundle()
        unitary_channel = bundle.decomposition_channel()
        general: CircuitSuperchannel = bundle.general_superchannel()
        first, second = bundle.decomposition_components()

        out_general = output_channel(general, unitary_channel)
        out_first = output_channel(first, unitary_channel)
        out_second = output_channel(second, unitary_channel)
        mixed = KrausChannel.mixture([out_first, out_second], list(self.spec.weights))

        report = self._channel_report(
            "decomposition",
            {"Sg_U": out_general, "S1_U": out_first, "S2_U": out_second, "mix_U": mixed},
            bundle,
        )
        report.metadata["weights"] = list(self.spec.weights)
        table = report.fidelities
        outputs = report.basis_outputs
        table.add_basis_comparison("decomposition", "Sg_vs_mix", outputs["Sg_U"], outputs["mix_U"])
        table.add_process_fidelity(
            "decomposition", "Sg_vs_mix", report.chi["Sg_U"], report.chi["mix_U"]
        )
        # 单比特态的迹距离等于 Bloch 距离的一半
        gaps = 0.5 * np.linalg.norm(report.bloch_out["Sg_U"] - report.bloch_out["mix_U"], axis=1)
        table.add("decomposition", "Sg_vs_mix", "sample", "trace_distance_max", gaps.max())
        table.add("decomposition", "Sg_vs_mix", "sample", "trace_distance_mean", gaps.mean())
        basis_gap = max(table.value("Sg_vs_mix", b, "trace_distance") for b in BASIS_LABELS)
        logger.info(f"凸分解演示: ℬ 上最大迹距离 {basis_gap:.4f}, 采样最大迹距离 {gaps.max():.4f}")
        return report

    def run_qec_scan(self) -> ExperimentReport:
        """纠缠辅助码的 F_e–λ 曲线"""
        self._require("qec_scan")
        spec = self.spec
        config = OptimizerConfig(
            seed=spec.seed,
            restarts=spec.qec_restarts,
            max_iters=spec.qec_max_iters,
            show_progress=spec.show_progress,
        )
        df = EbitCodeSearch(config).fidelity_curve(list(spec.lambdas))
        report = ExperimentReport(name="qec_scan", metadata=self._metadata())
        report.metadata["lambdas"] = list(spec.lambdas)
        location_columns = [c for c in df.columns if c.startswith("f_noise_qubit_")]
        for _, row in df.iterrows():
            label = f"lambda={row['lambda']:.4f}"
            report.fidelities.add(
                "qec_scan", "corrected", label, "entanglement_fidelity", row["f_corrected"]
            )
            report.fidelities.add(
                "qec_scan", "uncorrected", label, "entanglement_fidelity", row["f_uncorrected"]
            )
            for column in location_columns:
                location = column.removeprefix("f_")
                report.fidelities.add(
                    "qec_scan", location, label, "entanglement_fidelity", row[column]
                )
        report.tables["qec_scan"] = df.drop(columns=location_columns)
        report.tables["qec_locations"] = df[["lambda", *location_columns]]
        return report

    def run_grape_demo(self) -> ExperimentReport:
        """在 C₁–C₂ 子体系上编译 CNOT，以自旋回波脉冲为第一个起点"""
        self._require("grape_demo")
        spec = self.spec
        system = SpinSystem.crotonic_acid().subsystem([0, 1])
        config = GrapeConfig(
            seed=spec.seed,
            n_slices=spec.grape_slices,
            duration=spec.grape_duration,
            max_iters=spec.grape_max_iters,
            gradient=spec.grape_gradient,
            show_progress=spec.show_progress,
        )
        initial = echo_cnot_pulse(system, spec.grape_slices, spec.grape_duration, spec.seed)
        grape = GrapeOptimizer(system, CNOT, config)
        pulse = grape.optimize(initial)
        fidelity = gate_fidelity(CNOT, propagate(system, pulse))

        report = ExperimentReport(name="grape_demo", metadata=self._metadata())
        report.metadata["grape"] = {
            **grape.get_statistics(),
            "converged": pulse.converged,
            "initial_fidelity": initial.fidelity,
        }
        report.fidelities.add("grape_demo", "CNOT_C1_C2", "gate", "gate_fidelity", fidelity)
        report.tables["grape_history"] = pd.DataFrame(
            {"iter": np.arange(len(grape.history)), "fidelity": grape.history}
        )
        report.artifacts["pulse"] = DataLoader.encode_pulse(pulse)
        report.artifacts["spin_system"] = DataLoader.encode_spin_system(system)
        return report

    def get_statistics(self) -> dict[str, int]:
        return {
            "channels_evaluated": self._channels_evaluated,
            "samples_evaluated": self._samples_evaluated,
        }


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    return ExperimentRunner(spec).run()


def run_extreme(spec: ExperimentSpec) -> ExperimentReport:
    return ExperimentRunner(spec).run_extreme()


def run_dephasing(spec: ExperimentSpec) -> ExperimentReport:
    return ExperimentRunner(spec).run_dephasing()


def run_decomposition(spec: ExperimentSpec) -> ExperimentReport:
    return ExperimentRunner(spec).run_decomposition()
