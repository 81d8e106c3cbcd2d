"""
保真度表与 Bloch 统计

把实验中比较的各项指标（态保真度、迹距离、过程保真度、Bloch 点云距离）收集为长表，
并提供信道在 Bloch 球上的仿射表示（输出椭球）。
"""

import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd
from tqdm import tqdm

from superkit.core.channels import ChiMatrix, KrausChannel
from superkit.core.metrics import process_fidelity, state_fidelity, trace_distance
from superkit.core.states import DensityMatrix, PureState
from superkit.utils.linalg import PAULIS

logger = logging.getLogger(__name__)

COLUMNS = ["experiment", "channel", "input", "metric", "value"]


def bloch_array(rho: DensityMatrix) -> np.ndarray:
    """(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)，不检查是否落在单位球内"""
    return np.array([np.real(np.trace(rho.data @ s)) for s in PAULIS[1:]])


def bloch_cloud(
    apply: Callable[[DensityMatrix], DensityMatrix],
    states: list[PureState],
    show_progress: bool = False,
) -> np.ndarray:
    """输入态依次经过 apply 后的 Bloch 点云，形状 (n, 3)，保持输入顺序"""
    points = [
        bloch_array(apply(state.density()))
        for state in tqdm(states, desc="Bloch 采样", disable=not show_progress)
    ]
    return np.array(points, dtype=float).reshape(-1, 3)


def bloch_distances(cloud_a: np.ndarray, cloud_b: np.ndarray) -> np.ndarray:
    """逐点欧氏距离"""
    cloud_a, cloud_b = np.asarray(cloud_a), np.asarray(cloud_b)
    if cloud_a.shape != cloud_b.shape:
        raise ValueError(f"点云形状不一致: {cloud_a.shape} vs {cloud_b.shape}")
    return np.linalg.norm(cloud_a - cloud_b, axis=1)


def affine_bloch_map(channel: KrausChannel) -> tuple[np.ndarray, np.ndarray]:
    """单比特信道在 Bloch 球上的仿射表示 r ↦ T r + t

    T_ij = ½ Tr[σ_i ℰ(σ_j)]，t_i = ½ Tr[σ_i ℰ(1)]。
    """
    if channel.dim_in != 2 or channel.dim_out != 2:
        raise ValueError("Bloch 仿射表示只对单比特信道定义")

    def act(op):
        return sum(k @ op @ k.conj().T for k in channel.kraus)

    identity, *sigmas = PAULIS
    t = np.array([0.5 * np.real(np.trace(s @ act(identity))) for s in sigmas])
    T = np.array([[0.5 * np.real(np.trace(si @ act(sj))) for sj in sigmas] for si in sigmas])
    return T, t


def ellipsoid_axes(channel: KrausChannel) -> np.ndarray:
    """输出椭球的半轴长（T 的奇异值，降序）"""
    T, _ = affine_bloch_map(channel)
    return np.linalg.svd(T, compute_uv=False)


class FidelityTable:
    """实验指标的长表

    每条记录为 (experiment, channel, input, metric, value)，按加入顺序输出。

    Examples:
        >>> table = FidelityTable()
        >>> table.add_basis_comparison("extreme", "S(E)", outputs_kraus, outputs_choi)
        >>> df = table.to_dataframe()
    """

    def __init__(self):
        self.records: list[dict[str, Any]] = []
        logger.debug("初始化 FidelityTable")

    def add(self, experiment: str, channel: str, label: str, metric: str, value: float) -> None:
        self.records.append({
            "experiment": experiment,
            "channel": channel,
            "input": label,
            "metric": metric,
            "value": float(value),
        })

    def add_basis_comparison(
        self,
        experiment: str,
        channel: str,
        outputs_a: dict[str, DensityMatrix],
        outputs_b: dict[str, DensityMatrix],
    ) -> None:
        """对 ℬ 的每个输入记录两组输出之间的态保真度与迹距离"""
        for label, rho_a in outputs_a.items():
            rho_b = outputs_b[label]
            self.add(experiment, channel, label, "state_fidelity", state_fidelity(rho_a, rho_b))
            self.add(experiment, channel, label, "trace_distance", trace_distance(rho_a, rho_b))

    def add_process_fidelity(
        self, experiment: str, channel: str, chi_a: ChiMatrix, chi_b: ChiMatrix
    ) -> None:
        self.add(experiment, channel, "process", "process_fidelity", process_fidelity(chi_a, chi_b))

    def add_bloch_comparison(
        self, experiment: str, channel: str, cloud_a: np.ndarray, cloud_b: np.ndarray
    ) -> None:
        distances = bloch_distances(cloud_a, cloud_b)
        self.add(experiment, channel, "bloch", "bloch_distance_max", distances.max())
        self.add(experiment, channel, "bloch", "bloch_distance_mean", distances.mean())

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=COLUMNS)

    def value(self, channel: str, label: str, metric: str) -> float:
        """查询单个指标

        Raises:
            KeyError: 没有匹配的记录
        """
        for record in self.records:
            if (record["channel"], record["input"], record["metric"]) == (channel, label, metric):
                return record["value"]
        raise KeyError(f"没有记录: {channel}/{label}/{metric}")

    @staticmethod
    def calculate_statistics(df: pd.DataFrame) -> dict[str, dict[str, float]]:
        """按 (channel, metric) 分组的统计：mean, median, min, max, p95"""
        stats = {}
        for (channel, metric), group in df.groupby(["channel", "metric"], sort=True):
            values = group["value"]
            stats[f"{channel}/{metric}"] = {
                "mean": float(values.mean()),
                "median": float(values.median()),
                "min": float(values.min()),
                "max": float(values.max()),
                "p95": float(values.quantile(0.95)),
            }
        logger.info(f"统计数据计算完成: {len(stats)} 组")
        return stats

    def export_results(self, filepath: str | Path) -> Path:
        """导出为 CSV（浮点数以 repr 精度写出）"""
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(filepath, index=False, float_format="%.17g", lineterminator="\n")
        logger.info(f"结果已导出到: {filepath}")
        return filepath

    @classmethod
    def from_dataframe(cls, df: pd.DataFrame) -> "FidelityTable":
        table = cls()
        for row in df.reindex(columns=COLUMNS).itertuples(index=False):
            table.add(*row)
        return table
