"""
数据加载器

读写 JSON 格式的矩阵、信道、凸分解、控制脉冲、自旋体系与实验描述。

复矩阵统一编码为 {"dim": n, "data": [[re, im], ...]}（按行优先展开的 n² 个元素），
浮点数以 repr 写出，读回后逐位一致。
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from superkit.algorithms.decomposition import ConvexDecomposition
from superkit.algorithms.grape import ControlPulse, SpinSystem
from superkit.core.channels import KrausChannel
from superkit.superchannel.choi import SuperchannelChoi, superchannel_choi
from superkit.superchannel.circuit import GenExtremeSuperchannel, circuit_to_kraus
from superkit.utils.linalg import PSD_ATOL

logger = logging.getLogger(__name__)


def _read_json(filepath: str | Path) -> Any:
    filepath = Path(filepath)
    if not filepath.exists():
        logger.error(f"数据文件不存在: {filepath}")
        raise FileNotFoundError(f"数据文件不存在: {filepath}")
    with open(filepath, "r", encoding="utf-8") as f:
        return json.load(f)


def dump_json(data: Any, filepath: str | Path) -> Path:
    """以确定的格式写 JSON（键排序、缩进 2、末尾换行）"""
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return filepath


class DataLoader:
    """JSON 数据的编码与解码

    Examples:
        >>> payload = DataLoader.encode_matrix(np.eye(2))
        >>> DataLoader.decode_matrix(payload)
        array([[1.+0.j, 0.+0.j],
               [0.+0.j, 1.+0.j]])
    """

    @staticmethod
    def encode_matrix(matrix: np.ndarray) -> dict[str, Any]:
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"只能编码方阵: 形状 {matrix.shape}")
        return {
            "dim": int(matrix.shape[0]),
            "data": [[float(z.real), float(z.imag)] for z in matrix.reshape(-1)],
        }

    @staticmethod
    def decode_matrix(payload: dict[str, Any]) -> np.ndarray:
        """
        Raises:
            ValueError: 缺少字段或元素个数与 dim 不符
        """
        try:
            dim = int(payload["dim"])
            pairs = np.asarray(payload["data"], dtype=float)
        except (KeyError, TypeError) as e:
            raise ValueError(f"矩阵 JSON 缺少 dim/data 字段: {e}") from e
        if pairs.shape != (dim * dim, 2):
            raise ValueError(f"矩阵元素个数 {pairs.shape} 与 dim={dim} 不符")
        return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)

    @staticmethod
    def load_matrix(filepath: str | Path) -> np.ndarray:
        return DataLoader.decode_matrix(_read_json(filepath))

    @staticmethod
    def save_matrix(matrix: np.ndarray, filepath: str | Path) -> Path:
        return dump_json(DataLoader.encode_matrix(matrix), filepath)

    @staticmethod
    def encode_channel(channel: KrausChannel) -> dict[str, Any]:
        return {
            "dim_in": channel.dim_in,
            "dim_out": channel.dim_out,
            "kraus": [DataLoader.encode_matrix(k) for k in channel.kraus],
        }

    @staticmethod
    def decode_channel(payload: dict[str, Any], tol: float = PSD_ATOL) -> KrausChannel:
        """
        Raises:
            ValueError: 缺少 dim_in/dim_out，或 Kraus 形状不是 dim_out×dim_in
        """
        if "kraus" in payload:
            missing = [key for key in ("dim_in", "dim_out") if key not in payload]
            if missing:
                raise ValueError(f"信道 JSON 缺少字段: {missing}")
            dim_in, dim_out = int(payload["dim_in"]), int(payload["dim_out"])
            if dim_in < 1 or dim_out < 1:
                raise ValueError(f"信道维数必须为正: dim_in={dim_in}, dim_out={dim_out}")
            kraus = tuple(DataLoader.decode_matrix(k) for k in payload["kraus"])
            bad = [k.shape for k in kraus if k.shape != (dim_out, dim_in)]
            if bad:
                raise ValueError(f"Kraus 形状 {bad} 与 dim_out×dim_in = {dim_out}×{dim_in} 不符")
            return KrausChannel(kraus, tol=tol)
        if "unitary" in payload:
            return KrausChannel.from_unitary(DataLoader.decode_matrix(payload["unitary"]), tol=tol)
        raise ValueError("信道 JSON 需要 kraus 或 unitary 字段")

    @staticmethod
    def encode_decomposition(d: ConvexDecomposition) -> dict[str, Any]:
        return {
            "weights": list(d.weights),
            "components": [
                {"V": DataLoader.encode_matrix(c.V), "W": DataLoader.encode_matrix(c.W)}
                for c in d.components
            ],
            "achieved_distance": d.achieved_distance,
            "converged": d.converged,
            "seed": d.seed,
        }

    @staticmethod
    def decode_decomposition(payload: dict[str, Any], tol: float = PSD_ATOL) -> ConvexDecomposition:
        components = tuple(
            GenExtremeSuperchannel(
                DataLoader.decode_matrix(c["V"]), DataLoader.decode_matrix(c["W"]), tol=tol
            )
            for c in payload["components"]
        )
        return ConvexDecomposition(
            weights=tuple(payload["weights"]),
            components=components,
            achieved_distance=float(payload.get("achieved_distance", 0.0)),
            converged=bool(payload.get("converged", True)),
            seed=payload.get("seed"),
        )

    @staticmethod
    def load_superchannel_target(filepath: str | Path, tol: float = PSD_ATOL) -> SuperchannelChoi:
        """读取凸分解的目标超信道

        支持三种写法：{"choi": 16×16 矩阵}、{"V": …, "W": …}（广义极端线路）、
        {"weights": […], "components": [{"V", "W"}, …]}（线路的凸组合）。
        """
        payload = _read_json(filepath)
        if "choi" in payload:
            return SuperchannelChoi(DataLoader.decode_matrix(payload["choi"]), tol=tol)
        if "V" in payload and "W" in payload:
            circuit = GenExtremeSuperchannel(
                DataLoader.decode_matrix(payload["V"]),
                DataLoader.decode_matrix(payload["W"]),
                tol=tol,
            )
            return superchannel_choi(circuit_to_kraus(circuit))
        if "components" in payload:
            d = DataLoader.decode_decomposition(payload, tol=tol)
            chois = [superchannel_choi(circuit_to_kraus(c), validate=False) for c in d.components]
            return SuperchannelChoi.mixture(chois, list(d.weights))
        raise ValueError(f"无法识别的目标超信道格式: {sorted(payload)}")

    @staticmethod
    def encode_pulse(pulse: ControlPulse) -> dict[str, Any]:
        return {
            "n_slices": pulse.n_slices,
            "slice_duration_s": pulse.slice_duration,
            "amplitudes_hz": pulse.amplitudes.tolist(),
            "fidelity": pulse.fidelity,
            "converged": pulse.converged,
        }

    @staticmethod
    def decode_pulse(payload: dict[str, Any]) -> ControlPulse:
        amplitudes = np.asarray(payload["amplitudes_hz"], dtype=float)
        if amplitudes.shape[0] != int(payload["n_slices"]):
            raise ValueError(
                f"脉冲段数 {payload['n_slices']} 与幅度数组 {amplitudes.shape} 不一致"
            )
        return ControlPulse(
            amplitudes,
            float(payload["slice_duration_s"]),
            fidelity=payload.get("fidelity"),
            converged=bool(payload.get("converged", True)),
        )

    @staticmethod
    def encode_spin_system(system: SpinSystem) -> dict[str, Any]:
        return {
            "names": list(system.names),
            "chemical_shifts_hz": list(system.chemical_shifts),
            "j_couplings_hz": [[i, j, v] for (i, j), v in sorted(system.j_couplings.items())],
        }

    @staticmethod
    def decode_spin_system(payload: dict[str, Any]) -> SpinSystem:
        couplings = {(int(i), int(j)): float(v) for i, j, v in payload.get("j_couplings_hz", [])}
        system = SpinSystem(
            tuple(payload["chemical_shifts_hz"]), couplings, tuple(payload.get("names", ()))
        )
        if "subsystem" in payload:
            system = system.subsystem(list(payload["subsystem"]))
        return system

    @staticmethod
    def load_spin_system(filepath: str | Path) -> SpinSystem:
        system = DataLoader.decode_spin_system(_read_json(filepath))
        logger.info(f"加载自旋体系: {system.n_spins} 个自旋")
        return system

    @staticmethod
    def load_experiment_spec(filepath: str | Path) -> dict[str, Any]:
        """读取实验描述文件（字段见 ExperimentSpec.from_dict）"""
        payload = _read_json(filepath)
        if not isinstance(payload, dict) or "name" not in payload:
            raise ValueError(f"实验描述文件缺少 name 字段: {filepath}")
        logger.info(f"加载实验描述: {filepath} ({payload['name']})")
        return payload

    @staticmethod
    def load_matrix_bundle(
        entries: dict[str, Any],
        base_dir: str | Path = ".",
    ) -> dict[str, np.ndarray]:
        """实验描述中的矩阵：值可以是文件路径（相对 base_dir），也可以是内嵌的矩阵 JSON"""
        base_dir = Path(base_dir)
        matrices = {}
        for name, entry in entries.items():
            if isinstance(entry, str):
                path = Path(entry)
                path = path if path.is_absolute() else base_dir / path
                matrices[name] = DataLoader.load_matrix(path)
            else:
                matrices[name] = DataLoader.decode_matrix(entry)
        logger.debug(f"加载 {len(matrices)} 个外部矩阵: {sorted(matrices)}")
        return matrices
