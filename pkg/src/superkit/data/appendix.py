"""
实验附录矩阵

appendix_matrices.txt 原样保存实验所用的酉矩阵（4 位小数）。由于舍入，这些矩阵只是近似酉的：
默认通过极分解投影到最近的酉矩阵（偏差 ≤ 舍入误差），raw=True 时保留原始数值并放宽容差。
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from superkit.core.channels import KrausChannel
from superkit.superchannel.circuit import (
    CircuitSuperchannel,
    GenExtremeSuperchannel,
    dephasing_superchannel,
)
from superkit.utils.linalg import PSD_ATOL, polar_unitary, unitarity_error

logger = logging.getLogger(__name__)

APPENDIX_FILE = Path(__file__).with_name("appendix_matrices.txt")

# 4 位小数舍入下 ‖M†M − 1‖_max 的上界
RAW_UNITARITY_BOUND = 5e-3
# 原始矩阵经线路、信道层层组合后的容差
RAW_TOL = 2e-2
PROJECTED_UNITARITY_BOUND = 1e-12

EXPECTED_SHAPES = {
    "random_channel.U": (4, 4),
    "extreme.V": (8, 8),
    "extreme.W": (8, 8),
    "dephasing.V1": (4, 4),
    "dephasing.V2": (4, 4),
    "dephasing.W1": (4, 4),
    "dephasing.W2": (4, 4),
    "decomposition.U": (2, 2),
    "decomposition.V": (8, 8),
    "decomposition.W": (16, 16),
    "decomposition.V1": (4, 4),
    "decomposition.W1": (8, 8),
    "decomposition.V2": (4, 4),
    "decomposition.W2": (8, 8),
}


def parse_entry(text: str) -> complex:
    """'-0.0109+0.1787i' → complex"""
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def parse_matrix_text(text: str) -> dict[str, np.ndarray]:
    """解析分节的矩阵文本：'[名称]' 开始一节，每行一行矩阵，列以 & 分隔，# 开头为注释"""
    matrices: dict[str, list[list[complex]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current in matrices:
                raise ValueError(f"第 {lineno} 行: 重复的矩阵名 {current}")
            matrices[current] = []
            continue
        if current is None:
            raise ValueError(f"第 {lineno} 行: 矩阵行出现在任何节之前")
        matrices[current].append([parse_entry(e) for e in line.split("&")])

    result = {}
    for name, rows in matrices.items():
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError(f"矩阵 {name} 的行长度不一致")
        result[name] = np.array(rows, dtype=complex)
    return result


def load_raw_matrices(path: str | Path = APPENDIX_FILE) -> dict[str, np.ndarray]:
    """
    Raises:
        FileNotFoundError: 文件不存在
        ValueError: 文件格式错误
    """
    path = Path(path)
    if not path.exists():
        logger.error(f"矩阵文件不存在: {path}")
        raise FileNotFoundError(f"矩阵文件不存在: {path}")
    matrices = parse_matrix_text(path.read_text(encoding="utf-8"))
    logger.debug(f"从 {path} 读取 {len(matrices)} 个矩阵")
    return matrices


def bundle_hash(matrices: Mapping[str, np.ndarray]) -> str:
    """按名称排序后对形状与 complex128 小端字节做 SHA-256"""
    digest = hashlib.sha256()
    for name in sorted(matrices):
        array = np.ascontiguousarray(matrices[name], dtype="<c16")
        digest.update(name.encode("utf-8"))
        digest.update(repr(array.shape).encode("ascii"))
        digest.update(array.tobytes())
    return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class AppendixBundle:
    """实验矩阵包

    Args:
        raw_matrices: 原始（舍入后的）矩阵
        raw: True 时直接使用原始矩阵，否则使用极分解后的酉矩阵

    Examples:
        >>> bundle = AppendixBundle.load()
        >>> channel = bundle.random_channel()
        >>> superchannel = bundle.extreme_superchannel()
    """

    raw_matrices: Mapping[str, np.ndarray]
    raw: bool = False
    matrices: dict[str, np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        missing = sorted(set(EXPECTED_SHAPES) - set(self.raw_matrices))
        if missing:
            raise ValueError(f"矩阵包缺少: {missing}")
        raw_matrices = {}
        matrices = {}
        for name, mat in self.raw_matrices.items():
            mat = np.array(mat, dtype=complex)
            expected = EXPECTED_SHAPES.get(name)
            if expected is not None and mat.shape != expected:
                raise ValueError(f"矩阵 {name} 形状 {mat.shape} 应为 {expected}")
            error = unitarity_error(mat)
            if error > RAW_UNITARITY_BOUND:
                logger.error(f"矩阵 {name} 偏离酉性过大: {error:.3e}")
                raise ValueError(
                    f"矩阵 {name} 的 ‖M†M − 1‖ = {error:.3e} 超过 {RAW_UNITARITY_BOUND}"
                )
            mat.setflags(write=False)
            raw_matrices[name] = mat
            projected = mat if self.raw else polar_unitary(mat)
            projected = np.array(projected, dtype=complex)
            projected.setflags(write=False)
            matrices[name] = projected
        object.__setattr__(self, "raw_matrices", raw_matrices)
        object.__setattr__(self, "matrices", matrices)
        logger.debug(f"矩阵包就绪: {len(matrices)} 个矩阵, raw={self.raw}")

    @classmethod
    def load(cls, raw: bool = False, path: str | Path = APPENDIX_FILE) -> "AppendixBundle":
        return cls(load_raw_matrices(path), raw=raw)

    def with_overrides(self, overrides: Mapping[str, np.ndarray]) -> "AppendixBundle":
        """用外部提供的矩阵替换同名矩阵（例如实验描述文件中给出的矩阵路径）"""
        merged = dict(self.raw_matrices)
        merged.update(overrides)
        return AppendixBundle(merged, raw=self.raw)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.matrices[name]

    @property
    def tol(self) -> float:
        return RAW_TOL if self.raw else PSD_ATOL

    @property
    def hash(self) -> str:
        return bundle_hash(self.raw_matrices)

    def unitarity_errors(self, projected: bool = True) -> dict[str, float]:
        source = self.matrices if projected else self.raw_matrices
        return {name: unitarity_error(mat) for name, mat in sorted(source.items())}

    def random_channel(self) -> KrausChannel:
        """随机信道 ℰ：U 作用于 (C₁, C₂)，C₁ 为辅助比特（最高位）"""
        return KrausChannel.from_dilation(
            self["random_channel.U"], dim=2, ancilla_first=True, tol=self.tol
        )

    def extreme_superchannel(self) -> GenExtremeSuperchannel:
        return GenExtremeSuperchannel(self["extreme.V"], self["extreme.W"], tol=self.tol)

    def dephasing_superchannel(self) -> GenExtremeSuperchannel:
        return dephasing_superchannel(
            self["dephasing.V1"],
            self["dephasing.V2"],
            self["dephasing.W1"],
            self["dephasing.W2"],
            tol=self.tol,
        )

    def decomposition_channel(self) -> KrausChannel:
        """凸分解演示中的单比特酉信道 U"""
        return KrausChannel.from_unitary(self["decomposition.U"], tol=self.tol)

    def general_superchannel(self) -> CircuitSuperchannel:
        """4 比特线路：V 作用于工作比特+2 个辅助，W 作用于全部 4 个比特"""
        return CircuitSuperchannel(
            self["decomposition.V"],
            self["decomposition.W"],
            pre_ancilla_dim=4,
            post_ancilla_dim=8,
            tol=self.tol,
        )

    def decomposition_components(self) -> tuple[CircuitSuperchannel, CircuitSuperchannel]:
        """两个 3 比特线路：V_i 作用于工作比特+1 个辅助，W_i 作用于工作比特+2 个辅助"""
        return tuple(
            CircuitSuperchannel(
                self[f"decomposition.V{i}"],
                self[f"decomposition.W{i}"],
                pre_ancilla_dim=2,
                post_ancilla_dim=4,
                tol=self.tol,
            )
            for i in (1, 2)
        )
