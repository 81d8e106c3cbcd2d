"""
量子态

密度矩阵、纯态、Bloch 矢量，以及输入态集合 ℬ 与球面 Fibonacci 格点采样。
所有对象构造后不可变。
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from superkit.utils.linalg import ATOL, PAULIS, PSD_ATOL, is_hermitian

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2ⁿ 维寄存器上的密度矩阵

    不变量：Hermitian（容差 tol）、迹为 1（容差 tol）、本征值 ≥ −1e-9。

    Args:
        data: dim×dim 复矩阵
        tol: Hermitian 与迹的容差；使用四位小数的实验矩阵时可放宽

    Examples:
        >>> rho = DensityMatrix(np.eye(2) / 2)
        >>> rho.dim
        2
    """

    data: np.ndarray
    tol: float = field(default=ATOL, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"密度矩阵必须是方阵: 形状 {data.shape}")
        if not _is_power_of_two(data.shape[0]):
            raise ValueError(f"维数必须是 2 的幂: {data.shape[0]}")
        if not is_hermitian(data, self.tol):
            raise ValueError("密度矩阵不是 Hermitian")
        trace = np.trace(data)
        if abs(trace - 1) > self.tol:
            raise ValueError(f"密度矩阵的迹不为 1: {trace:.12f}")
        min_eig = np.linalg.eigvalsh((data + data.conj().T) / 2).min()
        if min_eig < -max(PSD_ATOL, self.tol):
            raise ValueError(f"密度矩阵不是半正定: 最小本征值 {min_eig:.3e}")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.dim))

    @classmethod
    def from_pure(cls, state: "PureState") -> "DensityMatrix":
        vec = state.amplitudes
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @classmethod
    def from_bloch(cls, bloch: "BlochVector") -> "DensityMatrix":
        """ρ = 1/2 + (xσ_x + yσ_y + zσ_z)/2"""
        _, sx, sy, sz = PAULIS
        return cls(0.5 * (np.eye(2) + bloch.x * sx + bloch.y * sy + bloch.z * sz))

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def bloch(self) -> "BlochVector":
        """单比特态的 Bloch 矢量 (Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)"""
        if self.dim != 2:
            raise ValueError(f"Bloch 矢量只对单比特定义, dim={self.dim}")
        _, sx, sy, sz = PAULIS
        x, y, z = (float(np.real(np.trace(self.data @ s))) for s in (sx, sy, sz))
        return BlochVector(x, y, z)

    def decomposition_params(self) -> tuple[float, float, float]:
        """单比特态的参数 (a, b, c)

        ρ = [[0.5 + a, b − ic], [b + ic, 0.5 − a]]，即 a = ρ₀₀ − 0.5, b = Re ρ₁₀, c = Im ρ₁₀。
        """
        if self.dim != 2:
            raise ValueError(f"(a, b, c) 参数只对单比特定义, dim={self.dim}")
        a = float(np.real(self.data[0, 0]) - 0.5)
        b = float(np.real(self.data[1, 0]))
        c = float(np.imag(self.data[1, 0]))
        return a, b, c


@dataclass(frozen=True, eq=False)
class PureState:
    """归一化的纯态矢量"""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if not _is_power_of_two(vec.shape[0]):
            raise ValueError(f"维数必须是 2 的幂: {vec.shape[0]}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1) > ATOL:
            raise ValueError(f"纯态未归一化: ‖ψ‖ = {norm:.12f}")
        object.__setattr__(self, "amplitudes", _frozen(vec))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def from_bloch(cls, bloch: "BlochVector") -> "PureState":
        """Bloch 球面上的点 → cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩"""
        r = bloch.norm()
        if abs(r - 1) > 1e-6:
            raise ValueError(f"只有单位 Bloch 矢量对应纯态: |r| = {r:.9f}")
        theta = np.arccos(np.clip(bloch.z / r, -1.0, 1.0))
        phi = np.arctan2(bloch.y, bloch.x)
        return cls(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)

    def bloch(self) -> "BlochVector":
        return self.density().bloch()


@dataclass(frozen=True)
class BlochVector:
    """单比特 Bloch 矢量 (x, y, z)，满足 x² + y² + z² ≤ 1"""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.x ** 2 + self.y ** 2 + self.z ** 2 > 1 + PSD_ATOL:
            raise ValueError(f"Bloch 矢量超出单位球: {self.as_array()}")

    def norm(self) -> float:
        return float(np.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2))

    def is_pure(self) -> bool:
        return abs(self.norm() - 1) <= 1e-6

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


# 输入态集合 ℬ = {|z⟩, |z̄⟩, |x⟩, |y⟩}
BASIS_LABELS = ("z", "zbar", "x", "y")
BASIS_STATES: dict[str, PureState] = {
    "z": PureState(np.array([1, 0])),
    "zbar": PureState(np.array([0, 1])),
    "x": PureState(np.array([1, 1]) / np.sqrt(2)),
    "y": PureState(np.array([1, 1j]) / np.sqrt(2)),
}


def fibonacci_points(n: int) -> np.ndarray:
    """球面 Fibonacci 格点

    z_k = 1 − 2(k + 0.5)/n，φ_k = 2πk/黄金比，k = 0..n−1。

    Returns:
        (n, 3) 的单位矢量数组
    """
    if n < 1:
        raise ValueError(f"采样点数必须为正整数: n={n}")
    k = np.arange(n)
    z = 1 - 2 * (k + 0.5) / n
    phi = 2 * np.pi * k / GOLDEN_RATIO
    r = np.sqrt(1 - z ** 2)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def fibonacci_sphere(n: int) -> list[PureState]:
    """在 Bloch 球面上按 Fibonacci 格点采样 n 个纯态（确定性）"""
    points = fibonacci_points(n)
    states = [PureState.from_bloch(BlochVector(*p)) for p in points]
    logger.debug(f"Fibonacci 采样: {n} 个输入态")
    return states
