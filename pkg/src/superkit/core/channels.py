"""
量子信道及其表示

Kraus 形式、归一化 Choi 态（迹为 1）与 {I, X, Y, Z} 基下的 χ 矩阵之间的转换，
以及信道的 Stinespring 扩张。

约定：
- Choi 态 ω = (ℰ ⊗ 1)(|ω⟩⟨ω|)，第一个张量因子为输出，第二个为参考系统；
- 矢量化按行优先：|K⟩⟩ = (K ⊗ 1)Σ|ii⟩ = K.reshape(-1)，故 ω = (1/d)Σ|K_i⟩⟩⟨⟨K_i|；
- Stinespring 扩张中系统在前、辅助比特在后。
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as la

from superkit.core.states import DensityMatrix
from superkit.utils.linalg import (
    ATOL,
    EIG_CUTOFF,
    PAULIS,
    PSD_ATOL,
    check_unitary,
    haar_unitary,
    is_hermitian,
    partial_trace,
)

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def _tp_error(kraus: tuple[np.ndarray, ...]) -> float:
    dim_in = kraus[0].shape[1]
    total = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(total - np.eye(dim_in))))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Kraus 表示的量子信道 ℰ(ρ) = Σ K_i ρ K_i†

    Args:
        kraus: 形状相同的 dim_out×dim_in 矩阵序列
        tol: 保迹条件 ‖Σ K_i†K_i − 1‖_max 的容差

    Raises:
        ValueError: Kraus 列表为空、形状不一致或不保迹
    """

    kraus: tuple[np.ndarray, ...]
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.kraus)
        if not ops:
            raise ValueError("Kraus 算符列表不能为空")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValueError(f"Kraus 算符形状不一致: {[k.shape for k in ops]}")
        error = _tp_error(ops)
        if error > self.tol:
            logger.error(f"信道不保迹: ‖ΣK†K − 1‖ = {error:.3e}")
            raise ValueError(f"Kraus 算符不满足保迹条件 (偏差 {error:.3e})")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)

    @property
    def relaxed(self) -> bool:
        """是否使用了放宽的容差（例如四位小数的实验矩阵）"""
        return self.tol > PSD_ATOL

    @classmethod
    def identity(cls, dim: int = 2) -> "KrausChannel":
        return cls((np.eye(dim),))

    @classmethod
    def from_unitary(cls, unitary: np.ndarray, tol: float = PSD_ATOL) -> "KrausChannel":
        return cls((np.asarray(unitary, dtype=complex),), tol=tol)

    @classmethod
    def from_dilation(
        cls,
        unitary: np.ndarray,
        dim: int = 2,
        ancilla_first: bool = False,
        tol: float = PSD_ATOL,
    ) -> "KrausChannel":
        """由系统+辅助上的酉矩阵得到信道：辅助比特初始为 |0⟩，最后被求迹

        Args:
            unitary: (d·r)×(d·r) 酉矩阵
            dim: 系统维数 d
            ancilla_first: 辅助比特是否为最高位（实验中 C₁ 作为辅助比特时为 True）
            tol: 保迹容差
        """
        unitary = np.asarray(unitary, dtype=complex)
        r = unitary.shape[0] // dim
        if unitary.shape != (dim * r, dim * r):
            raise ValueError(f"扩张酉矩阵形状 {unitary.shape} 与系统维数 {dim} 不匹配")
        if ancilla_first:
            blocks = unitary.reshape(r, dim, r, dim)
            kraus = tuple(blocks[i, :, 0, :] for i in range(r))
        else:
            blocks = unitary.reshape(dim, r, dim, r)
            kraus = tuple(blocks[:, i, :, 0] for i in range(r))
        return cls(kraus, tol=tol)

    @classmethod
    def mixture(cls, channels: list["KrausChannel"], probs: list[float]) -> "KrausChannel":
        """概率混合 Σ p_j ℰ_j"""
        if len(channels) != len(probs):
            raise ValueError("信道数与概率数不一致")
        if any(p < 0 for p in probs) or abs(sum(probs) - 1) > 1e-12:
            raise ValueError(f"混合概率不合法: {probs}")
        kraus = [np.sqrt(p) * k for ch, p in zip(channels, probs) if p > 0 for k in ch.kraus]
        return cls(tuple(kraus), tol=max(ch.tol for ch in channels))

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """先作用 other 再作用 self"""
        if other.dim_out != self.dim_in:
            raise ValueError(f"维数不匹配: {other.dim_out} → {self.dim_in}")
        kraus = tuple(a @ b for a in self.kraus for b in other.kraus)
        return KrausChannel(kraus, tol=max(self.tol, other.tol))

    def pruned(self, cutoff: float = ATOL) -> "KrausChannel":
        """去掉 Frobenius 范数低于 cutoff 的 Kraus 算符"""
        kept = tuple(k for k in self.kraus if np.linalg.norm(k) > cutoff)
        return KrausChannel(kept or self.kraus[:1], tol=self.tol)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return apply_channel(self, rho)

    def choi(self) -> "ChoiState":
        return channel_to_choi(self)

    def chi(self) -> "ChiMatrix":
        return channel_to_chi(self)


@dataclass(frozen=True, eq=False)
class ChoiState:
    """归一化 Choi 态 ω_ℰ（d²×d²，迹为 1）

    不变量：半正定、迹为 1、对输出因子求偏迹得到 1/d。
    """

    data: np.ndarray
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        d = int(round(np.sqrt(data.shape[0]))) if data.ndim == 2 else 0
        if data.ndim != 2 or data.shape != (d * d, d * d) or d < 1:
            raise ValueError(f"Choi 态必须是 d²×d² 方阵: 形状 {data.shape}")
        if not is_hermitian(data, max(ATOL, self.tol)):
            raise ValueError("Choi 态不是 Hermitian")
        min_eig = np.linalg.eigvalsh((data + data.conj().T) / 2).min()
        if min_eig < -self.tol:
            raise ValueError(f"Choi 态不是半正定: 最小本征值 {min_eig:.3e}")
        trace = np.trace(data)
        if abs(trace - 1) > max(ATOL, self.tol):
            raise ValueError(f"Choi 态的迹不为 1: {trace:.12f}")
        marginal = partial_trace(data, [d, d], keep=[1])
        if np.max(np.abs(marginal - np.eye(d) / d)) > self.tol:
            raise ValueError("Choi 态的参考系统边缘不等于 1/d（信道不保迹）")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def dim(self) -> int:
        """系统维数 d"""
        return int(round(np.sqrt(self.data.shape[0])))

    def rank(self, cutoff: float = EIG_CUTOFF) -> int:
        evals = np.linalg.eigvalsh(self.data)
        return int(np.sum(evals > cutoff * max(evals.max(), 0.0)))

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """直接由 Choi 态作用：ℰ(ρ) = d·Tr_ref[ω (1 ⊗ ρᵀ)]"""
        d = self.dim
        if rho.dim != d:
            raise ValueError(f"维数不匹配: Choi 维数 {d}, 输入态维数 {rho.dim}")
        tensor = self.data.reshape(d, d, d, d)
        out = d * np.einsum("arbs,rs->ab", tensor, rho.data)
        return DensityMatrix(out, tol=max(rho.tol, self.tol if self.tol > PSD_ATOL else ATOL))

    def to_kraus(self) -> KrausChannel:
        return choi_to_kraus(self)

    def to_chi(self) -> "ChiMatrix":
        return choi_to_chi(self)


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    """{I, X, Y, Z} 基下的 4×4 过程矩阵 χ：ℰ(ρ) = Σ χ_mn P_m ρ P_n†"""

    data: np.ndarray
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (4, 4):
            raise ValueError(f"χ 矩阵必须是 4×4: 形状 {data.shape}")
        if not is_hermitian(data, max(ATOL, self.tol)):
            raise ValueError("χ 矩阵不是 Hermitian")
        min_eig = np.linalg.eigvalsh((data + data.conj().T) / 2).min()
        if min_eig < -self.tol:
            raise ValueError(f"χ 矩阵不是半正定: 最小本征值 {min_eig:.3e}")
        object.__setattr__(self, "data", _frozen(data))

    def to_choi(self) -> ChoiState:
        return chi_to_choi(self)


# 列为 vec(P_m)/√2 的酉矩阵，实现 Choi 与 χ 之间的基变换
PAULI_BASIS = np.column_stack([p.reshape(-1) for p in PAULIS]) / np.sqrt(2)


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """ℰ(ρ) = Σ_i K_i ρ K_i†

    Raises:
        ValueError: ρ 的维数与信道输入维数不一致
    """
    if rho.dim != ch.dim_in:
        raise ValueError(f"维数不匹配: 信道输入 {ch.dim_in}, 态 {rho.dim}")
    out = sum(k @ rho.data @ k.conj().T for k in ch.kraus)
    tol = ch.tol if ch.relaxed else rho.tol
    return DensityMatrix(out, tol=max(tol, rho.tol))


def channel_to_choi(ch: KrausChannel) -> ChoiState:
    """ω_ℰ = (ℰ ⊗ 1)(|ω⟩⟨ω|)，秩等于最少 Kraus 数"""
    if ch.dim_in != ch.dim_out:
        raise ValueError(f"Choi 态要求输入输出维数相同: {ch.dim_in} vs {ch.dim_out}")
    d = ch.dim_in
    vecs = np.array([k.reshape(-1) for k in ch.kraus])
    choi = vecs.T @ vecs.conj() / d
    return ChoiState(choi, tol=ch.tol)


def choi_to_kraus(choi: ChoiState, cutoff: float = EIG_CUTOFF) -> KrausChannel:
    """对 Choi 态作本征分解得到 Kraus 算符

    丢弃相对最大本征值低于 cutoff 的本征值，Kraus 数等于 Choi 态的秩。

    Raises:
        ValueError: Choi 态超出容差的非半正定
    """
    d = choi.dim
    evals, evecs = np.linalg.eigh(choi.data)
    if evals.min() < -choi.tol:
        raise ValueError(f"Choi 态不是半正定: 最小本征值 {evals.min():.3e}")
    keep = evals > cutoff * evals.max()
    kraus = tuple(
        np.sqrt(d * evals[j]) * evecs[:, j].reshape(d, d)
        for j in reversed(np.flatnonzero(keep))
    )
    logger.debug(f"Choi → Kraus: 秩 {len(kraus)}")
    return KrausChannel(kraus, tol=choi.tol)


def choi_to_chi(choi: ChoiState) -> ChiMatrix:
    """χ = B†ωB，B 的列为 vec(P_m)/√2"""
    if choi.dim != 2:
        raise ValueError(f"χ 矩阵只对单比特信道定义, d={choi.dim}")
    chi = PAULI_BASIS.conj().T @ choi.data @ PAULI_BASIS
    return ChiMatrix(chi, tol=choi.tol)


def chi_to_choi(chi: ChiMatrix) -> ChoiState:
    return ChoiState(PAULI_BASIS @ chi.data @ PAULI_BASIS.conj().T, tol=chi.tol)


def channel_to_chi(ch: KrausChannel) -> ChiMatrix:
    """单比特信道的 χ 矩阵

    Raises:
        ValueError: 非单比特信道
    """
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise ValueError(f"χ 矩阵只对单比特信道定义: {ch.dim_out}×{ch.dim_in}")
    return choi_to_chi(channel_to_choi(ch))


def stinespring_dilate(ch: KrausChannel) -> np.ndarray:
    """信道的 Stinespring 扩张酉矩阵

    辅助寄存器维数取不小于 Kraus 数的 2 的幂（秩 ≤ 2 的单比特信道只需一个辅助比特），
    作为第二个张量因子。满足 K_i = (1 ⊗ ⟨i|) U (1 ⊗ |0⟩)；第一块列由 {K_i} 堆叠成的等距，
    其余列由正交补填充。

    Raises:
        ValueError: Kraus 算符不保迹（超出 1e-9）或输入输出维数不同
    """
    if ch.dim_in != ch.dim_out:
        raise ValueError("Stinespring 扩张要求输入输出维数相同")
    d = ch.dim_in
    r = 2
    while r < ch.n_kraus:
        r *= 2

    kraus = list(ch.kraus) + [np.zeros((d, d))] * (r - ch.n_kraus)
    isometry = np.zeros((d * r, d), dtype=complex)
    for i, k in enumerate(kraus):
        isometry[i::r, :] = k
    error = float(np.max(np.abs(isometry.conj().T @ isometry - np.eye(d))))
    if error > PSD_ATOL:
        raise ValueError(f"Kraus 算符不保迹，无法扩张 (偏差 {error:.3e})")

    complement = la.null_space(isometry.conj().T)
    unitary = np.zeros((d * r, d * r), dtype=complex)
    col = 0
    for t in range(d):
        unitary[:, t * r] = isometry[:, t]
        for j in range(1, r):
            unitary[:, t * r + j] = complement[:, col]
            col += 1
    check_unitary(unitary, "Stinespring 扩张")
    return unitary


def random_kraus_channel(
    rng: np.random.Generator,
    dim: int = 2,
    n_kraus: int = 2,
) -> KrausChannel:
    """随机 CPTP 信道：取 Haar 随机酉矩阵在辅助 |0⟩ 上的等距块

    Args:
        rng: 随机数生成器
        dim: 系统维数
        n_kraus: Kraus 数（辅助寄存器维数）
    """
    if n_kraus < 1:
        raise ValueError(f"Kraus 数必须为正: {n_kraus}")
    unitary = haar_unitary(dim * n_kraus, rng)
    return KrausChannel.from_dilation(unitary, dim=dim)
