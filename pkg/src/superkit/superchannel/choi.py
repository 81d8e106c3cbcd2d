"""
超信道的 Choi 表示

把超信道看作 4 维 Choi 态空间上的线性映射 ω ↦ Σ_a S_a ω S_a†，其 Choi 算符
J = Σ_a |S_a⟩⟩⟨⟨S_a| / 4 为 16×16、迹为 1 的半正定矩阵（第一个因子为输出 Choi 空间）。
凸分解的目标函数直接在 J 上计算迹距离。
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from superkit.core.channels import ChoiState, channel_to_choi, random_kraus_channel
from superkit.superchannel.circuit import SuperchannelKraus
from superkit.utils.linalg import ATOL, PSD_ATOL, is_hermitian

logger = logging.getLogger(__name__)

CHOI_SPACE_DIM = 4
VALIDATION_SAMPLES = 50
VALIDATION_SEED = 20240


@dataclass(frozen=True, eq=False)
class SuperchannelChoi:
    """超信道的 Choi 算符 ω_Ŝ（16×16）

    校验：Hermitian、半正定、迹为 1，以及抽样必要条件：作用在 50 个随机 CPTP
    单比特信道的 Choi 态上得到合法的 Choi 态。完整的因果（comb）约束不做检查。

    Args:
        data: 16×16 复矩阵
        tol: 半正定与抽样检查的容差
        validate: 是否执行抽样检查（优化内循环中关闭）
    """

    data: np.ndarray
    tol: float = field(default=PSD_ATOL, repr=False)
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        size = CHOI_SPACE_DIM * CHOI_SPACE_DIM
        data = np.array(self.data, dtype=complex)
        if data.shape != (size, size):
            raise ValueError(f"超信道 Choi 算符必须是 {size}×{size}: 形状 {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if not self.validate:
            return
        if not is_hermitian(data, max(ATOL, self.tol)):
            raise ValueError("超信道 Choi 算符不是 Hermitian")
        min_eig = np.linalg.eigvalsh((data + data.conj().T) / 2).min()
        if min_eig < -self.tol:
            raise ValueError(f"超信道 Choi 算符不是半正定: 最小本征值 {min_eig:.3e}")
        trace = np.trace(data)
        if abs(trace - 1) > max(ATOL, self.tol):
            raise ValueError(f"超信道 Choi 算符的迹不为 1: {trace:.12f}")

        rng = np.random.default_rng(VALIDATION_SEED)
        for _ in range(VALIDATION_SAMPLES):
            omega = channel_to_choi(random_kraus_channel(rng, dim=2, n_kraus=4))
            try:
                self.apply(omega)
            except ValueError as exc:
                logger.error(f"超信道把 CPTP 信道映射为非法信道: {exc}")
                raise ValueError(f"超信道 Choi 算符未通过抽样 CPTP 检查: {exc}") from exc

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        """Φ(X)[o,o'] = 4 Σ J[o,r,o',r'] X[r,r']"""
        n = CHOI_SPACE_DIM
        tensor = self.data.reshape(n, n, n, n)
        return n * np.einsum("arbs,rs->ab", tensor, x)

    def apply(self, omega: ChoiState) -> ChoiState:
        """由 Choi 算符作用在信道的 Choi 态上"""
        if omega.data.shape != (CHOI_SPACE_DIM, CHOI_SPACE_DIM):
            raise ValueError(f"只支持单比特信道的 Choi 态: 形状 {omega.data.shape}")
        return ChoiState(self.apply_array(omega.data), tol=max(self.tol, omega.tol))

    @classmethod
    def mixture(cls, chois: list["SuperchannelChoi"], weights: list[float]) -> "SuperchannelChoi":
        """凸组合 Σ p_i ω_Ŝi"""
        if len(chois) != len(weights) or not chois:
            raise ValueError("超信道数与权重数不一致")
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
            raise ValueError(f"凸组合权重不合法: {weights}")
        data = sum(w * c.data for w, c in zip(weights, chois))
        return cls(data, tol=max(c.tol for c in chois))


def superchannel_choi_array(s: SuperchannelKraus) -> np.ndarray:
    """J = Σ_a |S_a⟩⟩⟨⟨S_a| / 4（不做校验）"""
    vecs = np.array([k.reshape(-1) for k in s.kraus])
    return vecs.T @ vecs.conj() / s.dim


def superchannel_choi(s: SuperchannelKraus, validate: bool = True) -> SuperchannelChoi:
    if s.dim != CHOI_SPACE_DIM:
        raise ValueError(f"只支持单比特信道上的超信道: S_a 维数 {s.dim}")
    return SuperchannelChoi(superchannel_choi_array(s), tol=s.tol, validate=validate)
