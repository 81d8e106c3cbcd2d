"""
超信道的线路形式

广义极端（gen-extreme）超信道由系统 ⊗ 两比特辅助寄存器上的前置酉 V 与后置酉 W 构成：
辅助寄存器初始为 |00⟩，输入信道只作用在系统上，最后对辅助寄存器求迹。

记 P_m 为 V 中辅助比特 |0⟩ → |m⟩ 的系统块，Q_ma 为 W 中辅助比特 |m⟩ → |a⟩ 的系统块，
则线路实现的输出信道 Kraus 为 F_i^a = Σ_m Q_ma K_i P_m，
于是超信道在 Choi 态上的 Kraus 算符为 S_a = Σ_m Q_ma ⊗ P_mᵀ（普通转置，不取共轭）。

CircuitSuperchannel 允许前后辅助寄存器维数不同：后置酉可以引入新的 |0⟩ 辅助比特
（排在已有辅助比特之后），用于凸分解演示中的 4×4 / 8×8 / 16×16 线路。
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from superkit.core.channels import ChoiState, KrausChannel
from superkit.utils.linalg import (
    PSD_ATOL,
    check_unitary,
    haar_unitary,
    partial_trace,
    tensor_product,
)

logger = logging.getLogger(__name__)

ANCILLA_DIM = 4


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def pre_blocks(pre: np.ndarray, ancilla_dim: int, dim: int = 2) -> np.ndarray:
    """P_m = ⟨m|V|0⟩，形状 (a₁, d, d)"""
    blocks = pre.reshape(dim, ancilla_dim, dim, ancilla_dim)[:, :, :, 0]
    return np.transpose(blocks, (1, 0, 2))


def post_blocks(post: np.ndarray, pre_ancilla_dim: int, post_ancilla_dim: int, dim: int = 2):
    """Q_ma = ⟨a|W|m, 0…⟩，形状 (a₁, a₂, d, d)"""
    extra = post_ancilla_dim // pre_ancilla_dim
    blocks = post.reshape(dim, post_ancilla_dim, dim, post_ancilla_dim)[:, :, :, ::extra]
    # blocks[s', a, s, m]
    return np.transpose(blocks, (3, 1, 0, 2))


def kraus_from_blocks(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """S_a = Σ_m Q_ma ⊗ P_mᵀ，返回形状 (a₂, d², d²)"""
    a2, d = q.shape[1], q.shape[2]
    tensor = np.einsum("maij,mlk->aikjl", q, p)
    return tensor.reshape(a2, d * d, d * d)


@dataclass(frozen=True, eq=False)
class CircuitSuperchannel:
    """一般的线路超信道：前置酉作用于 系统⊗A₁，后置酉作用于 系统⊗A₂

    Args:
        pre: (d·a₁)×(d·a₁) 酉矩阵
        post: (d·a₂)×(d·a₂) 酉矩阵，a₂ 为 a₁ 的整数倍
        pre_ancilla_dim: a₁
        post_ancilla_dim: a₂
        dim: 系统维数 d
        tol: 酉性容差
    """

    pre: np.ndarray
    post: np.ndarray
    pre_ancilla_dim: int
    post_ancilla_dim: int
    dim: int = 2
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        d, a1, a2 = self.dim, self.pre_ancilla_dim, self.post_ancilla_dim
        if a1 < 1 or a2 < a1 or a2 % a1:
            raise ValueError(f"辅助寄存器维数不合法: a₁={a1}, a₂={a2}")
        pre = check_unitary(self.pre, "前置酉 V", atol=self.tol)
        post = check_unitary(self.post, "后置酉 W", atol=self.tol)
        if pre.shape != (d * a1, d * a1):
            raise ValueError(f"前置酉形状 {pre.shape} 应为 {(d * a1, d * a1)}")
        if post.shape != (d * a2, d * a2):
            raise ValueError(f"后置酉形状 {post.shape} 应为 {(d * a2, d * a2)}")
        object.__setattr__(self, "pre", _frozen(pre))
        object.__setattr__(self, "post", _frozen(post))

    def pre_blocks(self) -> np.ndarray:
        return pre_blocks(self.pre, self.pre_ancilla_dim, self.dim)

    def post_blocks(self) -> np.ndarray:
        return post_blocks(self.post, self.pre_ancilla_dim, self.post_ancilla_dim, self.dim)


@dataclass(frozen=True, eq=False)
class GenExtremeSuperchannel:
    """单比特广义极端超信道的线路形式

    Args:
        V: 8×8 前置酉（系统 ⊗ 两比特辅助）
        W: 8×8 后置酉（系统 ⊗ 两比特辅助）
        tol: 酉性容差
    """

    V: np.ndarray
    W: np.ndarray
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        size = 2 * ANCILLA_DIM
        for name in ("V", "W"):
            mat = check_unitary(getattr(self, name), name, atol=self.tol)
            if mat.shape != (size, size):
                raise ValueError(f"{name} 必须是 {size}×{size}: 形状 {mat.shape}")
            object.__setattr__(self, name, _frozen(mat))

    def as_circuit(self) -> CircuitSuperchannel:
        return CircuitSuperchannel(self.V, self.W, ANCILLA_DIM, ANCILLA_DIM, tol=self.tol)


@dataclass(frozen=True, eq=False)
class SuperchannelKraus:
    """超信道在 Choi 态空间上的 Kraus 算符 {S_a}（下标 a 为辅助寄存器的测量结果）

    {S_a} 作为 d²×d² 算符不是保迹的：Σ_a S_a†S_a = 1 ⊗ M，其中 M = (Σ_m P_m P_m†)*
    作用在参考因子上且 Tr M = d。由于 Choi 态的参考约化恒为 1/d，
    Tr Ŝ(ω) = Tr(M)/d = 1 对所有 Choi 态成立。
    """

    kraus: tuple[np.ndarray, ...]
    tol: float = field(default=PSD_ATOL, repr=False)

    def __post_init__(self):
        ops = tuple(_frozen(k) for k in self.kraus)
        if not ops:
            raise ValueError("超信道 Kraus 列表不能为空")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(k.shape != shape for k in ops):
            raise ValueError(f"超信道 Kraus 形状不一致: {[k.shape for k in ops]}")
        d = int(round(np.sqrt(shape[0])))
        if d * d != shape[0]:
            raise ValueError(f"超信道 Kraus 维数 {shape[0]} 不是平方数")
        total = sum(k.conj().T @ k for k in ops)
        m = self._reference_operator(total, d)
        error = float(np.max(np.abs(total - tensor_product(np.eye(d), m))))
        if error > self.tol:
            raise ValueError(f"超信道 Kraus 不满足 Σ S_a†S_a = 1 ⊗ M (偏差 {error:.3e})")
        trace_error = abs(np.trace(m) - d)
        if trace_error > self.tol:
            raise ValueError(f"超信道 Kraus 不保 Choi 态的迹: Tr M = {np.trace(m).real:.6g}, 应为 {d}")
        object.__setattr__(self, "kraus", ops)

    @staticmethod
    def _reference_operator(total: np.ndarray, d: int) -> np.ndarray:
        return partial_trace(total, [d, d], keep=[1]) / d

    @property
    def dim(self) -> int:
        """作用空间（Choi 态空间）的维数"""
        return self.kraus[0].shape[0]

    def reference_operator(self) -> np.ndarray:
        """Σ_a S_a†S_a = 1 ⊗ M 中的 M"""
        d = int(round(np.sqrt(self.dim)))
        return self._reference_operator(sum(k.conj().T @ k for k in self.kraus), d)


def _as_circuit(g: GenExtremeSuperchannel | CircuitSuperchannel) -> CircuitSuperchannel:
    return g.as_circuit() if isinstance(g, GenExtremeSuperchannel) else g


def circuit_to_kraus(g: GenExtremeSuperchannel | CircuitSuperchannel) -> SuperchannelKraus:
    """S_a = Σ_m K_w^{ma} ⊗ K_v^m（W 块作用在输出因子，V 块作用在参考因子）"""
    circuit = _as_circuit(g)
    kraus = kraus_from_blocks(circuit.pre_blocks(), circuit.post_blocks())
    return SuperchannelKraus(tuple(kraus), tol=circuit.tol)


def act_on_choi(s: SuperchannelKraus, omega: ChoiState) -> ChoiState:
    """Ŝ(ω_ℰ) = Σ_a S_a ω_ℰ S_a†

    Raises:
        ValueError: 维数不匹配，或输出违反 Choi 态不变量
    """
    if s.dim != omega.data.shape[0]:
        raise ValueError(f"维数不匹配: 超信道 {s.dim}, Choi 态 {omega.data.shape[0]}")
    out = sum(k @ omega.data @ k.conj().T for k in s.kraus)
    return ChoiState(out, tol=max(s.tol, omega.tol))


def output_channel(
    g: GenExtremeSuperchannel | CircuitSuperchannel,
    input_channel: KrausChannel,
) -> KrausChannel:
    """输出信道的 Kraus 算符 F_i^a = Σ_m K_w^{ma} K_i K_v^{m,t}

    Raises:
        ValueError: 输入信道维数与超信道系统维数不一致
    """
    circuit = _as_circuit(g)
    d = circuit.dim
    if input_channel.dim_in != d or input_channel.dim_out != d:
        raise ValueError(
            f"维数不匹配: 超信道系统维数 {d}, "
            f"输入信道 {input_channel.dim_out}×{input_channel.dim_in}"
        )
    p = circuit.pre_blocks()
    q = circuit.post_blocks()
    kraus = []
    for k in input_channel.kraus:
        for a in range(circuit.post_ancilla_dim):
            kraus.append(sum(q[m, a] @ k @ p[m] for m in range(circuit.pre_ancilla_dim)))
    return KrausChannel(tuple(kraus), tol=max(circuit.tol, input_channel.tol)).pruned()


def dephasing_superchannel(
    v1: np.ndarray,
    v2: np.ndarray,
    w1: np.ndarray,
    w2: np.ndarray,
    tol: float = PSD_ATOL,
) -> GenExtremeSuperchannel:
    """由受控 V_i、受控 W_i 构造退相位超信道

    系统比特为控制位（|0⟩ 选择下标 1，|1⟩ 选择下标 2），两比特辅助寄存器为目标：
    V = |0⟩⟨0| ⊗ v1 + |1⟩⟨1| ⊗ v2，W = |0⟩⟨0| ⊗ w1 + |1⟩⟨1| ⊗ w2。

    Raises:
        ValueError: 任一输入不是 4×4 酉矩阵
    """
    blocks = []
    for name, mat in (("V₁", v1), ("V₂", v2), ("W₁", w1), ("W₂", w2)):
        mat = check_unitary(mat, name, atol=tol)
        if mat.shape != (ANCILLA_DIM, ANCILLA_DIM):
            raise ValueError(f"{name} 必须是 4×4: 形状 {mat.shape}")
        blocks.append(mat)
    v1, v2, w1, w2 = blocks
    proj0 = np.diag([1, 0]).astype(complex)
    proj1 = np.diag([0, 1]).astype(complex)
    v = tensor_product(proj0, v1) + tensor_product(proj1, v2)
    w = tensor_product(proj0, w1) + tensor_product(proj1, w2)
    return GenExtremeSuperchannel(v, w, tol=tol)


def random_gen_extreme(seed: int | np.random.Generator) -> GenExtremeSuperchannel:
    """Haar 随机的 V、W（给定种子时确定）"""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    v = haar_unitary(2 * ANCILLA_DIM, rng)
    w = haar_unitary(2 * ANCILLA_DIM, rng)
    return GenExtremeSuperchannel(v, w)


def identity_superchannel() -> GenExtremeSuperchannel:
    size = 2 * ANCILLA_DIM
    return GenExtremeSuperchannel(np.eye(size), np.eye(size))
