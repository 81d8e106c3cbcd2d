"""
超信道的凸分解

把任意单比特超信道的 Choi 算符 ω_Ŝ 近似为 Σ p_i ω_Ŝi，其中每个 Ŝ_i 为广义极端超信道，
通过最小化迹距离 d(ω_Ŝ, Σ p_i ω_Ŝi) 求得。

参数化：
- 每个 8×8 酉矩阵写成 exp(iH)，H 由 64 个实数给出（UnitaryParams）；
- 权重为 softmax([0, z₁, …, z_{n−1}])，自动落在单纯形上；
- 参数向量排列为 [V₁, W₁, V₂, W₂, …, z]，长度 n·128 + n − 1。

L-BFGS-B 在 Frobenius 距离的平方上做局部搜索（解析梯度），各起点的结果按迹距离比较；
Nelder-Mead 直接最小化迹距离。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from superkit.algorithms.optimizer import MultiStartOptimizer, OptimizerConfig
from superkit.core.metrics import trace_distance
from superkit.superchannel.choi import SuperchannelChoi, superchannel_choi
from superkit.superchannel.circuit import (
    ANCILLA_DIM,
    GenExtremeSuperchannel,
    circuit_to_kraus,
    kraus_from_blocks,
    post_blocks,
    pre_blocks,
)
from superkit.utils.linalg import (
    expm_hermitian_adjoint,
    haar_unitary,
    hermitian_from_params,
    hermitian_params_gradient,
    params_from_unitary,
    unitary_from_params,
)

logger = logging.getLogger(__name__)

UNITARY_DIM = 2 * ANCILLA_DIM
N_UNITARY_PARAMS = UNITARY_DIM * UNITARY_DIM
MAX_COMPONENTS = 4


@dataclass(frozen=True, eq=False)
class UnitaryParams:
    """exp(iH) 参数化的 8×8 酉矩阵（64 个实数）"""

    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=float).reshape(-1)
        if thetas.shape != (N_UNITARY_PARAMS,):
            raise ValueError(f"酉矩阵参数长度应为 {N_UNITARY_PARAMS}: {thetas.shape}")
        thetas.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)

    def unitary(self) -> np.ndarray:
        return unitary_from_params(self.thetas, UNITARY_DIM)

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "UnitaryParams":
        return cls(params_from_unitary(u))


@dataclass(frozen=True, eq=False)
class ConvexDecomposition:
    """凸分解结果 Σ p_i Ŝ_i

    Args:
        weights: 非负权重，和为 1
        components: 1 到 4 个广义极端超信道
        achieved_distance: 与目标 Choi 算符的迹距离
        converged: 是否达到配置的容差
        seed: 产生该结果的随机种子
    """

    weights: tuple[float, ...]
    components: tuple[GenExtremeSuperchannel, ...]
    achieved_distance: float = 0.0
    converged: bool = True
    seed: Optional[int] = None

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        components = tuple(self.components)
        if not 1 <= len(components) <= MAX_COMPONENTS:
            raise ValueError(f"分量数必须在 1 到 {MAX_COMPONENTS} 之间: {len(components)}")
        if len(weights) != len(components):
            raise ValueError(f"权重数 {len(weights)} 与分量数 {len(components)} 不一致")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
            raise ValueError(f"权重必须非负且和为 1: {weights}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def distance_to(self, target: SuperchannelChoi) -> float:
        return trace_distance(target, reconstruct(self))


def reconstruct(d: ConvexDecomposition) -> SuperchannelChoi:
    """Σ p_i ω_Ŝi"""
    chois = [superchannel_choi(circuit_to_kraus(c), validate=False) for c in d.components]
    data = sum(w * c.data for w, c in zip(d.weights, chois))
    return SuperchannelChoi(data, tol=max(c.tol for c in d.components))


def softmax_weights(z: np.ndarray) -> np.ndarray:
    """p = softmax([0, z])"""
    logits = np.concatenate([[0.0], np.asarray(z, dtype=float)])
    logits -= logits.max()
    p = np.exp(logits)
    return p / p.sum()


def simplex_coordinates(weights: np.ndarray) -> np.ndarray:
    """softmax_weights 的逆；要求 p₀ > 0"""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0):
        raise ValueError(f"权重必须严格为正才能取对数坐标: {weights}")
    return np.log(weights[1:] / weights[0])


class ConvexDecomposer:
    """凸分解算法

    对给定的目标 Choi 算符，在 n 个广义极端超信道及其权重上最小化迹距离。

    Args:
        target: 目标超信道的 Choi 算符
        n_components: 分量数（1 到 4）
        config: 优化器配置

    Examples:
        >>> decomposer = ConvexDecomposer(target, n_components=2, config=OptimizerConfig(seed=7))
        >>> result = decomposer.decompose()
        >>> print(result.weights, result.achieved_distance)
    """

    def __init__(
        self,
        target: SuperchannelChoi,
        n_components: int,
        config: Optional[OptimizerConfig] = None,
    ):
        if not 1 <= n_components <= MAX_COMPONENTS:
            raise ValueError(f"分量数必须在 1 到 {MAX_COMPONENTS} 之间: {n_components}")
        self.target = target
        self.n_components = n_components
        self.config = config or OptimizerConfig()
        self._target = np.asarray(target.data)

        # 统计计数器
        self._objective_calls = 0
        self._gradient_calls = 0
        self._best_initial = float("inf")

        logger.debug(f"初始化 ConvexDecomposer: {n_components} 个分量, 参数 {self.n_params} 个")

    @property
    def n_params(self) -> int:
        return self.n_components * 2 * N_UNITARY_PARAMS + self.n_components - 1

    def _check_params(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"参数向量长度应为 {self.n_params}: 实际形状 {params.shape}")
        return params

    def unpack(self, params: np.ndarray) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """参数向量 → ([(V_i, W_i)], 权重)"""
        params = self._check_params(params)
        pairs = []
        for c in range(self.n_components):
            base = 2 * c * N_UNITARY_PARAMS
            v = unitary_from_params(params[base:base + N_UNITARY_PARAMS], UNITARY_DIM)
            w = unitary_from_params(
                params[base + N_UNITARY_PARAMS:base + 2 * N_UNITARY_PARAMS], UNITARY_DIM
            )
            pairs.append((v, w))
        weights = softmax_weights(params[self.n_components * 2 * N_UNITARY_PARAMS:])
        return pairs, weights

    def pack(self, pairs: list[tuple[np.ndarray, np.ndarray]], weights: np.ndarray) -> np.ndarray:
        """([(V_i, W_i)], 权重) → 参数向量"""
        if len(pairs) != self.n_components or len(weights) != self.n_components:
            raise ValueError("分量数与分解器配置不一致")
        parts = []
        for v, w in pairs:
            parts.append(params_from_unitary(v))
            parts.append(params_from_unitary(w))
        parts.append(simplex_coordinates(weights))
        return np.concatenate(parts)

    def reconstruct_array(self, params: np.ndarray) -> np.ndarray:
        pairs, weights = self.unpack(params)
        return sum(p * _component_choi(v, w) for (v, w), p in zip(pairs, weights))

    def objective(self, params: np.ndarray) -> float:
        """目标与重构之间的迹距离

        Raises:
            ValueError: 参数向量长度不对
        """
        self._objective_calls += 1
        return trace_distance(self._target, self.reconstruct_array(params))

    def surrogate(self, params: np.ndarray) -> tuple[float, np.ndarray]:
        """‖J(θ) − J_target‖_F² 及其解析梯度"""
        params = self._check_params(params)
        self._gradient_calls += 1
        n = self.n_components
        n_unitary = n * 2 * N_UNITARY_PARAMS
        weights = softmax_weights(params[n_unitary:])

        cache = []
        recon = np.zeros_like(self._target)
        for c in range(n):
            base = 2 * c * N_UNITARY_PARAMS
            eig_v = np.linalg.eigh(
                hermitian_from_params(params[base:base + N_UNITARY_PARAMS], UNITARY_DIM)
            )
            eig_w = np.linalg.eigh(
                hermitian_from_params(
                    params[base + N_UNITARY_PARAMS:base + 2 * N_UNITARY_PARAMS], UNITARY_DIM
                )
            )
            v = (eig_v[1] * np.exp(1j * eig_v[0])) @ eig_v[1].conj().T
            w = (eig_w[1] * np.exp(1j * eig_w[0])) @ eig_w[1].conj().T
            p_blocks = pre_blocks(v, ANCILLA_DIM)
            q_blocks = post_blocks(w, ANCILLA_DIM, ANCILLA_DIM)
            s = kraus_from_blocks(p_blocks, q_blocks).reshape(ANCILLA_DIM, -1)
            choi = s.T @ s.conj() / ANCILLA_DIM
            recon += weights[c] * choi
            cache.append((eig_v, eig_w, p_blocks, q_blocks, s, choi))

        residual = recon - self._target
        value = float(np.sum(np.abs(residual) ** 2))

        grad = np.zeros(self.n_params)
        weight_grad = np.zeros(n)
        for c, (eig_v, eig_w, p_blocks, q_blocks, s, choi) in enumerate(cache):
            weight_grad[c] = 2 * float(np.real(np.trace(residual @ choi)))
            g = (weights[c] * (s @ residual.T)).reshape(ANCILLA_DIM, 2, 2, 2, 2)
            gamma_p = np.einsum("aikjl,maij->mlk", g, q_blocks.conj())
            gamma_q = np.einsum("aikjl,mlk->maij", g, p_blocks.conj())

            gamma_v = np.zeros((2, ANCILLA_DIM, 2, ANCILLA_DIM), dtype=complex)
            gamma_v[:, :, :, 0] = np.transpose(gamma_p, (1, 0, 2))
            gamma_w = np.transpose(gamma_q, (2, 1, 3, 0))

            base = 2 * c * N_UNITARY_PARAMS
            for offset, (evals, evecs), gamma in (
                (0, eig_v, gamma_v),
                (N_UNITARY_PARAMS, eig_w, gamma_w),
            ):
                adjoint = expm_hermitian_adjoint(
                    evals, evecs, gamma.reshape(UNITARY_DIM, UNITARY_DIM), -1.0
                )
                grad[base + offset:base + offset + N_UNITARY_PARAMS] = hermitian_params_gradient(
                    adjoint
                )

        # softmax 链式法则，z_j 对应 weights[j]（j ≥ 1）
        mean = float(weights @ weight_grad)
        grad[n_unitary:] = weights[1:] * (weight_grad[1:] - mean)
        return value, grad

    def random_params(self, rng: np.random.Generator) -> np.ndarray:
        pairs = [
            (haar_unitary(UNITARY_DIM, rng), haar_unitary(UNITARY_DIM, rng))
            for _ in range(self.n_components)
        ]
        weights = np.full(self.n_components, 1.0 / self.n_components)
        return self.pack(pairs, weights)

    def decompose(self, initial: Optional[list[np.ndarray]] = None) -> ConvexDecomposition:
        """多起点搜索凸分解

        Args:
            initial: 额外的确定起点（参数向量），先于随机起点尝试

        Returns:
            迹距离最小的分解；未达到容差时 converged=False
        """
        config = self.config
        logger.info(
            f"开始凸分解: {self.n_components} 个分量, 方法 {config.method}, "
            f"起点 {config.restarts}, 种子 {config.seed}"
        )
        self._objective_calls = 0
        self._gradient_calls = 0

        optimizer = MultiStartOptimizer(config)
        if config.method == "nelder-mead":
            result = optimizer.minimize(
                self.objective,
                self.random_params,
                fixed_starts=tuple(initial or ()),
            )
        else:
            result = optimizer.minimize(
                self.surrogate,
                self.random_params,
                jac=True,
                score=self.objective,
                fixed_starts=tuple(initial or ()),
            )
        self._best_initial = result.best_initial

        pairs, weights = self.unpack(result.x)
        # 去掉 softmax 的舍入误差，使权重严格和为 1
        weights = weights / weights.sum()
        components = tuple(GenExtremeSuperchannel(v, w) for v, w in pairs)
        decomposition = ConvexDecomposition(
            weights=tuple(weights),
            components=components,
            achieved_distance=result.score,
            converged=result.converged,
            seed=config.seed,
        )
        logger.info(
            f"凸分解结束: 迹距离 {result.score:.3e}, 收敛 {result.converged}, "
            f"权重 {np.round(weights, 4).tolist()}"
        )
        return decomposition

    def get_statistics(self) -> dict[str, float]:
        """获取最近一次分解的统计信息"""
        return {
            "objective_calls": self._objective_calls,
            "gradient_calls": self._gradient_calls,
            "best_initial_distance": self._best_initial,
        }


def _component_choi(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    s = kraus_from_blocks(pre_blocks(v, ANCILLA_DIM), post_blocks(w, ANCILLA_DIM, ANCILLA_DIM))
    s = s.reshape(ANCILLA_DIM, -1)
    return s.T @ s.conj() / ANCILLA_DIM


def objective(params: np.ndarray, target: SuperchannelChoi, n_components: int) -> float:
    """迹距离目标函数（参数布局见模块说明）"""
    return ConvexDecomposer(target, n_components).objective(params)


def decompose(
    target: SuperchannelChoi,
    n_components: int,
    config: Optional[OptimizerConfig] = None,
) -> ConvexDecomposition:
    return ConvexDecomposer(target, n_components, config).decompose()
