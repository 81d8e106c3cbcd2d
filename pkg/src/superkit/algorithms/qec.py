"""
振幅阻尼噪声下的纠缠辅助纠错码

三个量子比特：比特 1 携带逻辑态，比特 2、3 预先共享纠缠对 (|00⟩+|11⟩)/√2。
编码酉 E_A 只作用在发送方持有的比特 1、2 上（比特 3 为接收方持有、无噪声的一半），
振幅阻尼噪声以给定概率作用在比特 1 或比特 2 上，解码为 8×8 任意酉矩阵，输出为比特 1。

码的搜索在编码与解码酉矩阵上最大化纠缠保真度 F_e = Σ|Tr K_i|²/d²。
同一搜索器对一组阻尼参数 λ 给出保真度曲线。文献中阻尼参数也记作 γ，这里统一用 λ。
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from superkit.algorithms.optimizer import MultiStartOptimizer, OptimizationResult, OptimizerConfig
from superkit.core.channels import KrausChannel
from superkit.utils.linalg import (
    PSD_ATOL,
    check_unitary,
    embed_operator,
    haar_unitary,
    params_from_unitary,
    unitary_from_params,
)

logger = logging.getLogger(__name__)

N_QUBITS = 3
CODE_DIM = 2 ** N_QUBITS
ALICE_DIM = 4
N_CODE_PARAMS = ALICE_DIM ** 2 + CODE_DIM ** 2
# 有噪声的比特只能是发送方的比特 1、2（下标 0、1）
NOISY_QUBITS = (0, 1)
DEFAULT_NOISE_MODEL = {0: 0.5, 1: 0.5}

EBIT = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
# |ψ⟩ ↦ |ψ⟩ ⊗ (|00⟩+|11⟩)/√2
EBIT_EMBEDDING = np.kron(np.eye(2), EBIT[:, None])


def _check_lambda(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"阻尼参数 λ 必须在 [0, 1] 内: {lam}")
    return float(lam)


@dataclass(frozen=True)
class ADChannel:
    """振幅阻尼信道，K₀ = diag(1, √(1−λ))，K₁ = √λ |0⟩⟨1|"""

    lam: float

    def __post_init__(self):
        _check_lambda(self.lam)

    def kraus_operators(self) -> tuple[np.ndarray, np.ndarray]:
        k0 = np.array([[1, 0], [0, np.sqrt(1 - self.lam)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(self.lam)], [0, 0]], dtype=complex)
        return k0, k1

    def channel(self) -> KrausChannel:
        return KrausChannel(self.kraus_operators())

    def uncorrected_fidelity(self) -> float:
        """((1 + √(1−λ))/2)²"""
        return float(((1 + np.sqrt(1 - self.lam)) / 2) ** 2)


def ad_kraus(lam: float) -> KrausChannel:
    """振幅阻尼信道的两个 Kraus 算符（λ = 0 时 K₁ 为零矩阵）

    Raises:
        ValueError: λ 不在 [0, 1] 内
    """
    return ADChannel(lam).channel()


def entanglement_fidelity(ch: KrausChannel) -> float:
    """F_e = ⟨ω|(ℰ⊗1)(|ω⟩⟨ω|)|ω⟩ = Σ_i |Tr K_i|² / 4

    Raises:
        ValueError: 非单比特信道
    """
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise ValueError(f"纠缠保真度只对单比特信道定义: {ch.dim_out}×{ch.dim_in}")
    return float(sum(abs(np.trace(k)) ** 2 for k in ch.kraus) / 4)


@dataclass(frozen=True, eq=False)
class EbitCode:
    """纠缠辅助码

    Args:
        encoder: 8×8 编码酉，形如 E_A ⊗ 1（对比特 3 平凡）
        decoder: 8×8 解码酉
        noise_model: {比特下标: 概率}，下标 0 为逻辑比特，1 为发送方的纠缠比特
    """

    encoder: np.ndarray
    decoder: np.ndarray
    noise_model: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_NOISE_MODEL))

    def __post_init__(self):
        encoder = check_unitary(self.encoder, "编码酉")
        decoder = check_unitary(self.decoder, "解码酉")
        for name, mat in (("编码酉", encoder), ("解码酉", decoder)):
            if mat.shape != (CODE_DIM, CODE_DIM):
                raise ValueError(f"{name}必须是 {CODE_DIM}×{CODE_DIM}: 形状 {mat.shape}")
        alice = encoder.reshape(ALICE_DIM, 2, ALICE_DIM, 2)[:, 0, :, 0]
        if np.max(np.abs(np.kron(alice, np.eye(2)) - encoder)) > PSD_ATOL:
            raise ValueError("编码酉必须对接收方的比特 3 平凡作用")

        noise = {int(q): float(p) for q, p in self.noise_model.items()}
        if any(q not in NOISY_QUBITS for q in noise):
            raise ValueError(f"噪声只能作用在比特 {NOISY_QUBITS} 上: {sorted(noise)}")
        if any(p < 0 for p in noise.values()) or abs(sum(noise.values()) - 1) > 1e-12:
            raise ValueError(f"噪声模型概率必须非负且和为 1: {noise}")
        object.__setattr__(self, "encoder", encoder)
        object.__setattr__(self, "decoder", decoder)
        object.__setattr__(self, "noise_model", noise)

    @property
    def alice_encoder(self) -> np.ndarray:
        return self.encoder.reshape(ALICE_DIM, 2, ALICE_DIM, 2)[:, 0, :, 0]

    @classmethod
    def from_alice_unitary(
        cls,
        alice_encoder: np.ndarray,
        decoder: np.ndarray,
        noise_model: Optional[dict[int, float]] = None,
    ) -> "EbitCode":
        alice_encoder = check_unitary(alice_encoder, "发送方编码酉")
        if alice_encoder.shape != (ALICE_DIM, ALICE_DIM):
            raise ValueError(f"发送方编码酉必须是 4×4: 形状 {alice_encoder.shape}")
        return cls(
            np.kron(alice_encoder, np.eye(2)),
            decoder,
            dict(DEFAULT_NOISE_MODEL if noise_model is None else noise_model),
        )

    @classmethod
    def trivial(cls, noise_model: Optional[dict[int, float]] = None) -> "EbitCode":
        """编码与解码均为恒等"""
        return cls.from_alice_unitary(np.eye(ALICE_DIM), np.eye(CODE_DIM), noise_model)

    def with_noise_model(self, noise_model: dict[int, float]) -> "EbitCode":
        return EbitCode(self.encoder, self.decoder, dict(noise_model))


def _effective_kraus(
    encoder: np.ndarray,
    decoder: np.ndarray,
    noise_model: dict[int, float],
    lam: float,
) -> list[np.ndarray]:
    """√p (1 ⊗ ⟨j|) D N_k E J"""
    encoded = encoder @ EBIT_EMBEDDING
    kraus = []
    for qubit, prob in sorted(noise_model.items()):
        if prob == 0:
            continue
        for ad in ADChannel(lam).kraus_operators():
            full = decoder @ embed_operator(ad, [qubit], N_QUBITS) @ encoded
            blocks = full.reshape(2, ALICE_DIM, 2)
            kraus.extend(np.sqrt(prob) * blocks[:, j, :] for j in range(ALICE_DIM))
    return kraus


def corrected_channel(code: EbitCode, lam: float) -> KrausChannel:
    """编码、噪声、解码之后逻辑比特上的有效信道

    Raises:
        ValueError: λ 不在 [0, 1] 内
    """
    lam = _check_lambda(lam)
    kraus = _effective_kraus(code.encoder, code.decoder, code.noise_model, lam)
    return KrausChannel(tuple(kraus)).pruned()


@dataclass(frozen=True)
class CodeSearchResult:
    """一个 λ 上的码搜索结果"""

    lam: float
    code: EbitCode
    fidelity: float
    uncorrected: float
    converged: bool


class EbitCodeSearch:
    """纠缠辅助码搜索

    参数向量为 [E_A 的 16 个生成元参数, 解码酉的 64 个生成元参数]，目标为 −F_e。
    平凡码（全零参数）始终作为起点之一，因此结果不差于平凡码。

    Args:
        config: 优化器配置
        noise_model: 噪声模型，默认两处等概率

    Examples:
        >>> search = EbitCodeSearch(OptimizerConfig(seed=3, restarts=1))
        >>> code = search.optimize_code(0.2)
        >>> entanglement_fidelity(corrected_channel(code, 0.2))
    """

    def __init__(
        self,
        config: Optional[OptimizerConfig] = None,
        noise_model: Optional[dict[int, float]] = None,
    ):
        self.config = config or OptimizerConfig(restarts=2, max_iters=500)
        self.noise_model = dict(DEFAULT_NOISE_MODEL if noise_model is None else noise_model)
        self.last_result: Optional[OptimizationResult] = None
        self._objective_calls = 0
        logger.debug(f"初始化 EbitCodeSearch: 噪声模型 {self.noise_model}")

    def unpack(self, params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        params = np.asarray(params, dtype=float)
        if params.shape != (N_CODE_PARAMS,):
            raise ValueError(f"参数向量长度应为 {N_CODE_PARAMS}: 实际形状 {params.shape}")
        alice = unitary_from_params(params[:ALICE_DIM ** 2], ALICE_DIM)
        decoder = unitary_from_params(params[ALICE_DIM ** 2:], CODE_DIM)
        return np.kron(alice, np.eye(2)), decoder

    def pack(self, code: EbitCode) -> np.ndarray:
        return np.concatenate([
            params_from_unitary(code.alice_encoder),
            params_from_unitary(code.decoder),
        ])

    def fidelity(self, params: np.ndarray, lam: float) -> float:
        encoder, decoder = self.unpack(params)
        kraus = _effective_kraus(encoder, decoder, self.noise_model, lam)
        return float(sum(abs(np.trace(k)) ** 2 for k in kraus) / 4)

    def objective(self, params: np.ndarray, lam: float) -> float:
        """−F_e"""
        self._objective_calls += 1
        return -self.fidelity(params, lam)

    def _random_params(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate([
            params_from_unitary(haar_unitary(ALICE_DIM, rng)),
            params_from_unitary(haar_unitary(CODE_DIM, rng)),
        ])

    def optimize_code(
        self,
        lam: float,
        warm_starts: tuple[EbitCode, ...] = (),
        config: Optional[OptimizerConfig] = None,
    ) -> EbitCode:
        """在给定 λ 下搜索使 F_e 最大的码

        Args:
            lam: 阻尼参数
            warm_starts: 额外的起点（例如相邻 λ 上找到的码）
            config: 覆盖构造时的配置

        Returns:
            最优码；收敛信息与达到的 F_e 见 last_result
        """
        lam = _check_lambda(lam)
        config = config or self.config
        starts = (np.zeros(N_CODE_PARAMS),) + tuple(self.pack(c) for c in warm_starts)
        optimizer = MultiStartOptimizer(config)
        result = optimizer.minimize(
            lambda x: self.objective(x, lam),
            self._random_params,
            fixed_starts=starts,
            target=-np.inf,
        )
        self.last_result = result
        encoder, decoder = self.unpack(result.x)
        logger.debug(f"λ={lam:.3f}: F_e = {-result.score:.6f}, 收敛 {result.success}")
        return EbitCode(encoder, decoder, dict(self.noise_model))

    def search(self, lam: float, warm_starts: tuple[EbitCode, ...] = (), config=None):
        """optimize_code 并整理为 CodeSearchResult"""
        code = self.optimize_code(lam, warm_starts, config)
        return CodeSearchResult(
            lam=float(lam),
            code=code,
            fidelity=entanglement_fidelity(corrected_channel(code, lam)),
            uncorrected=ADChannel(lam).uncorrected_fidelity(),
            converged=bool(self.last_result.success),
        )

    def fidelity_curve(self, lambdas: list[float]) -> pd.DataFrame:
        """F_e 随 λ 的曲线

        每个 λ 以前一个 λ 的码热启动；之后把各 λ 上找到的码互相代入，取最好者。

        Returns:
            列为 lambda, f_corrected, f_uncorrected, converged 以及 f_noise_qubit_<q> 的表；
            后者是同一个码在噪声固定作用于比特 q 时的 F_e
        """
        lambdas = [_check_lambda(lam) for lam in lambdas]
        logger.info(f"开始纠错码扫描: {len(lambdas)} 个 λ, 种子 {self.config.seed}")
        seeds = np.random.SeedSequence(self.config.seed).spawn(len(lambdas))

        results: list[CodeSearchResult] = []
        previous: tuple[EbitCode, ...] = ()
        for lam, seed in tqdm(
            list(zip(lambdas, seeds)),
            desc="λ 扫描",
            disable=not self.config.show_progress,
        ):
            config = replace(self.config, seed=int(seed.generate_state(1)[0]))
            result = self.search(lam, previous, config)
            results.append(result)
            previous = (result.code,)

        location_columns = [f"f_noise_qubit_{q}" for q in NOISY_QUBITS]
        rows = []
        for result in results:
            best = result
            for other in results:
                f = entanglement_fidelity(corrected_channel(other.code, result.lam))
                if f > best.fidelity:
                    best = replace(result, code=other.code, fidelity=f)
            row = {
                "lambda": best.lam,
                "f_corrected": best.fidelity,
                "f_uncorrected": best.uncorrected,
                "converged": best.converged,
            }
            # 同一个码在噪声固定落在某一比特上时的 F_e
            for qubit, column in zip(NOISY_QUBITS, location_columns):
                located = best.code.with_noise_model({qubit: 1.0})
                row[column] = entanglement_fidelity(corrected_channel(located, best.lam))
            rows.append(row)

        columns = ["lambda", "f_corrected", "f_uncorrected", "converged", *location_columns]
        df = pd.DataFrame(rows, columns=columns)
        logger.info(f"纠错码扫描结束: 平均提升 {(df.f_corrected - df.f_uncorrected).mean():.4f}")
        return df

    def get_statistics(self) -> dict[str, float]:
        stats = {"objective_calls": self._objective_calls}
        if self.last_result is not None:
            stats["fidelity"] = -self.last_result.score
            stats["evaluations"] = self.last_result.n_evaluations
        return stats


def optimize_code(lam: float, config: Optional[OptimizerConfig] = None) -> EbitCode:
    return EbitCodeSearch(config).optimize_code(lam)


def fidelity_curve(lambdas: list[float], config: Optional[OptimizerConfig] = None) -> pd.DataFrame:
    return EbitCodeSearch(config).fidelity_curve(lambdas)
