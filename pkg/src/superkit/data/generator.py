"""
测试数据生成器

按种子生成随机量子态、信道、超信道以及凸分解的测试目标。
"""

import logging
from typing import Any, Optional, Sequence

import numpy as np

from superkit.algorithms.qec import ad_kraus
from superkit.core.channels import KrausChannel, random_kraus_channel
from superkit.core.states import BlochVector, DensityMatrix
from superkit.superchannel.choi import SuperchannelChoi, superchannel_choi
from superkit.superchannel.circuit import (
    GenExtremeSuperchannel,
    circuit_to_kraus,
    identity_superchannel,
    random_gen_extreme,
)
from superkit.utils.linalg import X, Z

logger = logging.getLogger(__name__)


def _rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


class ChannelGenerator:
    """随机测试对象生成器

    Examples:
        >>> rho = ChannelGenerator.generate_state(seed=1)
        >>> channel = ChannelGenerator.generate_channel(seed=2)
        >>> target, weights, parts = ChannelGenerator.generate_mixture_target(seed=3)
    """

    @staticmethod
    def generate_state(seed: int | np.random.Generator | None = None) -> DensityMatrix:
        """Bloch 球内均匀分布的单比特混合态"""
        rng = _rng(seed)
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        radius = rng.uniform() ** (1 / 3)
        return DensityMatrix.from_bloch(BlochVector(*(radius * direction)))

    @staticmethod
    def generate_states(n: int, seed: int | None = None) -> list[DensityMatrix]:
        rng = _rng(seed)
        return [ChannelGenerator.generate_state(rng) for _ in range(n)]

    @staticmethod
    def generate_channel(
        seed: int | np.random.Generator | None = None,
        n_kraus: int = 2,
    ) -> KrausChannel:
        """Haar 随机扩张得到的单比特信道"""
        return random_kraus_channel(_rng(seed), dim=2, n_kraus=n_kraus)

    @staticmethod
    def generate_channels(n: int, seed: int | None = None, n_kraus: int = 2) -> list[KrausChannel]:
        rng = _rng(seed)
        channels = [ChannelGenerator.generate_channel(rng, n_kraus) for _ in range(n)]
        logger.debug(f"生成 {n} 个随机信道 (Kraus 数 {n_kraus})")
        return channels

    @staticmethod
    def generate_superchannel(
        seed: int | np.random.Generator | None = None,
    ) -> GenExtremeSuperchannel:
        return random_gen_extreme(_rng(seed))

    @staticmethod
    def generate_mixture_target(
        seed: int | None = None,
        n_components: int = 2,
        weights: Optional[Sequence[float]] = None,
    ) -> tuple[SuperchannelChoi, np.ndarray, list[GenExtremeSuperchannel]]:
        """随机广义极端超信道的凸组合，未给定权重时从 Dirichlet(1,…,1) 抽取

        Returns:
            (目标 Choi 算符, 权重, 分量)
        """
        if n_components < 1:
            raise ValueError(f"分量数必须为正: {n_components}")
        rng = _rng(seed)
        parts = [random_gen_extreme(rng) for _ in range(n_components)]
        if weights is None:
            weights = rng.dirichlet(np.ones(n_components))
        else:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (n_components,) or np.any(weights < 0) or weights.sum() <= 0:
                raise ValueError(f"权重必须是 {n_components} 个非负数: {weights}")
        weights = weights / weights.sum()
        chois = [superchannel_choi(circuit_to_kraus(p), validate=False) for p in parts]
        target = SuperchannelChoi.mixture(chois, list(weights))
        logger.debug(f"生成 {n_components} 分量的凸组合目标, 权重 {np.round(weights, 4).tolist()}")
        return target, weights, parts

    @staticmethod
    def generate_special_cases() -> list[dict[str, Any]]:
        """确定的边界情形：恒等信道、Pauli 信道、振幅阻尼、完全退相位"""
        return [
            {"name": "identity", "channel": KrausChannel.identity(2)},
            {"name": "pauli_x", "channel": KrausChannel.from_unitary(X)},
            {"name": "amplitude_damping", "channel": ad_kraus(0.3)},
            {"name": "full_damping", "channel": ad_kraus(1.0)},
            {
                "name": "dephasing",
                "channel": KrausChannel((np.eye(2) / np.sqrt(2), Z / np.sqrt(2))),
            },
            {"name": "identity_superchannel", "superchannel": identity_superchannel()},
        ]
