"""
Pytest配置文件

定义测试fixtures和全局配置。
"""

import numpy as np
import pytest

from superkit.core.channels import KrausChannel, random_kraus_channel
from superkit.core.states import BlochVector, DensityMatrix
from superkit.data.appendix import AppendixBundle
from superkit.superchannel.circuit import random_gen_extreme


@pytest.fixture
def rng():
    """固定种子的随机数生成器"""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def bundle():
    """极分解投影后的附录矩阵包"""
    return AppendixBundle.load()


@pytest.fixture(scope="session")
def raw_bundle():
    """原始（4 位小数）附录矩阵包"""
    return AppendixBundle.load(raw=True)


@pytest.fixture
def appendix_channel(bundle):
    """附录中的随机信道 ℰ"""
    return bundle.random_channel()


@pytest.fixture
def amplitude_damping():
    """λ = 0.3 的振幅阻尼信道"""
    lam = 0.3
    k0 = np.array([[1, 0], [0, np.sqrt(1 - lam)]])
    k1 = np.array([[0, np.sqrt(lam)], [0, 0]])
    return KrausChannel((k0, k1))


@pytest.fixture
def random_channel(rng):
    """两个 Kraus 算符的随机信道"""
    return random_kraus_channel(rng, dim=2, n_kraus=2)


@pytest.fixture
def random_superchannel(rng):
    """Haar 随机的广义极端超信道"""
    return random_gen_extreme(rng)


def random_density(rng: np.random.Generator) -> DensityMatrix:
    """Bloch 球内的随机单比特态"""
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return DensityMatrix.from_bloch(BlochVector(*(rng.uniform() * direction)))


@pytest.fixture
def random_states(rng):
    """100 个随机单比特态"""
    return [random_density(rng) for _ in range(100)]
