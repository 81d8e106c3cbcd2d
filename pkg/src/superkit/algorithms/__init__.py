"""
算法实现模块

包含超信道凸分解、纠缠辅助纠错码搜索和 GRAPE 脉冲优化，三者共用多起点优化器。
"""

from superkit.algorithms.decomposition import ConvexDecomposer, ConvexDecomposition
from superkit.algorithms.grape import GrapeOptimizer, SpinSystem
from superkit.algorithms.optimizer import MultiStartOptimizer, OptimizerConfig
from superkit.algorithms.qec import EbitCode, EbitCodeSearch

__all__ = [
    "MultiStartOptimizer",
    "OptimizerConfig",
    "ConvexDecomposer",
    "ConvexDecomposition",
    "EbitCodeSearch",
    "EbitCode",
    "GrapeOptimizer",
    "SpinSystem",
]
