"""
工具函数模块

提供张量积、偏迹、酉矩阵参数化与矩阵指数导数等线性代数工具。
"""

from superkit.utils.linalg import (
    haar_unitary,
    partial_trace,
    polar_unitary,
    tensor_product,
    unitary_from_params,
)

__all__ = [
    "tensor_product",
    "partial_trace",
    "haar_unitary",
    "polar_unitary",
    "unitary_from_params",
]
