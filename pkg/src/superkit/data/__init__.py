"""
数据处理模块

包含 JSON 数据加载器、随机测试数据生成器和内置的附录矩阵。
"""

from superkit.data.appendix import AppendixBundle
from superkit.data.generator import ChannelGenerator
from superkit.data.loader import DataLoader

__all__ = [
    "AppendixBundle",
    "DataLoader",
    "ChannelGenerator",
]
