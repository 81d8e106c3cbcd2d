"""
Superkit

单比特量子超信道的模拟工具包：量子态与信道表示、超信道的线路与 Choi 表示、
超信道凸分解、纠缠辅助纠错码搜索、GRAPE 脉冲优化，以及实验结果复现。
"""

__version__ = "0.1.0"

from superkit.core.channels import ChiMatrix, ChoiState, KrausChannel
from superkit.core.states import DensityMatrix, PureState
from superkit.superchannel.choi import SuperchannelChoi
from superkit.superchannel.circuit import GenExtremeSuperchannel, SuperchannelKraus

__all__ = [
    "DensityMatrix",
    "PureState",
    "KrausChannel",
    "ChoiState",
    "ChiMatrix",
    "GenExtremeSuperchannel",
    "SuperchannelKraus",
    "SuperchannelChoi",
]
