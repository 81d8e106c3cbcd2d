"""
超信道模块

包含超信道的线路表示（前、后处理酉矩阵）、Kraus 表示和 Choi 表示。
"""

from superkit.superchannel.choi import SuperchannelChoi, superchannel_choi
from superkit.superchannel.circuit import (
    CircuitSuperchannel,
    GenExtremeSuperchannel,
    SuperchannelKraus,
    act_on_choi,
    circuit_to_kraus,
    dephasing_superchannel,
    output_channel,
)

__all__ = [
    "CircuitSuperchannel",
    "GenExtremeSuperchannel",
    "SuperchannelKraus",
    "SuperchannelChoi",
    "circuit_to_kraus",
    "output_channel",
    "act_on_choi",
    "dephasing_superchannel",
    "superchannel_choi",
]
