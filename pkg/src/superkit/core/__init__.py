"""
核心模块

包含量子态、量子信道的三种表示及其相互转换、距离度量和基于四个输入态的层析重建。
"""

from superkit.core.channels import (
    ChiMatrix,
    ChoiState,
    KrausChannel,
    apply_channel,
    channel_to_chi,
    channel_to_choi,
    choi_to_chi,
    choi_to_kraus,
)
from superkit.core.metrics import process_fidelity, state_fidelity, trace_distance
from superkit.core.states import BlochVector, DensityMatrix, PureState, fibonacci_sphere
from superkit.core.tomography import basis_outputs, chi_from_basis, process_from_basis

__all__ = [
    "DensityMatrix",
    "PureState",
    "BlochVector",
    "fibonacci_sphere",
    "KrausChannel",
    "ChoiState",
    "ChiMatrix",
    "apply_channel",
    "channel_to_choi",
    "choi_to_kraus",
    "choi_to_chi",
    "channel_to_chi",
    "trace_distance",
    "state_fidelity",
    "process_fidelity",
    "basis_outputs",
    "process_from_basis",
    "chi_from_basis",
]
