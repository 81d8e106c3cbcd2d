"""
距离与保真度

迹距离、（不衰减的）态保真度 F_s 与过程保真度 F_p。
"""

import logging
from typing import Any

import numpy as np

from superkit.core.channels import ChiMatrix
from superkit.core.states import DensityMatrix

logger = logging.getLogger(__name__)


def _as_array(obj: Any) -> np.ndarray:
    return np.asarray(getattr(obj, "data", obj), dtype=complex)


def trace_distance(a: Any, b: Any) -> float:
    """迹距离 d(A, B) = ½ Σ|λ_k|，λ_k 为 A − B 的本征值

    接受 DensityMatrix、ChoiState、SuperchannelChoi 或 Hermitian 数组。

    Raises:
        ValueError: 维数不匹配
    """
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"维数不匹配: {a.shape} vs {b.shape}")
    diff = a - b
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(evals)))


def state_fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """F_s = Tr[ab] / sqrt(Tr[a²]·Tr[b²])

    Raises:
        ValueError: 维数不匹配或出现零矩阵
    """
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"维数不匹配: {a.shape} vs {b.shape}")
    norm = np.real(np.trace(a @ a)) * np.real(np.trace(b @ b))
    if norm <= 0:
        raise ValueError("态保真度的分母为零")
    return float(np.real(np.trace(a @ b)) / np.sqrt(norm))


def process_fidelity(chi_a: ChiMatrix, chi_b: ChiMatrix) -> float:
    """F_p = |Tr[χ_a χ_b†]| / sqrt(Tr[χ_b χ_b†]·Tr[χ_a χ_a†])

    Raises:
        ValueError: 出现零矩阵
    """
    a, b = _as_array(chi_a), _as_array(chi_b)
    norm = np.real(np.trace(b @ b.conj().T)) * np.real(np.trace(a @ a.conj().T))
    if norm <= 0:
        raise ValueError("过程保真度的分母为零")
    return float(np.abs(np.trace(a @ b.conj().T)) / np.sqrt(norm))
