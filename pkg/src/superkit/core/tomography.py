"""
虚拟层析

由输入态集合 ℬ = {|z⟩, |z̄⟩, |x⟩, |y⟩} 的输出重构任意单比特输入的输出态（QST 线性组合），
以及由 ℬ 的四个输出重构信道的 Choi 态 / χ 矩阵（QPT）。
"""

import logging

import numpy as np

from superkit.core.channels import ChiMatrix, ChoiState, KrausChannel, apply_channel
from superkit.core.states import BASIS_LABELS, BASIS_STATES, DensityMatrix

logger = logging.getLogger(__name__)


def basis_outputs(ch: KrausChannel) -> dict[str, DensityMatrix]:
    """信道作用在 ℬ 四个输入态上的输出"""
    if ch.dim_in != 2:
        raise ValueError(f"输入态集合 ℬ 只对单比特信道定义, dim_in={ch.dim_in}")
    return {label: apply_channel(ch, BASIS_STATES[label].density()) for label in BASIS_LABELS}


def _check_outputs(outputs: dict[str, DensityMatrix]) -> None:
    missing = [label for label in BASIS_LABELS if label not in outputs]
    if missing:
        raise ValueError(f"缺少基态输出: {missing}")


def reconstruct_from_basis(
    outputs: dict[str, DensityMatrix],
    rho_in: DensityMatrix,
) -> DensityMatrix:
    """由 ℬ 的输出线性重构 ℰ(ρ_in)

    ρ_out = (0.5+a−b−c)ℰ(|z⟩⟨z|) + (0.5−a−b−c)ℰ(|z̄⟩⟨z̄|) + 2bℰ(|x⟩⟨x|) + 2cℰ(|y⟩⟨y|)，
    其中 (a, b, c) 由 ρ_in 的矩阵元读出。

    Raises:
        ValueError: 缺少某个基态输出
    """
    _check_outputs(outputs)
    a, b, c = rho_in.decomposition_params()
    weights = {
        "z": 0.5 + a - b - c,
        "zbar": 0.5 - a - b - c,
        "x": 2 * b,
        "y": 2 * c,
    }
    out = sum(weights[label] * outputs[label].data for label in BASIS_LABELS)
    tol = max(rho_in.tol, *(outputs[label].tol for label in BASIS_LABELS))
    return DensityMatrix(out, tol=tol)


def process_from_basis(outputs: dict[str, DensityMatrix]) -> ChoiState:
    """由 ℬ 的四个输出重构信道的 Choi 态

    利用 |0⟩⟨1| = (|x⟩⟨x| − 1/2) + i(|y⟩⟨y| − 1/2) 以及 1 = |z⟩⟨z| + |z̄⟩⟨z̄| 的线性关系。
    """
    _check_outputs(outputs)
    e = {label: outputs[label].data for label in BASIS_LABELS}
    e00 = e["z"]
    e11 = e["zbar"]
    e01 = e["x"] + 1j * e["y"] - (1 + 1j) / 2 * (e00 + e11)
    e10 = e01.conj().T

    # ω[(o,i),(o',j)] = ½ ℰ(|i⟩⟨j|)[o,o']
    tensor = np.zeros((2, 2, 2, 2), dtype=complex)
    for (i, j), block in {(0, 0): e00, (0, 1): e01, (1, 0): e10, (1, 1): e11}.items():
        tensor[:, i, :, j] = block / 2
    tol = max(outputs[label].tol for label in BASIS_LABELS)
    return ChoiState(tensor.reshape(4, 4), tol=max(tol, 1e-9))


def chi_from_basis(outputs: dict[str, DensityMatrix]) -> ChiMatrix:
    """QPT：由 ℬ 的输出得到 χ 矩阵"""
    return process_from_basis(outputs).to_chi()
