"""
线性代数工具函数

提供张量积、偏迹、酉矩阵采样与投影、Hermitian 生成元参数化等底层运算。
全局约定：计算基 |00…0⟩ 在前，大端序（第 1 个量子比特为最高位）。
"""

import logging
from functools import reduce

import numpy as np
from scipy import linalg as la

logger = logging.getLogger(__name__)

# 数值容差
ATOL = 1e-10
PSD_ATOL = 1e-9
EIG_CUTOFF = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)
PAULI_LABELS = ("I", "X", "Y", "Z")


def tensor_product(*ops: np.ndarray) -> np.ndarray:
    """Kronecker 积

    复合系统的下标为 i_A·dim_B + i_B（行优先）。

    Args:
        *ops: 任意个矩阵（或向量），按从左到右的顺序作张量积

    Returns:
        张量积结果

    Examples:
        >>> tensor_product(Z, Z).diagonal().real
        array([ 1., -1., -1.,  1.])
    """
    if not ops:
        raise ValueError("至少需要一个算符")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


def partial_trace(matrix: np.ndarray, dims: list[int], keep: list[int]) -> np.ndarray:
    """对复合系统的算符求偏迹

    Args:
        matrix: 作用在 ⊗dims 上的方阵
        dims: 各子系统维数
        keep: 保留的子系统下标（结果按原始顺序排列）

    Returns:
        保留子系统上的约化算符

    Raises:
        ValueError: 维数不匹配或 keep 为空/越界
    """
    matrix = np.asarray(matrix, dtype=complex)
    total = int(np.prod(dims))
    if matrix.shape != (total, total):
        raise ValueError(f"维数不匹配: 矩阵形状 {matrix.shape}, 子系统维数 {dims}")
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep 不能为空")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep 越界: {keep}, 子系统数 {len(dims)}")

    n = len(dims)
    tensor = matrix.reshape(list(dims) + list(dims))
    # 从后往前求迹，前面的轴下标不受影响
    for idx in reversed(range(n)):
        if idx in keep:
            continue
        current = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=idx, axis2=idx + current)

    kept_dim = int(np.prod([dims[k] for k in keep]))
    return tensor.reshape(kept_dim, kept_dim)


def is_hermitian(matrix: np.ndarray, atol: float = ATOL) -> bool:
    """判断矩阵是否 Hermitian（逐元素最大偏差）"""
    matrix = np.asarray(matrix)
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= atol)


def unitarity_error(matrix: np.ndarray) -> float:
    """‖M†M − 1‖_max 与 ‖MM† − 1‖_max 中的较大者"""
    matrix = np.asarray(matrix, dtype=complex)
    eye = np.eye(matrix.shape[0])
    return float(max(
        np.max(np.abs(matrix.conj().T @ matrix - eye)),
        np.max(np.abs(matrix @ matrix.conj().T - eye)),
    ))


def is_unitary(matrix: np.ndarray, atol: float = PSD_ATOL) -> bool:
    """判断方阵是否为酉矩阵"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return unitarity_error(matrix) <= atol


def check_unitary(matrix: np.ndarray, name: str = "矩阵", atol: float = PSD_ATOL) -> np.ndarray:
    """校验并返回复数酉矩阵

    Raises:
        ValueError: 如果不是方阵或不满足酉性
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} 不是方阵: 形状 {matrix.shape}")
    error = unitarity_error(matrix)
    if error > atol:
        logger.error(f"{name} 非酉: 偏差 {error:.3e} > {atol:.1e}")
        raise ValueError(f"{name} 不是酉矩阵 (偏差 {error:.3e})")
    return matrix


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar 随机酉矩阵

    对复高斯矩阵作 QR 分解，并用 R 对角元的相位修正 Q。
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def polar_unitary(matrix: np.ndarray) -> np.ndarray:
    """极分解投影：返回离 matrix 最近的酉矩阵"""
    u, _ = la.polar(np.asarray(matrix, dtype=complex))
    return u


def hermitian_from_params(thetas: np.ndarray, dim: int) -> np.ndarray:
    """由 dim² 个实数构造 Hermitian 矩阵

    前 dim 个为对角元，其后依次为上三角元素的实部与虚部。
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (dim * dim,):
        raise ValueError(f"参数长度应为 {dim * dim}, 实际 {thetas.shape}")
    h = np.diag(thetas[:dim]).astype(complex)
    iu = np.triu_indices(dim, k=1)
    n_off = len(iu[0])
    off = thetas[dim:dim + n_off] + 1j * thetas[dim + n_off:]
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


def unitary_from_params(thetas: np.ndarray, dim: int) -> np.ndarray:
    """exp(iH)，H 由 hermitian_from_params 给出

    通过 eigh 对角化求指数，结果在数值精度内严格酉。
    """
    h = hermitian_from_params(thetas, dim)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(1j * evals)) @ evecs.conj().T


def params_from_unitary(u: np.ndarray) -> np.ndarray:
    """unitary_from_params 的一个逆：取 H = −i log(U) 的主值"""
    u = check_unitary(u, "U")
    dim = u.shape[0]
    # 酉矩阵是正规矩阵，Schur 形式对角
    t, z = la.schur(u, output="complex")
    angles = np.angle(np.diag(t))
    h = (z * angles) @ z.conj().T
    h = (h + h.conj().T) / 2
    iu = np.triu_indices(dim, k=1)
    return np.concatenate([h.diagonal().real, h[iu].real, h[iu].imag])


def expm_hermitian(h: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """exp(−i t H)，同时返回本征值与本征矢（供求导复用）

    Returns:
        (propagator, eigenvalues, eigenvectors)
    """
    evals, evecs = np.linalg.eigh(h)
    propagator = (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
    return propagator, evals, evecs


def frechet_kernel(evals: np.ndarray, t: float) -> np.ndarray:
    """Φ_jk = (e^{a_j} − e^{a_k}) / (λ_j − λ_k)，a = −i t λ；简并时取极限 −i t e^{a_j}"""
    ea = np.exp(-1j * t * evals)
    diff = evals[:, None] - evals[None, :]
    degenerate = np.abs(diff) < 1e-12
    safe = np.where(degenerate, 1.0, diff)
    return np.where(degenerate, -1j * t * ea[:, None], (ea[:, None] - ea[None, :]) / safe)


def expm_hermitian_derivative(
    evals: np.ndarray,
    evecs: np.ndarray,
    direction: np.ndarray,
    t: float,
) -> np.ndarray:
    """exp(−i t H) 沿 H → H + εE 方向的精确导数

    在 H 的本征基下，导数矩阵元为 (V†EV)_jk · Φ_jk。
    """
    e_eig = evecs.conj().T @ direction @ evecs
    return evecs @ (frechet_kernel(evals, t) * e_eig) @ evecs.conj().T


def expm_hermitian_adjoint(
    evals: np.ndarray,
    evecs: np.ndarray,
    gamma: np.ndarray,
    t: float,
) -> np.ndarray:
    """expm_hermitian_derivative 关于 Re Tr(Γ†·) 的伴随

    对任意方向 E 有 Re Tr(Γ† L(E)) = Re Tr(Γ'† E)，返回 Γ'。
    """
    g_eig = evecs.conj().T @ gamma @ evecs
    return evecs @ (np.conj(frechet_kernel(evals, t)) * g_eig) @ evecs.conj().T


def hermitian_params_gradient(gamma: np.ndarray) -> np.ndarray:
    """把 Re Tr(Γ† E) 对 hermitian_from_params 各参数的偏导排成向量"""
    dim = gamma.shape[0]
    iu = np.triu_indices(dim, k=1)
    upper, lower = gamma[iu], gamma[(iu[1], iu[0])]
    return np.concatenate([
        gamma.diagonal().real,
        (upper + lower).real,
        upper.imag - lower.imag,
    ])


def embed_operator(op: np.ndarray, targets: list[int], n_qubits: int) -> np.ndarray:
    """把作用在若干量子比特上的算符嵌入 n 比特寄存器

    Args:
        op: 2^k × 2^k 算符，按 targets 给出的顺序作用
        targets: 目标量子比特下标（0 为最高位）
        n_qubits: 寄存器总比特数

    Returns:
        2^n × 2^n 算符
    """
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"算符形状 {op.shape} 与目标比特数 {k} 不匹配")
    if len(set(targets)) != k or min(targets) < 0 or max(targets) >= n_qubits:
        raise ValueError(f"非法目标比特: {targets}")

    rest = [q for q in range(n_qubits) if q not in targets]
    order = list(targets) + rest
    full = np.kron(op, np.eye(2 ** (n_qubits - k)))
    # full 的张量轴按 order 排列，换回 0..n-1
    tensor = full.reshape([2] * (2 * n_qubits))
    inverse = np.argsort(order)
    axes = list(inverse) + [n_qubits + i for i in inverse]
    return tensor.transpose(axes).reshape(2 ** n_qubits, 2 ** n_qubits)
