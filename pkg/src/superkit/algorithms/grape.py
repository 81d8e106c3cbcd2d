"""
GRAPE 脉冲优化

弱耦合近似下的核自旋内部哈密顿量
    H_int = Σ πν_i σ_z^i + Σ_{i<j} (π/2) J_ij σ_z^i σ_z^j
加上每个自旋独立的 x/y 控制 H_ctrl = Σ_i π(u_x σ_x^i + u_y σ_y^i)，
把分段常数控制幅度（Hz）优化为目标酉门。

保真度 F = |Tr(U_t† U)|² / d²；梯度由前向/后向传播子缓存计算，默认对每段用一阶近似
∂U_j ≈ −i·dt·H_k·U_j，要求 ‖H‖·dt ≪ 1。段长较长（如实验室坐标系下的巴豆酸）时
应选用精确导数（本征基下的 Fréchet 导数）。

echo_cnot_pulse 用自旋回波构造 CNOT 的初始脉冲：J 耦合演化提供纠缠，
两次 π 脉冲把多余的耦合相位回聚，首尾的单自旋门由两段脉冲数值合成。
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize
from tqdm import tqdm

from superkit.utils.linalg import (
    X,
    Y,
    Z,
    check_unitary,
    embed_operator,
    expm_hermitian,
    frechet_kernel,
)

logger = logging.getLogger(__name__)

# 优化变量以 kHz 为单位，对外的幅度均为 Hz
AMPLITUDE_UNIT_HZ = 1e3
GRADIENT_METHODS = ("first_order", "exact")
# 一阶梯度可接受的最大单段相位 ‖H_int‖·dt
FIRST_ORDER_MAX_PHASE = 0.1

# 反式巴豆酸 C₁–C₄ 的化学位移与 J 耦合（Hz）
CROTONIC_SHIFTS = (-1707.1, -14560.6, -12330.4, -16765.2)
CROTONIC_COUPLINGS = {
    (0, 1): 41.64,
    (0, 2): 1.45,
    (0, 3): 7.04,
    (1, 2): 69.69,
    (1, 3): 1.16,
    (2, 3): 72.35,
}

# C₁ 为控制位、C₂ 为目标位（高位在前）
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class SpinSystem:
    """弱耦合自旋体系

    Args:
        chemical_shifts: 各自旋的化学位移 ν_i（Hz）
        j_couplings: {(i, j): J_ij}，只允许 i < j
        names: 自旋名称，可选
    """

    chemical_shifts: tuple[float, ...]
    j_couplings: dict[tuple[int, int], float] = field(default_factory=dict)
    names: tuple[str, ...] = ()

    def __post_init__(self):
        shifts = tuple(float(v) for v in self.chemical_shifts)
        if len(shifts) < 1:
            raise ValueError("自旋数必须 ≥ 1")
        couplings = {}
        for (i, j), value in self.j_couplings.items():
            i, j = int(i), int(j)
            if not 0 <= i < j < len(shifts):
                raise ValueError(f"J 耦合下标必须满足 0 ≤ i < j < {len(shifts)}: ({i}, {j})")
            couplings[(i, j)] = float(value)
        if self.names and len(self.names) != len(shifts):
            raise ValueError(f"自旋名称数 {len(self.names)} 与自旋数 {len(shifts)} 不一致")
        object.__setattr__(self, "chemical_shifts", shifts)
        object.__setattr__(self, "j_couplings", couplings)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_spins(self) -> int:
        return len(self.chemical_shifts)

    @property
    def dim(self) -> int:
        return 2 ** self.n_spins

    def subsystem(self, indices: list[int]) -> "SpinSystem":
        """取出若干自旋组成的子体系（保持给定顺序）"""
        position = {old: new for new, old in enumerate(indices)}
        couplings = {}
        for (i, j), value in self.j_couplings.items():
            if i in position and j in position:
                a, b = sorted((position[i], position[j]))
                couplings[(a, b)] = value
        names = tuple(self.names[i] for i in indices) if self.names else ()
        return SpinSystem(tuple(self.chemical_shifts[i] for i in indices), couplings, names)

    @classmethod
    def crotonic_acid(cls) -> "SpinSystem":
        """反式巴豆酸的四个 ¹³C 自旋"""
        return cls(CROTONIC_SHIFTS, dict(CROTONIC_COUPLINGS), ("C1", "C2", "C3", "C4"))


@dataclass(frozen=True, eq=False)
class ControlPulse:
    """分段常数控制脉冲

    Args:
        amplitudes: 形状 (n_slices, n_spins, 2)，每段每个自旋的 (u_x, u_y)，单位 Hz
        slice_duration: 每段时长（秒）
        fidelity: 优化得到的门保真度（若有）
        converged: 是否达到目标保真度
    """

    amplitudes: np.ndarray
    slice_duration: float
    fidelity: Optional[float] = None
    converged: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        if amps.ndim != 3 or amps.shape[2] != 2 or amps.shape[0] < 1:
            raise ValueError(f"脉冲幅度形状应为 (n_slices ≥ 1, n_spins, 2): {amps.shape}")
        if not self.slice_duration > 0:
            raise ValueError(f"每段时长必须为正: {self.slice_duration}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_slices(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_spins(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def duration(self) -> float:
        return self.n_slices * self.slice_duration

    @classmethod
    def zeros(cls, n_slices: int, n_spins: int, duration: float) -> "ControlPulse":
        return cls(np.zeros((n_slices, n_spins, 2)), duration / n_slices)


@dataclass(frozen=True)
class GrapeConfig:
    """GRAPE 配置

    Args:
        seed: 初始脉冲的随机种子
        n_slices: 段数
        duration: 脉冲总时长（秒）
        max_iters: 每次局部搜索的最大迭代数
        target_fidelity: 目标保真度
        init_scale_hz: 初始随机幅度的标准差（Hz），0 表示从零脉冲出发
        restarts: 未达到目标时的最多尝试次数
        robust: 是否对射频幅度缩放取平均保真度
        robust_scales: 射频幅度缩放因子
        gradient: "first_order"（默认）或 "exact"
        show_progress: 是否显示 tqdm 进度条
    """

    seed: int = 0
    n_slices: int = 100
    duration: float = 0.02
    max_iters: int = 500
    target_fidelity: float = 0.995
    init_scale_hz: float = 50.0
    restarts: int = 3
    robust: bool = False
    robust_scales: tuple[float, ...] = (0.95, 1.0, 1.05)
    gradient: str = "first_order"
    show_progress: bool = False

    def __post_init__(self):
        if self.gradient not in GRADIENT_METHODS:
            raise ValueError(f"未知梯度方法: {self.gradient}，可选 {GRADIENT_METHODS}")
        if self.n_slices < 1 or not self.duration > 0:
            raise ValueError(f"非法的段数或时长: {self.n_slices}, {self.duration}")
        if not 0 < self.target_fidelity <= 1:
            raise ValueError(f"目标保真度必须在 (0, 1] 内: {self.target_fidelity}")

    @property
    def scales(self) -> tuple[float, ...]:
        return tuple(self.robust_scales) if self.robust else (1.0,)


def internal_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """H_int（rad/s），对角实矩阵"""
    n = sys.n_spins
    h = np.zeros((sys.dim, sys.dim), dtype=complex)
    for i, nu in enumerate(sys.chemical_shifts):
        h += np.pi * nu * embed_operator(Z, [i], n)
    for (i, j), coupling in sys.j_couplings.items():
        h += 0.5 * np.pi * coupling * embed_operator(np.kron(Z, Z), [i, j], n)
    return h


def control_hamiltonians(n_spins: int) -> np.ndarray:
    """∂H/∂u，形状 (n_spins, 2, d, d)：π σ_x^i 与 π σ_y^i"""
    return np.array([
        [np.pi * embed_operator(X, [i], n_spins), np.pi * embed_operator(Y, [i], n_spins)]
        for i in range(n_spins)
    ])


def _slice_hamiltonians(h_int, h_ctrl, amplitudes, scale):
    # amplitudes (n_slices, n_spins, 2)，h_ctrl (n_spins, 2, d, d)
    return h_int[None] + scale * np.einsum("nsc,scab->nab", amplitudes, h_ctrl)


def propagate(sys: SpinSystem, pulse: ControlPulse, scale: float = 1.0) -> np.ndarray:
    """U = U_N ⋯ U_1，U_j = exp(−i·dt·(H_int + H_ctrl(j)))

    Args:
        scale: 控制幅度的缩放（射频不均匀性）
    """
    if pulse.n_spins != sys.n_spins:
        raise ValueError(f"脉冲自旋数 {pulse.n_spins} 与体系自旋数 {sys.n_spins} 不一致")
    hams = _slice_hamiltonians(
        internal_hamiltonian(sys), control_hamiltonians(sys.n_spins), pulse.amplitudes, scale
    )
    u = np.eye(sys.dim, dtype=complex)
    for h in hams:
        step, _, _ = expm_hermitian(h, pulse.slice_duration)
        u = step @ u
    return u


def gate_fidelity(u_target: np.ndarray, u_actual: np.ndarray) -> float:
    """F = |Tr(U_t† U)|² / d²

    Raises:
        ValueError: 维数不匹配
    """
    u_target = np.asarray(u_target, dtype=complex)
    u_actual = np.asarray(u_actual, dtype=complex)
    if u_target.shape != u_actual.shape or u_target.shape[0] != u_target.shape[1]:
        raise ValueError(f"维数不匹配: {u_target.shape} vs {u_actual.shape}")
    d = u_target.shape[0]
    return float(abs(np.trace(u_target.conj().T @ u_actual)) ** 2 / d ** 2)


class GrapeOptimizer:
    """GRAPE 优化器

    Args:
        system: 自旋体系
        u_target: 目标酉门（2ⁿ×2ⁿ）
        config: GRAPE 配置

    Examples:
        >>> sys = SpinSystem.crotonic_acid().subsystem([0, 1])
        >>> grape = GrapeOptimizer(sys, CNOT, GrapeConfig(seed=1))
        >>> pulse = grape.optimize()
        >>> print(pulse.fidelity, len(grape.history))
    """

    def __init__(
        self,
        system: SpinSystem,
        u_target: np.ndarray,
        config: Optional[GrapeConfig] = None,
    ):
        u_target = check_unitary(u_target, "目标酉门")
        if u_target.shape != (system.dim, system.dim):
            raise ValueError(f"目标酉门维数 {u_target.shape} 与体系维数 {system.dim} 不一致")
        self.system = system
        self.u_target = u_target
        self.config = config or GrapeConfig()
        self.h_int = internal_hamiltonian(system)
        self.h_ctrl = control_hamiltonians(system.n_spins)
        self.history: list[float] = []

        # 统计计数器
        self._fidelity_calls = 0
        self._gradient_calls = 0
        self._iterations = 0
        self._last: tuple[np.ndarray, float] = (np.empty(0), 0.0)

        logger.debug(f"初始化 GrapeOptimizer: {system.n_spins} 个自旋, 配置 {self.config}")

    @property
    def slice_duration(self) -> float:
        return self.config.duration / self.config.n_slices

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.config.n_slices, self.system.n_spins, 2)

    def _amplitudes(self, amplitudes_hz: np.ndarray) -> np.ndarray:
        amps = np.asarray(amplitudes_hz, dtype=float)
        if amps.size != np.prod(self.shape):
            raise ValueError(f"脉冲幅度个数应为 {np.prod(self.shape)}: {amps.size}")
        return amps.reshape(self.shape)

    def fidelity(self, amplitudes_hz: np.ndarray) -> float:
        """（射频缩放平均后的）门保真度"""
        self._fidelity_calls += 1
        amps = self._amplitudes(amplitudes_hz)
        pulse = ControlPulse(amps, self.slice_duration)
        values = [
            gate_fidelity(self.u_target, propagate(self.system, pulse, s))
            for s in self.config.scales
        ]
        return float(np.mean(values))

    def fidelity_and_gradient(
        self,
        amplitudes_hz: np.ndarray,
        method: Optional[str] = None,
    ) -> tuple[float, np.ndarray]:
        """保真度及其对各幅度（Hz）的梯度，形状同幅度数组"""
        self._gradient_calls += 1
        method = method or self.config.gradient
        if method not in GRADIENT_METHODS:
            raise ValueError(f"未知梯度方法: {method}")
        amps = self._amplitudes(amplitudes_hz)
        dt = self.slice_duration
        d = self.system.dim
        ut_dag = self.u_target.conj().T

        total_f = 0.0
        total_grad = np.zeros(self.shape)
        for scale in self.config.scales:
            hams = _slice_hamiltonians(self.h_int, self.h_ctrl, amps, scale)
            steps, eigs = [], []
            for h in hams:
                step, evals, evecs = expm_hermitian(h, dt)
                steps.append(step)
                eigs.append((evals, evecs))

            # forward[j] = U_j ⋯ U_1（forward[0] = 1），backward[j] = U_N ⋯ U_{j+1}
            n = len(steps)
            forward = [np.eye(d, dtype=complex)]
            for step in steps:
                forward.append(step @ forward[-1])
            backward = [np.eye(d, dtype=complex)] * (n + 1)
            for j in range(n - 1, -1, -1):
                backward[j] = backward[j + 1] @ steps[j]

            overlap = np.trace(ut_dag @ forward[-1])
            grad = np.zeros(self.shape)
            for j in range(n):
                # dg = Tr(B dU_j)，B = (第 j 段之前的传播子) U_t† (第 j 段之后的传播子)
                b = forward[j] @ ut_dag @ backward[j + 1]
                dh = scale * self.h_ctrl
                if method == "exact":
                    evals, evecs = eigs[j]
                    b_eig = evecs.conj().T @ b @ evecs
                    dh_eig = np.einsum("ax,scxy,yb->scab", evecs.conj().T, dh, evecs)
                    dg = np.einsum("ba,ab,scab->sc", b_eig, frechet_kernel(evals, dt), dh_eig)
                else:
                    dg = np.einsum("xy,scyz,zx->sc", b, -1j * dt * dh, steps[j])
                grad[j] = 2 * np.real(np.conj(overlap) * dg) / d ** 2

            total_f += abs(overlap) ** 2 / d ** 2
            total_grad += grad

        n_scales = len(self.config.scales)
        return float(total_f / n_scales), total_grad / n_scales

    def finite_difference_gradient(
        self,
        amplitudes_hz: np.ndarray,
        step_hz: float = 1e-6,
    ) -> np.ndarray:
        """中心差分梯度（用于校验）"""
        amps = self._amplitudes(amplitudes_hz).reshape(-1)
        grad = np.zeros_like(amps)
        for k in range(amps.size):
            plus, minus = amps.copy(), amps.copy()
            plus[k] += step_hz
            minus[k] -= step_hz
            grad[k] = (self.fidelity(plus) - self.fidelity(minus)) / (2 * step_hz)
        return grad.reshape(self.shape)

    def _cost(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        f, grad = self.fidelity_and_gradient(x * AMPLITUDE_UNIT_HZ)
        self._last = (np.array(x), f)
        return 1.0 - f, -grad.reshape(-1) * AMPLITUDE_UNIT_HZ

    def optimize(self, initial: Optional[ControlPulse] = None) -> ControlPulse:
        """L-BFGS-B 上升到目标保真度

        未达到目标时换随机初始脉冲重试，最多 config.restarts 次，返回最好的脉冲。
        history 记录最好一次运行中每次接受的迭代的保真度。
        """
        config = self.config
        logger.info(
            f"开始 GRAPE: {self.system.n_spins} 个自旋, {config.n_slices} 段, "
            f"时长 {config.duration * 1e3:.1f} ms, 目标 {config.target_fidelity}"
        )
        if config.gradient == "first_order":
            phase = float(np.max(np.abs(np.diag(self.h_int)))) * self.slice_duration
            if phase > FIRST_ORDER_MAX_PHASE:
                logger.warning(
                    f"一阶梯度要求 ‖H_int‖·dt ≪ 1，当前为 {phase:.3g}；建议使用 gradient='exact'"
                )
        seeds = np.random.SeedSequence(config.seed).spawn(max(config.restarts, 1))
        best_x, best_f, best_history = None, -np.inf, []
        self._iterations = 0

        for attempt, seed in enumerate(
            tqdm(seeds, desc="GRAPE", disable=not config.show_progress)
        ):
            if attempt == 0 and initial is not None:
                x0 = self._amplitudes(initial.amplitudes).reshape(-1) / AMPLITUDE_UNIT_HZ
            else:
                rng = np.random.default_rng(seed)
                x0 = rng.normal(scale=config.init_scale_hz, size=np.prod(self.shape))
                x0 = x0 / AMPLITUDE_UNIT_HZ

            history = [1.0 - self._cost(x0)[0]]

            def record(xk, *args):
                last_x, last_f = self._last
                if np.array_equal(last_x, xk):
                    history.append(last_f)
                else:
                    history.append(self.fidelity(xk * AMPLITUDE_UNIT_HZ))
                self._iterations += 1

            res = optimize.minimize(
                self._cost,
                x0,
                jac=True,
                method="L-BFGS-B",
                callback=record,
                options={"maxiter": config.max_iters, "ftol": 1e-14, "gtol": 1e-12},
            )
            f = 1.0 - float(res.fun)
            logger.debug(f"GRAPE 尝试 {attempt}: F = {f:.6f}, 迭代 {res.nit}")
            if f > best_f:
                best_x, best_f, best_history = res.x, f, history
            if best_f >= config.target_fidelity:
                break

        self.history = best_history
        converged = best_f >= config.target_fidelity
        pulse = ControlPulse(
            (best_x * AMPLITUDE_UNIT_HZ).reshape(self.shape),
            self.slice_duration,
            fidelity=best_f,
            converged=converged,
        )
        logger.info(f"GRAPE 结束: F = {best_f:.6f}, 收敛 {converged}")
        return pulse

    def get_statistics(self) -> dict[str, int]:
        return {
            "fidelity_calls": self._fidelity_calls,
            "gradient_calls": self._gradient_calls,
            "iterations": self._iterations,
        }


def grape_optimize(
    sys: SpinSystem,
    u_target: np.ndarray,
    config: Optional[GrapeConfig] = None,
) -> ControlPulse:
    return GrapeOptimizer(sys, u_target, config).optimize()


def synthesize_rotation(
    shift_hz: float,
    target: np.ndarray,
    slice_duration: float,
    n_slices: int = 2,
    seed: int = 0,
    starts: int = 32,
) -> np.ndarray:
    """在化学位移 ν 下用 n_slices 段 x/y 控制实现单自旋目标门（不计耦合）

    Returns:
        形状 (n_slices, 2) 的幅度（Hz）

    Raises:
        ValueError: 目标不是 2×2 酉矩阵
    """
    target = check_unitary(target, "单自旋目标门")
    if target.shape != (2, 2):
        raise ValueError(f"单自旋目标门必须是 2×2: 形状 {target.shape}")
    spin = SpinSystem((shift_hz,))
    # 幅度量级与 max(|ν|, 1/dt) 相当
    scale_khz = max(abs(shift_hz), 1.0 / slice_duration) / AMPLITUDE_UNIT_HZ

    def infidelity(x: np.ndarray) -> float:
        pulse = ControlPulse(x.reshape(n_slices, 1, 2) * AMPLITUDE_UNIT_HZ, slice_duration)
        return 1.0 - gate_fidelity(target, propagate(spin, pulse))

    rng = np.random.default_rng(seed)
    best_x, best_value = None, np.inf
    for _ in range(starts):
        x0 = rng.uniform(-2 * scale_khz, 2 * scale_khz, size=2 * n_slices)
        res = optimize.minimize(infidelity, x0, method="BFGS", options={"gtol": 1e-10})
        if res.fun < best_value:
            best_x, best_value = res.x, float(res.fun)
        if best_value < 1e-10:
            break
    logger.debug(f"单自旋合成: ν = {shift_hz} Hz, 1 − F = {best_value:.3e}")
    return best_x.reshape(n_slices, 2) * AMPLITUDE_UNIT_HZ


def echo_cnot_pulse(
    system: SpinSystem,
    n_slices: int = 100,
    duration: float = 0.02,
    seed: int = 0,
) -> ControlPulse:
    """自旋回波构造的 CNOT 初始脉冲（自旋 0 为控制位）

    时序：目标自旋上的 H（2 段）→ 自由演化 a → 控制自旋 π（2 段）→ 自由演化 b
    → 控制自旋 π（2 段）→ 自由演化 c → 首尾修正门（2 段）。扫描 b，使累积的
    Z₀Z₁ 相位最接近 π/4（模 π/2），再由实际传播子的对角相位求出末端的局域 z 修正。

    Raises:
        ValueError: 体系不是两个有 J 耦合的自旋，或段数少于 10
    """
    if system.n_spins != 2 or not system.j_couplings.get((0, 1)):
        raise ValueError("echo_cnot_pulse 需要两个有 J 耦合的自旋")
    if n_slices < 10:
        raise ValueError(f"echo_cnot_pulse 至少需要 10 段: {n_slices}")
    dt = duration / n_slices
    nu_control, nu_target = system.chemical_shifts
    flip = synthesize_rotation(nu_control, X, dt, seed=seed)
    hadamard = synthesize_rotation(nu_target, HADAMARD, dt, seed=seed)
    basis_change = np.kron(np.eye(2), HADAMARD)

    free = n_slices - 8
    best_amps, best_score, best_diag = None, np.inf, None
    for b in range(free + 1):
        a = (free - b) // 2
        amps = np.zeros((n_slices, 2, 2))
        amps[0:2, 1] = hadamard
        amps[2 + a : 4 + a, 0] = flip
        amps[4 + a + b : 6 + a + b, 0] = flip
        u_pre = propagate(system, ControlPulse(amps[: n_slices - 2], dt))
        diag = np.diag(u_pre @ basis_change.conj().T)
        phases = diag / np.abs(diag)
        # 局域对角门 × CZ 满足 e₀₀e₁₁ = −e₀₁e₁₀
        score = abs(phases[0] * phases[3] + phases[1] * phases[2])
        if score < best_score:
            best_amps, best_score, best_diag = amps, score, phases

    e00, e01, e10, _ = best_diag
    correction_control = np.diag([1.0, np.conj(e10 / e00)])
    correction_target = HADAMARD @ np.diag([np.conj(e00), np.conj(e01)])
    best_amps[n_slices - 2 :, 0] = synthesize_rotation(
        nu_control, correction_control, dt, seed=seed
    )
    best_amps[n_slices - 2 :, 1] = synthesize_rotation(
        nu_target, correction_target, dt, seed=seed
    )
    pulse = ControlPulse(best_amps, dt)
    fidelity = gate_fidelity(CNOT, propagate(system, pulse))
    logger.info(f"回波 CNOT 初始脉冲: 相位失配 {best_score:.3e}, F = {fidelity:.6f}")
    return ControlPulse(best_amps, dt, fidelity=fidelity, converged=False)
