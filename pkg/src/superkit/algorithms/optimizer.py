"""
多起点局部优化

凸分解与纠错码搜索共用的优化器：每个起点用 scipy.optimize.minimize 做局部搜索，
按评分（如迹距离）保留最优结果。起点的种子由 SeedSequence 派生，串行执行，
相同配置下结果逐位一致。
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize
from tqdm import tqdm

logger = logging.getLogger(__name__)

METHODS = ("l-bfgs-b", "nelder-mead")


@dataclass(frozen=True)
class OptimizerConfig:
    """优化器配置

    Args:
        seed: 随机种子，派生出每个起点的种子
        restarts: 随机起点数；没有固定起点时至少使用 1 个
        max_iters: 每个起点的最大迭代数
        tolerance: 评分达到该值即视为收敛
        method: "l-bfgs-b"（梯度）或 "nelder-mead"（无导数）
        show_progress: 是否显示 tqdm 进度条
    """

    seed: int = 0
    restarts: int = 4
    max_iters: int = 2000
    tolerance: float = 1e-4
    method: str = "l-bfgs-b"
    show_progress: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"未知优化方法: {self.method}，可选 {METHODS}")
        if self.restarts < 0 or self.max_iters < 1:
            raise ValueError(f"非法的起点数或迭代数: {self.restarts}, {self.max_iters}")


@dataclass
class OptimizationResult:
    """单次（或最优）局部搜索的结果"""

    x: np.ndarray
    score: float
    converged: bool
    start_index: int
    best_initial: float = float("inf")
    success: bool = False
    n_evaluations: int = 0
    history: list[float] = field(default_factory=list)


class MultiStartOptimizer:
    """多起点局部搜索

    Args:
        config: 优化器配置

    Examples:
        >>> opt = MultiStartOptimizer(OptimizerConfig(seed=1, restarts=2))
        >>> result = opt.minimize(lambda x: float(x @ x), lambda rng: rng.normal(size=3))
        >>> result.score < 1e-6
        True
    """

    def __init__(self, config: OptimizerConfig):
        self.config = config
        self._evaluations = 0
        self._runs = 0
        logger.debug(f"初始化 MultiStartOptimizer: {config}")

    def start_seeds(self, count: Optional[int] = None) -> list[int]:
        """每个随机起点的派生种子"""
        count = self.config.restarts if count is None else count
        children = np.random.SeedSequence(self.config.seed).spawn(count)
        return [int(child.generate_state(1)[0]) for child in children]

    def minimize(
        self,
        fun: Callable[[np.ndarray], float | tuple[float, np.ndarray]],
        make_start: Callable[[np.random.Generator], np.ndarray],
        jac: bool = False,
        score: Optional[Callable[[np.ndarray], float]] = None,
        fixed_starts: tuple[np.ndarray, ...] = (),
        target: Optional[float] = None,
    ) -> OptimizationResult:
        """从固定起点与随机起点出发做局部搜索，返回评分最低的结果

        Args:
            fun: 局部搜索的目标函数；jac=True 时返回 (值, 梯度)
            make_start: 由随机数生成器产生起点
            jac: fun 是否同时返回梯度（仅 L-BFGS-B 使用）
            score: 比较结果所用的评分，默认即 fun 的值
            fixed_starts: 先于随机起点尝试的确定起点
            target: 评分达到该值即停止；默认取 config.tolerance

        Returns:
            最优结果。起点本身也参与比较，因此评分不会差于最好的初始猜测。
        """
        config = self.config
        target = config.tolerance if target is None else target
        score = score or (lambda x: self._value(fun, x, jac))
        self._evaluations = 0
        self._runs = 0

        starts = [np.asarray(x, dtype=float) for x in fixed_starts]
        seeds = self.start_seeds(max(config.restarts, 0 if starts else 1))
        starts += [make_start(np.random.default_rng(s)) for s in seeds]

        best: Optional[OptimizationResult] = None
        best_initial = float("inf")
        for index, x0 in enumerate(
            tqdm(starts, desc="多起点优化", disable=not config.show_progress)
        ):
            candidates = [(x0, score(x0))]
            best_initial = min(best_initial, candidates[0][1])
            history: list[float] = []
            x_opt, success = self._local_search(fun, x0, jac, history)
            candidates.append((x_opt, score(x_opt)))
            x_best, s_best = min(candidates, key=lambda c: c[1])
            self._runs += 1
            logger.debug(f"起点 {index}: 初始 {candidates[0][1]:.3e} → 最终 {s_best:.3e}")

            if best is None or s_best < best.score:
                best = OptimizationResult(
                    x=np.array(x_best),
                    score=float(s_best),
                    converged=bool(s_best <= target),
                    start_index=index,
                    success=success,
                    history=history,
                )
            if best.converged:
                break

        best.n_evaluations = self._evaluations
        best.best_initial = best_initial
        logger.info(
            f"多起点优化结束: 最优评分 {best.score:.3e}, 收敛 {best.converged}, "
            f"起点 {self._runs}/{len(starts)}"
        )
        return best

    def _value(self, fun, x, jac) -> float:
        value = fun(x)
        return float(value[0] if jac else value)

    def _local_search(self, fun, x0, jac, history) -> tuple[np.ndarray, bool]:
        config = self.config

        def counted(x):
            self._evaluations += 1
            return fun(x)

        def record(xk, *args):
            history.append(self._value(fun, xk, jac))

        if config.method == "nelder-mead":
            res = optimize.minimize(
                (lambda x: self._value(counted, x, jac)),
                x0,
                method="Nelder-Mead",
                callback=record,
                options={
                    "maxiter": config.max_iters,
                    "maxfev": 4 * config.max_iters,
                    "xatol": 1e-10,
                    "fatol": 1e-12,
                    "adaptive": True,
                },
            )
        else:
            res = optimize.minimize(
                counted,
                x0,
                jac=jac,
                method="L-BFGS-B",
                callback=record,
                options={"maxiter": config.max_iters, "ftol": 1e-15, "gtol": 1e-10},
            )
        return np.asarray(res.x, dtype=float), bool(res.success)

    def get_statistics(self) -> dict[str, int]:
        return {"evaluations": self._evaluations, "runs": self._runs}
