"""
量子态测试
"""

import numpy as np
import pytest

from superkit.core.states import (
    BASIS_LABELS,
    BASIS_STATES,
    BlochVector,
    DensityMatrix,
    PureState,
    fibonacci_points,
    fibonacci_sphere,
)


class TestDensityMatrix:
    """测试密度矩阵的不变量"""

    def test_maximally_mixed(self):
        rho = DensityMatrix.maximally_mixed(2)
        assert rho.dim == 2
        assert rho.n_qubits == 1
        assert rho.purity() == pytest.approx(0.5)

    def test_not_hermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_wrong_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2))

    def test_not_psd(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(3) / 3)
        with pytest.raises(ValueError):
            DensityMatrix(np.ones((2, 3)))

    def test_immutable(self):
        rho = DensityMatrix.maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.data[0, 0] = 1.0

    def test_relaxed_tolerance(self):
        """四位小数的实验矩阵需要放宽容差"""
        data = np.array([[0.5001, 0.0], [0.0, 0.5]])
        with pytest.raises(ValueError):
            DensityMatrix(data)
        assert DensityMatrix(data, tol=1e-3).dim == 2

    def test_decomposition_params(self):
        rho = DensityMatrix(np.array([[0.7, 0.1 - 0.2j], [0.1 + 0.2j, 0.3]]))
        a, b, c = rho.decomposition_params()
        assert (a, b, c) == pytest.approx((0.2, 0.1, 0.2))

    def test_two_qubit_has_no_bloch(self):
        with pytest.raises(ValueError):
            DensityMatrix.maximally_mixed(4).bloch()


class TestBloch:
    """测试 Bloch 矢量与纯态"""

    def test_round_trip(self):
        bloch = BlochVector(0.3, -0.4, 0.5)
        rho = DensityMatrix.from_bloch(bloch)
        assert np.allclose(rho.bloch().as_array(), bloch.as_array())

    def test_outside_ball(self):
        with pytest.raises(ValueError):
            BlochVector(1.0, 0.5, 0.0)

    def test_purity_matches_norm(self):
        assert BlochVector(0.0, 0.0, 1.0).is_pure()
        assert not BlochVector(0.0, 0.0, 0.5).is_pure()

    def test_pure_state_normalization(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 1.0]))

    def test_pure_state_from_bloch(self):
        for label in BASIS_LABELS:
            state = BASIS_STATES[label]
            rebuilt = PureState.from_bloch(state.bloch())
            overlap = abs(np.vdot(rebuilt.amplitudes, state.amplitudes))
            assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_mixed_vector_has_no_pure_state(self):
        with pytest.raises(ValueError):
            PureState.from_bloch(BlochVector(0.0, 0.0, 0.5))

    def test_basis_states(self):
        expected = {"z": (0, 0, 1), "zbar": (0, 0, -1), "x": (1, 0, 0), "y": (0, 1, 0)}
        for label, vec in expected.items():
            assert np.allclose(BASIS_STATES[label].bloch().as_array(), vec)


class TestFibonacciSphere:
    """测试球面采样"""

    def test_unit_norm(self):
        points = fibonacci_points(1000)
        assert points.shape == (1000, 3)
        assert np.max(np.abs(np.linalg.norm(points, axis=1) - 1)) < 1e-12

    def test_deterministic(self):
        assert np.array_equal(fibonacci_points(50), fibonacci_points(50))

    def test_roughly_uniform(self):
        """z 坐标均匀分布，均值接近 0"""
        assert abs(fibonacci_points(1000)[:, 2].mean()) < 1e-12

    def test_states(self):
        states = fibonacci_sphere(20)
        assert len(states) == 20
        points = fibonacci_points(20)
        for state, point in zip(states, points):
            assert np.allclose(state.bloch().as_array(), point, atol=1e-12)

    def test_invalid_count(self):
        with pytest.raises(ValueError):
            fibonacci_points(0)
