"""
超信道测试
"""

import numpy as np
import pytest

from superkit.core.channels import KrausChannel, random_kraus_channel
from superkit.core.metrics import trace_distance
from superkit.core.states import BASIS_STATES
from superkit.data.generator import ChannelGenerator
from superkit.superchannel.choi import SuperchannelChoi, superchannel_choi
from superkit.superchannel.circuit import (
    CircuitSuperchannel,
    GenExtremeSuperchannel,
    SuperchannelKraus,
    act_on_choi,
    circuit_to_kraus,
    dephasing_superchannel,
    identity_superchannel,
    output_channel,
    random_gen_extreme,
)
from superkit.utils.linalg import haar_unitary


def simulate_circuit(v, w, channel, rho):
    """直接模拟线路：V → 信道作用于系统 → W → 对辅助求迹"""
    ancilla = np.zeros((4, 4), dtype=complex)
    ancilla[0, 0] = 1.0
    state = v @ np.kron(rho.data, ancilla) @ v.conj().T
    lifted = [np.kron(k, np.eye(4)) for k in channel.kraus]
    state = sum(k @ state @ k.conj().T for k in lifted)
    state = w @ state @ w.conj().T
    return np.einsum("iaja->ij", state.reshape(2, 4, 2, 4))


class TestCircuitSuperchannel:
    """测试线路形式与 Kraus 形式"""

    def test_appendix_kraus_trace_preserving(self, bundle, rng):
        """Σ S_a†S_a = 1 ⊗ M，Tr M = 2，且 Ŝ 保持 Choi 态的迹"""
        s = circuit_to_kraus(bundle.extreme_superchannel())
        assert len(s.kraus) == 4
        total = sum(k.conj().T @ k for k in s.kraus)
        m = s.reference_operator()
        assert np.max(np.abs(total - np.kron(np.eye(2), m))) <= 1e-9
        assert np.trace(m) == pytest.approx(2.0, abs=1e-9)
        for _ in range(20):
            omega = random_kraus_channel(rng, dim=2, n_kraus=3).choi()
            assert np.trace(act_on_choi(s, omega).data) == pytest.approx(1.0, abs=1e-9)

    def test_random_kraus_reference_operator(self, rng):
        """随机线路：M = (Σ_m P_m P_m†)*，一般不是单位阵"""
        for _ in range(10):
            g = random_gen_extreme(rng)
            s = circuit_to_kraus(g)
            p = g.as_circuit().pre_blocks()
            expected = sum(pm @ pm.conj().T for pm in p).conj()
            assert np.allclose(s.reference_operator(), expected, atol=1e-12)
            total = sum(k.conj().T @ k for k in s.kraus)
            assert np.max(np.abs(total - np.eye(4))) > 1e-6

    def test_circuit_simulation_oracle(self, rng):
        """20 个随机线路 × 10 个输入态"""
        for _ in range(20):
            g = random_gen_extreme(rng)
            channel = random_kraus_channel(rng, dim=2, n_kraus=int(rng.integers(1, 5)))
            out = output_channel(g, channel)
            for _ in range(10):
                rho = ChannelGenerator.generate_state(rng)
                expected = simulate_circuit(g.V, g.W, channel, rho)
                assert np.allclose(out.apply(rho).data, expected, atol=1e-9)

    def test_choi_path_matches_kraus_path(self, rng):
        """超信道作用在 Choi 态上与输出信道的 Choi 态一致"""
        for _ in range(100):
            g = random_gen_extreme(rng)
            channel = random_kraus_channel(rng, dim=2, n_kraus=2)
            via_choi = act_on_choi(circuit_to_kraus(g), channel.choi())
            via_kraus = output_channel(g, channel).choi()
            assert trace_distance(via_choi, via_kraus) <= 1e-9

    def test_appendix_cross_check(self, bundle, appendix_channel):
        g = bundle.extreme_superchannel()
        via_choi = act_on_choi(circuit_to_kraus(g), appendix_channel.choi())
        via_kraus = output_channel(g, appendix_channel)
        assert np.allclose(via_choi.to_chi().data, via_kraus.chi().data, atol=1e-9)

    def test_identity_superchannel(self, random_channel):
        out = output_channel(identity_superchannel(), random_channel)
        assert np.allclose(out.choi().data, random_channel.choi().data, atol=1e-12)

    def test_not_unitary(self):
        with pytest.raises(ValueError):
            GenExtremeSuperchannel(np.ones((8, 8)), np.eye(8))

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            GenExtremeSuperchannel(np.eye(4), np.eye(8))

    def test_dimension_mismatch(self, random_superchannel):
        with pytest.raises(ValueError):
            output_channel(random_superchannel, KrausChannel.identity(4))

    def test_kraus_not_trace_preserving(self):
        with pytest.raises(ValueError):
            SuperchannelKraus((np.eye(4), np.eye(4)))

    def test_kraus_not_product_with_identity(self):
        """Σ S_a†S_a 必须形如 1 ⊗ M"""
        op = np.kron(np.diag([np.sqrt(1.5), np.sqrt(0.5)]), np.eye(2))
        with pytest.raises(ValueError):
            SuperchannelKraus((op,))

    def test_columns_normalized(self, rng):
        v = random_gen_extreme(rng).V
        assert np.allclose(np.linalg.norm(v, axis=0), 1.0, atol=1e-12)


class TestMixedAncillaCircuits:
    """测试前后辅助寄存器维数不同的线路"""

    def test_fresh_ancilla_is_least_significant(self, rng):
        """W = W' ⊗ 1 时新增的辅助比特不影响输出"""
        v = haar_unitary(4, rng)
        w_small = haar_unitary(4, rng)
        w = np.kron(w_small, np.eye(2))
        big = CircuitSuperchannel(v, w, pre_ancilla_dim=2, post_ancilla_dim=4)
        small = CircuitSuperchannel(v, w_small, pre_ancilla_dim=2, post_ancilla_dim=2)
        channel = random_kraus_channel(rng)
        rho = BASIS_STATES["x"].density()
        expected = output_channel(small, channel).apply(rho).data
        assert np.allclose(output_channel(big, channel).apply(rho).data, expected, atol=1e-12)

    def test_appendix_components(self, bundle):
        u = bundle.decomposition_channel()
        for circuit in (bundle.general_superchannel(), *bundle.decomposition_components()):
            s = circuit_to_kraus(circuit)
            assert len(s.kraus) == circuit.post_ancilla_dim
            assert output_channel(circuit, u).dim_out == 2

    def test_invalid_ancilla_dims(self, rng):
        with pytest.raises(ValueError):
            CircuitSuperchannel(haar_unitary(4, rng), haar_unitary(6, rng), 2, 3)


class TestDephasingSuperchannel:
    """测试退相位超信道"""

    def test_diagonal_preserved(self, bundle, rng):
        sd = bundle.dephasing_superchannel()
        for _ in range(100):
            channel = random_kraus_channel(rng, dim=2, n_kraus=int(rng.integers(1, 5)))
            before = channel.choi().data
            after = output_channel(sd, channel).choi().data
            assert np.allclose(np.diag(after), np.diag(before), atol=1e-9)

    def test_off_diagonal_compressed(self, bundle, appendix_channel):
        before = appendix_channel.choi().data
        after = output_channel(bundle.dephasing_superchannel(), appendix_channel).choi().data
        assert np.all(np.abs(after) <= np.abs(before) + 1e-9)

    def test_random_controlled_unitaries(self, rng, random_channel):
        blocks = [haar_unitary(4, rng) for _ in range(4)]
        sd = dephasing_superchannel(*blocks)
        before = random_channel.choi().data
        after = output_channel(sd, random_channel).choi().data
        assert np.allclose(np.diag(after), np.diag(before), atol=1e-9)

    def test_identity_blocks(self, random_channel):
        sd = dephasing_superchannel(*(np.eye(4) for _ in range(4)))
        out = output_channel(sd, random_channel)
        assert np.allclose(out.choi().data, random_channel.choi().data, atol=1e-12)

    def test_invalid_block(self):
        with pytest.raises(ValueError):
            dephasing_superchannel(np.eye(2), np.eye(4), np.eye(4), np.eye(4))


class TestSuperchannelChoi:
    """测试超信道的 Choi 表示"""

    def test_properties(self, bundle):
        j = superchannel_choi(circuit_to_kraus(bundle.extreme_superchannel()))
        assert j.data.shape == (16, 16)
        assert np.trace(j.data) == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(j.data).min() >= -1e-9

    def test_action_matches_kraus(self, rng, random_superchannel):
        s = circuit_to_kraus(random_superchannel)
        j = superchannel_choi(s)
        for _ in range(50):
            omega = random_kraus_channel(rng, dim=2, n_kraus=4).choi()
            assert np.allclose(j.apply(omega).data, act_on_choi(s, omega).data, atol=1e-9)

    def test_mixture(self, rng):
        chois = [superchannel_choi(circuit_to_kraus(random_gen_extreme(rng))) for _ in range(2)]
        mixed = SuperchannelChoi.mixture(chois, [0.5, 0.5])
        assert np.allclose(mixed.data, (chois[0].data + chois[1].data) / 2, atol=1e-12)

    def test_mixture_invalid_weights(self, random_superchannel):
        j = superchannel_choi(circuit_to_kraus(random_superchannel))
        with pytest.raises(ValueError):
            SuperchannelChoi.mixture([j, j], [0.7, 0.7])

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            SuperchannelChoi(np.eye(4) / 4)

    def test_not_psd(self):
        data = np.eye(16) / 16
        data[0, 0] = -0.1
        data[1, 1] = 0.1 + 2 / 16
        with pytest.raises(ValueError):
            SuperchannelChoi(data)

    def test_not_superchannel(self):
        """迹为 1 的半正定矩阵不一定把信道映射为信道"""
        data = np.zeros((16, 16))
        data[0, 0] = 1.0
        with pytest.raises(ValueError):
            SuperchannelChoi(data)
