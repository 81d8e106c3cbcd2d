"""
纠缠辅助纠错码测试
"""

import numpy as np
import pytest

from superkit.algorithms.optimizer import OptimizerConfig
from superkit.algorithms.qec import (
    N_CODE_PARAMS,
    ADChannel,
    EbitCode,
    EbitCodeSearch,
    ad_kraus,
    corrected_channel,
    entanglement_fidelity,
)
from superkit.core.channels import KrausChannel
from superkit.utils.linalg import X, haar_unitary


class TestAmplitudeDamping:
    """测试振幅阻尼信道"""

    def test_trace_preserving_grid(self):
        for lam in np.linspace(0, 1, 101):
            k0, k1 = ADChannel(lam).kraus_operators()
            total = k0.conj().T @ k0 + k1.conj().T @ k1
            assert np.max(np.abs(total - np.eye(2))) <= 1e-12

    def test_zero_damping_is_identity(self):
        ch = ad_kraus(0.0)
        assert np.allclose(ch.kraus[0], np.eye(2))
        assert np.allclose(ch.kraus[1], 0.0)

    def test_invalid_lambda(self):
        with pytest.raises(ValueError):
            ad_kraus(-0.1)
        with pytest.raises(ValueError):
            ad_kraus(1.5)

    def test_uncorrected_fidelity(self):
        assert ADChannel(0.36).uncorrected_fidelity() == pytest.approx(0.81)
        for lam in (0.0, 0.1, 0.36, 0.9):
            direct = entanglement_fidelity(ad_kraus(lam))
            assert direct == pytest.approx(ADChannel(lam).uncorrected_fidelity(), abs=1e-12)


class TestEntanglementFidelity:
    """测试纠缠保真度"""

    def test_identity(self):
        assert entanglement_fidelity(KrausChannel.identity(2)) == pytest.approx(1.0)

    def test_bit_flip(self):
        assert entanglement_fidelity(KrausChannel.from_unitary(X)) == pytest.approx(0.0)

    def test_matches_choi_overlap(self, random_channel):
        """F_e = ⟨ω|(ℰ⊗1)(|ω⟩⟨ω|)|ω⟩"""
        omega = np.array([1, 0, 0, 1]) / np.sqrt(2)
        expected = np.real(omega.conj() @ random_channel.choi().data @ omega)
        assert entanglement_fidelity(random_channel) == pytest.approx(expected, abs=1e-12)

    def test_qubit_only(self):
        with pytest.raises(ValueError):
            entanglement_fidelity(KrausChannel.identity(4))


class TestEbitCode:
    """测试纠缠辅助码的结构"""

    def test_trivial_code(self):
        """平凡码：噪声落在纠缠比特上时逻辑比特不受影响"""
        for lam in (0.1, 0.3, 0.5):
            f = entanglement_fidelity(corrected_channel(EbitCode.trivial(), lam))
            expected = 0.5 * ADChannel(lam).uncorrected_fidelity() + 0.5
            assert f == pytest.approx(expected, abs=1e-12)

    def test_corrected_channel_is_cptp(self, rng):
        for lam in (0.0, 0.25, 0.5, 1.0):
            code = EbitCode.from_alice_unitary(haar_unitary(4, rng), haar_unitary(8, rng))
            ch = corrected_channel(code, lam)
            total = sum(k.conj().T @ k for k in ch.kraus)
            assert np.max(np.abs(total - np.eye(2))) <= 1e-9

    def test_noise_model_linearity(self, rng):
        """等概率噪声模型的 F_e 等于两处噪声 F_e 的平均"""
        code = EbitCode.from_alice_unitary(haar_unitary(4, rng), haar_unitary(8, rng))
        lam = 0.3
        mixed = entanglement_fidelity(corrected_channel(code, lam))
        first = entanglement_fidelity(corrected_channel(code.with_noise_model({0: 1.0}), lam))
        second = entanglement_fidelity(corrected_channel(code.with_noise_model({1: 1.0}), lam))
        assert mixed == pytest.approx((first + second) / 2, abs=1e-12)

    def test_encoder_must_ignore_receiver_qubit(self, rng):
        with pytest.raises(ValueError):
            EbitCode(haar_unitary(8, rng), np.eye(8))

    def test_noise_on_receiver_qubit(self):
        with pytest.raises(ValueError):
            EbitCode.trivial({2: 1.0})

    def test_noise_probabilities(self):
        with pytest.raises(ValueError):
            EbitCode.trivial({0: 0.5, 1: 0.6})

    def test_pack_round_trip(self, rng):
        code = EbitCode.from_alice_unitary(haar_unitary(4, rng), haar_unitary(8, rng))
        search = EbitCodeSearch()
        params = search.pack(code)
        assert params.shape == (N_CODE_PARAMS,)
        encoder, decoder = search.unpack(params)
        assert np.allclose(encoder, code.encoder, atol=1e-10)
        assert np.allclose(decoder, code.decoder, atol=1e-10)
        assert search.fidelity(params, 0.2) == pytest.approx(
            entanglement_fidelity(corrected_channel(code, 0.2)), abs=1e-10
        )


class TestEbitCodeSearch:
    """测试码搜索"""

    def test_no_noise(self):
        search = EbitCodeSearch(OptimizerConfig(seed=0, restarts=0, max_iters=10))
        code = search.optimize_code(0.0)
        assert entanglement_fidelity(corrected_channel(code, 0.0)) >= 1 - 1e-6

    def test_not_worse_than_trivial(self):
        search = EbitCodeSearch(OptimizerConfig(seed=1, restarts=0, max_iters=20))
        result = search.search(0.3)
        trivial = entanglement_fidelity(corrected_channel(EbitCode.trivial(), 0.3))
        assert result.fidelity >= trivial - 1e-9
        assert result.fidelity > result.uncorrected
        assert search.get_statistics()["objective_calls"] > 0

    def test_invalid_lambda(self):
        with pytest.raises(ValueError):
            EbitCodeSearch().optimize_code(1.2)

    def test_fidelity_curve_columns(self):
        search = EbitCodeSearch(OptimizerConfig(seed=2, restarts=0, max_iters=5))
        df = search.fidelity_curve([0.0, 0.2])
        assert list(df.columns) == [
            "lambda",
            "f_corrected",
            "f_uncorrected",
            "converged",
            "f_noise_qubit_0",
            "f_noise_qubit_1",
        ]
        assert len(df) == 2
        assert np.all(df["f_corrected"] - df["f_uncorrected"] >= -1e-6)

    def test_location_columns_average_to_mixture(self):
        """两处等概率噪声下，F_e 是两个固定位置 F_e 的平均"""
        search = EbitCodeSearch(OptimizerConfig(seed=5, restarts=0, max_iters=20))
        df = search.fidelity_curve([0.1, 0.3])
        average = 0.5 * (df["f_noise_qubit_0"] + df["f_noise_qubit_1"])
        assert np.allclose(average, df["f_corrected"], atol=1e-6)
        assert np.all(df[["f_noise_qubit_0", "f_noise_qubit_1"]].to_numpy() <= 1 + 1e-9)

    @pytest.mark.slow
    def test_beats_uncorrected(self):
        search = EbitCodeSearch(OptimizerConfig(seed=3, restarts=2, max_iters=500))
        df = search.fidelity_curve([0.1, 0.2, 0.3])
        assert np.all(df["f_corrected"] > df["f_uncorrected"])

    @pytest.mark.slow
    def test_monotone_in_lambda(self):
        lambdas = [round(0.05 * k, 2) for k in range(1, 11)]
        search = EbitCodeSearch(OptimizerConfig(seed=4, restarts=2, max_iters=500))
        df = search.fidelity_curve(lambdas)
        assert np.all(np.diff(df["f_corrected"].to_numpy()) <= 1e-3)
