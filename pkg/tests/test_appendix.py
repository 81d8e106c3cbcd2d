"""
附录矩阵解析与矩阵包测试
"""

import numpy as np
import pytest

from superkit.data.appendix import (
    EXPECTED_SHAPES,
    PROJECTED_UNITARITY_BOUND,
    RAW_TOL,
    RAW_UNITARITY_BOUND,
    AppendixBundle,
    bundle_hash,
    load_raw_matrices,
    parse_entry,
    parse_matrix_text,
)
from superkit.utils.linalg import PSD_ATOL


class TestParsing:
    """测试矩阵文本解析"""

    def test_parse_entry(self):
        assert parse_entry("-0.0109+0.1787i") == complex(-0.0109, 0.1787)
        assert parse_entry(" 0.5 - 0.25i ") == complex(0.5, -0.25)
        assert parse_entry("1") == 1.0

    def test_parse_sections(self):
        text = "# 注释\n[a]\n1 & 0\n0 & 1i\n\n[b]\n0.5\n"
        matrices = parse_matrix_text(text)
        assert sorted(matrices) == ["a", "b"]
        assert np.array_equal(matrices["a"], np.array([[1, 0], [0, 1j]]))
        assert matrices["b"].shape == (1, 1)

    def test_duplicate_section(self):
        with pytest.raises(ValueError):
            parse_matrix_text("[a]\n1\n[a]\n1\n")

    def test_row_before_section(self):
        with pytest.raises(ValueError):
            parse_matrix_text("1 & 0\n[a]\n1\n")

    def test_ragged_rows(self):
        with pytest.raises(ValueError):
            parse_matrix_text("[a]\n1 & 0\n1\n")

    def test_empty_section(self):
        with pytest.raises(ValueError):
            parse_matrix_text("[a]\n[b]\n1\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_raw_matrices(tmp_path / "missing.txt")


class TestAppendixBundle:
    """测试矩阵包"""

    def test_shapes(self):
        matrices = load_raw_matrices()
        for name, shape in EXPECTED_SHAPES.items():
            assert matrices[name].shape == shape

    def test_raw_unitarity(self, bundle):
        errors = bundle.unitarity_errors(projected=False)
        assert set(errors) == set(EXPECTED_SHAPES)
        assert max(errors.values()) <= RAW_UNITARITY_BOUND

    def test_projected_unitarity(self, bundle):
        assert max(bundle.unitarity_errors().values()) <= PROJECTED_UNITARITY_BOUND

    def test_projection_is_close(self, bundle):
        for name in EXPECTED_SHAPES:
            diff = np.abs(bundle[name] - bundle.raw_matrices[name])
            assert diff.max() <= RAW_UNITARITY_BOUND

    def test_raw_mode(self, raw_bundle):
        assert raw_bundle.tol == RAW_TOL
        assert np.array_equal(raw_bundle["extreme.V"], raw_bundle.raw_matrices["extreme.V"])

    def test_projected_tolerance(self, bundle):
        assert bundle.tol == PSD_ATOL

    def test_read_only(self, bundle):
        with pytest.raises(ValueError):
            bundle["extreme.V"][0, 0] = 0.0

    def test_hash_stable(self, bundle):
        assert bundle.hash == AppendixBundle.load().hash
        assert bundle.hash == bundle_hash(load_raw_matrices())
        assert len(bundle.hash) == 64

    def test_hash_changes_with_override(self, bundle):
        override = bundle.with_overrides({"decomposition.U": np.array([[0, 1], [1, 0]])})
        assert override.hash != bundle.hash
        assert np.array_equal(override["decomposition.U"], [[0, 1], [1, 0]])

    def test_missing_matrix(self):
        matrices = load_raw_matrices()
        del matrices["extreme.W"]
        with pytest.raises(ValueError):
            AppendixBundle(matrices)

    def test_wrong_shape(self, bundle):
        with pytest.raises(ValueError):
            bundle.with_overrides({"extreme.V": np.eye(4)})

    def test_not_unitary(self, bundle):
        with pytest.raises(ValueError):
            bundle.with_overrides({"decomposition.U": np.array([[1, 0], [0, 0.9]])})


class TestBuilders:
    """测试由矩阵包构造的信道与超信道"""

    def test_random_channel(self, bundle):
        channel = bundle.random_channel()
        assert channel.dim_in == 2
        assert channel.n_kraus == 2

    def test_superchannels(self, bundle):
        assert bundle.extreme_superchannel().V.shape == (8, 8)
        assert bundle.dephasing_superchannel().W.shape == (8, 8)
        assert bundle.general_superchannel().post_ancilla_dim == 8
        assert len(bundle.decomposition_components()) == 2

    def test_raw_builders(self, raw_bundle):
        channel = raw_bundle.random_channel()
        total = sum(k.conj().T @ k for k in channel.kraus)
        assert np.max(np.abs(total - np.eye(2))) <= RAW_TOL
        raw_bundle.extreme_superchannel()
        raw_bundle.dephasing_superchannel()
