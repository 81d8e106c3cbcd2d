"""
指标表、Bloch 仿射表示与报告导出测试
"""

import numpy as np
import pandas as pd
import pytest

from superkit.core.channels import KrausChannel
from superkit.core.states import BASIS_STATES, fibonacci_sphere
from superkit.core.tomography import basis_outputs
from superkit.evaluation.metrics import (
    COLUMNS,
    FidelityTable,
    affine_bloch_map,
    bloch_array,
    bloch_cloud,
    bloch_distances,
    ellipsoid_axes,
)
from superkit.evaluation.report import ExperimentReport, export_report, load_report
from superkit.utils.linalg import X


class TestBloch:
    """测试 Bloch 工具"""

    def test_bloch_array(self):
        assert np.allclose(bloch_array(BASIS_STATES["x"].density()), [1, 0, 0])
        assert np.allclose(bloch_array(BASIS_STATES["zbar"].density()), [0, 0, -1])

    def test_cloud_keeps_order(self):
        states = fibonacci_sphere(10)
        cloud = bloch_cloud(KrausChannel.identity(2).apply, states)
        assert cloud.shape == (10, 3)
        assert np.allclose(cloud, [s.bloch().as_array() for s in states])

    def test_distances_shape_mismatch(self):
        with pytest.raises(ValueError):
            bloch_distances(np.zeros((3, 3)), np.zeros((2, 3)))

    def test_affine_map_reproduces_channel(self, random_channel, random_states):
        T, t = affine_bloch_map(random_channel)
        for rho in random_states[:20]:
            r = bloch_array(rho)
            assert np.allclose(bloch_array(random_channel.apply(rho)), T @ r + t, atol=1e-12)

    def test_amplitude_damping_axes(self, amplitude_damping):
        lam = 0.3
        T, t = affine_bloch_map(amplitude_damping)
        assert np.allclose(t, [0, 0, lam])
        expected = sorted([np.sqrt(1 - lam), np.sqrt(1 - lam), 1 - lam], reverse=True)
        assert np.allclose(ellipsoid_axes(amplitude_damping), expected)

    def test_unitary_axes(self):
        assert np.allclose(ellipsoid_axes(KrausChannel.from_unitary(X)), [1, 1, 1])

    def test_qubit_only(self):
        with pytest.raises(ValueError):
            affine_bloch_map(KrausChannel.identity(4))


class TestFidelityTable:
    """测试指标表"""

    def test_add_and_query(self):
        table = FidelityTable()
        table.add("exp", "A", "z", "state_fidelity", 0.5)
        assert table.value("A", "z", "state_fidelity") == 0.5
        with pytest.raises(KeyError):
            table.value("A", "x", "state_fidelity")

    def test_basis_comparison(self, random_channel):
        outputs = basis_outputs(random_channel)
        table = FidelityTable()
        table.add_basis_comparison("exp", "self", outputs, outputs)
        df = table.to_dataframe()
        assert list(df.columns) == COLUMNS
        assert len(df) == 8
        fidelities = df[df["metric"] == "state_fidelity"]["value"]
        distances = df[df["metric"] == "trace_distance"]["value"]
        assert np.allclose(fidelities, 1.0)
        assert np.allclose(distances, 0.0, atol=1e-12)

    def test_process_and_bloch(self, random_channel):
        table = FidelityTable()
        chi = random_channel.chi()
        table.add_process_fidelity("exp", "self", chi, chi)
        cloud = np.zeros((4, 3))
        table.add_bloch_comparison("exp", "self", cloud, cloud + [0, 0, 0.5])
        assert table.value("self", "process", "process_fidelity") == pytest.approx(1.0)
        assert table.value("self", "bloch", "bloch_distance_max") == pytest.approx(0.5)

    def test_statistics(self):
        df = pd.DataFrame(
            [["e", "A", str(k), "m", float(k)] for k in range(5)], columns=COLUMNS
        )
        stats = FidelityTable.calculate_statistics(df)
        assert stats["A/m"]["mean"] == pytest.approx(2.0)
        assert stats["A/m"]["max"] == 4.0

    def test_export_and_rebuild(self, tmp_path):
        table = FidelityTable()
        table.add("e", "A", "z", "m", 1.0 / 3.0)
        path = table.export_results(tmp_path / "out" / "fid.csv")
        rebuilt = FidelityTable.from_dataframe(pd.read_csv(path, float_precision="round_trip"))
        assert rebuilt.records == table.records


@pytest.fixture
def small_report(random_channel):
    states = fibonacci_sphere(8)
    report = ExperimentReport(name="demo", metadata={"seed": 1, "tolerance": 1e-9})
    report.basis_outputs["E"] = basis_outputs(random_channel)
    report.chi["E"] = random_channel.chi()
    report.choi["E"] = random_channel.choi()
    report.bloch_in = np.array([s.bloch().as_array() for s in states])
    report.bloch_out["E"] = bloch_cloud(random_channel.apply, states)
    report.fidelities.add("demo", "E", "z", "state_fidelity", 0.123456789)
    report.tables["curve"] = pd.DataFrame({"lambda": [0.0, 0.1], "value": [1.0, 0.9]})
    report.artifacts["extra"] = {"note": "ok"}
    return report


class TestReport:
    """测试报告导出"""

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip(self, tmp_path, small_report, fmt):
        export_report(small_report, tmp_path, fmt=fmt)
        loaded = load_report(tmp_path)
        assert loaded.name == "demo"
        assert loaded.channels == ["E"]
        assert np.array_equal(loaded.choi["E"].data, small_report.choi["E"].data)
        assert np.array_equal(loaded.chi["E"].data, small_report.chi["E"].data)
        assert np.array_equal(
            loaded.basis_outputs["E"]["y"].data, small_report.basis_outputs["E"]["y"].data
        )
        assert np.array_equal(loaded.bloch_out["E"], small_report.bloch_out["E"])
        assert np.array_equal(loaded.bloch_in, small_report.bloch_in)
        assert loaded.fidelities.records == small_report.fidelities.records
        assert loaded.tables["curve"]["value"].tolist() == [1.0, 0.9]
        assert loaded.artifacts["extra"] == {"note": "ok"}
        assert loaded.metadata["seed"] == 1

    def test_file_set(self, tmp_path, small_report):
        files = {p.name for p in export_report(small_report, tmp_path)}
        expected = {f"rho_{b}.json" for b in ("z", "zbar", "x", "y")} | {
            "chi_E.json",
            "choi_E.json",
            "bloch_in.csv",
            "bloch_out_E.csv",
            "fidelities.csv",
            "curve.csv",
            "extra.json",
            "meta.json",
        }
        assert files == expected

    def test_byte_stable(self, tmp_path, small_report):
        first = export_report(small_report, tmp_path / "a")
        second = export_report(small_report, tmp_path / "b")
        for a, b in zip(first, second):
            assert a.name == b.name
            assert a.read_bytes() == b.read_bytes()

    def test_unknown_format(self, tmp_path, small_report):
        with pytest.raises(ValueError):
            export_report(small_report, tmp_path, fmt="xml")

    def test_missing_meta(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_report(tmp_path)
