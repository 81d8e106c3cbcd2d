"""
命令行测试
"""

import json

import numpy as np
import pytest

from superkit.algorithms.grape import CNOT, SpinSystem
from superkit.cli import build_parser, main, parse_lambdas
from superkit.data.loader import DataLoader, dump_json
from superkit.superchannel.circuit import random_gen_extreme
from superkit.utils.linalg import X


def _last_json_line(text: str) -> dict:
    lines = [line for line in text.strip().splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


class TestParseLambdas:
    """测试 λ 列表解析"""

    def test_range(self):
        lambdas = parse_lambdas("0:0.5:0.05")
        assert len(lambdas) == 11
        assert lambdas[0] == 0.0
        assert lambdas[-1] == 0.5
        assert lambdas[3] == 0.15

    def test_list(self):
        assert parse_lambdas("0.1, 0.2,0.3") == [0.1, 0.2, 0.3]

    def test_invalid(self):
        with pytest.raises(ValueError):
            parse_lambdas("0:0.5")
        with pytest.raises(ValueError):
            parse_lambdas("0:0.5:0")
        with pytest.raises(ValueError):
            parse_lambdas("0.5:0:0.1")


class TestParser:
    """测试参数解析"""

    def test_run_defaults(self):
        args = build_parser().parse_args(["run", "extreme"])
        assert args.out is None
        assert args.format == "csv"
        assert not args.raw_matrices

    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            build_parser().parse_args(["run", "teleport"])

    def test_component_range(self):
        with pytest.raises(ValueError):
            build_parser().parse_args(["decompose", "--target", "t.json", "--components", "5"])


class TestMain:
    """测试命令执行"""

    def test_run_extreme(self, tmp_path, capsys):
        out = tmp_path / "extreme"
        code = main(["run", "extreme", "--samples", "20", "--out", str(out)])
        assert code == 0
        summary = _last_json_line(capsys.readouterr().out)
        assert summary["experiment"] == "extreme"
        assert (out / "meta.json").exists()
        assert (out / "bloch_out_S_E.csv").exists()

    def test_run_json_format(self, tmp_path):
        out = tmp_path / "json"
        argv = ["run", "dephasing", "--samples", "10", "--format", "json", "--out", str(out)]
        assert main(argv) == 0
        assert (out / "fidelities.json").exists()

    def test_spec_output_dir(self, tmp_path, monkeypatch):
        """--out 缺省时使用实验描述中的目录"""
        monkeypatch.chdir(tmp_path)
        spec = {"name": "extreme", "sample_count": 5, "output_dir": "from_spec"}
        dump_json(spec, tmp_path / "s.json")
        assert main(["run", "extreme", "--spec", "s.json"]) == 0
        assert (tmp_path / "from_spec" / "meta.json").exists()

    def test_missing_spec(self, tmp_path, capsys):
        code = main(["run", "extreme", "--spec", str(tmp_path / "missing.json")])
        assert code == 1
        error = _last_json_line(capsys.readouterr().err)
        assert error["error"] == "FileNotFoundError"
        assert "missing.json" in error["message"]

    def test_invalid_matrix(self, tmp_path, capsys):
        DataLoader.save_matrix(np.array([[1.0, 0.0], [0.0, 0.5]]), tmp_path / "bad.json")
        spec = {"name": "decomposition", "matrices": {"decomposition.U": "bad.json"}}
        dump_json(spec, tmp_path / "spec.json")
        assert main(["run", "decomposition", "--spec", str(tmp_path / "spec.json")]) == 1
        assert _last_json_line(capsys.readouterr().err)["error"] == "ValueError"

    def test_decompose(self, tmp_path, capsys):
        g = random_gen_extreme(5)
        target = {"V": DataLoader.encode_matrix(g.V), "W": DataLoader.encode_matrix(g.W)}
        dump_json(target, tmp_path / "target.json")
        argv = [
            "decompose", "--target", str(tmp_path / "target.json"), "--components", "1",
            "--restarts", "1", "--max-iters", "5", "--out", str(tmp_path),
        ]
        assert main(argv) == 0
        summary = _last_json_line(capsys.readouterr().out)
        assert summary["weights"] == [1.0]
        saved = json.loads((tmp_path / "decomposition.json").read_text(encoding="utf-8"))
        assert len(saved["components"]) == 1

    def test_qec_scan(self, tmp_path, capsys):
        argv = [
            "qec-scan", "--lambdas", "0,0.2", "--restarts", "0", "--max-iters", "5",
            "--out", str(tmp_path),
        ]
        assert main(argv) == 0
        summary = _last_json_line(capsys.readouterr().out)
        assert summary["lambdas"] == 2
        header = (tmp_path / "qec_scan.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "lambda,f_corrected,f_uncorrected,converged"
        assert (tmp_path / "qec_locations.csv").exists()

    def test_grape(self, tmp_path, capsys):
        dump_json(
            DataLoader.encode_spin_system(SpinSystem((0.0,), names=("H",))),
            tmp_path / "system.json",
        )
        DataLoader.save_matrix(X, tmp_path / "x.json")
        argv = [
            "grape", "--system", str(tmp_path / "system.json"),
            "--target", str(tmp_path / "x.json"),
            "--slices", "50", "--duration", "1e-3", "--max-iters", "200", "--out", str(tmp_path),
        ]
        assert main(argv) == 0
        summary = _last_json_line(capsys.readouterr().out)
        assert summary["fidelity"] >= 0.995
        assert (tmp_path / "pulse.json").exists()
        header = (tmp_path / "grape_history.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "iter,fidelity"

    def test_grape_echo_init(self, tmp_path, capsys):
        system = SpinSystem.crotonic_acid().subsystem([0, 1])
        dump_json(DataLoader.encode_spin_system(system), tmp_path / "system.json")
        DataLoader.save_matrix(CNOT, tmp_path / "cnot.json")
        argv = [
            "grape", "--system", str(tmp_path / "system.json"),
            "--target", str(tmp_path / "cnot.json"), "--init", "echo-cnot",
            "--gradient", "exact", "--slices", "100", "--duration", "0.02",
            "--max-iters", "1", "--out", str(tmp_path),
        ]
        assert main(argv) == 0
        summary = _last_json_line(capsys.readouterr().out)
        assert summary["fidelity"] > 0.9

    def test_bad_arguments(self, capsys):
        assert main(["run", "teleport"]) == 1
        error = _last_json_line(capsys.readouterr().err)
        assert error["error"] == "ArgumentError"
        assert "teleport" in error["message"]

    def test_missing_command(self, capsys):
        assert main([]) == 1
        assert _last_json_line(capsys.readouterr().err)["error"] == "ArgumentError"
