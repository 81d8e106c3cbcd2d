"""
实验报告的导出与加载

导出的文件集合是确定的：
    rho_<basis>.json          各信道在输入态 <basis> 下的输出密度矩阵 {信道名: 矩阵}
    chi_<channel>.json        χ 矩阵
    choi_<channel>.json       Choi 态
    bloch_in.csv              Fibonacci 输入态的 Bloch 矢量（列 x,y,z）
    bloch_out_<channel>.csv   对应输出的 Bloch 矢量
    fidelities.csv            指标长表
    <table>.csv               其他表（如 qec_scan）
    <artifact>.json           其他 JSON 数据（如 GRAPE 脉冲）
    meta.json                 种子、容差、矩阵包哈希、版本与文件清单

format="json" 时表格类文件改写为 JSON 记录。JSON 键排序、浮点数以 repr 写出，
CSV 以 %.17g 写出，因此相同输入得到逐字节相同的文件，读回后数值完全一致。
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from superkit.core.channels import ChiMatrix, ChoiState
from superkit.core.states import BASIS_LABELS, DensityMatrix
from superkit.data.loader import DataLoader, dump_json
from superkit.evaluation.metrics import FidelityTable
from superkit.utils.linalg import PSD_ATOL

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")
BLOCH_COLUMNS = ["x", "y", "z"]
FLOAT_FORMAT = "%.17g"


@dataclass
class ExperimentReport:
    """一次实验的全部结果

    Args:
        name: 实验名
        basis_outputs: {信道名: {basis: 输出密度矩阵}}
        chi: {信道名: χ 矩阵}
        choi: {信道名: Choi 态}
        bloch_in: 输入 Bloch 点云 (n, 3)
        bloch_out: {信道名: 输出 Bloch 点云}
        fidelities: 指标表
        tables: 其他表
        artifacts: 其他可 JSON 序列化的数据
        metadata: 种子、容差、矩阵包哈希、版本等
    """

    name: str
    basis_outputs: dict[str, dict[str, DensityMatrix]] = field(default_factory=dict)
    chi: dict[str, ChiMatrix] = field(default_factory=dict)
    choi: dict[str, ChoiState] = field(default_factory=dict)
    bloch_in: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    bloch_out: dict[str, np.ndarray] = field(default_factory=dict)
    fidelities: FidelityTable = field(default_factory=FidelityTable)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    artifacts: dict[str, Any] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def channels(self) -> list[str]:
        return list(self.basis_outputs)

    @property
    def tolerance(self) -> float:
        return float(self.metadata.get("tolerance", PSD_ATOL))


def _write_table(df: pd.DataFrame, directory: Path, stem: str, fmt: str) -> str:
    if fmt == "csv":
        filename = f"{stem}.csv"
        df.to_csv(
            directory / filename, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
    else:
        filename = f"{stem}.json"
        dump_json(df.to_dict(orient="records"), directory / filename)
    return filename


def _read_table(directory: Path, filename: str) -> pd.DataFrame:
    path = directory / filename
    if not path.exists():
        raise FileNotFoundError(f"报告文件不存在: {path}")
    if filename.endswith(".csv"):
        return pd.read_csv(path, float_precision="round_trip")
    with open(path, "r", encoding="utf-8") as f:
        return pd.DataFrame(json.load(f))


def export_report(report: ExperimentReport, output_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """把报告写入 output_dir

    Returns:
        写出的文件路径（按写出顺序）

    Raises:
        ValueError: 未知格式
        OSError: 输出目录不可写
    """
    if fmt not in FORMATS:
        raise ValueError(f"未知导出格式: {fmt}，可选 {FORMATS}")
    directory = Path(output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    if report.basis_outputs:
        for label in BASIS_LABELS:
            payload = {
                channel: DataLoader.encode_matrix(outputs[label].data)
                for channel, outputs in report.basis_outputs.items()
            }
            written.append(dump_json(payload, directory / f"rho_{label}.json").name)

    for channel, chi in report.chi.items():
        written.append(DataLoader.save_matrix(chi.data, directory / f"chi_{channel}.json").name)
    for channel, choi in report.choi.items():
        written.append(DataLoader.save_matrix(choi.data, directory / f"choi_{channel}.json").name)

    if report.bloch_out:
        clouds = {"bloch_in": report.bloch_in}
        clouds.update({f"bloch_out_{c}": cloud for c, cloud in report.bloch_out.items()})
        for stem, cloud in clouds.items():
            df = pd.DataFrame(np.asarray(cloud, dtype=float).reshape(-1, 3), columns=BLOCH_COLUMNS)
            written.append(_write_table(df, directory, stem, fmt))

    written.append(_write_table(report.fidelities.to_dataframe(), directory, "fidelities", fmt))
    for stem, df in report.tables.items():
        written.append(_write_table(df, directory, stem, fmt))
    for stem, payload in report.artifacts.items():
        written.append(dump_json(payload, directory / f"{stem}.json").name)

    meta = dict(report.metadata)
    meta.update({
        "name": report.name,
        "format": fmt,
        "channels": {
            "basis": list(report.basis_outputs),
            "chi": list(report.chi),
            "choi": list(report.choi),
            "bloch": list(report.bloch_out),
        },
        "tables": list(report.tables),
        "artifacts": list(report.artifacts),
        "files": sorted(written),
    })
    written.append(dump_json(meta, directory / "meta.json").name)
    logger.info(f"报告已导出到: {directory} ({len(written)} 个文件)")
    return [directory / name for name in written]


def load_report(directory: str | Path) -> ExperimentReport:
    """读回 export_report 写出的报告（各对象按记录的容差重新校验）

    Raises:
        FileNotFoundError: 目录或文件缺失
    """
    directory = Path(directory)
    meta_path = directory / "meta.json"
    if not meta_path.exists():
        logger.error(f"报告元数据不存在: {meta_path}")
        raise FileNotFoundError(f"报告元数据不存在: {meta_path}")
    with open(meta_path, "r", encoding="utf-8") as f:
        meta = json.load(f)

    fmt = meta["format"]
    tol = float(meta.get("tolerance", PSD_ATOL))
    channels = meta["channels"]
    ext = "csv" if fmt == "csv" else "json"

    basis_outputs: dict[str, dict[str, DensityMatrix]] = {c: {} for c in channels["basis"]}
    if channels["basis"]:
        for label in BASIS_LABELS:
            with open(directory / f"rho_{label}.json", "r", encoding="utf-8") as f:
                payload = json.load(f)
            for channel in channels["basis"]:
                basis_outputs[channel][label] = DensityMatrix(
                    DataLoader.decode_matrix(payload[channel]), tol=max(tol, 1e-10)
                )

    chi = {
        c: ChiMatrix(DataLoader.load_matrix(directory / f"chi_{c}.json"), tol=tol)
        for c in channels["chi"]
    }
    choi = {
        c: ChoiState(DataLoader.load_matrix(directory / f"choi_{c}.json"), tol=tol)
        for c in channels["choi"]
    }

    bloch_in = np.zeros((0, 3))
    bloch_out = {}
    if channels["bloch"]:
        bloch_in = _read_table(directory, f"bloch_in.{ext}")[BLOCH_COLUMNS].to_numpy(dtype=float)
        for c in channels["bloch"]:
            df = _read_table(directory, f"bloch_out_{c}.{ext}")
            bloch_out[c] = df[BLOCH_COLUMNS].to_numpy(dtype=float)

    fidelities = FidelityTable.from_dataframe(_read_table(directory, f"fidelities.{ext}"))
    tables = {stem: _read_table(directory, f"{stem}.{ext}") for stem in meta["tables"]}
    artifacts = {}
    for stem in meta["artifacts"]:
        with open(directory / f"{stem}.json", "r", encoding="utf-8") as f:
            artifacts[stem] = json.load(f)

    metadata = {
        k: v
        for k, v in meta.items()
        if k not in ("name", "format", "channels", "tables", "artifacts", "files")
    }
    logger.info(f"加载报告: {directory} ({meta['name']})")
    return ExperimentReport(
        name=meta["name"],
        basis_outputs=basis_outputs,
        chi=chi,
        choi=choi,
        bloch_in=bloch_in,
        bloch_out=bloch_out,
        fidelities=fidelities,
        tables=tables,
        artifacts=artifacts,
        metadata=metadata,
    )
