"""
Módulo responsável pela persistência dos relatórios (JSON) e das varreduras (CSV)
"""

import csv
import logging
import os
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel, Field, model_validator

from .config import Config
from .protocol import CheatConfig, Scheme, TesterPolicy, Variant

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["inputs", "seed", "output", "halted", "detection_repetition"]


class ReportKind(StrEnum):
    RUN = "Run"
    SWEEP = "Sweep"
    PRIVACY = "Privacy"
    DETECTION = "Detection"
    GHZ_CHECK = "GhzCheck"
    DECOMPOSE = "Decompose"
    EPR = "Epr"


class ExperimentConfig(BaseModel):
    """Configuração reproduzível de um experimento"""

    function_file: Optional[str] = None
    scheme: Scheme = Scheme.B
    variant: Variant = Variant(Config.DEFAULT_VARIANT)
    seed: int = Field(default_factory=lambda: Config.DEFAULT_SEED)
    tester_policy: Optional[TesterPolicy] = None
    inner: Optional[Scheme] = None
    cheat: Optional[CheatConfig] = None
    coalition: Optional[List[str]] = None
    output_dir: str = Field(default_factory=lambda: Config.OUTPUT_DIR)
    command: Optional[str] = None

    @model_validator(mode="after")
    def _check_consistency(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"Semente fora do intervalo de 64 bits: {self.seed}")
        if self.scheme == Scheme.C and self.tester_policy is None:
            raise ValueError("Esquema C exige tester_policy")
        if self.scheme not in (Scheme.C, Scheme.MULTIPARTY) and self.tester_policy is not None:
            raise ValueError("tester_policy só se aplica ao esquema C (ou Multiparty com C interno)")
        if self.inner is not None:
            if self.scheme != Scheme.MULTIPARTY:
                raise ValueError("inner só se aplica ao esquema Multiparty")
            if self.inner not in (Scheme.B, Scheme.C):
                raise ValueError(f"Esquema interno inválido: {self.inner.value} (use B ou C)")
            if self.inner == Scheme.C and self.tester_policy is None:
                raise ValueError("Multiparty com C interno exige tester_policy")
            if self.inner == Scheme.B and self.tester_policy is not None:
                raise ValueError("tester_policy não se aplica ao Multiparty com B interno")
        if self.cheat is not None and self.cheat.active and self.scheme != Scheme.C and self.command != "epr":
            raise ValueError("Trapaças só são permitidas no esquema C ou no comando epr")
        return self

    @property
    def inner_scheme(self) -> Scheme:
        """Esquema interno do Multiparty; sem inner explícito, C quando há tester_policy"""
        if self.inner is not None:
            return self.inner
        return Scheme.C if self.tester_policy is not None else Scheme.B


class Report(BaseModel):
    kind: ReportKind
    schema_version: int = Config.SCHEMA_VERSION
    seed: Optional[int] = None
    config: Optional[ExperimentConfig] = None
    payload: Dict[str, Any] = Field(default_factory=dict)


def get_output_dir(config: Optional[ExperimentConfig] = None) -> Path:
    """
    Retorna o diretório de saída (criando-o se necessário)

    Args:
        config: Configuração do experimento (opcional, usa Config.OUTPUT_DIR)

    Returns:
        Caminho do diretório
    """
    directory = Path(config.output_dir if config is not None else Config.OUTPUT_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def report_filename(report: Report) -> str:
    suffix = f"_{report.seed}" if report.seed is not None else ""
    return f"{report.kind.value.lower()}{suffix}.json"


def write_report(report: Report, directory: Optional[Path] = None, name: Optional[str] = None) -> Path:
    """
    Grava o relatório em JSON

    Args:
        report: Relatório
        directory: Diretório de saída (opcional)
        name: Nome do arquivo (opcional, derivado do tipo e da semente)

    Returns:
        Caminho do arquivo gravado
    """
    directory = Path(directory) if directory is not None else get_output_dir(report.config)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / (name or report_filename(report))
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Relatório gravado: %s", path)
    return path


def load_report(path) -> Report:
    """Lê um relatório gravado por write_report"""
    return Report.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_experiment_config(path) -> ExperimentConfig:
    """Lê uma ExperimentConfig em JSON"""
    return ExperimentConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))


def write_sweep_csv(rows: Iterable[Dict[str, Any]], path) -> Path:
    """
    Grava a grade de uma varredura em ordem canônica (entradas, semente)

    Args:
        rows: Linhas com as colunas de SWEEP_COLUMNS
        path: Arquivo de destino

    Returns:
        Caminho do arquivo gravado
    """
    ordered = sorted(rows, key=lambda row: (row["inputs"], row["seed"]))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in ordered:
            writer.writerow({column: row.get(column, "") for column in SWEEP_COLUMNS})
    logger.info("Varredura gravada: %s (%d linhas)", path, len(ordered))
    return path


def write_transcript(jsonl: str, path) -> Path:
    """Grava a transcrição em JSON lines"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(jsonl, encoding="utf-8")
    return path


def get_output_stats(directory: Optional[Path] = None) -> dict:
    """
    Retorna estatísticas sobre o diretório de saída

    Args:
        directory: Diretório (opcional, usa Config.OUTPUT_DIR)

    Returns:
        Dicionário com estatísticas
    """
    directory = Path(directory) if directory is not None else Path(Config.OUTPUT_DIR)
    if not directory.exists():
        return {"exists": False, "reports": 0, "sweeps": 0}

    names = os.listdir(directory)
    return {
        "exists": True,
        "reports": sum(1 for n in names if n.endswith(".json")),
        "sweeps": sum(1 for n in names if n.endswith(".csv")),
        "output_directory": str(directory),
    }
