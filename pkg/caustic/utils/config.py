"""Run configuration assembled from command-line flags"""
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from ..core.engine import DEFAULT_A1_MAX
from ..core.errors import CausticError, ErrorCode, ErrorType
from ..core.fixtures import DEFAULT_FIXTURE_DIR
from ..core.relations import SUPPORTED_DIMS, Hypothesis

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("text", "json")


class ConfigError(CausticError):
    """不正なオプション値"""
    error_type = ErrorType.CONFIGURATION_ERROR
    code = ErrorCode.INVALID_OPTION


@dataclass(frozen=True)
class RunConfig:
    """1回の実行の設定（既定値で n=5 の結果を再現する）"""
    dim: int = 5
    a1_max: int = DEFAULT_A1_MAX
    hypothesis: Hypothesis = Hypothesis.H0
    output_format: str = "text"
    fixture_path: Path = DEFAULT_FIXTURE_DIR

    @property
    def json(self) -> bool:
        return self.output_format == "json"


def load_config(**flags: Optional[Any]) -> RunConfig:
    """フラグから RunConfig を作る（None のフラグは既定値のまま）

    Raises:
        ConfigError: 値が範囲外のとき
    """
    values = {k: v for k, v in flags.items() if v is not None}
    unknown = set(values) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown settings: {', '.join(sorted(unknown))}")

    if "dim" in values and values["dim"] not in SUPPORTED_DIMS:
        raise ConfigError(f"--dim must be one of {', '.join(map(str, SUPPORTED_DIMS))}",
                          {"dim": values["dim"]})
    if "a1_max" in values and values["a1_max"] < 0:
        raise ConfigError("--a1-max must be non-negative", {"a1_max": values["a1_max"]})
    if "hypothesis" in values:
        try:
            values["hypothesis"] = Hypothesis.parse(values["hypothesis"])
        except ValueError:
            raise ConfigError(f"--hypothesis must be H0, H1 or H2, got {values['hypothesis']!r}")
    if "output_format" in values and values["output_format"] not in OUTPUT_FORMATS:
        raise ConfigError(f"unknown output format {values['output_format']!r}")
    if "fixture_path" in values:
        values["fixture_path"] = Path(values["fixture_path"])

    config = replace(RunConfig(), **values)
    logger.debug(f"run config: {config}")
    return config
