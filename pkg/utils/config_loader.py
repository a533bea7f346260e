"""
Configuration management for the UPB state toolkit
Implements validated search settings, tolerances and run configuration
"""

import os
from pathlib import Path
from typing import Dict, Any, List, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.errors import MalformedInputError

OUTPUT_DIR_ENV = "UPB_OUTPUT_DIR"

COMMANDS = ("generate", "transform", "classify", "verify", "orbit", "roundtrip")


class SearchConfig(BaseModel):
    """
    Settings for the restarted see-saw product vector search
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    restarts: int = Field(default=200, gt=0)
    max_iters: int = Field(default=500, gt=0)
    conv_tol: float = Field(default=1e-13, gt=0)
    dedup_tol: float = Field(default=1e-8, gt=0)
    accept_tol: float = Field(default=1e-10, gt=0)
    residual_tol: float = Field(default=1e-9, gt=0)
    polish_iters: int = Field(default=30, gt=0)
    seed: int = Field(default=0, ge=0)

    def with_seed(self, seed: int) -> "SearchConfig":
        """Return a copy with a different seed"""
        return self.model_copy(update={"seed": seed})


class Tolerances(BaseModel):
    """
    Numerical thresholds shared by the pipeline stages
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    rank_rel_tol: float = Field(default=1e-8, gt=0)
    herm_tol: float = Field(default=1e-12, gt=0)
    psd_tol: float = Field(default=1e-10, gt=0)
    trace_tol: float = Field(default=1e-9, gt=0)
    reality_tol: float = Field(default=1e-8, gt=0)
    positivity_tol: float = Field(default=1e-8, gt=0)
    denominator_tol: float = Field(default=1e-12, gt=0)
    null_gap_min: float = Field(default=1e4, gt=0)
    reconstruction_tol: float = Field(default=1e-7, gt=0)
    parallel_tol: float = Field(default=1e-6, gt=0)
    entangled_min: float = Field(default=1e-6, gt=0)
    product_max: float = Field(default=1e-10, gt=0)
    extremal_rel_tol: float = Field(default=1e-8, gt=0)
    roundtrip_rel_tol: float = Field(default=1e-6, gt=0)


class RunConfig(BaseModel):
    """
    Complete configuration of one CLI invocation
    """
    model_config = ConfigDict(extra="forbid")

    command: str
    seed: int = Field(default=0, ge=0)
    cond_max: float = Field(default=20.0, ge=1.0)
    params: Optional[List[float]] = None
    inputs: List[str] = Field(default_factory=list)
    output_dir: Optional[str] = None
    transform_path: Optional[str] = None
    jobs: int = Field(default=1, gt=0)
    search: SearchConfig = Field(default_factory=SearchConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    def resolved_output_dir(self) -> Path:
        """Output directory from the config, else from the environment"""
        return Path(self.output_dir) if self.output_dir else default_output_dir()


def default_output_dir() -> Path:
    """
    Default output directory, read from UPB_OUTPUT_DIR after loading .env

    Returns:
        Directory path ("." when unset)
    """
    load_dotenv(override=False)
    return Path(os.environ.get(OUTPUT_DIR_ENV) or ".")


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; override values that are None are skipped"""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict):
            nested = merged.get(key)
            merged[key] = _merge(nested if isinstance(nested, dict) else {}, value)
        else:
            merged[key] = value
    return merged


def load_run_config(path: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load a run configuration from an optional YAML file plus overrides

    Args:
        path: YAML file with RunConfig keys (may be None)
        overrides: Values from the command line, applied on top of the file

    Returns:
        Validated run configuration

    Raises:
        MalformedInputError: unreadable YAML, unknown keys or invalid values
    """
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                loaded = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            raise MalformedInputError(f"Cannot read config file {path}: {e}") from e
        if not isinstance(loaded, dict):
            raise MalformedInputError(f"Config file {path} must hold a mapping")
        data = loaded

    data = _merge(data, overrides or {})
    if data.get("command") not in COMMANDS:
        raise MalformedInputError(f"Unknown command: {data.get('command')!r}",
                                  details={"allowed": list(COMMANDS)})

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise MalformedInputError("Invalid run configuration",
                                  details={"errors": e.errors(include_url=False, include_context=False, include_input=False)}) from e
