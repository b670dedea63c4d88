"""
Run configuration for dspec.
A run is described by a flat key-value JSON document; command-line flags
override individual keys and the effective configuration can be saved back so
any emitted table can be regenerated.
"""
import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

import config
from errors import ConfigError, NoAdmissibleRegion
from services.geometry import PhysicalParams

logger = logging.getLogger(__name__)

SweepParameter = Literal["omega", "zeta", "k", "mass"]


class RunConfig(BaseModel):
    """Validated run configuration; field names are the config-file keys."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mass: float = Field(config.DEFAULT_MASS, gt=0)
    omega: float = Field(config.DEFAULT_OMEGA, gt=0)
    zeta: float = Field(config.DEFAULT_ZETA, ge=0)
    k_axial: float = config.DEFAULT_K_AXIAL
    l_min: int = config.DEFAULT_L_MIN
    l_max: int = config.DEFAULT_L_MAX
    n_max: int = Field(config.DEFAULT_N_MAX, ge=0)
    spins: Tuple[int, ...] = config.DEFAULT_SPINS
    sweep_param: Optional[SweepParameter] = None
    sweep_from: Optional[float] = None
    sweep_to: Optional[float] = None
    sweep_steps: Optional[int] = Field(None, ge=2)
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    solver: Literal["bessel", "oracle"] = "bessel"

    @field_validator("spins")
    @classmethod
    def _check_spins(cls, spins: Tuple[int, ...]) -> Tuple[int, ...]:
        if not spins or any(s not in (1, -1) for s in spins):
            raise ValueError(f"spins must be a non-empty subset of {{+1, -1}}, got {spins}")
        # +1 before -1, duplicates dropped
        return tuple(sorted(set(spins), reverse=True))

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.l_min > self.l_max:
            raise ValueError(f"l_min ({self.l_min}) exceeds l_max ({self.l_max})")
        sweep = (self.sweep_from, self.sweep_to, self.sweep_steps)
        if self.sweep_param is not None and any(v is None for v in sweep):
            raise ValueError("a sweep needs sweep_from, sweep_to and sweep_steps")
        return self

    # Physical parameters are validated separately: zeta*omega >= 1 is exit code 2, not a config error
    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(mass=self.mass, omega=self.omega, zeta=self.zeta, k=self.k_axial)

    @property
    def l_range(self) -> Tuple[int, int]:
        return (self.l_min, self.l_max)

    @property
    def has_sweep(self) -> bool:
        return self.sweep_param is not None

    def sweep_values(self) -> List[float]:
        """Evenly spaced sweep values, endpoints exact."""
        if not self.has_sweep:
            return []
        steps = self.sweep_steps
        start, stop = self.sweep_from, self.sweep_to
        values = [start + (stop - start) * i / (steps - 1) for i in range(steps)]
        values[-1] = stop
        return values

    def params_at(self, value: float) -> PhysicalParams:
        """Physical parameters with the swept quantity set to ``value``."""
        fields = {"mass": self.mass, "omega": self.omega, "zeta": self.zeta, "k": self.k_axial}
        fields[self.sweep_param] = value
        return PhysicalParams(**fields)

    def offending_sweep_values(self) -> List[float]:
        """Sweep values that leave no admissible region (zeta * omega >= 1)."""
        bad = []
        for value in self.sweep_values():
            try:
                self.params_at(value)
            except NoAdmissibleRegion:
                bad.append(value)
        return bad


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "config"
        parts.append(f"{where}: {err['msg']}")
    return "; ".join(parts)


class ConfigManager:
    """Loads, merges and saves flat JSON run configurations."""

    def __init__(self, config_file: Optional[str] = None):
        """
        Args:
            config_file: Path to a flat JSON document, or None for defaults only.
        """
        self.config_file = config_file

    def _load_data(self) -> Dict[str, Any]:
        if self.config_file is None:
            return {}
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {self.config_file}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {self.config_file} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {self.config_file} must hold a flat JSON object")
        # metadata written by save_config
        return {key: value for key, value in data.items() if not key.startswith("_")}

    def load_config(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        File keys first, then every override that is not None.

        Raises:
            ConfigError: unreadable file, unknown key or invalid value
        """
        data = self._load_data()
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        try:
            run_config = RunConfig(**data)
        except ValidationError as e:
            raise ConfigError(f"invalid run configuration: {_validation_message(e)}") from e
        logger.debug("effective configuration: %s", run_config.model_dump(exclude_none=True))
        return run_config

    @staticmethod
    def save_config(run_config: RunConfig, path: str, metadata: bool = False) -> None:
        """
        Write the effective configuration as a flat JSON document.

        Args:
            metadata: add a ``_saved_at`` timestamp (makes the file non-reproducible)
        """
        data = run_config.model_dump(exclude_none=True)
        data["spins"] = list(run_config.spins)
        if metadata:
            data["_saved_at"] = datetime.now().isoformat()
        directory = os.path.dirname(path)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                json.dump(data, f, indent=2, sort_keys=True)
                f.write("\n")
        except OSError as e:
            raise ConfigError(f"cannot write config {path}: {e}") from e
        logger.info("Saved configuration to %s", path)
