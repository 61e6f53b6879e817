"""Experiment configuration: JSON schema, defaults and validation."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .composite import STANDARD_LAYOUTS
from .device import branch_site
from .evolution import T_F_OVER_TAU

KINDS = (
    "snapshot",
    "flux_sweep",
    "visibility_sweep",
    "witness_dynamics",
    "scatterer_control",
    "long_run",
)

DEFAULT_E_INT_GRID = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0]
DEFAULT_SCATTERERS = ["1", "1'", "3", "3'", "5", "5'"]


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Grid(_Strict):
    start: float
    stop: float
    num: int = Field(gt=0)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


class Packet(_Strict):
    x0: float = 5.0
    width: float = Field(default=2.0, gt=0)
    k: float = float(np.pi / 2)


class ExperimentConfig(_Strict):
    """One experiment run.

    Energies are in units of gamma, times in units of tau, flux as phi/phi0.
    Fields left as ``None`` receive kind-specific defaults on validation.
    """

    kind: Literal[KINDS]
    n_wit: Optional[int] = Field(default=None, ge=0)
    layout: Optional[list[str]] = None
    e_int: float = 5.0
    gamma_w: float = 0.0
    flux: Optional[float] = None
    flux_grid: Grid = Grid(start=-1.0, stop=1.0, num=401)
    e_int_grid: Optional[list[float]] = None
    n_wit_list: Optional[list[int]] = None
    times: Optional[list[float]] = None
    time_grid: Optional[Grid] = None
    packet: Packet = Packet()
    witness_phases: Union[list[float], Literal["random"], None] = None
    seed: int = Field(default=0, ge=0)
    scatterer_sites: list[str] = DEFAULT_SCATTERERS
    v_s: float = 5.0
    propagator: Literal["dense", "layered", "auto"] = "auto"
    workers: int = Field(default=1, ge=1)
    output: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = data.get("kind")
        layout = data.get("layout")
        n_wit = data.get("n_wit")
        if n_wit is None:
            if layout is not None:
                n_wit = len(layout)
            else:
                n_wit = 8 if kind in ("witness_dynamics", "long_run") else 0
        data["n_wit"] = n_wit
        if data.get("flux") is None:
            data["flux"] = 0.5 if kind in ("witness_dynamics", "long_run") else 0.0
        if kind == "visibility_sweep":
            data.setdefault("e_int_grid", list(DEFAULT_E_INT_GRID))
            data.setdefault("n_wit_list", [2, 4, 6, 8])
        if kind == "snapshot" and data.get("times") is None:
            data["times"] = [0.0, 3.0, T_F_OVER_TAU]
        if data.get("time_grid") is None and data.get("times") is None:
            if kind == "witness_dynamics":
                data["time_grid"] = {"start": 0.0, "stop": T_F_OVER_TAU, "num": 200}
            elif kind == "long_run":
                data["time_grid"] = {"start": 0.0, "stop": 50.0, "num": 500}
        return data

    @model_validator(mode="after")
    def _check(self):
        if self.layout is None:
            if self.n_wit not in STANDARD_LAYOUTS:
                raise ValueError(
                    f"n_wit={self.n_wit} has no standard layout; layout requires explicit positions"
                )
        else:
            if len(self.layout) != self.n_wit:
                raise ValueError(f"layout has {len(self.layout)} entries but n_wit={self.n_wit}")
            sites = [branch_site(p) for p in self.layout]
            if len(set(sites)) != len(sites):
                raise ValueError(f"duplicate witness positions in layout {self.layout}")
        for s in self.scatterer_sites:
            branch_site(s)
        if self.kind == "scatterer_control" and self.n_wit != 0:
            raise ValueError("scatterer_control runs without witnesses (n_wit must be 0)")
        if self.kind == "visibility_sweep":
            if not self.e_int_grid or not self.n_wit_list:
                raise ValueError("visibility_sweep needs non-empty e_int_grid and n_wit_list")
            bad = [n for n in self.n_wit_list if n not in STANDARD_LAYOUTS]
            if bad and self.layout is None:
                raise ValueError(f"n_wit_list entries {bad} have no standard layout")
        if self.kind in ("snapshot", "witness_dynamics", "long_run"):
            if not self.time_values().size:
                raise ValueError("time grid is empty")
        if isinstance(self.witness_phases, list) and len(self.witness_phases) != self.n_wit:
            raise ValueError(f"witness_phases needs {self.n_wit} entries")
        if self.propagator == "layered" and self.gamma_w != 0:
            raise ValueError("layered propagator requires gamma_w = 0")
        return self

    @property
    def positions(self) -> list[str]:
        if self.layout is not None:
            return list(self.layout)
        return list(STANDARD_LAYOUTS[self.n_wit])

    def time_values(self) -> np.ndarray:
        """Requested times in units of tau."""
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        if self.time_grid is not None:
            return self.time_grid.values()
        return np.asarray([T_F_OVER_TAU])

    def phases(self, n_wit: Optional[int] = None) -> np.ndarray:
        n = self.n_wit if n_wit is None else n_wit
        if self.witness_phases is None:
            return np.zeros(n)
        if self.witness_phases == "random":
            rng = np.random.default_rng(self.seed)
            # uniform on (-pi, pi]
            return np.pi - rng.uniform(0.0, 2 * np.pi, size=n)
        return np.asarray(self.witness_phases, dtype=float)

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def config_from_dict(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None
    except ValueError as err:
        raise ConfigError(str(err)) from None


def parse_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: malformed JSON ({err})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(data)


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
