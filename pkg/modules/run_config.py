"""
Run Config - Experiment description, strict parsing and grid/step construction
Descripcion de experimentos, analisis estricto y construccion de mallas y pasos

The config text is one level of YAML sections of `key: value` lines:

    experiment:
      kind: single_run
      sign: 1
    grid:
      geometry: radial
      points: 1023
      r_max: 40.0
    time:
      t_final: 2.0
    initial_data:
      family: gaussian
      amplitude: 0.5
"""

import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .diagnostics import VirialWeight
from .grid_fields import Grid, Grid3D, RadialGrid
from .solver import DEFAULT_CFL, DetectorThresholds, StepParams, cfl_timestep

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ("constants", "dichotomy", "farcenter", "defocusing", "single_run")


class ConfigError(ValueError):
    """Exception raised for invalid run configurations"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ExperimentSection(_Section):
    kind: Literal["constants", "dichotomy", "farcenter", "defocusing", "single_run"]
    name: Optional[str] = None
    sign: Literal[1, -1] = 1
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)


class GridSection(_Section):
    geometry: Literal["radial", "box"] = "radial"
    layout: Literal["uniform", "mapped"] = "uniform"
    points: int = Field(default=1023, gt=0)
    r_max: float = Field(default=40.0, gt=0)
    map_scale: float = Field(default=2.0, gt=0)
    half_width: float = Field(default=16.0, gt=0)

    @model_validator(mode="after")
    def _check_points(self):
        if self.geometry == "box" and self.points & (self.points - 1):
            raise ValueError(f"box grids need a power of two points per axis, got {self.points}")
        if self.geometry == "radial" and self.points < 4:
            raise ValueError(f"radial grids need at least 4 points, got {self.points}")
        return self

    def build(self) -> Grid:
        if self.geometry == "box":
            return Grid3D(half_width=self.half_width, points=self.points)
        if self.layout == "mapped":
            return RadialGrid.mapped(n_panels=self.points, map_scale=self.map_scale)
        return RadialGrid.uniform(n=self.points, r_max=self.r_max)

    def scaled(self, factor: float) -> "GridSection":
        if self.geometry == "radial" and self.layout == "uniform":
            points = int(round((self.points + 1) * factor)) - 1
        else:
            points = int(round(self.points * factor))
        return self.model_copy(update={"points": points})


class TimeSection(_Section):
    t_final: float = Field(default=5.0, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)
    cfl: float = Field(default=DEFAULT_CFL, gt=0)
    sample_every: int = Field(default=10, ge=1)
    direction: Literal[1, -1] = 1
    dealias: Optional[bool] = None

    def scaled(self, factor: float) -> "TimeSection":
        """dt follows h^2; sampling keeps the same times"""
        update: Dict[str, Any] = {"sample_every": max(1, int(round(self.sample_every * factor ** 2)))}
        if self.dt is not None:
            update["dt"] = self.dt / factor ** 2
        return self.model_copy(update=update)


class _DataSection(_Section):
    noise: float = Field(default=0.0, ge=0)


class GaussianData(_DataSection):
    family: Literal["gaussian"]
    amplitude: float = Field(default=1.0, ge=0)
    width: float = Field(default=1.0, gt=0)
    center: Union[float, List[float]] = 0.0

    @property
    def amplitude_value(self) -> float:
        return self.amplitude

    def with_amplitude(self, value: float) -> "GaussianData":
        return self.model_copy(update={"amplitude": value})


class RescaledQData(_DataSection):
    family: Literal["rescaled_q"]
    factor: float = Field(default=1.0, ge=0)
    scale: float = Field(default=1.0, gt=0)

    @property
    def amplitude_value(self) -> float:
        return self.factor

    def with_amplitude(self, value: float) -> "RescaledQData":
        return self.model_copy(update={"factor": value})


class SamplesData(_DataSection):
    family: Literal["samples"]
    path: str

    @property
    def amplitude_value(self) -> float:
        return 1.0

    def with_amplitude(self, value: float) -> "SamplesData":
        raise ConfigError("samples data have no amplitude parameter")


InitialData = Annotated[Union[GaussianData, RescaledQData, SamplesData], Field(discriminator="family")]


class DetectorSection(_Section):
    growth_factor: float = Field(default=10.0, gt=1)
    spectral_fill: float = Field(default=0.1, gt=0, lt=1)
    scatter_tolerance: float = Field(default=1e-3, gt=0)
    scatter_window: float = Field(default=0.25, gt=0, le=1)
    scatter_max_samples: int = Field(default=64, ge=2)
    scatter_min_time: float = Field(default=1.0, ge=0)
    boundary_fraction: float = Field(default=0.1, gt=0, lt=1)
    boundary_mass: float = Field(default=0.01, gt=0)
    saturation: float = Field(default=0.01, gt=0)


class DiagnosticsSection(_Section):
    virial_radius: Optional[float] = Field(default=None, gt=0)
    tail_radius: Optional[float] = Field(default=None, gt=0)
    check_scattering: bool = True
    stop_when_dispersed: bool = True


class OutputSection(_Section):
    directory: str = "results"
    write_records: bool = True


class SweepSection(_Section):
    # dichotomy
    low: float = Field(default=0.01, ge=0)
    high: float = Field(default=2.0, gt=0)
    tolerance: float = Field(default=0.02, gt=0)
    max_iterations: int = Field(default=12, ge=1)
    confirm_scale: float = Field(default=2.0, ge=1)
    widen_factor: float = Field(default=2.0, gt=1)
    max_widen: int = Field(default=4, ge=0)
    # far-center
    centers: List[float] = Field(default_factory=lambda: [0.0, 5.0, 10.0, 20.0])
    # defocusing
    amplitudes: List[float] = Field(default_factory=lambda: [1.0, 5.0])
    backward: bool = True
    mirror_tolerance: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def _check_bracket(self):
        if self.low >= self.high:
            raise ValueError(f"sweep low ({self.low}) must be below high ({self.high})")
        return self


class ConstantsSection(_Section):
    tolerance: float = Field(default=0.005, gt=0)
    refinements: int = Field(default=3, ge=2)
    tail_correction: bool = False
    optimizer: bool = True
    optimizer_panels: int = Field(default=2048, ge=16)
    optimizer_iterations: int = Field(default=2000, ge=1)
    optimizer_tolerance: float = Field(default=1e-9, gt=0)


class RunConfig(_Section):
    """
    Full experiment description
    Descripcion completa de un experimento
    """
    experiment: ExperimentSection
    grid: GridSection = Field(default_factory=GridSection)
    time: TimeSection = Field(default_factory=TimeSection)
    initial_data: Optional[InitialData] = None
    detector: DetectorSection = Field(default_factory=DetectorSection)
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    output: OutputSection = Field(default_factory=OutputSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    constants: ConstantsSection = Field(default_factory=ConstantsSection)

    @model_validator(mode="after")
    def _check_initial_data(self):
        if self.experiment.kind != "constants" and self.initial_data is None:
            raise ValueError(f"a {self.experiment.kind} experiment needs an initial_data section")
        return self

    @property
    def kind(self) -> str:
        return self.experiment.kind

    @property
    def sign(self) -> int:
        return self.experiment.sign

    def build_grid(self) -> Grid:
        return self.grid.build()

    def step_params(self, grid: Optional[Grid] = None, direction: Optional[int] = None) -> StepParams:
        grid = grid or self.build_grid()
        dt = self.time.dt or cfl_timestep(grid, self.time.cfl)
        return StepParams(
            dt=dt,
            sign=self.sign,
            dealias=self.time.dealias,
            direction=direction or self.time.direction,
        )

    def thresholds(self) -> DetectorThresholds:
        return DetectorThresholds(**self.detector.model_dump())

    def virial_weight(self) -> VirialWeight:
        return VirialWeight(self.diagnostics.virial_radius)

    def scaled(self, factor: float) -> "RunConfig":
        """Same experiment with factor times the resolution in space (factor^2 in time)"""
        if factor == 1.0:
            return self
        return self.model_copy(update={"grid": self.grid.scaled(factor), "time": self.time.scaled(factor)})

    def with_overrides(self, resolution_scale: Optional[float] = None, seed: Optional[int] = None,
                       output_dir: Optional[str] = None) -> "RunConfig":
        config = self
        if resolution_scale is not None:
            if resolution_scale <= 0:
                raise ConfigError(f"resolution scale must be positive, got {resolution_scale}")
            config = config.scaled(resolution_scale)
            if config.grid.geometry == "box" and config.grid.points & (config.grid.points - 1):
                raise ConfigError(f"resolution scale {resolution_scale} gives {config.grid.points} "
                                  f"points per axis, not a power of two")
        if seed is not None:
            config = config.model_copy(update={"experiment": config.experiment.model_copy(update={"seed": seed})})
        if output_dir is not None:
            config = config.model_copy(update={"output": config.output.model_copy(update={"directory": output_dir})})
        return config

    def describe(self) -> dict:
        return self.model_dump(mode="json")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _line_index(node: yaml.Node, path: Tuple = (), lines: Optional[dict] = None) -> dict:
    """Map key paths of a composed YAML document to 1-based line numbers"""
    lines = {} if lines is None else lines
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key_path = path + (key_node.value,)
            lines[key_path] = key_node.start_mark.line + 1
            _line_index(value_node, key_path, lines)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            lines[path + (index,)] = item.start_mark.line + 1
            _line_index(item, path + (index,), lines)
    return lines


def _locate(loc: Tuple, lines: dict) -> int:
    """Line of the deepest key of `loc` present in the document"""
    path: Tuple = ()
    for element in loc:
        trial = path + (element,)
        if trial in lines:
            path = trial
    return lines.get(path, 1)


def _describe_error(error: dict) -> str:
    loc = [str(part) for part in error["loc"] if part not in ("gaussian", "rescaled_q", "samples")]
    where = ".".join(loc) or "config"
    if error["type"] == "extra_forbidden":
        section = f" in section '{loc[0]}'" if len(loc) > 1 else ""
        return f"unknown key '{loc[-1]}'{section}"
    if error["type"] == "missing":
        return f"missing required key '{where}'"
    return f"{where}: {error['msg']}"


def parse_config(text: str) -> RunConfig:
    """
    Strict parse of a config text; every error names its line
    Analisis estricto del texto de configuracion

    Raises:
        ConfigError: syntax errors, unknown sections or keys, wrong types,
        constraint violations and missing required keys
    """
    try:
        document = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"invalid syntax: {problem}", line=mark.line + 1 if mark else 1)

    if data is None:
        raise ConfigError("empty config", line=1)
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections", line=1)

    lines = _line_index(document)
    for section, body in data.items():
        if body is not None and not isinstance(body, dict):
            raise ConfigError(f"section '{section}' must be a mapping of key: value lines",
                              line=lines.get((section,), 1))
    data = {section: body or {} for section, body in data.items()}

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_describe_error(first), line=_locate(tuple(first["loc"]), lines))


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    logger.debug(f"Parsing config {path}")
    return parse_config(text)
