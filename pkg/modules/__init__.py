# Modules - Core engine components
# Componentes del motor central

from .grid_fields import ComplexField, FieldError, Grid3D, RadialGrid, mass, potential, h1dot_norm_sq
from .ground_state import GROUND_STATE, evaluate_q, ground_state_constants, sharp_constant_via_optimization
from .variational import energy, report, subthreshold, VariationalReport
from .solver import SimulationError, SimulationState, Status, StepParams, strang_step, detect
from .initial_data import build_initial_data, gaussian, rescaled_q
from .diagnostics import DiagnosticsRecord, VirialWeight, scattering_detector, virial_rate
from .trajectory import SimulationResult, simulate
from .run_config import ConfigError, RunConfig, load_config, parse_config
from .condition_evaluator import evaluate_condition, get_nested_value
from .experiment_loader import ExperimentPack, load_experiment, load_yaml_file
from .check_engine import CheckEngine, CheckHit, CheckReport
from .records import ExperimentSummary, read_records, write_records
from .runner import RunResult, run_experiment, run_pack

__all__ = [
    'ComplexField',
    'FieldError',
    'Grid3D',
    'RadialGrid',
    'mass',
    'potential',
    'h1dot_norm_sq',
    'GROUND_STATE',
    'evaluate_q',
    'ground_state_constants',
    'sharp_constant_via_optimization',
    'energy',
    'report',
    'subthreshold',
    'VariationalReport',
    'SimulationError',
    'SimulationState',
    'Status',
    'StepParams',
    'strang_step',
    'detect',
    'build_initial_data',
    'gaussian',
    'rescaled_q',
    'DiagnosticsRecord',
    'VirialWeight',
    'scattering_detector',
    'virial_rate',
    'SimulationResult',
    'simulate',
    'ConfigError',
    'RunConfig',
    'load_config',
    'parse_config',
    'evaluate_condition',
    'get_nested_value',
    'ExperimentPack',
    'load_experiment',
    'load_yaml_file',
    'CheckEngine',
    'CheckHit',
    'CheckReport',
    'ExperimentSummary',
    'read_records',
    'write_records',
    'RunResult',
    'run_experiment',
    'run_pack',
]
