"""
Experiment Loader - Experiment packs with cached YAML loading
Cargador de paquetes de experimentos con cache de YAML
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

import yaml

from .run_config import ConfigError, RunConfig, parse_config

logger = logging.getLogger(__name__)

EXPERIMENTS_DIR = Path(__file__).parent.parent / "config" / "yamls"


class ExperimentPack:
    """
    Lazy-loading experiment pack: manifest.yaml (metadata and checks) and
    config.yaml (the RunConfig text)
    Paquete de experimento con carga perezosa
    """

    def __init__(self, experiment_id: str, base_path: Optional[Path] = None):
        self.experiment_id = experiment_id
        self.base_path = Path(base_path) if base_path else EXPERIMENTS_DIR / experiment_id
        self._config: Optional[RunConfig] = None

    @property
    def manifest(self) -> dict:
        return load_yaml_file(self.base_path / "manifest.yaml")

    @property
    def config_path(self) -> Path:
        return self.base_path / "config.yaml"

    @property
    def config_text(self) -> str:
        try:
            return self.config_path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"experiment '{self.experiment_id}' has no config.yaml")

    @property
    def config(self) -> RunConfig:
        """Parsed RunConfig (parsed once per pack)"""
        if self._config is None:
            self._config = parse_config(self.config_text)
        return self._config

    @property
    def kind(self) -> str:
        return self.manifest.get("kind", "")

    @property
    def checks(self) -> List[dict]:
        """Acceptance checks declared in the manifest"""
        return self.manifest.get("checks", [])

    def exists(self) -> bool:
        return self.base_path.is_dir() and (self.base_path / "manifest.yaml").exists()

    def clear_cache(self):
        self._config = None
        load_yaml_file.cache_clear()


@lru_cache(maxsize=32)
def load_yaml_file(path: Path) -> dict:
    """Cached YAML file loading / Carga de archivo YAML con cache"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        return {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing YAML file {path}: {e}")


def load_experiment(experiment_id: str, base_path: Optional[Path] = None) -> ExperimentPack:
    """Load an experiment pack by ID / Cargar un paquete por ID"""
    pack = ExperimentPack(experiment_id, base_path)
    if not pack.exists():
        raise ConfigError(f"Unknown experiment pack: {experiment_id}")
    return pack


def list_available_experiments(base_dir: Optional[Path] = None) -> List[str]:
    """List experiment pack IDs / Listar los paquetes disponibles"""
    root = Path(base_dir) if base_dir else EXPERIMENTS_DIR
    if not root.exists():
        return []
    return sorted(d.name for d in root.iterdir() if d.is_dir() and (d / "manifest.yaml").exists())
