#!/usr/bin/env python3
"""
CLI script for experiment pack validation
Script CLI para validacion de paquetes de experimentos
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.check_engine import CheckEngine
from modules.experiment_loader import list_available_experiments, load_experiment
from modules.run_config import ConfigError

REQUIRED_MANIFEST = ["experiment_id", "version", "name", "kind"]


def validate_experiment(experiment_id: str) -> bool:
    """
    Validate an experiment pack: manifest, config and declared checks
    Validar un paquete de experimento

    Returns:
        True if valid, False otherwise
    """
    print(f"\n{'='*60}")
    print(f"Validating experiment: {experiment_id}")
    print(f"{'='*60}")

    errors = []
    warnings = []

    try:
        pack = load_experiment(experiment_id)

        print("\n[Manifest]")
        manifest = pack.manifest
        if not manifest:
            errors.append("manifest.yaml is empty or missing")
        for field in REQUIRED_MANIFEST:
            if field not in manifest:
                errors.append(f"Manifest missing required field: {field}")
            else:
                print(f"  {field}: {manifest[field]}")
        if manifest.get("experiment_id") not in (None, experiment_id):
            errors.append(f"experiment_id '{manifest['experiment_id']}' does not match directory '{experiment_id}'")

        print("\n[Config]")
        try:
            config = pack.config
            print(f"  kind: {config.kind}")
            print(f"  grid: {config.grid.geometry} ({config.grid.points} points)")
            print(f"  sign: {config.sign}")
            if manifest.get("kind") and manifest["kind"] != config.kind:
                errors.append(f"manifest kind '{manifest['kind']}' differs from config kind '{config.kind}'")
        except ConfigError as e:
            errors.append(f"config.yaml: {e}")

        print("\n[Checks]")
        checks = pack.checks
        print(f"  Total checks: {len(checks)}")
        if not checks:
            warnings.append("No acceptance checks declared")
        errors.extend(CheckEngine(checks).validate_checks())

    except Exception as e:
        errors.append(f"Error loading experiment: {e}")

    print(f"\n{'='*60}")
    print("Validation Results")
    print(f"{'='*60}")

    if errors:
        print(f"\nERRORS ({len(errors)}):")
        for err in errors:
            print(f"  [X] {err}")

    if warnings:
        print(f"\nWARNINGS ({len(warnings)}):")
        for warn in warnings:
            print(f"  [!] {warn}")

    if errors:
        print(f"\n[FAIL] Experiment has {len(errors)} error(s)")
        return False
    print(f"\n[OK] Experiment is valid" + (f" with {len(warnings)} warning(s)" if warnings else ""))
    return True


def main():
    """Main CLI entry point / Punto de entrada CLI principal"""
    parser = argparse.ArgumentParser(description="Validate experiment packs")
    parser.add_argument("--experiment", "-e", help="Experiment ID to validate (validates all if not specified)")
    parser.add_argument("--list", "-l", action="store_true", help="List available experiments")
    args = parser.parse_args()

    if args.list:
        print("Available experiments:")
        for experiment_id in list_available_experiments():
            print(f"  - {experiment_id}")
        return 0

    if args.experiment:
        return 0 if validate_experiment(args.experiment) else 1

    experiments = list_available_experiments()
    if not experiments:
        print("No experiments found!")
        return 1
    results = [validate_experiment(experiment_id) for experiment_id in experiments]
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
