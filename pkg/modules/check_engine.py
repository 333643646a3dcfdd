"""
Check Engine - Evaluates declared acceptance checks against experiment metrics
Motor de comprobaciones de aceptacion sobre las metricas de un experimento
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List

from .condition_evaluator import ConditionEvaluationError, evaluate_condition, get_nested_value

logger = logging.getLogger(__name__)


@dataclass
class CheckHit:
    """Result of evaluating a single check / Resultado de una comprobacion"""
    check_id: str
    name: str
    passed: bool
    observed: Any = None
    error: str = ""


@dataclass
class CheckReport:
    """All check results of one experiment / Resultados de un experimento"""
    hits: List[CheckHit] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(hit.passed for hit in self.hits)

    @property
    def failed(self) -> List[CheckHit]:
        return [hit for hit in self.hits if not hit.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "hits": [asdict(hit) for hit in self.hits]}


class CheckEngine:
    """
    Evaluates manifest checks of the form
        {check_id, name, condition: {operator, field, ...}}
    Motor de evaluacion de comprobaciones
    """

    def __init__(self, checks: List[dict]):
        self.checks = checks or []

    def evaluate(self, metrics: Dict[str, Any]) -> CheckReport:
        report = CheckReport()
        for index, check in enumerate(self.checks):
            report.hits.append(self._evaluate_check(check, index, metrics))
        for hit in report.failed:
            logger.warning(f"Check failed: {hit.check_id} ({hit.name}) observed={hit.observed} {hit.error}")
        return report

    def _evaluate_check(self, check: dict, index: int, metrics: Dict[str, Any]) -> CheckHit:
        condition = check.get("condition", {})
        check_id = check.get("check_id", f"check_{index}")
        observed = get_nested_value(metrics, condition.get("field", "")) if condition.get("field") else None
        try:
            passed = evaluate_condition(condition, metrics)
        except ConditionEvaluationError as e:
            return CheckHit(check_id=check_id, name=check.get("name", ""), passed=False,
                            observed=observed, error=str(e))
        return CheckHit(check_id=check_id, name=check.get("name", ""), passed=passed, observed=observed)

    def validate_checks(self) -> List[str]:
        """Structural errors of the declared checks (no metrics needed)"""
        errors = []
        for index, check in enumerate(self.checks):
            check_id = check.get("check_id", f"check_{index}")
            condition = check.get("condition")
            if not isinstance(condition, dict):
                errors.append(f"{check_id}: missing condition")
                continue
            try:
                evaluate_condition(condition, {})
            except ConditionEvaluationError as e:
                errors.append(f"{check_id}: {e}")
        return errors
