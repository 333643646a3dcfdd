"""
Condition Evaluator - Safe evaluator for declarative acceptance checks
Evaluador seguro de comprobaciones de aceptacion declarativas

A condition is a small dictionary, for example

    {"operator": "within_rel", "field": "constants.kinetic.measured",
     "value": 8.37758, "tolerance": 0.005}

evaluated against a nested metrics dictionary. No eval/exec is used.
"""

import math
from typing import Any, Optional

# Allowed operators (whitelist) / Operadores permitidos (lista blanca)
ALLOWED_OPERATORS = frozenset({
    "and", "or", "not",
    "equals", "not_equals", "gt", "gte", "lt", "lte",
    "in", "not_in",
    "exists", "not_exists",
    "within_rel", "all_true",
})

# Maximum nesting depth of and/or/not
MAX_NESTING_DEPTH = 5


class ConditionEvaluationError(Exception):
    """Exception raised for malformed conditions"""
    pass


def _as_number(value: Any) -> Optional[float]:
    if isinstance(value, bool) or value is None:
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        return None
    return None if math.isnan(number) else number


def _compare(operator: str, field_value: Any, value: Any) -> bool:
    left, right = _as_number(field_value), _as_number(value)
    if left is None or right is None:
        return False
    if operator == "gt":
        return left > right
    if operator == "gte":
        return left >= right
    if operator == "lt":
        return left < right
    return left <= right


def evaluate_condition(condition: dict, data: dict, depth: int = 0) -> bool:
    """
    Evaluate a condition against metrics
    Evaluar una condicion sobre las metricas

    Missing or non-numeric values make numeric comparisons false.

    Raises:
        ConditionEvaluationError: unknown operator, missing operands or nesting too deep
    """
    if not condition:
        return True

    if depth > MAX_NESTING_DEPTH:
        raise ConditionEvaluationError(f"Condition nesting too deep (max {MAX_NESTING_DEPTH})")

    operator = condition.get("operator")
    if not operator:
        raise ConditionEvaluationError(f"Condition without operator: {condition}")
    if operator not in ALLOWED_OPERATORS:
        raise ConditionEvaluationError(f"Operator not allowed: {operator}")

    if operator == "and":
        return all(evaluate_condition(c, data, depth + 1) for c in condition.get("conditions", []))

    if operator == "or":
        return any(evaluate_condition(c, data, depth + 1) for c in condition.get("conditions", []))

    if operator == "not":
        inner = condition.get("condition")
        if not inner:
            raise ConditionEvaluationError("'not' needs a 'condition'")
        return not evaluate_condition(inner, data, depth + 1)

    field = condition.get("field")
    if not field:
        raise ConditionEvaluationError(f"Operator '{operator}' needs a 'field'")
    field_value = get_nested_value(data, field)
    value = condition.get("value")

    if operator == "equals":
        return field_value == value

    if operator == "not_equals":
        return field_value != value

    if operator in ("gt", "gte", "lt", "lte"):
        return _compare(operator, field_value, value)

    if operator == "in":
        return field_value in condition.get("values", [])

    if operator == "not_in":
        return field_value not in condition.get("values", [])

    if operator == "exists":
        return field_value is not None

    if operator == "not_exists":
        return field_value is None

    if operator == "within_rel":
        tolerance = _as_number(condition.get("tolerance"))
        if tolerance is None:
            raise ConditionEvaluationError("'within_rel' needs a numeric 'tolerance'")
        measured, expected = _as_number(field_value), _as_number(value)
        if measured is None or expected is None:
            return False
        return abs(measured - expected) <= tolerance * abs(expected)

    # all_true: every entry of a list (or every value of a mapping) is True
    if isinstance(field_value, dict):
        field_value = list(field_value.values())
    if not isinstance(field_value, (list, tuple)):
        return False
    return all(item is True for item in field_value)


def get_nested_value(data: dict, path: str) -> Any:
    """
    Dot-notation access: 'constants.kinetic.measured', 'runs.0.status'
    Acceso con notacion de punto
    """
    if not path or not data:
        return None

    value: Any = data
    for key in path.split("."):
        if isinstance(value, dict):
            value = value.get(key)
        elif isinstance(value, list):
            try:
                index = int(key)
            except ValueError:
                return None
            value = value[index] if -len(value) <= index < len(value) else None
        else:
            return None
        if value is None:
            return None
    return value
