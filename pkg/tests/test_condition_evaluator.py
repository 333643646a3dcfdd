"""
Tests for the condition evaluator
Tests para el evaluador de condiciones
"""

import pytest
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.condition_evaluator import ConditionEvaluationError, evaluate_condition, get_nested_value


class TestGetNestedValue:
    """Tests for get_nested_value function"""

    def test_simple_key(self):
        assert get_nested_value({"kind": "constants"}, "kind") == "constants"

    def test_nested_key(self):
        data = {"constants": {"kinetic": {"measured": 8.37}}}
        assert get_nested_value(data, "constants.kinetic.measured") == 8.37

    def test_list_index(self):
        data = {"metrics": {"deviations": [0.4, 0.2, 0.1]}}
        assert get_nested_value(data, "metrics.deviations.0") == 0.4
        assert get_nested_value(data, "metrics.deviations.-1") == 0.1

    def test_list_index_out_of_range(self):
        assert get_nested_value({"values": [1]}, "values.3") is None

    def test_missing_key(self):
        assert get_nested_value({"kind": "constants"}, "missing") is None

    def test_empty_data(self):
        assert get_nested_value({}, "key") is None

    def test_empty_path(self):
        assert get_nested_value({"key": "value"}, "") is None


class TestEvaluateCondition:
    """Tests for evaluate_condition function"""

    def test_equals(self):
        condition = {"operator": "equals", "field": "status", "value": "dispersed"}
        assert evaluate_condition(condition, {"status": "dispersed"}) is True
        assert evaluate_condition(condition, {"status": "blowup_suspected"}) is False

    def test_not_equals(self):
        condition = {"operator": "not_equals", "field": "status", "value": "underresolved"}
        assert evaluate_condition(condition, {"status": "dispersed"}) is True

    def test_numeric_comparisons(self):
        data = {"drift": 1e-9}
        assert evaluate_condition({"operator": "lt", "field": "drift", "value": 1e-8}, data) is True
        assert evaluate_condition({"operator": "lte", "field": "drift", "value": 1e-9}, data) is True
        assert evaluate_condition({"operator": "gt", "field": "drift", "value": 1e-8}, data) is False
        assert evaluate_condition({"operator": "gte", "field": "drift", "value": 1e-9}, data) is True

    def test_comparison_with_missing_value_is_false(self):
        condition = {"operator": "lt", "field": "metrics.ratio", "value": 0.25}
        assert evaluate_condition(condition, {"metrics": {}}) is False

    def test_comparison_ignores_booleans(self):
        condition = {"operator": "gt", "field": "flag", "value": 0}
        assert evaluate_condition(condition, {"flag": True}) is False

    def test_within_rel(self):
        condition = {"operator": "within_rel", "field": "c1", "value": 0.119366, "tolerance": 0.005}
        assert evaluate_condition(condition, {"c1": 0.1195}) is True
        assert evaluate_condition(condition, {"c1": 0.121}) is False

    def test_within_rel_needs_tolerance(self):
        condition = {"operator": "within_rel", "field": "c1", "value": 0.119366}
        with pytest.raises(ConditionEvaluationError):
            evaluate_condition(condition, {"c1": 0.1195})

    def test_in_and_not_in(self):
        data = {"verdict": "scatter"}
        assert evaluate_condition({"operator": "in", "field": "verdict", "values": ["scatter", "blowup"]}, data)
        assert not evaluate_condition({"operator": "not_in", "field": "verdict", "values": ["scatter"]}, data)

    def test_exists(self):
        assert evaluate_condition({"operator": "exists", "field": "bracket"}, {"bracket": {"low": 0.1}})
        assert evaluate_condition({"operator": "not_exists", "field": "bracket"}, {"bracket": None})

    def test_all_true(self):
        condition = {"operator": "all_true", "field": "assertions"}
        assert evaluate_condition(condition, {"assertions": {"a": True, "b": True}}) is True
        assert evaluate_condition(condition, {"assertions": {"a": True, "b": False}}) is False
        assert evaluate_condition(condition, {"assertions": [True, True]}) is True
        assert evaluate_condition(condition, {"assertions": "yes"}) is False

    def test_and_operator(self):
        condition = {
            "operator": "and",
            "conditions": [
                {"operator": "equals", "field": "low", "value": "scatter"},
                {"operator": "equals", "field": "high", "value": "blowup"}
            ]
        }
        assert evaluate_condition(condition, {"low": "scatter", "high": "blowup"}) is True
        assert evaluate_condition(condition, {"low": "scatter", "high": "inconclusive"}) is False

    def test_or_operator(self):
        condition = {
            "operator": "or",
            "conditions": [
                {"operator": "equals", "field": "a", "value": 1},
                {"operator": "equals", "field": "b", "value": 3}
            ]
        }
        assert evaluate_condition(condition, {"a": 1, "b": 2}) is True

    def test_not_operator(self):
        condition = {
            "operator": "not",
            "condition": {"operator": "equals", "field": "status", "value": "underresolved"}
        }
        assert evaluate_condition(condition, {"status": "dispersed"}) is True

    def test_not_without_condition(self):
        with pytest.raises(ConditionEvaluationError):
            evaluate_condition({"operator": "not"}, {})

    def test_missing_field(self):
        with pytest.raises(ConditionEvaluationError):
            evaluate_condition({"operator": "equals", "value": 1}, {})

    def test_missing_operator(self):
        with pytest.raises(ConditionEvaluationError):
            evaluate_condition({"field": "a", "value": 1}, {"a": 1})

    def test_invalid_operator(self):
        condition = {"operator": "contains", "field": "a", "value": 1}
        with pytest.raises(ConditionEvaluationError):
            evaluate_condition(condition, {})

    def test_max_nesting_depth(self):
        condition = {"operator": "not", "condition": None}
        current = condition
        for _ in range(10):
            current["condition"] = {"operator": "not", "condition": None}
            current = current["condition"]
        current["condition"] = {"operator": "equals", "field": "a", "value": 1}

        with pytest.raises(ConditionEvaluationError):
            evaluate_condition(condition, {"a": 1})

    def test_empty_condition(self):
        assert evaluate_condition({}, {}) is True
        assert evaluate_condition(None, {}) is True


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
