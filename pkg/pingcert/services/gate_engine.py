"""Config-driven certification gate engine."""

import json
import logging
import operator
from pathlib import Path
from typing import Optional

from pingcert.models.schemas import GateOutcome

logger = logging.getLogger(__name__)

GATES_PATH = Path(__file__).resolve().parents[1] / "data" / "certification_gates.json"

OPERATORS = {
    ">=": (operator.ge, "<"),
    "<=": (operator.le, ">"),
    ">": (operator.gt, "<="),
    "<": (operator.lt, ">="),
    "==": (operator.eq, "!="),
}


def load_gates(mode: str, path: Optional[Path] = None) -> list[dict]:
    with (path or GATES_PATH).open("r", encoding="utf-8") as f:
        payload = json.load(f)
    if mode not in payload:
        raise KeyError(f"no gates configured for mode {mode!r}")
    return payload[mode]


def evaluate_gates(mode: str, metrics: dict, path: Optional[Path] = None) -> tuple[bool, list[GateOutcome]]:
    """
    Evaluate the gates of one theorem mode against computed metrics.
    Supported operators: >=, <=, >, <, ==. A missing metric fails its gate.
    """
    outcomes: list[GateOutcome] = []
    all_passed = True

    for gate in load_gates(mode, path):
        metric = gate["metric"]
        op = gate["operator"]
        threshold = gate["value"]
        value = metrics.get(metric)

        if value is None:
            passed = False
            message = f"Metric {metric} not computed"
        elif op not in OPERATORS:
            passed = False
            message = f"Unsupported operator: {op}"
        else:
            compare, negated = OPERATORS[op]
            passed = bool(compare(value, threshold))
            message = f"{metric}={_show(value)} {op if passed else negated} {_show(threshold)}"

        outcomes.append(
            GateOutcome(
                gate_id=gate["id"],
                gate_name=gate["name"],
                passed=passed,
                message=message,
                details={
                    "metric": metric,
                    "operator": op,
                    "threshold": threshold,
                    "value": _show(value) if value is not None else None,
                },
            )
        )
        logger.info("gate %s: %s", gate["id"], "pass" if passed else "FAIL")
        all_passed = all_passed and passed

    return all_passed, outcomes


def _show(value):
    if isinstance(value, bool):
        return str(value).lower()
    return value
