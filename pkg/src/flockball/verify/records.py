"""Verification records, verdict rules and tolerance budgets."""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import math
from typing import Any, Iterable

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
VERDICTS = (PASS, FAIL, INCONCLUSIVE)

# measurements closer than BAND * budget to the decision boundary are inconclusive
BAND = 3.0
# normalized energy gaps carry budget ENERGY_BUDGET * h / R
ENERGY_BUDGET = 1e-3
# scaling-law inequalities carry budget SCALING_BUDGET * h / R
SCALING_BUDGET = 2.0

EXIT_CODES = {PASS: 0, FAIL: 2, INCONCLUSIVE: 3}


def resolution_budget(h: float, R: float, factor: float = 1.0) -> float:
    """Tolerance budget proportional to the relative grid resolution ``h / R``."""
    return factor * h / R


def decide(margin: float, budget: float, band: float = BAND) -> str:
    """Verdict for a signed margin (positive means the statement holds)."""
    if not math.isfinite(margin):
        return PASS if margin > 0 else FAIL
    if abs(margin) < band * budget:
        return INCONCLUSIVE
    return PASS if margin > 0 else FAIL


def combine(verdicts: Iterable[str]) -> str:
    vs = list(verdicts)
    if FAIL in vs:
        return FAIL
    if INCONCLUSIVE in vs:
        return INCONCLUSIVE
    return PASS


def exit_code(verdicts: Iterable[str]) -> int:
    return EXIT_CODES[combine(verdicts)]


def _clean(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and callable(x.item):
        return _clean(x.item())
    return x


@dataclass
class VerifyRecord:
    """One empirical check: inputs, measurements, fits, budget and verdict."""

    statement: str
    inputs: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    budget: float = 0.0
    verdict: str = INCONCLUSIVE
    notes: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")

    def as_dict(self) -> dict[str, Any]:
        return _clean(
            {
                "statement": self.statement,
                "inputs": self.inputs,
                "measured": self.measured,
                "fit": self.fit,
                "budget": self.budget,
                "verdict": self.verdict,
                "notes": self.notes,
            }
        )

    def row(self) -> dict[str, str]:
        """Flat CSV row (nested fields JSON-encoded with sorted keys)."""
        d = self.as_dict()
        return {
            "statement": d["statement"],
            "verdict": d["verdict"],
            "budget": f"{self.budget:.12g}",
            "inputs": json.dumps(d["inputs"], sort_keys=True),
            "measured": json.dumps(d["measured"], sort_keys=True),
            "fit": json.dumps(d["fit"], sort_keys=True),
            "notes": d["notes"],
        }
