"""Scenario files: the JSON surface consumed by the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .conditions import DEFAULT_BUDGET
from .couples import KProfile, element_from_json, element_to_json
from .errors import ScenarioError
from .estimates import VARIANTS
from .params import PhiParam, phi_from_json, phi_to_json
from .quadrature import LogGrid

_DEFAULT_GRID = LogGrid(1e-8, 1e8, 16)
_DEFAULT_CHECKS = ("C1", "C2", "C3", "C4")
_CHECK_NAMES = ("C1", "C2", "C3", "C4", "SV_sufficient")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    phi0: PhiParam
    phi1: PhiParam
    element: object                      # WeightedSeq | StepFn | KProfile
    grid: LogGrid = field(default=_DEFAULT_GRID)
    budget: float = DEFAULT_BUDGET
    checks: tuple = _DEFAULT_CHECKS
    variants: tuple = ("thm_ii",)
    sv_epsilon: float = 0.1

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "phi0": phi_to_json(self.phi0),
            "phi1": phi_to_json(self.phi1),
            "element": element_to_json(self.element),
            "grid": self.grid.describe(),
            "budget": self.budget,
            "checks": list(self.checks),
            "variants": list(self.variants),
            "sv_epsilon": self.sv_epsilon,
        }


def _grid_from_json(obj, path):
    if obj is None:
        return _DEFAULT_GRID
    try:
        return LogGrid(t_min=float(obj.get("t_min", _DEFAULT_GRID.t_min)),
                       t_max=float(obj.get("t_max", _DEFAULT_GRID.t_max)),
                       points_per_decade=int(obj.get(
                           "points_per_decade",
                           _DEFAULT_GRID.points_per_decade)))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def scenario_from_json(obj: dict, *, name_hint: str = "") -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario: expected a JSON object")
    try:
        name = str(obj.get("name") or name_hint or "scenario")
        phi0 = phi_from_json(obj["phi0"], "phi0")
        phi1 = phi_from_json(obj["phi1"], "phi1")
        element = element_from_json(obj["element"], "element")
    except KeyError as exc:
        raise ScenarioError(f"scenario: missing field {exc}") from exc
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc

    grid = _grid_from_json(obj.get("grid"), "grid")

    budget = obj.get("budget", DEFAULT_BUDGET)
    if not (isinstance(budget, (int, float)) and budget > 1.0
            and math.isfinite(budget)):
        raise ScenarioError("budget: must be a finite real > 1")

    checks = tuple(obj.get("checks", _DEFAULT_CHECKS))
    for c in checks:
        if c not in _CHECK_NAMES:
            raise ScenarioError(f"checks: unknown condition {c!r}; "
                                f"expected one of {_CHECK_NAMES}")

    variants = tuple(obj.get("variants", ("thm_ii",)))
    if not variants:
        raise ScenarioError("variants: at least one variant is required")
    for v in variants:
        if v not in VARIANTS:
            raise ScenarioError(f"variants: unknown variant {v!r}; "
                                f"expected one of {VARIANTS}")

    eps = obj.get("sv_epsilon", 0.1)
    if not (isinstance(eps, (int, float)) and eps > 0.0):
        raise ScenarioError("sv_epsilon: must be a positive real")

    return Scenario(name=name, phi0=phi0, phi1=phi1, element=element,
                    grid=grid, budget=float(budget), checks=checks,
                    variants=variants, sv_epsilon=float(eps))


def load_scenario(path: Path | str) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    return scenario_from_json(obj, name_hint=path.stem)
