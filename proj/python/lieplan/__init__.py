"""Closed-form motion planning for driftless systems on SE(2), SO(3) and SE(2)xR.

Systems, targets and results use the same JSON documents as the ``lieplan`` command-line
tool, represented here as plain dicts.
"""

import json

from . import _lieplan
from ._lieplan import InputError, controllability_margin, exp, series_exp

__all__ = [
    "InputError",
    "PlanningError",
    "classify",
    "controllability_margin",
    "exp",
    "fk",
    "fuzz",
    "impossibility_scan",
    "plan",
    "series_exp",
    "trajectory",
]


class PlanningError(RuntimeError):
    """Planning failed. ``kind`` is Uncontrollable, OutsideDomain, OutOfCatalog or DegenerateL;
    ``verdict`` is the domain verdict dict for OutsideDomain."""

    def __init__(self, kind, message, verdict=None):
        super().__init__(message)
        self.kind = kind
        self.verdict = verdict


def _steps(plan_or_steps):
    steps = plan_or_steps["steps"] if isinstance(plan_or_steps, dict) else plan_or_steps
    return [(s["field"], s["time"]) if isinstance(s, dict) else tuple(s) for s in steps]


def system(group, fields):
    return {"group": group, "fields": [list(map(float, f)) for f in fields]}


def classify(spec):
    return json.loads(_lieplan.classify_json(json.dumps(spec)))


def plan(spec, target, force=False, paper_literal=False):
    doc = json.loads(_lieplan.plan_json(json.dumps(spec), json.dumps(target), force, paper_literal))
    if "error" in doc:
        raise PlanningError(doc["error"], doc["message"], doc.get("verdict"))
    return doc


def fk(spec, steps):
    """Pose reached by the steps (a plan dict or (field, time) pairs), as a target dict."""
    return json.loads(_lieplan.fk_json(json.dumps(spec), _steps(steps)))


def trajectory(spec, steps, dt=0.01):
    return _lieplan.trajectory(json.dumps(spec), _steps(steps), dt)


def fuzz(family, systems=100, targets=100, seed=1, paper_literal=False):
    return json.loads(_lieplan.fuzz_json(family, systems, targets, seed, paper_literal))


def impossibility_scan(v1, v2, beta, t3_bound):
    return json.loads(_lieplan.impossibility_json(list(v1), list(v2), beta, t3_bound))
