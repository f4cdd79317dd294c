"""DRAM/NVM data placement planner and virtual-time simulator.

Documents (machines, traces, plans, reports, generator specs) are plain
dicts in the same JSON schema the command-line tool reads and writes.
"""

import json
from pathlib import Path

from . import _hmplace
from ._hmplace import HmplaceError, SCHEMA_VERSION

__all__ = [
    "HmplaceError",
    "SCHEMA_VERSION",
    "calibrate",
    "generate",
    "knapsack",
    "load",
    "normalize_machine",
    "plan",
    "simulate",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load(path):
    return json.loads(Path(path).read_text())


def normalize_machine(machine):
    """Machine description with every quantity in base units."""
    return json.loads(_hmplace.normalize_machine(_text(machine)))


def plan(trace, machine, search="auto", partition="auto"):
    """Plan placement for one iteration.

    Returns a dict with the chosen ``plan``, the (possibly partitioned)
    ``trace`` it refers to, and the predicted totals of each candidate.
    """
    return json.loads(_hmplace.plan(_text(trace), _text(machine), search, partition))


def simulate(trace, machine, policies=("nvm-only", "dram-only", "managed"), plan=None,
             noise=None, adapt=True, partition="auto"):
    """Simulate each policy and return the list of report dicts."""
    out = _hmplace.simulate(_text(trace), _text(machine), list(policies),
                            None if plan is None else _text(plan), noise, adapt, partition)
    return json.loads(out)["reports"]


def generate(spec, machine, seed):
    return json.loads(_hmplace.generate(_text(spec), _text(machine), int(seed)))


def calibrate(pairs):
    """Constant factor from (predicted, measured) pairs."""
    return _hmplace.calibrate([(float(p), float(m)) for p, m in pairs])


def knapsack(items, capacity):
    """items: iterable of (id, weight, size_in_granules)."""
    return set(_hmplace.knapsack([(str(i), float(w), int(s)) for i, w, s in items], int(capacity)))
