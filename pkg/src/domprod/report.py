from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

# documented field set of every JSON line the CLI prints
REPORT_FIELDS = ("command", "algorithm", "n", "d", "domain", "seed", "parameters",
                 "result", "wall_ms", "decision_calls", "iterations")


@dataclass
class RunReport:
    command: str
    algorithm: Optional[str] = None
    n: Optional[int] = None
    d: Optional[int] = None
    domain: Optional[str] = None
    seed: Optional[int] = None
    parameters: dict = field(default_factory=dict)
    result: Any = None
    wall_ms: float = 0.0
    decision_calls: Optional[int] = None
    iterations: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False, default=_jsonable)


def _jsonable(value):
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"cannot serialise {type(value).__name__}")


@contextmanager
def stopwatch():
    """Yields a one-element list that receives elapsed milliseconds on exit."""
    box = [0.0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - t0) * 1000.0
