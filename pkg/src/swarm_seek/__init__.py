"""Distributed source seeking for robot swarms: fields, consensus estimators,
controllers and a deterministic closed-loop simulator."""

from .errors import DisconnectionError, DivergenceError, ScenarioError, StabilityError, SwarmSeekError
from .graph import Graph
from .deployment import Deployment
from .scenario import Scenario
from .engine import Trace, metrics, run

__version__ = "0.1.0"

__all__ = [
    "Deployment", "DisconnectionError", "DivergenceError", "Graph", "Scenario", "ScenarioError",
    "StabilityError", "SwarmSeekError", "Trace", "metrics", "run",
]
