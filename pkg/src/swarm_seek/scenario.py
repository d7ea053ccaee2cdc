"""Scenario records: JSON schema, validation and construction of simulation inputs."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import deployment as dep
from .control import ControlGains
from .errors import ScenarioError
from .estimators import EPSILON_MU, EPSILON_X
from .fields import (
    BenchmarkField,
    CirclePath,
    GaussianField,
    LinearPath,
    MovingSource,
    QuadraticField,
    StaticPath,
)
from .graph import Graph, GraphError

SCHEMA_VERSION = 1

_vec = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_mat = {"type": "array", "items": _vec, "minItems": 1}
_pos = {"type": "number", "exclusiveMinimum": 0}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_FIELD = {
    "oneOf": [
        _obj({"kind": {"const": "gaussian"}, "source": _vec, "amplitude": _pos, "width": _pos}, ["kind", "source"]),
        _obj(
            {"kind": {"const": "quadratic"}, "source": _vec, "c": {"type": "number"}, "Q": _mat, "bounds_radius": _pos},
            ["kind", "source"],
        ),
        _obj(
            {
                "kind": {"const": "benchmark"}, "center": _vec, "k": _pos, "delta": _pos, "a": _vec, "b": _vec,
                "Q_a": _mat, "Q_b": _mat, "w_a": {"type": "number", "minimum": 0},
                "w_b": {"type": "number", "minimum": 0}, "region": _mat, "C": {"type": "number"},
            },
            ["kind", "center"],
        ),
    ]
}

_MOTION = {
    "oneOf": [
        _obj({"kind": {"const": "static"}}, ["kind"]),
        _obj({"kind": {"const": "linear"}, "velocity": _vec}, ["kind", "velocity"]),
        _obj(
            {"kind": {"const": "circle"}, "center": _vec, "radius": _pos, "omega": {"type": "number"},
             "phase": {"type": "number"}},
            ["kind", "center", "radius", "omega"],
        ),
    ]
}

_transform = {"transform": _mat}
_DEPLOYMENT = {
    "oneOf": [
        _mat,
        _obj({"kind": {"const": "explicit"}, "points": _mat, **_transform}, ["kind", "points"]),
        _obj({"kind": {"const": "polygon"}, "N": {"type": "integer", "minimum": 3}, "rho": _pos,
              "phase": {"type": "number"}, **_transform}, ["kind", "N"]),
        _obj({"kind": {"const": "cross"}, "N_half": {"type": "integer", "minimum": 4}, "a1": _pos,
              "alpha": {"type": "number"}, **_transform}, ["kind", "N_half"]),
        _obj({"kind": {"const": "grid"}, "nx": {"type": "integer", "minimum": 1},
              "ny": {"type": "integer", "minimum": 1}, "spacing": _pos, "spacing_y": _pos, **_transform},
             ["kind", "nx", "ny"]),
        _obj({"kind": {"const": "disk"}, "n": {"type": "integer", "minimum": 1}, "radius": _pos,
              "method": {"enum": ["halton", "random"]}, **_transform}, ["kind", "n"]),
    ]
}

_edge = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}
_GRAPH = {
    "oneOf": [
        _obj({"kind": {"const": "edges"}, "edges": {"type": "array", "items": _edge}}, ["kind", "edges"]),
        _obj({"kind": {"const": "proximity"}, "radius": _pos}, ["kind", "radius"]),
        _obj({"kind": {"enum": ["complete", "ring", "path", "reference"]}}, ["kind"]),
    ]
}

_HEADINGS = {
    "oneOf": [
        _vec,
        _obj({"kind": {"const": "random"}}, ["kind"]),
        _obj({"kind": {"const": "constant"}, "value": {"type": "number"}}, ["kind", "value"]),
    ]
}

SCHEMA = _obj(
    {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "field": _FIELD,
        "source_motion": _MOTION,
        "deployment": _DEPLOYMENT,
        "centroid": _vec,
        "graph": _GRAPH,
        "robot_model": {"enum": ["single_integrator", "unicycle"]},
        "headings": _HEADINGS,
        "gains": _obj({"k_f": _pos, "k_gamma": _pos, "gamma": _pos}),
        "estimator": _obj(
            {
                "mode": {"enum": ["distributed", "oracle"]},
                "epsilon_x": _pos,
                "epsilon_mu": _pos,
                "x_substeps": {"type": "integer", "minimum": 1},
                "mu_substeps": {"type": "integer", "minimum": 1},
                "floor_rel": {"type": "number", "minimum": 0},
                "warm_start": {"type": ["number", "null"], "minimum": 0},
                "on_removal": {"enum": ["reset", "keep"]},
            }
        ),
        "dt": _pos,
        "horizon": {"type": "number", "minimum": 0},
        "seed": {"type": "integer"},
        "epsilon_ball": {
            "oneOf": [_pos, _obj({"times_D": _pos}, ["times_D"])],
        },
        "events": {
            "type": "array",
            "items": _obj(
                {"time": {"type": "number", "minimum": 0}, "kind": {"const": "remove"},
                 "robot": {"type": "integer", "minimum": 0}},
                ["time", "kind", "robot"],
            ),
        },
    },
    ["schema_version", "field", "deployment", "centroid", "graph", "dt", "horizon"],
)


@dataclass(frozen=True)
class RemovalEvent:
    time: float
    robot: int


@dataclass(frozen=True)
class EstimatorConfig:
    mode: str = "distributed"
    epsilon_x: float = EPSILON_X
    epsilon_mu: float = EPSILON_MU
    x_substeps: int = 1
    mu_substeps: int = 1
    floor_rel: float = 1e-9
    warm_start: float | None = None
    on_removal: str = "reset"


@dataclass(frozen=True, eq=False)
class Scenario:
    field: MovingSource
    graph: Graph
    positions: np.ndarray
    robot_model: str = "single_integrator"
    headings: np.ndarray | None = None
    gains: ControlGains = field(default_factory=ControlGains)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    dt: float = 0.01
    horizon: float = 10.0
    events: tuple = ()
    seed: int = 0
    epsilon_ball: float = 1.0
    name: str = "scenario"
    spec: dict | None = None

    def __post_init__(self):
        p = np.array(self.positions, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "positions", p)
        if self.dt <= 0 or not np.isfinite(self.dt):
            raise ScenarioError("dt must be positive")
        if self.horizon < 0:
            raise ScenarioError("horizon must be non-negative")
        if p.shape[0] != self.graph.node_count:
            raise ScenarioError(f"graph has {self.graph.node_count} nodes but deployment has {p.shape[0]} robots")
        if not self.graph.is_connected():
            raise ScenarioError("initial graph is not connected")
        if p.shape[1] != self.field.base.dimension:
            raise ScenarioError("deployment and field dimensions differ")
        if self.robot_model not in ("single_integrator", "unicycle"):
            raise ScenarioError(f"unknown robot model {self.robot_model!r}")
        if self.robot_model == "unicycle":
            if p.shape[1] != 2:
                raise ScenarioError("unicycles are planar")
            if self.headings is None or len(self.headings) != p.shape[0]:
                raise ScenarioError("unicycle scenarios need one heading per robot")
        times = [e.time for e in self.events]
        if times != sorted(times):
            raise ScenarioError("events must be time-sorted")
        ids = [e.robot for e in self.events]
        if len(set(ids)) != len(ids) or any(not 0 <= i < p.shape[0] for i in ids):
            raise ScenarioError("removal events must name distinct existing robots")
        if self.estimator.mode not in ("distributed", "oracle"):
            raise ScenarioError(f"unknown estimator mode {self.estimator.mode!r}")
        if self.estimator.on_removal not in ("reset", "keep"):
            raise ScenarioError(f"unknown removal policy {self.estimator.on_removal!r}")

    @property
    def N(self) -> int:
        return self.positions.shape[0]

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))


# ---------------------------------------------------------------------------


def _build_field(spec):
    kind = spec["kind"]
    kw = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "gaussian":
            return GaussianField(**kw)
        if kind == "quadratic":
            if "Q" in kw:
                kw["Q"] = np.asarray(kw["Q"], dtype=float)
            return QuadraticField(**kw)
        for key in ("a", "b", "Q_a", "Q_b", "region"):
            if key in kw:
                kw[key] = np.asarray(kw[key], dtype=float)
        return BenchmarkField(**kw)
    except (ValueError, TypeError, np.linalg.LinAlgError) as exc:
        raise ScenarioError(f"bad field specification: {exc}") from exc


def _build_path(spec):
    kind = spec.get("kind", "static")
    if kind == "linear":
        return LinearPath(tuple(spec["velocity"]))
    if kind == "circle":
        return CirclePath(tuple(spec["center"]), spec["radius"], spec["omega"], spec.get("phase", 0.0))
    return StaticPath()


def _build_deployment(spec) -> dep.Deployment:
    if isinstance(spec, list):
        return dep.from_positions(spec)
    kind = spec["kind"]
    try:
        if kind == "explicit":
            x = dep.from_positions(spec["points"])
        elif kind == "polygon":
            x = dep.regular_polygon(spec["N"], spec.get("rho", 1.0), spec.get("phase", 0.0))
        elif kind == "cross":
            x = dep.cross_deployment(spec["N_half"], spec.get("a1", 1.0), spec.get("alpha"))
        elif kind == "grid":
            x = dep.grid(spec["nx"], spec["ny"], spec.get("spacing", 1.0), spec.get("spacing_y"))
        else:
            x = dep.sample_disk(spec["n"], spec.get("radius", 1.0), spec.get("method", "halton"))
        if "transform" in spec:
            x = dep.affine_transform(x, spec["transform"])
    except dep.DeploymentError as exc:
        raise ScenarioError(str(exc)) from exc
    return x


def _build_graph(spec, positions) -> Graph:
    kind = spec["kind"]
    n = len(positions)
    try:
        if kind == "edges":
            return Graph(n, [tuple(e) for e in spec["edges"]])
        if kind == "proximity":
            return Graph.proximity(positions, spec["radius"])
        if kind == "complete":
            return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
        if kind == "ring":
            if n > 2:
                return Graph(n, [(i, (i + 1) % n) for i in range(n)])
            return Graph(n, [(i, i + 1) for i in range(n - 1)])
        if kind == "path":
            return Graph(n, [(i, i + 1) for i in range(n - 1)])
        return Graph.reference()
    except GraphError as exc:
        raise ScenarioError(f"bad graph: {exc}") from exc


def _build_headings(spec, n, seed):
    if spec is None:
        return None
    if isinstance(spec, list):
        h = np.asarray(spec, dtype=float)
    elif spec["kind"] == "constant":
        h = np.full(n, float(spec["value"]))
    else:
        h = np.random.default_rng(seed).uniform(-np.pi, np.pi, n)
    return np.pi - np.mod(np.pi - h, 2 * np.pi)


def validate_spec(spec: dict) -> None:
    try:
        jsonschema.validate(spec, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"scenario invalid at {where}: {exc.message}") from exc


def from_dict(spec: dict, seed: int | None = None) -> Scenario:
    validate_spec(spec)
    spec = copy.deepcopy(spec)
    if seed is not None:
        spec["seed"] = seed
    seed = spec.get("seed", 0)
    base = _build_field(spec["field"])
    fld = MovingSource(base, _build_path(spec.get("source_motion", {"kind": "static"})))
    x = _build_deployment(spec["deployment"])
    centroid = np.asarray(spec["centroid"], dtype=float)
    if centroid.shape != (x.m,):
        raise ScenarioError(f"centroid has dimension {centroid.shape[0]}, deployment {x.m}")
    p0 = x.positions(centroid)
    graph = _build_graph(spec["graph"], p0)
    model = spec.get("robot_model", "single_integrator")
    headings = _build_headings(spec.get("headings", {"kind": "random"} if model == "unicycle" else None), x.N, seed)
    try:
        gains = ControlGains(**spec.get("gains", {}))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    est = EstimatorConfig(**spec.get("estimator", {}))
    eb = spec.get("epsilon_ball", {"times_D": 2.0})
    eps_ball = eb["times_D"] * x.D if isinstance(eb, dict) else float(eb)
    events = tuple(RemovalEvent(float(e["time"]), int(e["robot"])) for e in spec.get("events", []))
    return Scenario(
        field=fld, graph=graph, positions=p0, robot_model=model, headings=headings, gains=gains,
        estimator=est, dt=float(spec["dt"]), horizon=float(spec["horizon"]), events=events, seed=seed,
        epsilon_ball=eps_ball, name=spec.get("name", "scenario"), spec=spec,
    )


def load(path, seed: int | None = None) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed JSON ({exc})") from exc
    return from_dict(spec, seed=seed)


def preset_names() -> list[str]:
    root = resources.files("swarm_seek") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def preset_path(name: str):
    name = name[:-5] if name.endswith(".json") else name
    p = resources.files("swarm_seek") / "presets" / f"{name}.json"
    if not p.is_file():
        raise ScenarioError(f"no bundled scenario {name!r}; have {', '.join(preset_names())}")
    return p


def preset_spec(name: str) -> dict:
    return json.loads(preset_path(name).read_text())


def preset(name: str, **overrides) -> Scenario:
    spec = preset_spec(name)
    spec.update(overrides)
    return from_dict(spec)
