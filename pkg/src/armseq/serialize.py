"""JSON schemas and round-trip (de)serialization for every persisted artifact.

Four kinds of files exist: scenario, decomposition artifact, plan record and
bench report. All are versioned, written with sorted keys and newline-
terminated, and floats survive the round trip exactly (repr-based JSON
encoding), so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .decomposition import Decomposition, DecompositionParams, GhaMap, GhaVerification
from .kinematics import ArmModel, TaskPoint
from .sequencer import Leg, SequencePlan
from .taskgraph import TaskGraph
from .world import Box, Disc, Scene

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Input file violates the expected schema; message carries the JSON path."""


def _req(mapping, key, kind, path):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError("%s.%s: missing required field" % (path, key))
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError("%s.%s: expected a number" % (path, key))
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError("%s.%s: expected %s" % (path, key, kind.__name__))
    return value


def _pair(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise SchemaError("%s: expected a pair [x, y]" % path)
    return float(value[0]), float(value[1])


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("%s: line %d column %d: %s"
                              % (path, exc.lineno, exc.colno, exc.msg)) from exc


# ---------------------------------------------------------------- obstacles

def obstacle_to_dict(o) -> dict:
    if isinstance(o, Box):
        return {"kind": "box", "min": [o.xmin, o.ymin], "max": [o.xmax, o.ymax], "tag": o.tag}
    if isinstance(o, Disc):
        return {"kind": "disc", "center": list(o.center), "radius": o.radius, "tag": o.tag}
    raise TypeError("unknown obstacle type %r" % type(o))


def obstacle_from_dict(d, path="obstacle"):
    kind = _req(d, "kind", str, path)
    tag = d.get("tag", "offline")
    if tag not in ("offline", "online"):
        raise SchemaError("%s.tag: must be 'offline' or 'online'" % path)
    if kind == "box":
        xmin, ymin = _pair(_req(d, "min", list, path), path + ".min")
        xmax, ymax = _pair(_req(d, "max", list, path), path + ".max")
        try:
            return Box(xmin, ymin, xmax, ymax, tag)
        except ValueError as exc:
            raise SchemaError("%s: %s" % (path, exc)) from exc
    if kind == "disc":
        center = _pair(_req(d, "center", list, path), path + ".center")
        radius = _req(d, "radius", float, path)
        try:
            return Disc(center, radius, tag)
        except ValueError as exc:
            raise SchemaError("%s: %s" % (path, exc)) from exc
    raise SchemaError("%s.kind: unknown obstacle kind %r" % (path, kind))


def scene_from_list(items, path="scene") -> Scene:
    if not isinstance(items, list):
        raise SchemaError("%s: expected a list of obstacles" % path)
    return Scene(tuple(obstacle_from_dict(o, "%s[%d]" % (path, i))
                       for i, o in enumerate(items)))


# ----------------------------------------------------------------- scenario

def arm_from_dict(d, path="arm") -> ArmModel:
    try:
        return ArmModel(
            link_lengths=tuple(_req(d, "link_lengths", list, path)),
            joint_limits=tuple(tuple(pair) for pair in _req(d, "joint_limits", list, path)),
            link_thickness=tuple(d.get("link_thickness") or ()),
            base_position=_pair(d.get("base_position", [0.0, 0.0]), path + ".base_position"),
            max_joint_velocity=tuple(d.get("max_joint_velocity") or ()),
            free_joint_resolution=float(d.get("free_joint_resolution", 0.1)),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def arm_to_dict(arm: ArmModel) -> dict:
    return {
        "link_lengths": list(arm.link_lengths),
        "joint_limits": [list(p) for p in arm.joint_limits],
        "link_thickness": list(arm.link_thickness),
        "base_position": list(arm.base_position),
        "max_joint_velocity": list(arm.max_joint_velocity),
        "free_joint_resolution": arm.free_joint_resolution,
    }


def params_from_dict(d, path="decomposition") -> DecompositionParams:
    try:
        return DecompositionParams(
            epsilon=_req(d, "epsilon", float, path),
            c_max=float(d.get("c_max", 5.0)),
            rho=float(d.get("rho", 2.0)),
            rho_s=float(d.get("rho_s", 0.02)),
            zeta=None if d.get("zeta") is None else float(d["zeta"]),
            max_subspaces=int(d.get("max_subspaces", 5)),
            root_sample_count=int(d.get("root_sample_count", 10)),
            rng_seed=int(d.get("rng_seed", 0)),
            rho_both_endpoints=bool(d.get("rho_both_endpoints", False)),
        )
    except ValueError as exc:
        raise SchemaError("%s: %s" % (path, exc)) from exc


def params_to_dict(p: DecompositionParams) -> dict:
    return {
        "epsilon": p.epsilon, "c_max": p.c_max, "rho": p.rho, "rho_s": p.rho_s,
        "zeta": p.zeta, "max_subspaces": p.max_subspaces,
        "root_sample_count": p.root_sample_count, "rng_seed": p.rng_seed,
        "rho_both_endpoints": p.rho_both_endpoints,
    }


class Scenario:
    """Parsed scenario file: arm, scenes, grid and parameter blocks."""

    def __init__(self, data: dict):
        path = "scenario"
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError("%s.schema_version: expected %d" % (path, SCHEMA_VERSION))
        if "seed" not in data:
            raise SchemaError("%s.seed: a seed is mandatory" % path)
        self.seed = int(data["seed"])
        self.arm = arm_from_dict(_req(data, "arm", dict, path))
        self.scene = scene_from_list(_req(data, "scene", list, path))
        self.online_obstacles = scene_from_list(data.get("online_obstacles") or [],
                                                path + ".online_obstacles").obstacles
        grid = _req(data, "task_grid", dict, path)
        region = _req(grid, "region", list, path + ".task_grid")
        if len(region) != 4:
            raise SchemaError("%s.task_grid.region: expected [xmin, ymin, xmax, ymax]" % path)
        self.grid_region = tuple(float(v) for v in region)
        self.grid_spacing = _req(grid, "spacing", float, path + ".task_grid")
        if self.grid_spacing <= 0:
            raise SchemaError("%s.task_grid.spacing: must be positive" % path)
        self.connection_radius = _req(data, "connection_radius", float, path)
        self.edge_check_count = int(data.get("edge_check_count", 5))
        dparams = params_from_dict(_req(data, "decomposition", dict, path))
        dparams.rng_seed = self.seed
        self.decomposition = dparams
        seq = _req(data, "sequencing", dict, path)
        self.k = int(seq.get("k", 10))
        self.threshold = float(seq.get("threshold", 0.7))
        self.home_task = TaskPoint(_pair(_req(seq, "home_task", list, path + ".sequencing"),
                                         path + ".sequencing.home_task"))
        motion = data.get("motion") or {}
        self.step = float(motion.get("step", 0.05))
        self.timeout = float(motion.get("timeout", 2.0))
        self.dt = float(motion.get("dt", 0.01))
        self.base_poses = None
        if data.get("base_poses"):
            self.base_poses = [_pair(b, "%s.base_poses[%d]" % (path, i))
                               for i, b in enumerate(data["base_poses"])]
        bench = data.get("bench") or {}
        self.task_counts = [int(c) for c in bench.get("task_counts", [3, 5, 8])]
        self.trials = int(bench.get("trials", 10))
        self.tasks = [TaskPoint(_pair(t, "%s.tasks[%d]" % (path, i)))
                      for i, t in enumerate(data.get("tasks") or [])]
        self.raw = data

    def full_scene(self) -> Scene:
        return self.scene.with_obstacles(self.online_obstacles)


def load_scenario(path) -> Scenario:
    return Scenario(load_json(path))


# ----------------------------------------------------------------- taskgraph

def graph_to_dict(g: TaskGraph) -> dict:
    return {
        "nodes": [list(p.position) for p in g.nodes],
        "base_index": g.nodes[0].base_index if g.nodes else None,
        "ik_sets": [[[float(v) for v in q] for q in sols] for sols in g.ik_sets],
        "edges": [[i, j, w] for (i, j), w in sorted(g.edges.items())],
        "connection_radius": g.connection_radius,
    }


def graph_from_dict(d, path="graph") -> TaskGraph:
    base_index = d.get("base_index")
    nodes = [TaskPoint(_pair(p, "%s.nodes[%d]" % (path, i)), base_index=base_index)
             for i, p in enumerate(_req(d, "nodes", list, path))]
    ik_sets = [[np.array(q, dtype=float) for q in sols]
               for sols in _req(d, "ik_sets", list, path)]
    edges = {}
    for i, j, w in _req(d, "edges", list, path):
        edges[(int(i), int(j))] = float(w)
    return TaskGraph(nodes, ik_sets, edges, _req(d, "connection_radius", float, path))


# --------------------------------------------------------------- GhaMap etc.

def map_to_dict(m: GhaMap) -> dict:
    return {
        "assignment": {str(i): [float(v) for v in q] for i, q in sorted(m.assignment.items())},
        "tree_edges": [[a, b] for a, b in sorted(m.tree_edges)],
        "root": m.root,
        "root_config": [float(v) for v in m.root_config],
        "mean_config": [float(v) for v in m.mean_config],
        "objective": m.objective,
        "base_pose": None if m.base_pose is None else list(m.base_pose),
        "base_index": m.base_index,
    }


def map_from_dict(d, path="map") -> GhaMap:
    return GhaMap(
        assignment={int(i): np.array(q, dtype=float)
                    for i, q in _req(d, "assignment", dict, path).items()},
        tree_edges={(int(a), int(b)) for a, b in _req(d, "tree_edges", list, path)},
        root=int(_req(d, "root", int, path)),
        root_config=np.array(d["root_config"], dtype=float),
        mean_config=np.array(d["mean_config"], dtype=float),
        objective=_req(d, "objective", float, path),
        base_pose=None if d.get("base_pose") is None else tuple(d["base_pose"]),
        base_index=d.get("base_index"),
    )


def verification_to_dict(v: GhaVerification) -> dict:
    return {
        "edge_violations": [list(t) for t in v.edge_violations],
        "hop_bound_violations": [list(t) for t in v.hop_bound_violations],
        "geodesic_bound_violations": [list(t) for t in v.geodesic_bound_violations],
        "edges_checked": v.edges_checked,
        "hop_pairs_checked": v.hop_pairs_checked,
        "geodesics_checked": v.geodesics_checked,
    }


def artifact_to_dict(dec: Decomposition, scenario_raw: dict,
                     verifications: list[GhaVerification]) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "decomposition",
        "scenario": scenario_raw,
        "maps": [map_to_dict(m) for m in dec.maps],
        "coverage": dec.coverage,
        "params": params_to_dict(dec.params),
        "verification": [verification_to_dict(v) for v in verifications],
    }
    if dec.base_graphs is not None:
        out["base_graphs"] = [graph_to_dict(g) for g in dec.base_graphs]
        out["base_poses"] = [list(b) for b in dec.base_poses]
    else:
        out["graph"] = graph_to_dict(dec.graph)
    return out


def artifact_from_dict(d) -> tuple[Decomposition, Scenario]:
    path = "artifact"
    if d.get("kind") != "decomposition":
        raise SchemaError("%s.kind: expected 'decomposition'" % path)
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError("%s.schema_version: expected %d" % (path, SCHEMA_VERSION))
    scenario = Scenario(_req(d, "scenario", dict, path))
    params = params_from_dict(_req(d, "params", dict, path), path + ".params")
    maps = [map_from_dict(m, "%s.maps[%d]" % (path, i))
            for i, m in enumerate(_req(d, "maps", list, path))]
    coverage = _req(d, "coverage", float, path)
    if "base_graphs" in d:
        graphs = [graph_from_dict(g, "%s.base_graphs[%d]" % (path, i))
                  for i, g in enumerate(d["base_graphs"])]
        poses = [tuple(b) for b in d["base_poses"]]
        dec = Decomposition(maps, None, params, coverage, graphs, poses)
    else:
        dec = Decomposition(maps, graph_from_dict(_req(d, "graph", dict, path)),
                            params, coverage)
    return dec, scenario


# -------------------------------------------------------------------- plans

def _metrics_to_dict(m) -> dict | None:
    if m is None:
        return None
    return {"config_length": m.config_length, "exec_time": m.exec_time,
            "max_jerk": m.max_jerk, "valid": m.valid}


def plan_to_dict(plan: SequencePlan, extra: dict | None = None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "plan",
        "visit_order": list(plan.visit_order),
        "visit_configs": [[float(v) for v in q] for q in plan.visit_configs],
        "legs": [
            {
                "from": leg.from_label, "to": leg.to_label,
                "map_index": leg.map_index, "valid": leg.valid,
                "source": leg.trajectory.source,
                "waypoints": [[float(v) for v in w] for w in leg.trajectory.waypoints],
                "metrics": _metrics_to_dict(leg.metrics),
            }
            for leg in plan.legs
        ],
        "group_orders": {str(k): v for k, v in plan.group_orders.items()},
        "unplanned": list(plan.unplanned),
        "total_config_cost": plan.total_config_cost,
        "home_config": None if plan.home_config is None
        else [float(v) for v in plan.home_config],
    }
    if extra:
        out.update(extra)
    return out


def plan_from_dict(d) -> SequencePlan:
    from .motion import Trajectory, TrajectoryMetrics

    path = "plan"
    if d.get("kind") != "plan":
        raise SchemaError("%s.kind: expected 'plan'" % path)
    legs = []
    for i, ld in enumerate(_req(d, "legs", list, path)):
        metrics = ld.get("metrics")
        legs.append(Leg(
            from_label=ld["from"], to_label=ld["to"],
            trajectory=Trajectory([np.array(w, dtype=float) for w in ld["waypoints"]],
                                  source=ld.get("source", "straight_line")),
            map_index=ld.get("map_index"), valid=ld.get("valid"),
            metrics=None if metrics is None else TrajectoryMetrics(**metrics),
        ))
    return SequencePlan(
        legs=legs,
        visit_order=list(_req(d, "visit_order", list, path)),
        visit_configs=[np.array(q, dtype=float) for q in _req(d, "visit_configs", list, path)],
        total_config_cost=_req(d, "total_config_cost", float, path),
        group_orders={int(k): v for k, v in d.get("group_orders", {}).items()},
        unplanned=list(d.get("unplanned", [])),
        home_config=None if d.get("home_config") is None
        else np.array(d["home_config"], dtype=float),
    )


def jsonable(value):
    """Recursively convert numpy scalars/arrays for the json encoder."""
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
