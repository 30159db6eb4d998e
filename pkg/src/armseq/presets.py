"""Ready-made scenario dictionaries for demos, benches and tests.

Each function returns a plain dict in the scenario schema consumed by the CLI
(see :mod:`armseq.serialize`). The tabletop scenario produces two elbow-branch
subspaces separated in configuration space; the single-obstacle variant is the
four-task sequencing comparison instance.
"""

from __future__ import annotations

import math


def _arm() -> dict:
    return {
        "link_lengths": [1.0, 1.0],
        "joint_limits": [[-math.pi, math.pi], [-math.pi, math.pi]],
        "link_thickness": [0.04, 0.04],
        "base_position": [0.0, 0.0],
        "max_joint_velocity": [1.0, 1.0],
        "free_joint_resolution": 0.1,
    }


def tabletop() -> dict:
    """Two low boxes flanking the base; the task strip splits into an elbow-down
    and an elbow-up subspace with a central overlap."""
    return {
        "schema_version": 1,
        "kind": "scenario",
        "seed": 7,
        "arm": _arm(),
        "scene": [
            {"kind": "box", "min": [-1.15, -0.5], "max": [-0.8, 0.1], "tag": "offline"},
            {"kind": "box", "min": [0.8, -0.5], "max": [1.15, 0.1], "tag": "offline"},
        ],
        "online_obstacles": [
            {"kind": "disc", "center": [-0.4, 0.25], "radius": 0.06, "tag": "online"},
            {"kind": "box", "min": [-1.0, 1.32], "max": [-0.78, 1.48], "tag": "online"},
        ],
        "task_grid": {"region": [-1.2, 0.6, 1.2, 1.2], "spacing": 0.2},
        "connection_radius": 0.22,
        "edge_check_count": 5,
        "decomposition": {
            "epsilon": 0.5,
            "c_max": 5.0,
            "rho": 2.0,
            "rho_s": 0.02,
            "zeta": None,
            "max_subspaces": 5,
            "root_sample_count": 10,
        },
        "sequencing": {"k": 10, "threshold": 0.7, "home_task": [-0.2, 0.9]},
        "motion": {"step": 0.05, "timeout": 2.0, "dt": 0.01},
        "base_poses": None,
        "bench": {"task_counts": [3, 5, 8], "trials": 10},
    }


def tabletop_single_box() -> dict:
    """One box right of the base: a large elbow-up subspace plus a wrapped
    remnant. The fixed four-task mission exposes the cost of branch-mixing
    assignments in the task-space-only baseline."""
    sc = tabletop()
    sc["scene"] = [
        {"kind": "box", "min": [0.8, -0.5], "max": [1.15, 0.1], "tag": "offline"},
    ]
    sc["online_obstacles"] = []
    sc["tasks"] = [[0.05, 0.95], [0.2, 0.75], [0.85, 0.75], [1.05, 0.65]]
    return sc


def rail_mobile() -> dict:
    """Two base poses on a rail under a wide strip; each pose owns one side."""
    sc = tabletop()
    sc["scene"] = []
    sc["online_obstacles"] = []
    sc["task_grid"] = {"region": [-2.0, 0.6, 2.0, 1.0], "spacing": 0.2}
    sc["base_poses"] = [[-0.8, 0.0], [0.8, 0.0]]
    sc["sequencing"]["home_task"] = [0.0, 0.8]
    return sc
