"""Comparison methods and a brute-force optimal oracle.

All methods are costed through one shared :class:`CostOracle` (adapted
straight-seed trajectories with a fixed seeding policy), so no method sees a
private cost model. The oracle enumerates every IK assignment and permutation
on small instances to produce ground-truth optimal tour costs.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .kinematics import ArmModel, TaskPoint, config_distance, ik_solutions, task_distance
from .motion import (PlanningTimeoutError, SeedInvalidError, Trajectory,
                     adapt_trajectory, fallback_plan)
from .sequencer import (HOME, Leg, NoIkSolutionsError, SequencePlan,
                        _straight_leg, solve_tsp)
from .world import Scene


class TooLargeError(ValueError):
    """Instance exceeds the brute-force oracle's enumeration limits."""


@dataclass
class CostOracle:
    """Shared leg-cost function: adapted straight-seed trajectory length.

    Costs are cached per unordered endpoint pair (hence exactly symmetric)
    and each pair's RNG stream derives from the endpoints themselves, so the
    value is independent of query order. Unplannable legs cost infinity.
    """

    arm: ArmModel
    scene: Scene
    step: float = 0.05
    rng_seed: int = 0
    timeout: float = 2.0
    _cache: dict = field(default_factory=dict, repr=False)

    def _key(self, q_a, q_b):
        ka, kb = tuple(float(v) for v in q_a), tuple(float(v) for v in q_b)
        return (ka, kb) if ka <= kb else (kb, ka)

    def leg(self, q_a, q_b) -> tuple[float, Trajectory | None]:
        key = self._key(q_a, q_b)
        if key not in self._cache:
            lo, hi = np.array(key[0]), np.array(key[1])
            pair_seed = zlib.crc32(np.array(key, dtype=float).tobytes())
            leg_seed = (self.rng_seed * 1_000_003 + pair_seed) % (2 ** 63)
            seed = _straight_leg(lo, hi)
            try:
                traj = adapt_trajectory(seed, self.arm, self.scene, self.step,
                                        rng_seed=leg_seed)
            except SeedInvalidError:
                try:
                    traj = fallback_plan(lo, hi, self.arm, self.scene,
                                         timeout=self.timeout, step=self.step,
                                         rng_seed=leg_seed)
                except PlanningTimeoutError:
                    traj = None
            cost = traj.length() if traj is not None else math.inf
            self._cache[key] = (cost, traj)
        cost, traj = self._cache[key]
        if traj is not None and not np.array_equal(traj.waypoints[0], np.asarray(q_a, float)):
            traj = Trajectory(traj.waypoints[::-1], source=traj.source)
        return cost, traj

    def cost(self, q_a, q_b) -> float:
        return self.leg(q_a, q_b)[0]


def plan_visit_cost(plan: SequencePlan, oracle: CostOracle) -> float:
    """Re-cost a plan's visit sequence through the shared oracle."""
    total = 0.0
    for a, b in zip(plan.visit_configs, plan.visit_configs[1:]):
        total += oracle.cost(a, b)
    return total


def _seed_legs(visit_labels, visit_configs):
    """Straight-line seed legs between consecutive visit configurations."""
    return [
        Leg(visit_labels[i], visit_labels[i + 1],
            _straight_leg(visit_configs[i], visit_configs[i + 1]))
        for i in range(len(visit_configs) - 1)
    ]


def _first_ik(arm, task, scene):
    sols = ik_solutions(arm, task, scene)
    if not sols:
        raise NoIkSolutionsError("task at %r has no valid IK solution" % (task.position,))
    return sols


def _task_space_order(tasks, home_task) -> list[int]:
    """Anchored TSP over task-space distances; index 0 is home."""
    pts = [home_task] + list(tasks)
    n = len(pts)
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            W[i, j] = W[j, i] = task_distance(pts[i], pts[j])
    return solve_tsp(W, anchor=0)


def naive_sequence(tasks, arm: ArmModel, scene: Scene, home_task: TaskPoint,
                   home_q=None) -> SequencePlan:
    """Task-space-only baseline: TSP on d_T, first IK solution per task.

    Returns a seed plan (straight-line legs); run it through
    :func:`armseq.sequencer.adapt_plan` for executable trajectories.
    """
    ik_sets = [_first_ik(arm, t, scene) for t in tasks]
    if home_q is None:
        home_q = _first_ik(arm, home_task, scene)[0]
    order = _task_space_order(tasks, home_task)
    visit_labels = [HOME] + [i - 1 for i in order[1:]] + [HOME]
    visit_configs = [home_q] + [ik_sets[i - 1][0] for i in order[1:]] + [home_q]
    legs = _seed_legs(visit_labels, visit_configs)
    total = sum(leg.trajectory.length() for leg in legs)
    return SequencePlan(legs, visit_labels, visit_configs, total, {}, [], home_q)


def robotsp_sequence(tasks, arm: ArmModel, scene: Scene, home_task: TaskPoint,
                     home_q=None) -> SequencePlan:
    """Decoupled baseline: task-space tour, then optimal configs by layered search.

    Stage 2 builds a layered graph (home, Q(t_sigma[1]), ..., Q(t_sigma[M]),
    home) with d_C arc weights and takes the shortest path through the layers.
    Returns a seed plan, as :func:`naive_sequence` does.
    """
    ik_sets = [_first_ik(arm, t, scene) for t in tasks]
    if home_q is None:
        home_q = _first_ik(arm, home_task, scene)[0]
    order = _task_space_order(tasks, home_task)
    task_seq = [i - 1 for i in order[1:]]
    layers = [[home_q]] + [ik_sets[i] for i in task_seq] + [[home_q]]
    costs = [np.zeros(1)]
    back: list[np.ndarray] = []
    for prev_layer, layer in zip(layers, layers[1:]):
        prev_cost = costs[-1]
        cur_cost = np.empty(len(layer))
        cur_back = np.empty(len(layer), dtype=int)
        for j, q in enumerate(layer):
            best, best_i = math.inf, 0
            for i, p in enumerate(prev_layer):
                c = prev_cost[i] + config_distance(p, q)
                if c < best:
                    best, best_i = c, i
            cur_cost[j] = best
            cur_back[j] = best_i
        costs.append(cur_cost)
        back.append(cur_back)
    choice = [0] * len(layers)
    for li in range(len(layers) - 2, 0, -1):
        choice[li] = int(back[li][choice[li + 1]])
    visit_labels = [HOME] + task_seq + [HOME]
    visit_configs = [layers[li][choice[li]] for li in range(len(layers))]
    legs = _seed_legs(visit_labels, visit_configs)
    total = sum(leg.trajectory.length() for leg in legs)
    return SequencePlan(legs, visit_labels, visit_configs, total, {}, [], home_q)


def gtsp_bruteforce(tasks, arm: ArmModel, scene: Scene, home_task: TaskPoint,
                    cost: CostOracle, home_q=None, max_tasks: int = 6,
                    max_ik: int = 4):
    """Exhaustive optimum over IK assignments x permutations, anchored at home.

    Refuses instances beyond ``max_tasks`` tasks or ``max_ik`` IK solutions per
    task. Returns (assignment, permutation, cost).
    """
    if len(tasks) > max_tasks:
        raise TooLargeError("instance has %d tasks; limit is %d" % (len(tasks), max_tasks))
    ik_sets = [_first_ik(arm, t, scene) for t in tasks]
    if any(len(s) > max_ik for s in ik_sets):
        raise TooLargeError("a task has more than %d IK solutions" % max_ik)
    if home_q is None:
        home_q = _first_ik(arm, home_task, scene)[0]
    best_cost = math.inf
    best_assign = None
    best_perm = None
    for assign in product(*ik_sets):
        for perm in permutations(range(len(tasks))):
            total = cost.cost(home_q, assign[perm[0]])
            for a, b in zip(perm, perm[1:]):
                total += cost.cost(assign[a], assign[b])
                if total >= best_cost:
                    break
            else:
                total += cost.cost(assign[perm[-1]], home_q)
                if total < best_cost:
                    best_cost = total
                    best_assign = assign
                    best_perm = perm
    return best_assign, best_perm, best_cost
