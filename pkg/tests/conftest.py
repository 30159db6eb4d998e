import warnings

import numpy as np
import pytest

from armseq import (ArmModel, Scene, build_graph, build_task_grid, decompose)
from armseq.presets import tabletop, tabletop_single_box
from armseq.serialize import Scenario


@pytest.fixture(scope="session")
def arm2():
    return ArmModel(link_lengths=(1.0, 1.0),
                    joint_limits=((-np.pi, np.pi), (-np.pi, np.pi)),
                    link_thickness=(0.04, 0.04))


@pytest.fixture(scope="session")
def arm3():
    return ArmModel(link_lengths=(0.6, 0.5, 0.4),
                    joint_limits=((-np.pi, np.pi),) * 3,
                    link_thickness=(0.03, 0.03, 0.03))


@pytest.fixture(scope="session")
def empty_scene():
    return Scene()


@pytest.fixture(scope="session")
def tabletop_scenario():
    return Scenario(tabletop())


@pytest.fixture(scope="session")
def single_box_scenario():
    return Scenario(tabletop_single_box())


def _build(scenario):
    points = build_task_grid(scenario.grid_region, scenario.grid_spacing)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_graph(points, scenario.connection_radius, scenario.arm,
                           scenario.scene, scenario.edge_check_count)


@pytest.fixture(scope="session")
def tabletop_graph(tabletop_scenario):
    return _build(tabletop_scenario)


@pytest.fixture(scope="session")
def tabletop_decomposition(tabletop_scenario, tabletop_graph):
    return decompose(tabletop_graph, tabletop_scenario.decomposition)


@pytest.fixture(scope="session")
def single_box_graph(single_box_scenario):
    return _build(single_box_scenario)


@pytest.fixture(scope="session")
def single_box_decomposition(single_box_scenario, single_box_graph):
    return decompose(single_box_graph, single_box_scenario.decomposition)
