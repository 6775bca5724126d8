from __future__ import annotations

import copy

import pytest

from barge_alns.model import build_instance
from barge_alns.solution import RouteElement as El
from barge_alns.solution import Solution

# Nodes on a line.  typeF order 0 is 0 -> 1, typeE order 0 delivers two
# barges to node 2, barges are nodes 3 and 4, the depot is nodes 5 and 6.
LINE_X = [10.0, 30.0, 20.0, 5.0, 15.0, 0.0, 0.0]


def line_raw(**over) -> dict:
    d = [[abs(a - b) for b in LINE_X] for a in LINE_X]
    t = [[x / 10.0 for x in row] for row in d]
    raw = {
        "name": "line",
        "tugboats": [
            {"id": "a", "max_working_time": 100.0, "cost_per_time": 10.0, "cost_per_distance": 1.0},
            {"id": "b", "max_working_time": 100.0, "cost_per_time": 10.0, "cost_per_distance": 1.0},
        ],
        "orders_f": [{"origin_window": [0.0, None], "destination_window": [0.0, None]}],
        "orders_e": [{"required_barges": 2, "window": [0.0, None]}],
        "barges": [{"idle_until": 0.0}, {"idle_until": 0.0}],
        "network": {"time_matrix": t, "distance_matrix": d},
        "params": {"K": 5},
    }
    for k, v in over.items():
        raw[k] = v
    return copy.deepcopy(raw)


@pytest.fixture
def line():
    return build_instance(line_raw())


def line_solution() -> Solution:
    """typeF on tugboat 0, both barges collected and dropped by tugboat 1.  Loss 200."""
    return Solution(routes=[[El(0), El(1)], [El(3, 1, 0), El(4, 1, 0), El(2, 1, 0)]])


@pytest.fixture
def line_sol():
    return line_solution()
