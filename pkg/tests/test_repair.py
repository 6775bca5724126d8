from __future__ import annotations

import random

import pytest
from helpers import NoiseOne, conserved

from barge_alns.construction import construct
from barge_alns.destroy import DESTROY_OPS
from barge_alns.errors import InsufficientBarges
from barge_alns.generator import generate
from barge_alns.model import build_instance
from barge_alns.repair import E_REPAIR_OPS, F_REPAIR_OPS, REPAIR_OPS
from barge_alns.solution import Solution, complete
from barge_alns.validator import validate


NOISE_TWINS = [("FNRGI", "FRGI"), ("FNGI", "FGI"), ("FNSGI", "FSGI"), ("ENAGI", "EAGI"), ("ENASGI", "EASGI")]


@pytest.fixture(scope="module")
def mid():
    inst = generate(5, "inland", seed=2)
    return inst, construct(inst)


@pytest.mark.parametrize("name", sorted(REPAIR_OPS))
def test_repair_after_route_removal(mid, name):
    inst, sol = mid
    part = DESTROY_OPS["RRR"](inst, sol, 2, random.Random(0))
    before = part.copy()
    out = REPAIR_OPS[name](inst, part, random.Random(1))
    assert part == before
    assert complete(out) and conserved(inst, out)
    assert validate(inst, out) == []


@pytest.mark.parametrize("noisy,plain", NOISE_TWINS)
@pytest.mark.parametrize("destroy", ["RRR", "FRR", "ERR"])
def test_noise_one_is_identity(mid, noisy, plain, destroy):
    inst, sol = mid
    part = DESTROY_OPS[destroy](inst, sol, None, random.Random(4))
    a = REPAIR_OPS[noisy](inst, part, NoiseOne(7))
    b = REPAIR_OPS[plain](inst, part, NoiseOne(7))
    assert a == b


def _single(kind: str):
    """One tugboat, one pooled order and a single insertion candidate."""
    t = [[0.0, 1.0, 2.0, 2.0], [1.0, 0.0, 1.0, 1.0], [2.0, 1.0, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0]]
    if kind == "F":
        raw = {"tugboats": [{"id": "a"}], "orders_f": [{}], "orders_e": [], "barges": [],
               "network": {"time_matrix": t, "distance_matrix": t}}
    else:
        raw = {"tugboats": [{"id": "a"}], "orders_f": [], "orders_e": [{"required_barges": 1}],
               "barges": [{"idle_until": 0.0}], "network": {"time_matrix": t, "distance_matrix": t}}
    inst = build_instance(raw)
    return inst, Solution.empty(inst)


@pytest.mark.parametrize("kind,ops", [("F", F_REPAIR_OPS), ("E", E_REPAIR_OPS)])
def test_single_candidate_all_agree(kind, ops):
    inst, sol = _single(kind)
    outs = {name: op(inst, sol, random.Random(3)) for name, op in ops.items()}
    first = next(iter(outs.values()))
    assert all(o == first for o in outs.values())
    assert complete(first)


def test_regret_literal_runs(mid):
    inst, sol = mid
    part = DESTROY_OPS["FRR"](inst, sol, 5, random.Random(0))
    a = REPAIR_OPS["FSGI"](inst, part, random.Random(0), None, True)
    assert complete(a) and conserved(inst, a)


def test_insufficient_barges(mid):
    inst, sol = mid
    part = DESTROY_OPS["ERR"](inst, sol, 1, random.Random(0))
    part.free_barges = []
    for name in E_REPAIR_OPS:
        with pytest.raises(InsufficientBarges):
            REPAIR_OPS[name](inst, part, random.Random(0))


def test_names():
    assert sorted(F_REPAIR_OPS) == ["FGI", "FNGI", "FNRGI", "FNSGI", "FRGI", "FSGI"]
    assert sorted(E_REPAIR_OPS) == ["EAGI", "EARI", "EASGI", "ENAGI", "ENASGI"]
    assert REPAIR_OPS["FGI"].__name__ == "fgi"
