from __future__ import annotations

import pytest

from barge_alns.errors import UnknownPreset
from barge_alns.generator import PRESETS, TINY_MIXES, generate, generate_raw, preset_shape, tiny_instance
from barge_alns.model import NodeKind


@pytest.mark.parametrize("topology", sorted(PRESETS))
@pytest.mark.parametrize("row", range(1, 7))
def test_preset_shapes(topology, row):
    n_f, n_e, avg = preset_shape(row, topology)
    inst = generate(row, topology, seed=0)
    assert len(inst.orders_f) == n_f
    assert len(inst.orders_e) == n_e
    assert len(inst.barge_nodes) == round(n_e * avg)
    assert inst.n_tugboats == 3
    assert sum(o.required_barges for o in inst.orders_e) <= len(inst.barge_nodes)


def test_row2_node_count():
    inst = generate(2, "oceanic", 0)
    assert inst.n_nodes == 29


def test_deterministic():
    assert generate_raw(3, "inland", 5) == generate_raw(3, "inland", 5)
    assert generate_raw(3, "inland", 5) != generate_raw(3, "inland", 6)


def test_unknown():
    with pytest.raises(UnknownPreset):
        generate(7, "oceanic")
    with pytest.raises(UnknownPreset):
        generate(1, "arctic")
    with pytest.raises(UnknownPreset):
        tiny_instance(0, "zz")


@pytest.mark.parametrize("mix", TINY_MIXES)
def test_tiny_mixes(mix):
    for seed in range(5):
        inst = tiny_instance(seed, mix)
        assert inst.n_nodes <= 12
        kinds = inst.kinds
        if mix == "f":
            assert not inst.orders_e
        if mix in ("e", "coop"):
            assert len(inst.orders_e) == 1
        if mix == "coop":
            assert inst.orders_e[0].required_barges > inst.capacity
        assert kinds[inst.source] is NodeKind.SOURCE
