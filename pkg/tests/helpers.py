"""Bookkeeping checks shared by the operator tests."""

from __future__ import annotations

import random
from collections import Counter

from barge_alns.model import NodeKind


def conserved(inst, sol) -> bool:
    """Every order and barge is accounted for exactly once."""
    kinds = inst.kinds
    routed_f = [inst.f_order_of[el.node] for r in sol.routes for el in r if kinds[el.node] is NodeKind.ORIGIN]
    if sorted(routed_f + list(sol.unassigned_f)) != list(range(len(inst.orders_f))):
        return False
    routed_b = [el.node for r in sol.routes for el in r if kinds[el.node] is NodeKind.BARGE]
    if sorted(routed_b + list(sol.free_barges)) != sorted(inst.barge_nodes):
        return False
    carried = Counter(el.order for r in sol.routes for el in r if kinds[el.node] is NodeKind.BARGE)
    for j, o in enumerate(inst.orders_e):
        if carried[j] + sol.unassigned_e.get(j, 0) != o.required_barges:
            return False
    return True


class NoiseOne(random.Random):
    """Stub RNG whose noise factor is always 1."""

    def random(self):
        return 1.0

    # keeps shuffle/choice on the bit generator rather than random()
    def getrandbits(self, k):
        return super().getrandbits(k)
