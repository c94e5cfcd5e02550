from __future__ import annotations

import random
from typing import Optional

from ..crypto import Seed, derive_init_key, prng_draw
from .common import DeviceId, SessionConfig
from .edge import Edge
from .gateway import Gateway


def enroll(
    edge_id: DeviceId,
    gw_id: DeviceId,
    seed: Seed,
    config: SessionConfig,
    edge_rng: random.Random,
    gw_rng: Optional[random.Random] = None,
    gateway: Optional[Gateway] = None,
) -> tuple[Edge, Gateway]:
    """Trusted-setup enrollment of one edge with a gateway.

    Both sides draw ``r`` at index 0 of the shared seed and derive the same
    initial key from it. Pass an existing ``gateway`` to enroll several edges
    with one gateway; otherwise a new one is built from ``gw_rng``.

    Raises DuplicateEnrollment if the edge id is already registered.
    """
    if seed.draw_index != 0:
        raise ValueError("enrollment expects a fresh seed (draw_index 0)")
    if gateway is None:
        if gw_rng is None:
            raise ValueError("need gw_rng to build a new gateway")
        gateway = Gateway(gw_id, config, gw_rng)
    elif gateway.device != gw_id:
        raise ValueError("gateway identity mismatch")
    r0, after = prng_draw(seed)
    e_init = derive_init_key(edge_id.raw_id, r0)
    gateway.registry.add(edge_id.id_hash, e_init, after)
    edge = Edge(edge_id, gw_id.id_hash, e_init, after, config, edge_rng)
    return edge, gateway
