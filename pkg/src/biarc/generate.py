"""Seeded random instances: Erdős–Rényi digraphs, oriented cycles and random bi-arc digraphs."""

from __future__ import annotations

import random

from .digraph import Digraph
from .errors import ContractViolation


def gen_random_digraph(
    n: int,
    density: float,
    seed: int = 0,
    *,
    reflexive: bool = False,
    loops: bool = True,
    bigraph: bool = False,
    cycle: int | None = None,
) -> Digraph:
    """Each candidate arc independently with probability ``density``.

    ``reflexive`` adds every loop; ``loops=False`` forbids them. ``bigraph``
    only draws arcs from the first ``n // 2`` vertices to the rest.
    ``cycle=q`` ignores the rest and returns the directed ``q``-cycle.
    """
    if cycle is not None:
        return directed_cycle(cycle)
    if n < 1:
        raise ContractViolation("n must be at least 1")
    if not 0.0 <= density <= 1.0:
        raise ContractViolation("density must lie in [0, 1]")
    rng = random.Random(seed)
    half = n // 2
    arcs = []
    for u in range(n):
        for v in range(n):
            if u == v and (reflexive or not loops):
                continue
            if bigraph and not (u < half <= v):
                continue
            if rng.random() < density:
                arcs.append((u, v))
    if reflexive:
        arcs.extend((v, v) for v in range(n))
    return Digraph(n, arcs)


def directed_cycle(q: int) -> Digraph:
    if q < 1:
        raise ContractViolation("cycle length must be at least 1")
    return Digraph(q, [(i, (i + 1) % q) for i in range(q)])


def random_oriented_cycle(length: int, rng: random.Random, min_net: int = 0) -> Digraph:
    """A cycle on ``length`` vertices with each edge oriented at random.

    Orientations are redrawn until ``|forward - backward| >= min_net``; the
    target must be reachable with the parity of ``length``.
    """
    if length < 3:
        raise ContractViolation("oriented cycles need at least 3 vertices")
    if min_net > length:
        raise ContractViolation("net length cannot exceed the cycle length")
    while True:
        fwd = [rng.random() < 0.5 for _ in range(length)]
        net = sum(1 if f else -1 for f in fwd)
        if abs(net) >= min_net:
            break
    arcs = []
    for i, f in enumerate(fwd):
        j = (i + 1) % length
        arcs.append((i, j) if f else (j, i))
    return Digraph(length, arcs)


def _meets(a: tuple[int, int], b: tuple[int, int], length: int) -> bool:
    def contains(iv: tuple[int, int], x: int) -> bool:
        ccw, cw = iv
        return (x - ccw) % length <= (cw - ccw) % length

    return contains(a, b[0]) or contains(b, a[0])


def random_biarc(n: int, rng: random.Random, circumference: int = 1000) -> Digraph:
    """Digraph of random interval pairs on a circle with poles ``0`` and ``L/2``.

    ``I_v`` holds the first pole and not the second, ``J_v`` the reverse, and
    the clockwise ends of the two families follow one common random order. The
    arc ``uv`` is present exactly when ``I_u`` and ``J_v`` are disjoint.
    """
    length = circumference
    south = length // 2
    if n >= south - 1:
        raise ContractViolation("circumference too small for n")
    cw_i = sorted(rng.sample(range(1, south), n))
    cw_j = sorted(rng.sample(range(south + 1, length), n))
    perm = list(range(n))
    rng.shuffle(perm)
    ivs_i, ivs_j = {}, {}
    for r, v in enumerate(perm):
        ivs_i[v] = (rng.randint(south + 1, length) % length, cw_i[r])
        ivs_j[v] = (rng.randint(1, south), cw_j[r])
    arcs = [(u, v) for u in range(n) for v in range(n) if not _meets(ivs_i[u], ivs_j[v], length)]
    return Digraph(n, arcs)
