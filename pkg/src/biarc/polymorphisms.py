"""Conservative commutative binary polymorphisms and conservative set polymorphisms."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digraph import Digraph
from .errors import ContractViolation, InternalError, SizeGuardError
from .obstruction import find_invertible_pair
from .pairs import Pair, build_pair_digraph, dual_component, strong_components

SCHEMA = 1
SET_TABLE_MAX_N = 12


@dataclass(frozen=True)
class BinaryTable:
    """``value[x][y]`` for every ordered pair of vertices."""

    value: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.value)

    def __call__(self, x: int, y: int) -> int:
        return self.value[x][y]

    @classmethod
    def from_min_order(cls, order: Sequence[int]) -> BinaryTable:
        rank = {v: r for r, v in enumerate(order)}
        n = len(order)
        return cls(tuple(tuple(x if rank[x] <= rank[y] else y for y in range(n)) for x in range(n)))

    def to_json(self) -> dict:
        table = {f"{x},{y}": self.value[x][y] for x in range(self.n) for y in range(self.n)}
        return {"schema": SCHEMA, "status": "cc_polymorphism", "table": table}

    @classmethod
    def from_json(cls, obj: dict) -> BinaryTable:
        raw = obj["table"]
        n = round(len(raw) ** 0.5)
        if n * n != len(raw):
            raise ContractViolation("binary table must list every ordered pair")
        try:
            return cls(tuple(tuple(int(raw[f"{x},{y}"]) for y in range(n)) for x in range(n)))
        except KeyError as exc:
            raise ContractViolation(f"binary table misses entry {exc}") from exc


def build_cc_polymorphism(h: Digraph) -> BinaryTable | None:
    """Peel ripe strong components of the pair digraph; None iff some pair is invertible.

    A remaining component is ripe when none of its successor components remain.
    Each pick (smallest ripe id) sends its pairs to their first coordinate and
    removes itself together with its dual.
    """
    p = build_pair_digraph(h)
    s = strong_components(p)
    if find_invertible_pair(p, s) is not None:
        return None
    ncomp = s.num_components
    pred: list[list[int]] = [[] for _ in range(ncomp)]
    for c, succ in enumerate(s.succ):
        for d in succ:
            pred[d].append(c)
    live_succ = [len(succ) for succ in s.succ]
    alive = [True] * ncomp
    heap = [c for c in range(ncomp) if live_succ[c] == 0]
    heapq.heapify(heap)
    value = [[x if x == y else -1 for y in range(h.n)] for x in range(h.n)]

    def remove(c: int) -> None:
        alive[c] = False
        for a in pred[c]:
            live_succ[a] -= 1
            if live_succ[a] == 0 and alive[a]:
                heapq.heappush(heap, a)

    while heap:
        c = heapq.heappop(heap)
        if not alive[c]:
            continue
        d = dual_component(p, s, c)
        if d in s.succ[c]:
            raise InternalError("selected component reaches its remaining dual", {"component": c, "dual": d})
        for i in s.members[c]:
            x, y = p.pairs[i]
            value[x][y] = value[y][x] = x
        remove(c)
        remove(d)
    if any(alive):
        raise InternalError("peeling stopped with components left", {"left": [c for c in range(ncomp) if alive[c]]})
    table = BinaryTable(tuple(tuple(row) for row in value))
    if not verify_cc_polymorphism(h, table):
        raise InternalError("peeled table is not a polymorphism", {"digraph": h.arc_list})
    return table


def verify_cc_polymorphism(h: Digraph, t: BinaryTable) -> bool:
    n = h.n
    if t.n != n or any(len(row) != n for row in t.value):
        raise ContractViolation("table must be total on ordered pairs")
    for x in range(n):
        for y in range(n):
            if t(x, y) not in (x, y) or t(x, y) != t(y, x):
                return False
    if h.m == 0:
        return True
    tab = np.array(t.value, dtype=np.int64)
    arcs = np.array(h.arc_list, dtype=np.int64)
    u, v = arcs[:, 0], arcs[:, 1]
    mat = h.matrix
    block = max(1, (1 << 20) // len(arcs))
    for lo in range(0, len(arcs), block):
        fu = tab[u[lo : lo + block, None], u[None, :]]
        fv = tab[v[lo : lo + block, None], v[None, :]]
        if not mat[fu, fv].all():
            return False
    return True


def invertible_pair_witness(h: Digraph) -> Pair | None:
    p = build_pair_digraph(h)
    return find_invertible_pair(p, strong_components(p))


@dataclass(frozen=True)
class SetTable:
    """``value[mask]`` for every nonempty vertex subset, given as a bitmask (index 0 unused)."""

    n: int
    value: tuple[int, ...]

    def __call__(self, subset) -> int:
        if isinstance(subset, int):
            return self.value[subset]
        mask = 0
        for v in subset:
            mask |= 1 << v
        return self.value[mask]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "status": "set_polymorphism",
            "table": {
                ",".join(str(v) for v in range(self.n) if m >> v & 1): self.value[m] for m in range(1, 1 << self.n)
            },
        }


def min_to_set_polymorphism(order: Sequence[int], n: int) -> SetTable:
    if n > SET_TABLE_MAX_N:
        raise SizeGuardError("set table", n, SET_TABLE_MAX_N)
    if sorted(order) != list(range(n)):
        raise ContractViolation("order is not a permutation of the vertices")
    value = [-1] * (1 << n)
    for mask in range(1, 1 << n):
        value[mask] = next(v for v in order if mask >> v & 1)
    return SetTable(n, tuple(value))


def verify_set_polymorphism(h: Digraph, t: SetTable) -> bool:
    """Conservative, and ``f(S) f(T)`` is an arc whenever every element of ``S`` has an
    out-neighbour in ``T`` and every element of ``T`` an in-neighbour in ``S``.

    Candidate ``T`` are enumerated as submasks of the out-neighbourhood of ``S``.
    """
    n = h.n
    if t.n != n or len(t.value) != 1 << n:
        raise ContractViolation("table must be total on nonempty subsets")
    for mask in range(1, 1 << n):
        if not 0 <= t.value[mask] < n or not mask >> t.value[mask] & 1:
            return False
    out = [sum(1 << w for w in h.out_neighbors[v]) for v in range(n)]
    for s_mask in range(1, 1 << n):
        elems = [v for v in range(n) if s_mask >> v & 1]
        reach = 0
        for v in elems:
            reach |= out[v]
        if any(out[v] == 0 for v in elems):
            continue
        fs = t.value[s_mask]
        sub = reach
        while sub:
            if all(out[v] & sub for v in elems) and not h.has_arc(fs, t.value[sub]):
                return False
            sub = (sub - 1) & reach
    return True
