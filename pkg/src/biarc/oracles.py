"""Brute-force searches straight from the definitions, for cross-checking at small sizes.

Nothing here touches the pair digraph; only :class:`Digraph` is shared with the
rest of the package. Each search is deterministic and returns the
lexicographically first certificate it meets, or None.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .digraph import Digraph
from .errors import ContractViolation, SizeGuardError

LIMITS = {"min-ordering": 8, "k-min": 8, "cc": 7, "set": 4}


@dataclass(frozen=True)
class KMinCertificate:
    k: int
    labels: tuple[int, ...]
    order: tuple[int, ...]  # one global order; compare only vertices with equal labels

    def class_orders(self) -> list[list[int]]:
        return [[v for v in self.order if self.labels[v] == c] for c in range(self.k)]


def _guard(what: str, h: Digraph) -> None:
    bound = LIMITS[what]
    if h.n > bound:
        raise SizeGuardError(what, h.n, bound)


def _order_search(h: Digraph, comparable) -> tuple[int, ...] | None:
    """First vertex order (lexicographic) with: arcs uv, u'v', u<u', v'<v, u~u' imply uv'.

    When ``u`` and ``v'`` are both placed and ``uv'`` is missing, a violation is
    already certain if some in-neighbour of ``v'`` comparable to ``u`` sits after
    ``u`` and some out-neighbour of ``u`` sits after ``v'``: every unplaced vertex
    ends up after all placed ones.
    """
    n = h.n
    outs = [[v for v in range(n) if h.has_arc(u, v)] for u in range(n)]
    ins = [[u for u in range(n) if h.has_arc(u, v)] for v in range(n)]
    pos = [-1] * n
    order: list[int] = []

    def after(a: int, b: int) -> bool:
        return pos[a] < 0 or pos[a] > pos[b]

    def bad(u: int, w: int) -> bool:
        if h.has_arc(u, w):
            return False
        return any(comparable(u, x) and after(x, u) for x in ins[w]) and any(after(y, w) for y in outs[u])

    def rec() -> bool:
        if len(order) == n:
            return True
        for x in range(n):
            if pos[x] >= 0:
                continue
            pos[x] = len(order)
            order.append(x)
            if not any(bad(x, y) or bad(y, x) for y in order) and rec():
                return True
            order.pop()
            pos[x] = -1
        return False

    return tuple(order) if rec() else None


def oracle_min_ordering(h: Digraph) -> tuple[int, ...] | None:
    _guard("min-ordering", h)
    return _order_search(h, lambda a, b: True)


def _homomorphisms_to_cycle(h: Digraph, k: int):
    n = h.n
    lab = [-1] * n

    def ok(v: int) -> bool:
        for u in range(n):
            if lab[u] < 0:
                continue
            if h.has_arc(u, v) and (lab[v] - lab[u]) % k != 1 % k:
                return False
            if h.has_arc(v, u) and (lab[u] - lab[v]) % k != 1 % k:
                return False
        return True

    def rec(v: int):
        if v == n:
            yield tuple(lab)
            return
        for c in range(k):
            lab[v] = c
            if ok(v):
                yield from rec(v + 1)
        lab[v] = -1

    yield from rec(0)


def oracle_k_min_ordering(h: Digraph, k: int) -> KMinCertificate | None:
    if k < 1:
        raise ContractViolation("k must be positive")
    _guard("k-min", h)
    for labels in _homomorphisms_to_cycle(h, k):
        order = _order_search(h, lambda a, b, L=labels: L[a] == L[b])
        if order is not None:
            return KMinCertificate(k, labels, order)
    return None


def oracle_cc(h: Digraph) -> dict[tuple[int, int], int] | None:
    """First conservative commutative binary polymorphism, as a map on ordered pairs."""
    _guard("cc", h)
    n = h.n
    arcs = sorted(h.arcs)
    keys = list(combinations(range(n), 2))
    slot = {key: i for i, key in enumerate(keys)}

    def key(a: int, b: int):
        return None if a == b else (min(a, b), max(a, b))

    # every constraint f(u,u') f(v,v') in A, filed under the later of its two slots
    checks: list[list[tuple]] = [[] for _ in keys]
    for (u, v), (u2, v2) in combinations(arcs, 2):
        ka, kb = key(u, u2), key(v, v2)
        idx = [slot[x] for x in (ka, kb) if x is not None]
        if idx:
            checks[max(idx)].append((u, u2, v, v2))
    val: dict = {}

    def f(a: int, b: int) -> int:
        return a if a == b else val[key(a, b)]

    def rec(i: int) -> bool:
        if i == len(keys):
            return True
        for choice in keys[i]:
            val[keys[i]] = choice
            if all(h.has_arc(f(u, u2), f(v, v2)) for u, u2, v, v2 in checks[i]) and rec(i + 1):
                return True
        del val[keys[i]]
        return False

    if not rec(0):
        return None
    return {(a, b): f(a, b) for a in range(n) for b in range(n)}


def oracle_set_polymorphism(h: Digraph) -> dict[int, int] | None:
    """First conservative set polymorphism, keyed by vertex bitmask."""
    _guard("set", h)
    n = h.n
    masks = sorted(range(1, 1 << n), key=lambda s: (bin(s).count("1"), s))
    rank = {s: i for i, s in enumerate(masks)}
    members = {s: [v for v in range(n) if s >> v & 1] for s in masks}

    def dominates(s: int, t: int) -> bool:
        return all(any(h.has_arc(a, b) for b in members[t]) for a in members[s]) and all(
            any(h.has_arc(a, b) for a in members[s]) for b in members[t]
        )

    checks: list[list[tuple[int, int]]] = [[] for _ in masks]
    for s in masks:
        for t in masks:
            if dominates(s, t):
                checks[max(rank[s], rank[t])].append((s, t))
    val: dict[int, int] = {}

    def rec(i: int) -> bool:
        if i == len(masks):
            return True
        s = masks[i]
        for choice in members[s]:
            val[s] = choice
            if all(h.has_arc(val[a], val[b]) for a, b in checks[i]) and rec(i + 1):
                return True
        del val[s]
        return False

    return dict(val) if rec(0) else None


def oracle_search(h: Digraph, target: str, k: int | None = None):
    """Dispatch by target name: ``min-ordering``, ``k-min`` (needs ``k``), ``cc`` or ``set``."""
    if target == "min-ordering":
        return oracle_min_ordering(h)
    if target == "k-min":
        if k is None:
            raise ContractViolation("target k-min needs k")
        return oracle_k_min_ordering(h, k)
    if target == "cc":
        return oracle_cc(h)
    if target == "set":
        return oracle_set_polymorphism(h)
    raise ContractViolation(f"unknown oracle target {target!r}")
