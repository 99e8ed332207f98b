"""Circuits in strong components of the pair digraph, and their verification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .pairs import Pair, PairDigraph, SccInfo

SCHEMA = 1


@dataclass(frozen=True)
class Circuit:
    """Pairs ``(x0,x1),(x1,x2),...,(xt,x0)`` lying in one strong component."""

    pairs: tuple[Pair, ...]
    component: int

    @property
    def vertices(self) -> list[int]:
        return [a for a, _ in self.pairs]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "status": "obstruction",
            "component": self.component,
            "circuit": [list(pr) for pr in self.pairs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> Circuit:
        return cls(tuple((int(a), int(b)) for a, b in obj["circuit"]), int(obj.get("component", -1)))


def find_relation_cycle(pairs: Iterable[Pair]) -> list[int] | None:
    """A directed cycle ``x0 -> x1 -> ... -> x0`` in the digraph with an arc per pair.

    Returns the cycle's vertices (without repeating ``x0``), or None. Search order
    is ascending by vertex so results are reproducible.
    """
    adj: dict[int, list[int]] = {}
    for x, y in pairs:
        adj.setdefault(x, []).append(y)
    for lst in adj.values():
        lst.sort()
    state: dict[int, int] = {}  # 1 on stack, 2 finished
    for root in sorted(adj):
        if root in state:
            continue
        state[root] = 1
        path = [root]
        iters = [iter(adj[root])]
        while iters:
            advanced = False
            for w in iters[-1]:
                st = state.get(w, 0)
                if st == 1:
                    return path[path.index(w) :]
                if st == 0:
                    state[w] = 1
                    path.append(w)
                    iters.append(iter(adj.get(w, ())))
                    advanced = True
                    break
            if not advanced:
                state[path.pop()] = 2
                iters.pop()
    return None


def find_invertible_pair(p: PairDigraph, s: SccInfo) -> Pair | None:
    rev = p.reverse_index
    for i, pr in enumerate(p.pairs):
        if rev[i] >= 0 and s.comp[rev[i]] == s.comp[i]:
            return pr
    return None


def find_component_circuit(p: PairDigraph, s: SccInfo) -> Circuit | None:
    """The first circuit found, scanning components by ascending id."""
    for c, mem in enumerate(s.members):
        if len(mem) < 2:
            continue
        cyc = find_relation_cycle(p.pairs[i] for i in mem)
        if cyc is not None:
            return Circuit(tuple(zip(cyc, cyc[1:] + cyc[:1])), c)
    return None


def verify_circuit(p: PairDigraph, s: SccInfo | None, c: Circuit) -> bool:
    """Check chaining and mutual reachability directly in the pair digraph."""
    prs = list(c.pairs)
    if len(prs) < 2:
        return False
    for (a, b), (a2, _) in zip(prs, prs[1:] + prs[:1]):
        if b != a2:
            return False
    idx = []
    for pr in prs:
        if pr not in p.index:
            return False
        idx.append(p.index[pr])
    fwd = set(p.reachable_from([idx[0]]))
    if not all(i in fwd for i in idx):
        return False
    # backwards search through predecessor lists
    seen = {idx[0]}
    stack = [idx[0]]
    pred = p.pred
    while stack:
        u = stack.pop()
        for w in pred[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if not all(i in seen for i in idx):
        return False
    if s is not None and c.component >= 0 and s.comp[idx[0]] != c.component:
        return False
    return True
