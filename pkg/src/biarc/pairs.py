"""The pair digraph: ordered pairs of distinct vertices with signed arcs.

A positive arc ``(x,y) -> (x',y')`` exists when ``xx'`` and ``yy'`` are arcs
but ``xy'`` is not; a negative arc when ``x'x`` and ``y'y`` are arcs but
``y'x`` is not. Both signs may join the same two pairs.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .digraph import CkLabeling, Digraph
from .errors import BiarcError, ContractViolation

Pair = tuple[int, int]

# rows of the arc-pair product processed at once while building
_BLOCK_CELLS = 1 << 21


class InvertiblePairError(BiarcError):
    """A component contains both ``(x,y)`` and ``(y,x)``."""

    def __init__(self, pair: Pair):
        self.pair = pair
        super().__init__(f"pair {pair} and its reverse share a strong component")


class LevelConflict(BiarcError):
    """Signed arcs within a weak component of the balanced part disagree on levels."""

    def __init__(self, group: int, pair: Pair):
        self.group = group
        self.pair = pair
        super().__init__(f"inconsistent levels at pair {pair} in balanced weak component {group}")


@dataclass(eq=False)
class PairDigraph:
    """Pairs are indexed contiguously; arcs are parallel arrays sorted by (src, dst, sign)."""

    n: int
    pairs: list[Pair]
    src: np.ndarray
    dst: np.ndarray
    sign: np.ndarray
    index: dict[Pair, int] = field(init=False)

    def __post_init__(self):
        self.index = {p: i for i, p in enumerate(self.pairs)}

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    @property
    def num_arcs(self) -> int:
        return len(self.src)

    def arcs(self) -> Iterable[tuple[Pair, Pair, int]]:
        for a, b, s in zip(self.src.tolist(), self.dst.tolist(), self.sign.tolist()):
            yield self.pairs[a], self.pairs[b], s

    def has_arc(self, a: Pair, b: Pair, sign: int | None = None) -> bool:
        i, j = self.index.get(a), self.index.get(b)
        if i is None or j is None:
            return False
        return any(t == j and (sign is None or s == sign) for t, s in self.signed_succ[i])

    @cached_property
    def reverse_index(self) -> list[int]:
        """Index of ``(y,x)`` for every pair ``(x,y)``; -1 if outside the universe."""
        return [self.index.get((y, x), -1) for x, y in self.pairs]

    @cached_property
    def signed_succ(self) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in self.pairs]
        for a, b, s in zip(self.src.tolist(), self.dst.tolist(), self.sign.tolist()):
            out[a].append((b, s))
        return out

    @cached_property
    def succ(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.pairs]
        last = [-1] * len(self.pairs)
        for a, b in zip(self.src.tolist(), self.dst.tolist()):
            if last[a] != b:
                out[a].append(b)
                last[a] = b
        return out

    @cached_property
    def pred(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.pairs]
        for a, nbrs in enumerate(self.succ):
            for b in nbrs:
                out[b].append(a)
        return out

    @cached_property
    def csr(self) -> csr_matrix:
        k = self.num_pairs
        data = np.ones(self.num_arcs, dtype=np.int8)
        mat = csr_matrix((data, (self.src, self.dst)), shape=(k, k))
        mat.sum_duplicates()
        return mat

    def reachable_from(self, starts: Iterable[int], allowed: Sequence[bool] | None = None) -> list[int]:
        """Pairs reachable from ``starts`` (inclusive), optionally only through ``allowed`` pairs."""
        seen = set()
        stack = []
        for s in starts:
            if s not in seen and (allowed is None or allowed[s]):
                seen.add(s)
                stack.append(s)
        succ = self.succ
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w not in seen and (allowed is None or allowed[w]):
                    seen.add(w)
                    stack.append(w)
        return sorted(seen)

    def restrict(self, keep: Iterable[Pair]) -> PairDigraph:
        """Induced sub-pair-digraph on ``keep``, preserving the original relative order."""
        keep_set = set(keep)
        kept = [p for p in self.pairs if p in keep_set]
        old_to_new = np.full(self.num_pairs, -1, dtype=np.int64)
        for new, p in enumerate(kept):
            old_to_new[self.index[p]] = new
        s, d = old_to_new[self.src], old_to_new[self.dst]
        mask = (s >= 0) & (d >= 0)
        return PairDigraph(self.n, kept, s[mask], d[mask], self.sign[mask].copy())

    def to_json(self) -> list[dict]:
        return [{"from": list(a), "to": list(b), "sign": s} for a, b, s in self.arcs()]


def pair_index(n: int, x: int, y: int) -> int:
    """Contiguous index of ``(x,y)`` among all ``n(n-1)`` ordered distinct pairs."""
    return x * (n - 1) + y - (y > x)


def build_pair_digraph(h: Digraph) -> PairDigraph:
    n = h.n
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    if h.m == 0 or n < 2:
        empty = np.zeros(0, dtype=np.int64)
        return PairDigraph(n, pairs, empty, empty.copy(), np.zeros(0, dtype=np.int8))

    arcs = np.array(h.arc_list, dtype=np.int64)
    tail, head = arcs[:, 0], arcs[:, 1]
    mat = h.matrix
    block = max(1, _BLOCK_CELLS // len(arcs))
    srcs, dsts, signs = [], [], []
    for lo in range(0, len(arcs), block):
        at = tail[lo : lo + block, None]
        ah = head[lo : lo + block, None]
        bt, bh = tail[None, :], head[None, :]
        # positive: (at, bt) -> (ah, bh) when at != bt, ah != bh and at->bh is absent
        pos = (at != bt) & (ah != bh) & ~mat[at, bh]
        ai, bi = np.nonzero(pos)
        x, y, x2, y2 = at[ai, 0], bt[0, bi], ah[ai, 0], bh[0, bi]
        srcs.append(x * (n - 1) + y - (y > x))
        dsts.append(x2 * (n - 1) + y2 - (y2 > x2))
        signs.append(np.ones(len(ai), dtype=np.int8))
        # negative: (ah, bh) -> (at, bt) when ah != bh, at != bt and bt->ah is absent
        neg = (at != bt) & (ah != bh) & ~mat[bt, ah]
        ai, bi = np.nonzero(neg)
        x, y, x2, y2 = ah[ai, 0], bh[0, bi], at[ai, 0], bt[0, bi]
        srcs.append(x * (n - 1) + y - (y > x))
        dsts.append(x2 * (n - 1) + y2 - (y2 > x2))
        signs.append(-np.ones(len(ai), dtype=np.int8))

    src = np.concatenate(srcs)
    dst = np.concatenate(dsts)
    sign = np.concatenate(signs)
    order = np.lexsort((sign, dst, src))
    return PairDigraph(n, pairs, src[order], dst[order], sign[order])


def check_skew(p: PairDigraph) -> bool:
    """Every arc ``(x,y)->(x',y')`` of sign ``s`` has the twin ``(y',x')->(y,x)`` of sign ``-s``."""
    rev = np.array(p.reverse_index, dtype=np.int64)
    if len(p.src) and (rev[p.src] < 0).any() | (rev[p.dst] < 0).any():
        return False
    key = lambda a, b, s: (a * p.num_pairs + b) * 2 + (s > 0)
    forward = set(key(p.src, p.dst, p.sign).tolist())
    twins = key(rev[p.dst], rev[p.src], -p.sign).tolist()
    return all(t in forward for t in twins)


def restrict_to_hk(p: PairDigraph, lab: CkLabeling) -> PairDigraph:
    """Keep only pairs whose two vertices lie in the same labelling class."""
    return p.restrict(pr for pr in p.pairs if lab.label[pr[0]] == lab.label[pr[1]])


# ---------------------------------------------------------------------------
# strong components


@dataclass(eq=False)
class SccInfo:
    comp: list[int]
    members: list[list[int]]
    succ: list[list[int]]
    balanced: list[bool] | None = None
    potential: dict[int, int] | None = None
    level: dict[int, int] | None = None
    level_groups: list[list[int]] | None = None
    level_consistent: list[bool] | None = None

    @property
    def num_components(self) -> int:
        return len(self.members)

    @cached_property
    def reach_bits(self) -> list[int]:
        """Bitset of components reachable from each component (itself included)."""
        reach = [0] * self.num_components
        for c in range(self.num_components):
            bits = 1 << c
            for d in self.succ[c]:
                bits |= reach[d]
            reach[c] = bits
        return reach

    def comp_reaches(self, c: int, d: int) -> bool:
        return bool(self.reach_bits[c] >> d & 1)


def strong_components(p: PairDigraph) -> SccInfo:
    """Strong components with ids in reverse topological order.

    An arc between components always goes from a larger id to a smaller one.
    Ties among simultaneously available components go to the smallest pair index.
    """
    k = p.num_pairs
    if k == 0:
        return SccInfo([], [], [])
    _, raw = connected_components(p.csr, directed=True, connection="strong")
    raw = raw.astype(np.int64)
    nraw = int(raw.max()) + 1
    cs, cd = raw[p.src], raw[p.dst]
    cross = cs != cd
    edges = np.unique(cs[cross] * nraw + cd[cross])
    esrc, edst = (edges // nraw).tolist(), (edges % nraw).tolist()

    first = np.full(nraw, k, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(k))
    raw_pred: list[list[int]] = [[] for _ in range(nraw)]
    outdeg = [0] * nraw
    for a, b in zip(esrc, edst):
        raw_pred[b].append(a)
        outdeg[a] += 1

    heap = [(int(first[c]), c) for c in range(nraw) if outdeg[c] == 0]
    heapq.heapify(heap)
    relabel = [0] * nraw
    nxt = 0
    while heap:
        _, c = heapq.heappop(heap)
        relabel[c] = nxt
        nxt += 1
        for a in raw_pred[c]:
            outdeg[a] -= 1
            if outdeg[a] == 0:
                heapq.heappush(heap, (int(first[a]), a))

    comp = [relabel[c] for c in raw.tolist()]
    members: list[list[int]] = [[] for _ in range(nraw)]
    for i, c in enumerate(comp):
        members[c].append(i)
    succ: list[list[int]] = [[] for _ in range(nraw)]
    for a, b in zip(esrc, edst):
        succ[relabel[a]].append(relabel[b])
    for lst in succ:
        lst.sort()
    return SccInfo(comp, members, succ)


def classify_balance(p: PairDigraph, s: SccInfo) -> SccInfo:
    """Fill ``balanced`` and, for balanced components, ``potential``.

    A component is balanced when every closed directed walk inside it has as
    many positive as negative arcs, i.e. a potential with
    ``potential[target] = potential[source] + sign`` exists on it.
    """
    comp = s.comp
    pot: dict[int, int] = {}
    balanced = [True] * s.num_components
    ssucc = p.signed_succ
    for c, mem in enumerate(s.members):
        root = mem[0]
        local = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w, sg in ssucc[u]:
                if comp[w] != c:
                    continue
                if w not in local:
                    local[w] = local[u] + sg
                    queue.append(w)
                elif local[w] != local[u] + sg:
                    balanced[c] = False
        if balanced[c]:
            pot.update(local)
    s.balanced = balanced
    s.potential = pot
    return s


def compute_levels(p: PairDigraph, s: SccInfo, on_conflict: str = "raise") -> SccInfo:
    """Assign levels to the balanced pairs, normalised to minimum 0 per weak component.

    Signed arcs between different balanced components need not agree around
    undirected cycles. With ``on_conflict="raise"`` such a weak component raises
    :class:`LevelConflict`; with ``"split"`` its pairs keep the potentials of
    their own strong component instead, each normalised to minimum 0.
    """
    if s.balanced is None:
        classify_balance(p, s)
    if on_conflict not in ("raise", "split"):
        raise ContractViolation(f"unknown conflict policy {on_conflict!r}")
    is_bal = [s.balanced[c] for c in s.comp]
    adj: list[list[tuple[int, int]]] = [[] for _ in p.pairs]
    for a, b, sg in zip(p.src.tolist(), p.dst.tolist(), p.sign.tolist()):
        if is_bal[a] and is_bal[b]:
            adj[a].append((b, sg))
            adj[b].append((a, -sg))

    level: dict[int, int] = {}
    groups: list[list[int]] = []
    consistent: list[bool] = []
    for root in range(p.num_pairs):
        if not is_bal[root] or root in level:
            continue
        local = {root: 0}
        order = [root]
        ok = True
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for w, sg in adj[u]:
                if w not in local:
                    local[w] = local[u] + sg
                    order.append(w)
                elif local[w] != local[u] + sg:
                    ok = False
        if not ok:
            if on_conflict == "raise":
                raise LevelConflict(len(groups), p.pairs[root])
            local = {}
            for c in sorted({s.comp[u] for u in order}):
                base = min(s.potential[u] for u in s.members[c])
                for u in s.members[c]:
                    local[u] = s.potential[u] - base
        else:
            base = min(local.values())
            local = {u: v - base for u, v in local.items()}
        level.update(local)
        groups.append(sorted(order))
        consistent.append(ok)
    s.level = level
    s.level_groups = groups
    s.level_consistent = consistent
    return s


def dual_component(p: PairDigraph, s: SccInfo, c: int) -> int:
    """The component holding the reverses of the pairs of ``c``."""
    rev = p.reverse_index
    duals = {s.comp[rev[i]] for i in s.members[c]}
    if c in duals:
        for i in s.members[c]:
            if s.comp[rev[i]] == c:
                raise InvertiblePairError(p.pairs[i])
    if len(duals) != 1:
        raise ContractViolation(f"reverses of component {c} span {len(duals)} components")
    return duals.pop()


def analyze(h: Digraph) -> tuple[PairDigraph, SccInfo]:
    p = build_pair_digraph(h)
    return p, strong_components(p)
