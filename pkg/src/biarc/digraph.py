"""Digraphs, walks, and the walk measures used throughout the package.

Vertices are the dense integers ``0..n-1``. Loops are allowed.
"""

from __future__ import annotations

import enum
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, DigraphParseError

log = logging.getLogger(__name__)

Arc = tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: frozenset[Arc] = field(default_factory=frozenset)

    def __init__(self, n: int, arcs: Iterable[Arc] = ()):
        arcs = frozenset((int(u), int(v)) for u, v in arcs)
        if n < 0:
            raise ContractViolation(f"vertex count must be non-negative, got {n}")
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise ContractViolation(f"arc ({u},{v}) has an endpoint outside 0..{n - 1}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "arcs", arcs)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    @cached_property
    def arc_list(self) -> list[Arc]:
        return sorted(self.arcs)

    @cached_property
    def out_neighbors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arc_list:
            out[u].append(v)
        return out

    @cached_property
    def in_neighbors(self) -> list[list[int]]:
        inn: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arc_list:
            inn[v].append(u)
        return inn

    @cached_property
    def matrix(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=bool)
        if self.arcs:
            idx = np.array(self.arc_list, dtype=np.int64)
            mat[idx[:, 0], idx[:, 1]] = True
        return mat

    def induced(self, vertices: Sequence[int]) -> Digraph:
        """Subdigraph on ``vertices``, relabelled to ``0..len(vertices)-1`` in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        return Digraph(
            len(vertices),
            ((pos[u], pos[v]) for u, v in self.arcs if u in pos and v in pos),
        )

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.arc_list)
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.arc_list})"


def parse_digraph(text: str) -> Digraph:
    """Parse the edge-list format: a header ``n m`` followed by ``m`` lines ``u v``.

    Blank lines and ``#`` comments are ignored; reported line numbers are physical.
    """
    entries: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            entries.append((lineno, body.split()))
    if not entries:
        raise DigraphParseError("empty document, expected header 'n m'", 1)

    lineno, header = entries[0]
    n, m = _parse_ints(header, 2, lineno, "header 'n m'")
    if n < 0 or m < 0:
        raise DigraphParseError("n and m must be non-negative", lineno)
    body = entries[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise DigraphParseError(f"header announces {m} arcs but {len(body)} arc lines follow", where)

    arcs: set[Arc] = set()
    for lineno, tokens in body:
        u, v = _parse_ints(tokens, 2, lineno, "arc 'u v'")
        if not (0 <= u < n and 0 <= v < n):
            raise DigraphParseError(f"vertex out of range 0..{n - 1} in arc {u} {v}", lineno)
        if (u, v) in arcs:
            raise DigraphParseError(f"duplicate arc {u} {v}", lineno)
        arcs.add((u, v))
    return Digraph(n, arcs)


def _parse_ints(tokens: list[str], count: int, lineno: int, what: str) -> list[int]:
    if len(tokens) != count:
        raise DigraphParseError(f"malformed {what}: expected {count} integers", lineno)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DigraphParseError(f"malformed {what}: non-integer token", lineno) from None


# ---------------------------------------------------------------------------
# walks


class Direction(enum.Enum):
    FORWARD = "F"
    BACKWARD = "B"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.FORWARD else -1

    def flipped(self) -> Direction:
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


F = Direction.FORWARD
B = Direction.BACKWARD


def parse_dirs(dirs: str | Iterable[Direction | str]) -> tuple[Direction, ...]:
    return tuple(d if isinstance(d, Direction) else Direction(d) for d in dirs)


@dataclass(frozen=True)
class Walk:
    """A vertex sequence with an explicit direction for every step.

    Directions are stored rather than inferred because in a digon both
    ``uv`` and ``vu`` are arcs.
    """

    vertices: tuple[int, ...]
    dirs: tuple[Direction, ...]

    def __init__(self, vertices: Sequence[int], dirs: str | Iterable[Direction]):
        vertices = tuple(int(v) for v in vertices)
        dirs = parse_dirs(dirs)
        if not vertices:
            raise ContractViolation("a walk has at least one vertex")
        if len(dirs) != len(vertices) - 1:
            raise ContractViolation(
                f"walk with {len(vertices)} vertices needs {len(vertices) - 1} directions, got {len(dirs)}"
            )
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "dirs", dirs)

    def __len__(self) -> int:
        return len(self.dirs)

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def pattern(self) -> str:
        return "".join(d.value for d in self.dirs)

    def steps(self) -> Iterable[tuple[int, int, Direction]]:
        for i, d in enumerate(self.dirs):
            yield self.vertices[i], self.vertices[i + 1], d

    def is_valid(self, h: Digraph) -> bool:
        if any(not 0 <= v < h.n for v in self.vertices):
            return False
        return all(
            h.has_arc(a, b) if d is F else h.has_arc(b, a) for a, b, d in self.steps()
        )

    def reverse(self) -> Walk:
        return Walk(self.vertices[::-1], [d.flipped() for d in reversed(self.dirs)])

    def __add__(self, other: Walk) -> Walk:
        if self.end != other.start:
            raise ContractViolation(f"cannot concatenate: walk ends at {self.end}, next starts at {other.start}")
        return Walk(self.vertices + other.vertices[1:], self.dirs + other.dirs)

    def segment(self, i: int, j: int) -> Walk:
        """The sub-walk from position ``i`` to position ``j`` (inclusive)."""
        return Walk(self.vertices[i : j + 1], self.dirs[i:j])

    def is_closed(self) -> bool:
        return self.start == self.end

    def rotate(self, i: int) -> Walk:
        """Re-start a closed walk at position ``i``."""
        if not self.is_closed():
            raise ContractViolation("only closed walks can be rotated")
        body = self.vertices[:-1]
        verts = body[i:] + body[:i]
        return Walk(verts + (verts[0],), self.dirs[i:] + self.dirs[:i])

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "dirs": self.pattern}

    @classmethod
    def from_json(cls, obj: dict | str) -> Walk:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vertices"], obj["dirs"])


def net_length(w: Walk) -> int:
    return sum(d.sign for d in w.dirs)


def prefix_net_lengths(w: Walk) -> list[int]:
    """Net lengths of all prefixes, including the empty one (index 0)."""
    out = [0]
    for d in w.dirs:
        out.append(out[-1] + d.sign)
    return out


class Side(enum.Enum):
    BELOW = "below"
    ABOVE = "above"
    BOTH = "both"


def is_constricted(w: Walk, side: Side = Side.BOTH, strict: bool = False) -> bool:
    """Check the prefix bounds of a walk of non-negative net length ``k``.

    Below: proper non-empty prefixes have net length >= 0 (> 0 when strict).
    Above: they have net length <= k (< k when strict).
    Callers pass the reverse walk when the net length is negative.
    """
    heights = prefix_net_lengths(w)
    k = heights[-1]
    if k < 0:
        raise ContractViolation(f"walk has negative net length {k}; pass its reverse")
    inner = heights[1:-1]
    if side in (Side.BELOW, Side.BOTH):
        if any(h < 0 or (strict and h == 0) for h in inner):
            return False
    if side in (Side.ABOVE, Side.BOTH):
        if any(h > k or (strict and h == k) for h in inner):
            return False
    return True


def is_congruent(p: Walk, q: Walk) -> bool:
    return p.dirs == q.dirs


def avoids(h: Digraph, p: Walk, q: Walk) -> bool:
    """True iff there is no faithful arc from ``p`` to ``q`` in ``h``."""
    if not is_congruent(p, q):
        raise ContractViolation("avoidance is defined for congruent walks only")
    for i, d in enumerate(p.dirs):
        x, y_next = p.vertices[i], q.vertices[i + 1]
        if d is F and h.has_arc(x, y_next):
            return False
        if d is B and h.has_arc(y_next, x):
            return False
    return True


@dataclass(frozen=True)
class CommonPreimage:
    """A direction template together with its homomorphisms into two walks.

    ``map1[i]`` is the position in the first walk that template position
    ``i`` is sent to (likewise ``map2``).
    """

    dirs: tuple[Direction, ...]
    map1: tuple[int, ...]
    map2: tuple[int, ...]

    @property
    def pattern(self) -> str:
        return "".join(d.value for d in self.dirs)


def replay(w: Walk, dirs: Sequence[Direction], index_map: Sequence[int]) -> Walk:
    """The image of a template inside ``w``: a walk in ``w``'s host digraph."""
    return Walk([w.vertices[i] for i in index_map], dirs)


def common_preimage(p1: Walk, p2: Walk) -> CommonPreimage:
    """Build a constricted walk that maps homomorphically onto both inputs.

    Both inputs must be constricted with the same net length. We search the
    product of the two height profiles: a state is a pair of positions, and a
    template step moves both positions to a neighbouring position whose height
    changes by the same +1 or -1. A shortest route from the two starts to the
    two ends is the template; its heights stay inside ``[0, r]`` because they
    are heights of ``p1``.
    """
    h1, h2 = prefix_net_lengths(p1), prefix_net_lengths(p2)
    if h1[-1] != h2[-1]:
        raise ContractViolation(f"net lengths differ: {h1[-1]} vs {h2[-1]}")
    if h1[-1] < 0 or not (is_constricted(p1) and is_constricted(p2)):
        raise ContractViolation("common pre-images need constricted walks of non-negative net length")

    m1, m2 = len(p1), len(p2)
    start, goal = (0, 0), (m1, m2)
    parent: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
    queue = deque([start])
    while queue and goal not in parent:
        i, j = queue.popleft()
        for di in (-1, 1):
            ni = i + di
            if not 0 <= ni <= m1:
                continue
            step = h1[ni] - h1[i]
            for dj in (-1, 1):
                nj = j + dj
                if 0 <= nj <= m2 and h2[nj] - h2[j] == step and (ni, nj) not in parent:
                    parent[(ni, nj)] = (i, j)
                    queue.append((ni, nj))
    if goal not in parent:
        raise ContractViolation("no common pre-image exists for these walks")

    route = [goal]
    while parent[route[-1]] is not None:
        route.append(parent[route[-1]])
    route.reverse()
    map1 = tuple(s[0] for s in route)
    map2 = tuple(s[1] for s in route)
    dirs = tuple(F if h1[b] > h1[a] else B for a, b in zip(map1, map1[1:]))
    if len(dirs) > max(1, m1 * m2):
        log.warning("common pre-image of length %d exceeds |p1|*|p2| = %d", len(dirs), m1 * m2)
    return CommonPreimage(dirs, map1, map2)


# ---------------------------------------------------------------------------
# connectivity and balance


def weak_components(h: Digraph) -> list[list[int]]:
    """Vertex sets of the weak components, each sorted, ordered by smallest vertex."""
    seen = [False] * h.n
    comps = []
    for root in range(h.n):
        if seen[root]:
            continue
        seen[root] = True
        stack, comp = [root], [root]
        while stack:
            u = stack.pop()
            for w in h.out_neighbors[u] + h.in_neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
                    comp.append(w)
        comps.append(sorted(comp))
    return comps


def _potential_forest(h: Digraph):
    """BFS potentials over the underlying graph, arcs weighted +1.

    Returns (potential, parent, parent_dir, depth); parent_dir is the direction
    of the step from parent to child.
    """
    pot = [0] * h.n
    parent = [-1] * h.n
    pdir: list[Direction | None] = [None] * h.n
    depth = [-1] * h.n
    for root in range(h.n):
        if depth[root] >= 0:
            continue
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w, d in [(w, F) for w in h.out_neighbors[u]] + [(w, B) for w in h.in_neighbors[u]]:
                if depth[w] < 0:
                    depth[w] = depth[u] + 1
                    pot[w] = pot[u] + d.sign
                    parent[w], pdir[w] = u, d
                    queue.append(w)
    return pot, parent, pdir, depth


def find_unbalanced_cycle(h: Digraph) -> tuple[Walk, int] | None:
    """A cycle of positive net length, or None if ``h`` is balanced.

    The returned cycle is rotated to start at its smallest vertex.
    """
    pot, parent, pdir, depth = _potential_forest(h)
    for u, v in h.arc_list:
        if pot[v] == pot[u] + 1:
            continue
        # tree path v -> lca -> u, then the arc u -> v closes the cycle
        up_v, up_u = [v], [u]
        a, b = v, u
        while depth[a] > depth[b]:
            a = parent[a]
            up_v.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            up_u.append(b)
        while a != b:
            a, b = parent[a], parent[b]
            up_v.append(a)
            up_u.append(b)
        verts = up_v + up_u[-2::-1]
        dirs = [pdir[x].flipped() for x in up_v[:-1]]
        dirs += [pdir[x] for x in up_u[-2::-1]]
        walk = Walk(verts + [v], dirs + [F])
        q = net_length(walk)
        if q < 0:
            walk, q = walk.reverse(), -q
        walk = walk.rotate(walk.vertices.index(min(walk.vertices[:-1])))
        return walk, q
    return None


@dataclass(frozen=True)
class CkLabeling:
    """A homomorphism to the directed k-cycle: every arc raises the label by one mod k."""

    k: int
    label: tuple[int, ...]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for v, lab in enumerate(self.label):
            out[lab].append(v)
        return out

    def is_valid(self, h: Digraph) -> bool:
        if len(self.label) != h.n or any(not 0 <= x < self.k for x in self.label):
            return False
        return all((self.label[v] - self.label[u]) % self.k == 1 % self.k for u, v in h.arcs)


def ck_labeling(h: Digraph, k: int) -> CkLabeling | None:
    if k < 1:
        raise ContractViolation(f"k must be positive, got {k}")
    pot, *_ = _potential_forest(h)
    lab = CkLabeling(k, tuple(p % k for p in pot))
    return lab if lab.is_valid(h) else None
