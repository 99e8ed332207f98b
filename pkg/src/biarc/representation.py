"""Bi-arc and k-arc representations on an integer circle.

Poles sit clockwise as ``N_0..N_{k-1}, S_0..S_{k-1}``, one gap of ``G = 2(n+1)``
grid points apart, so ``L = 2kG``. A vertex ``u`` of class ``i`` gets

* ``I_u`` from just past the J interval of its last out-neighbour (or just past
  ``S_i``) clockwise to ``N_i + 2(rank+1)``;
* ``J_u`` from just past the I interval of its last in-neighbour (or just past
  ``N_{i-1}``) clockwise to ``S_{i-1} + 2(rank+1)``.

Intervals are closed sets of grid points; two of them meet iff one contains the
other's counterclockwise end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .digraph import CkLabeling, Digraph
from .errors import ContractViolation, InternalError
from .ordering import KMinResult, RecognitionResult, verify_k_min_ordering, verify_min_ordering

SCHEMA = 1

Interval = tuple[int, int]  # (ccw end, cw end)


def contains(iv: Interval, x: int, length: int) -> bool:
    ccw, cw = iv
    return (x - ccw) % length <= (cw - ccw) % length


def intervals_meet(a: Interval, b: Interval, length: int) -> bool:
    return contains(a, b[0], length) or contains(b, a[0], length)


@dataclass(frozen=True)
class ArcRepresentation:
    k: int
    L: int
    north: tuple[int, ...]
    south: tuple[int, ...]
    I: tuple[Interval, ...]
    J: tuple[Interval, ...]

    @property
    def n(self) -> int:
        return len(self.I)

    def span(self, iv: Interval) -> int:
        return (iv[1] - iv[0]) % self.L + 1

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "k": self.k,
            "L": self.L,
            "poles": {"N": list(self.north), "S": list(self.south)},
            "I": {str(v): list(iv) for v, iv in enumerate(self.I)},
            "J": {str(v): list(iv) for v, iv in enumerate(self.J)},
        }

    @classmethod
    def from_json(cls, obj: dict) -> ArcRepresentation:
        try:
            n = len(obj["I"])
            I = tuple(tuple(int(x) for x in obj["I"][str(v)]) for v in range(n))
            J = tuple(tuple(int(x) for x in obj["J"][str(v)]) for v in range(n))
            return cls(
                int(obj["k"]),
                int(obj["L"]),
                tuple(int(x) for x in obj["poles"]["N"]),
                tuple(int(x) for x in obj["poles"]["S"]),
                I,
                J,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolation(f"malformed representation JSON: {exc}") from exc


def _unpack(h: Digraph, ordering) -> tuple[CkLabeling, list[list[int]]]:
    if isinstance(ordering, RecognitionResult):
        if not ordering.is_yes:
            raise ContractViolation("cannot represent a digraph without a min ordering")
        ordering = ordering.order
    if isinstance(ordering, KMinResult):
        if not ordering.is_yes:
            raise ContractViolation("cannot represent a digraph without a k-min ordering")
        lab, orders = ordering.labeling, [list(o) for o in ordering.orders]
        if not verify_k_min_ordering(h, lab, orders):
            raise ContractViolation("supplied k-min ordering fails verification")
        return lab, orders
    order = list(ordering)
    if not verify_min_ordering(h, order):
        raise ContractViolation("supplied order is not a min ordering")
    return CkLabeling(1, (0,) * h.n), [order]


def build_arc_representation(h: Digraph, ordering) -> ArcRepresentation:
    """Representation from a verified min ordering (a permutation or a YES result) or a k-min result."""
    lab, orders = _unpack(h, ordering)
    n, k = h.n, lab.k
    gap = 2 * (n + 1)
    length = 2 * k * gap
    north = tuple(j * gap for j in range(k))
    south = tuple((k + j) * gap for j in range(k))
    rank = {}
    for o in orders:
        rank.update({v: r for r, v in enumerate(o)})
    cls = lab.label
    cw_i = [north[cls[v]] + 2 * (rank[v] + 1) for v in range(n)]
    cw_j = [south[(cls[v] - 1) % k] + 2 * (rank[v] + 1) for v in range(n)]

    def last(vs: Sequence[int]) -> int | None:
        return max(vs, key=rank.__getitem__) if vs else None

    I, J = [], []
    for v in range(n):
        o = last(h.out_neighbors[v])
        I.append(((cw_j[o] + 1) % length if o is not None else south[cls[v]] + 1, cw_i[v]))
        i = last(h.in_neighbors[v])
        J.append(((cw_i[i] + 1) % length if i is not None else north[(cls[v] - 1) % k] + 1, cw_j[v]))
    rep = ArcRepresentation(k, length, north, south, tuple(I), tuple(J))
    if not verify_arc_representation(h, rep):
        raise InternalError("built representation fails verification", {"rep": rep.to_json()})
    return rep


def _pole_index(iv: Interval, rep: ArcRepresentation, which: str) -> int | None:
    """Class index ``i`` when the poles inside ``iv`` have the allowed shape, else None.

    I intervals must hold ``S_{i+1..k-1}, N_{0..i}``; J intervals ``N_{i+1..k-1}, S_{0..i}``.
    """
    k, L = rep.k, rep.L
    inside_n = [contains(iv, x, L) for x in rep.north]
    inside_s = [contains(iv, x, L) for x in rep.south]
    first, second = (inside_n, inside_s) if which == "I" else (inside_s, inside_n)
    for i in range(k):
        want_first = [j <= i for j in range(k)]
        want_second = [j > i for j in range(k)]
        if first == want_first and second == want_second:
            return i
    return None


def _poles_ok(rep: ArcRepresentation) -> bool:
    k, L = rep.k, rep.L
    poles = list(rep.north) + list(rep.south)
    if len(rep.north) != k or len(rep.south) != k or len(set(poles)) != 2 * k:
        return False
    if any(not 0 <= x < L for x in poles):
        return False
    # clockwise order N_0..N_{k-1},S_0..S_{k-1}: one full turn in total
    steps = [(poles[(j + 1) % (2 * k)] - poles[j]) % L for j in range(2 * k)]
    return sum(steps) == L


def generated_order(rep: ArcRepresentation) -> tuple[CkLabeling, list[list[int]]] | None:
    """Classes from the pole shape of each I interval, ordered by clockwise end.

    None if the pole shapes or the per-class consistency of I and J fail.
    """
    k, L = rep.k, rep.L
    if k < 1 or L < 1 or not _poles_ok(rep) or len(rep.I) != len(rep.J):
        return None
    label = []
    for v in range(rep.n):
        if any(not 0 <= x < L for x in rep.I[v] + rep.J[v]):
            return None
        i = _pole_index(rep.I[v], rep, "I")
        t = _pole_index(rep.J[v], rep, "J")
        if i is None or t is None or t != (i - 1) % k:
            return None
        label.append(i)
    orders = []
    for i in range(k):
        members = [v for v in range(rep.n) if label[v] == i]
        by_i = sorted(members, key=lambda v: (rep.I[v][1] - rep.north[i]) % L)
        by_j = sorted(members, key=lambda v: (rep.J[v][1] - rep.south[(i - 1) % k]) % L)
        ends_i = {(rep.I[v][1] - rep.north[i]) % L for v in members}
        ends_j = {(rep.J[v][1] - rep.south[(i - 1) % k]) % L for v in members}
        if by_i != by_j or len(ends_i) < len(members) or len(ends_j) < len(members):
            return None
        orders.append(by_i)
    return CkLabeling(k, tuple(label)), orders


def verify_arc_representation(h: Digraph, rep: ArcRepresentation) -> bool:
    if rep.n != h.n:
        return False
    if generated_order(rep) is None:
        return False
    L = rep.L
    for u in range(h.n):
        for v in range(h.n):
            if h.has_arc(u, v) == intervals_meet(rep.I[u], rep.J[v], L):
                return False
    return True


def to_svg(rep: ArcRepresentation, size: int = 480) -> str:
    """Circle diagram: poles as ticks, I intervals inside the circle, J intervals outside."""
    c = size / 2
    base = size * 0.3
    step = size * 0.15 / max(1, rep.n)

    def point(pos: float, radius: float) -> tuple[float, float]:
        ang = 2 * math.pi * pos / rep.L - math.pi / 2
        return c + radius * math.cos(ang), c + radius * math.sin(ang)

    def arc_path(iv: Interval, radius: float) -> str:
        ccw, cw = iv
        span = (cw - ccw) % rep.L
        x0, y0 = point(ccw, radius)
        x1, y1 = point(ccw + span, radius)
        large = 1 if span * 2 > rep.L else 0
        if span == 0:
            return f"M {x0:.2f} {y0:.2f} L {x1 + 0.5:.2f} {y1:.2f}"
        return f"M {x0:.2f} {y0:.2f} A {radius:.2f} {radius:.2f} 0 {large} 1 {x1:.2f} {y1:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{c}" cy="{c}" r="{base}" fill="none" stroke="#999"/>',
    ]
    for name, poles in (("N", rep.north), ("S", rep.south)):
        for j, pos in enumerate(poles):
            x, y = point(pos, base * 0.85)
            tx, ty = point(pos, base * 0.75)
            parts.append(f'<line x1="{c}" y1="{c}" x2="{x:.2f}" y2="{y:.2f}" stroke="#ccc"/>')
            parts.append(f'<text x="{tx:.2f}" y="{ty:.2f}" font-size="10">{name}{j}</text>')
    for v in range(rep.n):
        r_in = base - (v + 1) * step
        r_out = base + (v + 1) * step
        parts.append(f'<path d="{arc_path(rep.I[v], r_in)}" fill="none" stroke="#1f77b4"><title>I{v}</title></path>')
        parts.append(f'<path d="{arc_path(rep.J[v], r_out)}" fill="none" stroke="#d62728"><title>J{v}</title></path>')
    parts.append("</svg>")
    return "\n".join(parts)
