"""Min orderings: construction from the pair digraph, verification, and the k-class variant.

The construction keeps a set of chosen pairs ``x < y`` closed under pair-digraph
reachability, with the reverse of every chosen pair discarded. Pairs are chosen
in two phases: first the extremal pairs of unbalanced components, picked
through sources, then the balanced pairs level by level, picked through sources
that respect transitivity among the chosen balanced pairs. Whatever is left
undecided is swept the same way against all chosen pairs. If a step finds no
usable source, the ordering is completed by peeling minimum vertices with
backtracking instead. Every YES is verified before it is returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .digraph import CkLabeling, Digraph, ck_labeling, find_unbalanced_cycle, weak_components
from .errors import ContractViolation, InternalError
from .obstruction import Circuit, find_component_circuit, find_relation_cycle
from .pairs import (
    Pair,
    PairDigraph,
    SccInfo,
    build_pair_digraph,
    classify_balance,
    compute_levels,
    restrict_to_hk,
    strong_components,
)

log = logging.getLogger(__name__)

SCHEMA = 1
_VERIFY_BLOCK = 1 << 20


class DecisionState:
    """Chosen / discarded / remaining pairs over one pair digraph.

    Choosing a pair chooses everything reachable from it that is still
    undecided and discards the reverses, so ``(a,b)`` is chosen exactly when
    ``(b,a)`` is discarded, and the chosen set stays closed under arcs.
    """

    def __init__(self, p: PairDigraph, audit: bool = False):
        self.p = p
        self.chosen = [False] * p.num_pairs
        self.discarded = [False] * p.num_pairs
        self.audit = audit
        self.steps = 0

    def copy(self) -> DecisionState:
        other = DecisionState(self.p, self.audit)
        other.chosen = self.chosen[:]
        other.discarded = self.discarded[:]
        other.steps = self.steps
        return other

    def undecided(self, i: int) -> bool:
        return not (self.chosen[i] or self.discarded[i])

    def remaining(self) -> list[int]:
        return [i for i in range(self.p.num_pairs) if self.undecided(i)]

    def closure(self, starts: Iterable[int]) -> list[int]:
        """Undecided pairs reachable from the undecided ``starts`` through undecided pairs."""
        seen: set[int] = set()
        stack = []
        for i in starts:
            if i not in seen and self.undecided(i):
                seen.add(i)
                stack.append(i)
        succ = self.p.succ
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w not in seen and self.undecided(w):
                    seen.add(w)
                    stack.append(w)
        return sorted(seen)

    def select(self, i: int) -> list[int]:
        moved = self.closure([i])
        rev = self.p.reverse_index
        for t in moved:
            self.chosen[t] = True
            self.discarded[rev[t]] = True
        self.steps += 1
        if self.audit:
            self.check_invariants()
        return moved

    def chosen_pairs(self, among: Iterable[int] | None = None) -> list[Pair]:
        idx = range(self.p.num_pairs) if among is None else among
        return [self.p.pairs[i] for i in idx if self.chosen[i]]

    def creates_circuit(self, extra: Iterable[int]) -> bool:
        prs = self.chosen_pairs() + [self.p.pairs[i] for i in extra]
        return find_relation_cycle(prs) is not None

    def check_invariants(self) -> None:
        rev = self.p.reverse_index
        for i in range(self.p.num_pairs):
            if self.chosen[i] != self.discarded[rev[i]]:
                raise InternalError("chosen/discarded duality broken", {"pair": self.p.pairs[i]})
            if self.chosen[i] and self.discarded[i]:
                raise InternalError("pair both chosen and discarded", {"pair": self.p.pairs[i]})
            if self.chosen[i]:
                for w in self.p.succ[i]:
                    if not self.chosen[w]:
                        raise InternalError(
                            "chosen set not closed under arcs",
                            {"from": self.p.pairs[i], "to": self.p.pairs[w]},
                        )

    def check_no_circuit(self, where: str) -> None:
        cyc = find_relation_cycle(self.chosen_pairs())
        if cyc is not None:
            raise InternalError(f"chosen pairs contain a circuit at {where}", {"cycle": cyc})


# ---------------------------------------------------------------------------
# extremal pairs and sources


def extremal_pairs(p: PairDigraph, s: SccInfo, c: int) -> set[int]:
    """Pairs of unbalanced component ``c`` that start a closed walk of nonzero net value
    whose prefixes never cross zero in the opposite direction.

    Positive orientation: net value > 0 and every prefix >= 0 (the mirror test
    uses the negated signs). This is decided exactly by a counter search capped
    at ``|c|``: a walk from ``v`` that stays non-negative and reaches ``|c|``
    must repeat a vertex at two increasing counter values, which can be pumped
    and then closed back to ``v`` inside the component.
    """
    if s.balanced is None:
        classify_balance(p, s)
    if s.balanced[c]:
        raise ContractViolation(f"component {c} is balanced; extremal pairs live in unbalanced components")
    members = s.members[c]
    cap = len(members)
    comp = s.comp
    inner = {u: [(w, sg) for w, sg in p.signed_succ[u] if comp[w] == c] for u in members}

    result: set[int] = set()
    for orient in (1, -1):
        known_bad: set[int] = set()
        found: set[int] = set()
        for v in members:
            if v in result:
                continue
            if _pumps(v, orient, cap, inner, found, known_bad):
                found.add(v)
            else:
                known_bad.add(v)
        result |= found
    return result


def _pumps(v: int, orient: int, cap: int, inner: dict, good: set[int], bad: set[int]) -> bool:
    seen = {(v, 0)}
    stack = [(v, 0)]
    while stack:
        u, cnt = stack.pop()
        for w, sg in inner[u]:
            nc = cnt + orient * sg
            if nc < 0:
                continue
            if nc >= cap or (w == v and nc >= 1) or w in good:
                return True
            if nc == 0 and w in bad:
                continue
            if (w, nc) not in seen:
                seen.add((w, nc))
                stack.append((w, nc))
    return False


def _targets_by_first(p: PairDigraph, targets: Iterable[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i in sorted(targets):
        out.setdefault(p.pairs[i][0], []).append(i)
    return out


def _is_source(p: PairDigraph, s: SccInfo, a: int, firsts: list[int], targets: set[int]) -> bool:
    reach = 0
    bits = s.reach_bits
    for i in firsts:
        reach |= bits[s.comp[i]]
    for t in targets:
        if p.pairs[t][1] == a and reach >> s.comp[t] & 1:
            return False
    return True


def _closes_chain(a: int, firsts: Sequence[int], p: PairDigraph, relation: Iterable[Pair]) -> bool:
    """True if some ``(a,q)`` has a chain ``q -> ... -> a`` in ``relation``."""
    adj: dict[int, list[int]] = {}
    for x, y in relation:
        adj.setdefault(x, []).append(y)
    starts = {p.pairs[i][1] for i in firsts}
    seen = set(starts)
    stack = list(starts)
    while stack:
        u = stack.pop()
        if u == a:
            return True
        for w in adj.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def find_source(targets: Iterable[int], p: PairDigraph, s: SccInfo | None = None) -> int | None:
    """Smallest vertex ``a`` heading some target pair ``(a,b)`` such that no target
    ``(c,a)`` is reachable from any target ``(a,b)``.

    ``targets`` are pair indices into ``p``.
    """
    s = s if s is not None else strong_components(p)
    targets = set(targets)
    for a, firsts in sorted(_targets_by_first(p, targets).items()):
        if _is_source(p, s, a, firsts, targets):
            return a
    return None


def find_transitive_source(
    targets: Iterable[int], b: Iterable[Pair], p: PairDigraph, s: SccInfo | None = None
) -> int | None:
    """A source that also has no chain ``(q,p1),...,(pr,a)`` inside ``b`` for any target ``(a,q)``."""
    s = s if s is not None else strong_components(p)
    targets = set(targets)
    b = list(b)
    for a, firsts in sorted(_targets_by_first(p, targets).items()):
        if _is_source(p, s, a, firsts, targets) and not _closes_chain(a, firsts, p, b):
            return a
    return None


# ---------------------------------------------------------------------------
# the construction


@dataclass
class _Run:
    p: PairDigraph
    s: SccInfo
    state: DecisionState
    stats: dict = field(default_factory=dict)

    def bump(self, key: str, by: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + by

    def select_round(self, targets: set[int], relation: list[Pair] | None) -> bool:
        """Pick one source for ``targets`` and choose all its pairs. False if none is usable.

        Sources whose selection would put a circuit into the chosen pairs are
        skipped (counted as ``guard_rejections``).
        """
        p, s, state = self.p, self.s, self.state
        for a, firsts in sorted(_targets_by_first(p, targets).items()):
            if not _is_source(p, s, a, firsts, targets):
                continue
            if relation is not None and _closes_chain(a, firsts, p, relation):
                continue
            moved = state.closure(firsts)
            if state.creates_circuit(moved):
                self.bump("guard_rejections")
                continue
            for i in firsts:
                if state.undecided(i):
                    state.select(i)
            return True
        return False

    def phase_unbalanced(self) -> bool:
        p, s, state = self.p, self.s, self.state
        targets: set[int] = set()
        for c in range(s.num_components):
            if not s.balanced[c]:
                targets |= extremal_pairs(p, s, c)
        self.stats["extremal_pairs"] = len(targets)
        while targets:
            if not self.select_round(targets, None):
                self.bump("stalled_unbalanced")
                return False
            targets = {i for i in targets if state.undecided(i)}
        return True

    def phase_balanced(self) -> None:
        p, s, state = self.p, self.s, self.state
        compute_levels(p, s, on_conflict="split")
        self.stats["level_conflicts"] = s.level_consistent.count(False)
        balanced_idx = [i for i in range(p.num_pairs) if s.balanced[s.comp[i]]]
        for group in s.level_groups:
            for lvl in sorted({s.level[i] for i in group}):
                targets = {i for i in group if s.level[i] == lvl and state.undecided(i)}
                while targets:
                    relation = state.chosen_pairs(balanced_idx)
                    if not self.select_round(targets, relation):
                        self.bump("deferred_levels")
                        break
                    targets = {i for i in targets if state.undecided(i)}

    def sweep(self) -> bool:
        state = self.state
        targets = set(state.remaining())
        self.stats["swept_pairs"] = len(targets)
        while targets:
            if not self.select_round(targets, state.chosen_pairs()):
                return False
            targets = {i for i in targets if state.undecided(i)}
        return True


def _two_phase(p: PairDigraph, s: SccInfo, audit: bool, stats: dict) -> DecisionState | None:
    if s.balanced is None:
        classify_balance(p, s)
    run = _Run(p, s, DecisionState(p, audit), stats)
    run.phase_unbalanced()
    if audit:
        run.state.check_no_circuit("end of unbalanced phase")
    run.phase_balanced()
    if audit:
        run.state.check_no_circuit("end of balanced phase")
    done = run.sweep()
    if audit:
        run.state.check_no_circuit("end of sweep")
    return run.state if done else None


def _peel(p: PairDigraph, vertices: Sequence[int], audit: bool, stats: dict) -> DecisionState | None:
    """Complete search: repeatedly take the smallest vertex that can be the next minimum.

    A vertex ``a`` qualifies when none of its pairs ``(a,b)`` with ``b`` still
    unplaced is discarded and choosing them all keeps the chosen pairs free of
    circuits. Dead ends backtrack; that is exponential in the worst case.
    """
    by_first: dict[int, list[int]] = {v: [] for v in vertices}
    for i, (x, _) in enumerate(p.pairs):
        by_first[x].append(i)

    def rec(state: DecisionState, unplaced: list[int]) -> DecisionState | None:
        if not state.remaining():
            return state
        for a in unplaced:
            rest = [v for v in unplaced if v != a]
            rest_set = set(rest)
            own = [i for i in by_first[a] if p.pairs[i][1] in rest_set]
            if any(state.discarded[i] for i in own):
                continue
            moved = state.closure(own)
            if state.creates_circuit(moved):
                continue
            nxt = state.copy()
            for i in own:
                if nxt.undecided(i):
                    nxt.select(i)
            done = rec(nxt, rest)
            if done is not None:
                return done
            stats["backtracks"] = stats.get("backtracks", 0) + 1
        return None

    return rec(DecisionState(p, audit), list(vertices))


def _ranks_from_state(state: DecisionState, vertices: Sequence[int]) -> list[int] | None:
    """Vertices sorted by number of chosen predecessors; None if the relation is not a linear order."""
    below = {v: 0 for v in vertices}
    for x, y in state.chosen_pairs():
        if y in below:
            below[y] += 1
    order = sorted(vertices, key=lambda v: below[v])
    if sorted(below.values()) != list(range(len(vertices))):
        return None
    return order


@dataclass
class RecognitionResult:
    verdict: str  # "YES" or "NO"
    order: list[int] | None = None
    circuit: Circuit | None = None
    methods: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def is_yes(self) -> bool:
        return self.verdict == "YES"

    def to_json(self) -> dict:
        if self.is_yes:
            return {"schema": SCHEMA, "status": "min_ordering", "order": self.order}
        return self.circuit.to_json()


def _order_component(h: Digraph, audit: bool, stats: dict) -> tuple[list[int] | None, Circuit | None, str]:
    """Order a (weakly connected) digraph, or return the circuit that blocks it."""
    p = build_pair_digraph(h)
    s = strong_components(p)
    circ = find_component_circuit(p, s)
    if circ is not None:
        return None, circ, "obstruction"
    state = _two_phase(p, s, audit, stats)
    method = "two-phase"
    if state is None:
        log.info("two-phase selection stalled on n=%d; completing by peeling", h.n)
        state = _peel(p, range(h.n), audit, stats)
        method = "peeling"
        if state is None:
            raise InternalError(
                "no circuit found but no ordering could be built",
                {"digraph": h.arc_list},
            )
    if audit:
        state.check_invariants()
        state.check_no_circuit("termination")
    order = _ranks_from_state(state, range(h.n))
    if order is None:
        raise InternalError("chosen pairs do not form a linear order", {"digraph": h.arc_list, "method": method})
    return order, None, method


def build_min_ordering(h: Digraph, audit: bool = False) -> RecognitionResult:
    """Decide whether ``h`` has a min ordering and return a verified certificate.

    Weak components are handled separately and their orders concatenated in
    order of smallest vertex. With ``audit`` the chosen/discarded invariants are
    checked after every selection and the chosen pairs are checked for
    circuits at every phase boundary.
    """
    stats: dict = {}
    order: list[int] = []
    methods: list[str] = []
    for comp in weak_components(h):
        sub = h.induced(comp)
        local, circ, method = _order_component(sub, audit, stats)
        methods.append(method)
        if circ is not None:
            prs = tuple((comp[a], comp[b]) for a, b in circ.pairs)
            cid = circ.component
            if len(comp) < h.n:
                # component ids refer to the sub-digraph; look the pair up in the whole one
                whole = build_pair_digraph(h)
                cid = strong_components(whole).comp[whole.index[prs[0]]]
            mapped = Circuit(prs, cid)
            return RecognitionResult("NO", circuit=mapped, methods=methods, stats=stats)
        order.extend(comp[v] for v in local)
    if not verify_min_ordering(h, order):
        raise InternalError("constructed ordering failed verification", {"digraph": h.arc_list, "order": order})
    return RecognitionResult("YES", order=order, methods=methods, stats=stats)


def verify_min_ordering(h: Digraph, order: Sequence[int]) -> bool:
    """Check ``min(u,u') min(v,v')`` is an arc for every two arcs ``uv``, ``u'v'``."""
    if sorted(order) != list(range(h.n)):
        raise ContractViolation("order is not a permutation of the vertices")
    if h.m == 0:
        return True
    rank = np.empty(h.n, dtype=np.int64)
    rank[np.asarray(order, dtype=np.int64)] = np.arange(h.n)
    arcs = np.array(h.arc_list, dtype=np.int64)
    u, v = arcs[:, 0], arcs[:, 1]
    mat = h.matrix
    block = max(1, _VERIFY_BLOCK // len(arcs))
    for lo in range(0, len(arcs), block):
        u1, v1 = u[lo : lo + block, None], v[lo : lo + block, None]
        mu = np.where(rank[u1] <= rank[u][None, :], u1, u[None, :])
        mv = np.where(rank[v1] <= rank[v][None, :], v1, v[None, :])
        if not mat[mu, mv].all():
            return False
    return True


# ---------------------------------------------------------------------------
# k-min orderings


@dataclass
class KMinResult:
    verdict: str
    k: int | None = None
    labeling: CkLabeling | None = None
    orders: list[list[int]] | None = None
    cycle_net_length: int | None = None
    attempts: list[dict] = field(default_factory=list)
    circuit: Circuit | None = None

    @property
    def is_yes(self) -> bool:
        return self.verdict == "YES"

    def to_json(self) -> dict:
        if self.is_yes:
            return {
                "schema": SCHEMA,
                "status": "k_min_ordering",
                "k": self.k,
                "labels": list(self.labeling.label),
                "orders": self.orders,
            }
        out = {"schema": SCHEMA, "status": "no_k_min_ordering", "attempts": self.attempts}
        if self.cycle_net_length is not None:
            out["cycle_net_length"] = self.cycle_net_length
        if self.circuit is not None:
            out["circuit"] = [list(pr) for pr in self.circuit.pairs]
        return out


def _divisors_desc(q: int) -> list[int]:
    return sorted((d for d in range(1, q + 1) if q % d == 0), reverse=True)


def _k_orders(h: Digraph, lab: CkLabeling, audit: bool) -> tuple[list[list[int]] | None, Circuit | None, str]:
    full = build_pair_digraph(h)
    p = restrict_to_hk(full, lab)
    s = strong_components(p)
    circ = find_component_circuit(p, s)
    if circ is not None:
        return None, circ, "obstruction"
    stats: dict = {}
    state = _two_phase(p, s, audit, stats)
    method = "two-phase"
    if state is None:
        state = _peel(p, range(h.n), audit, stats)
        method = "peeling"
        if state is None:
            raise InternalError("no circuit in H^(k) but no k-min ordering built", {"k": lab.k})
    orders = []
    for cls in lab.classes():
        order = _ranks_from_state(state, cls)
        if order is None:
            raise InternalError("class relation is not a linear order", {"k": lab.k, "class": cls})
        orders.append(order)
    return orders, None, method


def build_k_min_ordering(h: Digraph, audit: bool = False, k: int | None = None) -> KMinResult:
    """Find a k-min ordering of a weakly connected digraph.

    Without ``k``, the divisors of an unbalanced cycle's net length are tried
    from largest to smallest (a balanced digraph falls back to plain min
    orderings, k = 1). With ``k`` only that value is tried.
    """
    if len(weak_components(h)) > 1:
        raise ContractViolation("k-min orderings are computed per weakly connected digraph")
    if k is not None and k < 1:
        raise ContractViolation("k must be a positive integer")
    found = find_unbalanced_cycle(h)
    if found is None and k in (None, 1):
        res = build_min_ordering(h, audit)
        if not res.is_yes:
            return KMinResult("NO", attempts=[{"k": 1, "outcome": "circuit"}], circuit=res.circuit)
        lab = CkLabeling(1, (0,) * h.n)
        return KMinResult("YES", 1, lab, [res.order], attempts=[{"k": 1, "outcome": "ok"}])

    q = found[1] if found is not None else None
    candidates = [k] if k is not None else _divisors_desc(q)
    attempts = []
    last_circuit = None
    for k in candidates:
        lab = ck_labeling(h, k)
        if lab is None:
            attempts.append({"k": k, "outcome": "no_labeling"})
            continue
        orders, circ, method = _k_orders(h, lab, audit)
        if circ is not None:
            attempts.append({"k": k, "outcome": "circuit", "circuit": [list(pr) for pr in circ.pairs]})
            last_circuit = circ
            continue
        if not verify_k_min_ordering(h, lab, orders):
            raise InternalError("constructed k-min ordering failed verification", {"k": k, "orders": orders})
        attempts.append({"k": k, "outcome": "ok", "method": method})
        return KMinResult("YES", k, lab, orders, q, attempts)
    return KMinResult("NO", cycle_net_length=q, attempts=attempts, circuit=last_circuit)


def verify_k_min_ordering(h: Digraph, lab: CkLabeling, orders: Sequence[Sequence[int]]) -> bool:
    classes = lab.classes()
    if len(orders) != lab.k or any(sorted(o) != c for o, c in zip(orders, classes)):
        raise ContractViolation("orders must list each labelling class exactly once")
    rank = {}
    for o in orders:
        rank.update({v: i for i, v in enumerate(o)})
    label = lab.label
    k = lab.k
    for u, v in h.arcs:
        if (label[v] - label[u]) % k != 1 % k:
            return False
    arcs = h.arc_list
    for u, v in arcs:
        for w, z in arcs:
            if label[u] == label[w] and rank[u] < rank[w] and rank[z] < rank[v] and not h.has_arc(u, z):
                return False
    return True
