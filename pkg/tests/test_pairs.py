from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from biarc.digraph import CkLabeling, Digraph, ck_labeling
from biarc.errors import ContractViolation
from biarc.pairs import (
    InvertiblePairError,
    LevelConflict,
    build_pair_digraph,
    check_skew,
    classify_balance,
    compute_levels,
    dual_component,
    pair_index,
    restrict_to_hk,
    strong_components,
)

from conftest import cycle, digraphs, random_digraphs


def naive_arcs(h: Digraph) -> set:
    """Signed pair-digraph arcs straight from the definition."""
    out = set()
    pairs = [(x, y) for x in range(h.n) for y in range(h.n) if x != y]
    A = h.has_arc
    for (x, y), (x2, y2) in itertools.product(pairs, repeat=2):
        if A(x, x2) and A(y, y2) and not A(x, y2):
            out.add(((x, y), (x2, y2), 1))
        if A(x2, x) and A(y2, y) and not A(y2, x):
            out.add(((x, y), (x2, y2), -1))
    return out


def test_single_arc_has_no_pair_arcs():
    p = build_pair_digraph(Digraph(2, [(0, 1)]))
    assert sorted(p.pairs) == [(0, 1), (1, 0)]
    assert p.num_arcs == 0


def test_c3_positive_cycle_and_skew_image():
    p = build_pair_digraph(cycle(3))
    arcs = set(p.arcs())
    for a, b in [((0, 1), (1, 2)), ((1, 2), (2, 0)), ((2, 0), (0, 1))]:
        assert (a, b, 1) in arcs
        assert (a[::-1], b[::-1], 1) in arcs
    assert arcs == naive_arcs(cycle(3))


def test_empty_digraph_pair_digraph_is_arcless():
    assert build_pair_digraph(Digraph(4)).num_arcs == 0


@settings(max_examples=150, deadline=None)
@given(digraphs(max_n=5))
def test_matches_definition_and_skew(h):
    p = build_pair_digraph(h)
    assert set(p.arcs()) == naive_arcs(h)
    assert check_skew(p)
    assert p.num_pairs == h.n * (h.n - 1)
    assert p.num_arcs <= 2 * h.m**2
    assert all(pr == p.pairs[pair_index(h.n, *pr)] for pr in p.pairs)


def test_large_block_construction_matches_definition():
    # big enough to be split into several vectorised blocks
    for h in random_digraphs(3, 9, 11, seed=4, densities=(0.4, 0.6)):
        assert set(build_pair_digraph(h).arcs()) == naive_arcs(h)


def _closure_components(p) -> list[int]:
    n = p.num_pairs
    reach = [[i == j for j in range(n)] for i in range(n)]
    for a, b in zip(p.src.tolist(), p.dst.tolist()):
        reach[a][b] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                ri, rk = reach[i], reach[k]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return [[reach[i][j] and reach[j][i] for j in range(n)] for i in range(n)]


@settings(max_examples=80, deadline=None)
@given(digraphs(max_n=5))
def test_components_match_transitive_closure(h):
    p = build_pair_digraph(h)
    s = strong_components(p)
    mutual = _closure_components(p)
    for i in range(p.num_pairs):
        for j in range(p.num_pairs):
            assert (s.comp[i] == s.comp[j]) == mutual[i][j]
    for a, b in zip(p.src.tolist(), p.dst.tolist()):
        assert s.comp[a] >= s.comp[b]


def test_c3_components_and_duals():
    p = build_pair_digraph(cycle(3))
    s = strong_components(p)
    fwd = {s.comp[p.index[pr]] for pr in [(0, 1), (1, 2), (2, 0)]}
    bwd = {s.comp[p.index[pr]] for pr in [(1, 0), (2, 1), (0, 2)]}
    assert len(fwd) == len(bwd) == 1 and fwd != bwd
    (c,), (d,) = fwd, bwd
    assert dual_component(p, s, c) == d and dual_component(p, s, d) == c
    classify_balance(p, s)
    assert not s.balanced[c]


def test_arcless_components_are_singletons():
    h = Digraph(3, [(0, 1)])
    p = build_pair_digraph(h)
    s = strong_components(p)
    assert sorted(len(m) for m in s.members) == [1] * 6
    classify_balance(p, s)
    assert all(s.balanced)
    compute_levels(p, s)
    assert set(s.level.values()) == {0}
    for c in range(s.num_components):
        (i,) = s.members[c]
        x, y = p.pairs[i]
        assert s.members[dual_component(p, s, c)] == [p.index[(y, x)]]


def test_condensation_edges_follow_arcs():
    cross = 0
    for h in random_digraphs(40, 3, 5, seed=11):
        p = build_pair_digraph(h)
        s = strong_components(p)
        edges = set()
        for a, b, _ in p.arcs():
            ca, cb = s.comp[p.index[a]], s.comp[p.index[b]]
            if ca != cb:
                edges.add((ca, cb))
        cross += len(edges)
        assert edges == {(c, d) for c, succ in enumerate(s.succ) for d in succ}
    assert cross > 0


def test_digon_has_invertible_component():
    h = Digraph(2, [(0, 1), (1, 0)])
    p = build_pair_digraph(h)
    s = strong_components(p)
    c = s.comp[p.index[(0, 1)]]
    with pytest.raises(InvertiblePairError):
        dual_component(p, s, c)


def _find_two_cycle_balanced():
    """A component that is a +1/-1 two-cycle, found by search over small digraphs."""
    for n in (2, 3):
        cells = [(u, v) for u in range(n) for v in range(n)]
        for bits in range(1 << len(cells)):
            h = Digraph(n, [c for i, c in enumerate(cells) if bits >> i & 1])
            p = build_pair_digraph(h)
            s = strong_components(p)
            for mem in s.members:
                if len(mem) != 2:
                    continue
                a, b = mem
                signs = {sg for x, y, sg in p.arcs() if {p.index[x], p.index[y]} == {a, b}}
                inner = [(x, y, sg) for x, y, sg in p.arcs() if p.index[x] in mem and p.index[y] in mem]
                if len(inner) == 2 and signs == {1, -1} and inner[0][0] != inner[1][0]:
                    return h, p, s, s.comp[a]
    return None


def test_plus_minus_two_cycle_is_balanced():
    found = _find_two_cycle_balanced()
    assert found is not None
    h, p, s, c = found
    classify_balance(p, s)
    assert s.balanced[c]


def _directed_cycle_sums(p, mem: list[int]) -> set[int]:
    inside = set(mem)
    adj: dict[int, list[tuple[int, int]]] = {}
    for a, b, sg in zip(p.src.tolist(), p.dst.tolist(), p.sign.tolist()):
        if a in inside and b in inside:
            adj.setdefault(a, []).append((b, sg))
    sums = set()

    def dfs(start, u, total, seen):
        for w, sg in adj.get(u, ()):
            if w == start:
                sums.add(total + sg)
            elif w > start and w not in seen:
                dfs(start, w, total + sg, seen | {w})

    for v in mem:
        dfs(v, v, 0, {v})
    return sums


@settings(max_examples=120, deadline=None)
@given(digraphs(max_n=4))
def test_balance_matches_cycle_sums(h):
    p = build_pair_digraph(h)
    s = classify_balance(p, strong_components(p))
    for c, mem in enumerate(s.members):
        if len(mem) > 12:
            continue
        assert s.balanced[c] == (_directed_cycle_sums(p, mem) <= {0})


@settings(max_examples=120, deadline=None)
@given(digraphs(max_n=5))
def test_levels_respect_arc_signs(h):
    p = build_pair_digraph(h)
    s = strong_components(p)
    compute_levels(p, s, on_conflict="split")
    for group, ok in zip(s.level_groups, s.level_consistent):
        assert min(s.level[i] for i in group) == 0
        if not ok:
            continue
        members = set(group)
        for a, b, sg in zip(p.src.tolist(), p.dst.tolist(), p.sign.tolist()):
            if a in members and b in members:
                assert s.level[b] == s.level[a] + sg


def test_level_conflict_between_balanced_components():
    h = Digraph(2, [(0, 0), (0, 1), (1, 0)])
    p = build_pair_digraph(h)
    s = strong_components(p)
    with pytest.raises(LevelConflict):
        compute_levels(p, s, on_conflict="raise")
    compute_levels(p, s, on_conflict="split")
    assert s.level_consistent == [False]


def test_unknown_conflict_policy():
    p = build_pair_digraph(Digraph(2))
    with pytest.raises(ContractViolation):
        compute_levels(p, strong_components(p), on_conflict="ignore")


def test_restrict_to_hk_examples():
    c6 = cycle(6)
    p = build_pair_digraph(c6)
    assert restrict_to_hk(p, ck_labeling(c6, 6)).num_pairs == 0
    hk = restrict_to_hk(p, ck_labeling(c6, 3))
    assert sorted(hk.pairs) == sorted([(0, 3), (3, 0), (1, 4), (4, 1), (2, 5), (5, 2)])
    same = restrict_to_hk(p, CkLabeling(1, (0,) * 6))
    assert same.pairs == p.pairs and set(same.arcs()) == set(p.arcs())


@settings(max_examples=80, deadline=None)
@given(digraphs(max_n=5))
def test_invertibility_is_component_wide(h):
    p = build_pair_digraph(h)
    s = strong_components(p)
    rev = p.reverse_index
    for mem in s.members:
        flags = {s.comp[rev[i]] == s.comp[i] for i in mem}
        assert len(flags) == 1


def test_dump_format():
    p = build_pair_digraph(cycle(3))
    dump = p.to_json()
    assert {"from": [0, 1], "to": [1, 2], "sign": 1} in dump
    assert len(dump) == p.num_arcs
