from __future__ import annotations

import itertools

import pytest

from biarc.digraph import Digraph
from biarc.errors import ContractViolation, SizeGuardError
from biarc.oracles import (
    LIMITS,
    oracle_cc,
    oracle_k_min_ordering,
    oracle_min_ordering,
    oracle_search,
    oracle_set_polymorphism,
)

from conftest import cycle, random_digraphs


def _min_ok(h: Digraph, order, same=lambda a, b: True) -> bool:
    rank = {v: i for i, v in enumerate(order)}
    for (u, v), (u2, v2) in itertools.product(h.arcs, repeat=2):
        if not same(u, u2):
            continue
        a = u if rank[u] <= rank[u2] else u2
        b = v if rank[v] <= rank[v2] else v2
        if not h.has_arc(a, b):
            return False
    return True


def _first_by_enumeration(h: Digraph):
    return next((o for o in itertools.permutations(range(h.n)) if _min_ok(h, o)), None)


def test_examples():
    assert oracle_min_ordering(Digraph(2, [(0, 1)])) == (0, 1)
    assert oracle_min_ordering(cycle(3)) is None
    assert oracle_min_ordering(Digraph(0)) == ()
    assert oracle_cc(cycle(3)) is not None
    assert oracle_cc(Digraph(2, [(0, 1), (1, 0)])) is None


def test_pruned_search_returns_the_first_permutation():
    for h in random_digraphs(200, 2, 6, seed=91):
        assert oracle_min_ordering(h) == _first_by_enumeration(h)


def test_k_min_certificates_check_out():
    cert = oracle_k_min_ordering(cycle(4), 4)
    assert cert.k == 4 and cert.class_orders() == [[0], [1], [2], [3]]
    assert oracle_k_min_ordering(cycle(4), 3) is None
    for h in random_digraphs(120, 2, 6, seed=92):
        for k in (1, 2, 3):
            cert = oracle_k_min_ordering(h, k)
            if cert is None:
                continue
            assert all((cert.labels[v] - cert.labels[u]) % k == 1 % k for u, v in h.arcs)
            assert _min_ok(h, cert.order, lambda a, b: cert.labels[a] == cert.labels[b])


def test_k_min_with_k_one_is_min_ordering():
    for h in random_digraphs(100, 2, 5, seed=93):
        cert = oracle_k_min_ordering(h, 1)
        assert (cert is None) == (oracle_min_ordering(h) is None)


def test_cc_oracle_tables_are_conservative_commutative():
    for h in random_digraphs(100, 2, 5, seed=94):
        f = oracle_cc(h)
        if f is None:
            continue
        assert all(f[x, y] in (x, y) and f[x, y] == f[y, x] for x in range(h.n) for y in range(h.n))
        assert all(h.has_arc(f[u, u2], f[v, v2]) for (u, v), (u2, v2) in itertools.product(h.arcs, repeat=2))


def test_set_oracle_singletons_are_fixed():
    f = oracle_set_polymorphism(Digraph(3, [(0, 1), (1, 2)]))
    assert all(f[1 << v] == v for v in range(3))
    assert len(f) == 7


@pytest.mark.parametrize("target,k", [("min-ordering", None), ("k-min", 2), ("cc", None), ("set", None)])
def test_size_guards(target, k):
    bound = LIMITS[target]
    with pytest.raises(SizeGuardError, match=f"n={bound + 1}"):
        oracle_search(Digraph(bound + 1), target, k)


def test_dispatch_errors():
    with pytest.raises(ContractViolation):
        oracle_search(cycle(3), "k-min")
    with pytest.raises(ContractViolation):
        oracle_search(cycle(3), "cyclic")
    with pytest.raises(ContractViolation):
        oracle_k_min_ordering(cycle(3), 0)
