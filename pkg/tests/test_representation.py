from __future__ import annotations

import dataclasses
import json
import random

import pytest

from biarc.digraph import Digraph, weak_components
from biarc.errors import ContractViolation
from biarc.generate import random_biarc
from biarc.ordering import build_k_min_ordering, build_min_ordering, verify_k_min_ordering, verify_min_ordering
from biarc.representation import (
    ArcRepresentation,
    build_arc_representation,
    contains,
    generated_order,
    intervals_meet,
    to_svg,
    verify_arc_representation,
)

from conftest import cycle, random_digraphs, small_corpus


def test_interval_membership_wraps():
    assert contains((8, 2), 0, 10) and contains((8, 2), 9, 10)
    assert not contains((8, 2), 5, 10)
    assert contains((3, 3), 3, 10) and not contains((3, 3), 4, 10)


def test_meeting_is_symmetric_and_end_based():
    assert intervals_meet((0, 4), (2, 6), 10) and intervals_meet((2, 6), (0, 4), 10)
    assert intervals_meet((8, 1), (0, 0), 10)
    assert not intervals_meet((0, 2), (3, 5), 10)


def test_single_arc_layout():
    h = Digraph(2, [(0, 1)])
    rep = build_arc_representation(h, [0, 1])
    assert rep.k == 1 and rep.L == 4 * (h.n + 1)
    assert rep.north == (0,) and rep.south == (6,)
    assert verify_arc_representation(h, rep)
    lab, orders = generated_order(rep)
    assert orders == [[0, 1]] and lab.label == (0, 0)


def test_reflexive_path_layout():
    h = Digraph(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)])
    rep = build_arc_representation(h, build_min_ordering(h))
    assert verify_arc_representation(h, rep)


def test_rejects_orders_that_fail_verification():
    with pytest.raises(ContractViolation):
        build_arc_representation(Digraph(2, [(0, 1), (1, 0)]), [0, 1])
    with pytest.raises(ContractViolation):
        build_arc_representation(cycle(3), build_min_ordering(cycle(3)))


def test_json_round_trip():
    h = Digraph(3, [(0, 1), (1, 2), (0, 2)])
    rep = build_arc_representation(h, build_min_ordering(h))
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["schema"] == 1 and set(obj["poles"]) == {"N", "S"}
    assert ArcRepresentation.from_json(obj) == rep


def test_malformed_json():
    with pytest.raises(ContractViolation):
        ArcRepresentation.from_json({"k": 1, "L": 4})


def test_every_small_yes_instance_round_trips():
    for h in small_corpus():
        res = build_min_ordering(h)
        if not res.is_yes:
            continue
        rep = build_arc_representation(h, res)
        assert verify_arc_representation(h, rep)
        _, (order,) = generated_order(rep)
        assert order == res.order
        assert verify_min_ordering(h, order)


def test_random_biarc_round_trip():
    rng = random.Random(12)
    for _ in range(60):
        h = random_biarc(rng.randint(3, 20), rng)
        rep = build_arc_representation(h, build_min_ordering(h))
        assert verify_arc_representation(h, rep)
        _, (order,) = generated_order(rep)
        assert verify_min_ordering(h, order)


def _mutations(rep: ArcRepresentation, rng: random.Random):
    for _ in range(30):
        v = rng.randrange(rep.n)
        which = rng.choice("IJ")
        ivs = list(getattr(rep, which))
        end = rng.randrange(2)
        iv = list(ivs[v])
        iv[end] = (iv[end] + rng.choice([-3, -2, -1, 1, 2, 3])) % rep.L
        ivs[v] = tuple(iv)
        yield dataclasses.replace(rep, **{which: tuple(ivs)})


def test_mutations_are_caught_or_still_represent():
    """A mutated representation passes only if it still represents the digraph exactly."""
    rng = random.Random(3)
    rejected = 0
    for h in random_digraphs(80, 3, 6, seed=9):
        res = build_min_ordering(h)
        if not res.is_yes:
            continue
        rep = build_arc_representation(h, res)
        for bad in _mutations(rep, rng):
            ok = verify_arc_representation(h, bad)
            # arcs are exactly the disjoint (I_u, J_v) pairs
            exact = all(
                h.has_arc(u, v) != intervals_meet(bad.I[u], bad.J[v], bad.L) for u in range(h.n) for v in range(h.n)
            )
            if ok:
                assert exact
                lab, orders = generated_order(bad)
                assert verify_k_min_ordering(h, lab, orders)
            else:
                rejected += 1
    assert rejected > 100


def test_pole_shuffle_is_rejected():
    h = Digraph(2, [(0, 1)])
    rep = build_arc_representation(h, [0, 1])
    assert not verify_arc_representation(h, dataclasses.replace(rep, north=rep.south, south=rep.north))
    assert not verify_arc_representation(h, dataclasses.replace(rep, L=rep.L - 1))
    assert not verify_arc_representation(Digraph(3, [(0, 1)]), rep)


@pytest.mark.parametrize("k", range(2, 9))
def test_k_arc_representation_of_cycles(k):
    h = cycle(k)
    res = build_k_min_ordering(h)
    rep = build_arc_representation(h, res)
    assert rep.k == k and len(rep.north) == len(rep.south) == k
    assert verify_arc_representation(h, rep)
    lab, orders = generated_order(rep)
    assert verify_k_min_ordering(h, lab, orders)


def test_k_arc_round_trip_on_random_connected_digraphs():
    done = 0
    for h in random_digraphs(300, 3, 7, seed=5, densities=(0.2, 0.3)):
        if len(weak_components(h)) != 1:
            continue
        res = build_k_min_ordering(h)
        if not res.is_yes:
            continue
        rep = build_arc_representation(h, res)
        assert verify_arc_representation(h, rep)
        lab, orders = generated_order(rep)
        assert verify_k_min_ordering(h, lab, orders)
        done += 1
    assert done > 20


def test_svg_lists_every_interval():
    h = cycle(3)
    svg = to_svg(build_arc_representation(h, build_k_min_ordering(h)))
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    for v in range(3):
        assert f"<title>I{v}</title>" in svg and f"<title>J{v}</title>" in svg
