from __future__ import annotations

import random

from hypothesis import strategies as st

from biarc.digraph import Digraph


def all_digraphs(n: int):
    """Every labelled digraph on n vertices, loops included."""
    cells = [(u, v) for u in range(n) for v in range(n)]
    for bits in range(1 << len(cells)):
        yield Digraph(n, [c for i, c in enumerate(cells) if bits >> i & 1])


def small_corpus():
    for n in range(1, 4):
        yield from all_digraphs(n)


def random_digraphs(count: int, n_lo: int, n_hi: int, seed: int, densities=(0.15, 0.25, 0.35, 0.5)):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(n_lo, n_hi)
        d = rng.choice(densities)
        yield Digraph(n, [(u, v) for u in range(n) for v in range(n) if rng.random() < d])


def cycle(q: int) -> Digraph:
    return Digraph(q, [(i, (i + 1) % q) for i in range(q)])


@st.composite
def digraphs(draw, max_n: int = 6, min_n: int = 1):
    n = draw(st.integers(min_n, max_n))
    cells = [(u, v) for u in range(n) for v in range(n)]
    mask = draw(st.lists(st.booleans(), min_size=len(cells), max_size=len(cells)))
    return Digraph(n, [c for c, keep in zip(cells, mask) if keep])
