"""Shared fixtures-as-functions: paper networks, random generators, oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from crnkit.netparse import parse_network
from crnkit.network import Reaction, ReactionNetwork, unit_complex, zero_complex

EX11_TEXT = "S2 -> S1 [2]; S1 -> 0 [2]; 0 -> S1 + S2 [2]; S3 -> S4; S4 -> S5; S5 -> S3 [2]"
SPECIES5 = ["S1", "S2", "S3", "S4", "S5"]


def P(text: str) -> ReactionNetwork:
    return parse_network(text)


def ex11() -> ReactionNetwork:
    """Introductory example with species in S1..S5 order."""
    return P(EX11_TEXT).with_species_order(SPECIES5)


def ordered(text: str, species) -> ReactionNetwork:
    return P(text).with_species_order(species)


# -- random first-order networks ---------------------------------------------------

def _rand_complex(rng: random.Random, d: int, max_norm: int = 2):
    y = [0] * d
    for _ in range(rng.randint(0, max_norm)):
        y[rng.randrange(d)] += 1
    return tuple(Fraction(c) for c in y)


def random_first_order(rng: random.Random, d: int | None = None) -> ReactionNetwork:
    """A random first-order network; about half are built to be weakly reversible."""
    d = d or rng.randint(1, 5)
    names = [f"S{i + 1}" for i in range(d)]
    mono = [zero_complex(d)] + [unit_complex(d, i) for i in range(d)]
    edges: dict = {}
    style = rng.random()
    if style < 0.5:
        # random weakly reversible monomolecular graph: union of random cycles
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(2, min(4, d + 1))
            cyc = rng.sample(mono, k)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                edges[(a, b)] = Fraction(rng.randint(1, 9), rng.randint(1, 3))
        if style < 0.2:
            # split some influx 0 -> S_k into 0 -> S_k + S_j style targets
            zero = zero_complex(d)
            for (a, b) in list(edges):
                if a == zero and rng.random() < 0.5:
                    tgt = tuple(x + y for x, y in zip(b, _rand_complex(rng, d, 1)))
                    if tgt != a and (a, tgt) not in edges:
                        edges[(a, tgt)] = edges.pop((a, b))
    else:
        for _ in range(rng.randint(1, 2 * d + 2)):
            src = rng.choice(mono)
            tgt = _rand_complex(rng, d)
            if tgt != src:
                edges[(src, tgt)] = Fraction(rng.randint(1, 9), rng.randint(1, 3))
    if not edges:
        edges[(zero_complex(d), unit_complex(d, 0))] = Fraction(1)
    return ReactionNetwork(names, [Reaction(a, b, k) for (a, b), k in edges.items()])


@st.composite
def first_order_networks(draw, max_d: int = 4):
    seed = draw(st.integers(0, 2**32 - 1))
    d = draw(st.integers(1, max_d))
    return random_first_order(random.Random(seed), d)


@st.composite
def rational_networks(draw, max_d: int = 3, max_edges: int = 5):
    """Arbitrary networks with small rational coordinates and rates."""
    d = draw(st.integers(1, max_d))
    coord = st.fractions(min_value=0, max_value=3, max_denominator=3)
    cplx = st.tuples(*[coord] * d)
    pairs = draw(st.lists(st.tuples(cplx, cplx), min_size=1, max_size=max_edges))
    edges = {}
    for a, b in pairs:
        if a != b:
            edges[(a, b)] = draw(st.fractions(min_value=Fraction(1, 10), max_value=50, max_denominator=20)
                                 .filter(lambda q: q > 0))
    if not edges:
        edges[(zero_complex(d), unit_complex(d, 0))] = Fraction(1)
    return ReactionNetwork([f"X{i}" for i in range(d)], [Reaction(a, b, k) for (a, b), k in edges.items()])


# -- oracles -------------------------------------------------------------------------------

def brute_force_in_trees(n: int, weights: dict) -> list[float]:
    """Sum over spanning in-trees rooted at each vertex of the product of edge weights.

    ``weights`` maps (i, j) -> rate of edge i -> j. Each non-root vertex
    picks one out-edge; the choice is an in-tree iff following the picks
    from every vertex reaches the root.
    """
    out = {i: [(j, w) for (a, j), w in weights.items() if a == i] for i in range(n)}
    totals = []
    for root in range(n):
        others = [i for i in range(n) if i != root]
        total = 0.0
        for picks in itertools.product(*[out[i] for i in others]):
            nxt = {i: j for i, (j, _) in zip(others, picks)}
            ok = True
            for start in others:
                seen, v = set(), start
                while v != root:
                    if v in seen:
                        ok = False
                        break
                    seen.add(v)
                    v = nxt[v]
                if not ok:
                    break
            if ok:
                prod = 1.0
                for _, w in picks:
                    prod *= w
                total += prod
        totals.append(total)
    return totals


def random_strongly_connected(rng: random.Random, n: int) -> dict:
    perm = list(range(n))
    rng.shuffle(perm)
    weights = {}
    for a, b in zip(perm, perm[1:] + perm[:1]):
        if a != b:
            weights[(a, b)] = rng.uniform(0.1, 10.0)
    for _ in range(rng.randint(0, n * (n - 1) // 2)):
        a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if a != b:
            weights[(a, b)] = rng.uniform(0.1, 10.0)
    return weights


def network_from_weights(n: int, weights: dict) -> ReactionNetwork:
    """Monomolecular network on species S1..Sn with the given edge weights."""
    rs = [Reaction(unit_complex(n, a), unit_complex(n, b), Fraction(w)) for (a, b), w in weights.items()]
    return ReactionNetwork([f"S{i + 1}" for i in range(n)], rs)
