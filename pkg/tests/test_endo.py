import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnkit import endo, graph
from crnkit.errors import PreconditionError
from crnkit.network import ReactionNetwork

from helpers import P, ex11, first_order_networks, ordered, random_first_order

F = Fraction


def random_direction(rng: random.Random, d: int) -> tuple:
    while True:
        u = tuple(F(rng.randint(-5, 5)) + F(rng.randint(0, 5), rng.randint(1, 6)) * rng.choice((-1, 1))
                  for _ in range(d))
        if any(u):
            return u


def _endotactic_nets(seed: int, count: int, d: int | None = None):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        net = random_first_order(rng, d)
        if endo.first_order_endotactic(net).endotactic:
            out.append(net)
    return out


# -- fixed examples -----------------------------------------------------------------

def test_example11_endotactic_with_structure():
    v = endo.first_order_endotactic(ex11())
    assert v.endotactic
    assert v.details["Gbullet_WRDZ"] is True
    assert v.details["G0_strongly_endotactic"] is True
    assert v.details["species_supports_disjoint"] is True


def test_example11_not_strongly_endotactic():
    v = endo.first_order_strongly_endotactic(ex11())
    assert v.violated
    assert v.direction == (1, -1, 2, 2, 2)
    assert endo.u_strongly_endotactic(ex11(), v.direction).violated
    assert endo.u_endotactic(ex11(), v.direction).endotactic


def test_golden_positive():
    assert endo.analyze(P("S1 -> S2; S2 -> 0; 0 -> 2S1")).endotactic


@pytest.mark.parametrize("text", [
    "S1 -> S2; S2 -> 0; 0 -> 2S2",
    "S2 -> 0; 0 -> S1; 2S1 -> S1",
    "S2 -> 0; 0 -> 2S1; S1 -> 0; 2S1 -> S1",
])
def test_golden_negatives(text):
    net = ordered(text, ["S1", "S2"])
    v = endo.analyze(net)
    assert v.violated
    assert endo.u_endotactic(net, v.direction).violated


def test_example53_refuted_by_minus_e2():
    net = ordered("S2 -> 0; 0 -> 2S1; S1 -> 0; 2S1 -> S1", ["S1", "S2"])
    v = endo.u_endotactic(net, (0, -1))
    assert v.violated and net.format_reaction(v.reaction) == "S2 -> 0"


def test_example45_is_endotactic():
    net = P("0 -> S1; S1 -> 2S1; 2S1 -> 3S1; 3S1 -> S1")
    assert endo.analyze(net).endotactic
    assert endo.sufficient_endotactic(net).endotactic


def test_example49_sufficient_conditions():
    # the cross-component edge 0 -> S1 is continued by the parallel S1 -> 2S1
    net = P("0 -> S1; S1 <-> 2S1")
    v = endo.sufficient_endotactic(net)
    assert v.status == "endotactic" and v.method == "parallel-continuation"
    assert endo.one_dim_endotactic(net).endotactic


def test_sufficient_unknown_exists():
    # higher order, 2-D, not weakly reversible, nothing parallel, lir is the whole graph
    assert endo.sufficient_endotactic(P("2A -> A + B; A + B -> 2B; 3B -> 3A")).status == "unknown"


def test_minimality_exhibit_d1():
    for text, passing in (("S1 -> 0", (1,)), ("0 -> S1", (-1,))):
        net = P(text)
        results = {u: endo.u_endotactic(net, u).endotactic for u in endo.test_set_A(1)}
        assert results == {u: u == passing for u in results}


def test_one_dim_needs_more_than_spanning_directions():
    net = ordered("0 -> S1; 2S1 + S2 -> S1 + S2", ["S1", "S2"])
    v = endo.spanning_vector(net)
    assert endo.u_endotactic(net, v).endotactic
    assert endo.u_endotactic(net, tuple(-c for c in v)).endotactic
    verdict = endo.one_dim_endotactic(net)
    assert verdict.violated
    assert endo.u_endotactic(net, verdict.direction).violated
    assert endo.u_endotactic(net, (1, -2)).violated


def test_one_dim_positive():
    net = P("0 <-> S1; S1 + S2 -> 2S1 + S2; 2S1 + S2 -> S2")
    assert endo.one_dim_endotactic(net).endotactic


def test_preconditions():
    with pytest.raises(PreconditionError):
        endo.first_order_endotactic(P("2A -> B"))
    with pytest.raises(PreconditionError):
        endo.first_order_endotactic(ReactionNetwork(["A"], []))
    with pytest.raises(PreconditionError):
        endo.one_dim_endotactic(P("A -> B; B -> C"))
    with pytest.raises(ValueError):
        endo.test_set_A(17)
    with pytest.raises(ValueError):
        endo.u_endotactic(P("A -> B"), (0, 0))
    assert len(endo.test_set_A(3)) == 2 * (2**3 - 1)


def test_orthogonal_direction_passes_vacuously():
    net = P("A -> B; B -> A")
    assert endo.u_strongly_endotactic(net, (1, 1)).endotactic


def test_all_witnesses_and_jobs_determinism():
    net = P("0 -> A; A -> 2A; B -> A + B; 0 -> B")
    one = endo.first_order_endotactic(net)
    par = endo.first_order_endotactic(net, jobs=3)
    assert one == par and one.violated
    every = endo.first_order_endotactic(net, all_witnesses=True)
    assert every.witnesses[0] == (one.direction, one.reaction)
    assert every.witnesses == endo.first_order_endotactic(net, all_witnesses=True, jobs=3).witnesses
    for u, r in every.witnesses:
        assert r in endo.violating_reactions(net, u)


def test_verdict_json():
    net = P("0 -> S1")
    doc = endo.analyze(net).to_json(net)
    assert doc["status"] == "violated"
    assert doc["witness"] == {"direction": [1], "reaction": "0 -> S1"}


# -- properties -----------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(first_order_networks(max_d=5), st.integers(0, 2**32 - 1))
def test_witness_replay_and_random_directions(net, seed):
    v = endo.first_order_endotactic(net, check_structure=False)
    if v.violated:
        assert endo.u_endotactic(net, v.direction).violated
        assert v.reaction in endo.violating_reactions(net, v.direction)
    else:
        rng = random.Random(seed)
        for _ in range(100):
            assert endo.u_endotactic(net, random_direction(rng, net.d)).endotactic


@settings(max_examples=150, deadline=None)
@given(first_order_networks(max_d=4))
def test_structure_never_broken(net):
    # raises VerificationError if the structural consequences fail
    endo.first_order_endotactic(net)


@settings(max_examples=150, deadline=None)
@given(first_order_networks(max_d=4), st.integers(0, 2**32 - 1))
def test_strong_decision_is_sound(net, seed):
    v = endo.first_order_strongly_endotactic(net)
    if v.violated:
        assert endo.u_strongly_endotactic(net, v.direction).violated
    else:
        rng = random.Random(seed)
        for _ in range(100):
            assert endo.u_strongly_endotactic(net, random_direction(rng, net.d)).endotactic


def test_joint_preserves_endotacticity():
    rng = random.Random(5)
    for d in (1, 2, 3, 4):
        nets = _endotactic_nets(100 + d, 12, d)
        for _ in range(15):
            a, b = rng.sample(nets, 2)
            j, _ = graph.joint(a, b)
            assert endo.first_order_endotactic(j).endotactic


def _without_zero(net: ReactionNetwork) -> ReactionNetwork:
    z = net.zero
    return net.with_reactions(r for r in net.reactions if z not in (r.source, r.target))


def test_subtraction_along_disjoint_supports():
    rng = random.Random(9)
    checked = 0
    for _ in range(300):
        da, db = rng.randint(1, 3), rng.randint(1, 3)
        a = random_first_order(rng, da)
        b = _without_zero(random_first_order(rng, db))
        if b.is_empty():
            continue
        names = [f"S{i + 1}" for i in range(da + db)]
        a = ReactionNetwork(names[:da], a.reactions).lift(names)
        b = ReactionNetwork(names[da:], b.reactions)
        b = b.lift(names[:da] + list(b.species)).with_species_order(names)
        whole, disjoint = graph.joint(a, b)
        assert disjoint
        parts = [endo.first_order_endotactic(x, check_structure=False).endotactic for x in (a, b)]
        assert endo.first_order_endotactic(whole, check_structure=False).endotactic == all(parts)
        checked += 1
    assert checked > 100


@settings(max_examples=200, deadline=None)
@given(first_order_networks(max_d=5))
def test_homogeneity_trichotomy(net):
    ones = tuple(F(1) for _ in range(net.d))
    if not all(endo.u_endotactic(net, s).endotactic for s in (ones, tuple(-c for c in ones))):
        return
    no_zero = net.zero not in set(net.vertices)
    conserved = all(sum(r.vector) == 0 for r in net.reactions)
    homogeneous = graph.is_homogeneous(net)
    assert no_zero == conserved == homogeneous


def test_lir_of_example11_is_endotactic():
    lir = graph.lir_subgraph(ex11())
    assert endo.first_order_endotactic(lir, check_structure=False).endotactic
