"""Endotacticity tests.

Single-direction tests, the finite signed-indicator test set that is
complete for first-order networks, an exact complete test for
one-dimensional networks, and one-sided sufficient conditions for the
general case. Every comparison is done in exact rational arithmetic.
"""

from __future__ import annotations

import logging
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterable, Optional, Sequence

from . import graph, linalg
from .errors import PreconditionError, VerificationError
from .network import Reaction, ReactionNetwork, complex_key, dot, reaction_key, sub

log = logging.getLogger(__name__)

Direction = tuple  # tuple[Fraction, ...]

MAX_TEST_SET_DIM = 16

ENDOTACTIC = "endotactic"
VIOLATED = "violated"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class EndoVerdict:
    status: str
    method: str
    direction: Optional[Direction] = None
    reaction: Optional[Reaction] = None
    witnesses: tuple = ()
    details: dict = field(default_factory=dict)

    @property
    def endotactic(self) -> bool:
        return self.status == ENDOTACTIC

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def to_json(self, net: ReactionNetwork) -> dict:
        out: dict = {"status": self.status, "method": self.method, "witness": None}
        if self.direction is not None:
            out["witness"] = {
                "direction": list(self.direction),
                "reaction": None if self.reaction is None else net.format_reaction(self.reaction),
            }
        if self.witnesses:
            out["all_witnesses"] = [
                {"direction": list(u), "reaction": net.format_reaction(r) if r is not None else None}
                for u, r in self.witnesses
            ]
        if self.details:
            out["details"] = self.details
        return out


def as_direction(u: Iterable, d: int) -> Direction:
    u = tuple(Fraction(x) for x in u)
    if len(u) != d:
        raise ValueError(f"direction has length {len(u)}, network has {d} species")
    if not any(u):
        raise ValueError("direction must be nonzero")
    return u


def _require_nonempty(net: ReactionNetwork) -> None:
    if net.is_empty():
        raise PreconditionError("operation needs a nonempty network")


# -- single directions ---------------------------------------------------------

def _integer_direction(u: Direction) -> tuple[int, ...]:
    den = math.lcm(*(c.denominator for c in u))
    return tuple(int(c * den) for c in u)


def _effective(net: ReactionNetwork, u: Direction) -> list[tuple[Reaction, int, int]]:
    """(reaction, u.source, u.vector) for reactions not orthogonal to u, in integer arithmetic."""
    w = _integer_direction(u)
    out = []
    for r, (y, v) in zip(net.reactions, net.lattice()):
        uv = sum(map(operator.mul, w, v))
        if uv:
            out.append((r, sum(map(operator.mul, w, y)), uv))
    return out


def u_support(net: ReactionNetwork, u: Direction) -> list:
    """Sources of reactions not orthogonal to u that maximise y.u among them."""
    eff = _effective(net, u)
    if not eff:
        return []
    top = max(h for _, h, _ in eff)
    return sorted({r.source for r, h, _ in eff if h == top}, key=complex_key)


def violating_reactions(net: ReactionNetwork, u: Direction) -> list[Reaction]:
    """All u-violating reactions, in canonical order."""
    eff = _effective(net, u)
    if not eff:
        return []
    top = max(h for _, h, _ in eff)
    return sorted((r for r, h, uv in eff if h == top and uv > 0), key=reaction_key)


def u_endotactic(net: ReactionNetwork, u: Sequence) -> EndoVerdict:
    _require_nonempty(net)
    u = as_direction(u, net.d)
    bad = violating_reactions(net, u)
    if bad:
        return EndoVerdict(VIOLATED, "direction", u, bad[0])
    return EndoVerdict(ENDOTACTIC, "direction")


def strong_support_ok(net: ReactionNetwork, u: Direction) -> bool:
    """Does the u-support contain a u-maximal source of the whole network?

    A direction orthogonal to every reaction passes vacuously.
    """
    eff = _effective(net, u)
    if not eff:
        return True
    w = _integer_direction(u)
    top_all = max(sum(map(operator.mul, w, y)) for y, _ in net.lattice())
    return max(h for _, h, _ in eff) == top_all


def u_strongly_endotactic(net: ReactionNetwork, u: Sequence) -> EndoVerdict:
    verdict = u_endotactic(net, u)
    if verdict.violated:
        return EndoVerdict(VIOLATED, "direction-strong", verdict.direction, verdict.reaction)
    u = as_direction(u, net.d)
    if not strong_support_ok(net, u):
        return EndoVerdict(VIOLATED, "direction-strong", u, None,
                           details={"reason": "no maximal source among the effective sources"})
    return EndoVerdict(ENDOTACTIC, "direction-strong")


# -- the signed indicator test set ----------------------------------------------

def test_set_A(d: int) -> list[Direction]:
    """All +-(sum of e_i over i in I), nonempty I, subsets by binary counter, + before -."""
    if d <= 0:
        raise ValueError("test set needs at least one species")
    if d > MAX_TEST_SET_DIM:
        raise ValueError(f"test set is capped at d = {MAX_TEST_SET_DIM} (it has 2(2^d - 1) members)")
    one, zero = Fraction(1), Fraction(0)
    out = []
    for mask in range(1, 2**d):
        v = tuple(one if mask >> i & 1 else zero for i in range(d))
        out.append(v)
        out.append(tuple(-c for c in v))
    return out


# keep pytest from collecting the function above as a test
test_set_A.__test__ = False


def _scan_chunk(args) -> list:
    net, directions, strong, collect = args
    found = []
    for u in directions:
        bad = violating_reactions(net, u)
        if bad:
            found.extend((u, r) for r in (bad if collect else bad[:1]))
        elif strong and not strong_support_ok(net, u):
            found.append((u, None))
        if found and not collect:
            break
    return found


def _chunks(seq: list, n: int) -> list[list]:
    size = max(1, -(-len(seq) // n))
    it = iter(seq)
    return [c for c in iter(lambda: list(islice(it, size)), [])]


def scan_directions(
    net: ReactionNetwork,
    directions: Sequence[Direction],
    *,
    strong: bool = False,
    all_witnesses: bool = False,
    jobs: int = 1,
) -> list[tuple[Direction, Optional[Reaction]]]:
    """Violations (direction, reaction) in the order of ``directions``.

    Without ``all_witnesses`` at most one pair is returned: the first
    violation in direction order, whatever the number of workers.
    """
    directions = list(directions)
    if jobs <= 1 or len(directions) < 2 * jobs:
        return _scan_chunk((net, directions, strong, all_witnesses))
    parts = _chunks(directions, jobs * 4)
    found: list = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for res in pool.map(_scan_chunk, [(net, p, strong, all_witnesses) for p in parts]):
            found.extend(res)
            if found and not all_witnesses:
                break
    return found


# -- first-order networks ----------------------------------------------------------

def _check_first_order(net: ReactionNetwork) -> None:
    _require_nonempty(net)
    if not net.is_first_order():
        raise PreconditionError("network has a source of order greater than one")
    if not net.is_integral():
        raise PreconditionError("first-order tests need nonnegative integer complexes")


def structural_report(net: ReactionNetwork) -> dict:
    """Consequences that must hold for an endotactic first-order network."""
    g0, gb = graph.zero_component_split(net)
    supp0, suppb = g0.species_support(), gb.species_support()
    rep = {
        "G0_empty": g0.is_empty(),
        "Gbullet_empty": gb.is_empty(),
        "Gbullet_weakly_reversible": graph.is_weakly_reversible(gb),
        "Gbullet_deficiency": graph.deficiency(gb),
        "species_supports_disjoint": not (supp0 & suppb),
        "G0_strongly_endotactic": None,
    }
    rep["Gbullet_WRDZ"] = rep["Gbullet_weakly_reversible"] and rep["Gbullet_deficiency"] == 0
    if not g0.is_empty():
        # implied by the theory; the signed-indicator strong scan is a consistency check
        rep["G0_strongly_endotactic"] = not scan_directions(g0, test_set_A(net.d), strong=True)
    return rep


def first_order_endotactic(
    net: ReactionNetwork,
    *,
    all_witnesses: bool = False,
    jobs: int = 1,
    check_structure: bool = True,
) -> EndoVerdict:
    """Complete endotacticity decision for first-order networks via the signed indicators."""
    _check_first_order(net)
    found = scan_directions(net, test_set_A(net.d), all_witnesses=all_witnesses, jobs=jobs)
    if found:
        u, r = found[0]
        return EndoVerdict(VIOLATED, "A-scan", u, r, tuple(found) if all_witnesses else ())
    details = structural_report(net) if check_structure else {}
    if check_structure:
        broken = [k for k in ("Gbullet_WRDZ", "species_supports_disjoint") if not details[k]]
        if details["G0_strongly_endotactic"] is False:
            broken.append("G0_strongly_endotactic")
        if broken:
            raise VerificationError(f"endotactic network fails structural consequences: {broken}")
    return EndoVerdict(ENDOTACTIC, "A-scan", details=details)


def _strong_failure_direction(net: ReactionNetwork, block: frozenset, w: Sequence) -> Direction:
    """u = M * 1_block + w, with w a reaction vector living off ``block``.

    Reactions on ``block`` conserve its total, so only reactions seen by w
    are effective, while the sources on ``block`` sit strictly higher.
    """
    top = max((dot(w, y) for y in net.sources), default=Fraction(0))
    M = 1 + max(Fraction(0), top)
    return tuple(M * (1 if i in block else 0) + Fraction(w[i]) for i in range(net.d))


def first_order_strongly_endotactic(net: ReactionNetwork, *, jobs: int = 1) -> EndoVerdict:
    """Complete strong test for first-order networks.

    An endotactic first-order network is strongly endotactic exactly when
    its zero component is everything, or it has no zero component and a
    single strong component. In the remaining cases a direction is built
    that weights one species block of the remainder heavily, and it is
    replayed through the strong single-direction test.
    """
    base = first_order_endotactic(net, jobs=jobs)
    if base.violated:
        return EndoVerdict(VIOLATED, "first-order-strong", base.direction, base.reaction)
    g0, gb = graph.zero_component_split(net)
    blocks = graph.strongly_connected_components(gb)
    if gb.is_empty() or (g0.is_empty() and len(blocks) == 1):
        return EndoVerdict(ENDOTACTIC, "first-order-strong", details=base.details)
    heavy = frozenset(i for y in blocks[0] for i, c in enumerate(y) if c != 0)
    if not g0.is_empty():
        other = g0.reactions[0]
    else:
        second = set(blocks[1])
        other = next(r for r in gb.reactions if r.source in second)
    u = _strong_failure_direction(net, heavy, other.vector)
    if strong_support_ok(net, u):
        raise VerificationError("constructed strong-endotacticity witness does not replay")
    return EndoVerdict(VIOLATED, "first-order-strong", u, None,
                       details={**base.details, "reason": "no maximal source among the effective sources"})


# -- one-dimensional networks ---------------------------------------------------------

def spanning_vector(net: ReactionNetwork) -> Direction:
    basis = graph.stoichiometric_subspace(net).vectors
    if len(basis) != 1:
        raise PreconditionError(f"network has stoichiometric dimension {len(basis)}, not 1")
    return tuple(linalg.primitive(basis[0]))


def _maximal_violation(net: ReactionNetwork, v: Direction, sign: int) -> Optional[tuple[Direction, Reaction]]:
    """Exact search for u with u.(sign v) >= 1 making some sign-v reaction a violation."""
    sources = net.sources
    for r in sorted(net.reactions, key=reaction_key):
        if sign * dot(r.vector, v) <= 0:
            continue
        y = r.source
        cons = [([sign * c for c in v], 1)]
        cons += [(list(sub(y, z)), 0) for z in sources if z != y]
        u = linalg.fm_solve(cons, net.d)
        if u is not None:
            return tuple(linalg.primitive(u)), r
    return None


def one_dim_endotactic(net: ReactionNetwork, *, strong: bool = False) -> EndoVerdict:
    """Complete test for networks whose reaction vectors are all parallel.

    Checks u = v and u = -v first. Because sources may sit at different
    offsets orthogonal to v, those two directions alone can miss a
    violation; an exact Fourier-Motzkin search over all u then settles
    it. Every u not orthogonal to v sees all reactions as effective, so
    the strong variant coincides with the plain one here.
    """
    _require_nonempty(net)
    v = spanning_vector(net)
    method = "one-dim-strong" if strong else "one-dim"
    for u in (v, tuple(-c for c in v)):
        bad = violating_reactions(net, u)
        if bad:
            return EndoVerdict(VIOLATED, method, u, bad[0])
    for sign in (1, -1):
        hit = _maximal_violation(net, v, sign)
        if hit is not None:
            return EndoVerdict(VIOLATED, method, hit[0], hit[1])
    return EndoVerdict(ENDOTACTIC, method)


# -- sufficient conditions ----------------------------------------------------------

def _parallel(a: Sequence, b: Sequence) -> bool:
    return linalg.rank([a, b], len(a)) <= 1


def parallel_continuation(net: ReactionNetwork) -> bool:
    """Every cross-component reaction y->y' is continued by some y'->y'' parallel to it."""
    lir = graph.lir_subgraph(net)
    out: dict = {}
    for r in net.reactions:
        out.setdefault(r.source, []).append(r.vector)
    return all(any(_parallel(r.vector, w) for w in out.get(r.target, [])) for r in lir.reactions)


def sufficient_endotactic(net: ReactionNetwork) -> EndoVerdict:
    """One-sided test: ``endotactic`` when a sufficient condition holds, else ``unknown``."""
    _require_nonempty(net)
    if graph.is_weakly_reversible(net):
        return EndoVerdict(ENDOTACTIC, "weakly-reversible")
    if parallel_continuation(net):
        return EndoVerdict(ENDOTACTIC, "parallel-continuation")
    lir = graph.lir_subgraph(net)
    sub_verdict = None
    if lir.is_first_order() and lir.is_integral():
        sub_verdict = first_order_endotactic(lir, check_structure=False)
    elif graph.stoichiometric_dim(lir) == 1:
        sub_verdict = one_dim_endotactic(lir)
    if sub_verdict is not None and sub_verdict.endotactic:
        return EndoVerdict(ENDOTACTIC, "lir-subgraph", details={"lir_method": sub_verdict.method})
    return EndoVerdict(UNKNOWN, "sufficient-conditions")


def analyze(net: ReactionNetwork, *, strong: bool = False, all_witnesses: bool = False, jobs: int = 1) -> EndoVerdict:
    """Best available verdict for any network.

    First-order integer networks and one-dimensional networks get a
    complete decision. Otherwise a violation found on a signed indicator
    is a definite refutation; failing that the sufficient conditions are
    tried and the answer may be ``unknown``.
    """
    _require_nonempty(net)
    if net.is_first_order() and net.is_integral():
        if strong:
            return first_order_strongly_endotactic(net, jobs=jobs)
        return first_order_endotactic(net, all_witnesses=all_witnesses, jobs=jobs)
    if graph.stoichiometric_dim(net) == 1:
        return one_dim_endotactic(net, strong=strong)
    if net.d <= MAX_TEST_SET_DIM:
        found = scan_directions(net, test_set_A(net.d), strong=strong, all_witnesses=all_witnesses, jobs=jobs)
        if found:
            u, r = found[0]
            return EndoVerdict(VIOLATED, "A-refutation", u, r, tuple(found) if all_witnesses else ())
    if strong:
        return EndoVerdict(UNKNOWN, "sufficient-conditions")
    return sufficient_endotactic(net)
