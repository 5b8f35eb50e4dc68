"""Core value types: complexes, reactions and reaction networks.

A complex is a tuple of exact rationals (one entry per species). Rate
constants are also kept as ``Fraction`` so that flux identities can be
checked exactly; numerical code converts them with ``float()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Complex = tuple  # tuple[Fraction, ...]


def as_complex(coords: Iterable) -> Complex:
    return tuple(Fraction(c) for c in coords)


def zero_complex(d: int) -> Complex:
    return (Fraction(0),) * d


def unit_complex(d: int, i: int) -> Complex:
    """The complex consisting of a single molecule of species ``i`` (0-based)."""
    return tuple(Fraction(1 if j == i else 0) for j in range(d))


def norm1(y: Sequence) -> Fraction:
    return sum((abs(c) for c in y), Fraction(0))


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> Complex:
    return tuple(Fraction(x) - y for x, y in zip(a, b))


def complex_key(y: Complex):
    """Canonical ordering: by molecularity, then S1 before S2 before ..."""
    return (norm1(y), tuple(-c for c in y))


def is_integral(y: Complex) -> bool:
    return all(c.denominator == 1 and c >= 0 for c in y)


def support(y: Sequence) -> frozenset[int]:
    return frozenset(i for i, c in enumerate(y) if c != 0)


@dataclass(frozen=True)
class Reaction:
    source: Complex
    target: Complex
    rate: Fraction = Fraction(1)

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise ValueError("source and target live in different dimensions")
        if self.source == self.target:
            raise ValueError("a reaction needs distinct source and target")
        if not self.rate > 0:
            raise ValueError(f"rate constant must be positive, got {self.rate}")

    @property
    def vector(self) -> Complex:
        return sub(self.target, self.source)

    @property
    def order(self) -> Fraction:
        return norm1(self.source)

    @property
    def edge(self) -> tuple[Complex, Complex]:
        return (self.source, self.target)


def reaction_key(r: Reaction):
    return (complex_key(r.source), complex_key(r.target))


class ReactionNetwork:
    """A weighted reaction graph over a fixed, ordered list of species.

    Equality compares the species list and the weighted edge set; the
    insertion order of reactions is kept only so that serialization is
    stable.
    """

    __slots__ = ("_species", "_reactions", "_rates", "_lattice")

    def __init__(self, species: Sequence[str], reactions: Iterable[Reaction] = ()):
        self._species = tuple(species)
        if len(set(self._species)) != len(self._species):
            raise ValueError("species names must be unique")
        d = len(self._species)
        rates: dict[tuple[Complex, Complex], Fraction] = {}
        kept = []
        for r in reactions:
            if len(r.source) != d:
                raise ValueError(f"reaction has dimension {len(r.source)}, network has {d} species")
            if r.edge in rates:
                raise ValueError("duplicate edge " + self.format_reaction(r))
            rates[r.edge] = Fraction(r.rate)
            kept.append(r)
        self._reactions = tuple(kept)
        self._rates = rates
        self._lattice = None

    # -- basic accessors -------------------------------------------------
    @property
    def species(self) -> tuple[str, ...]:
        return self._species

    @property
    def d(self) -> int:
        return len(self._species)

    @property
    def reactions(self) -> tuple[Reaction, ...]:
        return self._reactions

    def sorted_reactions(self) -> list[Reaction]:
        return sorted(self._reactions, key=reaction_key)

    @property
    def vertices(self) -> list[Complex]:
        vs = {y for r in self._reactions for y in r.edge}
        return sorted(vs, key=complex_key)

    @property
    def sources(self) -> list[Complex]:
        return sorted({r.source for r in self._reactions}, key=complex_key)

    def rate(self, source: Complex, target: Complex) -> Fraction:
        return self._rates[(source, target)]

    def has_edge(self, source: Complex, target: Complex) -> bool:
        return (source, target) in self._rates

    def __len__(self) -> int:
        return len(self._reactions)

    def __iter__(self) -> Iterator[Reaction]:
        return iter(self._reactions)

    def is_empty(self) -> bool:
        return not self._reactions

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReactionNetwork):
            return NotImplemented
        return self._species == other._species and self._rates == other._rates

    def __hash__(self) -> int:
        return hash((self._species, frozenset(self._rates.items())))

    def __repr__(self) -> str:
        body = "; ".join(self.format_reaction(r) for r in self._reactions)
        return f"ReactionNetwork({list(self._species)}, [{body}])"

    def lattice(self) -> tuple[tuple[int, ...], ...]:
        """Per reaction, the source and reaction vector as one integer tuple each.

        All coordinates are multiplied by the common denominator, a
        positive factor, so every sign and order comparison of dot
        products is unchanged. Cached; the network is immutable.
        """
        if self._lattice is None:
            den = math.lcm(1, *(c.denominator for r in self._reactions for y in r.edge for c in y))
            self._lattice = tuple(
                (tuple(int(c * den) for c in r.source), tuple(int(c * den) for c in r.vector))
                for r in self._reactions
            )
        return self._lattice

    # -- derived structure ----------------------------------------------
    @property
    def zero(self) -> Complex:
        return zero_complex(self.d)

    def order(self) -> Fraction:
        """Largest source molecularity (the order of the network)."""
        if not self._reactions:
            raise ValueError("the empty network has no order")
        return max(r.order for r in self._reactions)

    def net_order(self) -> Fraction:
        if not self._reactions:
            raise ValueError("the empty network has no net order")
        return max(norm1(y) for y in self.vertices)

    def is_first_order(self) -> bool:
        return all(r.order <= 1 for r in self._reactions)

    def is_integral(self) -> bool:
        return all(is_integral(y) for y in self.vertices)

    def is_monomolecular(self) -> bool:
        return self.is_integral() and all(norm1(y) <= 1 for y in self.vertices)

    def species_support(self) -> frozenset[int]:
        out: set[int] = set()
        for y in self.vertices:
            out |= support(y)
        return frozenset(out)

    def subnetwork(self, reactions: Iterable[Reaction]) -> "ReactionNetwork":
        return ReactionNetwork(self._species, reactions)

    def with_reactions(self, reactions: Iterable[Reaction]) -> "ReactionNetwork":
        return ReactionNetwork(self._species, reactions)

    def lift(self, species: Sequence[str]) -> "ReactionNetwork":
        """Re-embed into a species list containing all current species (any order)."""
        missing = [s for s in self._species if s not in species]
        if missing:
            raise ValueError(f"target species list lacks {missing}")
        pos = [list(species).index(s) for s in self._species]

        def move(y: Complex) -> Complex:
            out = [Fraction(0)] * len(species)
            for p, c in zip(pos, y):
                out[p] = c
            return tuple(out)

        return ReactionNetwork(species, (Reaction(move(r.source), move(r.target), r.rate) for r in self._reactions))

    def with_species_order(self, species: Sequence[str]) -> "ReactionNetwork":
        """Permute the species axes; ``species`` must be a permutation of the current list."""
        if sorted(species) != sorted(self._species):
            raise ValueError("not a permutation of the network's species")
        return self.lift(species)

    # -- formatting ------------------------------------------------------
    def format_complex(self, y: Complex) -> str:
        terms = []
        for name, c in zip(self._species, y):
            if c == 0:
                continue
            terms.append(name if c == 1 else f"{c} {name}")
        return " + ".join(terms) if terms else "0"

    def format_reaction(self, r: Reaction) -> str:
        return f"{self.format_complex(r.source)} -> {self.format_complex(r.target)}"


def format_number(q: Fraction) -> str:
    """Exact text for a rational: integer, terminating decimal, or p/q."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = q * 10**digits
        sign = "-" if scaled < 0 else ""
        s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        return f"{sign}{s[:-digits]}.{s[-digits:]}"
    return f"{q.numerator}/{q.denominator}"
