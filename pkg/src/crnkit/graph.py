"""Combinatorial structure of reaction graphs.

Components, subgraph extractions (zero component, remainder, linkage
inter-component reactions, highest-order part), deficiency, the
stoichiometric subspace and conservation laws, and the J/K/L index sets
used in the first-order theory.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import networkx as nx

from . import linalg
from .network import Complex, ReactionNetwork, complex_key, unit_complex

log = logging.getLogger(__name__)

Block = list  # list[Complex], sorted canonically


def digraph(net: ReactionNetwork) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(net.vertices)
    for r in net.reactions:
        g.add_edge(r.source, r.target, rate=r.rate)
    return g


def _canonical_blocks(groups) -> list[Block]:
    blocks = [sorted(b, key=complex_key) for b in groups]
    blocks.sort(key=lambda b: complex_key(b[0]))
    return blocks


def strongly_connected_components(net: ReactionNetwork) -> list[Block]:
    """SCC partition; blocks and their members in canonical complex order."""
    return _canonical_blocks(nx.strongly_connected_components(digraph(net)))


def weakly_connected_components(net: ReactionNetwork) -> list[Block]:
    return _canonical_blocks(nx.weakly_connected_components(digraph(net)))


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    # every edge inside an SCC <=> every WCC is strongly connected
    comp = _component_index(strongly_connected_components(net))
    return all(comp[r.source] == comp[r.target] for r in net.reactions)


def _component_index(blocks: list[Block]) -> dict[Complex, int]:
    return {y: i for i, b in enumerate(blocks) for y in b}


# -- linear structure --------------------------------------------------------

@dataclass(frozen=True)
class SubspaceBasis:
    vectors: list
    role: str
    positive_vector: Optional[list] = None

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def to_json(self) -> dict:
        out = {"role": self.role, "dim": self.dim, "vectors": [list(v) for v in self.vectors]}
        if self.role == "conservation":
            out["positive_vector"] = None if self.positive_vector is None else list(self.positive_vector)
        return out


def reaction_vectors(net: ReactionNetwork) -> list[Complex]:
    return [r.vector for r in net.reactions]


def stoichiometric_subspace(net: ReactionNetwork) -> SubspaceBasis:
    vecs = reaction_vectors(net)
    basis = linalg.row_space_basis(vecs, net.d) if vecs else []
    return SubspaceBasis([tuple(v) for v in basis], "stoichiometric")


def stoichiometric_dim(net: ReactionNetwork) -> int:
    vecs = reaction_vectors(net)
    return linalg.rank(vecs, net.d) if vecs else 0


def positive_in_span(basis: list, d: int) -> Optional[list[Fraction]]:
    """A vector w = sum(lam_j * basis_j) with every w_i >= 1, or None."""
    if d == 0 or not basis:
        return None
    cons = [([b[i] for b in basis], 1) for i in range(d)]
    lam = linalg.fm_solve(cons, len(basis))
    if lam is None:
        return None
    w = [sum((l * b[i] for l, b in zip(lam, basis)), Fraction(0)) for i in range(d)]
    return linalg.primitive(w)


def conservation_laws(net: ReactionNetwork) -> SubspaceBasis:
    """Basis of the orthogonal complement of the stoichiometric subspace.

    Also searches, by exact Fourier-Motzkin elimination on the basis
    coefficients, for a strictly positive member.
    """
    basis = [tuple(v) for v in linalg.null_space_basis(reaction_vectors(net), net.d)]
    positive = positive_in_span(basis, net.d)
    return SubspaceBasis(basis, "conservation", None if positive is None else tuple(positive))


# -- deficiency -----------------------------------------------------------------

@dataclass(frozen=True)
class DeficiencyReport:
    vertices: int
    dim: int
    nontrivial_sccs: int
    linkage_classes: int

    @property
    def paper(self) -> int:
        """#V - dim S - (number of SCCs with at least two vertices)."""
        return self.vertices - self.dim - self.nontrivial_sccs

    @property
    def classical(self) -> int:
        """#V - dim S - (number of linkage classes)."""
        return self.vertices - self.dim - self.linkage_classes

    def to_json(self) -> dict:
        out = {
            "deficiency_paper": self.paper,
            "deficiency_classical": self.classical,
            "vertices": self.vertices,
            "stoichiometric_dim": self.dim,
            "sccs_with_two_or_more_vertices": self.nontrivial_sccs,
            "linkage_classes": self.linkage_classes,
        }
        if self.paper < 0:
            out["warning"] = "negative deficiency under the SCC-count definition (graph is not weakly reversible)"
        return out


def deficiency_report(net: ReactionNetwork) -> DeficiencyReport:
    sccs = strongly_connected_components(net)
    return DeficiencyReport(
        vertices=len(net.vertices),
        dim=stoichiometric_dim(net),
        nontrivial_sccs=sum(1 for b in sccs if len(b) >= 2),
        linkage_classes=len(weakly_connected_components(net)),
    )


def deficiency(net: ReactionNetwork) -> int:
    """Deficiency with the strong-component count; reported unclamped."""
    rep = deficiency_report(net)
    if rep.paper < 0:
        log.warning("deficiency %d is negative: the network is not weakly reversible", rep.paper)
    return rep.paper


def classical_deficiency(net: ReactionNetwork) -> int:
    return deficiency_report(net).classical


# -- subgraph extraction --------------------------------------------------------

def zero_component_split(net: ReactionNetwork) -> tuple[ReactionNetwork, ReactionNetwork]:
    """(G0, Gbullet): the weak component holding the zero complex, and the rest."""
    zero = net.zero
    comp: set = set()
    for b in weakly_connected_components(net):
        if zero in b:
            comp = set(b)
    g0 = [r for r in net.reactions if r.source in comp]
    rest = [r for r in net.reactions if r.source not in comp]
    return net.subnetwork(g0), net.subnetwork(rest)


def lir_subgraph(net: ReactionNetwork) -> ReactionNetwork:
    """Reactions whose endpoints lie in different strongly connected components."""
    comp = _component_index(strongly_connected_components(net))
    return net.subnetwork(r for r in net.reactions if comp[r.source] != comp[r.target])


def highest_order_subgraph(net: ReactionNetwork) -> ReactionNetwork:
    top = net.order()
    return net.subnetwork(r for r in net.reactions if r.order == top)


def is_homogeneous(net: ReactionNetwork) -> bool:
    return highest_order_subgraph(net) == net


# -- first-order index sets -----------------------------------------------------

@dataclass(frozen=True)
class JKLSets:
    """Index sets (0-based) J, K, L for a first-order network containing 0."""

    J: frozenset
    K: frozenset
    L: frozenset

    def names(self, species) -> dict:
        return {k: [species[i] for i in sorted(getattr(self, k))] for k in ("J", "K", "L")}


def _reach_plus(g: nx.DiGraph, v) -> set:
    """Vertices reachable from v by a path with at least one edge."""
    out: set = set()
    for w in g.successors(v):
        out.add(w)
        out |= nx.descendants(g, w)
    return out


def jkl_sets(net: ReactionNetwork) -> JKLSets:
    if not net.is_first_order():
        raise ValueError("J/K/L sets need a first-order network")
    zero = net.zero
    g = digraph(net)
    if zero not in g:
        raise ValueError("the zero complex is not a vertex")
    d = net.d
    J = frozenset(j for j in range(d)
                  if unit_complex(d, j) in g and zero in _reach_plus(g, unit_complex(d, j)))
    K = frozenset(i for y in _reach_plus(g, zero) for i, c in enumerate(y) if c != 0)
    reach = {k: _reach_plus(g, unit_complex(d, k)) if unit_complex(d, k) in g else set() for k in K}
    L = frozenset(l for l in J - K if all(unit_complex(d, l) in reach[k] for k in K))
    return JKLSets(J, K, L)


# -- joint ------------------------------------------------------------------------

def joint(a: ReactionNetwork, b: ReactionNetwork) -> tuple[ReactionNetwork, bool]:
    """Union of two networks; rates of a shared edge are added.

    Networks over different species lists are first lifted to the union
    of their species (a's order, then b's new species). Returns the joint
    and whether the inputs had disjoint vertex and edge sets.
    """
    if a.species != b.species:
        species = list(a.species) + [s for s in b.species if s not in a.species]
        a, b = a.lift(species), b.lift(species)
    disjoint = not (set(a.vertices) & set(b.vertices)) and not any(b.has_edge(*r.edge) for r in a)
    merged = {r.edge: r for r in a.reactions}
    order = [r.edge for r in a.reactions]
    for r in b.reactions:
        if r.edge in merged:
            old = merged[r.edge]
            merged[r.edge] = type(r)(r.source, r.target, old.rate + r.rate)
        else:
            merged[r.edge] = r
            order.append(r.edge)
    return ReactionNetwork(a.species, (merged[e] for e in order)), disjoint


# -- reporting helpers ----------------------------------------------------------

def complex_json(net: ReactionNetwork, y: Complex) -> str:
    return net.format_complex(y)


def blocks_json(net: ReactionNetwork, blocks: list[Block]) -> list[list[str]]:
    return [[net.format_complex(y) for y in b] for b in blocks]


def edges_json(net: ReactionNetwork) -> list[str]:
    return [net.format_reaction(r) for r in net.sorted_reactions()]
