"""Linear mass-action kinetics of first-order networks.

For a first-order network the mass-action ODE is linear, x' = xA + b
with row vectors. This module builds (A, b) exactly, inspects the
spectrum, computes Matrix-Tree constants, builds the monomolecular
strong realization, and assembles equilibria class by class.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from . import graph, linalg
from .endo import EndoVerdict, first_order_endotactic
from .errors import PreconditionError, VerificationError
from .network import Complex, Reaction, ReactionNetwork, complex_key, norm1, unit_complex

log = logging.getLogger(__name__)

ZERO_EIG_TOL = 1e-9
RESIDUAL_TOL = 1e-10


def _require_first_order(net: ReactionNetwork) -> None:
    if not net.is_first_order():
        raise PreconditionError("network has a source of order greater than one")
    if not net.is_integral():
        raise PreconditionError("linear kinetics needs nonnegative integer complexes")


# -- flux system ------------------------------------------------------------------

@dataclass(frozen=True)
class FluxSystem:
    """x' = xA + b. ``A_exact``/``b_exact`` hold the rational entries."""

    A_exact: tuple
    b_exact: tuple
    net: ReactionNetwork

    @property
    def A(self) -> np.ndarray:
        return np.array([[float(a) for a in row] for row in self.A_exact], dtype=float).reshape(self.d, self.d)

    @property
    def b(self) -> np.ndarray:
        return np.array([float(x) for x in self.b_exact], dtype=float)

    @property
    def d(self) -> int:
        return len(self.b_exact)

    def rhs(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.A + self.b

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A_exact], "b": list(self.b_exact)}


def flux_system(net: ReactionNetwork) -> FluxSystem:
    _require_first_order(net)
    d = net.d
    A = [[Fraction(0)] * d for _ in range(d)]
    b = [Fraction(0)] * d
    for r in net.reactions:
        if r.order == 0:
            for i in range(d):
                b[i] += r.rate * r.target[i]
        else:
            i = next(j for j, c in enumerate(r.source) if c != 0)
            for j, c in enumerate(r.vector):
                A[i][j] += r.rate * c
    for i in range(d):
        for j in range(d):
            if i != j and A[i][j] < 0:
                raise VerificationError(f"flux matrix is not Metzler at ({i}, {j})")
    if any(x < 0 for x in b):
        raise VerificationError("influx vector has a negative entry")
    return FluxSystem(tuple(tuple(row) for row in A), tuple(b), net)


# -- diagonal dominance -------------------------------------------------------------

def is_wcdd(A) -> bool:
    """Weakly chained diagonal dominance (exact for rational input)."""
    rows = [list(r) for r in A]
    n = len(rows)
    if n == 0:
        return False
    off = [sum(abs(rows[i][j]) for j in range(n) if j != i) for i in range(n)]
    if any(abs(rows[i][i]) < off[i] for i in range(n)):
        return False
    sdd = {i for i in range(n) if abs(rows[i][i]) > off[i]}
    if not sdd:
        return False
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if i != j and rows[i][j] != 0)
    return all(i in sdd or nx.descendants(g, i) & sdd for i in range(n))


# -- spectrum -----------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple
    spectral_abscissa: float
    rho: Optional[float]
    n: int
    zero_multiplicity: int

    def to_json(self) -> dict:
        return {
            "eigenvalues": [{"re": float(z.real), "im": float(z.imag)} for z in self.eigenvalues],
            "r": self.spectral_abscissa,
            "rho": self.rho,
            "n": self.n,
            "zero_multiplicity": self.zero_multiplicity,
        }


def block_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues via the diagonal blocks of the block-triangular (SCC) form.

    Splitting first keeps defective eigenvalues coming from triangular
    coupling exact instead of smearing them by sqrt(eps).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(n) if i != j and A[i, j] != 0)
    out = []
    for comp in nx.strongly_connected_components(g):
        idx = sorted(comp)
        vals = np.linalg.eigvals(A[np.ix_(idx, idx)])
        if not np.all(np.isfinite(vals)):
            raise VerificationError("eigenvalue solver returned non-finite values")
        out.extend(vals)
    return np.array(sorted(out, key=lambda z: (-z.real, z.imag)), dtype=complex)


def max_sources_per_component(net: ReactionNetwork) -> int:
    sources = set(net.sources)
    return max((sum(1 for y in b if y in sources) for b in graph.weakly_connected_components(net)), default=0)


def spectral_report(sys: FluxSystem, *, certified: Optional[bool] = None) -> SpectralReport:
    """Eigenvalues, spectral abscissa, decay rate rho and n.

    ``certified=True`` asserts the zero-eigenvalue count against the
    number of strong components of the non-zero part; ``None`` decides
    certification by running the endotacticity test.
    """
    try:
        eig = block_eigenvalues(sys.A) if sys.d else np.array([], dtype=complex)
    except np.linalg.LinAlgError as exc:
        raise VerificationError(f"eigenvalue solver failed: {exc}") from exc
    is_zero = (np.abs(eig.real) <= ZERO_EIG_TOL) & (np.abs(eig.imag) <= ZERO_EIG_TOL)
    nonzero = eig[~is_zero]
    rho = float(-nonzero.real.max()) if nonzero.size else None
    r = float(eig.real.max()) if eig.size else float("-inf")
    rep = SpectralReport(tuple(complex(z) for z in eig), r, rho, max_sources_per_component(sys.net), int(is_zero.sum()))
    if certified is None:
        certified = (not sys.net.is_empty()) and first_order_endotactic(sys.net, check_structure=False).endotactic
    if certified:
        _, gb = graph.zero_component_split(sys.net)
        # a species no reaction touches adds a zero row and column
        idle = sys.d - len(sys.net.species_support())
        k = len(graph.strongly_connected_components(gb)) + idle
        if rep.zero_multiplicity != k:
            raise VerificationError(
                f"numerical zero-eigenvalue multiplicity {rep.zero_multiplicity} differs from the structural count {k}")
    return rep


# -- Laplacian and Matrix-Tree constants ---------------------------------------------

def _component_edges(net: ReactionNetwork, comp: Sequence[Complex]) -> list[Reaction]:
    members = set(comp)
    return [r for r in net.reactions if r.source in members and r.target in members]


def laplacian(net: ReactionNetwork, component: Sequence[Complex]) -> list[list[Fraction]]:
    """L_ij = -k_ij (i != j), L_ii = sum of out-rates inside the component (exact)."""
    comp = sorted(component, key=complex_key)
    for y in comp:
        if not (norm1(y) <= 1 and all(c.denominator == 1 and c >= 0 for c in y)):
            raise PreconditionError(f"vertex {net.format_complex(y)} is not monomolecular")
    pos = {y: i for i, y in enumerate(comp)}
    n = len(comp)
    L = [[Fraction(0)] * n for _ in range(n)]
    for r in _component_edges(net, comp):
        i, j = pos[r.source], pos[r.target]
        L[i][j] -= r.rate
        L[i][i] += r.rate
    return L


@dataclass(frozen=True)
class TreeConstants:
    component: tuple
    c: dict = field(default_factory=dict)

    def vector(self) -> np.ndarray:
        return np.array([self.c[y] for y in self.component])

    def normalized(self) -> np.ndarray:
        v = self.vector()
        return v / v.sum()


def tree_constants(net: ReactionNetwork, component: Sequence[Complex]) -> TreeConstants:
    """In-tree weight sums c_l = (l, l) cofactor of the component Laplacian."""
    comp = tuple(sorted(component, key=complex_key))
    g = nx.DiGraph()
    g.add_nodes_from(comp)
    g.add_edges_from(r.edge for r in _component_edges(net, comp))
    if not nx.is_strongly_connected(g):
        raise PreconditionError("tree constants need a strongly connected component")
    L = np.array([[float(x) for x in row] for row in laplacian(net, comp)], dtype=float)
    n = len(comp)
    c = {}
    for l, y in enumerate(comp):
        keep = [i for i in range(n) if i != l]
        c[y] = float(np.linalg.det(L[np.ix_(keep, keep)])) if keep else 1.0
        if not c[y] > 0:
            raise VerificationError(f"non-positive tree constant {c[y]} at {net.format_complex(y)}")
    return TreeConstants(comp, c)


# -- strong realization ---------------------------------------------------------------

def spade_realization(net: ReactionNetwork) -> ReactionNetwork:
    """Monomolecular strong realization of a first-order network.

    Order-one reactions are kept with their rates. The zeroth-order
    reactions are replaced by a fan 0 -> S_k whose rate is the total
    rate at which 0 feeds species k; species receiving nothing get no
    edge.
    """
    _require_first_order(net)
    if net.is_empty():
        raise PreconditionError("operation needs a nonempty network")
    d = net.d
    kept = [r for r in net.reactions if r.order == 1]
    weight = [Fraction(0)] * d
    for r in net.reactions:
        if r.order == 0:
            for k in range(d):
                weight[k] += r.target[k] * r.rate
    fan = [Reaction(net.zero, unit_complex(d, k), weight[k]) for k in range(d) if weight[k] > 0]
    return net.subnetwork(kept + fan)


def source_flux(net: ReactionNetwork) -> dict:
    """Exact sum of rate * reaction vector at each source."""
    out: dict = {}
    for r in net.reactions:
        acc = out.setdefault(r.source, [Fraction(0)] * net.d)
        for i, c in enumerate(r.vector):
            acc[i] += r.rate * c
    return {y: tuple(v) for y, v in out.items()}


def flux_match_certificate(original: ReactionNetwork, realization: ReactionNetwork) -> dict:
    """Compare source fluxes exactly; a source absent on one side has flux 0 there."""
    fo, fr = source_flux(original), source_flux(realization)
    zero = tuple(Fraction(0) for _ in range(original.d))
    rows = []
    for y in sorted(set(fo) | set(fr), key=complex_key):
        a, b = fo.get(y, zero), fr.get(y, zero)
        rows.append({"source": original.format_complex(y), "original": list(a),
                     "realization": list(b), "match": a == b})
    return {"holds": all(r["match"] for r in rows), "sources": rows}


# -- equilibria ---------------------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityClass:
    """Per-component masses of the remainder; ``full_orthant`` when it is empty."""

    blocks: tuple
    masses: tuple

    @property
    def full_orthant(self) -> bool:
        return not self.blocks

    @property
    def positive(self) -> bool:
        return all(m > 0 for m in self.masses)

    def to_json(self, species: Sequence[str]) -> dict:
        if self.full_orthant:
            return {"full_orthant": True, "masses": []}
        return {
            "full_orthant": False,
            "blocks": [[species[i] for i in b] for b in self.blocks],
            "masses": [float(m) for m in self.masses],
        }


def compatibility_class(net: ReactionNetwork, x0: Sequence[float]) -> CompatibilityClass:
    _, gb = graph.zero_component_split(net)
    blocks = []
    for comp in graph.strongly_connected_components(gb):
        blocks.append(tuple(sorted({i for y in comp for i, c in enumerate(y) if c != 0})))
    masses = tuple(float(sum(x0[i] for i in b)) for b in blocks)
    return CompatibilityClass(tuple(blocks), masses)


@dataclass(frozen=True)
class EquilibriumResult:
    x_star: np.ndarray
    cls: Optional[CompatibilityClass]
    positive: bool
    residual: float
    forced: bool = False
    warning: Optional[str] = None

    def to_json(self, species: Sequence[str]) -> dict:
        out = {
            "x_star": [float(v) for v in self.x_star],
            "class": None if self.cls is None else self.cls.to_json(species),
            "positive": bool(self.positive),
            "residual": float(self.residual),
            "forced": self.forced,
        }
        if self.warning:
            out["warning"] = self.warning
        return out


def linear_equilibrium(A, b) -> np.ndarray:
    """x = b(-A)^{-1}, i.e. the solution of xA + b = 0."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        return np.linalg.solve(-A.T, b)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("flux matrix is singular; no unique equilibrium") from exc


def linear_equilibrium_exact(A, b) -> list[Fraction]:
    neg = [[-Fraction(a) for a in row] for row in A]
    try:
        return linalg.solve_left(neg, b)
    except ZeroDivisionError as exc:
        raise PreconditionError("flux matrix is singular; no unique equilibrium") from exc


def _residual(sys: FluxSystem, x: np.ndarray) -> float:
    return float(np.abs(x @ sys.A + sys.b).sum())


def _zero_block_by_trees(net: ReactionNetwork) -> dict[int, float]:
    """Species values on the zero component from Matrix-Tree constants of the realization."""
    spade = spade_realization(net)
    g0, _ = graph.zero_component_split(spade)
    if g0.is_empty():
        return {}
    comp = next(b for b in graph.strongly_connected_components(g0) if net.zero in b)
    tc = tree_constants(g0, comp)
    c0 = tc.c[net.zero]
    out = {}
    for y, c in tc.c.items():
        if y != net.zero:
            out[next(i for i, v in enumerate(y) if v != 0)] = c / c0
    return out


def equilibrium(
    sys: FluxSystem,
    x0: Sequence[float],
    *,
    certificate: Optional[EndoVerdict] = None,
    force: bool = False,
) -> EquilibriumResult:
    """The equilibrium in the compatibility class of ``x0``.

    Requires an endotacticity certificate (computed when not supplied).
    ``force`` skips it and returns b(-A)^{-1} with a warning flag.
    """
    net = sys.net
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.d,):
        raise ValueError(f"initial state has length {x0.size}, network has {sys.d} species")
    if np.any(x0 < 0):
        raise ValueError("initial state must be nonnegative")
    if certificate is None and not net.is_empty():
        certificate = first_order_endotactic(net)
    certified = certificate is not None and certificate.endotactic
    if not certified:
        if not force:
            raise PreconditionError("network is not certified endotactic; rerun with force to override")
        x = linear_equilibrium(sys.A, sys.b)
        return EquilibriumResult(
            x, None, bool(np.all(x > 0)), _residual(sys, x), forced=True,
            warning="theory does not guarantee uniqueness or positivity for this network")

    g0, gb = graph.zero_component_split(net)
    x = x0.copy()  # species touched by no reaction keep their value
    zero_species = sorted(g0.species_support())
    if zero_species:
        A = sys.A[np.ix_(zero_species, zero_species)]
        b = sys.b[zero_species]
        try:
            x[zero_species] = linear_equilibrium(A, b)
        except PreconditionError as exc:
            raise VerificationError("zero-component block is singular for a certified network") from exc
        for i, v in _zero_block_by_trees(net).items():
            if abs(v - x[i]) > RESIDUAL_TOL * max(1.0, abs(v)):
                raise VerificationError(f"equilibrium routes disagree on species {net.species[i]}: {v} vs {x[i]}")

    cls = compatibility_class(net, x0)
    for comp, mass in zip(graph.strongly_connected_components(gb), cls.masses):
        tc = tree_constants(gb, comp)
        total = sum(tc.c.values())
        for y, c in tc.c.items():
            x[next(i for i, v in enumerate(y) if v != 0)] = mass * c / total
    res = _residual(sys, x)
    if res > RESIDUAL_TOL * (1 + float(np.abs(sys.b).sum())):
        raise VerificationError(f"equilibrium residual {res:.3e} exceeds tolerance")
    return EquilibriumResult(x, cls, bool(np.all(x > 0)), res)
