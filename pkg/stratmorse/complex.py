"""Finite regular CW complexes as graded face posets.

A complex is stored as its cells (token → dimension) and its covering
pairs (parent, child) with child a codimension-one face of parent. The
full face order is the reflexive-transitive closure of the covering
relation; it is computed once per complex and kept on the instance.
"""
from __future__ import annotations

import logging
from itertools import combinations
from typing import Iterable

import networkx as nx
from pydantic import BaseModel, ConfigDict, PrivateAttr

from stratmorse.errors import InputError
from stratmorse.models import ValidationReport, Violation

logger = logging.getLogger(__name__)

CellSet = frozenset[str]

REGULARITY_NOTE = "regularity checked up to combinatorial proxies"


class Complex(BaseModel):
    """Face poset of a finite regular CW complex (immutable)"""

    model_config = ConfigDict(frozen=True)

    cells: dict[str, int]
    covering: frozenset[tuple[str, str]] = frozenset()

    _hasse: nx.DiGraph = PrivateAttr()
    _faces: dict[str, CellSet] = PrivateAttr()
    _cofaces: dict[str, CellSet] = PrivateAttr()

    def model_post_init(self, __context) -> None:
        for token, dim in self.cells.items():
            if not token:
                raise InputError("cell ids must be nonempty")
            if dim < 0:
                raise InputError(f"cell {token} has negative dimension {dim}")

        hasse = nx.DiGraph()
        hasse.add_nodes_from(self.cells)
        for parent, child in self.covering:
            for token in (parent, child):
                if token not in self.cells:
                    raise InputError(f"covering pair ({parent}, {child}) names unknown cell {token}")
            hasse.add_edge(parent, child)

        self._hasse = hasse
        self._faces = {
            cell: frozenset(nx.descendants(hasse, cell)) | {cell} for cell in self.cells
        }
        self._cofaces = {
            cell: frozenset(nx.ancestors(hasse, cell)) | {cell} for cell in self.cells
        }

    def __eq__(self, other: object) -> bool:
        # the memoised graph compares by identity
        if not isinstance(other, Complex):
            return NotImplemented
        return self.cells == other.cells and self.covering == other.covering

    __hash__ = None

    # -- order primitives -------------------------------------------------

    def dim(self, cell: str) -> int:
        self.require({cell})
        return self.cells[cell]

    @property
    def dimension(self) -> int:
        return max(self.cells.values(), default=-1)

    def faces(self, cell: str) -> CellSet:
        """cl(σ): every τ ≤ σ, σ included"""
        self.require({cell})
        return self._faces[cell]

    def cofaces(self, cell: str) -> CellSet:
        """st(σ): every τ ≥ σ, σ included"""
        self.require({cell})
        return self._cofaces[cell]

    def boundary(self, cell: str) -> CellSet:
        """Codimension-one faces"""
        return frozenset(self._hasse.successors(cell))

    def coboundary(self, cell: str) -> CellSet:
        """Codimension-one cofaces"""
        return frozenset(self._hasse.predecessors(cell))

    def leq(self, lower: str, upper: str) -> bool:
        return lower in self._faces[upper]

    def less(self, lower: str, upper: str) -> bool:
        return lower != upper and lower in self._faces[upper]

    def comparable(self, a: str, b: str) -> bool:
        return a in self._faces[b] or b in self._faces[a]

    def sorted_cells(self) -> list[str]:
        return sorted(self.cells)

    def require(self, cells: Iterable[str]) -> None:
        """Raise InputError if any token is not a cell of this complex"""
        unknown = sorted(set(cells) - self.cells.keys())
        if unknown:
            raise InputError(f"unknown cell id(s): {', '.join(unknown)}")

    @property
    def all_cells(self) -> CellSet:
        return frozenset(self.cells)

    @property
    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self._hasse)


def validate_complex(c: Complex) -> ValidationReport:
    """List every violated invariant of the face poset; violations are data"""
    violations: list[Violation] = []

    for parent, child in sorted(c.covering):
        if c.cells[parent] != c.cells[child] + 1:
            violations.append(Violation(
                rule="covering-dimension",
                cells=[parent, child],
                detail=f"dim {parent} = {c.cells[parent]}, dim {child} = {c.cells[child]}",
            ))

    if not c.is_acyclic:
        cycle = nx.find_cycle(c._hasse)
        violations.append(Violation(
            rule="antisymmetry",
            cells=sorted({edge[0] for edge in cycle}),
            detail="covering relation has a cycle",
        ))

    for cell in c.sorted_cells():
        if c.cells[cell] != 1:
            continue
        vertices = sorted(v for v in c.boundary(cell) if c.cells[v] == 0)
        if len(vertices) != 2:
            violations.append(Violation(
                rule="edge-endpoints",
                cells=[cell, *vertices],
                detail=f"1-cell {cell} has {len(vertices)} distinct 0-faces, expected 2",
            ))

    # Diamond property: every interval of length two has exactly two interior cells
    for upper in c.sorted_cells():
        middles_by_lower: dict[str, set[str]] = {}
        for middle in c.boundary(upper):
            for lower in c.boundary(middle):
                middles_by_lower.setdefault(lower, set()).add(middle)
        for lower in sorted(middles_by_lower):
            middles = middles_by_lower[lower]
            if len(middles) != 2:
                violations.append(Violation(
                    rule="diamond",
                    cells=[lower, upper, *sorted(middles)],
                    detail=f"interval ({lower}, {upper}) has {len(middles)} cells, expected 2",
                ))

    if violations:
        logger.warning("complex failed %d regularity checks", len(violations))
    return ValidationReport(violations=violations, note=REGULARITY_NOTE)


def closure(c: Complex, s: Iterable[str]) -> CellSet:
    """Smallest down-set containing s"""
    s = frozenset(s)
    c.require(s)
    out: set[str] = set()
    for cell in s:
        out |= c.faces(cell)
    return frozenset(out)


def star(c: Complex, s: Iterable[str]) -> CellSet:
    """Smallest up-set containing s"""
    s = frozenset(s)
    c.require(s)
    out: set[str] = set()
    for cell in s:
        out |= c.cofaces(cell)
    return frozenset(out)


def is_subcomplex(c: Complex, s: Iterable[str]) -> bool:
    s = frozenset(s)
    c.require(s)
    return all(c.faces(cell) <= s for cell in s)


def is_convex(c: Complex, s: Iterable[str]) -> bool:
    """σ ≤ τ ≤ σ′ with σ, σ′ in s forces τ in s"""
    s = frozenset(s)
    c.require(s)
    for top in s:
        for middle in c.faces(top) - s:
            if c.faces(middle) & s:
                return False
    return True


def connected_components(c: Complex, s: Iterable[str]) -> list[CellSet]:
    """Zigzag components of s, ordered by their least token.

    Two cells of s are adjacent when they are comparable; cells outside s
    never serve as intermediate steps.
    """
    s = frozenset(s)
    c.require(s)

    graph = nx.Graph()
    graph.add_nodes_from(s)
    for cell in s:
        for face in c.faces(cell) & s:
            if face != cell:
                graph.add_edge(cell, face)

    components = [frozenset(comp) for comp in nx.connected_components(graph)]
    return sorted(components, key=min)


def euler_characteristic(c: Complex, s: Iterable[str] | None = None) -> int:
    cells = c.all_cells if s is None else frozenset(s)
    c.require(cells)
    return sum((-1) ** c.cells[cell] for cell in cells)


def intervals_of_length_two(c: Complex) -> list[tuple[str, str]]:
    """All pairs τ < σ with dim σ − dim τ = 2, sorted"""
    pairs = []
    for upper in c.sorted_cells():
        for lower in sorted(c.faces(upper)):
            if c.cells[upper] - c.cells[lower] == 2:
                pairs.append((lower, upper))
    return pairs


def complex_from_facets(facets: Iterable[Iterable[str]]) -> Complex:
    """Simplicial complex generated by vertex lists, as a face poset.

    Each simplex is named by its sorted vertex tokens joined with `.`
    (a vertex keeps its own name).
    """
    simplices: set[tuple[str, ...]] = set()
    for facet in facets:
        vertices = tuple(sorted(set(facet)))
        for size in range(1, len(vertices) + 1):
            simplices.update(combinations(vertices, size))

    def name(simplex: tuple[str, ...]) -> str:
        return ".".join(simplex)

    cells = {name(s): len(s) - 1 for s in simplices}
    covering = frozenset(
        (name(s), name(s[:i] + s[i + 1:]))
        for s in simplices if len(s) > 1
        for i in range(len(s))
    )
    return Complex(cells=cells, covering=covering)
