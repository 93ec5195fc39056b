"""Multivector fields, Conley indices and the E¹ page of the induced filtration."""
from __future__ import annotations

import logging
from typing import Iterable, Union

import networkx as nx

from stratmorse.complex import (
    Complex,
    CellSet,
    closure,
    connected_components,
    euler_characteristic,
    is_convex,
    is_subcomplex,
)
from stratmorse.errors import InputError, InvariantViolation, PreconditionError
from stratmorse.homology import cw_relative_homology
from stratmorse.models import (
    CycleWitness,
    E1Entry,
    E1Page,
    GradedHomology,
    MultivectorField,
    MvfOrder,
    Stratification,
    ValidationReport,
    Violation,
)
from stratmorse.morse import ValueMap, classify
from stratmorse.stratification import compute_strata, trivial_levels

logger = logging.getLogger(__name__)


def singleton_mvf(c: Complex) -> MultivectorField:
    """Every cell is its own multivector"""
    return MultivectorField(parts={cell: frozenset({cell}) for cell in c.cells})


def strata_mvf(strat: Stratification) -> MultivectorField:
    return MultivectorField(parts={stratum.id: stratum.cells for stratum in strat.strata})


def matching_mvf(c: Complex, f: ValueMap) -> MultivectorField:
    """Gradient pairs of a Forman function as two-cell multivectors, critical cells alone.

    A pair is named after its higher-dimensional cell.
    """
    report = classify(c, compute_strata(c, trivial_levels(c)), f)
    broken = [record.cell for record in report.records if record.failures]
    if broken:
        raise InputError(f"f is not a discrete Morse function at {', '.join(broken)}")

    parts: dict[str, frozenset[str]] = {}
    for record in report.records:
        if record.status == "paired-below":
            parts[record.cell] = frozenset({record.cell, record.partner})
        elif record.status in ("critical", "s-critical"):
            parts[record.cell] = frozenset({record.cell})
    return MultivectorField(parts=parts)


def validate_mvf(c: Complex, mvf: MultivectorField) -> ValidationReport:
    """Partition, convexity and connectivity of every multivector; violations are data"""
    violations: list[Violation] = []
    owners: dict[str, list[str]] = {}
    for part_id in sorted(mvf.parts):
        for cell in mvf.parts[part_id]:
            owners.setdefault(cell, []).append(part_id)

    unknown = sorted(set(owners) - c.cells.keys())
    if unknown:
        violations.append(Violation(
            rule="mvf-unknown-cell", cells=unknown, detail="cells are not in the complex",
        ))
    uncovered = sorted(c.cells.keys() - set(owners))
    if uncovered:
        violations.append(Violation(
            rule="mvf-partition", cells=uncovered, detail="cells belong to no multivector",
        ))
    for cell in sorted(owners):
        if len(owners[cell]) > 1:
            violations.append(Violation(
                rule="mvf-partition", cells=[cell],
                detail=f"{cell} belongs to {', '.join(owners[cell])}",
            ))

    for part_id in sorted(mvf.parts):
        members = mvf.parts[part_id] & c.cells.keys()
        if not mvf.parts[part_id]:
            violations.append(Violation(rule="mvf-empty", cells=[], detail=f"{part_id} is empty"))
            continue
        if not is_convex(c, members):
            violations.append(Violation(
                rule="mvf-convexity", cells=sorted(members), detail=f"{part_id} is not convex",
            ))
        if len(connected_components(c, members)) > 1:
            violations.append(Violation(
                rule="mvf-connectivity", cells=sorted(members), detail=f"{part_id} is not connected",
            ))

    if violations:
        logger.warning("multivector field failed %d checks", len(violations))
    return ValidationReport(violations=violations)


def exit_set(c: Complex, m: Iterable[str]) -> CellSet:
    """ex(M) = cl(M) − M"""
    m = frozenset(m)
    if not is_convex(c, m):
        raise InputError(f"multivector {sorted(m)} is not convex")
    out = closure(c, m) - m
    if not is_subcomplex(c, out):
        raise InvariantViolation(f"exit set of {sorted(m)} is not a subcomplex")
    return out


def conley_index(c: Complex, m: Iterable[str]) -> GradedHomology:
    """Con_*(M) = H_*(cl M, ex M; ℤ)"""
    m = frozenset(m)
    if not m or len(connected_components(c, m)) != 1:
        raise InputError(f"multivector {sorted(m)} is empty or not connected")
    return cw_relative_homology(c, closure(c, m), exit_set(c, m))


def is_critical_multivector(c: Complex, m: Iterable[str]) -> bool:
    return not conley_index(c, m).is_zero


def _arrow_graph(c: Complex, mvf: MultivectorField) -> nx.DiGraph:
    # edge M → N whenever some cell of M lies above some cell of N
    owner = {cell: part_id for part_id, members in mvf.parts.items() for cell in members}
    graph = nx.DiGraph()
    graph.add_nodes_from(mvf.parts)
    for part_id, members in mvf.parts.items():
        for face in closure(c, members):
            if owner[face] != part_id:
                graph.add_edge(part_id, owner[face])
    return graph


def mvf_order(c: Complex, mvf: MultivectorField) -> Union[MvfOrder, CycleWitness]:
    """Transitive closure of the multivector relation, or a cycle of multivectors.

    The linear extension lists lower multivectors first, breaking ties by
    the least cell token of each multivector.
    """
    report = validate_mvf(c, mvf)
    if not report.ok:
        raise InputError(f"invalid multivector field: {report.violations[0].detail}")

    graph = _arrow_graph(c, mvf)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        witness = [edge[0] for edge in cycle]
        logger.warning("multivector field is cyclic: %s", " > ".join(witness))
        return CycleWitness(cycle=witness)

    relation = {(part_id, part_id) for part_id in mvf.parts}
    for part_id in mvf.parts:
        relation |= {(part_id, lower) for lower in nx.descendants(graph, part_id)}

    extension = list(nx.lexicographical_topological_sort(
        graph.reverse(copy=True), key=lambda part_id: min(mvf.parts[part_id]),
    ))
    return MvfOrder(relation=frozenset(relation), linear_extension=extension)


def _same_homology(a: GradedHomology, b: GradedHomology) -> bool:
    top = max(len(a.betti), len(b.betti))
    return all(
        a.rank(k) == b.rank(k)
        and (a.torsion[k] if k < len(a.torsion) else []) == (b.torsion[k] if k < len(b.torsion) else [])
        for k in range(top)
    )


def e1_page(c: Complex, mvf: MultivectorField) -> E1Page:
    """E¹ of the filtration F_q = M_1 ∪ … ∪ M_q along the linear extension.

    Every entry is computed as H(F_q, F_{q-1}) and as the Conley index of
    M_q, and the two must agree. The page is checked against the Euler
    characteristic and the Betti numbers of X.
    """
    order = mvf_order(c, mvf)
    if isinstance(order, CycleWitness):
        raise PreconditionError(f"multivector field is cyclic: {' > '.join(order.cycle)}")

    entries: list[E1Entry] = []
    previous: frozenset[str] = frozenset()
    for q, part_id in enumerate(order.linear_extension, start=1):
        current = previous | mvf.parts[part_id]
        if not is_subcomplex(c, current):
            raise InvariantViolation(f"filtration step F_{q} is not a subcomplex")
        direct = cw_relative_homology(c, current, previous)
        index = conley_index(c, mvf.parts[part_id])
        if not _same_homology(direct, index):
            raise InvariantViolation(
                f"H(F_{q}, F_{q - 1}) = {direct.betti} differs from Con({part_id}) = {index.betti}"
            )
        entries.append(E1Entry(q=q, multivector=part_id, homology=index))
        previous = current

    absolute = cw_relative_homology(c, c.all_cells)
    top = max([len(absolute.betti)] + [len(e.homology.betti) for e in entries])
    total_ranks = [sum(e.homology.rank(k) for e in entries) for k in range(top)]
    euler = sum((-1) ** k * rank for k, rank in enumerate(total_ranks))

    if euler != euler_characteristic(c):
        raise InvariantViolation(f"E¹ Euler characteristic {euler} differs from χ(X)")
    for k, rank in enumerate(absolute.betti):
        if rank > total_ranks[k]:
            raise InvariantViolation(f"b_{k}(X) = {rank} exceeds the E¹ total rank {total_ranks[k]}")

    logger.info("E¹ page over %d multivectors, total ranks %s", len(entries), total_ranks)
    return E1Page(
        ordering=order.linear_extension,
        entries=entries,
        total_ranks=total_ranks,
        euler=euler,
        absolute=absolute,
    )
