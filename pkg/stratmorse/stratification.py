"""Levels, strata, the frontier axiom and the frontier partial order."""
from __future__ import annotations

import logging
from typing import Iterable, Mapping

from stratmorse.complex import Complex, CellSet, connected_components, is_subcomplex
from stratmorse.errors import InputError, InvariantViolation, PreconditionError, StratificationError
from stratmorse.models import (
    FrontierReport,
    FrontierViolation,
    Stratification,
    Stratum,
    StratumOrder,
    ValidationReport,
    Violation,
)

logger = logging.getLogger(__name__)

LevelMap = Mapping[str, int]


def skeletal_levels(c: Complex) -> dict[str, int]:
    """level = dimension; every cell becomes its own stratum"""
    return dict(c.cells)


def trivial_levels(c: Complex) -> dict[str, int]:
    """A single level; the strata are the connected components of X"""
    return {cell: 0 for cell in c.cells}


def _assemble(c: Complex, levels: LevelMap, cells: Iterable[str]) -> Stratification:
    cells = frozenset(cells)
    by_level: dict[int, set[str]] = {}
    for cell in cells:
        by_level.setdefault(levels[cell], set()).add(cell)

    strata: list[Stratum] = []
    cell_to_stratum: dict[str, str] = {}
    for level in sorted(by_level):
        for component in connected_components(c, by_level[level]):
            stratum_id = f"{level}:{min(component)}"
            strata.append(Stratum(id=stratum_id, level=level, cells=component))
            for cell in component:
                cell_to_stratum[cell] = stratum_id

    return Stratification(
        levels={cell: levels[cell] for cell in sorted(cells)},
        strata=strata,
        cell_to_stratum=cell_to_stratum,
    )


def compute_strata(c: Complex, levels: LevelMap) -> Stratification:
    """Split every level difference Δ_i into zigzag components"""
    missing = sorted(set(c.cells) - set(levels))
    if missing:
        raise InputError(f"no level for cell(s): {', '.join(missing)}")
    c.require(levels)
    for cell, level in levels.items():
        if level < 0:
            raise InputError(f"level of {cell} is negative")

    for parent, child in sorted(c.covering):
        if levels[child] > levels[parent]:
            raise StratificationError(
                parent, child,
                f"level map is not monotone: level({child}) = {levels[child]} > "
                f"level({parent}) = {levels[parent]}",
            )

    stratification = _assemble(c, levels, c.cells)
    logger.info("computed %d strata over %d levels", len(stratification.strata),
                len(set(levels.values())))
    return stratification


def check_frontier(c: Complex, s: Stratification) -> FrontierReport:
    """Singleton form of the frontier axiom.

    For every cell σ and every stratum T other than the one holding σ:
    cl(σ) ∩ T ≠ ∅ ⟹ T ⊆ cl(σ). A connected S meets T through cl(S) only
    via some cell of S, so checking single cells suffices. Faces of σ on
    the level of σ are zigzag-connected to σ, so T ranges exactly over the
    strata of the other levels.
    """
    violations: list[FrontierViolation] = []
    for cell in c.sorted_cells():
        faces = c.faces(cell)
        own = s.cell_to_stratum[cell]
        for stratum in s.strata:
            if stratum.id == own:
                continue
            if stratum.cells & faces and not stratum.cells <= faces:
                violations.append(FrontierViolation(
                    cell=cell,
                    stratum=stratum.id,
                    missing=sorted(stratum.cells - faces),
                ))
    if violations:
        logger.warning("frontier axiom fails for %d (cell, stratum) pairs", len(violations))
    return FrontierReport(violations=violations)


def _stratum_closures(c: Complex, s: Stratification) -> dict[str, CellSet]:
    closures: dict[str, CellSet] = {}
    for stratum in s.strata:
        faces: set[str] = set()
        for cell in stratum.cells:
            faces |= c.faces(cell)
        closures[stratum.id] = frozenset(faces)
    return closures


def check_stratum_frontier(c: Complex, s: Stratification) -> FrontierReport:
    """Stratum-level form: cl(S) ∩ T ≠ ∅ ⟹ T ⊆ cl(S) for strata S ≠ T.

    Weaker than the singleton form. Inherited stratifications of
    subdivisions satisfy this one but in general not the singleton form.
    Violations name the stratum S in place of a cell.
    """
    closures = _stratum_closures(c, s)
    violations = [
        FrontierViolation(cell=upper.id, stratum=lower.id,
                          missing=sorted(lower.cells - closures[upper.id]))
        for upper in s.strata
        for lower in s.strata
        if lower.id != upper.id
        and lower.cells & closures[upper.id]
        and not lower.cells <= closures[upper.id]
    ]
    return FrontierReport(violations=violations)


def stratum_order(c: Complex, s: Stratification) -> StratumOrder:
    """T ≤ S iff T meets cl(S); a partial order once the frontier axiom holds"""
    report = check_frontier(c, s)
    if not report.ok:
        first = report.violations[0]
        raise PreconditionError(
            f"frontier axiom fails (cell {first.cell}, stratum {first.stratum}); "
            "strata are not partially ordered"
        )

    closures = _stratum_closures(c, s)
    relation = frozenset(
        (lower.id, upper.id)
        for upper in s.strata
        for lower in s.strata
        if lower.cells & closures[upper.id]
    )

    for lower, upper in relation:
        if lower != upper and (upper, lower) in relation:
            raise InvariantViolation(f"strata {lower} and {upper} are mutually below each other")

    return StratumOrder(relation=relation)


def check_convexity(c: Complex, s: Stratification) -> ValidationReport:
    """σ ≤ τ ≤ σ′ with σ, σ′ in one stratum forces τ into it"""
    violations: list[Violation] = []
    for stratum in s.strata:
        for top in sorted(stratum.cells):
            for middle in sorted(c.faces(top) - stratum.cells):
                below = sorted(c.faces(middle) & stratum.cells)
                if below:
                    violations.append(Violation(
                        rule="stratum-convexity",
                        cells=[below[0], middle, top],
                        detail=f"{middle} lies between cells of stratum {stratum.id}",
                    ))
    return ValidationReport(violations=violations)


def induced_stratification(c: Complex, s: Stratification, sub: Iterable[str]) -> Stratification:
    """Stratification of a subcomplex via Y_i := Y ∩ X_i.

    Strata are recomputed inside sub, so an ambient stratum may split. The
    frontier axiom is not re-asserted.
    """
    sub = frozenset(sub)
    if not is_subcomplex(c, sub):
        raise InputError("induced stratification needs a subcomplex")
    return _assemble(c, s.levels, sub)
