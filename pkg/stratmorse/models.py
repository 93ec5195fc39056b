"""Report and record types.

Everything a computation hands back to a caller is one of these models.
Cell sets are frozensets of tokens; renderers sort them.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Chain = tuple[str, ...]


class Violation(BaseModel):
    """A single violated rule, with the cells that witness it"""

    rule: str
    cells: list[str]
    detail: str = ""


class ValidationReport(BaseModel):
    violations: list[Violation] = Field(default_factory=list)
    note: Optional[str] = None

    @property
    def ok(self) -> bool:
        return not self.violations


class FrontierViolation(BaseModel):
    cell: str
    stratum: str
    missing: list[str]


class FrontierReport(BaseModel):
    """Pairs (σ, T) where cl(σ) meets stratum T without containing it"""

    violations: list[FrontierViolation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class Stratum(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    level: int
    cells: frozenset[str]


class Stratification(BaseModel):
    """Level map plus the zigzag components of every level difference"""

    model_config = ConfigDict(frozen=True)

    levels: dict[str, int]
    strata: list[Stratum]
    cell_to_stratum: dict[str, str]

    def stratum(self, stratum_id: str) -> Stratum:
        for stratum in self.strata:
            if stratum.id == stratum_id:
                return stratum
        raise KeyError(stratum_id)

    def stratum_of(self, cell: str) -> Stratum:
        return self.stratum(self.cell_to_stratum[cell])


class StratumOrder(BaseModel):
    """The frontier order; a pair (T, S) means T ≤ S"""

    relation: frozenset[tuple[str, str]]

    def leq(self, lower: str, upper: str) -> bool:
        return (lower, upper) in self.relation

    def less(self, lower: str, upper: str) -> bool:
        return lower != upper and (lower, upper) in self.relation


class FreeFacePair(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: str
    tau: str
    stratum: Optional[str] = None


class CollapseCertificate(BaseModel):
    """Ordered free-face pairs witnessing K ↘ L (or K ↝ L when filtered)"""

    pairs: list[FreeFacePair] = Field(default_factory=list)
    filtered: bool = False


class CollapseOutcome(BaseModel):
    status: Literal["collapse", "no-collapse", "budget-exhausted"]
    certificate: Optional[CollapseCertificate] = None
    nodes: int = 0


class HaloResult(BaseModel):
    cell: str
    halo: frozenset[str]
    augmented: frozenset[str]
    shadow: frozenset[str]


CellStatus = Literal["paired-below", "paired-above", "critical", "s-critical"]


class CellRecord(BaseModel):
    cell: str
    stratum: str
    status: CellStatus
    partner: Optional[str] = None
    certificate: Optional[CollapseCertificate] = None
    failures: list[str] = Field(default_factory=list)


class MorseReport(BaseModel):
    records: list[CellRecord]
    verdict: Literal["valid", "invalid", "inconclusive"]

    def record(self, cell: str) -> CellRecord:
        for record in self.records:
            if record.cell == cell:
                return record
        raise KeyError(cell)

    def with_status(self, *statuses: str) -> list[str]:
        return [r.cell for r in self.records if r.status in statuses]


class AttachmentTriple(BaseModel):
    closure: frozenset[str]
    below: frozenset[str]
    shadow: frozenset[str]


SweepKind = Literal["no-change", "regular-collapse", "s-critical-attachment", "theorem-violation"]


class SweepEvent(BaseModel):
    cell: str
    value: str
    lower: str
    upper: str
    kind: SweepKind
    certificate: Optional[CollapseCertificate] = None
    attachment: Optional[AttachmentTriple] = None
    detail: str = ""


class PushoutReport(BaseModel):
    """Union/intersection identity of the cone over the lower link"""

    cell: str
    epsilon: str
    lower_link: frozenset[Chain]
    union_ok: bool
    intersection_ok: bool
    witnesses: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.union_ok and self.intersection_ok


class TheoremCReport(BaseModel):
    cell: str
    epsilon: str
    horizontal: frozenset[Chain]
    vertical: frozenset[Chain]
    union_ok: bool
    intersection_ok: bool
    horizontal_strata_ok: bool
    vertical_strata_ok: bool
    witnesses: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.union_ok
            and self.intersection_ok
            and self.horizontal_strata_ok
            and self.vertical_strata_ok
        )


class GradedHomology(BaseModel):
    """Integer homology per degree: betti rank and torsion coefficients"""

    betti: list[int]
    torsion: list[list[int]]

    @property
    def is_zero(self) -> bool:
        return not any(self.betti) and not any(self.torsion)

    def rank(self, degree: int) -> int:
        return self.betti[degree] if 0 <= degree < len(self.betti) else 0

    def euler(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    def nonzero_degrees(self) -> list[int]:
        return [
            k for k in range(len(self.betti)) if self.betti[k] or self.torsion[k]
        ]


class MultivectorField(BaseModel):
    parts: dict[str, frozenset[str]]


class MvfOrder(BaseModel):
    """Transitive closure ▷ of the multivector relation; (M, N) means M ▷ N"""

    relation: frozenset[tuple[str, str]]
    linear_extension: list[str]


class CycleWitness(BaseModel):
    cycle: list[str]


class E1Entry(BaseModel):
    q: int
    multivector: str
    homology: GradedHomology

    def entries(self) -> list[tuple[int, int, int, list[int]]]:
        """(p, q, rank, torsion) for every nonzero total degree p+q."""
        return [
            (k - self.q, self.q, self.homology.betti[k], self.homology.torsion[k])
            for k in self.homology.nonzero_degrees()
        ]


class E1Page(BaseModel):
    ordering: list[str]
    entries: list[E1Entry]
    total_ranks: list[int]
    euler: int
    absolute: GradedHomology


CommandStatus = Literal["ok", "failed", "inconclusive"]


class CommandReport(BaseModel):
    """What a service call hands to the CLI: printable lines plus the same data as a tree"""

    command: str
    status: CommandStatus = "ok"
    lines: list[str] = Field(default_factory=list)
    data: dict = Field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "failed": 1, "inconclusive": 3}[self.status]
