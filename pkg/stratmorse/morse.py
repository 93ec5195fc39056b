"""Halos, shadows, stratified discrete Morse functions and the sublevelset sweep.

Values are exact rationals. Every comparison below is an exact order
comparison, so ties and argmins are never disturbed by rounding.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Mapping, Optional

from stratmorse.collapse import find_collapse, replay
from stratmorse.complex import Complex, CellSet, closure, is_subcomplex
from stratmorse.config import settings
from stratmorse.errors import (
    InconclusiveError,
    InputError,
    IntervalError,
    InvalidPair,
    InvariantViolation,
    PreconditionError,
)
from stratmorse.models import (
    AttachmentTriple,
    CellRecord,
    CollapseCertificate,
    FreeFacePair,
    HaloResult,
    MorseReport,
    Stratification,
    SweepEvent,
)
from stratmorse.stratification import (
    check_frontier,
    compute_strata,
    induced_stratification,
    trivial_levels,
)
from stratmorse.utils import format_decimal, is_decimal_fraction

logger = logging.getLogger(__name__)

ValueMap = Mapping[str, Fraction]

EPSILON_FALLBACK = Fraction(1)


def _value_text(value: Fraction) -> str:
    return format_decimal(value) if is_decimal_fraction(value) else str(value)


def ensure_injective(c: Complex, f: ValueMap) -> None:
    """Raise InputError unless f assigns pairwise distinct values to every cell"""
    missing = sorted(set(c.cells) - set(f))
    if missing:
        raise InputError(f"no value for cell(s): {', '.join(missing)}")
    seen: dict[Fraction, str] = {}
    for cell in c.sorted_cells():
        value = f[cell]
        if value in seen:
            raise InputError(
                f"values are not injective: {seen[value]} and {cell} share {_value_text(value)}"
            )
        seen[value] = cell


def tiebreak_values(c: Complex, f: ValueMap) -> dict[str, Fraction]:
    """Resolve ties by lexicographic-by-token offsets.

    Cells sharing a value v keep v for the least token and receive
    v + k·10⁻ᵐ for the k-th next one, with 10⁻ᵐ chosen so that the largest
    offset stays below the gap to the next distinct value. The order among
    distinct values is unchanged and offsets stay finite decimals.
    """
    missing = sorted(set(c.cells) - set(f))
    if missing:
        raise InputError(f"no value for cell(s): {', '.join(missing)}")

    groups: dict[Fraction, list[str]] = {}
    for cell in c.sorted_cells():
        groups.setdefault(f[cell], []).append(cell)

    distinct = sorted(groups)
    out: dict[str, Fraction] = {}
    for index, value in enumerate(distinct):
        members = groups[value]
        if len(members) == 1:
            out[members[0]] = value
            continue
        gap = distinct[index + 1] - value if index + 1 < len(distinct) else Fraction(1)
        step = Fraction(1)
        while step * len(members) >= gap:
            step /= 10
        for k, cell in enumerate(members):
            out[cell] = value + k * step
        logger.info("tie-break offsets applied to %d cells at %s", len(members), _value_text(value))
    return out


def lower_star(c: Complex, f: ValueMap, sigma: str) -> CellSet:
    """st⁻(σ; f): strict cofaces with value at most f(σ)"""
    return frozenset(
        tau for tau in c.cofaces(sigma)
        if tau != sigma and f[tau] <= f[sigma]
    )


def upper_closure(c: Complex, f: ValueMap, sigma: str) -> CellSet:
    """cl⁺(σ; f): strict faces with value at least f(σ)"""
    return frozenset(
        tau for tau in c.faces(sigma)
        if tau != sigma and f[tau] >= f[sigma]
    )


def _argmin(f: ValueMap, cells: CellSet) -> Optional[str]:
    return min(cells, key=lambda cell: f[cell]) if cells else None


def halo(c: Complex, f: ValueMap, sigma: str) -> HaloResult:
    """Faces that enter closed sublevelsets exactly when the threshold reaches f(σ)"""
    ensure_injective(c, f)
    return _halo(c, f, sigma)


def _halo(c: Complex, f: ValueMap, sigma: str) -> HaloResult:
    faces = c.faces(sigma)
    members = frozenset(
        tau for tau in faces
        if tau != sigma and _argmin(f, lower_star(c, f, tau)) == sigma
    )
    augmented = members | {sigma}
    shadow = faces - augmented

    for lower in augmented:
        for above in c.cofaces(lower) & faces:
            if above not in augmented:
                raise InvariantViolation(
                    f"augmented halo of {sigma} is not an up-set: {lower} < {above}"
                )
    if not is_subcomplex(c, shadow):
        raise InvariantViolation(f"shadow of {sigma} is not a subcomplex")

    return HaloResult(cell=sigma, halo=members, augmented=augmented, shadow=shadow)


def sublevel_closure(c: Complex, f: ValueMap, threshold: Fraction) -> CellSet:
    """cl(f≤c): the smallest subcomplex holding every cell valued at most c"""
    return closure(c, [cell for cell in c.cells if f[cell] <= threshold])


def _isolated_cell(c: Complex, f: ValueMap, lo: Fraction, hi: Fraction) -> str:
    inside = sorted(cell for cell in c.cells if lo <= f[cell] <= hi)
    if len(inside) != 1:
        raise IntervalError(
            f"[{_value_text(lo)}, {_value_text(hi)}] contains {len(inside)} values, expected 1"
        )
    return inside[0]


def delta(c: Complex, f: ValueMap, lo: Fraction, hi: Fraction) -> CellSet:
    """cl(f≤hi) − cl(f≤lo) for an interval isolating one cell σ.

    The result is empty when σ already lies in cl(f≤lo) and is the
    augmented halo of σ otherwise; both sides are computed and compared.
    """
    ensure_injective(c, f)
    sigma = _isolated_cell(c, f, lo, hi)
    below = sublevel_closure(c, f, lo)
    difference = sublevel_closure(c, f, hi) - below

    expected = frozenset() if sigma in below else _halo(c, f, sigma).augmented
    if difference != expected:
        raise InvariantViolation(
            f"sublevel difference at {sigma} is {sorted(difference)}, halo analysis gives "
            f"{sorted(expected)}"
        )
    return difference


def choose_epsilon(f: ValueMap, center: Fraction) -> Fraction:
    """Half the distance from center to the nearest other value"""
    values = set(f.values())
    if center not in values:
        raise InputError(f"{_value_text(center)} is not a value of f")
    gaps = [abs(v - center) for v in values if v != center]
    if not gaps:
        return EPSILON_FALLBACK
    return min(gaps) / 2


def _forman_counts(c: Complex, f: ValueMap, strat: Stratification, sigma: str):
    stratum = strat.stratum_of(sigma).cells
    up = upper_closure(c, f, sigma) & stratum
    low = lower_star(c, f, sigma) & stratum
    return up, low


def _status(c: Complex, f: ValueMap, sigma: str, up: CellSet, low: CellSet):
    if up:
        return "paired-below", min(up)
    if low:
        return "paired-above", min(low)
    if lower_star(c, f, sigma):
        return "critical", None
    return "s-critical", None


def classify(c: Complex, strat: Stratification, f: ValueMap) -> MorseReport:
    """Pairing status of every cell within its stratum.

    Cells breaking the stratum-wise Forman condition are still classified
    and carry the violation in their failures.
    """
    ensure_injective(c, f)
    halo_members: set[str] = set()
    for sigma in c.cells:
        halo_members |= _halo(c, f, sigma).halo

    records = []
    for sigma in c.sorted_cells():
        up, low = _forman_counts(c, f, strat, sigma)
        status, partner = _status(c, f, sigma, up, low)
        failures = []
        if len(up) + len(low) > 1:
            failures.append(
                f"stratum-forman-condition: {len(up)} higher-valued faces and {len(low)} "
                f"lower-valued cofaces in stratum {strat.cell_to_stratum[sigma]}"
            )
        # empty lower star ⇔ σ lies in no halo
        if (not lower_star(c, f, sigma)) == (sigma in halo_members):
            raise InvariantViolation(f"halo membership of {sigma} disagrees with its lower star")
        for tau in upper_closure(c, f, sigma):
            if sigma not in lower_star(c, f, tau):
                raise InvariantViolation(
                    f"{tau} is in the upper closure of {sigma} but {sigma} is not in the lower star of {tau}"
                )
        records.append(CellRecord(
            cell=sigma,
            stratum=strat.cell_to_stratum[sigma],
            status=status,
            partner=partner,
            failures=failures,
        ))

    verdict = "invalid" if any(r.failures for r in records) else "valid"
    return MorseReport(records=records, verdict=verdict)


def forman_critical_cells(c: Complex, f: ValueMap) -> list[str]:
    """Critical cells of f as an unstratified (Forman) discrete Morse function"""
    report = classify(c, compute_strata(c, trivial_levels(c)), f)
    return report.with_status("critical", "s-critical")


def validate_sdmf(
    c: Complex,
    strat: Stratification,
    f: ValueMap,
    budget: Optional[int] = None,
) -> MorseReport:
    """Check both conditions of a stratified discrete Morse function.

    Paired-below cells get their filtered collapse cl(σ) ↝ sh(σ) searched
    and the certificate stored on the record for the sweep to reuse.
    """
    ensure_injective(c, f)
    if not check_frontier(c, strat).ok:
        raise PreconditionError("stratification fails the frontier axiom")
    budget = settings.collapse_budget if budget is None else budget

    report = classify(c, strat, f)
    exhausted: list[str] = []
    for record in report.records:
        if record.status != "paired-below" or record.failures:
            continue
        sigma, tau = record.cell, record.partner
        result = _halo(c, f, sigma)
        if tau not in result.halo:
            record.failures.append(
                f"halo-membership: partner {tau} is not in the halo of {sigma}"
            )
            continue

        faces = c.faces(sigma)
        local = induced_stratification(c, strat, faces)
        outcome = find_collapse(c, faces, result.shadow, strat=local, budget=budget)
        if outcome.status == "budget-exhausted":
            exhausted.append(sigma)
            continue
        if outcome.status == "no-collapse":
            record.failures.append(f"shadow-collapse: cl({sigma}) does not collapse onto its shadow")
            continue

        certificate = CollapseCertificate(
            pairs=[
                FreeFacePair(sigma=p.sigma, tau=p.tau, stratum=strat.cell_to_stratum[p.sigma])
                for p in outcome.certificate.pairs
            ],
            filtered=True,
        )
        first = certificate.pairs[0]
        if (first.sigma, first.tau) != (sigma, tau):
            raise InvariantViolation(
                f"collapse of cl({sigma}) starts with ({first.sigma}, {first.tau}), "
                f"expected ({sigma}, {tau})"
            )
        record.certificate = certificate

    if any(record.failures for record in report.records):
        report.verdict = "invalid"
    elif exhausted:
        logger.warning("collapse search budget of %d nodes exhausted at %s", budget,
                       ", ".join(exhausted))
        report.verdict = "inconclusive"
    else:
        report.verdict = "valid"

    logger.info("stratified Morse validation verdict: %s", report.verdict)
    return report


def sweep(
    c: Complex,
    strat: Stratification,
    f: ValueMap,
    budget: Optional[int] = None,
    report: Optional[MorseReport] = None,
) -> list[SweepEvent]:
    """Walk the cells in increasing f and describe each change of cl(f≤t).

    Regular cells yield filtered collapses built from the stored
    certificates; s-critical cells yield the attachment of cl(σ) along its
    shadow. Failed identities become theorem-violation events.
    """
    if report is None:
        report = validate_sdmf(c, strat, f, budget)
    if report.verdict == "inconclusive":
        raise InconclusiveError("validation ran out of budget; refusing to sweep")
    if report.verdict != "valid":
        raise PreconditionError("f is not a stratified discrete Morse function")

    events: list[SweepEvent] = []
    for sigma in sorted(c.cells, key=lambda cell: f[cell]):
        value = f[sigma]
        eps = choose_epsilon(f, value)
        lo, hi = value - eps, value + eps
        below = sublevel_closure(c, f, lo)
        above = sublevel_closure(c, f, hi)
        record = report.record(sigma)
        texts = dict(value=_value_text(value), lower=_value_text(lo), upper=_value_text(hi))

        if sigma in below:
            kind, detail = "no-change", ""
            if above != below:
                kind, detail = "theorem-violation", "sublevelset grew at a cell already present"
            events.append(SweepEvent(cell=sigma, kind=kind, detail=detail, **texts))
            continue

        if record.status != "s-critical":
            events.append(_regular_event(c, strat, sigma, record, above, below, texts))
            continue

        result = _halo(c, f, sigma)
        cell_closure = c.faces(sigma)
        problems = []
        if above != below | cell_closure:
            problems.append("union identity fails")
        if below & cell_closure != result.shadow:
            problems.append("intersection differs from the shadow")
        events.append(SweepEvent(
            cell=sigma,
            kind="theorem-violation" if problems else "s-critical-attachment",
            attachment=AttachmentTriple(closure=cell_closure, below=below, shadow=result.shadow),
            detail="; ".join(problems),
            **texts,
        ))

    violations = [e for e in events if e.kind == "theorem-violation"]
    if violations:
        logger.error("sweep produced %d theorem violations", len(violations))
    logger.info("sweep finished with %d events", len(events))
    return events


def _regular_event(c, strat, sigma, record, above, below, texts) -> SweepEvent:
    certificate = record.certificate
    if certificate is None:
        return SweepEvent(
            cell=sigma, kind="theorem-violation",
            detail=f"{sigma} enters the sublevelset but has no stored collapse", **texts,
        )
    try:
        result = replay(c, above, certificate, strat)
    except InvalidPair as exc:
        return SweepEvent(
            cell=sigma, kind="theorem-violation", certificate=certificate,
            detail=f"certificate does not replay on the sublevelset: {exc}", **texts,
        )
    if result != below:
        return SweepEvent(
            cell=sigma, kind="theorem-violation", certificate=certificate,
            detail="certificate does not end at the lower sublevelset", **texts,
        )
    return SweepEvent(cell=sigma, kind="regular-collapse", certificate=certificate, **texts)
