"""One service method per CLI subcommand.

Every method takes a parsed document plus options and returns a
CommandReport; mathematical failures become a failed status, input
problems are raised.
"""
import logging
from fractions import Fraction
from typing import Any, Iterable, Optional

from pydantic import BaseModel

from stratmorse.complex import closure, euler_characteristic, validate_complex
from stratmorse.conley import (
    conley_index,
    e1_page,
    mvf_order,
    strata_mvf,
    validate_mvf,
)
from stratmorse.cwx import CwxDocument, serialize_subdivision
from stratmorse.errors import InputError
from stratmorse.homology import cw_relative_homology
from stratmorse.models import (
    CollapseCertificate,
    CommandReport,
    CycleWitness,
    GradedHomology,
    MorseReport,
    Stratification,
)
from stratmorse.morse import (
    choose_epsilon,
    delta,
    ensure_injective,
    halo,
    classify,
    sublevel_closure,
    sweep,
    tiebreak_values,
    validate_sdmf,
)
from stratmorse.stratification import (
    check_convexity,
    check_frontier,
    compute_strata,
    skeletal_levels,
    stratum_order,
)
from stratmorse.subdivision import (
    barycentric_subdivide,
    hv_split,
    lower_link,
    pushout_check,
    theorem_c_check,
    upper_envelope,
)
from stratmorse.utils import chain_token, format_decimal, is_decimal_fraction, parse_decimal

logger = logging.getLogger(__name__)


def _cells(cells: Iterable[str]) -> str:
    ordered = sorted(cells)
    return " ".join(ordered) if ordered else "-"


def _chains(chains: Iterable[tuple[str, ...]]) -> str:
    ordered = sorted(chain_token(chain) for chain in chains)
    return " ".join(ordered) if ordered else "-"


def _number(value: Fraction) -> str:
    return format_decimal(value) if is_decimal_fraction(value) else str(value)


def _homology(h: GradedHomology) -> str:
    return f"betti {h.betti} torsion {h.torsion}"


def _pairs(cert: CollapseCertificate) -> str:
    return " ".join(f"({p.sigma},{p.tau})" for p in cert.pairs) or "-"


class MorseService:
    """Service layer behind the CLI subcommands"""

    @staticmethod
    def stratification(doc: CwxDocument) -> Stratification:
        """Levels from the document, skeletal when it has none"""
        levels = doc.levels if doc.levels is not None else skeletal_levels(doc.complex)
        return compute_strata(doc.complex, levels)

    @staticmethod
    def values(doc: CwxDocument, tiebreak: bool = False) -> dict[str, Fraction]:
        """
        Exact values of the document, checked for injectivity

        Args:
            doc: Parsed cwx document
            tiebreak: Separate tied values instead of rejecting them

        Returns:
            Map from cell id to its value
        """
        if doc.values is None:
            raise InputError("document has no value lines")
        if tiebreak:
            return tiebreak_values(doc.complex, doc.values)
        ensure_injective(doc.complex, doc.values)
        return dict(doc.values)

    @staticmethod
    def validate(doc: CwxDocument) -> CommandReport:
        """Face poset checks plus cell count, dimension and Euler characteristic"""
        c = doc.complex
        report = validate_complex(c)
        lines = [f"cells {len(c.cells)} dimension {c.dimension} euler {euler_characteristic(c)}"]
        lines += [f"violation {v.rule} {_cells(v.cells)}: {v.detail}" for v in report.violations]
        lines.append(f"note {report.note}")
        lines.append(f"verdict {'pass' if report.ok else 'fail'}")
        return CommandReport(
            command="validate",
            status="ok" if report.ok else "failed",
            lines=lines,
            data={"report": report},
        )

    @staticmethod
    def strata(doc: CwxDocument) -> CommandReport:
        """Strata, frontier violations, and the stratum order when the frontier holds"""
        c = doc.complex
        strat = MorseService.stratification(doc)
        lines = [
            f"stratum {s.id} level {s.level} cells {_cells(s.cells)}" for s in strat.strata
        ]

        frontier = check_frontier(c, strat)
        lines += [
            f"frontier-violation cell {v.cell} stratum {v.stratum} missing {_cells(v.missing)}"
            for v in frontier.violations
        ]
        data: dict[str, Any] = {"stratification": strat, "frontier": frontier}
        if frontier.ok:
            order = stratum_order(c, strat)
            lines += [f"order {lo} < {hi}" for lo, hi in sorted(order.relation) if lo != hi]
            convexity = check_convexity(c, strat)
            lines += [f"violation {v.rule} {_cells(v.cells)}: {v.detail}" for v in convexity.violations]
            data.update(order=order, convexity=convexity)
        lines.append(f"frontier {'pass' if frontier.ok else 'fail'}")
        return CommandReport(
            command="strata",
            status="ok" if frontier.ok else "failed",
            lines=lines,
            data=data,
        )

    @staticmethod
    def halo(doc: CwxDocument, cell: str) -> CommandReport:
        """
        Halo, augmented halo and shadow of one cell

        Args:
            doc: Parsed cwx document with values
            cell: Cell id to inspect

        Returns:
            Report with one line per set
        """
        f = MorseService.values(doc)
        result = halo(doc.complex, f, cell)
        return CommandReport(
            command="halo",
            lines=[
                f"cell {cell} value {_number(f[cell])}",
                f"halo {_cells(result.halo)}",
                f"augmented {_cells(result.augmented)}",
                f"shadow {_cells(result.shadow)}",
            ],
            data={"halo": result},
        )

    @staticmethod
    def classify(doc: CwxDocument) -> CommandReport:
        """Pairing status of every cell inside its stratum, without collapse search"""
        f = MorseService.values(doc)
        report = classify(doc.complex, MorseService.stratification(doc), f)
        return MorseService._morse_report("classify", report)

    @staticmethod
    def check_morse(doc: CwxDocument, budget: Optional[int] = None, tiebreak: bool = False) -> CommandReport:
        """
        Full validation of the values as a stratified discrete Morse function

        Args:
            doc: Parsed cwx document with values
            budget: Node budget of each collapse search, settings default when None
            tiebreak: Separate tied values first and print the values used

        Returns:
            Report whose status follows the verdict (ok, failed or inconclusive)
        """
        f = MorseService.values(doc, tiebreak=tiebreak)
        report = validate_sdmf(doc.complex, MorseService.stratification(doc), f, budget)
        result = MorseService._morse_report("check-morse", report)
        if tiebreak:
            result.lines[:0] = [f"value {cell} {_number(f[cell])}" for cell in sorted(f)]
        return result

    @staticmethod
    def _morse_report(command: str, report: MorseReport) -> CommandReport:
        lines = []
        for record in report.records:
            line = f"cell {record.cell} stratum {record.stratum} {record.status}"
            if record.partner is not None:
                line += f" partner {record.partner}"
            lines.append(line)
            if record.certificate is not None:
                lines.append(f"  certificate {_pairs(record.certificate)}")
            lines += [f"  failure {failure}" for failure in record.failures]
        lines.append(f"verdict {report.verdict}")
        status = {"valid": "ok", "invalid": "failed", "inconclusive": "inconclusive"}[report.verdict]
        return CommandReport(command=command, status=status, lines=lines, data={"report": report})

    @staticmethod
    def sweep(doc: CwxDocument, budget: Optional[int] = None) -> CommandReport:
        """
        Event log of the sublevelset sweep with a homology check on every collapse

        Args:
            doc: Parsed cwx document with values
            budget: Node budget of each collapse search, settings default when None

        Returns:
            Report with one event per cell and a summary line; failed when a
            regular collapse has nonzero relative homology
        """
        c = doc.complex
        f = MorseService.values(doc)
        strat = MorseService.stratification(doc)
        events = sweep(c, strat, f, budget)

        lines = []
        for event in events:
            line = f"event {event.cell} value {event.value} window {event.lower} {event.upper} {event.kind}"
            if event.kind == "regular-collapse":
                eps = choose_epsilon(f, f[event.cell])
                pair = cw_relative_homology(
                    c,
                    sublevel_closure(c, f, f[event.cell] + eps),
                    sublevel_closure(c, f, f[event.cell] - eps),
                )
                if not pair.is_zero:
                    event.kind = "theorem-violation"
                    event.detail = f"collapse pair has homology {pair.betti}"
                    line = line.replace("regular-collapse", "theorem-violation")
            lines.append(line)
            if event.certificate is not None:
                lines.append(f"  certificate {_pairs(event.certificate)}")
            if event.attachment is not None:
                lines.append(f"  attach {_cells(event.attachment.closure)} along {_cells(event.attachment.shadow)}")
            if event.detail:
                lines.append(f"  detail {event.detail}")

        attached: dict[int, int] = {}
        for event in events:
            if event.kind == "s-critical-attachment":
                attached[c.cells[event.cell]] = attached.get(c.cells[event.cell], 0) + 1
        collapses = sum(1 for event in events if event.kind == "regular-collapse")
        violations = sum(1 for event in events if event.kind == "theorem-violation")
        lines.append(
            "summary attachments "
            + (" ".join(f"dim{k}={attached[k]}" for k in sorted(attached)) or "-")
            + f" collapses {collapses} violations {violations}"
        )
        return CommandReport(
            command="sweep",
            status="failed" if violations else "ok",
            lines=lines,
            data={"events": events},
        )

    @staticmethod
    def delta(doc: CwxDocument, lo: str, hi: str) -> CommandReport:
        """
        Cells gained by the sublevelset closure between two thresholds

        Args:
            doc: Parsed cwx document with values
            lo: Lower threshold as a decimal string
            hi: Upper threshold as a decimal string

        Returns:
            Report listing the interval and the gained cells
        """
        try:
            lower, upper = parse_decimal(lo), parse_decimal(hi)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        difference = delta(doc.complex, MorseService.values(doc), lower, upper)
        return CommandReport(
            command="delta",
            lines=[f"interval {_number(lower)} {_number(upper)}", f"delta {_cells(difference)}"],
            data={"delta": difference},
        )

    @staticmethod
    def subdivide(doc: CwxDocument) -> CommandReport:
        """Barycentric subdivision in cwx form, with envelope values when the document has values"""
        strat = MorseService.stratification(doc)
        sd = barycentric_subdivide(doc.complex, strat)
        env = upper_envelope(sd, doc.values) if doc.values is not None else None
        text = serialize_subdivision(sd, env)
        return CommandReport(
            command="subdivide",
            lines=text.splitlines(),
            data={"simplices": sd.simplices},
        )

    @staticmethod
    def _envelope(doc: CwxDocument):
        f = MorseService.values(doc)
        sd = barycentric_subdivide(doc.complex, MorseService.stratification(doc))
        return sd, upper_envelope(sd, f)

    @staticmethod
    def lowerlink(doc: CwxDocument, cell: str) -> CommandReport:
        """Lower link of a cell's vertex in the subdivision and its horizontal/vertical split"""
        sd, env = MorseService._envelope(doc)
        link = lower_link(sd, env, cell)
        horizontal, vertical = hv_split(sd, env, cell)
        lines = [f"cell {cell} value {_number(env[(cell,)])}"]
        lines += [f"simplex {chain_token(x)} value {_number(env[x])}" for x in sorted(link)]
        lines += [f"horizontal {_chains(horizontal)}", f"vertical {_chains(vertical)}"]
        return CommandReport(
            command="lowerlink",
            lines=lines,
            data={"lower_link": link, "horizontal": horizontal, "vertical": vertical},
        )

    @staticmethod
    def theorem_c(doc: CwxDocument, cell: str, pushout_only: bool = False) -> CommandReport:
        """
        Local splitting check at a critical cell

        Args:
            doc: Parsed cwx document with values
            cell: Cell id; must be critical in its stratum unless pushout_only is set
            pushout_only: Only check the cone-on-lower-link pushout, which holds for any cell

        Returns:
            Report with one PASS/FAIL line per condition and any witnesses
        """
        sd, env = MorseService._envelope(doc)
        if pushout_only:
            report = pushout_check(sd, env, cell)
            lines = [
                f"cell {cell} epsilon {report.epsilon}",
                f"lower-link {_chains(report.lower_link)}",
                f"union {'PASS' if report.union_ok else 'FAIL'}",
                f"intersection {'PASS' if report.intersection_ok else 'FAIL'}",
            ]
        else:
            report = theorem_c_check(sd, env, MorseService.stratification(doc), cell)
            lines = [
                f"cell {cell} epsilon {report.epsilon}",
                f"H {_chains(report.horizontal)}",
                f"V {_chains(report.vertical)}",
                f"union {'PASS' if report.union_ok else 'FAIL'}",
                f"intersection {'PASS' if report.intersection_ok else 'FAIL'}",
                f"horizontal-strata {'PASS' if report.horizontal_strata_ok else 'FAIL'}",
                f"vertical-strata {'PASS' if report.vertical_strata_ok else 'FAIL'}",
            ]
        lines += [f"  witness {w}" for w in report.witnesses]
        return CommandReport(
            command="theorem-c",
            status="ok" if report.ok else "failed",
            lines=lines,
            data={"report": report},
        )

    @staticmethod
    def conley(doc: CwxDocument) -> CommandReport:
        """Conley indices of the document's multivectors (strata when none are given)"""
        c = doc.complex
        mvf = doc.mvf if doc.mvf is not None else strata_mvf(MorseService.stratification(doc))
        check = validate_mvf(c, mvf)
        if not check.ok:
            lines = [f"violation {v.rule} {_cells(v.cells)}: {v.detail}" for v in check.violations]
            return CommandReport(command="conley", status="failed", lines=lines, data={"report": check})

        lines = [f"multivector {part} index {_homology(conley_index(c, mvf.parts[part]))}"
                 for part in sorted(mvf.parts)]
        order = mvf_order(c, mvf)
        if isinstance(order, CycleWitness):
            lines.append(f"cycle {' > '.join(order.cycle)}")
            return CommandReport(command="conley", status="failed", lines=lines, data={"cycle": order})

        page = e1_page(c, mvf)
        lines.append(f"ordering {' '.join(page.ordering)}")
        for entry in page.entries:
            for p, q, rank, torsion in entry.entries():
                lines.append(f"E1 p {p} q {q} multivector {entry.multivector} rank {rank} torsion {torsion}")
        lines.append(f"total-ranks {page.total_ranks} euler {page.euler}")
        lines.append(f"homology {_homology(page.absolute)}")
        return CommandReport(command="conley", lines=lines, data={"page": page})

    @staticmethod
    def homology(doc: CwxDocument, rel: Optional[Iterable[str]] = None) -> CommandReport:
        """
        Integer homology of the complex

        Args:
            doc: Parsed cwx document
            rel: Cells whose closure is the relative subcomplex, absolute homology when None

        Returns:
            Report with rank and torsion per degree
        """
        c = doc.complex
        small = closure(c, rel) if rel is not None else frozenset()
        result = cw_relative_homology(c, c.all_cells, small)
        lines = [f"relative-to {_cells(small)}"]
        lines += [
            f"H{k} rank {result.betti[k]} torsion {result.torsion[k]}" for k in range(len(result.betti))
        ]
        return CommandReport(command="homology", lines=lines, data={"homology": result})


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _plain({name: getattr(value, name) for name in type(value).model_fields})
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((_plain(v) for v in value), key=str)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Fraction):
        return _number(value)
    return value


def _nested(value: Any, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines += _nested(item, indent + 1)
            else:
                lines.append(f"{pad}{key}: {_scalar(item)}")
        return lines
    if isinstance(value, list):
        lines = []
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                lines += _nested(item, indent + 1)
            else:
                lines.append(f"{pad}- {_scalar(item)}")
        return lines
    return [f"{pad}{_scalar(value)}"]


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return "{}" if isinstance(value, dict) else "[]"
    return str(value)


def render(report: CommandReport, json_like: bool = False) -> str:
    """Line mode prints report.lines; json-like mode prints the data tree"""
    if not json_like:
        return "\n".join(report.lines) + "\n" if report.lines else ""
    tree = {"command": report.command, "status": report.status, "data": _plain(report.data)}
    return "\n".join(_nested(tree, 0)) + "\n"
