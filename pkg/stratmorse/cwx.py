"""The `cwx 1` text format: complexes with optional values, levels and multivectors.

    cwx 1
    # comment
    cell <id> <dim>
    face <parent> <child>
    value <id> <decimal>
    level <id> <int>
    mvf <part-id> <id>

Cells must be declared before any other line names them. Values are
exact decimals.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from importlib import resources
from typing import Optional

from pydantic import BaseModel, ConfigDict

from stratmorse.complex import Complex
from stratmorse.errors import InputError, ParseError
from stratmorse.models import MultivectorField
from stratmorse.subdivision import EnvelopeMap, SdComplex
from stratmorse.utils import chain_token, format_decimal, is_decimal_fraction, parse_decimal

logger = logging.getLogger(__name__)

HEADER = "cwx 1"

FIXTURE_PACKAGE = "stratmorse.fixtures"


class CwxDocument(BaseModel):
    """A parsed cwx file; absent sections are None"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    complex: Complex
    levels: Optional[dict[str, int]] = None
    values: Optional[dict[str, Fraction]] = None
    mvf: Optional[MultivectorField] = None


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int_field(text: str, lineno: int, what: str) -> int:
    try:
        number = int(text)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {text!r}") from None
    if number < 0:
        raise ParseError(lineno, f"{what} must be non-negative, got {number}")
    return number


def parse(text: str) -> CwxDocument:
    """Parse a cwx document; every error names the offending line"""
    cells: dict[str, int] = {}
    covering: set[tuple[str, str]] = set()
    values: dict[str, Fraction] = {}
    levels: dict[str, int] = {}
    parts: dict[str, set[str]] = {}
    seen_header = False

    def declared(token: str, lineno: int) -> str:
        if token not in cells:
            raise ParseError(lineno, f"cell {token} is not declared")
        return token

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        fields = line.split()

        if not seen_header:
            if fields != HEADER.split():
                raise ParseError(lineno, f"expected header {HEADER!r}, got {line!r}")
            seen_header = True
            continue

        keyword, args = fields[0], fields[1:]
        if len(args) != 2:
            raise ParseError(lineno, f"{keyword!r} takes 2 fields, got {len(args)}")

        if keyword == "cell":
            token, dim = args
            if token in cells:
                raise ParseError(lineno, f"cell {token} is declared twice")
            cells[token] = _int_field(dim, lineno, "dimension")
        elif keyword == "face":
            pair = (declared(args[0], lineno), declared(args[1], lineno))
            if pair in covering:
                raise ParseError(lineno, f"face {pair[0]} {pair[1]} is repeated")
            covering.add(pair)
        elif keyword == "value":
            token = declared(args[0], lineno)
            if token in values:
                raise ParseError(lineno, f"cell {token} has a second value")
            try:
                values[token] = parse_decimal(args[1])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif keyword == "level":
            token = declared(args[0], lineno)
            if token in levels:
                raise ParseError(lineno, f"cell {token} has a second level")
            levels[token] = _int_field(args[1], lineno, "level")
        elif keyword == "mvf":
            parts.setdefault(args[0], set()).add(declared(args[1], lineno))
        else:
            raise ParseError(lineno, f"unknown keyword {keyword!r}")

    if not seen_header:
        raise ParseError(1, f"missing header {HEADER!r}")

    document = CwxDocument(
        complex=Complex(cells=cells, covering=frozenset(covering)),
        levels=levels or None,
        values=values or None,
        mvf=MultivectorField(parts={k: frozenset(v) for k, v in parts.items()}) if parts else None,
    )
    logger.info("parsed %d cells and %d covering pairs", len(cells), len(covering))
    return document


def _value_field(value: Fraction) -> str:
    if not is_decimal_fraction(value):
        raise InputError(f"{value} has no finite decimal expansion")
    return format_decimal(value)


def serialize(doc: CwxDocument) -> str:
    """Canonical text: cells by (dim, id), then faces, values, levels, multivectors"""
    c = doc.complex
    lines = [HEADER]
    lines += [f"cell {cell} {c.cells[cell]}" for cell in sorted(c.cells, key=lambda x: (c.cells[x], x))]
    lines += [f"face {parent} {child}" for parent, child in sorted(c.covering)]
    if doc.values:
        lines += [f"value {cell} {_value_field(doc.values[cell])}" for cell in sorted(doc.values)]
    if doc.levels:
        lines += [f"level {cell} {doc.levels[cell]}" for cell in sorted(doc.levels)]
    if doc.mvf:
        for part_id in sorted(doc.mvf.parts):
            lines += [f"mvf {part_id} {cell}" for cell in sorted(doc.mvf.parts[part_id])]
    return "\n".join(lines) + "\n"


def serialize_subdivision(sd: SdComplex, env: Optional[EnvelopeMap] = None) -> str:
    """Sd(X) in cwx form with chain tokens as ids.

    Inherited levels are written when sd carries a stratification, envelope
    values when env is given.
    """
    lines = [HEADER]
    ordered = sorted(sd.simplices, key=lambda chain: (len(chain), chain_token(chain)))
    lines += [f"cell {chain_token(chain)} {len(chain) - 1}" for chain in ordered]

    faces = sorted(
        (chain_token(chain), chain_token(chain[:i] + chain[i + 1:]))
        for chain in ordered if len(chain) > 1
        for i in range(len(chain))
    )
    lines += [f"face {parent} {child}" for parent, child in faces]

    by_token = sorted(ordered, key=chain_token)
    if env is not None:
        lines += [f"value {chain_token(chain)} {_value_field(env[chain])}" for chain in by_token]
    if sd.stratification is not None:
        lines += [f"level {chain_token(chain)} {sd.inherited_level(chain)}" for chain in by_token]
    return "\n".join(lines) + "\n"


def parse_cell_list(text: str) -> list[str]:
    """Whitespace-separated cell ids with `#` comments"""
    tokens: list[str] = []
    for raw in text.splitlines():
        tokens += _strip_comment(raw).split()
    return tokens


def load_fixture(name: str) -> CwxDocument:
    """Parse one of the shipped fixtures, e.g. `fig1` or `disc`"""
    resource = resources.files(FIXTURE_PACKAGE).joinpath(f"{name}.cwx")
    if not resource.is_file():
        raise InputError(f"no fixture named {name!r}")
    return parse(resource.read_text(encoding="utf-8"))


def read_document(path: str) -> CwxDocument:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse(text)
