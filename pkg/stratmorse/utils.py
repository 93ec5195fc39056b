"""Normalisation helpers for values, tokens and chains."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


def parse_decimal(text: str) -> Fraction:
    """Return the exact rational denoted by a decimal string.

    Only plain decimals are accepted: `3`, `-0.25`, `.5`. Exponents and
    `p/q` forms are rejected so that values written to a file always
    read back as the same number.
    """
    stripped = text.strip()
    if not _DECIMAL.match(stripped):
        raise ValueError(f"not a decimal: {text!r}")
    return Fraction(stripped)


def is_decimal_fraction(value: Fraction) -> bool:
    """True iff the denominator only has prime factors 2 and 5."""
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def format_decimal(value: Fraction) -> str:
    """Render a rational with a finite decimal expansion exactly.

    `Fraction(3, 2)` becomes `1.5`, `Fraction(3)` becomes `3`.
    """
    if not is_decimal_fraction(value):
        raise ValueError(f"{value} has no finite decimal expansion")

    sign = "-" if value < 0 else ""
    value = abs(value)

    digits = 0
    while (value * 10 ** digits).denominator != 1:
        digits += 1

    scaled = (value * 10 ** digits).numerator
    if digits == 0:
        return f"{sign}{scaled}"

    whole, frac = divmod(scaled, 10 ** digits)
    frac_text = str(frac).rjust(digits, "0").rstrip("0")
    return f"{sign}{whole}.{frac_text}" if frac_text else f"{sign}{whole}"


def chain_token(chain: Iterable[str]) -> str:
    """Token naming a subdivision simplex, e.g. `[a<ab<F]`."""
    return "[" + "<".join(chain) + "]"
